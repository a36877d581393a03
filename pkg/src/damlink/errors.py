"""Exception types raised across the package."""


class DamLinkError(Exception):
    """Base class for all package errors."""


class RankDeficient(DamLinkError, ValueError):
    """A matrix lacks the full column rank an operation requires."""


class ConfigError(DamLinkError, ValueError):
    pass


class DomainError(DamLinkError, ValueError):
    """An argument lies outside the domain where a formula is defined."""


class DegenerateChannel(DamLinkError, ValueError):
    pass


class DegenerateSignal(DamLinkError, ValueError):
    pass


class DictionaryTooSmall(DamLinkError, ValueError):
    pass


class CpTooShort(DamLinkError, ValueError):
    """Cyclic prefix is shorter than the channel's maximum delay."""


class LengthError(DamLinkError, ValueError):
    pass
