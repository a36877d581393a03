"""Sparse multipath MISO channel: generation, frequency response, replay files.

A realization holds ``L`` temporally resolvable paths. Path ``l`` arrives
after ``n_l`` samples and carries the transmit-side channel vector

    h_l = alpha_l * sum_i nu_li * a_t(theta_li)

where ``a_t`` is the ULA steering vector and the sub-path coefficients
satisfy ``sum_i |nu_li|^2 = 1``. The scalar received sample is
``y[n] = sum_l h_l^H x[n - n_l]``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict
from pathlib import Path

import jsonschema
import numpy as np

from .errors import ConfigError, DomainError

__all__ = [
    "ArrayGeometry",
    "ChannelConfig",
    "ChannelRealization",
    "array_response",
    "generate_channel",
    "frequency_response",
    "apply_channel",
    "CHANNEL_SCHEMA",
]


@dataclass(frozen=True)
class ArrayGeometry:
    num_antennas: int
    spacing: float = 0.5  # element spacing in wavelengths

    def __post_init__(self):
        if self.num_antennas < 1:
            raise ConfigError("num_antennas must be >= 1")
        if not self.spacing > 0:
            raise ConfigError("spacing must be positive")


@dataclass(frozen=True)
class ChannelConfig:
    """Parameters of the random channel generator.

    ``path_power`` is the mean power ``E|alpha_l|^2`` of each path before
    large-scale attenuation; it defaults to ``1/L`` per path. ``path_loss_db``
    scales every path power by ``10^(-path_loss_db/10)``. ``fixed_gain``
    bypasses the random gains entirely and zeroes the sub-path phases, so
    that e.g. one broadside sub-path gives ``h_1 = fixed_gain * 1`` (test hook).
    """

    num_paths: int
    max_delay_taps: int
    max_subpaths: int
    geometry: ArrayGeometry
    aod_range_deg: tuple[float, float] = (-60.0, 60.0)
    seed: int = 0
    path_power: tuple[float, ...] | None = None
    path_loss_db: float = 0.0
    fixed_gain: complex | None = None

    def __post_init__(self):
        if self.num_paths < 1:
            raise ConfigError("num_paths must be >= 1")
        if self.max_delay_taps < 0:
            raise ConfigError("max_delay_taps must be >= 0")
        if self.num_paths > self.max_delay_taps + 1:
            raise ConfigError(
                f"{self.num_paths} distinct delays do not fit in taps 0..{self.max_delay_taps}"
            )
        if self.max_subpaths < 1:
            raise ConfigError("max_subpaths must be >= 1")
        lo, hi = self.aod_range_deg
        if not (-90.0 < lo <= hi < 90.0):
            raise ConfigError(f"AoD range {self.aod_range_deg} must lie inside (-90, 90) degrees")
        if self.path_power is not None and len(self.path_power) != self.num_paths:
            raise ConfigError("path_power needs one entry per path")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")

    def mean_path_power(self) -> np.ndarray:
        if self.path_power is None:
            base = np.full(self.num_paths, 1.0 / self.num_paths)
        else:
            base = np.asarray(self.path_power, dtype=float)
        return base * 10.0 ** (-self.path_loss_db / 10.0)

    def with_seed(self, seed: int) -> "ChannelConfig":
        return ChannelConfig(**{**self._fields(), "seed": int(seed)})

    def with_geometry(self, geometry: ArrayGeometry) -> "ChannelConfig":
        return ChannelConfig(**{**self._fields(), "geometry": geometry})

    def _fields(self) -> dict:
        return {name: getattr(self, name) for name in self.__dataclass_fields__}

    def to_dict(self) -> dict:
        d = asdict(self)
        d["aod_range_deg"] = list(self.aod_range_deg)
        d["path_power"] = None if self.path_power is None else list(self.path_power)
        g = self.fixed_gain
        d["fixed_gain"] = None if g is None else [complex(g).real, complex(g).imag]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ChannelConfig":
        g = d.get("fixed_gain")
        pp = d.get("path_power")
        return cls(
            num_paths=int(d["num_paths"]),
            max_delay_taps=int(d["max_delay_taps"]),
            max_subpaths=int(d["max_subpaths"]),
            geometry=ArrayGeometry(**d["geometry"]),
            aod_range_deg=tuple(float(v) for v in d.get("aod_range_deg", (-60.0, 60.0))),
            seed=int(d.get("seed", 0)),
            path_power=None if pp is None else tuple(float(v) for v in pp),
            path_loss_db=float(d.get("path_loss_db", 0.0)),
            fixed_gain=None if g is None else complex(g[0], g[1]),
        )


def array_response(geometry: ArrayGeometry, theta: float) -> np.ndarray:
    """ULA transmit steering vector, entry ``m`` = ``exp(-2j pi (d/lambda) m sin theta)``."""
    m = np.arange(geometry.num_antennas)
    return np.exp(-2j * np.pi * geometry.spacing * m * np.sin(theta))


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of the sparse multipath channel.

    ``subpaths[l]`` is a tuple of ``(nu_li, theta_li)`` pairs with angles in
    radians. ``path_vectors`` (``M_t x L``, column ``l`` is ``h_l``) is
    rebuilt from the gains and sub-paths on construction.
    """

    delays: tuple[int, ...]
    gains: tuple[complex, ...]
    subpaths: tuple[tuple[tuple[complex, float], ...], ...]
    geometry: ArrayGeometry
    seed: int | None = None
    config: ChannelConfig | None = None
    path_vectors: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.delays) != len(self.gains) or len(self.delays) != len(self.subpaths):
            raise ConfigError("delays, gains and subpaths must have one entry per path")
        if len(set(self.delays)) != len(self.delays):
            raise ConfigError(f"path delays must be distinct, got {self.delays}")
        if any(n < 0 for n in self.delays):
            raise ConfigError("path delays must be nonnegative")
        if any(len(sp) == 0 for sp in self.subpaths):
            raise ConfigError("every path needs at least one sub-path")
        cols = []
        for alpha, sp in zip(self.gains, self.subpaths):
            v = sum(nu * array_response(self.geometry, th) for nu, th in sp)
            cols.append(alpha * v)
        h = np.column_stack(cols).astype(complex)
        h.setflags(write=False)
        object.__setattr__(self, "path_vectors", h)

    @property
    def num_paths(self) -> int:
        return len(self.delays)

    @property
    def num_antennas(self) -> int:
        return self.geometry.num_antennas

    @property
    def n_min(self) -> int:
        return min(self.delays)

    @property
    def n_max(self) -> int:
        return max(self.delays)

    @property
    def n_span(self) -> int:
        return self.n_max - self.n_min

    @property
    def num_subpaths(self) -> tuple[int, ...]:
        return tuple(len(sp) for sp in self.subpaths)

    def to_dict(self) -> dict:
        return {
            "schema": "damlink.channel/1",
            "seed": self.seed,
            "geometry": asdict(self.geometry),
            "config": None if self.config is None else self.config.to_dict(),
            "paths": [
                {
                    "delay": int(n),
                    "gain": [complex(a).real, complex(a).imag],
                    "subpaths": [
                        {"coef": [complex(nu).real, complex(nu).imag], "aod_rad": float(th)}
                        for nu, th in sp
                    ],
                }
                for n, a, sp in zip(self.delays, self.gains, self.subpaths)
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ChannelRealization":
        try:
            jsonschema.validate(d, CHANNEL_SCHEMA)
        except jsonschema.ValidationError as exc:
            raise ConfigError(f"invalid channel document: {exc.message}") from exc
        paths = d["paths"]
        return cls(
            delays=tuple(int(p["delay"]) for p in paths),
            gains=tuple(complex(*p["gain"]) for p in paths),
            subpaths=tuple(
                tuple((complex(*s["coef"]), float(s["aod_rad"])) for s in p["subpaths"])
                for p in paths
            ),
            geometry=ArrayGeometry(**d["geometry"]),
            seed=d.get("seed"),
            config=None if d.get("config") is None else ChannelConfig.from_dict(d["config"]),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ChannelRealization":
        return cls.from_dict(json.loads(text))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path: str | Path) -> "ChannelRealization":
        return cls.from_json(Path(path).read_text())


_PAIR = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}

CHANNEL_SCHEMA = {
    "type": "object",
    "required": ["schema", "geometry", "paths"],
    "properties": {
        "schema": {"const": "damlink.channel/1"},
        "seed": {"type": ["integer", "null"], "minimum": 0},
        "geometry": {
            "type": "object",
            "required": ["num_antennas", "spacing"],
            "properties": {
                "num_antennas": {"type": "integer", "minimum": 1},
                "spacing": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "config": {"type": ["object", "null"]},
        "paths": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["delay", "gain", "subpaths"],
                "properties": {
                    "delay": {"type": "integer", "minimum": 0},
                    "gain": _PAIR,
                    "subpaths": {
                        "type": "array",
                        "minItems": 1,
                        "items": {
                            "type": "object",
                            "required": ["coef", "aod_rad"],
                            "properties": {"coef": _PAIR, "aod_rad": {"type": "number"}},
                        },
                    },
                },
            },
        },
    },
}


def generate_channel(cfg: ChannelConfig) -> ChannelRealization:
    """Draw a channel realization, deterministic in ``cfg.seed``.

    Delays are ``L`` distinct taps drawn uniformly from ``0..max_delay_taps``
    and stored in increasing order. Each path gets ``mu_l ~ U{1..max_subpaths}``
    sub-paths with AoDs uniform on the configured range, sub-path powers
    uniform on the simplex and uniform phases. Path gains are circularly
    symmetric Gaussian with variance ``cfg.mean_path_power()``.
    """
    rng = np.random.default_rng(cfg.seed)
    L = cfg.num_paths
    delays = np.sort(rng.choice(cfg.max_delay_taps + 1, size=L, replace=False))
    lo, hi = np.deg2rad(cfg.aod_range_deg)
    var = cfg.mean_path_power()
    subpaths = []
    gains = []
    for l in range(L):
        mu = int(rng.integers(1, cfg.max_subpaths + 1))
        powers = rng.dirichlet(np.ones(mu)) if mu > 1 else np.ones(1)
        phases = rng.uniform(0.0, 2 * np.pi, size=mu)
        thetas = rng.uniform(lo, hi, size=mu)
        nu = np.sqrt(powers) * np.exp(1j * phases)
        subpaths.append(tuple((complex(c), float(t)) for c, t in zip(nu, thetas)))
        g = np.sqrt(var[l] / 2) * (rng.standard_normal() + 1j * rng.standard_normal())
        gains.append(complex(g))
    if cfg.fixed_gain is not None:
        gains = [complex(cfg.fixed_gain)] * L
        subpaths = [tuple((complex(abs(nu)), th) for nu, th in sp) for sp in subpaths]
    return ChannelRealization(
        delays=tuple(int(n) for n in delays),
        gains=tuple(gains),
        subpaths=tuple(subpaths),
        geometry=cfg.geometry,
        seed=cfg.seed,
        config=cfg,
    )


def frequency_response(ch: ChannelRealization, num_subcarriers: int) -> np.ndarray:
    """Per-subcarrier channel vectors, ``M_t x K``.

    Column ``k`` is ``h[k]`` defined through
    ``h[k]^H = K^{-1/2} sum_l h_l^H exp(-2j pi k n_l / K)``, so that the
    subcarrier-``k`` gain of a precoder ``u`` is ``sqrt(K) h[k]^H u``.
    """
    K = int(num_subcarriers)
    if K <= ch.n_max:
        raise DomainError(f"K={K} must exceed the maximum delay {ch.n_max}")
    k = np.arange(K)
    phase = np.exp(2j * np.pi * np.outer(ch.delays, k) / K)  # L x K
    return ch.path_vectors @ phase / np.sqrt(K)


def apply_channel(
    ch: ChannelRealization,
    x: np.ndarray,
    noise_var: float = 0.0,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Pass an ``M_t x S`` transmit block through the tap channel.

    Returns ``S + n_max`` received samples ``y[n] = sum_l h_l^H x[n - n_l] + z[n]``
    with ``z ~ CN(0, noise_var)``.
    """
    x = np.asarray(x, dtype=complex)
    S = x.shape[1]
    y = np.zeros(S + ch.n_max, dtype=complex)
    proj = ch.path_vectors.conj().T @ x  # L x S, row l = h_l^H x[n]
    for l, n in enumerate(ch.delays):
        y[n:n + S] += proj[l]
    if noise_var > 0:
        if rng is None:
            raise ValueError("rng required when noise_var > 0")
        y += np.sqrt(noise_var / 2) * (rng.standard_normal(y.size) + 1j * rng.standard_normal(y.size))
    return y
