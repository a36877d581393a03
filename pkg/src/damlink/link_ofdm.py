"""OFDM baseline: CP-OFDM modulation through the multipath channel.

Power bookkeeping: with unitary transforms, OFDM symbol ``m`` carries
energy ``||W s[m]||^2`` spread over its ``K`` body samples; the CP repeats
``N_CP`` of them. For unit-power symbols the mean total transmit power per
sample (CP included) is therefore ``||W||_F^2 / K``, where ``W`` is the
``M_t x K`` precoding matrix (``U_RF U_BB`` or the digital MRT beams).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Protocol

import numpy as np

from .channel import ChannelRealization, apply_channel, frequency_response
from .errors import ConfigError, CpTooShort, DomainError
from .link_dam import _db, write_records
from .numerics import dft

__all__ = [
    "OfdmConfig",
    "OfdmLinkReport",
    "ofdm_modulate",
    "serialize",
    "ofdm_demodulate",
    "run_ofdm_chain",
    "subcarrier_gains",
    "per_subcarrier_snr",
    "equal_sample_power_budget",
    "ofdm_overhead",
    "spectral_efficiency_ofdm",
    "ofdm_link_report",
    "OFDM_CSV_FIELDS",
    "ofdm_run_record",
    "write_ofdm_records",
]


class Precoder(Protocol):
    @property
    def matrix(self) -> np.ndarray: ...


@dataclass(frozen=True)
class OfdmConfig:
    num_subcarriers: int
    cp_length: int
    symbols_per_block: int = 1

    def __post_init__(self):
        if self.num_subcarriers < 2:
            raise ConfigError("need at least 2 subcarriers")
        if self.cp_length < 0:
            raise ConfigError("cp_length must be >= 0")
        if self.symbols_per_block < 1:
            raise ConfigError("symbols_per_block must be >= 1")

    @property
    def symbol_length(self) -> int:
        return self.num_subcarriers + self.cp_length


@dataclass(frozen=True)
class OfdmLinkReport:
    snr: np.ndarray
    spectral_efficiency: float
    guard_overhead: float


def ofdm_modulate(pre: Precoder, symbols: np.ndarray, cfg: OfdmConfig) -> np.ndarray:
    """Precode and synthesise OFDM symbols.

    ``symbols`` is ``n_sym x K``. Returns ``n_sym x M_t x (N_CP + K)``;
    sample index ``j`` corresponds to time ``n = j - N_CP``.
    """
    w = pre.matrix
    s = np.atleast_2d(np.asarray(symbols, dtype=complex))
    K = cfg.num_subcarriers
    if s.shape[1] != K or w.shape[1] != K:
        raise ValueError(f"expected {K} subcarriers, got symbols {s.shape} and precoder {w.shape}")
    freq = w[None, :, :] * s[:, None, :]  # n_sym x M_t x K
    body = dft(freq, inverse=True, axis=-1)
    if cfg.cp_length == 0:
        return body
    return np.concatenate([body[..., K - cfg.cp_length:], body], axis=-1)


def serialize(blocks: np.ndarray) -> np.ndarray:
    """Concatenate ``n_sym x M_t x N`` OFDM symbols into an ``M_t x (n_sym N)`` stream."""
    n_sym, m_t, n = blocks.shape
    return blocks.transpose(1, 0, 2).reshape(m_t, n_sym * n)


def ofdm_demodulate(received: np.ndarray, ch: ChannelRealization, cfg: OfdmConfig) -> np.ndarray:
    """Strip the CP from each symbol of a received stream and apply the DFT.

    Returns ``n_sym x K`` frequency-domain samples ``y[m, k]``. Trailing
    samples past the last full symbol (the channel tail) are ignored.
    """
    if cfg.cp_length < ch.n_max:
        raise CpTooShort(f"CP of {cfg.cp_length} samples is shorter than max delay {ch.n_max}")
    n = cfg.symbol_length
    r = np.asarray(received, dtype=complex)
    n_sym = r.size // n
    frames = r[: n_sym * n].reshape(n_sym, n)[:, cfg.cp_length:]
    return dft(frames, axis=-1)


def run_ofdm_chain(
    pre: Precoder,
    symbols: np.ndarray,
    ch: ChannelRealization,
    cfg: OfdmConfig,
    noise_var: float = 0.0,
    seed: int | np.random.SeedSequence | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Modulate, pass through the channel with AWGN, and demodulate.

    Returns ``(y, tx)``: the ``n_sym x K`` demodulated samples and the
    transmitted ``n_sym x M_t x (N_CP + K)`` blocks.
    """
    if cfg.cp_length < ch.n_max:
        raise CpTooShort(f"CP of {cfg.cp_length} samples is shorter than max delay {ch.n_max}")
    tx = ofdm_modulate(pre, symbols, cfg)
    rng = np.random.default_rng(seed)
    rx = apply_channel(ch, serialize(tx), noise_var, rng if noise_var > 0 else None)
    return ofdm_demodulate(rx, ch, cfg), tx


def subcarrier_gains(ch: ChannelRealization, pre: Precoder) -> np.ndarray:
    """One-tap gains ``sqrt(K) h[k]^H w_k`` relating ``y[m, k]`` to ``s[m, k]``."""
    w = pre.matrix
    K = w.shape[1]
    hk = frequency_response(ch, K)
    return np.sqrt(K) * np.sum(hk.conj() * w, axis=0)


def per_subcarrier_snr(ch: ChannelRealization, pre: Precoder, noise_var: float) -> np.ndarray:
    """``gamma_k = |h[k]^H w_k|^2 / (sigma^2 / K)``."""
    return np.abs(subcarrier_gains(ch, pre)) ** 2 / noise_var


def equal_sample_power_budget(power: float, num_subcarriers: int) -> float:
    """Frequency-domain budget ``sum_k p_k`` that radiates ``power`` per sample.

    A DAM transmitter with ``||F||_F^2 = P`` radiates ``P`` per sample, while
    an OFDM precoder ``W`` radiates ``||W||_F^2 / K``; comparing the two at
    equal transmit power therefore needs ``||W||_F^2 = K P``.
    """
    return float(power) * int(num_subcarriers)


def ofdm_overhead(n_c: int, n_ofdm: int, n_max_bound: int) -> float:
    frac = n_ofdm * n_max_bound / n_c
    if not frac < 1.0:
        raise DomainError(f"CP overhead {n_ofdm}*{n_max_bound} consumes the block of {n_c}")
    return frac


def spectral_efficiency_ofdm(
    snr: np.ndarray,
    n_c: int,
    n_ofdm: int,
    n_max_bound: int,
) -> float:
    """``(n_c - n_ofdm n_max_bound)/n_c * mean_k log2(1 + gamma_k)``."""
    snr = np.asarray(snr, dtype=float)
    return (1.0 - ofdm_overhead(n_c, n_ofdm, n_max_bound)) * float(np.mean(np.log2(1.0 + snr)))


def ofdm_link_report(
    ch: ChannelRealization,
    pre: Precoder,
    noise_var: float,
    n_c: int,
    n_ofdm: int,
    n_max_bound: int,
) -> OfdmLinkReport:
    snr = per_subcarrier_snr(ch, pre, noise_var)
    return OfdmLinkReport(
        snr=snr,
        spectral_efficiency=spectral_efficiency_ofdm(snr, n_c, n_ofdm, n_max_bound),
        guard_overhead=ofdm_overhead(n_c, n_ofdm, n_max_bound),
    )


OFDM_CSV_FIELDS = (
    "run_id",
    "seed",
    "M_t",
    "M_RF",
    "L",
    "P_dbm",
    "K",
    "snr_min_db",
    "snr_median_db",
    "snr_max_db",
    "se_bpshz",
    "overhead",
)


def ofdm_run_record(
    run_id: int,
    seed: int,
    ch: ChannelRealization,
    num_rf: int | None,
    p_dbm: float,
    report: OfdmLinkReport,
) -> dict:
    snr = report.snr
    return {
        "run_id": run_id,
        "seed": seed,
        "M_t": ch.num_antennas,
        "M_RF": ch.num_antennas if num_rf is None else num_rf,
        "L": ch.num_paths,
        "P_dbm": f"{p_dbm:g}",
        "K": snr.size,
        "snr_min_db": _db(float(np.min(snr))),
        "snr_median_db": _db(float(np.median(snr))),
        "snr_max_db": _db(float(np.max(snr))),
        "se_bpshz": f"{report.spectral_efficiency:.6f}",
        "overhead": f"{report.guard_overhead:.8f}",
    }


def write_ofdm_records(rows: Iterable[dict]) -> str:
    return write_records(rows, OFDM_CSV_FIELDS)
