"""Constellations, PAPR/CCDF statistics and BER Monte Carlo."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Literal, Sequence

import numpy as np

from .channel import ChannelConfig, generate_channel
from .errors import DegenerateSignal, LengthError
from .link_dam import delay_plan, simulate_link
from .link_ofdm import OfdmConfig, equal_sample_power_budget, run_ofdm_chain, subcarrier_gains
from .precoder_digital import dam_isi_zf, ofdm_mrt_waterfill
from .precoder_hybrid import build_dictionary, dam_hybrid, omp_factorize

__all__ = [
    "QamConstellation",
    "qam",
    "qam_map",
    "qam_demap",
    "papr",
    "papr_db",
    "ccdf",
    "LinkChain",
    "BerResult",
    "block_seeds",
    "ber_run",
    "RESULT_CSV_FIELDS",
    "write_result_rows",
]


def _gray_positions(nbits: int) -> np.ndarray:
    """``pos[label]``: position along an axis of the Gray label ``label``."""
    n = 1 << nbits
    pos = np.empty(n, dtype=int)
    for i in range(n):
        pos[i ^ (i >> 1)] = i
    return pos


@dataclass(frozen=True)
class QamConstellation:
    """Unit-average-power QAM alphabet; ``points[label]`` is the symbol for ``label``.

    Even bit counts give square Gray-labelled grids. Odd counts of five or
    more give cross constellations: a Gray-labelled ``2n x n`` rectangle whose
    outermost columns are folded onto the top and bottom edges (quasi-Gray).
    Three bits give a ``4 x 2`` rectangle.
    """

    order: int
    points: np.ndarray = field(repr=False)

    @property
    def bits_per_symbol(self) -> int:
        return self.order.bit_length() - 1

    @property
    def bit_map(self) -> np.ndarray:
        """``order x bits_per_symbol`` array of labels, MSB first."""
        b = self.bits_per_symbol
        labels = np.arange(self.order)
        return (labels[:, None] >> np.arange(b - 1, -1, -1)) & 1


@lru_cache(maxsize=None)
def qam(order: int) -> QamConstellation:
    b = order.bit_length() - 1
    if order != 1 << b or not 2 <= b <= 8:
        raise ValueError(f"QAM order must be a power of two in 4..256, got {order}")
    bi = (b + 1) // 2  # bits on the in-phase axis
    bq = b - bi
    labels = np.arange(order)
    n_i, n_q = 1 << bi, 1 << bq
    pi = _gray_positions(bi)[labels >> bq]
    pq = _gray_positions(bq)[labels & (n_q - 1)]
    i = 2 * pi - (n_i - 1)
    q = 2 * pq - (n_q - 1)
    if b % 2 == 1 and b >= 5:
        nr = n_q
        edge = 3 * nr // 2 - 1
        outer = np.abs(i) > edge
        low = np.abs(q) <= nr // 2
        si, sq = np.sign(i), np.sign(q)
        a = outer & low
        c = outer & ~low
        i, q = i.copy(), q.copy()
        i[a], q[a] = si[a] * (np.abs(i[a]) - 3 * nr // 2), sq[a] * (np.abs(q[a]) + nr)
        i[c], q[c] = si[c] * (np.abs(i[c]) - nr), sq[c] * (np.abs(q[c]) + nr // 2)
    pts = (i + 1j * q).astype(complex)
    pts /= np.sqrt(np.mean(np.abs(pts) ** 2))
    pts.setflags(write=False)
    return QamConstellation(order=order, points=pts)


def qam_map(bits: np.ndarray, const: QamConstellation) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.int64).ravel()
    b = const.bits_per_symbol
    if bits.size % b:
        raise LengthError(f"{bits.size} bits is not a multiple of {b}")
    groups = bits.reshape(-1, b)
    labels = groups @ (1 << np.arange(b - 1, -1, -1))
    return const.points[labels]


def qam_demap(symbols: np.ndarray, const: QamConstellation, chunk: int = 1 << 15) -> np.ndarray:
    """Hard nearest-point decisions, returned as a flat bit array."""
    s = np.asarray(symbols, dtype=complex).ravel()
    labels = np.empty(s.size, dtype=np.int64)
    pts = const.points
    for start in range(0, s.size, chunk):
        blk = s[start:start + chunk]
        labels[start:start + chunk] = np.argmin(np.abs(blk[:, None] - pts[None, :]) ** 2, axis=1)
    return const.bit_map[labels].ravel()


def _oversample(x: np.ndarray, factor: int) -> np.ndarray:
    S = x.shape[-1]
    spec = np.fft.fft(x, axis=-1)
    half = (S + 1) // 2
    padded = np.zeros(x.shape[:-1] + (S * factor,), dtype=complex)
    padded[..., :half] = spec[..., :half]
    padded[..., S * factor - (S - half):] = spec[..., half:]
    return np.fft.ifft(padded, axis=-1) * factor


def papr(signal: np.ndarray, oversample: int = 1) -> float:
    """Largest per-antenna peak-to-mean power ratio of an ``M_t x S`` block.

    Antennas that transmit nothing are skipped.
    """
    x = np.atleast_2d(np.asarray(signal, dtype=complex))
    if oversample > 1:
        x = _oversample(x, oversample)
    p = np.abs(x) ** 2
    mean = p.mean(axis=1)
    live = mean > 0
    if not live.any():
        raise DegenerateSignal("all samples are zero")
    return float(np.max(p[live].max(axis=1) / mean[live]))


def papr_db(signal: np.ndarray, oversample: int = 1) -> float:
    return 10 * np.log10(papr(signal, oversample))


def ccdf(samples_db: Sequence[float], thresholds_db: Sequence[float]) -> np.ndarray:
    """Empirical ``P(X > threshold)`` for each threshold."""
    x = np.sort(np.asarray(samples_db, dtype=float))
    t = np.asarray(thresholds_db, dtype=float)
    if x.size == 0:
        raise ValueError("need at least one sample")
    return 1.0 - np.searchsorted(x, t, side="right") / x.size


@dataclass(frozen=True)
class LinkChain:
    """What ``ber_run`` simulates: scheme, beamforming type and link parameters.

    For OFDM, ``power`` given to ``ber_run`` is the per-sample transmit
    power, matched to DAM; the frequency-domain budget is ``K * power``.
    """

    scheme: Literal["dam", "ofdm"]
    beamforming: Literal["digital", "hybrid"]
    channel: ChannelConfig
    num_rf: int = 5
    symbols_per_block: int = 1024
    ofdm: OfdmConfig | None = None

    def __post_init__(self):
        if self.scheme not in ("dam", "ofdm"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.beamforming not in ("digital", "hybrid"):
            raise ValueError(f"unknown beamforming {self.beamforming!r}")
        if self.scheme == "ofdm" and self.ofdm is None:
            raise ValueError("OFDM chain needs an OfdmConfig")


@dataclass(frozen=True)
class BerResult:
    bit_errors: int
    bits_sent: int

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits_sent if self.bits_sent else float("nan")

    def __add__(self, other: "BerResult") -> "BerResult":
        return BerResult(self.bit_errors + other.bit_errors, self.bits_sent + other.bits_sent)


def block_seeds(seed: int, block_id: int) -> tuple[int, np.random.SeedSequence]:
    """Channel seed and data-stream seed for one Monte Carlo block."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(block_id),))
    ch_seed = int(ss.generate_state(1, dtype=np.uint64)[0])
    return ch_seed, ss.spawn(1)[0]


def _dam_block(chain, ch, power, noise_var, const, rng):
    if chain.beamforming == "digital":
        pre = dam_isi_zf(ch, power)
    else:
        pre = dam_hybrid(ch, power, chain.num_rf)
    b = const.bits_per_symbol
    bits = rng.integers(0, 2, chain.symbols_per_block * b)
    sim = simulate_link(ch, delay_plan(ch), pre, qam_map(bits, const), noise_var, rng)
    detected = qam_demap(sim.aligned / sim.desired_gain, const)
    return BerResult(int(np.count_nonzero(detected != bits)), bits.size)


def _ofdm_block(chain, ch, power, noise_var, const, rng):
    cfg = chain.ofdm
    K = cfg.num_subcarriers
    budget = equal_sample_power_budget(power, K)
    digital = ofdm_mrt_waterfill(ch, K, budget, noise_var)
    if chain.beamforming == "digital":
        pre = digital
    else:
        pre = omp_factorize(digital.columns, build_dictionary(ch), chain.num_rf, budget)
    active = digital.powers > 0
    n_act = int(active.sum())
    b = const.bits_per_symbol
    n_sym = cfg.symbols_per_block
    bits = rng.integers(0, 2, n_sym * n_act * b)
    s = np.zeros((n_sym, K), dtype=complex)
    s[:, active] = qam_map(bits, const).reshape(n_sym, n_act)
    y, _ = run_ofdm_chain(pre, s, ch, cfg, noise_var, rng)
    g = subcarrier_gains(ch, pre)
    detected = qam_demap(y[:, active] / g[active], const)
    return BerResult(int(np.count_nonzero(detected != bits)), bits.size)


def _one_block(chain, power, noise_var, const, seed, block_id):
    ch_seed, data_seed = block_seeds(seed, block_id)
    ch = generate_channel(chain.channel.with_seed(ch_seed))
    rng = np.random.default_rng(data_seed)
    if chain.scheme == "dam":
        return _dam_block(chain, ch, power, noise_var, const, rng)
    return _ofdm_block(chain, ch, power, noise_var, const, rng)


def ber_run(
    chain: LinkChain,
    power: float,
    noise_var: float,
    constellation: QamConstellation,
    num_blocks: int,
    seed: int,
    workers: int = 1,
) -> BerResult:
    """Monte Carlo bit error count over ``num_blocks`` independent channel draws.

    Block ``b`` uses seeds derived from ``(seed, b)`` only, so the total is
    the same for any ``workers`` value.
    """
    if num_blocks < 1:
        raise ValueError("num_blocks must be >= 1")
    ids = range(num_blocks)

    def job(b):
        return _one_block(chain, power, noise_var, constellation, seed, b)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, ids))
    else:
        parts = [job(b) for b in ids]
    total = BerResult(0, 0)
    for part in parts:
        total = total + part
    return total


RESULT_CSV_FIELDS = ("scheme", "beamforming", "P_dbm", "x", "value", "n_samples")


def write_result_rows(rows: Iterable[dict], x_name: str) -> str:
    """CSV with columns ``scheme, beamforming, P_dbm, <x_name>, value, n_samples``.

    ``x_name`` is ``threshold_db`` for CCDF tables and ``snr_point`` for BER.
    """
    fields = [x_name if f == "x" else f for f in RESULT_CSV_FIELDS]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()
