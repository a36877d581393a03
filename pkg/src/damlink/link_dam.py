"""Delay alignment modulation: delay plan, transmit synthesis, SINR, simulation.

Every path ``l`` is fed the symbol stream delayed by ``kappa_l = n_max - n_l``
so that all path contributions of ``s[n]`` land on lag ``n_max`` at the
receiver. What the precoder does not zero-force reappears as ISI at the delay
differences ``n_l' - n_l``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Protocol

import numpy as np

from .channel import ChannelRealization, apply_channel
from .errors import DomainError

__all__ = [
    "DelayPlan",
    "EffectiveChannelMap",
    "DamLinkReport",
    "DamSimulation",
    "delay_plan",
    "synthesize_tx",
    "effective_channel_map",
    "cross_gains",
    "analytic_sinr",
    "isi_taps",
    "simulate_link",
    "spectral_efficiency_dam",
    "dam_overhead",
    "dam_link_report",
    "DAM_CSV_FIELDS",
    "dam_run_record",
    "write_records",
]


class Precoder(Protocol):
    @property
    def matrix(self) -> np.ndarray: ...


@dataclass(frozen=True)
class DelayPlan:
    kappas: tuple[int, ...]
    n_max: int
    n_min: int

    @property
    def n_span(self) -> int:
        return self.n_max - self.n_min


@dataclass(frozen=True)
class EffectiveChannelMap:
    """Grouped ISI channels keyed by delay difference.

    ``source[i][lp]`` is the path ``l`` with ``n_lp - n_l == i`` (so that
    ``g_lp[i] = h_l``), or ``None`` when no such path exists.
    """

    source: dict[int, tuple[int | None, ...]]
    path_vectors: np.ndarray
    n_span: int

    def vector(self, lp: int, i: int) -> np.ndarray:
        l = self.source.get(i, (None,) * self.path_vectors.shape[1])[lp]
        if l is None:
            return np.zeros(self.path_vectors.shape[0], dtype=complex)
        return self.path_vectors[:, l]

    @property
    def offsets(self) -> list[int]:
        return [i for i in range(-self.n_span, self.n_span + 1) if i != 0]


@dataclass(frozen=True)
class DamLinkReport:
    sinr: float
    desired_gain: complex
    isi_power: float
    spectral_efficiency: float
    guard_overhead: float


@dataclass(frozen=True)
class DamSimulation:
    received: np.ndarray  # y[n], n = 0 .. S + 2 n_max - 1
    aligned: np.ndarray  # y[n + n_max] for n = 0 .. S-1, paired with s[n]
    desired_gain: complex
    sinr_empirical: float
    desired_power: float
    isi_power: float
    noise_power: float


def delay_plan(ch: ChannelRealization) -> DelayPlan:
    n_max = ch.n_max
    return DelayPlan(kappas=tuple(n_max - n for n in ch.delays), n_max=n_max, n_min=ch.n_min)


def synthesize_tx(plan: DelayPlan, pre: Precoder, symbols: np.ndarray) -> np.ndarray:
    """Transmit block ``x[n] = sum_l w_l s[n - kappa_l]`` of shape ``M_t x (S + n_max)``.

    ``w_l`` is column ``l`` of ``pre.matrix`` (``F_RF F_BB`` or the digital
    beams). Symbols outside ``0..S-1`` are zero.
    """
    w = pre.matrix
    s = np.asarray(symbols, dtype=complex)
    S = s.size
    x = np.zeros((w.shape[0], S + plan.n_max), dtype=complex)
    for l, kappa in enumerate(plan.kappas):
        x[:, kappa:kappa + S] += np.outer(w[:, l], s)
    return x


def effective_channel_map(ch: ChannelRealization) -> EffectiveChannelMap:
    delays = ch.delays
    L = len(delays)
    by_delay = {n: l for l, n in enumerate(delays)}
    source = {}
    for i in range(-ch.n_span, ch.n_span + 1):
        if i == 0:
            continue
        source[i] = tuple(by_delay.get(delays[lp] - i) for lp in range(L))
    return EffectiveChannelMap(source=source, path_vectors=ch.path_vectors, n_span=ch.n_span)


def cross_gains(ch: ChannelRealization, pre: Precoder) -> np.ndarray:
    """``C[l, l'] = h_l^H w_l'``: gain of stream ``l'`` through path ``l``."""
    return ch.path_vectors.conj().T @ pre.matrix


def isi_taps(emap: EffectiveChannelMap, gains: np.ndarray) -> dict[int, complex]:
    """Grouped ISI coefficient ``sum_l' g_l'[i]^H w_l'`` for every offset ``i``."""
    taps = {}
    for i in emap.offsets:
        acc = 0j
        for lp, l in enumerate(emap.source[i]):
            if l is not None:
                acc += gains[l, lp]
        taps[i] = acc
    return taps


def analytic_sinr(
    ch: ChannelRealization,
    emap: EffectiveChannelMap,
    pre: Precoder,
    noise_var: float,
) -> float:
    """``|sum_l h_l^H w_l|^2 / (sum_{i != 0} |sum_l' g_l'[i]^H w_l'|^2 + sigma^2)``."""
    c = cross_gains(ch, pre)
    desired = np.trace(c)
    isi = sum(abs(t) ** 2 for t in isi_taps(emap, c).values())
    denom = isi + noise_var
    if denom == 0:
        return np.inf if desired != 0 else 0.0
    return float(abs(desired) ** 2 / denom)


def simulate_link(
    ch: ChannelRealization,
    plan: DelayPlan,
    pre: Precoder,
    symbols: np.ndarray,
    noise_var: float,
    seed: int | np.random.SeedSequence | None = None,
) -> DamSimulation:
    """Send ``symbols`` through the channel and measure the SINR at lag ``n_max``.

    The noiseless output is split into its desired part (the ``l == l'``
    terms) and the ISI remainder; noise is what the noisy run adds on top.
    Powers are averaged over symbols ``n_span .. S - n_span - 1`` so that
    every averaged sample sees its full set of ISI neighbours.
    """
    s = np.asarray(symbols, dtype=complex)
    S = s.size
    if S < plan.n_span + 1:
        raise DomainError(f"need at least n_span + 1 = {plan.n_span + 1} symbols, got {S}")
    rng = np.random.default_rng(seed)
    x = synthesize_tx(plan, pre, s)
    clean = apply_channel(ch, x)
    received = apply_channel(ch, x, noise_var, rng) if noise_var > 0 else clean.copy()

    c = cross_gains(ch, pre)
    desired_gain = complex(np.trace(c))
    desired = np.zeros_like(clean)
    for l, n in enumerate(ch.delays):
        k = plan.kappas[l] + n
        desired[k:k + S] += c[l, l] * s
    isi = clean - desired
    noise = received - clean

    lag = plan.n_max
    aligned = received[lag:lag + S]
    lo, hi = lag + plan.n_span, lag + S - plan.n_span
    if hi <= lo:
        lo, hi = lag, lag + S
    p_des = float(np.mean(np.abs(desired[lo:hi]) ** 2))
    p_isi = float(np.mean(np.abs(isi[lo:hi]) ** 2))
    p_noise = float(np.mean(np.abs(noise[lo:hi]) ** 2))
    denom = p_isi + p_noise
    sinr = p_des / denom if denom > 0 else np.inf
    return DamSimulation(
        received=received,
        aligned=aligned,
        desired_gain=desired_gain,
        sinr_empirical=sinr,
        desired_power=p_des,
        isi_power=p_isi,
        noise_power=p_noise,
    )


def dam_overhead(n_c: int, n_max_bound: int) -> float:
    """Guard fraction ``2 n_max_bound / n_c`` of a DAM coherence block."""
    if n_c <= 2 * n_max_bound:
        raise DomainError(f"coherence block n_c={n_c} too short for guard 2*{n_max_bound}")
    return 2 * n_max_bound / n_c


def spectral_efficiency_dam(sinr: float, n_c: int, n_max_bound: int) -> float:
    """Effective spectral efficiency ``(n_c - 2 n_max_bound)/n_c * log2(1 + sinr)``."""
    return (1.0 - dam_overhead(n_c, n_max_bound)) * float(np.log2(1.0 + sinr))


def dam_link_report(
    ch: ChannelRealization,
    pre: Precoder,
    noise_var: float,
    n_c: int,
    n_max_bound: int,
) -> DamLinkReport:
    emap = effective_channel_map(ch)
    c = cross_gains(ch, pre)
    isi = float(sum(abs(t) ** 2 for t in isi_taps(emap, c).values()))
    sinr = analytic_sinr(ch, emap, pre, noise_var)
    return DamLinkReport(
        sinr=sinr,
        desired_gain=complex(np.trace(c)),
        isi_power=isi,
        spectral_efficiency=spectral_efficiency_dam(sinr, n_c, n_max_bound),
        guard_overhead=dam_overhead(n_c, n_max_bound),
    )


DAM_CSV_FIELDS = (
    "run_id",
    "seed",
    "M_t",
    "M_RF",
    "L",
    "P_dbm",
    "sinr_analytic_db",
    "sinr_empirical_db",
    "se_bpshz",
    "overhead",
)


def _db(x: float | None) -> str:
    if x is None:
        return ""
    if x <= 0:
        return "-inf"
    return f"{10 * np.log10(x):.6f}"


def dam_run_record(
    run_id: int,
    seed: int,
    ch: ChannelRealization,
    num_rf: int | None,
    p_dbm: float,
    report: DamLinkReport,
    sinr_empirical: float | None = None,
) -> dict:
    """One CSV row; ``num_rf`` is ``None`` for fully digital beamforming (written as ``M_t``)."""
    return {
        "run_id": run_id,
        "seed": seed,
        "M_t": ch.num_antennas,
        "M_RF": ch.num_antennas if num_rf is None else num_rf,
        "L": ch.num_paths,
        "P_dbm": f"{p_dbm:g}",
        "sinr_analytic_db": _db(report.sinr),
        "sinr_empirical_db": _db(sinr_empirical),
        "se_bpshz": f"{report.spectral_efficiency:.6f}",
        "overhead": f"{report.guard_overhead:.8f}",
    }


def write_records(rows: Iterable[dict], fields: tuple[str, ...] = DAM_CSV_FIELDS) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(fields), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()
