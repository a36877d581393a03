"""Fully digital precoders.

* DAM: one ISI-zero-forcing beam per path. Path ``l`` is steered along the
  projection of ``h_l`` orthogonal to every other path's channel vector, and
  all paths share the power budget in proportion to ``||Q_l h_l||^2``.
* OFDM: per-subcarrier maximum-ratio transmission with water-filling power.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization, frequency_response
from .errors import DegenerateChannel, RankDeficient
from .numerics import RANK_TOL, numerical_rank, projection_orthogonal

__all__ = [
    "DamDigitalPrecoder",
    "OfdmDigitalPrecoder",
    "zf_projections",
    "dam_isi_zf",
    "water_filling",
    "ofdm_mrt_waterfill",
]


@dataclass(frozen=True)
class DamDigitalPrecoder:
    columns: np.ndarray  # M_t x L, column l is f_l
    total_power: float

    @property
    def matrix(self) -> np.ndarray:
        return self.columns

    def to_dict(self) -> dict:
        return {
            "kind": "dam_digital",
            "total_power": self.total_power,
            "real": self.columns.real.tolist(),
            "imag": self.columns.imag.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass(frozen=True)
class OfdmDigitalPrecoder:
    columns: np.ndarray  # M_t x K, column k is u_k
    powers: np.ndarray
    total_power: float
    water_level: float

    @property
    def matrix(self) -> np.ndarray:
        return self.columns

    def to_dict(self) -> dict:
        return {
            "kind": "ofdm_digital",
            "total_power": self.total_power,
            "water_level": self.water_level,
            "powers": self.powers.tolist(),
            "real": self.columns.real.tolist(),
            "imag": self.columns.imag.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def zf_projections(h: np.ndarray) -> np.ndarray:
    """Return ``[Q_1 h_1, ..., Q_L h_L]`` for the ``M_t x L`` path matrix ``h``.

    ``Q_l`` projects onto the orthogonal complement of all columns but ``l``.
    """
    h = np.asarray(h, dtype=complex)
    M, L = h.shape
    if L > M or numerical_rank(h, RANK_TOL) < L:
        raise RankDeficient(
            f"{L} path vectors in dimension {M} are linearly dependent; ISI-ZF infeasible"
        )
    out = np.empty_like(h)
    for l in range(L):
        others = np.delete(h, l, axis=1)
        out[:, l] = projection_orthogonal(others, dim=M) @ h[:, l]
    return out


def dam_isi_zf(ch: ChannelRealization, power: float) -> DamDigitalPrecoder:
    """Optimal ISI-ZF path-based beamforming.

    ``f_l = sqrt(P) Q_l h_l / sqrt(sum_l' ||Q_l' h_l'||^2)``; the resulting
    SNR is ``P/sigma^2 * sum_l ||Q_l h_l||^2``.
    """
    qh = zf_projections(ch.path_vectors)
    total = np.sum(np.abs(qh) ** 2)
    return DamDigitalPrecoder(columns=np.sqrt(power) * qh / np.sqrt(total), total_power=float(power))


def water_filling(
    inverse_gains: np.ndarray,
    power: float,
    max_iter: int = 200,
) -> tuple[np.ndarray, float]:
    """Allocate ``power`` over parallel channels with noise-to-gain ratios ``inverse_gains``.

    Solves ``p_k = max(0, mu - inverse_gains[k])`` with ``sum p_k = power`` by
    bisection on the water level ``mu``. Channels with infinite inverse gain
    receive nothing. Once the active set is settled, ``mu`` is recomputed in
    closed form on that set so the budget is met to rounding.

    Returns
    -------
    (powers, mu) : (np.ndarray, float)
    """
    inv = np.asarray(inverse_gains, dtype=float)
    finite = np.isfinite(inv)
    if not finite.any():
        raise DegenerateChannel("every subchannel has zero gain")
    lo, hi = 0.0, power + inv[finite].max()
    for _ in range(max_iter):
        mu = 0.5 * (lo + hi)
        used = np.sum(np.maximum(0.0, mu - inv[finite]))
        if used > power:
            hi = mu
        else:
            lo = mu
        if hi - lo <= 1e-15 * hi:
            break
    mu = 0.5 * (lo + hi)
    active = finite & (inv < mu)
    if not active.any():
        active = finite & (inv == inv[finite].min())
    mu = (power + inv[active].sum()) / active.sum()
    p = np.zeros_like(inv)
    p[active] = np.maximum(0.0, mu - inv[active])
    return p, float(mu)


def ofdm_mrt_waterfill(
    ch: ChannelRealization,
    num_subcarriers: int,
    power: float,
    noise_var: float,
) -> OfdmDigitalPrecoder:
    """Per-subcarrier MRT beams ``u_k = sqrt(p_k) h[k]/||h[k]||`` with water-filled ``p_k``.

    ``power`` is the frequency-domain budget ``sum_k p_k``. The per-subcarrier
    SNR is ``p_k K ||h[k]||^2 / sigma^2``, so the water-filling noise floor is
    ``sigma^2 / (K ||h[k]||^2)``.
    """
    K = int(num_subcarriers)
    hk = frequency_response(ch, K)
    g2 = np.sum(np.abs(hk) ** 2, axis=0)
    with np.errstate(divide="ignore"):
        inv = np.where(g2 > 0, noise_var / (K * g2), np.inf)
    p, mu = water_filling(inv, power)
    norms = np.sqrt(g2)
    safe = np.where(norms > 0, norms, 1.0)
    u = hk / safe * np.sqrt(p)
    return OfdmDigitalPrecoder(columns=u, powers=p, total_power=float(power), water_level=mu)
