"""Hybrid analog/digital precoding by orthogonal matching pursuit.

The analog matrix is assembled from steering vectors of the channel's own
sub-path AoDs, so its entries are unit modulus by construction. The
baseband matrix is the least-squares fit of the fully digital target onto
the selected atoms, rescaled to the power budget at the end.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .channel import ArrayGeometry, ChannelRealization, array_response
from .errors import DictionaryTooSmall
from .numerics import lsq_solve
from .precoder_digital import dam_isi_zf, ofdm_mrt_waterfill

__all__ = [
    "SteeringDictionary",
    "HybridPrecoder",
    "build_dictionary",
    "omp_factorize",
    "dam_hybrid",
    "ofdm_hybrid",
]


@dataclass(frozen=True)
class SteeringDictionary:
    atoms: np.ndarray  # M_t x N_atoms
    angle_tags: tuple[tuple[int, int, float], ...]  # (path, sub-path, theta)

    @property
    def size(self) -> int:
        return self.atoms.shape[1]


@dataclass(frozen=True)
class HybridPrecoder:
    """``F_RF`` (unit modulus, ``M_t x M_RF``) times ``F_BB`` (``M_RF x C``)."""

    f_rf: np.ndarray
    f_bb: np.ndarray
    total_power: float
    residual: float
    selected: tuple[int, ...] = ()

    @property
    def matrix(self) -> np.ndarray:
        return self.f_rf @ self.f_bb

    @property
    def num_rf_chains(self) -> int:
        return self.f_rf.shape[1]

    def to_dict(self) -> dict:
        return {
            "kind": "hybrid",
            "total_power": self.total_power,
            "residual": self.residual,
            "selected": list(self.selected),
            "rf_phases": np.angle(self.f_rf).tolist(),
            "bb_real": self.f_bb.real.tolist(),
            "bb_imag": self.f_bb.imag.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "HybridPrecoder":
        return cls(
            f_rf=np.exp(1j * np.asarray(d["rf_phases"], dtype=float)),
            f_bb=np.asarray(d["bb_real"], dtype=float) + 1j * np.asarray(d["bb_imag"], dtype=float),
            total_power=float(d["total_power"]),
            residual=float(d["residual"]),
            selected=tuple(d.get("selected", ())),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def build_dictionary(ch: ChannelRealization, geometry: ArrayGeometry | None = None) -> SteeringDictionary:
    """One steering vector per sub-path, ordered path-major then sub-path."""
    geometry = geometry or ch.geometry
    cols, tags = [], []
    for l, sp in enumerate(ch.subpaths):
        for i, (_, theta) in enumerate(sp):
            cols.append(array_response(geometry, theta))
            tags.append((l, i, float(theta)))
    return SteeringDictionary(atoms=np.column_stack(cols), angle_tags=tuple(tags))


def omp_factorize(
    f_opt: np.ndarray,
    dictionary: SteeringDictionary,
    num_rf: int,
    power: float,
) -> HybridPrecoder:
    """Approximate ``f_opt`` by ``F_RF F_BB`` with ``num_rf`` dictionary atoms.

    Each iteration picks the unused atom whose correlation with the current
    residual carries the most energy summed over the target columns, refits
    ``F_BB`` by least squares on all atoms chosen so far, and normalises the
    new residual. Ties go to the lowest atom index. After the last iteration
    ``F_BB`` is scaled so that ``||F_RF F_BB||_F^2 = power``.

    Parameters
    ----------
    f_opt : np.ndarray
        ``M_t x C`` fully digital target.
    dictionary : SteeringDictionary
        Candidate analog beams.
    num_rf : int
        Number of RF chains, ``1 <= num_rf <= dictionary.size``.
    power : float
        Frobenius power budget of the final product.

    Returns
    -------
    HybridPrecoder
        ``residual`` is ``||f_opt - F_RF F_BB||_F`` before the power rescale.
    """
    f_opt = np.asarray(f_opt, dtype=complex)
    if f_opt.ndim == 1:
        f_opt = f_opt.reshape(-1, 1)
    atoms = dictionary.atoms
    if num_rf < 1:
        raise ValueError("num_rf must be >= 1")
    if num_rf > dictionary.size:
        raise DictionaryTooSmall(f"{num_rf} RF chains requested from {dictionary.size} atoms")
    target_norm = np.linalg.norm(f_opt)
    if target_norm == 0:
        raise ValueError("target precoder is identically zero")

    available = np.ones(dictionary.size, dtype=bool)
    chosen: list[int] = []
    res = f_opt
    f_bb = None
    for _ in range(num_rf):
        psi = atoms.conj().T @ res
        energy = np.sum(np.abs(psi) ** 2, axis=1)
        energy[~available] = -np.inf
        k = int(np.argmax(energy))  # first maximum is the lowest index
        chosen.append(k)
        available[k] = False
        f_rf = atoms[:, chosen]
        f_bb = lsq_solve(f_rf, f_opt)
        diff = f_opt - f_rf @ f_bb
        dn = np.linalg.norm(diff)
        # an exactly represented target leaves nothing to correlate with
        res = diff / dn if dn > 1e-14 * target_norm else np.zeros_like(diff)

    f_rf = atoms[:, chosen]
    residual = float(np.linalg.norm(f_opt - f_rf @ f_bb))
    f_bb = np.sqrt(power) * f_bb / np.linalg.norm(f_rf @ f_bb)
    return HybridPrecoder(
        f_rf=f_rf, f_bb=f_bb, total_power=float(power), residual=residual, selected=tuple(chosen)
    )


def dam_hybrid(ch: ChannelRealization, power: float, num_rf: int) -> HybridPrecoder:
    """ISI-ZF digital target for DAM, factorised by OMP."""
    target = dam_isi_zf(ch, power)
    return omp_factorize(target.columns, build_dictionary(ch), num_rf, power)


def ofdm_hybrid(
    ch: ChannelRealization,
    num_subcarriers: int,
    power: float,
    noise_var: float,
    num_rf: int,
) -> HybridPrecoder:
    """Water-filled MRT target for OFDM, factorised by OMP."""
    target = ofdm_mrt_waterfill(ch, num_subcarriers, power, noise_var)
    return omp_factorize(target.columns, build_dictionary(ch), num_rf, power)
