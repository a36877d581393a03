"""Independent reference computations used by the test suite.

Each oracle re-derives a quantity by a different route than the library
(explicit matrices, matrix inverses, brute-force sums, sorting) so that
agreement is evidence rather than tautology.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import erfc

from damlink.channel import ArrayGeometry, ChannelRealization


def dft_matrix(K: int) -> np.ndarray:
    n = np.arange(K)
    return np.exp(-2j * np.pi * np.outer(n, n) / K) / np.sqrt(K)


def projection_via_inverse(h: np.ndarray) -> np.ndarray:
    """``I - H (H^H H)^{-1} H^H`` with an explicit inverse."""
    M = h.shape[0]
    if h.shape[1] == 0:
        return np.eye(M, dtype=complex)
    gram = h.conj().T @ h
    return np.eye(M) - h @ np.linalg.inv(gram) @ h.conj().T


def zf_snr(h: np.ndarray, power: float, noise_var: float) -> float:
    """``(P / sigma^2) sum_l ||Q_l h_l||^2`` using explicit projections."""
    total = 0.0
    for l in range(h.shape[1]):
        q = projection_via_inverse(np.delete(h, l, axis=1))
        total += np.linalg.norm(q @ h[:, l]) ** 2
    return power * total / noise_var


def frequency_response_taps(ch: ChannelRealization, K: int) -> np.ndarray:
    """``h[k]`` through a per-antenna FFT of the zero-padded tap sequence.

    Antenna ``m`` sees the impulse response ``c_m[n] = sum_l conj(h_l[m]) delta[n - n_l]``
    (the ``m``-th entry of ``h^H[n]``); ``h[k]^H`` is its unitary DFT.
    """
    M = ch.num_antennas
    taps = np.zeros((M, K), dtype=complex)
    for l, n in enumerate(ch.delays):
        taps[:, n] += ch.path_vectors[:, l].conj()
    return np.fft.fft(taps, axis=1).conj() / np.sqrt(K)


def water_filling_active_set(inv: np.ndarray, power: float) -> np.ndarray:
    """Classic sorted active-set water-filling.

    Sort the noise-to-gain ratios, grow the active set while the closed-form
    level ``(P + sum inv_active) / n`` stays above the next ratio.
    """
    order = np.argsort(inv)
    s = inv[order]
    n_act = 1
    for n in range(1, s.size + 1):
        mu = (power + s[:n].sum()) / n
        if mu > s[n - 1]:
            n_act = n
        else:
            break
    mu = (power + s[:n_act].sum()) / n_act
    p = np.zeros_like(inv)
    p[order[:n_act]] = mu - s[:n_act]
    return p


def isi_power_double_sum(ch: ChannelRealization, w: np.ndarray) -> float:
    """ISI power straight from the un-grouped received-signal expansion.

    The sample at lag ``n_max`` collects ``h_l^H w_l' s[n - (n_l - n_l')]`` for
    every ordered pair; pairs are accumulated into their symbol offset by
    brute-force enumeration, then the per-symbol power is summed.
    """
    h = ch.path_vectors
    d = ch.delays
    L = len(d)
    acc: dict[int, complex] = {}
    for l in range(L):
        for lp in range(L):
            if l == lp:
                continue
            off = d[l] - d[lp]
            acc[off] = acc.get(off, 0j) + np.vdot(h[:, l], w[:, lp])
    return float(sum(abs(v) ** 2 for v in acc.values()))


def isi_power_time_domain(ch: ChannelRealization, w: np.ndarray) -> float:
    """ISI power from the composite impulse response of the delay-aligned link.

    Stream ``l'`` reaches the receiver through path ``l`` with total delay
    ``kappa_l' + n_l``; the response is accumulated on a delay grid and all
    taps except the aligned one at ``n_max`` are ISI.
    """
    h = ch.path_vectors
    d = ch.delays
    n_max = max(d)
    resp = np.zeros(3 * n_max + 1, dtype=complex)
    for l in range(len(d)):
        for lp in range(len(d)):
            resp[n_max - d[lp] + d[l]] += np.vdot(h[:, l], w[:, lp])
    resp[n_max] = 0
    return float(np.sum(np.abs(resp) ** 2))


def qfunc(x: float) -> float:
    return 0.5 * float(erfc(x / math.sqrt(2.0)))


def make_channel(
    delays, vectors: np.ndarray, geometry: ArrayGeometry | None = None
) -> ChannelRealization:
    """A realization whose path vectors are given directly.

    Each path gets one broadside sub-path (an all-ones steering vector)
    and a gain of 1, then the stored vectors are overridden. Only useful
    for modules that read ``path_vectors`` and ``delays``.
    """
    vectors = np.asarray(vectors, dtype=complex)
    M, L = vectors.shape
    geometry = geometry or ArrayGeometry(M)
    ch = ChannelRealization(
        delays=tuple(int(n) for n in delays),
        gains=(1 + 0j,) * L,
        subpaths=tuple(((1 + 0j, 0.0),) for _ in range(L)),
        geometry=geometry,
    )
    v = vectors.copy()
    v.setflags(write=False)
    object.__setattr__(ch, "path_vectors", v)
    return ch
