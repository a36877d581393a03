"""Sweeps behind the command-line subcommands.

Each ``cmd_*`` function takes an :class:`ExperimentConfig` and returns the
text it would write (CSV for the sweeps, JSON for ``cmd_gen_channel``).
Channel draw ``d`` always uses the seed derived from ``(base_seed, d)``, so
every sweep point and every scheme sees the same channel population.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Callable, Iterable, Sequence

import numpy as np

from ..channel import ChannelRealization, generate_channel
from ..link_dam import delay_plan, dam_link_report, synthesize_tx
from ..link_ofdm import equal_sample_power_budget, ofdm_link_report, ofdm_modulate
from ..metrics import LinkChain, ber_run, ccdf, papr_db, qam, qam_map, write_result_rows
from ..precoder_digital import dam_isi_zf, ofdm_mrt_waterfill
from ..precoder_hybrid import build_dictionary, dam_hybrid, omp_factorize
from .config import ExperimentConfig, dbm_to_watts, draw_seed

SCHEMES = (("dam", "digital"), ("dam", "hybrid"), ("ofdm", "digital"), ("ofdm", "hybrid"))

SE_FIELDS = (
    "sweep_variable",
    "sweep_value",
    "scheme",
    "beamforming",
    "M_t",
    "M_RF",
    "P_dbm",
    "se_mean",
    "se_std",
    "overhead",
    "n_channels",
)


def header_line(command: str, cfg: ExperimentConfig, deterministic: bool) -> str:
    parts = [f"# damlink {command}", f"profile={cfg.name}", f"seed={cfg.base_seed}"]
    if not deterministic:
        parts.append("generated=" + datetime.now(timezone.utc).isoformat(timespec="seconds"))
    return " ".join(parts) + "\n"


def _parallel_map(fn: Callable, items: Sequence, workers: int) -> list:
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _point(cfg: ExperimentConfig, variable: str, value: float) -> tuple[int, float]:
    m_t = int(cfg.system["num_antennas"])
    p_dbm = float(cfg.system["power_dbm"])
    if variable == "num_antennas":
        m_t = int(value)
    else:
        p_dbm = float(value)
    return m_t, p_dbm


def channel_draw(cfg: ExperimentConfig, draw: int, num_antennas: int | None = None) -> ChannelRealization:
    return generate_channel(cfg.channel_config(draw_seed(cfg.base_seed, draw), num_antennas))


@dataclass(frozen=True)
class DrawResult:
    se: dict[tuple[str, str], float]
    overhead: dict[str, float]


def spectral_efficiency_draw(
    cfg: ExperimentConfig, draw: int, num_antennas: int, p_dbm: float
) -> DrawResult:
    """Effective spectral efficiency of the four schemes on one channel draw."""
    d = cfg.derived()
    m_rf = int(cfg.system["num_rf"])
    K = int(cfg.data["ofdm"]["num_subcarriers"])
    power = dbm_to_watts(p_dbm)
    ch = channel_draw(cfg, draw, num_antennas)

    se = {}
    overhead = {}
    for bf, pre in (("digital", dam_isi_zf(ch, power)), ("hybrid", dam_hybrid(ch, power, m_rf))):
        rep = dam_link_report(ch, pre, d.noise_var, d.n_c, d.n_max_bound)
        se[("dam", bf)] = rep.spectral_efficiency
        overhead["dam"] = rep.guard_overhead

    budget = equal_sample_power_budget(power, K)
    od = ofdm_mrt_waterfill(ch, K, budget, d.noise_var)
    oh = omp_factorize(od.columns, build_dictionary(ch), m_rf, budget)
    for bf, pre in (("digital", od), ("hybrid", oh)):
        rep = ofdm_link_report(ch, pre, d.noise_var, d.n_c, d.n_ofdm, d.n_max_bound)
        se[("ofdm", bf)] = rep.spectral_efficiency
        overhead["ofdm"] = rep.guard_overhead
    return DrawResult(se=se, overhead=overhead)


def spectral_efficiency_table(cfg: ExperimentConfig) -> list[dict]:
    variable = cfg.sweep["variable"]
    n = int(cfg.monte_carlo["num_channels"])
    workers = int(cfg.monte_carlo.get("workers", 1))
    rows = []
    for value in cfg.sweep["values"]:
        m_t, p_dbm = _point(cfg, variable, value)
        results = _parallel_map(
            lambda draw: spectral_efficiency_draw(cfg, draw, m_t, p_dbm), range(n), workers
        )
        for scheme, bf in SCHEMES:
            vals = np.array([r.se[(scheme, bf)] for r in results])
            rows.append(
                {
                    "sweep_variable": variable,
                    "sweep_value": f"{value:g}",
                    "scheme": scheme,
                    "beamforming": bf,
                    "M_t": m_t,
                    "M_RF": m_t if bf == "digital" else int(cfg.system["num_rf"]),
                    "P_dbm": f"{p_dbm:g}",
                    "se_mean": f"{vals.mean():.6f}",
                    "se_std": f"{vals.std():.6f}",
                    "overhead": f"{results[0].overhead[scheme]:.8f}",
                    "n_channels": n,
                }
            )
    return rows


def _csv(rows: Iterable[dict], fields: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(fields), lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow(row)
    return buf.getvalue()


def cmd_spectral_efficiency(cfg: ExperimentConfig, deterministic: bool = False) -> str:
    return header_line("spectral-efficiency", cfg, deterministic) + _csv(
        spectral_efficiency_table(cfg), SE_FIELDS
    )


def ber_table(cfg: ExperimentConfig, schemes: Sequence[tuple[str, str]] = SCHEMES) -> list[dict]:
    d = cfg.derived()
    b = cfg.ber
    const = qam(int(b.get("order", 128)))
    num_blocks = int(cfg.monte_carlo["num_symbol_blocks"])
    workers = int(cfg.monte_carlo.get("workers", 1))
    ch_cfg = cfg.channel_config()
    rows = []
    for scheme, bf in schemes:
        chain = LinkChain(
            scheme=scheme,
            beamforming=bf,
            channel=ch_cfg,
            num_rf=int(cfg.system["num_rf"]),
            symbols_per_block=int(b.get("dam_symbols_per_block", 2048)),
            ofdm=cfg.ofdm_config(int(b.get("ofdm_symbols_per_block", 4))),
        )
        for p_dbm in b.get("power_dbm", [cfg.system["power_dbm"]]):
            res = ber_run(chain, dbm_to_watts(p_dbm), d.noise_var, const, num_blocks, cfg.base_seed, workers)
            rows.append(
                {
                    "scheme": scheme,
                    "beamforming": bf,
                    "P_dbm": f"{p_dbm:g}",
                    "snr_point": f"{p_dbm - d.noise_dbm:.4f}",
                    "value": f"{res.ber:.8e}",
                    "n_samples": res.bits_sent,
                }
            )
    return rows


def cmd_ber(cfg: ExperimentConfig, deterministic: bool = False) -> str:
    return header_line("ber", cfg, deterministic) + write_result_rows(ber_table(cfg), "snr_point")


def dam_papr_samples(ch: ChannelRealization, pre, const, num_blocks: int, block_length: int, rng) -> np.ndarray:
    """PAPR (dB) of ``num_blocks`` steady-state DAM transmit blocks.

    Each block is the window in which every path's delayed stream is already
    running, i.e. samples ``n_span .. n_span + block_length - 1`` of a
    transmission of ``block_length + n_span`` symbols.
    """
    plan = delay_plan(ch)
    span = plan.n_span
    b = const.bits_per_symbol
    out = np.empty(num_blocks)
    for i in range(num_blocks):
        s = qam_map(rng.integers(0, 2, (block_length + span) * b), const)
        x = synthesize_tx(plan, pre, s)
        out[i] = papr_db(x[:, span:span + block_length])
    return out


def ofdm_papr_samples(pre, const, ofdm_cfg, num_blocks: int, rng, chunk: int = 25) -> np.ndarray:
    """PAPR (dB) of ``num_blocks`` OFDM symbols, CP included."""
    K = ofdm_cfg.num_subcarriers
    b = const.bits_per_symbol
    out = []
    for start in range(0, num_blocks, chunk):
        n = min(chunk, num_blocks - start)
        s = qam_map(rng.integers(0, 2, n * K * b), const).reshape(n, K)
        tx = ofdm_modulate(pre, s, ofdm_cfg)
        out.extend(papr_db(tx[j]) for j in range(n))
    return np.asarray(out)


def papr_samples(cfg: ExperimentConfig) -> dict[tuple[str, str], np.ndarray]:
    p = cfg.papr
    const = qam(int(p.get("order", 128)))
    d = cfg.derived()
    power = dbm_to_watts(cfg.system["power_dbm"])
    m_rf = int(cfg.system["num_rf"])
    K = int(cfg.data["ofdm"]["num_subcarriers"])
    blocks = int(p.get("blocks_per_channel", 100))
    length = int(p.get("dam_block_length", 512))
    ofdm_cfg = cfg.ofdm_config()
    n = int(cfg.monte_carlo["num_channels"])
    workers = int(cfg.monte_carlo.get("workers", 1))

    def one(draw):
        ch = channel_draw(cfg, draw)
        rng = np.random.default_rng(np.random.SeedSequence(cfg.base_seed, spawn_key=(draw, 1)))
        budget = equal_sample_power_budget(power, K)
        od = ofdm_mrt_waterfill(ch, K, budget, d.noise_var)
        pres = {
            ("dam", "digital"): dam_isi_zf(ch, power),
            ("dam", "hybrid"): dam_hybrid(ch, power, m_rf),
            ("ofdm", "digital"): od,
            ("ofdm", "hybrid"): omp_factorize(od.columns, build_dictionary(ch), m_rf, budget),
        }
        res = {}
        for key in SCHEMES:
            if key[0] == "dam":
                res[key] = dam_papr_samples(ch, pres[key], const, blocks, length, rng)
            else:
                res[key] = ofdm_papr_samples(pres[key], const, ofdm_cfg, blocks, rng)
        return res

    per_draw = _parallel_map(one, range(n), workers)
    return {key: np.concatenate([r[key] for r in per_draw]) for key in SCHEMES}


def papr_table(cfg: ExperimentConfig, samples: dict | None = None) -> list[dict]:
    samples = papr_samples(cfg) if samples is None else samples
    thresholds = [float(t) for t in cfg.papr.get("thresholds_db", range(16))]
    rows = []
    for (scheme, bf), vals in samples.items():
        probs = ccdf(vals, thresholds)
        for t, pr in zip(thresholds, probs):
            rows.append(
                {
                    "scheme": scheme,
                    "beamforming": bf,
                    "P_dbm": f"{cfg.system['power_dbm']:g}",
                    "threshold_db": f"{t:g}",
                    "value": f"{pr:.8f}",
                    "n_samples": vals.size,
                }
            )
    return rows


def cmd_papr(cfg: ExperimentConfig, deterministic: bool = False) -> str:
    return header_line("papr", cfg, deterministic) + write_result_rows(papr_table(cfg), "threshold_db")


def cmd_gen_channel(cfg: ExperimentConfig, draw: int = 0) -> str:
    """JSON replay file for channel draw ``draw`` of the configured population."""
    return channel_draw(cfg, draw).to_json()
