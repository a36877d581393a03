"""Water-filling across OFDM subcarriers for one frequency-selective channel.

Strong subcarriers get more power, carriers whose noise-to-gain ratio sits
above the water level get none. Both the digital MRT beams and their hybrid
factorization are evaluated on the same channel.
"""
import numpy as np

from damlink.harness import ExperimentConfig, dbm_to_watts
from damlink.harness.experiments import channel_draw
from damlink.link_ofdm import equal_sample_power_budget, per_subcarrier_snr, spectral_efficiency_ofdm
from damlink.precoder_digital import ofdm_mrt_waterfill
from damlink.precoder_hybrid import ofdm_hybrid

cfg = ExperimentConfig.from_profile("desk")
d = cfg.derived()
K = cfg.data["ofdm"]["num_subcarriers"]
ch = channel_draw(cfg, draw=1)

# a tight budget makes the inactive set visible
for p_dbm in (-20.0, 0.0, 30.0):
    budget = equal_sample_power_budget(dbm_to_watts(p_dbm), K)
    pre = ofdm_mrt_waterfill(ch, K, budget, d.noise_var)
    p = pre.powers
    print(f"P = {p_dbm:4.0f} dBm: active {np.count_nonzero(p)}/{K}, "
          f"p_k in [{p.min():.2e}, {p.max():.2e}], sum/budget = {p.sum() / budget:.15f}")

pre = ofdm_mrt_waterfill(ch, K, budget, d.noise_var)
hyb = ofdm_hybrid(ch, K, budget, d.noise_var, cfg.system["num_rf"])
for name, w in (("digital", pre), ("hybrid", hyb)):
    snr = per_subcarrier_snr(ch, w, d.noise_var)
    se = spectral_efficiency_ofdm(snr, d.n_c, d.n_ofdm, d.n_max_bound)
    print(f"{name:8s} median SNR {10 * np.log10(np.median(snr)):6.2f} dB, SE {se:.3f} bps/Hz")
