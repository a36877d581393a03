"""Uncoded 128-QAM BER of DAM and OFDM, digital against hybrid.

A small sweep, a few channels per point. The hybrid DAM curve flattens out
at high power because residual ISI, not noise, becomes the limit.
"""
from damlink.harness import ExperimentConfig, dbm_to_watts
from damlink.metrics import LinkChain, ber_run, qam

cfg = ExperimentConfig.from_profile("desk")
d = cfg.derived()
const = qam(128)
ch_cfg = cfg.channel_config(seed=cfg.base_seed)
chains = {
    "dam/digital": LinkChain("dam", "digital", ch_cfg, num_rf=5, symbols_per_block=2048),
    "dam/hybrid": LinkChain("dam", "hybrid", ch_cfg, num_rf=5, symbols_per_block=2048),
    "ofdm/digital": LinkChain("ofdm", "digital", ch_cfg, num_rf=5, ofdm=cfg.ofdm_config(4)),
    "ofdm/hybrid": LinkChain("ofdm", "hybrid", ch_cfg, num_rf=5, ofdm=cfg.ofdm_config(4)),
}

print("P dBm  " + "  ".join(f"{k:>12s}" for k in chains))
for p_dbm in (30, 34, 38, 42):
    bers = [ber_run(c, dbm_to_watts(p_dbm), d.noise_var, const, 20, seed=7).ber for c in chains.values()]
    print(f"{p_dbm:5d}  " + "  ".join(f"{b:12.2e}" for b in bers))
