"""Delay alignment modulation (DAM) with hybrid beamforming, and an OFDM baseline.

Modules
-------
numerics         complex least squares, projectors, unitary DFT
channel          sparse multipath channel generation and replay files
precoder_digital ISI-ZF path beams (DAM) and water-filled MRT (OFDM)
precoder_hybrid  OMP factorisation into analog and baseband matrices
link_dam         DAM delay plan, transmit synthesis, SINR and simulation
link_ofdm        CP-OFDM chain and per-subcarrier SNR
metrics          QAM, PAPR/CCDF, BER Monte Carlo
harness          experiment configuration, sweeps and the command line
"""

from . import channel, link_dam, link_ofdm, metrics, numerics, precoder_digital, precoder_hybrid
from .channel import ArrayGeometry, ChannelConfig, ChannelRealization, generate_channel
from .errors import (
    ConfigError,
    CpTooShort,
    DamLinkError,
    DegenerateChannel,
    DegenerateSignal,
    DictionaryTooSmall,
    DomainError,
    LengthError,
    RankDeficient,
)

__version__ = "0.1.0"
