"""Experiment configuration, shipped profiles and derived link constants."""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema

from ..channel import ArrayGeometry, ChannelConfig
from ..errors import ConfigError
from ..link_ofdm import OfdmConfig
from ..metrics import block_seeds

SCHEMA_VERSION = 1
PROFILES = ("table1", "desk")

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_INT1 = {"type": "integer", "minimum": 1}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "system", "channel", "ofdm", "sweep", "monte_carlo"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "name": {"type": "string"},
        "system": {
            "type": "object",
            "required": [
                "num_antennas", "num_rf", "carrier_hz", "bandwidth_hz",
                "noise_psd_dbm_hz", "spacing", "coherence_time_s", "power_dbm",
            ],
            "properties": {
                "num_antennas": _INT1,
                "num_rf": _INT1,
                "carrier_hz": _POS,
                "bandwidth_hz": _POS,
                "noise_psd_dbm_hz": _NUM,
                "spacing": _POS,
                "coherence_time_s": _POS,
                "power_dbm": _NUM,
            },
        },
        "channel": {
            "type": "object",
            "required": ["num_paths", "tau_max_s", "max_subpaths", "aod_range_deg"],
            "properties": {
                "num_paths": _INT1,
                "tau_max_s": {"type": "number", "minimum": 0},
                "max_subpaths": _INT1,
                "aod_range_deg": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
                "path_loss_db": _NUM,
            },
        },
        "ofdm": {
            "type": "object",
            "required": ["num_subcarriers"],
            "properties": {
                "num_subcarriers": {"type": "integer", "minimum": 2},
                "cp_length": {"type": ["integer", "null"], "minimum": 0},
            },
        },
        "sweep": {
            "type": "object",
            "required": ["variable", "values"],
            "properties": {
                "variable": {"enum": ["num_antennas", "power_dbm"]},
                "values": {"type": "array", "items": _NUM, "minItems": 1},
            },
        },
        "monte_carlo": {
            "type": "object",
            "required": ["num_channels", "num_symbol_blocks", "base_seed"],
            "properties": {
                "num_channels": _INT1,
                "num_symbol_blocks": _INT1,
                "base_seed": {"type": "integer", "minimum": 0},
                "workers": _INT1,
            },
        },
        "ber": {"type": "object"},
        "papr": {"type": "object"},
        "output": {"type": "object"},
    },
}


def load_profile(name: str) -> dict:
    if name not in PROFILES:
        raise ConfigError(f"unknown profile {name!r}; choose from {PROFILES}")
    text = resources.files(__package__).joinpath(f"profiles/{name}.json").read_text()
    return json.loads(text)


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


@dataclass(frozen=True)
class DerivedConstants:
    noise_var: float  # watts
    n_max_bound: int  # guard length in samples
    n_c: int  # single-carrier symbols per coherence block
    symbol_time: float
    n_ofdm: int  # OFDM symbols per coherence block

    @property
    def noise_dbm(self) -> float:
        return 10 * math.log10(self.noise_var * 1e3)


def dbm_to_watts(p_dbm: float) -> float:
    return 10.0 ** (p_dbm / 10.0) / 1e3


def _floor_int(x: float) -> int:
    # products like 312.5e-9 * 128e6 land a hair off the integer
    return int(math.floor(x + 1e-9))


class ExperimentConfig:
    """Validated experiment document plus typed accessors.

    The raw mapping is kept in ``data`` so that it can be written back out
    unchanged; the accessor methods derive the objects the link modules use.
    """

    def __init__(self, data: dict):
        try:
            jsonschema.validate(data, CONFIG_SCHEMA)
        except jsonschema.ValidationError as exc:
            raise ConfigError(f"invalid experiment config: {exc.message}") from exc
        self.data = data
        d = self.derived()
        cp = self.ofdm_config().cp_length
        if cp < d.n_max_bound:
            raise ConfigError(f"cp_length {cp} is below the guard bound {d.n_max_bound}")
        if self.channel["num_paths"] > d.n_max_bound + 1:
            raise ConfigError("more paths than distinct delay taps")

    @classmethod
    def from_profile(cls, name: str, override: dict | None = None) -> "ExperimentConfig":
        data = load_profile(name)
        if override:
            data = _merge(data, override)
        return cls(data)

    @classmethod
    def from_file(cls, path: str | Path, profile: str | None = None) -> "ExperimentConfig":
        doc = json.loads(Path(path).read_text())
        if profile is not None:
            doc = _merge(load_profile(profile), doc)
        return cls(doc)

    def to_json(self) -> str:
        return json.dumps(self.data, indent=2, sort_keys=True) + "\n"

    def replace(self, override: dict) -> "ExperimentConfig":
        return ExperimentConfig(_merge(self.data, override))

    @property
    def name(self) -> str:
        return self.data.get("name", "custom")

    @property
    def system(self) -> dict[str, Any]:
        return self.data["system"]

    @property
    def channel(self) -> dict[str, Any]:
        return self.data["channel"]

    @property
    def sweep(self) -> dict[str, Any]:
        return self.data["sweep"]

    @property
    def monte_carlo(self) -> dict[str, Any]:
        return self.data["monte_carlo"]

    @property
    def ber(self) -> dict[str, Any]:
        return self.data.get("ber", {})

    @property
    def papr(self) -> dict[str, Any]:
        return self.data.get("papr", {})

    @property
    def base_seed(self) -> int:
        return int(self.monte_carlo["base_seed"])

    def derived(self) -> DerivedConstants:
        s = self.system
        B = float(s["bandwidth_hz"])
        noise_var = dbm_to_watts(s["noise_psd_dbm_hz"] + 10 * math.log10(B))
        n_max = _floor_int(self.channel["tau_max_s"] * B)
        n_c = _floor_int(B * s["coherence_time_s"])
        K = int(self.data["ofdm"]["num_subcarriers"])
        n_ofdm = n_c // (K + n_max)
        return DerivedConstants(
            noise_var=noise_var, n_max_bound=n_max, n_c=n_c, symbol_time=1.0 / B, n_ofdm=n_ofdm
        )

    def geometry(self, num_antennas: int | None = None) -> ArrayGeometry:
        m = self.system["num_antennas"] if num_antennas is None else num_antennas
        return ArrayGeometry(num_antennas=int(m), spacing=float(self.system["spacing"]))

    def channel_config(self, seed: int = 0, num_antennas: int | None = None) -> ChannelConfig:
        c = self.channel
        return ChannelConfig(
            num_paths=int(c["num_paths"]),
            max_delay_taps=self.derived().n_max_bound,
            max_subpaths=int(c["max_subpaths"]),
            geometry=self.geometry(num_antennas),
            aod_range_deg=(float(c["aod_range_deg"][0]), float(c["aod_range_deg"][1])),
            seed=int(seed),
            path_loss_db=float(c.get("path_loss_db", 0.0)),
        )

    def ofdm_config(self, symbols_per_block: int = 1) -> OfdmConfig:
        o = self.data["ofdm"]
        cp = o.get("cp_length")
        if cp is None:
            cp = self.derived().n_max_bound
        return OfdmConfig(int(o["num_subcarriers"]), int(cp), symbols_per_block)


def draw_seed(base_seed: int, draw: int) -> int:
    """64-bit channel seed for Monte Carlo draw ``draw``."""
    return block_seeds(base_seed, draw)[0]
