"""Wavelength-switching attack models for OPLL-based twin-field QKD.

Thin wrapper over the C++ core. Functions that take a ``config`` accept a
dict patch in the same layout as the JSON config files.
"""

import json

from . import _core
from ._core import (
    ConfigError,
    InfeasibleBound,
    InvalidParameter,
    attenuation_vs_frequency,
    binary_entropy,
    combined_attenuation_delta,
    gain_q,
    per_station_gain,
    phase_slice_error,
    plob_bound,
    system_gain_factor,
)

__version__ = _core.__version__


def _dump(config):
    if config is None:
        return ""
    if isinstance(config, str):
        return config
    return json.dumps(config)


def default_config(preset="tf"):
    return json.loads(_core.default_config(preset))


def validate_config(config):
    return _core.validate_config(_dump(config))


def tf_key_rate(length_km, g=1.0, config=None):
    return _core.tf_key_rate(length_km, g, _dump(config))


def sns_key_rate(length_km, g=1.0, config=None):
    return _core.sns_key_rate(length_km, g, _dump(config))


def simulate_opll(f_delta_mhz=30.0, rs_khz=100.0, duration_us=1000.0, seed=1, config=None):
    return _core.simulate_opll(f_delta_mhz, rs_khz, duration_us, seed, _dump(config))


def reproduce(figure, config=None):
    """Returns {dataset name: CSV text} for a figure recipe."""
    return _core.reproduce(figure, _dump(config))


__all__ = [
    "ConfigError",
    "InfeasibleBound",
    "InvalidParameter",
    "attenuation_vs_frequency",
    "binary_entropy",
    "combined_attenuation_delta",
    "default_config",
    "gain_q",
    "per_station_gain",
    "phase_slice_error",
    "plob_bound",
    "reproduce",
    "simulate_opll",
    "sns_key_rate",
    "system_gain_factor",
    "tf_key_rate",
    "validate_config",
]
