"""Python interface to the photon-number superposition transfer simulator.

Every entry point takes a scenario as a dict, a JSON string, or None for the
built-in ⁸⁷Rb defaults.
"""

import json

from . import _pnss
from ._pnss import (
    ConfigError,
    InvalidArgument,
    NumericsError,
    attenuation_length,
    mhz_to_rad_per_s,
    transmission_efficiency,
)

__all__ = [
    "ConfigError",
    "InvalidArgument",
    "NumericsError",
    "attenuation_length",
    "config_hash",
    "mhz_to_rad_per_s",
    "resolve_config",
    "send",
    "sweep",
    "transfer",
    "transmission_efficiency",
]


def _text(config):
    if config is None:
        return "{}"
    if isinstance(config, str):
        return config
    return json.dumps(config)


def resolve_config(config=None):
    """Scenario with every default filled in."""
    return _pnss.resolve_config(_text(config))


def config_hash(config=None):
    return _pnss.config_hash(_text(config))


def send(config=None):
    """Sending-node trajectories and photon statistics as numpy arrays."""
    return _pnss.send(_text(config))


def transfer(config=None):
    """Full pipeline; the JSON report is under the "report" key."""
    return _pnss.transfer(_text(config))


def sweep(axis, start, stop, points, config=None, threads=0):
    """Returns (column names, 2-D array) with one row per sample."""
    return _pnss.sweep(_text(config), axis, start, stop, points, threads)
