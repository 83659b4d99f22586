"""Python access to the levycal calibration core.

Config overrides are passed as a dict of key -> value; values are converted
with ``str`` and parsed exactly like the CLI's ``--set key=value``.
"""

import json

from ._levycal import (
    ConfigError,
    IngestError,
    StepSizeError,
    WrapConvention,
    config_keys,
    default_config,
    forward_density,
    grid_points,
    objective,
    objective_and_gradient,
    preprocess_financial,
    simulate,
    wrapped_bigamma_density,
)
from ._levycal import run as _run

__all__ = [
    "ConfigError",
    "IngestError",
    "StepSizeError",
    "WrapConvention",
    "config_keys",
    "default_config",
    "forward_density",
    "grid_points",
    "objective",
    "objective_and_gradient",
    "preprocess_financial",
    "run",
    "simulate",
    "wrapped_bigamma_density",
]


def run(config, write=False):
    """Fit every N_theta of the sweep; returns the report as a dict."""
    return json.loads(_run({k: str(v) for k, v in config.items()}, write))
