"""Python front end for the quasi-periodic response engine.

The compiled module speaks JSON strings; these wrappers move dicts across the
boundary. In an installed wheel ``_qpr`` lives inside this package; in a plain
CMake build tree it sits next to the package on ``PYTHONPATH``.
"""

import json

try:
    from . import _qpr
except ImportError:  # build-tree layout
    import _qpr

ConfigError = _qpr.ConfigError
ConvergenceError = _qpr.ConvergenceError
ResonantEpsilonError = _qpr.ResonantEpsilonError
varpi = _qpr.varpi
varpi_upper_bound = _qpr.varpi_upper_bound
fit_majorant_a1 = _qpr.fit_majorant_a1
measure_bound = _qpr.measure_bound


def _as_text(config):
    return config if isinstance(config, str) else json.dumps(config)


def load_config(path):
    """Read a JSON configuration file into a dict."""
    with open(path) as f:
        return json.load(f)


def average(config):
    """Averaged field: equilibrium, spectrum and frame constants."""
    return json.loads(_qpr.average_json(_as_text(config)))


def run(config):
    """Full averaging + KAM run; returns the report document."""
    return json.loads(_qpr.run_json(_as_text(config)))


def sweep(config, threads=1):
    """Per-cell resonance scan over (0, eps1]."""
    return json.loads(_qpr.sweep_json(_as_text(config), threads))


def verify(config, response):
    """Grid residual of a stored response document (dict or JSON string)."""
    return _qpr.verify_response(_as_text(config), _as_text(response))


def rescale_general(a, b):
    """Exponent normalization plan for general (a, b)."""
    return json.loads(_qpr.rescale_json(a, b))


__all__ = [
    "ConfigError",
    "ConvergenceError",
    "ResonantEpsilonError",
    "average",
    "fit_majorant_a1",
    "load_config",
    "measure_bound",
    "rescale_general",
    "run",
    "sweep",
    "varpi",
    "varpi_upper_bound",
    "verify",
]
