"""Python access to the ltsens C++ core.

Models are plain dicts such as ``{"type": "heston", "mu": 0.5, ...}``; every
function returns decoded JSON in the same layout as the command-line tool.
"""

import json

from . import _core
from ._core import (
    ConfigError,
    DomainError,
    SimulationError,
    UnsupportedModelError,
    ValidationError,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "SimulationError",
    "UnsupportedModelError",
    "ValidationError",
    "coefficient_path",
    "decomposition",
    "dual_exponent",
    "eigenpair",
    "sensitivities",
    "simulate_value",
    "value",
    "verify",
]


def _m(model):
    return json.dumps(model)


def dual_exponent(p):
    return _core.dual_exponent(p)


def eigenpair(model, p):
    return json.loads(_core.eigenpair(_m(model), p))


def value(model, p, chi, T):
    return json.loads(_core.value(_m(model), p, chi, T))


def coefficient_path(model, p, T, intervals=100):
    return json.loads(_core.coefficient_path(_m(model), p, T, intervals))


def sensitivities(model, p):
    return json.loads(_core.sensitivities(_m(model), p))


def simulate_value(model, p, chi, T, n_steps=1000, n_paths=100000, seed=0, workers=1):
    return json.loads(
        _core.simulate_value(_m(model), p, chi, T, n_steps, n_paths, seed, workers)
    )


def decomposition(model, p, chi, T, n_steps=1000, n_paths=100000, seed=0, workers=1):
    return json.loads(
        _core.decomposition(_m(model), p, chi, T, n_steps, n_paths, seed, workers)
    )


def verify(model, p, T=1.0, n_steps=1000, n_paths=100000, seed=0, workers=1):
    return json.loads(_core.verify(_m(model), p, T, n_steps, n_paths, seed, workers))
