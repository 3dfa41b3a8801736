"""Compact-sized probabilistic neural network.

Labels may be any values; they are converted with ``str`` before reaching
the network and come back as strings.
"""

from . import _cspnn
from ._cspnn import (
    ConfigError,
    ContractError,
    Error,
    IoError,
    Model,
    ModelEmptyError,
    Normalization,
    NotFoundError,
    ParseError,
    StaticModel,
    cil_group_sizes,
    fit_normalizer,
    forward,
    load_csv,
    load_idx,
    load_model,
    model_to_json,
    predict,
    save_model,
    unlearn_classes,
    unlearn_units,
)

__all__ = [
    "ConfigError",
    "ContractError",
    "Error",
    "IoError",
    "Model",
    "ModelEmptyError",
    "Normalization",
    "NotFoundError",
    "ParseError",
    "StaticModel",
    "build_static",
    "cil_group_sizes",
    "construct",
    "evaluate",
    "evaluate_static",
    "fit_normalizer",
    "forward",
    "load_csv",
    "load_idx",
    "load_model",
    "model_to_json",
    "predict",
    "run_protocol",
    "save_model",
    "unlearn_classes",
    "unlearn_units",
]


def _labels(y):
    return [str(v) for v in y]


def construct(model, x, y):
    """Present (x, y) once, in order, growing `model` in place."""
    return _cspnn.construct(model, x, _labels(y))


def evaluate(model, x, y, *, scale=None, sigma=None):
    """Classify every row. `scale` sets sigma = scale * d_max; `sigma` fixes it."""
    return _cspnn.evaluate(model, x, _labels(y), scale=scale, sigma=sigma)


def build_static(x, y):
    return _cspnn.build_static(x, _labels(y))


def evaluate_static(model, x, y, *, sigma=None):
    return _cspnn.evaluate_static(model, x, _labels(y), sigma=sigma)


def run_protocol(scenario, x_train, y_train, x_test, y_test, **kwargs):
    return _cspnn.run_protocol(scenario, x_train, _labels(y_train), x_test, _labels(y_test), **kwargs)
