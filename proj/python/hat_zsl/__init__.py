"""Hierarchical attribute transfer for zero-shot classification."""

from ._core import (
    HatError,
    bench,
    fit_logistic,
    multiclass_accuracy,
    propagate,
    prune_taxonomy,
    roc_auc,
    run,
    synth,
    zero_shot,
)

__all__ = [
    "HatError",
    "bench",
    "fit_logistic",
    "multiclass_accuracy",
    "propagate",
    "prune_taxonomy",
    "roc_auc",
    "run",
    "synth",
    "zero_shot",
]
