"""Intrinsic dimension estimation from Euclidean minimum spanning trees."""

import json as _json

from . import _core
from ._core import (
    ConvergenceError,
    DegenerateFit,
    FormatError,
    InvalidArgument,
    OutOfRange,
    add_gaussian_noise,
    add_uniform_background,
    embed_words,
    emst,
    fit_log_log,
    hausdorff_dimension,
    lift_dimension,
    mst_stats,
    ngram_embeddings,
    sample_cascade,
    sample_fractal,
    sample_manifold,
    schweinhart,
    set_threads,
)

__version__ = "0.1.0"


def brito_calibrate(lo=2, hi=15, n_cal=2000, L=100, seed=0):
    """Calibration table as a dict (same layout as the CLI's JSON file)."""
    return _json.loads(_core.brito_calibrate(lo, hi, n_cal, L, seed))


def brito_estimate(points, calibration):
    """Posterior over the calibrated dimensions for one cloud."""
    if not isinstance(calibration, str):
        calibration = _json.dumps(calibration)
    return _core.brito_estimate(points, calibration)
