"""Two-sample tests for equality of conditional distributions based on the
conditional energy distance, with a local bootstrap for calibration."""

import numpy as np

from . import _cedtest
from ._cedtest import __version__, generate_setting, median_heuristic

__all__ = [
    "__version__",
    "ced_at",
    "generate_setting",
    "iced",
    "lscv_bandwidths",
    "median_heuristic",
    "rot_bandwidths",
    "run_test",
]


def _matrix(a):
    # 1-d input is one column; always hand C-contiguous float64 to the core.
    a = np.asarray(a, dtype=np.float64)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2:
        raise ValueError("expected a 1-d or 2-d array")
    return np.ascontiguousarray(a)


def rot_bandwidths(x):
    return _cedtest.rot_bandwidths(_matrix(x))


def lscv_bandwidths(x, grid, kernel="gaussian"):
    return _cedtest.lscv_bandwidths(_matrix(x), list(grid), kernel)


def ced_at(x, y1, x1, y2, x2, h1, h2, kernel="gaussian", measure="ced", gamma=None, unbiased=False):
    """Squared conditional energy distance at the covariate value x."""
    return _cedtest.ced_at(
        np.atleast_1d(np.asarray(x, dtype=np.float64)).tolist(),
        _matrix(y1), _matrix(x1), _matrix(y2), _matrix(x2),
        list(np.atleast_1d(h1)), list(np.atleast_1d(h2)),
        kernel, measure, gamma, unbiased,
    )


def iced(y1, x1, y2, x2, h1, h2, kernel="gaussian", measure="ced", gamma=None, naive=False):
    """Integrated statistic; naive=True uses the quartic reference loop."""
    return _cedtest.iced(
        _matrix(y1), _matrix(x1), _matrix(y2), _matrix(x2),
        list(np.atleast_1d(h1)), list(np.atleast_1d(h2)),
        kernel, measure, gamma, naive,
    )


def run_test(y1, x1, y2, x2, B=299, seed=0, measure="ced", gamma=None, bandwidth="rot",
             lscv_grid=(0.5, 0.75, 1.0, 1.25, 1.5, 2.0), kernel="gaussian", threads=1):
    """Local-bootstrap test of equal conditional distributions of Y given X."""
    return _cedtest.run_test(
        _matrix(y1), _matrix(x1), _matrix(y2), _matrix(x2),
        B, seed, measure, gamma, bandwidth, list(lscv_grid), kernel, threads,
    )
