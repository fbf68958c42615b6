"""Least-squares slopes over uniformly spaced samples."""

from __future__ import annotations

import numpy as np


def slope_weights(n_points: int) -> np.ndarray:
    """Coefficients ``c`` with ``slope = c @ y / dt`` for ``n_points`` samples."""
    if n_points < 2:
        raise ValueError("a slope needs at least 2 points")
    j = np.arange(n_points, dtype=float)
    j -= j.mean()
    return j / np.dot(j, j)


def lsq_slope(values: np.ndarray, dt: float) -> float:
    """Ordinary least-squares slope of ``values`` sampled every ``dt``."""
    y = np.asarray(values, dtype=float)
    return float(np.dot(slope_weights(y.size), y - y[0]) / dt)


def sliding_slopes(values: np.ndarray, n_points: int, dt: float) -> np.ndarray:
    """Slope of every window of ``n_points`` consecutive samples.

    Entry ``s`` covers ``values[s : s + n_points]``.  Windows touching a
    NaN yield NaN.
    """
    y = np.asarray(values, dtype=float)
    if y.size < n_points:
        return np.empty(0)
    c = slope_weights(n_points)
    gaps = np.isnan(y)
    finite = y[~gaps]
    ref = finite[0] if finite.size else 0.0
    centred = np.where(gaps, 0.0, y - ref)
    out = np.correlate(centred, c, mode="valid") / dt
    if gaps.any():
        touched = np.convolve(gaps.astype(float), np.ones(n_points), mode="valid") > 0
        out[touched] = np.nan
    return out
