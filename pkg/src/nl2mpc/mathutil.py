"""Small numeric helpers shared by the embodiments and planners."""

from __future__ import annotations

import numpy as np


def wrap_angle(theta):
    """Wrap an angle (or array of angles) to the half-open interval (-pi, pi].

    The positive boundary is kept closed so that a residual against a target
    of pi is exactly zero when the angle is pi.
    """
    theta = np.asarray(theta, dtype=float)
    wrapped = theta - 2.0 * np.pi * np.floor((theta + np.pi) / (2.0 * np.pi))
    # floor maps +pi to -pi; fold it back onto the closed upper boundary
    wrapped = np.where(wrapped == -np.pi, np.pi, wrapped)
    if wrapped.ndim == 0:
        return float(wrapped)
    return wrapped


def clip_box(x: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    return np.minimum(np.maximum(x, lo), hi)
