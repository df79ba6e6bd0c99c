"""Input checks shared by the estimator facade and the CLI."""

import numpy as np


def check_positive(name, value):
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be a positive finite number, got {value}")
    return value


def check_time_grid(t):
    """Return ``t`` as a 1-d float array; non-negative, strictly increasing."""
    t = np.asarray(t, dtype=float)
    if t.ndim == 2 and t.shape[1] == 1:
        t = t[:, 0]
    if t.ndim != 1 or t.size == 0:
        raise ValueError("time grid must be a non-empty 1-d array or a single column")
    if not np.all(np.isfinite(t)):
        raise ValueError("time grid contains non-finite values")
    if t[0] < 0 or np.any(np.diff(t) <= 0):
        raise ValueError("time grid must be non-negative and strictly increasing")
    return t


def uniform_grid(t_max, dt):
    """``0, dt, 2 dt, ...`` up to ``t_max``, with the end point included when it falls on the grid."""
    t_max, dt = check_positive("t_max", t_max), check_positive("dt", dt)
    n = int(np.floor(t_max / dt + 1e-9))
    return dt * np.arange(n + 1)


def check_vector(r, size=6, name="r"):
    r = np.asarray(r, dtype=float).reshape(-1)
    if r.shape != (size,):
        raise ValueError(f"{name} must have {size} entries")
    return r
