"""Input checks shared by the public API.

Images are plain 2-D float64 arrays in the 0..255 intensity scale.
Fractional and out-of-range values are fine during computation; NaN and
Inf never are.
"""

import numpy as np

from .exceptions import ShapeError


def check_image(x, *, min_side=1, square=False, name="image"):
    """Validate ``x`` and return it as a float64 2-D array."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < min_side or arr.shape[1] < min_side:
        raise ShapeError(f"{name} sides must be >= {min_side}, got {arr.shape}")
    if square and arr.shape[0] != arr.shape[1]:
        raise ShapeError(f"{name} must be square, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_same_shape(a, b, names=("first", "second")):
    if a.shape != b.shape:
        raise ShapeError(
            f"{names[0]} shape {a.shape} does not match {names[1]} shape {b.shape}"
        )
