"""Input validation helpers in the spirit of ``sklearn.utils.validation``."""
from __future__ import annotations

import numpy as np


def check_points(z, allow_nan: bool = False) -> np.ndarray:
    """Coerce points to a 1-D complex array.

    Accepts complex scalars or arrays, or real arrays of shape ``(m, 2)``.
    """
    arr = np.asarray(z)
    if arr.dtype == object:
        arr = np.asarray([complex(v) for v in arr.ravel()])
    if np.isrealobj(arr) and arr.ndim == 2 and arr.shape[1] == 2:
        arr = arr[:, 0] + 1j * arr[:, 1]
    arr = np.atleast_1d(arr.astype(complex)).ravel()
    if not allow_nan and not np.all(np.isfinite(arr)):
        raise ValueError("points must be finite")
    return arr
