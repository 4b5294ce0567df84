"""Input coercion shared by the public modules."""
import numbers

import numpy as np

from .errors import DimensionMismatchError


def as_matrix(M, name="matrix", allow_empty=False):
    """Return ``M`` as a finite 2-D float (or complex) array."""
    arr = np.asarray(M)
    if arr.dtype == object:
        raise DimensionMismatchError(f"{name} is ragged or not numeric")
    if not np.issubdtype(arr.dtype, np.complexfloating):
        arr = arr.astype(float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2:
        raise DimensionMismatchError(f"{name} must be 2-D, got shape {arr.shape}")
    if not allow_empty and arr.size == 0:
        raise DimensionMismatchError(f"{name} must not be empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def as_square(M, name="matrix"):
    arr = as_matrix(M, name)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionMismatchError(f"{name} must be square, got shape {arr.shape}")
    return arr


def as_vector(v, n, name="vector"):
    arr = np.asarray(v, dtype=float).reshape(-1)
    if arr.size == 1 and n != 1:
        arr = np.full(n, arr[0])
    if arr.shape != (n,):
        raise DimensionMismatchError(f"{name} must have length {n}, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def positive_scalar(value, name):
    if isinstance(value, (bool, np.bool_)) or not isinstance(value, numbers.Real):
        raise TypeError(f"{name} must be a real number, got {type(value).__name__}")
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be finite and > 0, got {value!r}")
    return value


def scalar_fraction(eps, name="eps"):
    """Coerce a constant jitter fraction; sequences are rejected."""
    if np.ndim(eps) != 0:
        raise TypeError(f"{name} must be a scalar constant fraction, got shape {np.shape(eps)}")
    if isinstance(eps, (bool, np.bool_)) or not isinstance(eps, (numbers.Real, np.floating, np.integer)):
        raise TypeError(f"{name} must be a real number")
    return float(eps)
