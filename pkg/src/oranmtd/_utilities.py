import math

import numpy as np

from .errors import InvalidParameterError, ShapeError


def _window_idx_generator(window_length, series_length):
    """Yield ``(left, right)`` bounds of consecutive windows over a series.

    The last window is shorter when ``series_length`` is not a multiple of
    ``window_length``.
    """
    previous_idx = 0
    current_idx = min(window_length, series_length)
    num_window = int(np.ceil(series_length / window_length))
    for _ in range(num_window):
        yield int(previous_idx), int(current_idx)
        previous_idx += window_length
        current_idx = min(current_idx + window_length, series_length)


def check_finite_real(value, name):
    """Raise unless ``value`` is a finite real number."""
    if isinstance(value, bool) or not isinstance(value, (int, float, np.integer, np.floating)):
        raise InvalidParameterError('{} must be a real number, got {!r}'.format(name, value))
    if not math.isfinite(float(value)):
        raise InvalidParameterError('{} must be finite, got {}'.format(name, value))
    return float(value)


def check_positive_int(value, name):
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value <= 0:
        raise InvalidParameterError('{} must be a positive integer, got {!r}'.format(name, value))
    return int(value)


def check_vector(x, size, name='input'):
    """Return ``x`` as a float64 array whose last axis has length ``size``."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim not in (1, 2) or x.shape[-1] != size:
        raise ShapeError('{} must have trailing dimension {}, got shape {}'.format(name, size, x.shape))
    return x


def admission_ratio(admitted, offered):
    """Admitted over offered, defined as 1.0 when nothing was offered."""
    if offered == 0:
        return 1.0
    return admitted / offered
