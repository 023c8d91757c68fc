from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import InvalidInputError

MIN_WINDOWS = 8


@dataclass(frozen=True)
class ModelTimeSeries:
    """Windowed admission rates of one ensemble member."""
    member: int
    rates: tuple

    def __post_init__(self):
        rates = tuple(float(r) for r in np.asarray(self.rates, dtype=np.float64).ravel())
        if not all(0.0 <= r <= 1.0 for r in rates):
            raise InvalidInputError('admission rates of member {} must lie in [0, 1]'.format(self.member))
        object.__setattr__(self, 'rates', rates)

    def __len__(self):
        return len(self.rates)


@dataclass(frozen=True)
class FeatureVector:
    """Summary statistics of one member's series; extras are None unless requested."""
    member: int
    mean: float
    variance: float
    minimum: Optional[float] = None
    maximum: Optional[float] = None
    autocorrelation: Optional[float] = None

    def as_array(self, extra=False):
        values = [self.mean, self.variance]
        if extra:
            values += [self.minimum, self.maximum, self.autocorrelation]
        return np.array(values, dtype=np.float64)


def _lag1_autocorrelation(x):
    centered = x - x.mean()
    denom = np.dot(centered, centered)
    if denom == 0.0:
        return 0.0
    return float(np.dot(centered[:-1], centered[1:]) / denom)


def extract_features(series, extra=False):
    """Population mean and variance of every member's series

    Parameters
    ----------
    series : list of ModelTimeSeries
        All of the same length, at least ``MIN_WINDOWS`` windows each.
    extra : bool, optional
        Also compute min, max and lag-1 autocorrelation (the default is False).

    Returns
    -------
    features : list of FeatureVector
    """
    if not series:
        raise InvalidInputError('no time series given')
    lengths = {len(s) for s in series}
    if len(lengths) != 1:
        raise InvalidInputError('series have different window counts: {}'.format(sorted(lengths)))
    if lengths.pop() < MIN_WINDOWS:
        raise InvalidInputError('at least {} windows are needed, got {}'.format(MIN_WINDOWS, len(series[0])))

    features = []
    for s in series:
        x = np.asarray(s.rates)
        if extra:
            features.append(FeatureVector(s.member, float(x.mean()), float(x.var()), float(x.min()),
                                          float(x.max()), _lag1_autocorrelation(x)))
        else:
            features.append(FeatureVector(s.member, float(x.mean()), float(x.var())))
    return features


def feature_matrix(features, extra=False):
    return np.vstack([f.as_array(extra) for f in features])
