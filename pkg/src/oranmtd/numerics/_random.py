import math

import numpy as np

from .._utilities import check_finite_real
from ..errors import InvalidParameterError

_MAX_SEED = 2 ** 64 - 1

# inversion by sequential search is exact enough for the arrival rates we use;
# larger rates go through numpy's sampler (still one draw per call)
_INVERSION_LAMBDA_MAX = 30.0


def _label_key(label):
    """Spawn key of a ``/``-separated label path."""
    return tuple(int(b) for b in label.encode('utf-8'))


class RandomStream(object):
    """Seeded, splittable random stream

    A ``PCG64`` bit generator keyed by ``(seed, label)`` through
    ``numpy.random.SeedSequence``. Streams with the same seed and label
    produce bit-identical sequences; different labels never share state.

    Parameters
    ----------
    seed : int
        Unsigned 64-bit master seed.
    label : str, optional
        Path naming the substream (the default is '' for the root stream).
    """

    __slots__ = ('seed', 'label', '_generator')

    def __init__(self, seed, label=''):
        if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or not 0 <= seed <= _MAX_SEED:
            raise InvalidParameterError('seed must be an unsigned 64-bit integer, got {!r}'.format(seed))
        self.seed = int(seed)
        self.label = label
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=_label_key(label))
        self._generator = np.random.Generator(np.random.PCG64(sequence))

    def substream(self, label):
        """Independent child stream named ``label`` under this stream's path."""
        path = label if not self.label else self.label + '/' + label
        return RandomStream(self.seed, path)

    def __repr__(self):
        return 'RandomStream(seed={}, label={!r})'.format(self.seed, self.label)

    def random(self):
        """One uniform draw in [0, 1)."""
        return float(self._generator.random())

    def integers(self, high):
        """Uniform integer in [0, high)."""
        return int(self._generator.integers(0, high))

    def permutation(self, n):
        return self._generator.permutation(n)

    def choice(self, n, size):
        """``size`` distinct indices out of ``range(n)``."""
        return self._generator.choice(n, size=size, replace=False)

    def normal(self, size):
        return self._generator.standard_normal(size)

    def bernoulli(self, p):
        return self.random() < p

    def standard_exponential(self):
        return float(self._generator.standard_exponential())

    def poisson(self, lam):
        return int(self._generator.poisson(lam))


def sample_poisson(stream, lam):
    """Draw a Poisson(lam) count

    Inversion by sequential search on a single uniform draw for ``lam <= 30``,
    numpy's sampler above that.

    Parameters
    ----------
    stream : RandomStream
    lam : float
        Nonnegative finite rate.

    Returns
    -------
    count : int
    """
    lam = check_finite_real(lam, 'lambda')
    if lam < 0:
        raise InvalidParameterError('lambda must be nonnegative, got {}'.format(lam))
    if lam > _INVERSION_LAMBDA_MAX:
        return stream.poisson(lam)

    u = stream.random()
    k = 0
    p = math.exp(-lam)
    cdf = p
    while u >= cdf:
        k += 1
        p *= lam / k
        if p == 0.0:
            break
        cdf += p
    return k


def sample_exponential(stream, mu):
    """Draw an Exp(mu) holding time (mean ``1 / mu``), always > 0."""
    mu = check_finite_real(mu, 'mu')
    if mu <= 0:
        raise InvalidParameterError('mu must be positive, got {}'.format(mu))
    x = stream.standard_exponential() / mu
    return max(x, np.finfo(np.float64).tiny)


def sample_uniform(stream, lo, hi):
    """Draw from Uniform[lo, hi); ``lo == hi`` returns ``lo``."""
    lo = check_finite_real(lo, 'lo')
    hi = check_finite_real(hi, 'hi')
    if lo > hi:
        raise InvalidParameterError('lo must not exceed hi, got lo={} hi={}'.format(lo, hi))
    u = stream.random()
    if lo == hi:
        return lo
    x = lo + (hi - lo) * u
    if x >= hi:
        x = float(np.nextafter(hi, lo))
    return x
