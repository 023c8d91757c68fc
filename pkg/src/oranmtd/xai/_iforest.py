import math
from dataclasses import dataclass
from typing import List

import numpy as np
from numba import njit
from scipy.special import digamma

from .._utilities import check_positive_int
from ..errors import InvalidInputError, ShapeError

_EULER_GAMMA = 0.5772156649015329


def average_path_length(n):
    """c(n): mean unsuccessful-search path length of a binary search tree over n points

    c(n) = 2 H(n - 1) - 2 (n - 1) / n, with c(0) = c(1) = 0 and c(2) = 1.
    """
    if n <= 1:
        return 0.0
    if n == 2:
        return 1.0
    harmonic = float(digamma(n)) + _EULER_GAMMA
    return 2.0 * harmonic - 2.0 * (n - 1) / n


@dataclass
class IsolationTree:
    """Array-encoded tree; ``feature[k] == -1`` marks an external node

    ``leaf_value`` holds depth plus c(size) at external nodes.
    """
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    depth: np.ndarray
    size: np.ndarray
    leaf_value: np.ndarray

    @property
    def max_depth(self):
        return int(self.depth.max())


@dataclass
class IsolationForestModel:
    trees: List[IsolationTree]
    subsample_size: int
    num_trees: int
    seed: int
    num_features: int


class _TreeBuilder(object):

    def __init__(self, stream, depth_limit):
        self.stream = stream
        self.depth_limit = depth_limit
        self.feature = []
        self.threshold = []
        self.left = []
        self.right = []
        self.depth = []
        self.size = []

    def _new_node(self, depth, size):
        for column, value in ((self.feature, -1), (self.threshold, 0.0), (self.left, -1), (self.right, -1),
                              (self.depth, depth), (self.size, size)):
            column.append(value)
        return len(self.feature) - 1

    def build(self, x, depth=0):
        node = self._new_node(depth, len(x))
        if len(x) <= 1 or depth >= self.depth_limit:
            return node
        lo = x.min(axis=0)
        hi = x.max(axis=0)
        candidates = np.flatnonzero(hi > lo)
        if candidates.size == 0:
            return node

        q = int(candidates[self.stream.integers(candidates.size)])
        split = lo[q] + (hi[q] - lo[q]) * self.stream.random()
        if split <= lo[q]:
            split = float(np.nextafter(lo[q], hi[q]))
        mask = x[:, q] < split
        self.feature[node] = q
        self.threshold[node] = split
        self.left[node] = self.build(x[mask], depth + 1)
        self.right[node] = self.build(x[~mask], depth + 1)
        return node

    def finish(self):
        depth = np.array(self.depth, dtype=np.int64)
        size = np.array(self.size, dtype=np.int64)
        feature = np.array(self.feature, dtype=np.int64)
        leaf_value = np.array([d + average_path_length(s) if f < 0 else 0.0
                               for d, s, f in zip(depth, size, feature)])
        return IsolationTree(feature, np.array(self.threshold, dtype=np.float64),
                             np.array(self.left, dtype=np.int64), np.array(self.right, dtype=np.int64),
                             depth, size, leaf_value)


def fit_isolation_forest(points, num_trees=100, subsample_size=None, stream=None):
    """Grow an isolation forest

    Each tree sees ``subsample_size`` distinct points and splits a uniformly
    chosen non-constant feature at a uniform value until a node holds one
    point, is constant, or reaches depth ``ceil(log2(subsample_size))``.

    Parameters
    ----------
    points : array, shape (num_points, num_features)
    num_trees : int, optional
        (the default is 100).
    subsample_size : int, optional
        Between 2 and num_points (the default is num_points).
    stream : RandomStream

    Returns
    -------
    model : IsolationForestModel
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[0] < 2:
        raise InvalidInputError('an isolation forest needs at least 2 points, got shape {}'.format(points.shape))
    if not np.all(np.isfinite(points)):
        raise InvalidInputError('isolation forest inputs must be finite')
    num_trees = check_positive_int(num_trees, 'num_trees')
    num_points = points.shape[0]
    subsample_size = num_points if subsample_size is None else check_positive_int(subsample_size, 'subsample_size')
    if not 2 <= subsample_size <= num_points:
        raise InvalidInputError('subsample size must lie in [2, {}], got {}'.format(num_points, subsample_size))

    depth_limit = int(math.ceil(math.log2(subsample_size)))
    trees = []
    for _ in range(num_trees):
        idx = np.sort(stream.choice(num_points, subsample_size))
        builder = _TreeBuilder(stream, depth_limit)
        builder.build(points[idx])
        trees.append(builder.finish())
    return IsolationForestModel(trees, subsample_size, num_trees, stream.seed, points.shape[1])


@njit
def _path_length(point, feature, threshold, left, right, leaf_value):
    node = 0
    while feature[node] >= 0:
        if point[feature[node]] < threshold[node]:
            node = left[node]
        else:
            node = right[node]
    return leaf_value[node]


def path_length(tree, point):
    """Depth of the external node ``point`` reaches, plus c(size) there."""
    return _path_length(point, tree.feature, tree.threshold, tree.left, tree.right, tree.leaf_value)


def score_samples(model, points):
    """Anomaly score 2^(-E[h] / c(n)) of every row of ``points``."""
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if points.shape[1] != model.num_features:
        raise ShapeError('points have {} features, the forest {}'.format(points.shape[1], model.num_features))
    normalizer = average_path_length(model.subsample_size)
    scores = np.empty(points.shape[0])
    for i, point in enumerate(points):
        mean_path = np.mean([path_length(tree, point) for tree in model.trees])
        scores[i] = 2.0 ** (-mean_path / normalizer)
    return scores


def anomaly_score(model, point):
    point = np.asarray(point, dtype=np.float64)
    if point.ndim != 1:
        raise ShapeError('expected a single point, got shape {}'.format(point.shape))
    return float(score_samples(model, point)[0])
