import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .._utilities import check_finite_real
from ..errors import InvalidInputError
from ._features import FeatureVector, extract_features, feature_matrix
from ._iforest import fit_isolation_forest, score_samples

logger = logging.getLogger(__name__)

MIN_FLEET_SIZE = 3


@dataclass(frozen=True)
class ThresholdPolicy:
    """When the highest-scoring member counts as an outlier

    Attributes:
        min_score(float):
            The top score must exceed this.
        min_margin(float):
            The top score must beat the runner-up by more than this.
        num_trees(int):
            Trees in the forest.
        extra_features(bool):
            Add min, max and lag-1 autocorrelation to mean and variance.
    """
    min_score: float = 0.6
    min_margin: float = 0.1
    num_trees: int = 100
    extra_features: bool = False

    def __post_init__(self):
        check_finite_real(self.min_score, 'min_score')
        check_finite_real(self.min_margin, 'min_margin')


@dataclass
class DetectionResult:
    """Outcome of one detection run

    ``suspect`` is the top-scoring member whenever its score clears
    ``min_score``; ``flagged`` additionally requires the margin.
    """
    flagged: Optional[int]
    suspect: Optional[int]
    scores: np.ndarray
    features: List[FeatureVector]
    window_count: int

    @property
    def members(self):
        return [f.member for f in self.features]


def detect_outlier_model(fleet, policy=None, stream=None):
    """Score every member's series with an isolation forest and flag the outlier

    Parameters
    ----------
    fleet : list of ModelTimeSeries
        At least three members. Carries nothing but admission rates.
    policy : ThresholdPolicy, optional
    stream : RandomStream

    Returns
    -------
    result : DetectionResult
        ``flagged`` is a member index as stored in the series, or None.
    """
    policy = ThresholdPolicy() if policy is None else policy
    if len(fleet) < MIN_FLEET_SIZE:
        raise InvalidInputError('detection needs at least {} members, got {}'.format(MIN_FLEET_SIZE, len(fleet)))
    features = extract_features(fleet, extra=policy.extra_features)
    points = feature_matrix(features, extra=policy.extra_features)
    model = fit_isolation_forest(points, num_trees=policy.num_trees, subsample_size=len(fleet), stream=stream)
    scores = score_samples(model, points)

    order = np.argsort(-scores, kind='stable')
    top, second = scores[order[0]], scores[order[1]]
    suspect = fleet[order[0]].member if top > policy.min_score else None
    flagged = suspect if top - second > policy.min_margin else None
    logger.info('isolation scores %s, flagged %s', np.round(scores, 4).tolist(), flagged)
    return DetectionResult(flagged, suspect, scores, features, len(fleet[0]))
