import logging
from dataclasses import dataclass
from typing import List, Optional

from ..agent import evaluate_windows
from ..mtd import PruneStatus, evaluate_ensemble, prune, train_ensemble
from ..numerics import RandomStream
from ..xai import ModelTimeSeries, detect_outlier_model, render_report

logger = logging.getLogger(__name__)


@dataclass
class DetectAndPruneResult:
    """Everything one detect-and-prune run produced

    ``ground_truth`` and ``correct`` are filled in after detection finished;
    the detector itself only saw ``series``.
    """
    report: object
    detection: object
    series: List[ModelTimeSeries]
    before: float
    after: float
    ground_truth: Optional[int]
    prune_status: Optional[PruneStatus]
    ensemble: object = None

    @property
    def correct(self):
        return self.detection.flagged is not None and self.detection.flagged == self.ground_truth


def audit_series(ensemble, env_factory, num_windows, window_length, stream):
    """Standalone windowed admission rates of every member on shared arrivals."""
    series = []
    for i, member in enumerate(ensemble.members):
        rates = evaluate_windows(member, env_factory, num_windows, window_length, stream)
        series.append(ModelTimeSeries(i, tuple(rates)))
    return series


def detect_and_prune(config, ensemble=None, stream=None, verbose=False):
    """Build an MTD ensemble, find the poisoned member, explain it and prune it

    Parameters
    ----------
    config : ExperimentConfig
    ensemble : Ensemble, optional
        Skip training and use this one (the default is None, train from
        ``config``).
    stream : RandomStream, optional
        (the default is ``RandomStream(config.experiment.seed)``).
    verbose : bool, optional

    Returns
    -------
    result : DetectAndPruneResult
    """
    stream = RandomStream(config.experiment.seed) if stream is None else stream
    factory = config.env_factory()
    detection_config = config.detection
    if ensemble is None:
        ensemble = train_ensemble(factory, config.ensemble_config(), config.attack,
                                  stream.substream('train/ensemble'), n_jobs=config.experiment.n_jobs,
                                  verbose=verbose)

    series = audit_series(ensemble, factory, detection_config.num_windows, detection_config.window_length,
                          stream.substream('audit'))
    detection = detect_outlier_model(series, detection_config.threshold_policy(), stream.substream('detect'))
    report = render_report(detection, detection_config.generator, detection_config.endpoint,
                           detection_config.timeout, detection_config.window_length)

    evaluation_stream = stream.substream('evaluate')
    episodes = config.sweep.episodes
    before = evaluate_ensemble(ensemble, factory, episodes, evaluation_stream).mean
    status = None
    after = before
    if detection.flagged is not None:
        status = prune(ensemble, detection.flagged)
        after = evaluate_ensemble(ensemble, factory, episodes, evaluation_stream).mean

    result = DetectAndPruneResult(report, detection, series, before, after, ensemble.ground_truth(), status,
                                  ensemble)
    logger.info('flagged %s (ground truth %s), admission %.4f -> %.4f', detection.flagged,
                result.ground_truth, before, after)
    return result
