import http.client
import json
import logging
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

import numpy as np

from ..errors import InvalidParameterError

logger = logging.getLogger(__name__)

MAX_NARRATIVE_LENGTH = 2000
PRUNE_RECOMMENDATION = 'remove that model from the system'


class RecommendedAction(str, Enum):
    PRUNE = 'prune'
    INVESTIGATE = 'investigate'
    NONE = 'none'


@dataclass
class AnomalyReport:
    flagged: Optional[int]
    scores: List[float]
    features: list
    narrative: str
    action: RecommendedAction
    status: str = 'template'
    window_count: int = 0
    window_length: int = 0
    warnings: List[str] = field(default_factory=list)

    def to_text(self):
        """``key: value`` header lines, a blank line, then the narrative."""
        header = [
            ('flagged', 'none' if self.flagged is None else 'x{}'.format(self.flagged)),
            ('action', self.action.value),
            ('status', self.status),
            ('windows', '{} x {} steps'.format(self.window_count, self.window_length)),
        ]
        for f, s in zip(self.features, self.scores):
            header.append(('member x{}'.format(f.member),
                           'mean={:.1f}% variance={:.1f} score={:.4f}'.format(
                               100.0 * f.mean, 1e4 * f.variance, s)))
        return '\n'.join('{}: {}'.format(k, v) for k, v in header) + '\n\n' + self.narrative + '\n'


def _fleet_average(features, exclude=None):
    means = [f.mean for f in features if f.member != exclude]
    return float(np.mean(means)) if means else float(np.mean([f.mean for f in features]))


def template_narrative(detection, window_length):
    """Plain-language summary; percentages and variances rounded to one decimal."""
    features = detection.features
    span = '{} windows of {} steps'.format(detection.window_count, window_length)
    if detection.flagged is None:
        text = ('All {} members operate normally over the last {}: the fleet average admission rate is '
                '{:.1f}% and no member stands out.'.format(len(features), span,
                                                          100.0 * _fleet_average(features)))
        if detection.suspect is not None:
            text += (' Member x{} scores highest but not clearly apart from the rest; '
                     'keep it under observation.'.format(detection.suspect))
        return text

    flagged = next(f for f in features if f.member == detection.flagged)
    return ('Member x{member} shows an unusual admission pattern over the last {span}: it admitted '
            '{mean:.1f}% of requests on average (variance {var:.1f}), against a fleet average of '
            '{fleet:.1f}% for the other members. The isolation forest marks it as the outlier. '
            'Recommendation: {action}.').format(member=flagged.member, span=span, mean=100.0 * flagged.mean,
                                                var=1e4 * flagged.variance,
                                                fleet=100.0 * _fleet_average(features, flagged.member),
                                                action=PRUNE_RECOMMENDATION)


def _recommended_action(detection):
    if detection.flagged is not None:
        return RecommendedAction.PRUNE
    if detection.suspect is not None:
        return RecommendedAction.INVESTIGATE
    return RecommendedAction.NONE


def request_narrative(endpoint, facts, timeout=10.0):
    """POST ``facts`` as JSON to ``endpoint`` and return its plain-text answer."""
    body = json.dumps(facts).encode('utf-8')
    request = urllib.request.Request(endpoint, data=body, headers={'Content-Type': 'application/json'},
                                     method='POST')
    with urllib.request.urlopen(request, timeout=timeout) as response:
        text = response.read().decode('utf-8', errors='replace').strip()
    if not text:
        raise ValueError('empty response from {}'.format(endpoint))
    return text[:MAX_NARRATIVE_LENGTH]


def report_facts(detection, action):
    return {
        'flagged_member': detection.flagged,
        'members': [{'member': f.member, 'mean': f.mean, 'variance': f.variance} for f in detection.features],
        'window_count': detection.window_count,
        'recommendation': PRUNE_RECOMMENDATION if action is RecommendedAction.PRUNE else action.value,
    }


def render_report(detection, generator='template', endpoint=None, timeout=10.0, window_length=25):
    """Turn a detection result into an AnomalyReport

    Parameters
    ----------
    detection : DetectionResult
    generator : str, optional
        'template' or 'external' (the default is 'template').
    endpoint : str, optional
        URL of the text-completion service used by 'external'.
    timeout : float, optional
        Seconds to wait for the service (the default is 10).
    window_length : int, optional
        Steps per window, quoted in the narrative (the default is 25).

    Returns
    -------
    report : AnomalyReport
        ``status`` is 'template', 'external' or 'fallback'.
    """
    action = _recommended_action(detection)
    narrative = template_narrative(detection, window_length)
    status = 'template'
    warnings = []
    if generator == 'external':
        try:
            if not endpoint:
                raise ValueError('no endpoint configured')
            narrative = request_narrative(endpoint, report_facts(detection, action), timeout)
            status = 'external'
        except (urllib.error.URLError, http.client.HTTPException, OSError, ValueError) as err:
            message = 'external narrator failed ({}); using the template'.format(err)
            logger.warning(message)
            warnings.append(message)
            status = 'fallback'
    elif generator != 'template':
        raise InvalidParameterError("generator must be 'template' or 'external', got {!r}".format(generator))

    return AnomalyReport(detection.flagged, [float(s) for s in detection.scores], detection.features, narrative,
                         action, status, detection.window_count, window_length, warnings)
