import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oranmtd.errors import InvalidInputError, InvalidParameterError
from oranmtd.numerics import RandomStream
from oranmtd.xai import (PRUNE_RECOMMENDATION, DetectionResult, FeatureVector, ModelTimeSeries, RecommendedAction,
                         ThresholdPolicy, anomaly_score, average_path_length, detect_outlier_model, extract_features,
                         fit_isolation_forest, path_length, render_report, score_samples, template_narrative)


def _fleet(means, spreads, stream, num_windows=40):
    fleet = []
    for member, (mean, spread) in enumerate(zip(means, spreads)):
        noise = stream.substream('member{}'.format(member)).normal(num_windows)
        fleet.append(ModelTimeSeries(member, np.clip(mean + spread * noise, 0.0, 1.0)))
    return fleet


def _walk(tree, point):
    node = 0
    while tree.feature[node] >= 0:
        node = tree.left[node] if point[tree.feature[node]] < tree.threshold[node] else tree.right[node]
    return tree.depth[node] + average_path_length(tree.size[node])


class TestFeatures:

    def test_constant_series(self):
        feature, = extract_features([ModelTimeSeries(0, [0.6] * 10)])
        assert feature.mean == pytest.approx(0.6)
        assert feature.variance == pytest.approx(0.0)

    def test_population_variance(self):
        feature, = extract_features([ModelTimeSeries(0, [0.5, 0.7] * 4)])
        assert feature.mean == pytest.approx(0.6)
        assert feature.variance == pytest.approx(0.01)

    def test_extra_features(self):
        feature, = extract_features([ModelTimeSeries(0, [0.2, 0.8] * 4)], extra=True)
        assert (feature.minimum, feature.maximum) == (0.2, 0.8)
        assert feature.autocorrelation < 0
        assert feature.as_array(extra=True).shape == (5,)

    def test_too_few_windows(self):
        with pytest.raises(InvalidInputError):
            extract_features([ModelTimeSeries(0, [0.5] * 7)])

    def test_mismatched_lengths(self):
        with pytest.raises(InvalidInputError):
            extract_features([ModelTimeSeries(0, [0.5] * 8), ModelTimeSeries(1, [0.5] * 9)])

    def test_rates_out_of_range(self):
        with pytest.raises(InvalidInputError):
            ModelTimeSeries(0, [0.5, 1.5])


class TestIsolationForest:

    def test_average_path_length(self):
        assert average_path_length(1) == 0.0
        assert average_path_length(2) == 1.0
        assert average_path_length(4) == pytest.approx(2 * (1 + 1 / 2 + 1 / 3) - 1.5)

    def test_identical_points_score_half(self, stream):
        model = fit_isolation_forest(np.ones((2, 2)), num_trees=10, stream=stream)
        np.testing.assert_allclose(score_samples(model, np.ones((2, 2))), 0.5)
        assert anomaly_score(model, np.ones(2)) == pytest.approx(0.5)

    def test_deterministic_given_seed(self):
        points = RandomStream(1).normal((6, 2))
        a = score_samples(fit_isolation_forest(points, stream=RandomStream(9)), points)
        b = score_samples(fit_isolation_forest(points, stream=RandomStream(9)), points)
        assert a.tobytes() == b.tobytes()

    def test_path_length_matches_tree_walk(self):
        points = RandomStream(2).normal((16, 3))
        model = fit_isolation_forest(points, num_trees=20, stream=RandomStream(3))
        for tree in model.trees:
            assert tree.max_depth <= 4
            for point in points:
                assert path_length(tree, point) == pytest.approx(_walk(tree, point))

    @settings(max_examples=30, deadline=None)
    @given(arrays(np.float64, (5, 2), elements=st.floats(-10, 10)), st.integers(0, 1000))
    def test_scores_in_unit_interval(self, points, seed):
        model = fit_isolation_forest(points, num_trees=10, stream=RandomStream(seed))
        scores = score_samples(model, points)
        assert np.all(scores > 0.0) and np.all(scores <= 1.0)

    def test_single_point_rejected(self, stream):
        with pytest.raises(InvalidInputError):
            fit_isolation_forest(np.ones((1, 2)), stream=stream)


class TestDetection:

    def test_flags_the_low_admission_member(self):
        stream = RandomStream(0)
        fleet = _fleet((0.60, 0.63, 0.60, 0.15), (0.02, 0.02, 0.02, 0.08), stream)
        result = detect_outlier_model(fleet, stream=stream.substream('forest'))
        assert result.flagged == 3
        assert np.argmax(result.scores) == 3
        assert result.window_count == 40

    def test_separation_over_seeds(self):
        hits = 0
        for seed in range(20):
            stream = RandomStream(seed)
            fleet = _fleet((0.60, 0.60, 0.60, 0.20), (0.03, 0.03, 0.03, 0.08), stream)
            hits += detect_outlier_model(fleet, stream=stream.substream('forest')).flagged == 3
        assert hits >= 19

    def test_clean_fleet_false_positives(self):
        flagged = 0
        for seed in range(50):
            stream = RandomStream(seed)
            fleet = _fleet((0.6,) * 4, (0.03,) * 4, stream)
            flagged += detect_outlier_model(fleet, stream=stream.substream('forest')).flagged is not None
        assert flagged <= 5

    def test_fleet_of_two(self, stream):
        with pytest.raises(InvalidInputError):
            detect_outlier_model(_fleet((0.6, 0.1), (0.01, 0.01), stream), stream=stream)

    def test_unreachable_threshold_flags_nothing(self, stream):
        fleet = _fleet((0.60, 0.63, 0.60, 0.15), (0.02, 0.02, 0.02, 0.08), stream)
        result = detect_outlier_model(fleet, ThresholdPolicy(min_score=1.0), stream=stream)
        assert result.flagged is None and result.suspect is None


@pytest.fixture
def narrator():
    """Local narrator endpoint replying with ``body`` while announcing ``length`` bytes."""
    servers = []

    def serve(body, length=None):
        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                self.rfile.read(int(self.headers['Content-Length']))
                self.send_response(200)
                self.send_header('Content-Length', str(len(body) if length is None else length))
                self.end_headers()
                self.wfile.write(body)

            def log_message(self, *args):
                pass

        server = HTTPServer(('127.0.0.1', 0), Handler)
        threading.Thread(target=server.serve_forever, daemon=True).start()
        servers.append(server)
        return 'http://127.0.0.1:{}/narrate'.format(server.server_port)

    yield serve
    for server in servers:
        server.shutdown()
        server.server_close()


def _detection(flagged=3, suspect=3):
    features = [FeatureVector(i, m, v) for i, (m, v) in enumerate(
        [(0.60, 0.0004), (0.63, 0.0004), (0.60, 0.0004), (0.15, 0.0064)])]
    return DetectionResult(flagged, suspect, np.array([0.45, 0.44, 0.45, 0.71]), features, 40)


class TestReport:

    def test_template_names_the_outlier(self):
        report = render_report(_detection())
        text = report.narrative
        assert 'member x3' in text.lower()
        assert '15.0%' in text and '61.0%' in text
        assert PRUNE_RECOMMENDATION in text
        assert report.action is RecommendedAction.PRUNE
        assert report.status == 'template'

    def test_nothing_flagged(self):
        report = render_report(_detection(flagged=None, suspect=None))
        assert report.action is RecommendedAction.NONE
        assert PRUNE_RECOMMENDATION not in report.narrative

    def test_suspect_below_margin(self):
        report = render_report(_detection(flagged=None, suspect=3))
        assert report.action is RecommendedAction.INVESTIGATE
        assert 'x3' in report.narrative

    def test_text_layout(self):
        text = render_report(_detection(), window_length=25).to_text()
        header, narrative = text.split('\n\n', 1)
        assert header.splitlines()[0] == 'flagged: x3'
        assert 'windows: 40 x 25 steps' in header
        assert narrative.strip() == template_narrative(_detection(), 25)

    def test_unreachable_endpoint_falls_back(self):
        report = render_report(_detection(), generator='external', endpoint='http://127.0.0.1:9', timeout=0.5)
        assert report.status == 'fallback'
        assert report.warnings
        assert report.narrative == template_narrative(_detection(), 25)

    def test_missing_endpoint_falls_back(self):
        assert render_report(_detection(), generator='external').status == 'fallback'

    def test_unknown_generator(self):
        with pytest.raises(InvalidParameterError):
            render_report(_detection(), generator='oracle')

    def test_external_narrative(self, narrator):
        endpoint = narrator(b'Member x3 is the outlier.')
        report = render_report(_detection(), generator='external', endpoint=endpoint, timeout=5.0)
        assert report.status == 'external'
        assert report.narrative == 'Member x3 is the outlier.'

    def test_truncated_response_falls_back(self, narrator):
        endpoint = narrator(b'Member x3 is ', length=500)
        report = render_report(_detection(), generator='external', endpoint=endpoint, timeout=5.0)
        assert report.status == 'fallback'
        assert report.narrative == template_narrative(_detection(), 25)

    def test_malformed_endpoint_falls_back(self):
        report = render_report(_detection(), generator='external', endpoint='http://127.0.0.1:notaport/x')
        assert report.status == 'fallback'
        assert report.warnings
