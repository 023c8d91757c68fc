from ._features import MIN_WINDOWS, FeatureVector, ModelTimeSeries, extract_features, feature_matrix
from ._iforest import (IsolationForestModel, IsolationTree, anomaly_score, average_path_length,
                       fit_isolation_forest, path_length, score_samples)
from ._detect import MIN_FLEET_SIZE, DetectionResult, ThresholdPolicy, detect_outlier_model
from ._report import (MAX_NARRATIVE_LENGTH, PRUNE_RECOMMENDATION, AnomalyReport, RecommendedAction,
                      render_report, report_facts, request_narrative, template_narrative)
