from ._config import (DetectionSection, EnsembleSection, EnvSection, ExperimentConfig, ExperimentSection,
                      ScenarioKind, SweepSection, TopologySection, TrafficSection, config_from_dict,
                      config_to_dict, default_config, load_config)
from ._oracle import (MAX_ORACLE_REQUESTS, OracleResult, TraceEvent, exact_admission_oracle,
                      first_fit_admissions, random_trace, replay_admissions)
from ._scenario import (CSV_COLUMNS, ResultRow, run_scenario, strip_wall_time, sweep_arrival,
                        sweep_departure)
from ._pipeline import DetectAndPruneResult, audit_series, detect_and_prune
