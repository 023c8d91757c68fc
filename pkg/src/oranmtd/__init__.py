"""Admission control for O-RAN slices under poisoning, with a moving-target
ensemble defense and isolation-forest detection of the poisoned model."""

__version__ = '0.1.0'

from .logging import set_verbosity
from .numerics import RandomStream
from .env import SliceAdmissionEnv, EnvFactory, default_topology, TrafficModel, admission_rate
from .agent import PolicyConfig, TrainedPolicy, act, train, evaluate_policy, evaluate_windows
from .adversary import AttackSpec, PoisoningAttack, perturb_observation
from .mtd import EnsembleConfig, Ensemble, train_ensemble, select_model, ensemble_act, prune, evaluate_ensemble
from .xai import extract_features, fit_isolation_forest, anomaly_score, detect_outlier_model, render_report
from .harness import (ExperimentConfig, ScenarioKind, default_config, load_config, run_scenario, sweep_arrival,
                      sweep_departure, exact_admission_oracle, detect_and_prune)
from .read_write import emit_csv, read_csv, save_policy, load_policy, save_ensemble, load_ensemble
