from dataclasses import dataclass, field, fields, is_dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Optional, Tuple

import numpy as np
import yaml

from .._utilities import check_positive_int
from ..adversary import AttackSpec
from ..agent import PolicyConfig
from ..env import EnvFactory, TrafficModel, make_topology
from ..errors import ConfigError
from ..mtd import default_ensemble_config
from ..xai import ThresholdPolicy


class ScenarioKind(str, Enum):
    BASELINE = 'baseline'
    ATTACKED = 'attacked'
    MTD = 'mtd'


@dataclass(frozen=True)
class TopologySection:
    slice_memories: Tuple[Tuple[int, int], ...] = ((6, 4), (3, 2))
    dc_capacities: Tuple[int, ...] = (50, 50)

    def build(self):
        return make_topology(self.slice_memories, self.dc_capacities)


@dataclass(frozen=True)
class TrafficSection:
    """Per-service rates at the operating point; sweeps vary one of them."""
    arrival_rate: float = 12.0
    departure_rate: float = 1.0


@dataclass(frozen=True)
class EnvSection:
    horizon: int = 200
    reward_weights: Tuple[float, float] = (1.0, 0.1)
    overflow_penalty: float = -0.5
    arrival_scale: float = 30.0
    per_dc_state: bool = False


@dataclass(frozen=True)
class EnsembleSection:
    size: int = 4
    selection_seed: int = 0


@dataclass(frozen=True)
class DetectionSection:
    min_score: float = 0.6
    min_margin: float = 0.1
    num_trees: int = 100
    extra_features: bool = False
    window_length: int = 25
    num_windows: int = 40
    generator: str = 'template'
    endpoint: Optional[str] = None
    timeout: float = 10.0

    def threshold_policy(self):
        return ThresholdPolicy(self.min_score, self.min_margin, self.num_trees, self.extra_features)


def _grid(start, stop, step):
    return tuple(float(x) for x in np.round(np.arange(start, stop + step / 2, step), 10))


@dataclass(frozen=True)
class SweepSection:
    """Traffic grids, seeds per grid point and evaluation episodes

    ``train_per_point`` retrains at every grid point; otherwise each seed
    trains once at the operating point and is evaluated across the grid.
    """
    arrival_rates: Tuple[float, ...] = field(default_factory=lambda: _grid(2.0, 20.0, 2.0))
    departure_rates: Tuple[float, ...] = field(default_factory=lambda: _grid(0.05, 0.5, 0.05))
    seeds: int = 10
    episodes: int = 30
    train_per_point: bool = True


@dataclass(frozen=True)
class ExperimentSection:
    scenario: ScenarioKind = ScenarioKind.BASELINE
    seed: int = 0
    out_dir: str = 'results'
    n_jobs: int = 1


@dataclass(frozen=True)
class ExperimentConfig:
    topology: TopologySection = TopologySection()
    traffic: TrafficSection = TrafficSection()
    env: EnvSection = EnvSection()
    policy: PolicyConfig = PolicyConfig()
    ensemble: EnsembleSection = EnsembleSection()
    attack: AttackSpec = AttackSpec()
    detection: DetectionSection = DetectionSection()
    sweep: SweepSection = SweepSection()
    experiment: ExperimentSection = ExperimentSection()

    def __post_init__(self):
        for name in ('arrival_rates', 'departure_rates'):
            grid = getattr(self.sweep, name)
            if not grid:
                raise ConfigError('sweep.{} must not be empty'.format(name))
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise ConfigError('sweep.{} must be strictly increasing, got {}'.format(name, list(grid)))
        check_positive_int(self.sweep.seeds, 'sweep.seeds')
        check_positive_int(self.sweep.episodes, 'sweep.episodes')
        if len(self.topology.slice_memories) < 1:
            raise ConfigError('topology needs at least one slice')

    @property
    def num_services(self):
        return len(self.topology.slice_memories)

    def traffic_model(self, arrival_rate=None, departure_rate=None):
        lam = self.traffic.arrival_rate if arrival_rate is None else arrival_rate
        mu = self.traffic.departure_rate if departure_rate is None else departure_rate
        return TrafficModel.uniform(lam, mu, self.num_services)

    def env_factory(self, arrival_rate=None, departure_rate=None):
        return EnvFactory(self.topology.build(), self.traffic_model(arrival_rate, departure_rate),
                          horizon=self.env.horizon, reward_weights=tuple(self.env.reward_weights),
                          overflow_penalty=self.env.overflow_penalty, arrival_scale=self.env.arrival_scale,
                          per_dc_state=self.env.per_dc_state)

    def ensemble_config(self):
        return default_ensemble_config(self.policy, self.ensemble.size, self.ensemble.selection_seed)

    def with_overrides(self, seed=None, out_dir=None, scenario=None):
        experiment = self.experiment
        if seed is not None:
            experiment = replace(experiment, seed=seed)
        if out_dir is not None:
            experiment = replace(experiment, out_dir=str(out_dir))
        if scenario is not None:
            experiment = replace(experiment, scenario=ScenarioKind(scenario))
        return replace(self, experiment=experiment)


def default_config():
    return ExperimentConfig()


def _tupleize(value):
    if isinstance(value, list):
        return tuple(_tupleize(v) for v in value)
    return value


def _build_section(cls, values, section):
    if values is None:
        return cls()
    if not isinstance(values, dict):
        raise ConfigError('section {!r} must be a mapping, got {!r}'.format(section, values))
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigError('unknown keys in section {!r}: {}'.format(section, unknown))
    kwargs = {k: _tupleize(v) for k, v in values.items()}
    if cls is ExperimentSection and 'scenario' in kwargs:
        try:
            kwargs['scenario'] = ScenarioKind(kwargs['scenario'])
        except ValueError:
            raise ConfigError('unknown scenario {!r}'.format(kwargs['scenario']))
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as err:
        raise ConfigError('invalid section {!r}: {}'.format(section, err))


def config_from_dict(values):
    """Build an ExperimentConfig from nested mappings; missing keys take defaults."""
    values = values or {}
    if not isinstance(values, dict):
        raise ConfigError('configuration must be a mapping of sections')
    sections = [f.name for f in fields(ExperimentConfig)]
    unknown = sorted(set(values) - set(sections))
    if unknown:
        raise ConfigError('unknown configuration sections: {}'.format(unknown))
    defaults = ExperimentConfig()
    built = {name: _build_section(type(getattr(defaults, name)), values.get(name), name) for name in sections}
    try:
        return ExperimentConfig(**built)
    except ValueError as err:
        raise ConfigError(str(err))


def config_to_dict(config):
    """Plain nested mapping that ``config_from_dict`` turns back into ``config``."""
    def plain(value):
        if isinstance(value, Enum):
            return value.value
        if isinstance(value, (tuple, list)):
            return [plain(v) for v in value]
        if is_dataclass(value):
            return {f.name: plain(getattr(value, f.name)) for f in fields(value)}
        return value
    return plain(config)


def load_config(path):
    """Read a YAML experiment configuration

    Parameters
    ----------
    path : str or Path

    Returns
    -------
    config : ExperimentConfig
    """
    path = Path(path)
    try:
        with path.open() as f:
            values = yaml.safe_load(f)
    except OSError as err:
        raise ConfigError('cannot read config {}: {}'.format(path, err))
    except yaml.YAMLError as err:
        raise ConfigError('cannot parse config {}: {}'.format(path, err))
    return config_from_dict(values)
