import logging
import math
import time
from dataclasses import astuple, dataclass, replace

from tqdm import tqdm

from ..adversary import PoisoningAttack
from ..agent import evaluate_policy, train
from ..errors import InvalidParameterError, InvariantError, NumericalError
from ..mtd import evaluate_ensemble, train_ensemble
from ..numerics import RandomStream
from ._config import ScenarioKind

logger = logging.getLogger(__name__)

CSV_COLUMNS = ('scenario', 'arrival_rate', 'departure_rate', 'seed', 'mean_admission_rate',
               'std_admission_rate', 'episodes', 'wall_time_s')


@dataclass(frozen=True)
class ResultRow:
    """One (scenario, grid point, seed) measurement; NaN rates mark a failed run."""
    scenario: str
    arrival_rate: float
    departure_rate: float
    seed: int
    mean_admission_rate: float
    std_admission_rate: float
    episodes: int
    wall_time_s: float

    @property
    def failed(self):
        return math.isnan(self.mean_admission_rate)

    def sort_key(self):
        return self.scenario, self.arrival_rate, self.departure_rate, self.seed

    def as_tuple(self):
        return astuple(self)


def _train_for_scenario(config, scenario, factory, stream):
    """Single policy or ensemble, poisoned as the scenario demands."""
    if scenario is ScenarioKind.BASELINE:
        return train(factory, config.policy, stream=stream.substream('policy')).policy
    if scenario is ScenarioKind.ATTACKED:
        attack = PoisoningAttack.seeded(config.attack, stream)
        return train(factory, config.policy, attack=attack, stream=stream.substream('policy')).policy
    return train_ensemble(factory, config.ensemble_config(), config.attack, stream.substream('ensemble'),
                          n_jobs=config.experiment.n_jobs)


def _evaluate_for_scenario(config, scenario, model, factory, stream):
    attack = None
    if scenario is not ScenarioKind.BASELINE and config.attack.eval_time:
        spec = config.attack
        if scenario is ScenarioKind.MTD:
            spec = replace(spec, target=model.ground_truth())
        attack = PoisoningAttack.seeded(spec, stream.substream('eval-attack'))
    if scenario is ScenarioKind.MTD:
        result = evaluate_ensemble(model, factory, config.sweep.episodes, stream, attack=attack,
                                   window_length=config.detection.window_length)
    else:
        result = evaluate_policy(model, factory, config.sweep.episodes, stream, attack=attack)
    return result.mean, result.std


def run_scenario(config, axis='arrival', scenario=None, verbose=False):
    """Train and evaluate one scenario over one traffic grid

    Parameters
    ----------
    config : ExperimentConfig
    axis : str, optional
        'arrival' sweeps ``sweep.arrival_rates`` at the configured departure
        rate, 'departure' the converse (the default is 'arrival').
    scenario : ScenarioKind, optional
        (the default is ``config.experiment.scenario``).
    verbose : bool, optional

    Returns
    -------
    rows : list of ResultRow
        One per (grid point, seed), sorted. Runs that fail numerically are
        kept with NaN rates.
    """
    scenario = ScenarioKind(scenario or config.experiment.scenario)
    if axis == 'arrival':
        points = [(lam, config.traffic.departure_rate) for lam in config.sweep.arrival_rates]
    elif axis == 'departure':
        points = [(config.traffic.arrival_rate, mu) for mu in config.sweep.departure_rates]
    else:
        raise InvalidParameterError("axis must be 'arrival' or 'departure', got {!r}".format(axis))

    rows = []
    seeds = [config.experiment.seed + k for k in range(config.sweep.seeds)]
    for seed in tqdm(seeds, disable=not verbose):
        root = RandomStream(seed)
        model = None
        for j, (lam, mu) in enumerate(points):
            start = time.perf_counter()
            try:
                if model is None or config.sweep.train_per_point:
                    if config.sweep.train_per_point:
                        factory, label = config.env_factory(lam, mu), 'train/point{}'.format(j)
                    else:
                        factory, label = config.env_factory(), 'train'
                    model = _train_for_scenario(config, scenario, factory, root.substream(label))
                mean, std = _evaluate_for_scenario(config, scenario, model, config.env_factory(lam, mu),
                                                   root.substream('eval/point{}'.format(j)))
            except (NumericalError, InvariantError) as err:
                logger.warning('%s run failed at seed %d, arrival %g, departure %g: %s',
                               scenario.value, seed, lam, mu, err)
                mean, std = float('nan'), float('nan')
            rows.append(ResultRow(scenario.value, float(lam), float(mu), seed, mean, std,
                                  config.sweep.episodes, time.perf_counter() - start))
    return sorted(rows, key=ResultRow.sort_key)


def sweep_arrival(config, scenario=None, verbose=False):
    return run_scenario(config, 'arrival', scenario, verbose)


def sweep_departure(config, scenario=None, verbose=False):
    return run_scenario(config, 'departure', scenario, verbose)


def strip_wall_time(rows):
    """Rows with the timing column zeroed, for byte comparisons."""
    return [replace(r, wall_time_s=0.0) for r in rows]
