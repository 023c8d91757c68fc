import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, List, Tuple

import numpy as np
from tqdm import tqdm

from .._utilities import _window_idx_generator, check_positive_int
from ..adversary import PoisoningAttack
from ..agent import PolicyConfig, act, train
from ..env import admission_rate
from ..errors import InvalidParameterError, NoActiveMemberError, PruneError

logger = logging.getLogger(__name__)

DEFAULT_HIDDEN_SIZES = ((32, 32), (64, 64), (32,), (64, 32))
DEFAULT_LEARNING_RATES = (3e-4, 1e-4, 5e-4, 3e-4)
DEFAULT_CLIP_RATIOS = (0.2, 0.2, 0.1, 0.3)


@dataclass(frozen=True)
class EnsembleConfig:
    """Member configurations of the moving-target ensemble

    Attributes:
        members(tuple):
            One PolicyConfig per xApp, pairwise distinct.
        selection_seed(int):
            Seed of the per-step model selection stream.
    """
    members: Tuple[PolicyConfig, ...]
    selection_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'members', tuple(self.members))
        if not self.members:
            raise InvalidParameterError('an ensemble needs at least one member')
        for i in range(len(self.members)):
            for j in range(i):
                if self.members[i] == self.members[j]:
                    raise InvalidParameterError('ensemble members {} and {} have identical configs'.format(j, i))

    @property
    def size(self):
        return len(self.members)

    def to_dict(self):
        return {'members': [m.to_dict() for m in self.members], 'selection_seed': self.selection_seed}

    @classmethod
    def from_dict(cls, values):
        return cls(tuple(PolicyConfig.from_dict(m) for m in values['members']),
                   values.get('selection_seed', 0))


def default_ensemble_config(base=None, size=4, selection_seed=0):
    """Four PPO variants differing in width, step size, clip ratio and seed

    ``base`` supplies every other hyperparameter (the default is PolicyConfig()).
    """
    base = PolicyConfig() if base is None else base
    size = check_positive_int(size, 'size')
    members = []
    for k in range(size):
        j = k % len(DEFAULT_HIDDEN_SIZES)
        members.append(PolicyConfig(**dict(base.to_dict(), hidden_sizes=DEFAULT_HIDDEN_SIZES[j],
                                           learning_rate=DEFAULT_LEARNING_RATES[j],
                                           clip_ratio=DEFAULT_CLIP_RATIOS[j], seed=base.seed + k)))
    return EnsembleConfig(tuple(members), selection_seed)


class PruneStatus(str, Enum):
    PRUNED = 'pruned'
    ALREADY_PRUNED = 'already_pruned'


class Ensemble(object):
    """Trained xApps, their active mask and the hidden poisoned index

    The poisoned index is ground truth for scoring a detector; detectors only
    ever receive admission time series, never this object.
    """

    def __init__(self, members, poisoned_index=None, active=None, curves=None, selection_seed=0):
        self.members = list(members)
        if not self.members:
            raise InvalidParameterError('an ensemble needs at least one member')
        if poisoned_index is not None and not 0 <= poisoned_index < len(self.members):
            raise InvalidParameterError('poisoned index {} out of range for {} members'.format(
                poisoned_index, len(self.members)))
        self._poisoned_index = poisoned_index
        self.active = [True] * len(self.members) if active is None else [bool(a) for a in active]
        if len(self.active) != len(self.members) or not any(self.active):
            raise InvalidParameterError('active mask {} must match the members and keep one active'.format(
                self.active))
        self.curves = list(curves) if curves is not None else []
        self.selection_seed = int(selection_seed)

    def __len__(self):
        return len(self.members)

    def __repr__(self):
        return 'Ensemble with {} members, active {}'.format(len(self.members), self.active_indices)

    @property
    def active_indices(self):
        return [i for i, a in enumerate(self.active) if a]

    def ground_truth(self):
        """Index of the member trained under attack, or None."""
        return self._poisoned_index


def draw_poisoned_index(size, stream):
    """Uniform index in [0, size) from the ensemble stream's poison substream."""
    return stream.substream('poison').integers(check_positive_int(size, 'size'))


def _train_member(env_factory, config, attack_spec, member_stream, attack_stream):
    attack = None if attack_spec is None else PoisoningAttack.seeded(attack_spec, attack_stream)
    return train(env_factory, config, attack=attack, stream=member_stream)


def train_ensemble(env_factory, config, attack_spec, stream, n_jobs=1, verbose=False):
    """Train every member, one of them through the poisoning hook

    Parameters
    ----------
    env_factory : EnvFactory
    config : EnsembleConfig
    attack_spec : AttackSpec or None
        None trains a clean ensemble with no poisoned index.
    stream : RandomStream
        Member ``i`` trains on its own substream; the poisoned index and the
        attack come from two more. The poisoned member trains with
        ``attack_spec`` targeted at its own index.
    n_jobs : int, optional
        Worker processes (the default is 1, train in-process).
    verbose : bool, optional
        Show a progress bar over members (the default is False).

    Returns
    -------
    ensemble : Ensemble
    """
    size = config.size
    poisoned = None
    if attack_spec is not None:
        poisoned = draw_poisoned_index(size, stream)
        logger.info('poisoning member %d of %d', poisoned, size)

    jobs = []
    for i, member_config in enumerate(config.members):
        member_stream = stream.substream('member{}/seed{}'.format(i, member_config.seed))
        spec = replace(attack_spec, target=poisoned) if i == poisoned else None
        jobs.append((env_factory, member_config, spec, member_stream, stream.substream('attack')))

    if n_jobs > 1:
        with ProcessPoolExecutor(max_workers=min(n_jobs, size)) as pool:
            futures = [pool.submit(_train_member, *job) for job in jobs]
            results = [f.result() for f in tqdm(futures, disable=not verbose)]
    else:
        results = [_train_member(*job) for job in tqdm(jobs, disable=not verbose)]

    return Ensemble([r.policy for r in results], poisoned, curves=[r.curve for r in results],
                    selection_seed=config.selection_seed)


def select_model(ensemble, stream):
    """Uniformly random active member; one draw from ``stream`` per call."""
    active = ensemble.active_indices
    if not active:
        raise NoActiveMemberError('every ensemble member has been pruned')
    return active[stream.integers(len(active))]


def ensemble_act(ensemble, state, stream):
    """Greedy action of a randomly selected member

    Returns
    -------
    action : int
    member : int
    """
    member = select_model(ensemble, stream)
    action, _, _ = act(ensemble.members[member], state, mode='greedy')
    return action, member


def prune(ensemble, member):
    """Deactivate ``member`` in place

    Returns
    -------
    status : PruneStatus
    """
    if not 0 <= member < len(ensemble):
        raise InvalidParameterError('member {} out of range for {} members'.format(member, len(ensemble)))
    if not ensemble.active[member]:
        logger.warning('member %d is already pruned', member)
        return PruneStatus.ALREADY_PRUNED
    if len(ensemble.active_indices) == 1:
        raise PruneError('refusing to prune member {}, the last active one'.format(member))
    ensemble.active[member] = False
    logger.info('pruned member %d, active %s', member, ensemble.active_indices)
    return PruneStatus.PRUNED


@dataclass
class EnsembleEvaluation:
    """MTD-mode evaluation: rates per episode plus per-member attribution."""
    mean: float
    std: float
    rates: np.ndarray
    usage: List[int]
    member_windows: Dict[int, np.ndarray] = field(default_factory=dict)


def evaluate_ensemble(ensemble, env_factory, episodes, stream, attack=None, window_length=25):
    """Greedy episodes where every step is answered by a randomly selected member

    Episode ``e`` uses ``stream.substream('episode<e>')`` like
    ``evaluate_policy``, so single policies and ensembles see the same arrivals.
    Selection draws from ``stream.substream('select/seed<selection_seed>')``.
    An ``attack`` only perturbs the steps its target member answers.
    """
    episodes = check_positive_int(episodes, 'episodes')
    window_length = check_positive_int(window_length, 'window_length')
    selection_stream = stream.substream('select/seed{}'.format(ensemble.selection_seed))
    rates = np.empty(episodes)
    usage = [0] * len(ensemble)
    attributed = {i: [] for i in range(len(ensemble))}
    for e in range(episodes):
        env = env_factory(stream.substream('episode{}'.format(e)))
        state = env.reset()
        history = []
        for _ in range(env.horizon):
            member = select_model(ensemble, selection_stream)
            if attack is not None and attack.applies_to(member):
                observed, executed = attack.intercept(state)
                action, _, _ = act(ensemble.members[member], env.encode(observed), mode='greedy')
                outcome = attack.step(env, action, executed)
            else:
                action, _, _ = act(ensemble.members[member], env.encode(state), mode='greedy')
                outcome = env.step(action)
            usage[member] += 1
            attributed[member].append(outcome)
            history.append(outcome)
            state = outcome.next_state
            if outcome.done:
                break
        rates[e] = admission_rate(history)

    member_windows = {}
    for i, outcomes in attributed.items():
        member_windows[i] = np.array([admission_rate(outcomes[left:right])
                                      for left, right in _window_idx_generator(window_length, len(outcomes))])
    return EnsembleEvaluation(float(rates.mean()), float(rates.std()), rates, usage, member_windows)
