import logging
import math
from dataclasses import dataclass, replace
from typing import Optional

from .._utilities import check_finite_real
from ..errors import InvalidParameterError
from ..numerics import sample_uniform

logger = logging.getLogger(__name__)

ATTACK_MODES = ('intercepted', 'blocked', 'observation_only')


@dataclass(frozen=True)
class AttackSpec:
    """Weak black-box poisoning attack on arrival observations

    Attributes:
        probability(float):
            Chance that a given step is attacked, in [0, 1].
        target(int or None):
            Poisoned ensemble member. ``train_ensemble`` sets it on the member it
            poisons; evaluation only perturbs the steps this member answers.
            None attacks every step.
        mode(str):
            'intercepted' makes the environment execute the perturbed arrivals
            and charges the failure penalty when an admitted service lost
            requests; 'blocked' executes the perturbed arrivals with the
            genuine reward; 'observation_only' only shows them to the agent.
        eval_time(bool):
            Also perturb observations while evaluating.
        seed(int):
            Labels the attack substream, so two seeds give independent
            attack schedules under one master seed.
    """
    probability: float = 0.9
    target: Optional[int] = None
    mode: str = 'intercepted'
    eval_time: bool = False
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= check_finite_real(self.probability, 'probability') <= 1.0:
            raise InvalidParameterError('attack probability must lie in [0, 1], got {}'.format(self.probability))
        if self.mode not in ATTACK_MODES:
            raise InvalidParameterError('attack mode must be one of {}, got {!r}'.format(ATTACK_MODES, self.mode))
        if self.target is not None and (isinstance(self.target, bool) or self.target < 0):
            raise InvalidParameterError('attack target must be a member index, got {!r}'.format(self.target))
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise InvalidParameterError('attack seed must be a nonnegative integer, got {!r}'.format(self.seed))


def _perturb_count(count, stream):
    """Nearest integer of Uniform(0, count); never exceeds ``count``."""
    return min(int(math.floor(sample_uniform(stream, 0.0, float(count)) + 0.5)), count)


def perturb_observation(state, spec, stream):
    """Replace the arrival counts of ``state`` with attacker-chosen ones

    One Bernoulli(p) draw decides the step; an attacked step then draws one
    uniform per service. Remaining and free memory are left untouched.

    Returns
    -------
    state : EnvState
    attacked : bool
    """
    if not stream.bernoulli(spec.probability):
        return state, False
    arrivals = tuple(_perturb_count(c, stream) for c in state.arrivals)
    return replace(state, arrivals=arrivals), True


def induced_step(env, action, perturbed_state, charge_blocked=False):
    """Execute ``action`` on the perturbed arrival flow; the rest is blocked."""
    return env.step(action, arrivals=perturbed_state.arrivals, charge_blocked=charge_blocked)


def induced_reward(env, action, perturbed_state, charge_blocked=False):
    """Environment reward of the perturbed flow

    Without ``charge_blocked`` this is the genuine reward; with it, admitting
    a service that lost requests costs the failure penalty.
    """
    return induced_step(env, action, perturbed_state, charge_blocked).reward


class PoisoningAttack(object):
    """Attack hook handed to ``train`` and the evaluation loops

    Reads observations only. Owns its stream, so with ``probability == 0``
    the agent and environment streams are consumed exactly as without it.

    Parameters
    ----------
    spec : AttackSpec
    stream : RandomStream
    """

    def __init__(self, spec, stream):
        self.spec = spec
        self.stream = stream
        self.steps = 0
        self.attacked_steps = 0

    @classmethod
    def seeded(cls, spec, stream):
        """Hook drawing from the ``attack/seed<spec.seed>`` substream of ``stream``."""
        return cls(spec, stream.substream('attack/seed{}'.format(spec.seed)))

    @property
    def charges_blocked(self):
        return self.spec.mode == 'intercepted'

    def applies_to(self, member):
        """Whether steps answered by ensemble ``member`` are attacked."""
        return self.spec.target is None or member == self.spec.target

    def intercept(self, state):
        """Observation the agent sees and arrivals the environment executes

        Returns
        -------
        observed : EnvState
        executed : tuple of int or None
            None means the sampled arrivals.
        """
        observed, attacked = perturb_observation(state, self.spec, self.stream)
        self.steps += 1
        if not attacked:
            return observed, None
        self.attacked_steps += 1
        if self.spec.mode == 'observation_only':
            return observed, None
        return observed, observed.arrivals

    def step(self, env, action, executed):
        """``env.step`` on the executed arrivals, charging blocked ones in intercepted mode."""
        if executed is None:
            return env.step(action)
        return env.step(action, arrivals=executed, charge_blocked=self.charges_blocked)

    @property
    def attack_fraction(self):
        return self.attacked_steps / self.steps if self.steps else 0.0

    def __repr__(self):
        return 'PoisoningAttack(p={}, mode={!r}, target={}, attacked {}/{})'.format(
            self.spec.probability, self.spec.mode, self.spec.target, self.attacked_steps, self.steps)
