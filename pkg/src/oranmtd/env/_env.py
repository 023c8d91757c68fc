from dataclasses import dataclass, replace
from typing import Tuple

import numpy as np

from .._utilities import admission_ratio, check_positive_int
from ..errors import InvalidParameterError, InvariantError
from ..numerics import sample_exponential, sample_poisson
from ._placement import PlacementRegistry, place_vnfs


@dataclass(frozen=True)
class EnvState:
    """What the admission controller observes at the start of a step."""
    time_step: int
    remaining_memory: int
    arrivals: Tuple[int, ...]
    free_memory: Tuple[int, ...]


@dataclass(frozen=True)
class AdmissionAction:
    """Admit flag per service; action ``index`` has bit ``s`` set iff service ``s`` is admitted."""
    admit: Tuple[bool, ...]

    @classmethod
    def from_index(cls, index, num_services):
        index = int(index)
        if not 0 <= index < 2 ** num_services:
            raise InvalidParameterError('action index must be in [0, {}), got {}'.format(2 ** num_services, index))
        return cls(tuple(bool(index >> s & 1) for s in range(num_services)))

    @property
    def index(self):
        return int(sum(1 << s for s, flag in enumerate(self.admit) if flag))


@dataclass(frozen=True)
class StepOutcome:
    """Result of one environment step.

    ``admitted + rejected`` equals the arrivals that reached admission;
    ``blocked`` are arrivals an attacker kept from reaching it. ``charged``
    marks a step whose admitted service lost requests to the attacker and
    was paid the failure penalty.
    """
    reward: float
    admitted: Tuple[int, ...]
    rejected: Tuple[int, ...]
    blocked: Tuple[int, ...]
    overflow: bool
    next_state: EnvState
    done: bool
    charged: bool = False

    @property
    def arrivals(self):
        return tuple(a + r for a, r in zip(self.admitted, self.rejected))

    @property
    def offered(self):
        return tuple(a + r + b for a, r, b in zip(self.admitted, self.rejected, self.blocked))


def admission_rate(history):
    """Admitted over offered requests across a list of StepOutcome

    Blocked arrivals count as offered, so an attacker that hides requests
    lowers the rate. Returns 1.0 when nothing arrived.
    """
    if not history:
        raise InvalidParameterError('admission_rate needs at least one step outcome')
    admitted = sum(sum(outcome.admitted) for outcome in history)
    offered = sum(sum(outcome.offered) for outcome in history)
    return admission_ratio(admitted, offered)


class SliceAdmissionEnv(object):
    """Discrete-time two-service slice admission over memory-limited data centers

    Each step: (1) active instances age by one step and expired ones release
    memory; (2) the arrivals of every admitted service are placed
    first-fit-decreasing, interleaved round-robin across services, until a
    service's first infeasible placement, after which its remaining arrivals
    are rejected and the overflow flag is set; (3) the reward is computed;
    (4) the next arrivals are drawn.

    Parameters
    ----------
    topology : Topology
    traffic : TrafficModel
    stream : RandomStream
        Arrivals and holding times come from two substreams of it.
    horizon : int, optional
        Episode length in steps (the default is 200).
    reward_weights : tuple, optional
        ``(w1, w2)`` weights of the admission ratio and free-memory fraction
        (the default is (1.0, 0.1)).
    overflow_penalty : float, optional
        Reward of a step whose admission exceeded capacity or was charged for
        blocked arrivals (the default is -1.0).
    arrival_scale : float, optional
        Divides arrival counts in the encoded state (the default is 30.0).
    per_dc_state : bool, optional
        Encode free memory per data center instead of the aggregate
        (the default is False).
    """

    def __init__(self, topology, traffic, stream, horizon=200, reward_weights=(1.0, 0.1),
                 overflow_penalty=-1.0, arrival_scale=30.0, per_dc_state=False):
        if traffic.num_services != topology.num_services:
            raise InvalidParameterError('traffic has {} services, topology {}'.format(
                traffic.num_services, topology.num_services))
        self.topology = topology
        self.traffic = traffic
        self.horizon = check_positive_int(horizon, 'horizon')
        self.reward_weights = tuple(float(w) for w in reward_weights)
        self.overflow_penalty = float(overflow_penalty)
        self.arrival_scale = float(arrival_scale)
        self.per_dc_state = per_dc_state
        self._arrival_stream = stream.substream('arrivals')
        self._holding_stream = stream.substream('holding')
        self.registry = None
        self.state = None

    @property
    def num_services(self):
        return self.topology.num_services

    @property
    def num_actions(self):
        return 2 ** self.num_services

    @property
    def observation_size(self):
        memory_terms = self.topology.num_data_centers if self.per_dc_state else 1
        return memory_terms + self.num_services

    @property
    def total_capacity(self):
        return self.topology.total_capacity

    def _sample_arrivals(self):
        return tuple(sample_poisson(self._arrival_stream, lam) for lam in self.traffic.arrival_rate)

    def _make_state(self, time_step, arrivals):
        return EnvState(time_step, self.registry.remaining_memory, arrivals,
                        tuple(int(f) for f in self.registry.free_memory))

    def reset(self):
        """Empty every data center and draw the arrivals of step 0."""
        self.registry = PlacementRegistry(self.topology.capacities)
        self.state = self._make_state(0, self._sample_arrivals())
        return self.state

    def encode(self, state):
        """Normalized observation vector fed to the policy."""
        if self.per_dc_state:
            capacities = self.topology.capacities
            memory = [f / c for f, c in zip(state.free_memory, capacities)]
        else:
            memory = [state.remaining_memory / self.total_capacity]
        arrivals = [a / self.arrival_scale for a in state.arrivals]
        return np.array(memory + arrivals, dtype=np.float64)

    def _as_action(self, action):
        if isinstance(action, AdmissionAction):
            if len(action.admit) != self.num_services:
                raise InvalidParameterError('action has {} flags, expected {}'.format(
                    len(action.admit), self.num_services))
            return action
        if isinstance(action, (int, np.integer)):
            return AdmissionAction.from_index(action, self.num_services)
        return self._as_action(AdmissionAction(tuple(bool(a) for a in action)))

    def _check_executed(self, arrivals):
        sampled = self.state.arrivals
        executed = tuple(int(a) for a in arrivals)
        if len(executed) != len(sampled) or any(e < 0 or e > s for e, s in zip(executed, sampled)):
            raise InvalidParameterError('executed arrivals {} must lie between 0 and the sampled {}'.format(
                executed, sampled))
        return executed

    def step(self, action, arrivals=None, charge_blocked=False):
        """Advance one step

        Parameters
        ----------
        action : int, AdmissionAction or sequence of bool
        arrivals : sequence of int, optional
            Arrival counts that actually reach admission, componentwise at
            most the sampled ones; the difference is reported as blocked
            (the default is None, all sampled arrivals).
        charge_blocked : bool, optional
            Treat an admitted service with blocked arrivals as a failed
            admission and pay ``overflow_penalty`` (the default is False).

        Returns
        -------
        outcome : StepOutcome
        """
        if self.state is None:
            raise InvariantError('reset() must be called before step()')
        action = self._as_action(action)
        sampled = self.state.arrivals
        executed = sampled if arrivals is None else self._check_executed(arrivals)
        num_services = self.num_services

        self.registry.tick()

        admitted = [0] * num_services
        rejected = [0] * num_services
        pending = [0] * num_services
        for s in range(num_services):
            if action.admit[s]:
                pending[s] = executed[s]
            else:
                rejected[s] = executed[s]

        overflow = False
        start = self.state.time_step % num_services
        while any(pending):
            for k in range(num_services):
                s = (start + k) % num_services
                if pending[s] == 0:
                    continue
                assignment = place_vnfs(self.registry, self.topology, s)
                if assignment is None:
                    overflow = True
                    rejected[s] += pending[s]
                    pending[s] = 0
                    continue
                holding = sample_exponential(self._holding_stream, self.traffic.departure_rate[s])
                self.registry.commit(replace(assignment, remaining_time=holding))
                admitted[s] += 1
                pending[s] -= 1

        self.registry.check_invariant()

        charged = charge_blocked and any(action.admit[s] and executed[s] < sampled[s]
                                         for s in range(num_services))
        if overflow or charged:
            reward = self.overflow_penalty
        else:
            w1, w2 = self.reward_weights
            ratio = admission_ratio(sum(admitted), sum(executed))
            reward = w1 * ratio + w2 * self.registry.remaining_memory / self.total_capacity

        next_time = self.state.time_step + 1
        self.state = self._make_state(next_time, self._sample_arrivals())
        blocked = tuple(s - e for s, e in zip(sampled, executed))
        return StepOutcome(float(reward), tuple(admitted), tuple(rejected), blocked, overflow,
                           self.state, next_time >= self.horizon, charged)


@dataclass(frozen=True)
class EnvFactory:
    """Picklable recipe for environments that differ only in their stream."""
    topology: object
    traffic: object
    horizon: int = 200
    reward_weights: Tuple[float, float] = (1.0, 0.1)
    overflow_penalty: float = -1.0
    arrival_scale: float = 30.0
    per_dc_state: bool = False

    def __call__(self, stream):
        return SliceAdmissionEnv(self.topology, self.traffic, stream, horizon=self.horizon,
                                 reward_weights=self.reward_weights, overflow_penalty=self.overflow_penalty,
                                 arrival_scale=self.arrival_scale, per_dc_state=self.per_dc_state)

    def with_traffic(self, traffic):
        return replace(self, traffic=traffic)
