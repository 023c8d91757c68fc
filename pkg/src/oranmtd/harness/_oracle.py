from dataclasses import dataclass
from itertools import product
from typing import Tuple

import numpy as np

from .._utilities import admission_ratio, check_positive_int
from ..env import AdmissionAction, EnvState, first_fit_decreasing
from ..errors import InvalidParameterError, OracleSizeError

MAX_ORACLE_REQUESTS = 20


@dataclass(frozen=True)
class TraceEvent:
    """One request of ``service`` arriving at ``step`` and holding for ``holding_steps``

    The instance occupies memory during steps ``[step, step + holding_steps)``.
    """
    step: int
    service: int
    holding_steps: int

    def __post_init__(self):
        if self.step < 0 or self.service < 0:
            raise InvalidParameterError('trace step and service must be nonnegative: {}'.format(self))
        check_positive_int(self.holding_steps, 'holding_steps')


@dataclass(frozen=True)
class OracleResult:
    admitted: int
    offered: int
    decisions: Tuple[bool, ...]

    @property
    def rate(self):
        return admission_ratio(self.admitted, self.offered)


def _sorted_trace(topology, trace, horizon):
    horizon = check_positive_int(horizon, 'horizon')
    for event in trace:
        if event.step >= horizon:
            raise InvalidParameterError('event {} lies beyond the horizon {}'.format(event, horizon))
        if event.service >= topology.num_services:
            raise InvalidParameterError('event {} names an unknown service'.format(event))
    return sorted(trace, key=lambda e: e.step)


def _used_at(placed, step, num_dcs):
    used = np.zeros(num_dcs, dtype=np.int64)
    for event, placement in placed:
        if event.step <= step < event.step + event.holding_steps:
            for n, mem in placement:
                used[n] += mem
    return used


def exact_admission_oracle(topology, trace, horizon):
    """Most requests any admission and placement policy can accept on ``trace``

    Depth-first branch and bound over admit/reject and every VNF to data
    center assignment, in arrival order, against per-data-center memory at
    every step. A branch is cut once the requests admitted so far plus the
    requests still to come cannot beat the best complete schedule.

    Parameters
    ----------
    topology : Topology
    trace : list of TraceEvent
        At most ``MAX_ORACLE_REQUESTS`` events.
    horizon : int

    Returns
    -------
    result : OracleResult
    """
    if len(trace) > MAX_ORACLE_REQUESTS:
        raise OracleSizeError('the exact oracle handles at most {} requests, got {}'.format(
            MAX_ORACLE_REQUESTS, len(trace)))
    events = _sorted_trace(topology, trace, horizon)
    capacities = topology.capacities
    num_dcs = topology.num_data_centers
    best = {'admitted': -1, 'decisions': ()}

    def search(k, placed, decisions):
        admitted = len(placed)
        if admitted + len(events) - k <= best['admitted']:
            return
        if k == len(events):
            best['admitted'] = admitted
            best['decisions'] = tuple(decisions)
            return
        event = events[k]
        memories = topology.slice_memory(event.service)
        free = capacities - _used_at(placed, event.step, num_dcs)
        seen = set()
        for assignment in product(range(num_dcs), repeat=len(memories)):
            demand = np.zeros(num_dcs, dtype=np.int64)
            for n, mem in zip(assignment, memories):
                demand[n] += mem
            key = tuple(demand)
            if key in seen or np.any(demand > free):
                continue
            seen.add(key)
            search(k + 1, placed + [(event, tuple(zip(assignment, memories)))], decisions + [True])
        search(k + 1, placed, decisions + [False])

    search(0, [], [])
    return OracleResult(best['admitted'], len(events), best['decisions'])


def first_fit_admissions(topology, trace, horizon):
    """Admissions of the admit-everything first-fit-decreasing policy on ``trace``."""
    events = _sorted_trace(topology, trace, horizon)
    placed = []
    decisions = []
    for event in events:
        free = topology.capacities - _used_at(placed, event.step, topology.num_data_centers)
        memories = topology.slice_memory(event.service)
        assignment = first_fit_decreasing(free, memories)
        if assignment is None:
            decisions.append(False)
            continue
        placed.append((event, tuple(zip(assignment, memories))))
        decisions.append(True)
    return OracleResult(len(placed), len(events), tuple(decisions))


def replay_admissions(topology, trace, horizon, decide):
    """Admissions of a per-step admission controller replayed on ``trace``

    At every step with arrivals, ``decide`` receives an EnvState carrying that
    step's arrival counts and the memory left by earlier admissions, and
    returns an action index or AdmissionAction. Requests of admitted services
    are placed first-fit-decreasing in arrival order; after a service's first
    infeasible request its remaining requests of that step are rejected, as in
    the environment.

    Returns
    -------
    result : OracleResult
        Decisions follow the step-sorted trace.
    """
    events = _sorted_trace(topology, trace, horizon)
    capacities = topology.capacities
    num_dcs = topology.num_data_centers
    num_services = topology.num_services
    placed = []
    decisions = []
    for step in range(horizon):
        arriving = [e for e in events if e.step == step]
        if not arriving:
            continue
        free = capacities - _used_at(placed, step, num_dcs)
        arrivals = tuple(sum(e.service == s for e in arriving) for s in range(num_services))
        action = decide(EnvState(step, int(free.sum()), arrivals, tuple(int(f) for f in free)))
        if not isinstance(action, AdmissionAction):
            action = AdmissionAction.from_index(action, num_services)
        failed = set()
        for event in arriving:
            if not action.admit[event.service] or event.service in failed:
                decisions.append(False)
                continue
            free = capacities - _used_at(placed, step, num_dcs)
            memories = topology.slice_memory(event.service)
            assignment = first_fit_decreasing(free, memories)
            if assignment is None:
                failed.add(event.service)
                decisions.append(False)
                continue
            placed.append((event, tuple(zip(assignment, memories))))
            decisions.append(True)
    return OracleResult(len(placed), len(events), tuple(decisions))


def random_trace(topology, stream, max_requests=8, horizon=6, max_holding=4):
    """Small seeded trace: 1..max_requests events, uniform steps, services and holding times."""
    num_events = 1 + stream.integers(check_positive_int(max_requests, 'max_requests'))
    events = [TraceEvent(stream.integers(horizon), stream.integers(topology.num_services),
                         1 + stream.integers(max_holding)) for _ in range(num_events)]
    return sorted(events, key=lambda e: e.step)
