from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..errors import InvariantError


@dataclass(frozen=True)
class PlacementAssignment:
    """One admitted slice instance and where each of its VNFs lives."""
    service: int
    instance_id: int
    data_centers: Tuple[int, ...]
    memory: Tuple[int, ...]
    remaining_time: float


def first_fit_decreasing(free_memory, memories):
    """Assign items to bins, largest item first, bins in index order

    Parameters
    ----------
    free_memory : sequence of int
        Free memory of every data center.
    memories : sequence of int
        Memory of every VNF.

    Returns
    -------
    data_centers : tuple of int or None
        Data center of every VNF (in the order of ``memories``), or None when
        first-fit-decreasing finds no room for some VNF.
    """
    free = [int(f) for f in free_memory]
    order = sorted(range(len(memories)), key=lambda m: (-memories[m], m))
    assigned = [0] * len(memories)
    for m in order:
        for n in range(len(free)):
            if free[n] >= memories[m]:
                assigned[m] = n
                free[n] -= memories[m]
                break
        else:
            return None
    return tuple(assigned)


class PlacementRegistry(object):
    """Active slice instances and the memory they hold per data center."""

    __slots__ = ('capacities', 'used', 'active', 'next_id')

    def __init__(self, capacities):
        self.capacities = np.asarray(capacities, dtype=np.int64).copy()
        self.used = np.zeros_like(self.capacities)
        self.active = {}
        self.next_id = 0

    @property
    def free_memory(self):
        return self.capacities - self.used

    @property
    def remaining_memory(self):
        return int(self.capacities.sum() - self.used.sum())

    def commit(self, assignment):
        for n, mem in zip(assignment.data_centers, assignment.memory):
            self.used[n] += mem
        self.active[assignment.instance_id] = assignment
        self.next_id = max(self.next_id, assignment.instance_id + 1)

    def tick(self):
        """Age every instance by one step and release the expired ones."""
        departed = []
        for instance_id, assignment in list(self.active.items()):
            remaining = assignment.remaining_time - 1.0
            if remaining <= 0.0:
                for n, mem in zip(assignment.data_centers, assignment.memory):
                    self.used[n] -= mem
                del self.active[instance_id]
                departed.append(assignment)
            else:
                self.active[instance_id] = PlacementAssignment(
                    assignment.service, instance_id, assignment.data_centers, assignment.memory, remaining)
        return departed

    def check_invariant(self):
        recomputed = np.zeros_like(self.capacities)
        for assignment in self.active.values():
            for n, mem in zip(assignment.data_centers, assignment.memory):
                recomputed[n] += mem
        if not np.array_equal(recomputed, self.used):
            raise InvariantError('placement registry memory {} disagrees with active instances {}'.format(
                self.used.tolist(), recomputed.tolist()))
        if np.any(self.used > self.capacities) or np.any(self.used < 0):
            raise InvariantError('data center memory out of bounds: used {} of {}'.format(
                self.used.tolist(), self.capacities.tolist()))


def place_vnfs(registry, topology, service) -> Optional[PlacementAssignment]:
    """First-fit-decreasing placement of one instance of ``service``

    Nothing is committed; infeasibility is returned as None.

    Examples
    --------
    >>> registry = PlacementRegistry([5, 5])
    >>> place_vnfs(registry, make_topology([(4, 4)], [5, 5]), 0).data_centers
    (0, 1)
    """
    memories = topology.slice_memory(service)
    data_centers = first_fit_decreasing(registry.free_memory, memories)
    if data_centers is None:
        return None
    return PlacementAssignment(service, registry.next_id, data_centers, memories, 0.0)
