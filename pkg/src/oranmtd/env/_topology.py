from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np

from .._utilities import check_finite_real
from ..errors import InvalidParameterError


class VnfKind(str, Enum):
    O_DU = 'O-DU'
    O_CU = 'O-CU'


@dataclass(frozen=True)
class VnfRequirement:
    """Resources one VNF of a slice needs.

    Only ``memory`` takes part in feasibility; cpu, storage and bandwidth are
    carried for completeness and assumed plentiful.
    """
    kind: VnfKind
    memory: int
    cpu: float = 0.0
    storage: float = 0.0
    bandwidth: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, 'kind', VnfKind(self.kind))
        if isinstance(self.memory, bool) or not isinstance(self.memory, (int, np.integer)) or self.memory <= 0:
            raise InvalidParameterError('VNF memory must be a positive integer, got {!r}'.format(self.memory))
        for name in ('cpu', 'storage', 'bandwidth'):
            if check_finite_real(getattr(self, name), name) < 0:
                raise InvalidParameterError('VNF {} must be nonnegative'.format(name))


@dataclass(frozen=True)
class DataCenterCapacity:
    id: int
    memory_capacity: int

    def __post_init__(self):
        if isinstance(self.memory_capacity, bool) or not isinstance(self.memory_capacity, (int, np.integer)) \
                or self.memory_capacity <= 0:
            raise InvalidParameterError(
                'data center {} capacity must be a positive integer, got {!r}'.format(self.id, self.memory_capacity))


@dataclass(frozen=True)
class Topology:
    """Static resource model: the VNFs of every slice and the data centers.

    All services have the same priority.
    """
    vnfs_per_slice: Tuple[Tuple[VnfRequirement, ...], ...]
    data_centers: Tuple[DataCenterCapacity, ...]

    def __post_init__(self):
        object.__setattr__(self, 'vnfs_per_slice', tuple(tuple(vnfs) for vnfs in self.vnfs_per_slice))
        object.__setattr__(self, 'data_centers', tuple(self.data_centers))
        if not self.vnfs_per_slice:
            raise InvalidParameterError('a topology needs at least one service')
        if not self.data_centers:
            raise InvalidParameterError('a topology needs at least one data center')
        for s, vnfs in enumerate(self.vnfs_per_slice):
            kinds = {vnf.kind for vnf in vnfs}
            if VnfKind.O_DU not in kinds or VnfKind.O_CU not in kinds:
                raise InvalidParameterError('slice {} needs at least one O-DU and one O-CU VNF'.format(s))
        for n, dc in enumerate(self.data_centers):
            if dc.id != n:
                raise InvalidParameterError('data center ids must equal their index, got {} at {}'.format(dc.id, n))

    @property
    def num_services(self):
        return len(self.vnfs_per_slice)

    @property
    def num_data_centers(self):
        return len(self.data_centers)

    @property
    def capacities(self):
        return np.array([dc.memory_capacity for dc in self.data_centers], dtype=np.int64)

    @property
    def total_capacity(self):
        return int(sum(dc.memory_capacity for dc in self.data_centers))

    def slice_memory(self, service):
        """Memory of every VNF of ``service``, in slice order."""
        return tuple(int(vnf.memory) for vnf in self.vnfs_per_slice[service])


def make_topology(slice_memories, dc_capacities):
    """Build a topology from ``[(o_du, o_cu), ...]`` memories and capacities."""
    vnfs = []
    for du, cu in slice_memories:
        vnfs.append((VnfRequirement(VnfKind.O_DU, int(du)), VnfRequirement(VnfKind.O_CU, int(cu))))
    dcs = [DataCenterCapacity(n, int(c)) for n, c in enumerate(dc_capacities)]
    return Topology(tuple(vnfs), tuple(dcs))


def default_topology():
    """Two services over two 50-unit data centers (A: 6 + 4, B: 3 + 2)."""
    return make_topology([(6, 4), (3, 2)], [50, 50])


@dataclass(frozen=True)
class TrafficModel:
    """Per-service Poisson arrival rates and exponential departure rates, per step."""
    arrival_rate: Tuple[float, ...]
    departure_rate: Tuple[float, ...]

    def __post_init__(self):
        arrival = tuple(check_finite_real(lam, 'arrival_rate') for lam in self.arrival_rate)
        departure = tuple(check_finite_real(mu, 'departure_rate') for mu in self.departure_rate)
        if len(arrival) != len(departure) or not arrival:
            raise InvalidParameterError('arrival and departure rates need one entry per service')
        if any(lam < 0 for lam in arrival):
            raise InvalidParameterError('arrival rates must be nonnegative, got {}'.format(arrival))
        if any(mu <= 0 for mu in departure):
            raise InvalidParameterError('departure rates must be positive, got {}'.format(departure))
        object.__setattr__(self, 'arrival_rate', arrival)
        object.__setattr__(self, 'departure_rate', departure)

    @classmethod
    def uniform(cls, arrival_rate, departure_rate, num_services=2):
        return cls((arrival_rate,) * num_services, (departure_rate,) * num_services)

    @property
    def num_services(self):
        return len(self.arrival_rate)
