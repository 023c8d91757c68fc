from ._topology import (VnfKind, VnfRequirement, DataCenterCapacity, Topology, TrafficModel,
                        make_topology, default_topology)
from ._placement import PlacementAssignment, PlacementRegistry, first_fit_decreasing, place_vnfs
from ._env import (EnvState, AdmissionAction, StepOutcome, SliceAdmissionEnv, EnvFactory,
                   admission_rate)
