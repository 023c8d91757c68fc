from dataclasses import dataclass, replace

import numpy as np
import pytest

from oranmtd.agent import PolicyConfig
from oranmtd.env import StepOutcome, make_topology
from oranmtd.harness import default_config
from oranmtd.numerics import RandomStream


@dataclass(frozen=True)
class BanditState:
    time_step: int


class BanditEnv(object):
    """One-state, two-armed bandit speaking the environment protocol: arm 1 pays 1, arm 0 pays 0.

    Pulling arm 1 counts as an admission, so ``admission_rate`` is the share
    of arm-1 pulls.
    """
    observation_size = 1
    num_actions = 2
    horizon = 1

    def __init__(self, stream):
        self.stream = stream
        self.state = None

    def reset(self):
        self.state = BanditState(0)
        return self.state

    def encode(self, state):
        return np.ones(1)

    def step(self, action, arrivals=None):
        good = int(action == 1)
        next_state = BanditState(self.state.time_step + 1)
        self.state = next_state
        return StepOutcome(float(good), (good,), (1 - good,), (0,), False, next_state, True)


@pytest.fixture
def stream():
    return RandomStream(0)


@pytest.fixture
def bandit_factory():
    return BanditEnv


@pytest.fixture
def bandit_config():
    return PolicyConfig(hidden_sizes=(), learning_rate=1e-2, rollout_length=64, minibatch_size=32,
                        iterations=100, entropy_coef=0.0, seed=3)


@pytest.fixture
def tiny_policy_config():
    return PolicyConfig(hidden_sizes=(8,), rollout_length=64, minibatch_size=32, epochs=2, iterations=2)


@pytest.fixture
def ample_topology():
    return make_topology([(6, 4), (3, 2)], [10 ** 9, 10 ** 9])


@pytest.fixture
def tiny_config(tiny_policy_config):
    """Seconds-scale experiment: short horizon, two grid points, one seed."""
    config = default_config()
    return replace(
        config,
        env=replace(config.env, horizon=20),
        policy=tiny_policy_config,
        sweep=replace(config.sweep, arrival_rates=(2.0, 12.0), departure_rates=(0.2, 0.5), seeds=1, episodes=2),
        detection=replace(config.detection, num_windows=8, window_length=10),
    )
