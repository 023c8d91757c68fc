from dataclasses import dataclass

import numpy as np
from numba import njit

from ..errors import InvalidParameterError, NumericalError


@dataclass
class Trajectory:
    """One rollout: per-step arrays of equal length plus the bootstrap value."""
    states: np.ndarray
    actions: np.ndarray
    log_probs: np.ndarray
    rewards: np.ndarray
    values: np.ndarray
    dones: np.ndarray
    bootstrap_value: float = 0.0

    def __post_init__(self):
        self.states = np.atleast_2d(np.asarray(self.states, dtype=np.float64))
        self.actions = np.asarray(self.actions, dtype=np.int64)
        self.log_probs = np.asarray(self.log_probs, dtype=np.float64)
        self.rewards = np.asarray(self.rewards, dtype=np.float64)
        self.values = np.asarray(self.values, dtype=np.float64)
        self.dones = np.asarray(self.dones, dtype=np.bool_)
        lengths = {len(self.states), len(self.actions), len(self.log_probs), len(self.rewards),
                   len(self.values), len(self.dones)}
        if len(lengths) != 1:
            raise InvalidParameterError('trajectory sequences differ in length: {}'.format(sorted(lengths)))
        if not np.all(np.isfinite(self.log_probs)):
            raise NumericalError('trajectory log-probabilities are not finite')

    def __len__(self):
        return len(self.rewards)


@njit
def _gae_kernel(rewards, values, dones, bootstrap_value, gamma, gae_lambda):
    num_steps = rewards.shape[0]
    advantages = np.zeros(num_steps)
    next_value = bootstrap_value
    next_advantage = 0.0
    for t in range(num_steps - 1, -1, -1):
        not_done = 0.0 if dones[t] else 1.0
        delta = rewards[t] + gamma * next_value * not_done - values[t]
        next_advantage = delta + gamma * gae_lambda * not_done * next_advantage
        advantages[t] = next_advantage
        next_value = values[t]
    return advantages


def compute_gae(trajectory, gamma, gae_lambda):
    """Generalized advantage estimates and return targets

    Parameters
    ----------
    trajectory : Trajectory
    gamma : float
        Discount.
    gae_lambda : float
        Exponential weight of the TD residuals.

    Returns
    -------
    advantages : numpy.ndarray
    returns : numpy.ndarray
        ``advantages + values``.
    """
    advantages = _gae_kernel(trajectory.rewards, trajectory.values, trajectory.dones,
                             float(trajectory.bootstrap_value), float(gamma), float(gae_lambda))
    return advantages, advantages + trajectory.values
