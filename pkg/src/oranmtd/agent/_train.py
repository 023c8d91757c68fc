import logging
from dataclasses import dataclass, field
from typing import List

import numpy as np
from tqdm import tqdm

from .._utilities import _window_idx_generator, check_positive_int
from ..env import admission_rate
from ..numerics import RandomStream
from ._adam import Adam
from ._gae import Trajectory, compute_gae
from ._policy import TrainedPolicy, act
from ._update import PpoBatch, ppo_update

logger = logging.getLogger(__name__)


@dataclass
class LearningCurve:
    """Per-iteration training statistics; admission rates use true arrivals."""
    mean_reward: List[float] = field(default_factory=list)
    admission_rate: List[float] = field(default_factory=list)

    def __len__(self):
        return len(self.mean_reward)


@dataclass
class TrainingResult:
    policy: TrainedPolicy
    curve: LearningCurve
    diagnostics: list = field(default_factory=list)


@dataclass
class EvaluationResult:
    mean: float
    std: float
    rates: np.ndarray


def _observe(attack, state):
    """Observation handed to the agent and arrivals the environment executes."""
    if attack is None:
        return state, None
    return attack.intercept(state)


def _execute(env, action, attack, executed):
    if attack is None:
        return env.step(action)
    return attack.step(env, action, executed)


def collect_rollout(env, policy, state, length, stream, attack=None):
    """Run ``length`` sampled steps, resetting the environment at episode ends

    Returns
    -------
    trajectory : Trajectory
    state : EnvState
        State to resume from.
    outcomes : list of StepOutcome
    """
    states = []
    actions = []
    log_probs = []
    rewards = []
    values = []
    dones = []
    outcomes = []
    for _ in range(length):
        observed, executed = _observe(attack, state)
        x = env.encode(observed)
        action, log_prob, value = act(policy, x, stream, mode='sample')
        outcome = _execute(env, action, attack, executed)
        states.append(x)
        actions.append(action)
        log_probs.append(log_prob)
        rewards.append(outcome.reward)
        values.append(value)
        dones.append(outcome.done)
        outcomes.append(outcome)
        state = env.reset() if outcome.done else outcome.next_state

    bootstrap = 0.0 if dones[-1] else float(policy.critic.forward(env.encode(state))[0])
    trajectory = Trajectory(np.array(states), actions, log_probs, rewards, values, dones, bootstrap)
    return trajectory, state, outcomes


def train(env_factory, config, attack=None, stream=None, verbose=False):
    """Train one PPO actor-critic

    Parameters
    ----------
    env_factory : callable
        Maps a RandomStream to an environment exposing ``reset``, ``step``,
        ``encode``, ``observation_size`` and ``num_actions``.
    config : PolicyConfig
    attack : object, optional
        Exposes ``intercept(state) -> (observed_state, executed_arrivals)`` and
        ``step(env, action, executed_arrivals)``; applied to every training
        observation (the default is None, clean).
    stream : RandomStream, optional
        Root of the environment, initialization, action and shuffle streams
        (the default is a stream seeded with ``config.seed``).
    verbose : bool, optional
        Show a progress bar (the default is False).

    Returns
    -------
    result : TrainingResult
    """
    if stream is None:
        stream = RandomStream(config.seed)
    env = env_factory(stream.substream('env'))
    policy = TrainedPolicy.init(env.observation_size, env.num_actions, config, stream.substream('init'))
    action_stream = stream.substream('act')
    shuffle_stream = stream.substream('shuffle')
    optimizer = Adam(config.learning_rate)

    curve = LearningCurve()
    diagnostics = []
    state = env.reset()
    for iteration in tqdm(range(config.iterations), disable=not verbose):
        trajectory, state, outcomes = collect_rollout(env, policy, state, config.rollout_length,
                                                      action_stream, attack)
        advantages, returns = compute_gae(trajectory, config.gamma, config.gae_lambda)
        batch = PpoBatch(trajectory.states, trajectory.actions, trajectory.log_probs, advantages, returns)
        policy, update_stats = ppo_update(policy, batch, shuffle_stream, optimizer)

        curve.mean_reward.append(float(np.mean(trajectory.rewards)))
        curve.admission_rate.append(admission_rate(outcomes))
        diagnostics.append(update_stats)
        logger.debug('iteration %d: reward %.4f admission %.4f kl %.5f', iteration,
                     curve.mean_reward[-1], curve.admission_rate[-1], update_stats.approx_kl)

    if attack is not None:
        policy.poisoned = True
    return TrainingResult(policy, curve, diagnostics)


def _greedy_episode(policy, env, attack=None, num_steps=None):
    state = env.reset()
    history = []
    for _ in range(env.horizon if num_steps is None else num_steps):
        observed, executed = _observe(attack, state)
        action, _, _ = act(policy, env.encode(observed), mode='greedy')
        outcome = _execute(env, action, attack, executed)
        history.append(outcome)
        state = env.reset() if outcome.done and num_steps is not None else outcome.next_state
        if outcome.done and num_steps is None:
            break
    return history


def evaluate_policy(policy, env_factory, episodes, stream, attack=None):
    """Greedy admission rate over ``episodes`` independent episodes

    Episode ``e`` runs on ``stream.substream('episode<e>')``, so two policies
    evaluated with the same stream see the same arrivals.

    Returns
    -------
    result : EvaluationResult
        Mean and population std of the per-episode admission rates.
    """
    episodes = check_positive_int(episodes, 'episodes')
    rates = np.empty(episodes)
    for e in range(episodes):
        env = env_factory(stream.substream('episode{}'.format(e)))
        rates[e] = admission_rate(_greedy_episode(policy, env, attack))
    return EvaluationResult(float(rates.mean()), float(rates.std()), rates)


def evaluate_windows(policy, env_factory, num_windows, window_length, stream, attack=None):
    """Admission rate per consecutive window of greedy steps."""
    num_windows = check_positive_int(num_windows, 'num_windows')
    window_length = check_positive_int(window_length, 'window_length')
    env = env_factory(stream)
    history = _greedy_episode(policy, env, attack, num_steps=num_windows * window_length)
    return np.array([admission_rate(history[left:right])
                     for left, right in _window_idx_generator(window_length, len(history))])
