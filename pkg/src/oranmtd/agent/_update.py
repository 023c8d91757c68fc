from dataclasses import dataclass

import numpy as np

from ..errors import InvalidParameterError, NumericalError
from ._adam import Adam
from ._policy import log_softmax

_ADVANTAGE_STD_FLOOR = 1e-8


@dataclass
class PpoBatch:
    """Flattened rollout data a PPO update consumes."""
    states: np.ndarray
    actions: np.ndarray
    old_log_probs: np.ndarray
    advantages: np.ndarray
    returns: np.ndarray

    def __post_init__(self):
        self.states = np.atleast_2d(np.asarray(self.states, dtype=np.float64))
        self.actions = np.asarray(self.actions, dtype=np.int64)
        self.old_log_probs = np.asarray(self.old_log_probs, dtype=np.float64)
        self.advantages = np.asarray(self.advantages, dtype=np.float64)
        self.returns = np.asarray(self.returns, dtype=np.float64)
        lengths = {len(self.states), len(self.actions), len(self.old_log_probs),
                   len(self.advantages), len(self.returns)}
        if len(lengths) != 1:
            raise InvalidParameterError('batch sequences differ in length: {}'.format(sorted(lengths)))

    def __len__(self):
        return len(self.actions)

    def subset(self, idx):
        return PpoBatch(self.states[idx], self.actions[idx], self.old_log_probs[idx],
                        self.advantages[idx], self.returns[idx])


@dataclass
class UpdateDiagnostics:
    policy_loss: float
    value_loss: float
    entropy: float
    approx_kl: float
    clip_fraction: float
    num_steps: int


def normalize_advantages(advantages):
    advantages = np.asarray(advantages, dtype=np.float64)
    if advantages.size == 0:
        return advantages
    return (advantages - advantages.mean()) / max(advantages.std(), _ADVANTAGE_STD_FLOOR)


def clipped_surrogate(ratio, advantages, clip_ratio):
    """Per-sample ``min(r A, clip(r, 1-eps, 1+eps) A)``."""
    ratio = np.asarray(ratio, dtype=np.float64)
    advantages = np.asarray(advantages, dtype=np.float64)
    return np.minimum(ratio * advantages, np.clip(ratio, 1.0 - clip_ratio, 1.0 + clip_ratio) * advantages)


def ppo_loss_and_grad(policy, batch):
    """Clipped PPO loss and its gradient with respect to ``policy.get_flat()``

    loss = -mean(surrogate) + value_coef * mean((V - R)^2) - entropy_coef * mean(H)

    Returns
    -------
    loss : float
    grad : numpy.ndarray
        Actor gradient followed by critic gradient.
    stats : dict
        policy_loss, value_loss, entropy, approx_kl, clip_fraction.
    """
    config = policy.config
    size = len(batch)
    if size == 0:
        raise InvalidParameterError('empty PPO batch')
    eps = config.clip_ratio

    actor_trace = policy.actor._trace(batch.states)
    logits = actor_trace[-1]
    log_probs = log_softmax(logits)
    probs = np.exp(log_probs)
    rows = np.arange(size)
    new_log_probs = log_probs[rows, batch.actions]
    ratio = np.exp(new_log_probs - batch.old_log_probs)

    adv = batch.advantages
    surr1 = ratio * adv
    surr2 = np.clip(ratio, 1.0 - eps, 1.0 + eps) * adv
    surrogate = np.minimum(surr1, surr2)
    policy_loss = -surrogate.mean()

    entropy_per = -np.sum(probs * log_probs, axis=1)
    entropy = entropy_per.mean()

    values = policy.critic.forward(batch.states)[:, 0]
    value_err = values - batch.returns
    value_loss = np.mean(value_err ** 2)

    loss = policy_loss + config.value_coef * value_loss - config.entropy_coef * entropy
    if not np.isfinite(loss):
        raise NumericalError('PPO loss is not finite')

    # surrogate gradient only where the unclipped term is the active minimum
    onehot = np.zeros_like(probs)
    onehot[rows, batch.actions] = 1.0
    active = (surr1 <= surr2).astype(np.float64)
    d_logp = -(active * adv * ratio) / size
    d_logits = d_logp[:, None] * (onehot - probs)
    d_entropy = -probs * (log_probs + entropy_per[:, None])
    d_logits -= config.entropy_coef * d_entropy / size
    actor_grad = policy.actor.backward(batch.states, d_logits)

    d_values = (2.0 * config.value_coef * value_err / size)[:, None]
    critic_grad = policy.critic.backward(batch.states, d_values)

    grad = np.concatenate([actor_grad.flat(), critic_grad.flat()])
    stats = {
        'policy_loss': float(policy_loss),
        'value_loss': float(value_loss),
        'entropy': float(entropy),
        'approx_kl': float(np.mean(batch.old_log_probs - new_log_probs)),
        'clip_fraction': float(np.mean(np.abs(ratio - 1.0) > eps)),
    }
    return float(loss), grad, stats


def ppo_update(policy, batch, stream, optimizer=None, normalize=True):
    """Run ``config.epochs`` passes of minibatch Adam steps on the clipped loss

    Parameters
    ----------
    policy : TrainedPolicy
        Updated in place.
    batch : PpoBatch
    stream : RandomStream
        Shuffles the minibatches.
    optimizer : Adam, optional
        Carries moment estimates across updates (the default is a fresh one).
    normalize : bool, optional
        Standardize the advantages over the whole batch first (the default is True).

    Returns
    -------
    policy : TrainedPolicy
    diagnostics : UpdateDiagnostics
        Averages over the minibatch steps.
    """
    config = policy.config
    if optimizer is None:
        optimizer = Adam(config.learning_rate)
    if normalize:
        batch = PpoBatch(batch.states, batch.actions, batch.old_log_probs,
                         normalize_advantages(batch.advantages), batch.returns)

    totals = {'policy_loss': 0.0, 'value_loss': 0.0, 'entropy': 0.0, 'approx_kl': 0.0, 'clip_fraction': 0.0}
    num_steps = 0
    for _ in range(config.epochs):
        order = stream.permutation(len(batch))
        for start in range(0, len(batch), config.minibatch_size):
            minibatch = batch.subset(order[start:start + config.minibatch_size])
            _, grad, stats = ppo_loss_and_grad(policy, minibatch)
            policy.set_flat(optimizer.step(policy.get_flat(), grad))
            policy.updates += 1
            num_steps += 1
            for key in totals:
                totals[key] += stats[key]

    diagnostics = UpdateDiagnostics(num_steps=num_steps,
                                    **{k: v / max(num_steps, 1) for k, v in totals.items()})
    return policy, diagnostics
