from dataclasses import dataclass

import numpy as np

from ..errors import InvalidParameterError, NumericalError
from ..numerics import Mlp
from ._config import PolicyConfig

# small last-layer gain so a fresh actor starts near the uniform policy
_ACTOR_OUTPUT_GAIN = 0.01


def log_softmax(logits):
    """Row-wise log-softmax of a vector or batch of logits."""
    logits = np.asarray(logits, dtype=np.float64)
    shifted = logits - np.max(logits, axis=-1, keepdims=True)
    return shifted - np.log(np.sum(np.exp(shifted), axis=-1, keepdims=True))


def softmax(logits):
    return np.exp(log_softmax(logits))


@dataclass
class TrainedPolicy:
    """Actor-critic pair of one xApp

    Attributes:
        actor(Mlp):
            One logit per admission action.
        critic(Mlp):
            Scalar state value.
        config(PolicyConfig):
            Hyperparameters the pair was trained with.
        updates(int):
            Gradient steps taken so far.
        poisoned(bool):
            Set by the harness when the model was trained under attack.
    """
    actor: Mlp
    critic: Mlp
    config: PolicyConfig
    updates: int = 0
    poisoned: bool = False

    @classmethod
    def init(cls, observation_size, num_actions, config, stream):
        hidden = list(config.hidden_sizes)
        actor = Mlp.init([observation_size] + hidden + [num_actions], stream.substream('actor'),
                         output_gain=_ACTOR_OUTPUT_GAIN)
        critic = Mlp.init([observation_size] + hidden + [1], stream.substream('critic'))
        return cls(actor, critic, config)

    @property
    def num_actions(self):
        return self.actor.output_size

    @property
    def observation_size(self):
        return self.actor.input_size

    def get_flat(self):
        return np.concatenate([self.actor.get_flat(), self.critic.get_flat()])

    def set_flat(self, theta):
        split = self.actor.num_parameters
        self.actor.set_flat(theta[:split])
        self.critic.set_flat(theta[split:])

    def copy(self):
        return TrainedPolicy(self.actor.copy(), self.critic.copy(), self.config, self.updates, self.poisoned)


def action_probabilities(policy, state):
    return softmax(policy.actor.forward(state))


def act(policy, state, stream=None, mode='sample'):
    """Choose an admission action

    Parameters
    ----------
    policy : TrainedPolicy
    state : array
        Encoded observation.
    stream : RandomStream, optional
        Needed in 'sample' mode only.
    mode : str, optional
        'sample' draws from softmax(logits); 'greedy' takes the arg max with
        the lowest index winning ties (the default is 'sample').

    Returns
    -------
    action : int
    log_prob : float
    value : float
    """
    logits = policy.actor.forward(state)
    if not np.all(np.isfinite(logits)):
        raise NumericalError('actor logits are not finite: {}'.format(logits))
    log_probs = log_softmax(logits)

    if mode == 'greedy':
        action = int(np.argmax(logits))
    elif mode == 'sample':
        if stream is None:
            raise InvalidParameterError('sample mode needs a random stream')
        cdf = np.cumsum(np.exp(log_probs))
        action = int(min(np.searchsorted(cdf, stream.random(), side='right'), len(cdf) - 1))
    else:
        raise InvalidParameterError("mode must be 'sample' or 'greedy', got {!r}".format(mode))

    value = float(policy.critic.forward(state)[0])
    return action, float(log_probs[action]), value
