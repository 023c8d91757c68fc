from dataclasses import asdict, dataclass, fields
from typing import Tuple

from .._utilities import check_finite_real, check_positive_int
from ..errors import InvalidParameterError


@dataclass(frozen=True)
class PolicyConfig:
    """PPO hyperparameters of one admission-control model

    Attributes:
        hidden_sizes(tuple):
            Hidden layer widths shared by actor and critic.
        learning_rate(float):
            Adam step size; 0 freezes the parameters.
        gamma(float):
            Discount in [0, 1).
        gae_lambda(float):
            GAE parameter in [0, 1].
        clip_ratio(float):
            Surrogate clip epsilon in (0, 1).
        epochs(int):
            Passes over each rollout.
        minibatch_size(int):
            Samples per gradient step.
        rollout_length(int):
            Environment steps collected per iteration.
        entropy_coef(float):
            Weight of the entropy bonus.
        value_coef(float):
            Weight of the value-function loss.
        iterations(int):
            Rollout/update rounds ``train`` performs.
        seed(int):
            Seed of the model's own streams.
    """
    hidden_sizes: Tuple[int, ...] = (32, 32)
    learning_rate: float = 3e-4
    gamma: float = 0.99
    gae_lambda: float = 0.95
    clip_ratio: float = 0.2
    epochs: int = 4
    minibatch_size: int = 64
    rollout_length: int = 1024
    entropy_coef: float = 0.01
    value_coef: float = 0.5
    iterations: int = 40
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'hidden_sizes', tuple(int(h) for h in self.hidden_sizes))
        if any(h <= 0 for h in self.hidden_sizes):
            raise InvalidParameterError('hidden sizes must be positive, got {}'.format(self.hidden_sizes))
        if check_finite_real(self.learning_rate, 'learning_rate') < 0:
            raise InvalidParameterError('learning_rate must be nonnegative, got {}'.format(self.learning_rate))
        if not 0.0 <= check_finite_real(self.gamma, 'gamma') < 1.0:
            raise InvalidParameterError('gamma must lie in [0, 1), got {}'.format(self.gamma))
        if not 0.0 <= check_finite_real(self.gae_lambda, 'gae_lambda') <= 1.0:
            raise InvalidParameterError('gae_lambda must lie in [0, 1], got {}'.format(self.gae_lambda))
        if not 0.0 < check_finite_real(self.clip_ratio, 'clip_ratio') < 1.0:
            raise InvalidParameterError('clip_ratio must lie in (0, 1), got {}'.format(self.clip_ratio))
        for name in ('epochs', 'minibatch_size', 'rollout_length', 'iterations'):
            check_positive_int(getattr(self, name), name)
        for name in ('entropy_coef', 'value_coef'):
            if check_finite_real(getattr(self, name), name) < 0:
                raise InvalidParameterError('{} must be nonnegative'.format(name))
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise InvalidParameterError('seed must be a nonnegative integer, got {!r}'.format(self.seed))

    def to_dict(self):
        values = asdict(self)
        values['hidden_sizes'] = list(self.hidden_sizes)
        return values

    @classmethod
    def from_dict(cls, values):
        known = {f.name for f in fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise InvalidParameterError('unknown policy config keys: {}'.format(sorted(unknown)))
        return cls(**values)
