from ._adam import Adam
from ._config import PolicyConfig
from ._gae import Trajectory, compute_gae
from ._policy import TrainedPolicy, act, action_probabilities, log_softmax, softmax
from ._train import (EvaluationResult, LearningCurve, TrainingResult, collect_rollout, evaluate_policy,
                     evaluate_windows, train)
from ._update import (PpoBatch, UpdateDiagnostics, clipped_surrogate, normalize_advantages, ppo_loss_and_grad,
                      ppo_update)
