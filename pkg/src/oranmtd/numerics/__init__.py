from ._random import RandomStream, sample_poisson, sample_exponential, sample_uniform
from ._mlp import Mlp, MlpGradients, mlp_forward, mlp_backward
from ._gradcheck import GradientCheckReport, check_gradient, finite_difference_check
