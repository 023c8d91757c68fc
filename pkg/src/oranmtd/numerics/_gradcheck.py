from dataclasses import dataclass

import numpy as np

from ..errors import GradientCheckError, ShapeError

_DENOMINATOR_FLOOR = 1e-12


@dataclass
class GradientCheckReport:
    """Worst relative and absolute disagreement between two gradients

    An entry passes when its relative error is below ``tolerance`` or its
    absolute error is below ``absolute_tolerance``; ``max_relative_error``
    only counts entries above the absolute tolerance.
    """
    passed: bool
    max_relative_error: float
    worst_index: int
    num_parameters: int
    tolerance: float
    max_absolute_error: float = 0.0
    absolute_tolerance: float = 0.0


def _relative_errors(analytic, numeric):
    scale = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), _DENOMINATOR_FLOOR)
    return np.abs(analytic - numeric) / scale


def check_gradient(fn, theta, analytic, tolerance=1e-4, step=1e-5, absolute_tolerance=1e-8):
    """Compare an analytic gradient against central differences

    Parameters
    ----------
    fn : callable
        Scalar function of a flat parameter vector.
    theta : array
        Point of evaluation; left unchanged.
    analytic : array
        Claimed gradient of ``fn`` at ``theta``.
    tolerance : float, optional
        Largest accepted relative error (the default is 1e-4).
    step : float, optional
        Central-difference half step (the default is 1e-5).
    absolute_tolerance : float, optional
        Absolute error under which an entry passes whatever its relative
        error; entries this small are at the level of difference round-off
        (the default is 1e-8).

    Returns
    -------
    report : GradientCheckReport
    """
    theta = np.array(theta, dtype=np.float64)
    analytic = np.asarray(analytic, dtype=np.float64)
    if analytic.shape != theta.shape:
        raise ShapeError('gradient shape {} does not match parameters {}'.format(analytic.shape, theta.shape))
    if theta.size == 0:
        return GradientCheckReport(True, 0.0, -1, 0, tolerance, 0.0, absolute_tolerance)

    base = fn(theta)
    if not np.isfinite(base):
        raise GradientCheckError('loss is not finite at the checked parameters: {}'.format(base))

    numeric = np.empty_like(theta)
    for i in range(theta.size):
        saved = theta[i]
        theta[i] = saved + step
        upper = fn(theta)
        theta[i] = saved - step
        lower = fn(theta)
        theta[i] = saved
        if not (np.isfinite(upper) and np.isfinite(lower)):
            raise GradientCheckError('loss is not finite when perturbing parameter {}'.format(i))
        numeric[i] = (upper - lower) / (2.0 * step)

    relative = _relative_errors(analytic, numeric)
    absolute = np.abs(analytic - numeric)
    significant = absolute >= absolute_tolerance
    passed = not np.any(significant & (relative >= tolerance))
    if np.any(significant):
        worst = int(np.argmax(np.where(significant, relative, -1.0)))
        worst_relative = float(relative[worst])
    else:
        worst, worst_relative = int(np.argmax(absolute)), 0.0
    return GradientCheckReport(passed, worst_relative, worst, theta.size, tolerance,
                               float(absolute.max()), absolute_tolerance)


def finite_difference_check(net, inputs, loss, loss_grad, tolerance=1e-4, step=1e-5, analytic=None):
    """Check ``net.backward`` against central differences of ``loss(net(inputs))``

    Parameters
    ----------
    net : Mlp
    inputs : array
        Input vector or batch the loss is evaluated on.
    loss : callable
        Scalar function of the net outputs.
    loss_grad : callable
        d(loss)/d(outputs), fed to ``net.backward`` as the upstream gradient.
    tolerance : float, optional
        (the default is 1e-4)
    step : float, optional
        (the default is 1e-5)
    analytic : array, optional
        Flat gradient to check instead of the one backpropagation gives.

    Returns
    -------
    report : GradientCheckReport

    Examples
    --------
    >>> net = Mlp.init([3, 4, 1], RandomStream(0))
    >>> x = np.ones(3)
    >>> finite_difference_check(net, x, lambda y: 0.5 * np.sum(y ** 2), lambda y: y).passed
    True
    """
    trial = net.copy()
    theta = net.get_flat()

    if analytic is None:
        analytic = net.backward(inputs, loss_grad(net.forward(inputs))).flat()

    def objective(flat):
        trial.set_flat(flat)
        return float(loss(trial.forward(inputs)))

    return check_gradient(objective, theta, analytic, tolerance=tolerance, step=step)
