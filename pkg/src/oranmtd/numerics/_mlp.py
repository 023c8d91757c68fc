from dataclasses import dataclass
from typing import List

import numpy as np

from .._utilities import check_vector
from ..errors import InvalidParameterError, NumericalError, ShapeError


@dataclass
class MlpGradients:
    """Per-layer parameter gradients, same shapes as the net's parameters."""
    weights: List[np.ndarray]
    biases: List[np.ndarray]

    def flat(self):
        if not self.weights:
            return np.zeros(0)
        return np.concatenate([np.concatenate([w.ravel(), b]) for w, b in zip(self.weights, self.biases)])


class Mlp(object):
    """Dense network with tanh hidden layers and a linear output layer

    Layer ``k`` maps ``layer_sizes[k]`` inputs to ``layer_sizes[k + 1]``
    outputs as ``a @ W[k] + b[k]``. A single-entry ``layer_sizes`` is the
    parameter-free identity.

    Attributes:
        layer_sizes(list):
            Input size, hidden sizes, output size.
        weights(list):
            float64 matrices, ``weights[k].shape == (layer_sizes[k], layer_sizes[k + 1])``.
        biases(list):
            float64 vectors, ``biases[k].shape == (layer_sizes[k + 1],)``.
    """

    __slots__ = ('layer_sizes', 'weights', 'biases')

    def __init__(self, layer_sizes, weights=None, biases=None):
        layer_sizes = [int(s) for s in layer_sizes]
        if not layer_sizes or any(s <= 0 for s in layer_sizes):
            raise InvalidParameterError('layer_sizes must be positive integers, got {}'.format(layer_sizes))
        self.layer_sizes = layer_sizes
        shapes = list(zip(layer_sizes[:-1], layer_sizes[1:]))

        if weights is None:
            weights = [np.zeros(shape) for shape in shapes]
        if biases is None:
            biases = [np.zeros(shape[1]) for shape in shapes]
        if len(weights) != len(shapes) or len(biases) != len(shapes):
            raise ShapeError('expected {} layers, got {} weights and {} biases'.format(
                len(shapes), len(weights), len(biases)))

        self.weights = []
        self.biases = []
        for k, (shape, w, b) in enumerate(zip(shapes, weights, biases)):
            w = np.array(w, dtype=np.float64)
            b = np.array(b, dtype=np.float64)
            if w.shape != shape or b.shape != (shape[1],):
                raise ShapeError('layer {} must have weight {} and bias {}, got {} and {}'.format(
                    k, shape, (shape[1],), w.shape, b.shape))
            self.weights.append(w)
            self.biases.append(b)
        self._check_finite()

    @classmethod
    def init(cls, layer_sizes, stream, output_gain=1.0):
        """Fan-in scaled normal weights and zero biases.

        ``output_gain`` scales the last layer; a small gain starts a policy
        head close to uniform.
        """
        layer_sizes = [int(s) for s in layer_sizes]
        weights = []
        biases = []
        num_layers = len(layer_sizes) - 1
        for k, (fan_in, fan_out) in enumerate(zip(layer_sizes[:-1], layer_sizes[1:])):
            gain = output_gain if k == num_layers - 1 else 1.0
            weights.append(gain * stream.normal((fan_in, fan_out)) / np.sqrt(fan_in))
            biases.append(np.zeros(fan_out))
        return cls(layer_sizes, weights, biases)

    @property
    def num_layers(self):
        return len(self.weights)

    @property
    def num_parameters(self):
        return int(sum(w.size + b.size for w, b in zip(self.weights, self.biases)))

    @property
    def input_size(self):
        return self.layer_sizes[0]

    @property
    def output_size(self):
        return self.layer_sizes[-1]

    def copy(self):
        return Mlp(self.layer_sizes, [w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def _check_finite(self):
        for w, b in zip(self.weights, self.biases):
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
                raise NumericalError('network parameters are not finite')

    def _trace(self, x):
        """Activations of every layer for a 2-D batch, input first."""
        activations = [x]
        a = x
        for k, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = a @ w + b
            a = np.tanh(z) if k < self.num_layers - 1 else z
            activations.append(a)
        return activations

    def forward(self, x):
        """Evaluate the net on one input vector or a batch of rows."""
        x = check_vector(x, self.input_size)
        single = x.ndim == 1
        out = self._trace(np.atleast_2d(x))[-1]
        if not np.all(np.isfinite(out)):
            raise NumericalError('network output is not finite')
        return out[0] if single else out

    def backward(self, x, upstream_grad):
        """Gradients of ``sum(upstream_grad * forward(x))`` w.r.t. every parameter

        Parameters
        ----------
        x : array
            Input vector or batch (rows).
        upstream_grad : array
            d(loss)/d(output), same leading shape as ``x``.

        Returns
        -------
        grads : MlpGradients
        """
        x = check_vector(x, self.input_size)
        upstream_grad = check_vector(upstream_grad, self.output_size, name='upstream_grad')
        if x.ndim != upstream_grad.ndim or np.atleast_2d(x).shape[0] != np.atleast_2d(upstream_grad).shape[0]:
            raise ShapeError('input {} and upstream gradient {} do not match'.format(x.shape, upstream_grad.shape))

        activations = self._trace(np.atleast_2d(x))
        delta = np.atleast_2d(upstream_grad)
        grad_w = [None] * self.num_layers
        grad_b = [None] * self.num_layers
        for k in reversed(range(self.num_layers)):
            grad_w[k] = activations[k].T @ delta
            grad_b[k] = delta.sum(axis=0)
            if k > 0:
                delta = (delta @ self.weights[k].T) * (1.0 - activations[k] ** 2)
        return MlpGradients(grad_w, grad_b)

    def get_flat(self):
        return MlpGradients(self.weights, self.biases).flat()

    def set_flat(self, theta):
        """Load parameters from a flat vector laid out as ``get_flat`` returns."""
        theta = np.asarray(theta, dtype=np.float64)
        if theta.shape != (self.num_parameters,):
            raise ShapeError('expected {} parameters, got shape {}'.format(self.num_parameters, theta.shape))
        if not np.all(np.isfinite(theta)):
            raise NumericalError('refusing non-finite parameter update')
        offset = 0
        for k, (w, b) in enumerate(zip(self.weights, self.biases)):
            self.weights[k] = theta[offset:offset + w.size].reshape(w.shape).copy()
            offset += w.size
            self.biases[k] = theta[offset:offset + b.size].copy()
            offset += b.size


def mlp_forward(net, x):
    return net.forward(x)


def mlp_backward(net, x, upstream_grad):
    return net.backward(x, upstream_grad)
