import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from oranmtd.errors import GradientCheckError, InvalidParameterError, NumericalError, ShapeError
from oranmtd.numerics import (Mlp, RandomStream, check_gradient, finite_difference_check, mlp_backward,
                              mlp_forward, sample_exponential, sample_poisson, sample_uniform)


class TestRandomStream:

    def test_same_seed_same_sequence(self):
        a = RandomStream(42)
        b = RandomStream(42)
        assert [sample_poisson(a, 3.0) for _ in range(50)] == [sample_poisson(b, 3.0) for _ in range(50)]

    def test_substreams_are_independent(self):
        root = RandomStream(7)
        left = root.substream('left')
        right = root.substream('right')
        assert [left.random() for _ in range(5)] != [right.random() for _ in range(5)]
        fresh = RandomStream(7)
        busy = fresh.substream('left')
        for _ in range(100):
            busy.random()
        assert fresh.substream('right').random() == RandomStream(7).substream('right').random()

    def test_substream_path(self):
        assert RandomStream(1).substream('a').substream('b').label == 'a/b'

    @pytest.mark.parametrize('seed', [-1, 2 ** 64, 1.5, True])
    def test_rejects_bad_seed(self, seed):
        with pytest.raises(InvalidParameterError):
            RandomStream(seed)


class TestSamplers:

    def test_poisson_zero_rate(self, stream):
        assert all(sample_poisson(stream, 0.0) == 0 for _ in range(100))

    def test_poisson_moments(self):
        stream = RandomStream(11)
        x = np.array([sample_poisson(stream, 12.0) for _ in range(100000)])
        assert abs(x.mean() - 12.0) < 0.12
        assert abs(x.var() - 12.0) < 0.36

    @pytest.mark.parametrize('lam', [0.5, 3.0, 12.0, 20.0])
    def test_poisson_pmf_total_variation(self, lam):
        stream = RandomStream(5)
        x = np.array([sample_poisson(stream, lam) for _ in range(100000)])
        support = np.arange(x.max() + 1)
        empirical = np.bincount(x, minlength=support.size) / x.size
        tv = 0.5 * (np.abs(empirical - stats.poisson.pmf(support, lam)).sum() + stats.poisson.sf(x.max(), lam))
        assert tv < 0.02

    def test_poisson_one_draw_per_call(self):
        a = RandomStream(9)
        b = RandomStream(9)
        sample_poisson(a, 4.0)
        b.random()
        assert a.random() == b.random()

    @pytest.mark.parametrize('lam', [-1.0, float('nan'), float('inf')])
    def test_poisson_rejects_bad_rate(self, stream, lam):
        with pytest.raises(InvalidParameterError):
            sample_poisson(stream, lam)

    def test_exponential_mean_and_ks(self):
        stream = RandomStream(3)
        x = np.array([sample_exponential(stream, 1.0) for _ in range(100000)])
        assert abs(x.mean() - 1.0) < 0.02
        assert stats.kstest(x[:10000], 'expon').pvalue > 0.01

    def test_exponential_huge_rate_stays_positive(self, stream):
        x = np.array([sample_exponential(stream, 1e6) for _ in range(1000)])
        assert np.all(x > 0) and np.all(np.isfinite(x))

    @pytest.mark.parametrize('mu', [0.0, -2.0])
    def test_exponential_rejects_bad_rate(self, stream, mu):
        with pytest.raises(InvalidParameterError):
            sample_exponential(stream, mu)

    def test_uniform_mean_support_and_ks(self):
        stream = RandomStream(4)
        x = np.array([sample_uniform(stream, 0.0, 12.0) for _ in range(100000)])
        assert abs(x.mean() - 6.0) < 0.12
        assert np.all((x >= 0.0) & (x < 12.0))
        assert stats.kstest(x[:10000], 'uniform', args=(0.0, 12.0)).pvalue > 0.01

    def test_uniform_degenerate_and_reversed(self, stream):
        assert sample_uniform(stream, 0.0, 0.0) == 0.0
        with pytest.raises(InvalidParameterError):
            sample_uniform(stream, 1.0, 0.0)

    @given(st.floats(-1e6, 1e6), st.floats(0.0, 1e6), st.integers(0, 2 ** 32))
    @settings(max_examples=50, deadline=None)
    def test_uniform_stays_in_interval(self, lo, width, seed):
        hi = lo + width
        x = sample_uniform(RandomStream(seed), lo, hi)
        assert x == lo if lo == hi else lo <= x < hi


class TestMlp:

    def test_zero_net_outputs_zero(self):
        net = Mlp([3, 4, 2])
        npt.assert_array_equal(mlp_forward(net, np.array([0.3, -1.0, 2.0])), np.zeros(2))

    def test_identity_like_layer(self):
        net = Mlp([1, 1], weights=[np.ones((1, 1))], biases=[np.zeros(1)])
        npt.assert_allclose(mlp_forward(net, np.array([0.5])), [0.5])

    def test_forward_matches_hand_trace(self, stream):
        net = Mlp.init([2, 2, 2], stream)
        x = np.array([0.3, -0.7])
        hidden = np.tanh(x @ net.weights[0] + net.biases[0])
        npt.assert_allclose(net.forward(x), hidden @ net.weights[1] + net.biases[1], rtol=0, atol=1e-15)

    def test_forward_batch_matches_rows(self, stream):
        net = Mlp.init([3, 5, 2], stream)
        x = stream.normal((4, 3))
        npt.assert_allclose(net.forward(x), np.vstack([net.forward(row) for row in x]), atol=1e-14)

    def test_shape_errors(self, stream):
        net = Mlp.init([3, 2], stream)
        with pytest.raises(ShapeError):
            net.forward(np.ones(4))
        with pytest.raises(ShapeError):
            net.backward(np.ones(3), np.ones(3))
        with pytest.raises(ShapeError):
            Mlp([3, 2], weights=[np.ones((2, 3))])

    def test_zero_upstream_gives_zero_gradient(self, stream):
        net = Mlp.init([3, 4, 2], stream)
        grads = mlp_backward(net, np.ones(3), np.zeros(2))
        npt.assert_array_equal(grads.flat(), np.zeros(net.num_parameters))

    def test_linear_weight_gradient_is_input(self):
        net = Mlp([3, 1])
        x = np.array([1.0, -2.0, 0.5])
        grads = net.backward(x, np.ones(1))
        npt.assert_array_equal(grads.weights[0][:, 0], x)
        npt.assert_array_equal(grads.biases[0], [1.0])

    def test_non_finite_update_is_refused(self, stream):
        net = Mlp.init([2, 2], stream)
        theta = net.get_flat()
        theta[0] = np.nan
        with pytest.raises(NumericalError):
            net.set_flat(theta)

    def test_flat_round_trip(self, stream):
        net = Mlp.init([3, 4, 2], stream)
        other = Mlp([3, 4, 2])
        other.set_flat(net.get_flat())
        npt.assert_array_equal(other.forward(np.ones(3)), net.forward(np.ones(3)))


class TestGradientCheck:

    def test_quadratic_loss_passes(self, stream):
        net = Mlp.init([3, 4, 1], stream)
        x = stream.normal((5, 3))
        report = finite_difference_check(net, x, lambda y: 0.5 * np.sum(y ** 2), lambda y: y)
        assert report.passed
        assert report.max_relative_error < 1e-4

    def test_corrupted_gradient_fails(self, stream):
        net = Mlp.init([3, 4, 1], stream)
        x = stream.normal((5, 3))
        analytic = net.backward(x, net.forward(x)).flat()
        analytic[2] += 0.1
        report = finite_difference_check(net, x, lambda y: 0.5 * np.sum(y ** 2), lambda y: y, analytic=analytic)
        assert not report.passed
        assert report.worst_index == 2

    def test_small_gradients_are_held_to_relative_tolerance(self):
        def fn(theta):
            return 1e-3 * float(np.sum(theta))

        exact = np.full(3, 1e-3)
        assert check_gradient(fn, np.zeros(3), exact).passed
        analytic = exact.copy()
        analytic[1] += 5e-7
        report = check_gradient(fn, np.zeros(3), analytic)
        assert not report.passed
        assert report.worst_index == 1
        assert report.max_relative_error == pytest.approx(5e-4, rel=1e-3)
        assert report.max_absolute_error == pytest.approx(5e-7, rel=1e-3)

    def test_round_off_on_vanishing_entries_passes(self):
        def fn(theta):
            return float(theta[0] ** 2 + 1e-12 * theta[1])

        report = check_gradient(fn, np.array([1.0, 0.0]), np.array([2.0, 0.0]))
        assert report.passed

    def test_zero_parameter_net_passes(self):
        net = Mlp([3])
        report = finite_difference_check(net, np.ones(3), lambda y: float(np.sum(y ** 2)), lambda y: 2 * y)
        assert report.passed and report.num_parameters == 0

    def test_non_finite_loss_is_reported(self):
        with pytest.raises(GradientCheckError):
            check_gradient(lambda theta: float('nan'), np.ones(2), np.zeros(2))

    @given(st.integers(0, 2 ** 32), st.integers(1, 4), st.integers(1, 6))
    @settings(max_examples=20, deadline=None)
    def test_random_nets_backprop_soundly(self, seed, num_inputs, hidden):
        stream = RandomStream(seed)
        net = Mlp.init([num_inputs, hidden, 2], stream)
        x = stream.normal((3, num_inputs))
        target = stream.normal((3, 2))
        report = finite_difference_check(net, x, lambda y: 0.5 * np.sum((y - target) ** 2), lambda y: y - target)
        assert report.passed
