from dataclasses import replace

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings, strategies as st

from oranmtd.adversary import AttackSpec, PoisoningAttack, induced_reward, induced_step, perturb_observation
from oranmtd.agent import PolicyConfig, evaluate_policy, train
from oranmtd.env import EnvFactory, EnvState, SliceAdmissionEnv, TrafficModel, admission_rate, default_topology
from oranmtd.errors import InvalidParameterError
from oranmtd.numerics import RandomStream


def _state(arrivals, remaining=100):
    return EnvState(0, remaining, tuple(arrivals), (50, 50))


class TestPerturbObservation:

    @given(st.lists(st.integers(0, 40), min_size=2, max_size=2), st.integers(0, 2 ** 32))
    @settings(max_examples=50, deadline=None)
    def test_null_attack_is_identity(self, arrivals, seed):
        state = _state(arrivals)
        perturbed, attacked = perturb_observation(state, AttackSpec(probability=0.0), RandomStream(seed))
        assert perturbed == state and not attacked

    def test_zero_arrivals_stay_zero(self, stream):
        perturbed, attacked = perturb_observation(_state((0, 0)), AttackSpec(probability=1.0), stream)
        assert attacked and perturbed.arrivals == (0, 0)

    def test_uniform_mean(self):
        stream = RandomStream(21)
        spec = AttackSpec(probability=1.0)
        samples = np.array([perturb_observation(_state((12, 8)), spec, stream)[0].arrivals
                            for _ in range(10000)])
        assert np.all(samples <= np.array([12, 8]))
        npt.assert_allclose(samples.mean(axis=0), [6.0, 4.0], rtol=0.05)

    @given(st.lists(st.integers(0, 40), min_size=2, max_size=2), st.floats(0.0, 1.0), st.integers(0, 2 ** 32))
    @settings(max_examples=100, deadline=None)
    def test_dominance_and_memory_untouched(self, arrivals, p, seed):
        state = _state(arrivals, remaining=37)
        perturbed, _ = perturb_observation(state, AttackSpec(probability=p), RandomStream(seed))
        assert all(0 <= q <= a for q, a in zip(perturbed.arrivals, arrivals))
        assert perturbed.remaining_memory == 37
        assert perturbed.free_memory == state.free_memory

    @pytest.mark.parametrize('kwargs', [{'probability': 1.5}, {'probability': -0.1}, {'mode': 'reward'}])
    def test_spec_validation(self, kwargs):
        with pytest.raises(InvalidParameterError):
            AttackSpec(**kwargs)


class TestInducedReward:

    def _env(self):
        env = SliceAdmissionEnv(default_topology(), TrafficModel.uniform(0.0, 1.0), RandomStream(0))
        env.reset()
        env.state = replace(env.state, arrivals=(5, 5))
        return env

    def test_unperturbed_flow_matches_clean_step(self):
        clean = self._env().step(3)
        assert induced_reward(self._env(), 3, _state((5, 5))) == clean.reward

    def test_fully_blocked_flow(self):
        outcome = induced_step(self._env(), 3, _state((0, 0)))
        assert outcome.admitted == (0, 0)
        assert outcome.blocked == (5, 5)
        assert outcome.reward == pytest.approx(1.1)

    def test_admitting_an_intercepted_service_is_charged(self):
        outcome = induced_step(self._env(), 3, _state((2, 5)), charge_blocked=True)
        assert outcome.admitted == (2, 5)
        assert outcome.blocked == (3, 0)
        assert outcome.charged and not outcome.overflow
        assert outcome.reward == -1.0

    def test_rejected_intercepted_service_is_not_charged(self):
        outcome = induced_step(self._env(), 2, _state((2, 5)), charge_blocked=True)
        assert outcome.admitted == (0, 5)
        assert not outcome.charged
        assert outcome.reward == pytest.approx(5 / 7 + 0.1 * 0.75)

    def test_blocked_fraction_lowers_true_admission_rate(self, ample_topology):
        factory = EnvFactory(ample_topology, TrafficModel.uniform(12.0, 0.5), horizon=500)
        env = factory(RandomStream(3))
        state = env.reset()
        attack = PoisoningAttack(AttackSpec(probability=1.0), RandomStream(4))
        history = []
        for _ in range(500):
            _, executed = attack.intercept(state)
            outcome = env.step(3, arrivals=executed)
            history.append(outcome)
            state = outcome.next_state
        blocked = sum(sum(o.blocked) for o in history)
        offered = sum(sum(o.offered) for o in history)
        assert admission_rate(history) == pytest.approx(1.0 - blocked / offered)
        assert admission_rate(history) == pytest.approx(0.5, abs=0.03)


class TestPoisoningAttack:

    def test_observation_only_executes_true_arrivals(self, stream):
        attack = PoisoningAttack(AttackSpec(probability=1.0, mode='observation_only'), stream)
        observed, executed = attack.intercept(_state((10, 10)))
        assert executed is None
        assert all(a <= 10 for a in observed.arrivals)
        assert attack.attacked_steps == 1

    def test_attack_fraction(self):
        attack = PoisoningAttack(AttackSpec(probability=0.5), RandomStream(6))
        for _ in range(4000):
            attack.intercept(_state((3, 3)))
        assert attack.attack_fraction == pytest.approx(0.5, abs=0.03)

    def test_null_attack_reproduces_clean_training(self, tiny_policy_config):
        factory = EnvFactory(default_topology(), TrafficModel.uniform(12.0, 1.0), horizon=20)
        clean = train(factory, tiny_policy_config, stream=RandomStream(9))
        hooked = train(factory, tiny_policy_config, stream=RandomStream(9),
                       attack=PoisoningAttack(AttackSpec(probability=0.0), RandomStream(10)))
        assert clean.curve == hooked.curve
        assert clean.policy.get_flat().tobytes() == hooked.policy.get_flat().tobytes()
        assert hooked.policy.poisoned and not clean.policy.poisoned

    def test_seed_labels_the_attack_stream(self):
        def schedule(seed):
            attack = PoisoningAttack.seeded(AttackSpec(probability=0.5, seed=seed), RandomStream(0))
            return [attack.intercept(_state((10, 10)))[0].arrivals for _ in range(50)]

        assert schedule(1) == schedule(1)
        assert schedule(1) != schedule(2)

    @pytest.mark.parametrize('mode, charged', [('intercepted', True), ('blocked', False)])
    def test_step_charges_only_in_intercepted_mode(self, mode, charged):
        env = SliceAdmissionEnv(default_topology(), TrafficModel.uniform(0.0, 1.0), RandomStream(0))
        env.reset()
        env.state = replace(env.state, arrivals=(4, 4))
        attack = PoisoningAttack(AttackSpec(probability=1.0, mode=mode), RandomStream(8))
        observed, executed = attack.intercept(env.state)
        while executed == (4, 4):
            observed, executed = attack.intercept(env.state)
        outcome = attack.step(env, 3, executed)
        assert outcome.blocked == tuple(4 - e for e in executed)
        assert outcome.charged is charged
        assert (outcome.reward == -1.0) is charged

    def test_target_selects_attacked_members(self):
        anyone = PoisoningAttack(AttackSpec(), RandomStream(0))
        targeted = PoisoningAttack(AttackSpec(target=2), RandomStream(0))
        assert all(anyone.applies_to(m) for m in range(4))
        assert [targeted.applies_to(m) for m in range(4)] == [False, False, True, False]


class TestPoisoningEffect:

    @pytest.fixture
    def quick_config(self):
        return PolicyConfig(hidden_sizes=(8,), learning_rate=3e-3, rollout_length=256, minibatch_size=64,
                            iterations=15, entropy_coef=0.0, seed=1)

    def test_intercepted_training_teaches_rejection(self, quick_config, ample_topology):
        factory = EnvFactory(ample_topology, TrafficModel.uniform(4.0, 1.0), horizon=50)
        clean = train(factory, quick_config, stream=RandomStream(11)).policy
        attack = PoisoningAttack.seeded(AttackSpec(), RandomStream(12))
        poisoned = train(factory, quick_config, attack=attack, stream=RandomStream(11)).policy
        clean_rate = evaluate_policy(clean, factory, 5, RandomStream(13)).mean
        poisoned_rate = evaluate_policy(poisoned, factory, 5, RandomStream(13)).mean
        assert clean_rate >= 0.9
        assert poisoned_rate <= 0.35 * clean_rate
