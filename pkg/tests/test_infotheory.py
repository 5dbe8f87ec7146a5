import math

import numpy as np
import pytest

from markov_ktree.errors import ScopeError
from markov_ktree.infotheory import (
    conditional_entropy,
    entropy,
    independence_noise_floor,
    kl_divergence,
    mutual_information,
    pairwise_mi_matrix,
)
from markov_ktree.tables import JointTable, marginalize, product_table, samples_from_rows, uniform_table


class TestEntropy:
    def test_uniform_over_eight_states_is_three_bits(self):
        assert entropy(uniform_table((1, 2, 3), {1: 2, 2: 2, 3: 2})) == pytest.approx(3.0)

    def test_point_mass_is_zero(self):
        assert entropy(JointTable((1,), np.array([1.0, 0.0]))) == 0.0

    def test_xor_joint_has_two_bits(self, xor_joint):
        assert entropy(xor_joint) == pytest.approx(2.0)


class TestKL:
    def test_zero_against_itself(self, xor_joint):
        d = kl_divergence(xor_joint, xor_joint)
        assert d.finite
        assert d.bits == 0.0

    def test_support_violation_is_flagged(self):
        p = JointTable((1,), np.array([0.5, 0.5]))
        q = JointTable((1,), np.array([1.0, 0.0]))
        d = kl_divergence(p, q)
        assert d.support_violation
        assert d.bits == math.inf

    def test_zero_in_p_is_fine(self):
        p = JointTable((1,), np.array([1.0, 0.0]))
        q = JointTable((1,), np.array([0.5, 0.5]))
        assert kl_divergence(p, q).bits == pytest.approx(1.0)

    def test_q_in_another_axis_order(self, rng, binary_joint):
        p = binary_joint(2, rng)
        q = binary_joint(2, rng)
        swapped = JointTable((2, 1), q.probs.T)
        assert kl_divergence(p, swapped).bits == pytest.approx(kl_divergence(p, q).bits)

    def test_scope_mismatch_rejected(self, xor_joint):
        with pytest.raises(ScopeError):
            kl_divergence(xor_joint, marginalize(xor_joint, {1, 2}))


class TestMutualInformation:
    def test_xor_needs_both_parents(self, xor_joint):
        assert mutual_information(xor_joint, 3, (1, 2)) == pytest.approx(1.0)
        assert mutual_information(xor_joint, 3, (1,)) == pytest.approx(0.0, abs=1e-12)
        assert mutual_information(xor_joint, 3, (2,)) == pytest.approx(0.0, abs=1e-12)

    def test_empty_conditioning_set_is_zero(self, xor_joint):
        assert mutual_information(xor_joint, 1, ()) == 0.0

    def test_variable_in_its_own_set_gives_its_entropy(self, xor_joint):
        assert mutual_information(xor_joint, 1, (1, 2)) == pytest.approx(1.0)

    def test_independent_variables(self):
        joint = product_table([uniform_table((1,), {1: 2}), uniform_table((2,), {2: 3})])
        assert mutual_information(joint, 1, (2,)) == pytest.approx(0.0, abs=1e-12)

    def test_unknown_variable_rejected(self, xor_joint):
        with pytest.raises(ScopeError):
            mutual_information(xor_joint, 4, (1,))

    def test_monotone_in_the_conditioning_set(self, rng, binary_joint):
        for _ in range(20):
            joint = binary_joint(4, rng)
            assert mutual_information(joint, 1, (2,)) <= mutual_information(joint, 1, (2, 3)) + 1e-12
            assert mutual_information(joint, 1, (2, 3)) <= mutual_information(joint, 1, (2, 3, 4)) + 1e-12

    def test_equals_entropy_difference(self, rng, binary_joint):
        joint = binary_joint(3, rng)
        h_x = entropy(marginalize(joint, {1}))
        assert mutual_information(joint, 1, (2, 3)) == pytest.approx(h_x - conditional_entropy(joint, 1, (2, 3)))


def test_pairwise_matrix_is_symmetric_with_zero_diagonal(rng, binary_joint):
    joint = binary_joint(4, rng)
    mi = pairwise_mi_matrix(joint)
    np.testing.assert_allclose(mi, mi.T)
    np.testing.assert_array_equal(np.diag(mi), 0.0)
    assert mi[1, 3] == pytest.approx(mutual_information(joint, 2, (4,)))


def test_noise_floor_formula():
    samples = samples_from_rows([[0, 0, 1], [1, 1, 0]] * 50)
    # (2 - 1)(4 - 1) / (2 * 100 * ln 2)
    assert independence_noise_floor(samples, 1, (2, 3)) == pytest.approx(3 / (200 * math.log(2)))
    assert independence_noise_floor(samples, 1, ()) == 0.0
