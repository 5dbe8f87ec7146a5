import itertools

import numpy as np
import pytest

from markov_ktree.errors import DataError, ScopeError
from markov_ktree.tables import (
    JointTable,
    SampleSet,
    broadcast_to_scope,
    conditional,
    empirical_joint,
    joint_to_json,
    load_joint_json,
    load_samples_csv,
    local_table,
    marginalize,
    product_table,
    random_joint,
    reorder,
    samples_from_rows,
    uniform_table,
)


class TestEmpiricalJoint:
    def test_counts_become_frequencies(self):
        samples = samples_from_rows([[0, 0], [0, 1], [1, 1], [1, 1]])
        table = empirical_joint(samples, (1, 2))
        np.testing.assert_allclose(table.probs, [[0.25, 0.25], [0.0, 0.5]])

    def test_scope_order_sets_axis_order(self):
        samples = samples_from_rows([[0, 1], [0, 1], [1, 0], [0, 0]])
        forward = empirical_joint(samples, (1, 2))
        backward = empirical_joint(samples, (2, 1))
        np.testing.assert_allclose(backward.probs, forward.probs.T)

    def test_pseudocount_smooths_every_cell(self):
        samples = samples_from_rows([[0, 0], [0, 0]])
        table = empirical_joint(samples, (1, 2), pseudocount=1.0)
        # (count + 1) / (2 + 4)
        np.testing.assert_allclose(table.flat, [3 / 6, 1 / 6, 1 / 6, 1 / 6])

    def test_single_value_column_still_binary(self):
        samples = samples_from_rows([[0, 1], [0, 0]])
        assert samples.cardinalities[1] == 2

    def test_unknown_variable_is_a_scope_error(self):
        samples = samples_from_rows([[0, 1]])
        with pytest.raises(ScopeError):
            empirical_joint(samples, (1, 3))

    def test_empty_scope_rejected(self):
        samples = samples_from_rows([[0, 1]])
        with pytest.raises(ScopeError):
            empirical_joint(samples, ())

    def test_repeated_variable_rejected(self):
        samples = samples_from_rows([[0, 1]])
        with pytest.raises(ScopeError):
            empirical_joint(samples, (1, 1))

    def test_every_assignment_once_gives_the_uniform_table(self):
        cards = {1: 2, 2: 3, 3: 2}
        rows = list(itertools.product(range(2), range(3), range(2)))
        samples = samples_from_rows(rows)
        assert samples.cardinalities == cards
        table = empirical_joint(samples, (1, 2, 3), pseudocount=0.0)
        np.testing.assert_allclose(table.probs, uniform_table((1, 2, 3), cards).probs, atol=1e-15)
        np.testing.assert_allclose(empirical_joint(samples, (3, 1)).probs, np.full((2, 2), 0.25))

    def test_zero_samples_need_a_pseudocount(self):
        empty = SampleSet(np.zeros((0, 2), dtype=np.int64), {1: 2, 2: 3})
        with pytest.raises(DataError, match="zero samples"):
            empirical_joint(empty, (1, 2))
        np.testing.assert_allclose(empirical_joint(empty, (1, 2), pseudocount=0.5).flat, 1 / 6)

    def test_negative_pseudocount_rejected(self):
        with pytest.raises(DataError):
            empirical_joint(samples_from_rows([[0, 1]]), (1, 2), pseudocount=-1.0)


class TestJointTable:
    def test_must_sum_to_one(self):
        with pytest.raises(DataError):
            JointTable((1, 2), np.full((2, 2), 0.3))

    def test_negative_entries_rejected(self):
        with pytest.raises(DataError):
            JointTable((1,), np.array([1.5, -0.5]))

    def test_axes_must_match_scope(self):
        with pytest.raises(ScopeError):
            JointTable((1, 2), np.array([0.5, 0.5]))

    def test_probs_are_read_only(self, xor_joint):
        with pytest.raises(ValueError):
            xor_joint.probs[0, 0, 0] = 1.0


class TestMarginalize:
    def test_sums_out_dropped_variables(self, xor_joint):
        pair = marginalize(xor_joint, {1, 3})
        assert pair.scope == (1, 3)
        np.testing.assert_allclose(pair.probs, np.full((2, 2), 0.25))

    def test_keeps_table_order(self, xor_joint):
        assert marginalize(xor_joint, [3, 1]).scope == (1, 3)

    def test_unknown_variable_rejected(self, xor_joint):
        with pytest.raises(ScopeError):
            marginalize(xor_joint, {4})

    def test_marginalizing_in_two_steps(self, rng):
        cards = {1: 2, 2: 3, 3: 2, 4: 3}
        table = random_joint((1, 2, 3, 4), cards, rng)
        for keep in [{1, 2, 4}, {2, 3}, {3}]:
            for inner in [set(c) for r in range(1, len(keep) + 1) for c in itertools.combinations(sorted(keep), r)]:
                direct = marginalize(table, inner)
                stepped = marginalize(marginalize(table, keep), inner)
                assert stepped.scope == direct.scope
                np.testing.assert_allclose(stepped.probs, direct.probs, atol=1e-15)

    def test_reorder_permutes_axes(self):
        table = uniform_table((1, 2, 3), {1: 2, 2: 3, 3: 4})
        assert reorder(table, (3, 1, 2)).shape == (4, 2, 3)


class TestConditional:
    def test_slices_sum_to_one(self, xor_joint):
        cpt = conditional(xor_joint, 3, (1, 2))
        np.testing.assert_allclose(cpt.probs.sum(axis=-1), 1.0)
        np.testing.assert_allclose(cpt.slice((1, 1)), [1.0, 0.0])

    def test_zero_probability_slice_is_uniform(self):
        probs = np.array([[0.5, 0.5], [0.0, 0.0]])
        cpt = conditional(JointTable((1, 2), probs), 2, (1,))
        np.testing.assert_allclose(cpt.slice((1,)), [0.5, 0.5])

    def test_target_in_given_rejected(self, xor_joint):
        with pytest.raises(ScopeError):
            conditional(xor_joint, 1, (1, 2))

    def test_weighted_slices_rebuild_the_marginal(self, rng):
        cards = {1: 2, 2: 3, 3: 2, 4: 3}
        for trial in range(10):
            probs = random_joint((1, 2, 3, 4), cards, rng).probs.copy()
            if trial % 2:
                probs[1, 2] = 0.0
                probs /= probs.sum()
            table = JointTable((1, 2, 3, 4), probs)
            for target, given in [(4, (1, 2)), (1, (3,)), (2, (4, 1, 3))]:
                cpt = conditional(table, target, given)
                weights = reorder(marginalize(table, given), given)
                rebuilt = (weights[..., None] * cpt.probs).sum(axis=tuple(range(len(given))))
                np.testing.assert_allclose(rebuilt, marginalize(table, {target}).probs, atol=1e-12)

    def test_empty_given_is_the_marginal(self, xor_joint):
        np.testing.assert_allclose(conditional(xor_joint, 2, ()).probs, [0.5, 0.5])


def test_broadcast_to_scope_lines_up_axes():
    array = np.arange(6.0).reshape(2, 3)
    view = broadcast_to_scope(array, (3, 1), (1, 2, 3))
    assert view.shape == (3, 1, 2)
    assert view[2, 0, 1] == array[1, 2]


def test_product_of_uniforms_is_uniform():
    table = product_table([uniform_table((1,), {1: 2}), uniform_table((2, 3), {2: 2, 3: 2})])
    np.testing.assert_allclose(table.flat, np.full(8, 1 / 8))


def test_local_table_from_samples_and_joint_agree(xor_joint):
    rows = [[x, y, x ^ y] for x in range(2) for y in range(2)]
    samples = samples_from_rows(rows)
    np.testing.assert_allclose(
        local_table(samples, (1, 3)).probs,
        local_table(xor_joint, (1, 3)).probs,
    )


class TestLoaders:
    def test_csv_uses_header_and_sidecar(self, fixtures_dir):
        samples = load_samples_csv(fixtures_dir / "chain_samples.csv")
        assert samples.names == ("A", "B", "C", "D", "E")
        assert samples.count == 24
        assert samples.cardinalities == {v: 2 for v in range(1, 6)}

    def test_sidecar_can_raise_cardinality(self, tmp_path):
        csv_path = tmp_path / "s.csv"
        csv_path.write_text("A,B\n0,1\n1,0\n")
        (tmp_path / "s.json").write_text('{"cardinalities": {"B": 3}}')
        assert load_samples_csv(csv_path).cardinalities == {1: 2, 2: 3}

    def test_sidecar_below_observed_state_rejected(self, tmp_path):
        csv_path = tmp_path / "s.csv"
        csv_path.write_text("A,B\n0,2\n1,0\n")
        (tmp_path / "s.json").write_text('{"cardinalities": {"B": 2}}')
        with pytest.raises(DataError):
            load_samples_csv(csv_path)

    def test_non_integer_state_rejected(self, tmp_path):
        csv_path = tmp_path / "bad.csv"
        csv_path.write_text("A,B\n0,x\n")
        with pytest.raises(DataError):
            load_samples_csv(csv_path)

    def test_ragged_rows_rejected(self, tmp_path):
        csv_path = tmp_path / "bad.csv"
        csv_path.write_text("A,B\n0,1\n1\n")
        with pytest.raises(DataError):
            load_samples_csv(csv_path)

    def test_joint_json(self, fixtures_dir, xor_joint):
        table, names = load_joint_json(fixtures_dir / "xor_joint.json")
        assert names == ("X", "Y", "Z")
        np.testing.assert_array_equal(table.probs, xor_joint.probs)

    def test_joint_json_shape_mismatch_rejected(self, tmp_path):
        path = tmp_path / "j.json"
        path.write_text('{"variables": ["A", "B"], "cardinalities": [2, 2], "probs": [0.5, 0.5]}')
        with pytest.raises(DataError):
            load_joint_json(path)

    def test_joint_json_written_back_unchanged(self, fixtures_dir, tmp_path):
        table, names = load_joint_json(fixtures_dir / "mixed_joint.json")
        payload = joint_to_json(table, names)
        assert payload["variables"] == ["A", "B", "C"]
        assert payload["probs"] == [0.10, 0.05, 0.15, 0.10, 0.20, 0.05, 0.05, 0.30]
