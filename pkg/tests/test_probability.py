import math

import numpy as np
import pytest

from _helpers import H01, binary_entropy, dsbs_source, random_joint
from mtrd.probability import (
    ProbTensor,
    conditional,
    dsbs,
    entropy,
    iid_extend,
    join,
    marginal,
    mutual_information,
    source_from_config,
    source_to_config,
    tensor_from_config,
    tensor_to_config,
)


class TestProbTensor:
    def test_rejects_negative_entries(self):
        with pytest.raises(ValueError, match="negative"):
            ProbTensor(("U",), [1.1, -0.1])

    def test_rejects_bad_normalization(self):
        with pytest.raises(ValueError, match="sum"):
            ProbTensor(("U",), [0.6, 0.5])

    def test_rejects_duplicate_axes(self):
        with pytest.raises(ValueError, match="unique"):
            ProbTensor(("U", "U"), np.full((2, 2), 0.25))

    def test_values_are_immutable(self):
        t = dsbs(0.1)
        with pytest.raises(ValueError):
            t.values[0, 0] = 0.9


class TestMarginal:
    def test_uniform_marginal(self):
        t = ProbTensor(("U", "V"), np.full((2, 2), 0.25))
        m = marginal(t, {"U"})
        assert m.axes == ("U",)
        np.testing.assert_allclose(m.values, [0.5, 0.5])

    def test_dsbs_row_sums(self):
        m = marginal(dsbs(0.1), {"U"})
        np.testing.assert_allclose(m.values, [0.5, 0.5], atol=1e-15)

    def test_keep_all_is_identity(self):
        t = dsbs(0.1)
        m = marginal(t, {"U", "V"})
        np.testing.assert_array_equal(m.values, t.values)

    def test_unknown_axis(self):
        with pytest.raises(KeyError, match="unknown axis"):
            marginal(dsbs(0.1), {"W"})

    def test_normalization_preserved(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            t = random_joint(rng, (2, 3, 2), ("A", "B", "C"))
            assert abs(marginal(t, {"A", "C"}).values.sum() - 1) < 1e-10


class TestConditional:
    def test_independent_product(self):
        pu = np.array([0.3, 0.7])
        pv = np.array([0.6, 0.4])
        t = ProbTensor(("U", "V"), np.outer(pu, pv))
        k = conditional(t, target=("U",), given=("V",))
        for v in range(2):
            np.testing.assert_allclose(k.values[v], pu, atol=1e-12)

    def test_dsbs_posterior(self):
        k = conditional(dsbs(0.1), target=("V",), given=("U",))
        np.testing.assert_allclose(k.values[0], [0.9, 0.1], atol=1e-12)

    def test_zero_mass_slice_flagged(self):
        t = ProbTensor(("U", "V"), [[0.5, 0.5], [0.0, 0.0]])
        k = conditional(t, target=("V",), given=("U",))
        assert k.defined[0] and not k.defined[1]
        np.testing.assert_array_equal(k.values[1], [0.0, 0.0])

    def test_overlapping_axes_rejected(self):
        with pytest.raises(ValueError, match="overlap"):
            conditional(dsbs(0.1), target=("U",), given=("U",))


class TestIidExtend:
    def test_n1_identity(self):
        t = dsbs(0.1)
        assert iid_extend(t, 1) is t

    def test_dsbs_square(self):
        e = iid_extend(dsbs(0.1), 2)
        assert e.axes == ("U^2", "V^2")
        assert abs(e.values[0, 0] - 0.45**2) < 1e-15

    def test_sums_to_one(self):
        rng = np.random.default_rng(1)
        t = random_joint(rng, (3, 2), ("U", "V"))
        assert abs(iid_extend(t, 3).values.sum() - 1) < 1e-10

    def test_letter_marginals_match_base(self):
        rng = np.random.default_rng(2)
        t = random_joint(rng, (2, 3), ("U", "V"))
        n = 3
        e = iid_extend(t, n)
        cube = e.values.reshape((2,) * n + (3,) * n)
        for i in range(n):
            axes = tuple(a for a in range(2 * n) if a not in (i, n + i))
            np.testing.assert_allclose(cube.sum(axis=axes), t.values, atol=1e-12)

    def test_memory_cap(self):
        with pytest.raises(ValueError, match="cap"):
            iid_extend(dsbs(0.1), 3, max_cells=10)


class TestJoin:
    def test_deterministic_channel(self):
        ch = np.zeros((2, 2, 2, 2))
        for u in range(2):
            for v in range(2):
                ch[u, v, u, v] = 1.0
        j = join(dsbs(0.1), ch)
        assert abs(j.values[0, 0, 0, 0] - 0.45) < 1e-15

    def test_uniform_channel_gives_independence(self):
        j = join(dsbs(0.1), np.full((2, 2, 2, 2), 0.25))
        assert abs(mutual_information(j, ("U", "V"), ("X1", "X2"))) < 1e-12

    def test_marginal_consistency(self):
        rng = np.random.default_rng(3)
        src = random_joint(rng, (2, 3), ("U", "V"))
        ch = rng.dirichlet(np.ones(4), size=(2, 3)).reshape(2, 3, 2, 2)
        j = join(src, ch)
        np.testing.assert_allclose(
            marginal(j, ("U", "V")).values, src.values, atol=1e-12
        )

    def test_size_mismatch(self):
        with pytest.raises(ValueError, match="match"):
            join(dsbs(0.1), np.full((3, 2, 2, 2), 1 / 4))


class TestInformationMeasures:
    def test_independent_mi_zero(self):
        t = ProbTensor(("U", "V"), np.outer([0.3, 0.7], [0.6, 0.4]))
        assert abs(mutual_information(t, ("U",), ("V",))) < 1e-12

    def test_identical_uniform_bit(self):
        t = ProbTensor(("X", "Y"), np.diag([0.5, 0.5]))
        assert abs(mutual_information(t, ("X",), ("Y",)) - 1.0) < 1e-12

    def test_dsbs_mutual_information(self):
        got = mutual_information(dsbs(0.1), ("U",), ("V",))
        assert abs(got - (1 - H01)) < 1e-12

    def test_joint_entropy_via_identity_encoders(self):
        ch = np.zeros((2, 2, 2, 2))
        for u in range(2):
            for v in range(2):
                ch[u, v, u, v] = 1.0
        j = join(dsbs(0.1), ch)
        got = mutual_information(j, ("U", "V"), ("X1", "X2"))
        assert abs(got - (1 + H01)) < 1e-12

    def test_chain_rule(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            t = random_joint(rng, (2, 2, 2, 2), ("U", "V", "X1", "X2"))
            lhs = mutual_information(t, ("U", "V"), ("X1", "X2"))
            rhs = mutual_information(t, ("U", "V"), ("X1",)) + mutual_information(
                t, ("U", "V"), ("X2",), given=("X1",)
            )
            assert abs(lhs - rhs) < 1e-10

    def test_nonnegativity_floor(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            t = random_joint(rng, (3, 2, 2), ("A", "B", "C"))
            assert mutual_information(t, ("A",), ("B",), given=("C",)) > -1e-10
            assert entropy(t, ("A",)) > -1e-10

    def test_entropy_of_point_mass(self):
        t = ProbTensor(("X",), [1.0, 0.0])
        assert entropy(t) == 0.0

    def test_disjointness_enforced(self):
        with pytest.raises(ValueError, match="disjoint"):
            mutual_information(dsbs(0.1), ("U",), ("U",))

    def test_binary_entropy_oracle(self):
        # freeze the analytic constant used across the suite
        assert abs(H01 - 0.4689955935892812) < 1e-15
        assert binary_entropy(0.5) == 1.0


class TestConfigRoundTrip:
    def test_tensor_round_trip(self):
        t = dsbs(0.1)
        back = tensor_from_config(tensor_to_config(t))
        assert back.axes == t.axes
        np.testing.assert_array_equal(back.values, t.values)

    def test_source_round_trip(self):
        src = dsbs_source(0.1)
        back = source_from_config(source_to_config(src))
        np.testing.assert_array_equal(back.p_uv.values, src.p_uv.values)
        np.testing.assert_array_equal(back.d1, src.d1)
        np.testing.assert_array_equal(back.d2, src.d2)

    def test_declared_sizes_checked(self):
        cfg = tensor_to_config(dsbs(0.1))
        cfg["sizes"] = [3, 2]
        with pytest.raises(ValueError, match="sizes"):
            tensor_from_config(cfg)
