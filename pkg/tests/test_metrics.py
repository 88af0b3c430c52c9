import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from oracles import exhaustive_matching

from dgsnmf.core import FactorPair
from dgsnmf.errors import EmptyInputError, ShapeMismatchError, ZeroColumnError, ZeroNormError
from dgsnmf.metrics import (
    evaluate,
    hoyer_sparsity_map,
    match_endmembers,
    rmse,
    sad,
    sad_matrix,
)

positive_vec = arrays(np.float64, 6, elements=st.floats(0.01, 10))


class TestSad:
    def test_scaled_copy(self):
        m = np.array([0.2, 0.5, 0.9])
        assert sad(m, 3.7 * m) == pytest.approx(0.0, abs=1e-7)

    def test_orthogonal(self):
        assert sad([1, 0], [0, 1]) == pytest.approx(math.pi / 2, abs=1e-12)

    def test_quarter_turn(self):
        assert sad([1, 1], [1, 0]) == pytest.approx(math.pi / 4, abs=1e-12)

    def test_identical_is_exactly_zero(self):
        # clamping keeps a cosine of 1 + ulp from producing nan
        m = np.array([0.1, 0.7, 0.3, 0.9])
        assert sad(m, m) == pytest.approx(0.0, abs=1e-7)
        assert not math.isnan(sad(m, m))

    def test_zero_norm(self):
        with pytest.raises(ZeroNormError):
            sad([0, 0], [1, 0])

    def test_shape(self):
        with pytest.raises(ShapeMismatchError):
            sad([1, 0], [1, 0, 0])

    @given(positive_vec, positive_vec, st.floats(0.01, 100))
    def test_symmetric_and_scale_invariant(self, a, b, c):
        assert sad(a, b) == sad(b, a)
        assert sad(a, c * b) == pytest.approx(sad(a, b), abs=1e-7)
        assert 0.0 <= sad(a, b) <= math.pi

    def test_matrix_agrees_with_pairwise(self, rng):
        A = rng.uniform(0, 1, (7, 3))
        B = rng.uniform(0, 1, (7, 4))
        S = sad_matrix(A, B)
        for i in range(3):
            for j in range(4):
                assert S[i, j] == pytest.approx(sad(A[:, i], B[:, j]), abs=1e-14)


class TestRmse:
    def test_identical(self):
        assert rmse([0.3, 0.4], [0.3, 0.4]) == 0.0

    def test_hand_value(self):
        assert rmse([0, 0], [3, 4]) == pytest.approx(3.5355339059327378, abs=1e-12)

    @given(arrays(np.float64, st.integers(1, 30), elements=st.floats(-5, 5)), st.floats(-3, 3))
    def test_constant_offset(self, z, c):
        assert rmse(z, z + c) == pytest.approx(abs(c), abs=1e-9)

    def test_empty(self):
        with pytest.raises(EmptyInputError):
            rmse([], [])

    def test_shape(self):
        with pytest.raises(ShapeMismatchError):
            rmse([1.0], [1.0, 2.0])


class TestMatching:
    @pytest.mark.parametrize("seed", range(5))
    def test_recovers_permutation(self, seed):
        rng = np.random.default_rng(seed)
        M = rng.uniform(0, 1, (10, 5))
        pi = rng.permutation(5)
        perm = match_endmembers(M[:, pi], M)
        np.testing.assert_array_equal(perm, pi)

    def test_two_endmember_swap(self):
        M_true = np.array([[1.0, 0.0], [0.0, 1.0]])
        M_hat = np.array([[0.1, 0.9], [0.9, 0.1]])
        np.testing.assert_array_equal(match_endmembers(M_hat, M_true), [1, 0])

    @pytest.mark.parametrize("seed", range(20))
    def test_optimal_against_exhaustive(self, seed):
        rng = np.random.default_rng(seed)
        K = int(rng.integers(2, 7))
        M_hat = rng.uniform(0, 1, (8, K))
        M_true = rng.uniform(0, 1, (8, K))
        perm = match_endmembers(M_hat, M_true)
        _, best = exhaustive_matching(M_hat, M_true)
        S = sad_matrix(M_hat, M_true)
        total = S[np.arange(K), perm].sum()
        assert total == pytest.approx(best, abs=1e-12)
        assert total <= np.trace(S) + 1e-12
        assert sorted(perm) == list(range(K))

    def test_ties_go_to_lowest_index(self):
        M = np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
        np.testing.assert_array_equal(match_endmembers(M, M), [0, 1, 2])
        np.testing.assert_array_equal(match_endmembers(np.ones((3, 4)), np.ones((3, 4))), [0, 1, 2, 3])

    @pytest.mark.parametrize("seed", range(10))
    def test_ties_match_exhaustive_first(self, seed):
        rng = np.random.default_rng(seed)
        base = rng.uniform(0, 1, (6, 3))
        M_true = base[:, rng.integers(0, 3, size=5)]
        M_hat = base[:, rng.integers(0, 3, size=5)]
        expected, _ = exhaustive_matching(M_hat, M_true)
        np.testing.assert_array_equal(match_endmembers(M_hat, M_true), expected)

    def test_shape(self):
        with pytest.raises(ShapeMismatchError):
            match_endmembers(np.ones((3, 2)), np.ones((3, 3)))


class TestHoyer:
    def test_one_hot(self):
        assert hoyer_sparsity_map(np.array([[0.0], [1.0], [0.0], [0.0]]))[0] == pytest.approx(1.0, abs=1e-15)

    def test_uniform(self):
        assert hoyer_sparsity_map(np.full((4, 1), 0.25))[0] == pytest.approx(0.0, abs=1e-15)

    def test_hand_value(self):
        expected = (math.sqrt(2) - 4 / math.sqrt(10)) / (math.sqrt(2) - 1)
        assert expected == pytest.approx(0.3604481163059116, abs=1e-15)
        assert hoyer_sparsity_map(np.array([[3.0], [1.0]]))[0] == pytest.approx(expected, abs=1e-12)

    @settings(max_examples=50)
    @given(arrays(np.float64, (3, 5), elements=st.floats(0.01, 10)), st.floats(0.01, 100))
    def test_scale_invariance(self, A, c):
        np.testing.assert_allclose(hoyer_sparsity_map(c * A), hoyer_sparsity_map(A), rtol=0, atol=1e-12)

    def test_zero_column(self):
        with pytest.raises(ZeroColumnError) as err:
            hoyer_sparsity_map(np.array([[1.0, 0.0, 2.0], [0.0, 0.0, 1.0]]))
        assert err.value.column == 1

    def test_single_endmember(self):
        with pytest.raises(ShapeMismatchError):
            hoyer_sparsity_map(np.ones((1, 4)))


def truth(seed, L=8, K=3, N=12):
    rng = np.random.default_rng(seed)
    A = rng.uniform(0, 1, (K, N))
    return FactorPair(rng.uniform(0.1, 1, (L, K)), A / A.sum(axis=0)), rng


class TestEvaluate:
    def test_identity(self):
        f, _ = truth(0)
        rep = evaluate(f, f)
        np.testing.assert_array_equal(rep.matching, [0, 1, 2])
        assert np.all(rep.sad_per_endmember < 1e-7)
        assert np.all(rep.rmse_per_abundance == 0.0)

    def test_permuted_and_scaled(self):
        f, rng = truth(1)
        pi = np.array([2, 0, 1])
        c = np.array([2.0, 0.5, 4.0])
        est = FactorPair(f.endmembers[:, pi] * c, f.abundances[pi] / c[:, None])
        rep = evaluate(est, f)
        np.testing.assert_array_equal(rep.matching, pi)
        assert rep.mean_sad == pytest.approx(0.0, abs=1e-7)
        expected = [rmse(f.abundances[pi[i]], f.abundances[pi[i]] / c[i]) for i in range(3)]
        np.testing.assert_allclose(rep.rmse_per_abundance, expected, rtol=1e-14)
        assert np.all(rep.rmse_per_abundance > 0)
        # per-pixel normalization undoes a scaling that is uniform across rows
        same = FactorPair(est.endmembers, f.abundances[pi] * 3.0)
        assert evaluate(same, f, normalize_pixels=True).mean_rmse == pytest.approx(0.0, abs=1e-15)

    @pytest.mark.parametrize("seed", range(5))
    def test_means_are_averages(self, seed):
        f, rng = truth(seed)
        est = FactorPair(f.endmembers + rng.uniform(0, 0.2, f.endmembers.shape),
                         f.abundances + rng.uniform(0, 0.2, f.abundances.shape))
        rep = evaluate(est, f)
        assert rep.mean_sad == pytest.approx(rep.sad_per_endmember.sum() / 3, abs=1e-12)
        assert rep.mean_rmse == pytest.approx(rep.rmse_per_abundance.sum() / 3, abs=1e-12)
        rows = list(rep.rows())
        assert len(rows) == 3
        assert rows[0][3] == pytest.approx(math.degrees(rows[0][2]))

    @pytest.mark.parametrize("seed", range(5))
    def test_invariant_to_truth_ordering(self, seed):
        f, rng = truth(seed)
        est = FactorPair(f.endmembers + rng.uniform(0, 0.3, f.endmembers.shape),
                         f.abundances + rng.uniform(0, 0.3, f.abundances.shape))
        pi = rng.permutation(3)
        shuffled = FactorPair(f.endmembers[:, pi], f.abundances[pi])
        a, b = evaluate(est, f), evaluate(est, shuffled)
        np.testing.assert_array_equal(pi[b.matching], a.matching)
        np.testing.assert_array_equal(a.sad_per_endmember, b.sad_per_endmember)
        np.testing.assert_array_equal(a.rmse_per_abundance, b.rmse_per_abundance)

    def test_shape(self):
        f, _ = truth(0)
        g, _ = truth(0, K=2)
        with pytest.raises(ShapeMismatchError):
            evaluate(f, g)
