import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sdcs import linalg
from sdcs.quantize import difference_matrix


class TestSvd:
    def test_identity(self):
        s, u, vt = linalg.svd(np.eye(3))
        assert np.allclose(s, [1, 1, 1])

    def test_permuted_diagonal(self):
        a = np.diag([3.0, 2.0, 1.0])[[2, 0, 1]]
        s, _, _ = linalg.svd(a)
        assert np.allclose(s, [3, 2, 1])

    def test_difference_matrix_closed_form(self):
        # sigma_j(D) = 2 cos(pi j / (2m+1))
        m = 5
        s, _, _ = linalg.svd(difference_matrix(m))
        expected = 2 * np.cos(np.pi * np.arange(1, 6) / 11)
        assert np.allclose(s, expected, atol=1e-12)

    @pytest.mark.parametrize("shape", [(4, 3), (3, 4), (10, 10), (50, 7)])
    def test_reconstruction_and_orthonormality(self, shape):
        rng = np.random.default_rng(hash(shape) % 2**32)
        a = rng.normal(size=shape)
        s, u, vt = linalg.svd(a)
        scale = max(1.0, np.linalg.norm(a))
        assert np.linalg.norm(a - (u * s) @ vt) <= 1e-10 * scale
        assert np.abs(u.T @ u - np.eye(u.shape[1])).max() <= 1e-10
        assert np.abs(vt @ vt.T - np.eye(vt.shape[0])).max() <= 1e-10

    def test_descending_order(self):
        rng = np.random.default_rng(0)
        s = linalg.singular_values(rng.normal(size=(20, 6)))
        assert np.all(np.diff(s) <= 1e-12 * s[0])

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            linalg.svd(np.array([[1.0, np.nan], [0.0, 1.0]]))


class TestPseudoInverse:
    def test_identity(self):
        b = np.array([1.0, -2.0, 3.0])
        assert np.allclose(linalg.pseudo_inverse_apply(np.eye(3), b), b)

    def test_hand_normal_equation(self):
        # A = [[1],[1]], b = (1,3): (A^T A)^{-1} A^T b = 4/2 = 2
        x = linalg.pseudo_inverse_apply(np.array([[1.0], [1.0]]), np.array([1.0, 3.0]))
        assert np.allclose(x, [2.0])

    def test_orthonormal_consistency(self):
        rng = np.random.default_rng(1)
        q, _ = np.linalg.qr(rng.normal(size=(12, 4)))
        x0 = rng.normal(size=4)
        assert np.allclose(linalg.pseudo_inverse_apply(q, q @ x0), x0, atol=1e-10)

    def test_residual_orthogonal_to_columns(self):
        rng = np.random.default_rng(2)
        a = rng.normal(size=(15, 4))
        b = rng.normal(size=15)
        x = linalg.pseudo_inverse_apply(a, b)
        resid = a @ x - b
        assert np.abs(a.T @ resid).max() <= 1e-8 * np.linalg.norm(b) * np.linalg.norm(a)

    def test_rank_deficiency_reports_ratio(self):
        a = np.array([[1.0, 1.0], [1.0, 1.0], [1.0, 1.0]])
        with pytest.raises(linalg.RankDeficientError) as exc:
            linalg.pseudo_inverse_apply(a, np.ones(3))
        assert exc.value.sigma_max > 0


class TestApplyInversePower:
    def test_cumulative_sum(self):
        # D x = 1 vector: forward substitution gives running sums
        x = linalg.apply_inverse_power(difference_matrix(3), 1, np.ones(3))
        assert np.allclose(x, [1, 2, 3])

    def test_zero_power_is_identity(self):
        b = np.arange(6.0).reshape(3, 2)
        assert np.array_equal(linalg.apply_inverse_power(difference_matrix(3), 0, b), b)

    def test_double_cumsum_of_e1(self):
        e1 = np.array([1.0, 0.0, 0.0])
        x = linalg.apply_inverse_power(difference_matrix(3), 2, e1)
        assert np.allclose(x, [1, 2, 3])

    @pytest.mark.parametrize("r", [1, 2, 3, 4])
    @pytest.mark.parametrize("m", [5, 40, 200])
    def test_roundtrip(self, r, m):
        rng = np.random.default_rng(r * 1000 + m)
        d = difference_matrix(m)
        x = rng.normal(size=(m, 3))
        b = np.linalg.matrix_power(d, r) @ x
        rec = linalg.apply_inverse_power(d, r, b)
        # accuracy is limited by cond(D^r) ~ ((2m+1)/pi)^r
        cond = ((2 * m + 1) / np.pi) ** r
        tol = max(1e-12, 100 * np.finfo(float).eps * cond)
        assert np.linalg.norm(rec - x) <= tol * np.linalg.norm(x)

    def test_residual_bound(self):
        rng = np.random.default_rng(5)
        m = 50
        d = difference_matrix(m)
        b = rng.normal(size=(m, 2))
        x = linalg.apply_inverse_power(d, 3, b)
        resid = np.linalg.matrix_power(d, 3) @ x - b
        assert np.linalg.norm(resid) <= 1e-10 * np.linalg.norm(b)

    def test_zero_diagonal_fails(self):
        h = np.array([[0.0, 0.0], [-1.0, 1.0]])
        with pytest.raises(ZeroDivisionError):
            linalg.apply_inverse_power(h, 1, np.ones(2))

    def test_transposed_variant(self):
        rng = np.random.default_rng(6)
        d = difference_matrix(10)
        b = rng.normal(size=(10, 2))
        x = linalg.apply_inverse_power_transposed(d, 2, b)
        assert np.allclose(np.linalg.matrix_power(d.T, 2) @ x, b, atol=1e-10)


class TestOperatorNorms:
    def test_norm2_zero(self):
        assert linalg.operator_norm_2(np.zeros((4, 4))) == 0.0

    def test_norm2_difference_matrix(self):
        assert np.isclose(
            linalg.operator_norm_2(difference_matrix(10)), 2 * np.cos(np.pi / 21)
        )

    def test_norm2_sphere_sampling_oracle(self):
        rng = np.random.default_rng(7)
        a = rng.normal(size=(4, 3))
        xs = rng.normal(size=(10_000, 3))
        xs /= np.linalg.norm(xs, axis=1, keepdims=True)
        oracle = np.linalg.norm(xs @ a.T, axis=1).max()
        norm = linalg.operator_norm_2(a)
        assert norm >= oracle - 1e-12
        assert norm - oracle <= 1e-3 * norm

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_norm2_dominates_rayleigh_quotients(self, seed):
        rng = np.random.default_rng(seed)
        a = rng.normal(size=(6, 4))
        x = rng.normal(size=4)
        if np.linalg.norm(x) == 0:
            return
        assert linalg.operator_norm_2(a) >= np.linalg.norm(a @ x) / np.linalg.norm(
            x
        ) - 1e-10

    def test_norm_inf_identity(self):
        assert linalg.operator_norm_inf(np.eye(5)) == 1.0

    def test_norm_inf_all_ones(self):
        assert linalg.operator_norm_inf(np.ones((7, 4))) == 4.0

    def test_norm_inf_row_sums(self):
        assert linalg.operator_norm_inf(np.array([[1.0, -2.0], [3.0, 0.0]])) == 3.0


def test_sigma_min_consistency_with_dual_norm():
    # sigma_min(D^{-r} E) equals 1 / ||(D^{-r} E)^dagger||_op
    rng = np.random.default_rng(8)
    d = difference_matrix(30)
    e = rng.normal(size=(30, 4))
    de = linalg.apply_inverse_power(d, 2, e)
    smin = linalg.singular_values(de)[-1]
    pinv_norm = linalg.operator_norm_2(linalg.pseudo_inverse(de))
    assert np.isclose(smin, 1.0 / pinv_norm, rtol=1e-10)
