import numpy as np
import pytest
from hypothesis import given, strategies as st

from crhlab.crherrors import InsufficientDataError, NonFiniteError, ShapeError, UndefinedAlignmentError
from crhlab.linalg import (as_symmetric, effective_rank, eigh, mat_pow, pearson_alignment, pinv, power_law_fit,
                           projection_distance, projector, try_alignment)

from conftest import random_psd


def test_eigh_identity():
    decomp = eigh(np.eye(3))
    assert np.allclose(decomp.eigenvalues, [1.0, 1.0, 1.0])


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_eigh_two_by_two(method):
    decomp = eigh([[2.0, 1.0], [1.0, 2.0]], method=method)
    assert np.allclose(decomp.eigenvalues, [3.0, 1.0])
    assert np.allclose(decomp.eigenvectors[:, 0], np.array([1.0, 1.0]) / np.sqrt(2.0))
    assert np.allclose(np.abs(decomp.eigenvectors[:, 1]), np.array([1.0, 1.0]) / np.sqrt(2.0))
    assert decomp.eigenvectors[0, 1] * decomp.eigenvectors[1, 1] < 0


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_eigh_reconstruction(method, rng):
    a = rng.standard_normal((8, 8))
    a = a + a.T
    decomp = eigh(a, method=method)
    v = decomp.eigenvectors
    assert np.max(np.abs(v.T @ v - np.eye(8))) <= 1e-10
    assert np.max(np.abs(decomp.reconstruct() - a)) <= 1e-9 * max(1.0, np.max(np.abs(a)))
    assert np.all(np.diff(decomp.eigenvalues) <= 0)
    assert np.isclose(decomp.eigenvalues.sum(), np.trace(a), atol=1e-9 * 8 * np.max(np.abs(a)))


def test_jacobi_matches_lapack(rng):
    a = random_psd(rng, 12, 5)
    assert np.allclose(eigh(a, "jacobi").eigenvalues, eigh(a, "lapack").eigenvalues, atol=1e-9)


def test_eigh_sign_convention(rng):
    a = random_psd(rng, 6)
    vectors = eigh(a).eigenvectors
    pivots = np.argmax(np.abs(vectors), axis=0)
    assert np.all(vectors[pivots, np.arange(6)] > 0)


def test_eigh_deterministic(rng):
    a = random_psd(rng, 10)
    first, second = eigh(a), eigh(a.copy())
    assert np.array_equal(first.eigenvalues, second.eigenvalues)
    assert np.array_equal(first.eigenvectors, second.eigenvectors)


def test_eigh_rejects_bad_input():
    with pytest.raises(NonFiniteError):
        eigh([[1.0, np.nan], [np.nan, 1.0]])
    with pytest.raises(ShapeError):
        eigh(np.ones((2, 3)))
    with pytest.raises(ValueError):
        eigh(np.eye(2), method="power")


def test_as_symmetric_symmetrizes():
    sym = as_symmetric([[1.0, 2.0], [0.0, 1.0]])
    assert np.array_equal(sym, sym.T)
    assert sym[0, 1] == 1.0


def test_pinv_examples():
    assert np.allclose(pinv(np.diag([2.0, 0.0])), np.diag([0.5, 0.0]))
    assert np.allclose(pinv(np.eye(4)), np.eye(4))
    assert np.array_equal(pinv(np.zeros((3, 3))), np.zeros((3, 3)))


@given(dim=st.integers(min_value=2, max_value=32), seed=st.integers(min_value=0, max_value=10_000),
       data=st.data())
def test_pinv_moore_penrose(dim, seed, data):
    rank = data.draw(st.integers(min_value=1, max_value=dim))
    rng = np.random.default_rng(seed)
    basis, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    values = rng.uniform(0.1, 10.0, rank) * rng.choice([-1.0, 1.0], size=rank)
    a = (basis[:, :rank] * values) @ basis[:, :rank].T
    p = pinv(a)
    assert np.max(np.abs(a @ p @ a - a)) <= 1e-9 * max(1.0, np.max(np.abs(a)))
    assert np.max(np.abs(p @ a @ p - p)) <= 1e-9 * max(1.0, np.max(np.abs(p)))
    assert np.allclose(a @ p, (a @ p).T, atol=1e-9)
    assert np.allclose(p @ a, (p @ a).T, atol=1e-9)


def test_pinv_rank_three():
    rng = np.random.default_rng(3)
    a = random_psd(rng, 5, 3)
    assert np.allclose(a @ pinv(a) @ a, a, atol=1e-9)


def test_mat_pow_examples():
    assert np.allclose(mat_pow(np.diag([4.0, 0.0]), 0), np.diag([1.0, 0.0]))
    assert np.allclose(mat_pow(np.diag([9.0, 4.0, 0.0]), -1), np.diag([1 / 9, 1 / 4, 0.0]))
    assert np.allclose(mat_pow(np.diag([2.0, 3.0]), 2), np.diag([4.0, 9.0]))


def test_mat_pow_rejects_fractional_power():
    with pytest.raises(ValueError):
        mat_pow(np.eye(2), 0.5)


@pytest.mark.parametrize("m", [-2, -1, 0, 1, 2])
@pytest.mark.parametrize("n", [-2, -1, 0, 1, 2])
def test_mat_pow_group_law(m, n):
    rng = np.random.default_rng(100 + 5 * m + n)
    a = random_psd(rng, 6, 4)
    a = a / np.max(eigh(a).eigenvalues)
    proj = projector(a)
    lhs = mat_pow(a, m) @ mat_pow(a, n)
    rhs = proj @ mat_pow(a, m + n) @ proj
    assert np.allclose(lhs, rhs, atol=1e-8 * max(1.0, np.max(np.abs(rhs))))


def test_mat_pow_spectral_calculus(rng):
    a = random_psd(rng, 7)
    assert np.allclose(mat_pow(a, 2) @ mat_pow(a, -1), mat_pow(a, 1) @ mat_pow(a, 0), atol=1e-8)


def test_projection_distance_examples():
    assert projection_distance(np.eye(3)) == pytest.approx(0.0, abs=1e-15)
    assert projection_distance(np.diag([1.0, 0.0, 1.0])) == pytest.approx(0.0, abs=1e-15)
    assert projection_distance(np.diag([2.0, 0.0])) == pytest.approx(1.0)


def test_projector_is_idempotent(rng):
    a = random_psd(rng, 9, 4)
    assert projection_distance(projector(a)) <= 1e-9


def test_effective_rank_examples():
    assert effective_rank(np.eye(5)) == 5
    assert effective_rank(np.diag([1.0, 1.0, 0.0])) == 2
    assert effective_rank(np.diag([1.0, 1e-3, 1e-12])) == 2
    assert effective_rank(np.zeros((3, 3))) == 0


def test_effective_rank_clamps_negative(caplog):
    assert effective_rank(np.diag([1.0, 0.5, -0.1])) == 2
    assert "clamping" in caplog.text


def test_alignment_examples():
    a = np.array([[1.0, 0.0], [0.0, 0.0]])
    b = np.array([[0.0, 0.0], [0.0, 1.0]])
    assert pearson_alignment(a, b) == pytest.approx(-1.0 / 3.0, abs=1e-12)
    assert pearson_alignment(a, a) == pytest.approx(1.0, abs=1e-12)
    assert pearson_alignment(a, -2.0 * a) == pytest.approx(-1.0, abs=1e-12)


def test_alignment_undefined_for_constant():
    with pytest.raises(UndefinedAlignmentError):
        pearson_alignment(np.ones((3, 3)), np.eye(3))
    assert try_alignment(np.eye(3), np.full((3, 3), 2.0)) is None
    with pytest.raises(ShapeError):
        pearson_alignment(np.eye(2), np.eye(3))


@given(seed=st.integers(min_value=0, max_value=10_000), c=st.floats(min_value=0.01, max_value=100.0),
       b=st.floats(min_value=-10.0, max_value=10.0))
def test_alignment_affine_invariance(seed, c, b):
    rng = np.random.default_rng(seed)
    left = random_psd(rng, 5)
    right = random_psd(rng, 5)
    base = pearson_alignment(left, right)
    assert pearson_alignment(right, left) == pytest.approx(base, abs=1e-10)
    assert pearson_alignment(c * left + b, right) == pytest.approx(base, abs=1e-10)
    assert pearson_alignment(-c * left + b, left) == pytest.approx(-1.0, abs=1e-10)
    assert abs(base) <= 1.0 + 1e-12


def test_power_law_fit_examples():
    fit = power_law_fit([8.0, 4.0, 2.0, 1.0], [64.0, 16.0, 4.0, 1.0], k=4)
    assert fit.exponent == pytest.approx(0.5)
    assert fit.r2 == pytest.approx(1.0)
    same = power_law_fit([5.0, 3.0, 2.0, 0.5], [5.0, 3.0, 2.0, 0.5])
    assert same.exponent == pytest.approx(1.0)
    assert same.n_pairs == 4


def test_power_law_fit_noisy(rng):
    base = np.geomspace(10.0, 0.01, 30)
    spec_a = base ** 2 * np.exp(0.01 * rng.standard_normal(30))
    fit = power_law_fit(spec_a, base)
    assert abs(fit.exponent - 2.0) <= 0.05


def test_power_law_fit_insufficient():
    with pytest.raises(InsufficientDataError):
        power_law_fit([1.0, 0.5, 0.0], [1.0, 0.5, 0.25])
    with pytest.raises(InsufficientDataError):
        power_law_fit([3.0, 2.0, 1.0], [1.0, 1.0, 1.0])


def test_power_law_fit_reverse_pairs():
    fit = power_law_fit([8.0, 4.0, 2.0], [4.0, 2.0, 1.0], reverse_b=True)
    assert fit.exponent == pytest.approx(-1.0)
