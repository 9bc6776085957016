import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from xrealign.criteria import partial_transpose, realign
from xrealign.errors import NotHermitian
from xrealign.numerics import Tolerance, hermitian_eigenvalues, hermitian_eigh, singular_values, trace_norm
from xrealign.states import maximally_mixed, rho1_family, to_matrix

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
complex4 = st.builds(
    lambda re, im: re + 1j * im,
    arrays(np.float64, (4, 4), elements=finite),
    arrays(np.float64, (4, 4), elements=finite),
)


def random_unitary(rng, n=4):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_tolerance_defaults():
    tol = Tolerance()
    assert (tol.eps_herm, tol.eps_psd, tol.eps_eq) == (1e-10, 1e-10, 1e-9)


@pytest.mark.parametrize("bad", [0.0, -1e-3, float("nan"), float("inf")])
def test_tolerance_rejects_non_positive(bad):
    with pytest.raises(ValueError):
        Tolerance(eps_psd=bad)


def test_eigenvalues_of_diagonal():
    np.testing.assert_array_equal(hermitian_eigenvalues(np.diag([1.0, 2.0, 3.0, 4.0])), [1, 2, 3, 4])


def test_eigenvalues_of_scaled_identity():
    np.testing.assert_allclose(hermitian_eigenvalues(np.eye(4) / 4), [0.25] * 4, atol=1e-15)


def test_eigenvalues_of_partially_transposed_rho1():
    # Closed form: 0.25 -+ sqrt(0.24^2 + 0.01) and 0.25 -+ 0.1.
    pt = partial_transpose(to_matrix(rho1_family(0.1, 0.24)))
    np.testing.assert_allclose(hermitian_eigenvalues(pt), [-0.01, 0.15, 0.35, 0.51], atol=1e-14)


def test_non_hermitian_rejected():
    m = np.zeros((4, 4), dtype=complex)
    m[0, 1] = 1e-6
    with pytest.raises(NotHermitian):
        hermitian_eigenvalues(m)
    # Within tolerance the antisymmetric part is ignored.
    hermitian_eigenvalues(m * 1e-5)


def test_eigh_reconstructs_matrix():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = a + a.conj().T
    w, v = hermitian_eigh(h)
    np.testing.assert_allclose(v.conj().T @ v, np.eye(4), atol=1e-13)
    np.testing.assert_allclose((v * w) @ v.conj().T, h, atol=1e-12)


def test_degenerate_and_zero_matrices():
    np.testing.assert_array_equal(hermitian_eigenvalues(np.zeros((4, 4))), np.zeros(4))
    np.testing.assert_allclose(hermitian_eigenvalues(np.ones((4, 4))), [0, 0, 0, 4], atol=1e-14)


def test_singular_values_identity():
    np.testing.assert_allclose(singular_values(np.eye(4)), [1, 1, 1, 1], atol=1e-15)


def test_singular_values_realigned_maximally_mixed():
    np.testing.assert_allclose(
        singular_values(realign(to_matrix(maximally_mixed()))), [0.5, 0, 0, 0], atol=1e-15
    )


def test_singular_values_realigned_rho1_sum():
    # |x - y| + |x + y| + 2 sqrt(0.0725) for the coherence-free block.
    expected = 0.14 + 0.34 + 2 * np.sqrt(0.0725)
    s = singular_values(realign(to_matrix(rho1_family(0.1, 0.24))))
    assert s.sum() == pytest.approx(expected, abs=1e-13)
    assert s.sum() == pytest.approx(1.01852, abs=1e-5)


def test_trace_norm_examples():
    assert trace_norm(np.zeros((4, 4))) == 0.0
    assert trace_norm(to_matrix(rho1_family(0.1, 0.2))) == pytest.approx(1.0, abs=1e-13)
    # CCN boundary quoted to four digits.
    assert trace_norm(realign(to_matrix(rho1_family(0.0, 0.2307)))) == pytest.approx(1.0, abs=1e-3)


def test_batch_agrees_with_numpy_reference():
    rng = np.random.default_rng(11)
    a = rng.normal(size=(10_000, 4, 4)) + 1j * rng.normal(size=(10_000, 4, 4))
    h = a + np.conj(np.swapaxes(a, -1, -2))
    np.testing.assert_allclose(hermitian_eigenvalues(h), np.linalg.eigvalsh(h), atol=1e-12)
    np.testing.assert_allclose(singular_values(a), np.linalg.svd(a, compute_uv=False), atol=1e-12)


def test_characteristic_identities_ten_thousand():
    rng = np.random.default_rng(12)
    a = rng.normal(size=(10_000, 4, 4)) + 1j * rng.normal(size=(10_000, 4, 4))
    h = a + np.conj(np.swapaxes(a, -1, -2))
    w = hermitian_eigenvalues(h)
    trace = np.trace(h, axis1=-2, axis2=-1).real
    det = np.linalg.det(h).real
    np.testing.assert_allclose(w.sum(axis=-1), trace, atol=1e-10)
    np.testing.assert_allclose(np.prod(w, axis=-1), det, rtol=1e-9, atol=1e-9)


def test_trace_norm_invariances_ten_thousand():
    rng = np.random.default_rng(13)
    a = rng.normal(size=(10_000, 4, 4)) + 1j * rng.normal(size=(10_000, 4, 4))
    u = np.stack([random_unitary(rng) for _ in range(10_000)])
    base = trace_norm(a)
    np.testing.assert_allclose(trace_norm(np.conj(np.swapaxes(a, -1, -2))), base, atol=1e-9)
    np.testing.assert_allclose(trace_norm(u @ a), base, atol=1e-9)
    np.testing.assert_allclose(trace_norm(a @ u), base, atol=1e-9)


@settings(max_examples=200, deadline=None)
@given(complex4)
def test_singular_values_sorted_and_non_negative(m):
    s = singular_values(m)
    assert np.all(s >= 0.0)
    assert np.all(np.diff(s) <= 0.0)
    assert np.sum(s) == pytest.approx(trace_norm(m), abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(complex4)
def test_hermitian_spectrum_sum_matches_trace(m):
    h = m + m.conj().T
    w = hermitian_eigenvalues(h)
    scale = max(1.0, np.abs(h).sum())
    assert np.all(np.diff(w) >= 0.0)
    assert w.sum() == pytest.approx(np.trace(h).real, abs=1e-12 * scale)


@settings(max_examples=100, deadline=None)
@given(complex4)
def test_trace_norm_zero_only_for_zero(m):
    if np.any(m != 0):
        assert trace_norm(m) > 0
    else:
        assert trace_norm(m) == 0
