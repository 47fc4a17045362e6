import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from addlab.channels import tensor, werner_holevo
from addlab.linalg import (
    ConvergenceError,
    as_hermitian,
    check_density,
    clamp_spectrum,
    eig_hermitian,
    haar_unitary,
    is_hermitian,
    jacobi_eigh,
    kron,
    matrix_from_dict,
    matrix_to_dict,
    partial_trace,
    random_density,
    random_hermitian,
    spectral_apply,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_kron_examples():
    assert np.allclose(kron(np.eye(2), np.eye(2)), np.eye(4))
    assert np.allclose(kron(np.diag([1, 0]), np.diag([1, 0])), np.diag([1, 0, 0, 0]))
    assert np.allclose(kron(np.eye(3) / 3, np.eye(3) / 3), np.eye(9) / 9)


def test_partial_trace_examples():
    rng = np.random.default_rng(1)
    rho, sigma = random_density(2, rng), random_density(3, rng)
    assert np.allclose(partial_trace(np.kron(rho, 2 * sigma), (2, 3), keep="left"), 2 * rho)
    bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
    assert np.allclose(partial_trace(np.outer(bell, bell), (2, 2), keep="left"), np.eye(2) / 2)
    assert np.allclose(partial_trace(np.eye(9) / 9, (3, 3), keep="left"), np.eye(3) / 3)
    assert np.allclose(partial_trace(np.kron(rho, sigma), (2, 3), keep="right"), sigma)


def test_partial_trace_rejects_bad_shape():
    with pytest.raises(ValueError):
        partial_trace(np.eye(6), (2, 2))
    with pytest.raises(ValueError):
        partial_trace(np.eye(4), (2, 2), keep="middle")


def test_eig_examples():
    w, _ = eig_hermitian(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(w, [3, 2, 1])
    w, _ = eig_hermitian(np.array([[0, 1], [1, 0]]))
    assert np.allclose(w, [1, -1])
    out = tensor(werner_holevo(3), werner_holevo(3)).map(np.diag(np.eye(9)[0]).astype(complex))
    w, _ = eig_hermitian(out)
    assert np.allclose(w, np.r_[[0.25] * 4, [0.0] * 5], atol=1e-9)


def test_spectral_apply_examples():
    assert np.allclose(spectral_apply(lambda x: x * x, np.diag([0.5, 0.5])), np.diag([0.25, 0.25]))
    m = random_hermitian(4, np.random.default_rng(2))
    assert np.allclose(spectral_apply(lambda x: x, m), m, atol=1e-12)
    a = np.array([[0.5, 0.25], [0.25, 0.5]])
    assert np.allclose(spectral_apply(lambda x: x**3, a), a @ a @ a, atol=1e-14)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, d=st.integers(1, 16))
def test_jacobi_reconstruction_and_trace(seed, d):
    m = random_hermitian(d, np.random.default_rng(seed))
    w, v = eig_hermitian(m)
    assert np.abs((v * w) @ v.conj().T - m).max() <= 1e-9
    assert abs(w.sum() - np.trace(m).real) <= 1e-9
    assert np.all(np.diff(w) <= 0)
    assert np.allclose(v.conj().T @ v, np.eye(d), atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(seed=seeds, d=st.integers(1, 12))
def test_jacobi_matches_lapack(seed, d):
    m = random_hermitian(d, np.random.default_rng(seed))
    assert np.allclose(jacobi_eigh(m)[0], np.linalg.eigvalsh(m), atol=1e-10)


def test_jacobi_degenerate_spectrum():
    u = haar_unitary(5, np.random.default_rng(3))
    m = (u * np.array([1.0, 1.0, 1.0, -2.0, -2.0])) @ u.conj().T
    w, v = jacobi_eigh(m)
    assert np.allclose(w, [-2, -2, 1, 1, 1], atol=1e-12)
    assert np.abs((v * w) @ v.conj().T - m).max() < 1e-12


def test_jacobi_sweep_cap():
    m = random_hermitian(6, np.random.default_rng(4))
    with pytest.raises(ConvergenceError):
        jacobi_eigh(m, max_sweeps=1)


@settings(max_examples=20, deadline=None)
@given(seed=seeds, da=st.integers(2, 3), db=st.integers(2, 3))
def test_kron_spectrum_is_pairwise_products(seed, da, db):
    rng = np.random.default_rng(seed)
    a, b = random_hermitian(da, rng), random_hermitian(db, rng)
    expected = np.sort(np.outer(np.linalg.eigvalsh(a), np.linalg.eigvalsh(b)).ravel())
    assert np.allclose(np.sort(np.linalg.eigvalsh(kron(a, b))), expected, atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(seed=seeds, d1=st.integers(1, 4), d2=st.integers(1, 4))
def test_partial_trace_of_product(seed, d1, d2):
    rng = np.random.default_rng(seed)
    rho, sigma = random_density(d1, rng), random_density(d2, rng)
    assert np.abs(partial_trace(kron(rho, sigma), (d1, d2), keep="left") - rho).max() <= 1e-12


@settings(max_examples=30, deadline=None)
@given(seed=seeds, d=st.integers(2, 9), coeffs=st.lists(st.floats(-2, 2), min_size=1, max_size=5))
def test_spectral_polynomial_matches_horner(seed, d, coeffs):
    m = random_hermitian(d, np.random.default_rng(seed))
    horner = np.zeros((d, d), dtype=complex)
    for c in coeffs:
        horner = horner @ m + c * np.eye(d)
    poly = spectral_apply(lambda x: np.polyval(coeffs, x), m)
    assert np.abs(poly - horner).max() <= 1e-8 * max(1.0, np.abs(horner).max())


def test_hermitian_validation():
    assert is_hermitian(np.eye(2))
    assert not is_hermitian(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValueError):
        as_hermitian(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValueError):
        as_hermitian(np.ones((2, 3)))
    with pytest.raises(ValueError):
        as_hermitian(np.array([[np.nan, 0], [0, 1]]))


def test_density_validation():
    check_density(np.eye(3) / 3)
    with pytest.raises(ValueError):
        check_density(np.eye(3))
    with pytest.raises(ValueError):
        check_density(np.diag([1.5, -0.5]))


def test_clamp_spectrum():
    assert np.array_equal(clamp_spectrum([-1e-15, 1 + 1e-12, 0.5]), [0.0, 1.0, 0.5])
    with pytest.raises(ValueError):
        clamp_spectrum([-1e-6, 0.5])
    with pytest.raises(ValueError):
        spectral_apply(np.sqrt, np.diag([2.0, 0.1]), domain=(0.0, 1.0))


def test_haar_unitary_is_unitary_and_seeded():
    u = haar_unitary(5, np.random.default_rng(7))
    assert np.allclose(u @ u.conj().T, np.eye(5), atol=1e-12)
    assert np.array_equal(u, haar_unitary(5, np.random.default_rng(7)))


def test_random_density_is_density():
    rng = np.random.default_rng(8)
    for rank in (None, 1, 2):
        rho = random_density(4, rng, rank=rank)
        check_density(rho)
        if rank is not None:
            assert np.sum(np.linalg.eigvalsh(rho) > 1e-10) == rank


def test_matrix_dict_round_trip():
    rng = np.random.default_rng(9)
    for shape in ((3, 3), (2, 4)):
        m = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        d = matrix_to_dict(m)
        assert np.array_equal(matrix_from_dict(d), m)
    with pytest.raises(ValueError):
        matrix_from_dict({"dim": 2, "re": [1, 2, 3], "im": [0, 0, 0]})
