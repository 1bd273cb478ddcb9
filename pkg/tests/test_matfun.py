import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import canonical_j, random_hamiltonian, taylor_expm
from splitlq.errors import DimensionError, InputError, SingularityError
from splitlq.matfun import expm, min_eigenvalue_sym, pade2, symmetry_defect


def test_expm_zero_is_identity():
    assert_allclose(expm(np.zeros((3, 3))), np.eye(3), atol=0.0)


def test_expm_diagonal_closed_form():
    E = expm(np.diag([1.0, -2.0]))
    assert_allclose(E, np.diag([np.e, np.exp(-2.0)]), rtol=1e-14)


def test_expm_matches_taylor_oracle():
    rng = np.random.default_rng(7)
    for _ in range(20):
        M = rng.standard_normal((4, 4))
        M *= 1.0 / max(1.0, np.linalg.norm(M, 1))
        assert np.max(np.abs(expm(M) - taylor_expm(M))) < 1e-13


def test_expm_moderate_norms_against_oracle():
    rng = np.random.default_rng(8)
    for _ in range(5):
        M = rng.standard_normal((5, 5))
        M *= 10.0 / np.linalg.norm(M, 1)
        E = expm(M)
        relerr = np.max(np.abs(E - taylor_expm(M, terms=60))) / np.max(np.abs(E))
        assert relerr < 1e-12


def test_expm_inverse_identity():
    rng = np.random.default_rng(9)
    for _ in range(10):
        M = rng.standard_normal((4, 4))
        M *= 5.0 / np.linalg.norm(M, 1)
        assert np.max(np.abs(expm(M) @ expm(-M) - np.eye(4))) < 1e-12


def test_expm_hamiltonian_is_symplectic():
    rng = np.random.default_rng(10)
    J = canonical_j(2)
    for _ in range(10):
        M = random_hamiltonian(rng, 2)
        E = expm(M)
        assert np.max(np.abs(E.T @ J @ E - J)) < 1e-10


def test_expm_block_diagonal():
    rng = np.random.default_rng(11)
    A = rng.standard_normal((2, 2))
    B = rng.standard_normal((3, 3))
    M = np.zeros((5, 5))
    M[:2, :2] = A
    M[2:, 2:] = B
    E = expm(M)
    assert_allclose(E[:2, :2], expm(A), rtol=0, atol=1e-13)
    assert_allclose(E[2:, 2:], expm(B), rtol=0, atol=1e-13)
    assert np.max(np.abs(E[:2, 2:])) == 0.0


def test_expm_rejects_bad_input():
    with pytest.raises(DimensionError):
        expm(np.ones((2, 3)))
    with pytest.raises(InputError):
        expm(np.array([[np.nan, 0.0], [0.0, 1.0]]))


def test_pade2_zero_step_is_identity():
    M = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert_allclose(pade2(M, 0.0), np.eye(2), atol=0.0)


def test_pade2_scalar_closed_form():
    assert_allclose(pade2(np.array([[1.0]]), 0.1), [[1.05 / 0.95]], rtol=1e-15)


def test_pade2_defect_third_order():
    rng = np.random.default_rng(12)
    M = rng.standard_normal((3, 3))
    h = 0.1
    d1 = np.max(np.abs(pade2(M, h) - expm(h * M)))
    d2 = np.max(np.abs(pade2(M, h / 2) - expm(h / 2 * M)))
    assert d1 / d2 == pytest.approx(8.0, rel=0.15)


def test_pade2_preserves_symplectic_group():
    rng = np.random.default_rng(13)
    J = canonical_j(2)
    for _ in range(10):
        M = random_hamiltonian(rng, 2)
        F = pade2(M, 0.7)
        assert np.max(np.abs(F.T @ J @ F - J)) < 1e-10


def test_pade2_singular_step_reports_h():
    # I - (h/2) M singular at h = 2 for M = I.
    with pytest.raises(SingularityError) as err:
        pade2(np.eye(2), 2.0)
    assert err.value.where == 2.0


def test_symmetry_defect():
    assert symmetry_defect(np.eye(3)) == 0.0
    assert symmetry_defect(np.array([[0.0, 1.0], [0.0, 0.0]])) == 1.0
    rng = np.random.default_rng(14)
    M = rng.standard_normal((4, 4))
    assert symmetry_defect(M + M.T) < 1e-15
    with pytest.raises(DimensionError):
        symmetry_defect(np.ones((2, 3)))


def test_min_eigenvalue_sym():
    assert min_eigenvalue_sym(np.diag([3.0, 1.0, 2.0])) == pytest.approx(1.0)
    assert min_eigenvalue_sym(np.array([[2.0, 1.0], [1.0, 2.0]])) == pytest.approx(1.0)
    rng = np.random.default_rng(15)
    for _ in range(10):
        G = rng.standard_normal((4, 4))
        assert min_eigenvalue_sym(G.T @ G) >= -1e-12
    with pytest.raises(InputError):
        min_eigenvalue_sym(np.array([[0.0, 1.0], [0.0, 0.0]]))
