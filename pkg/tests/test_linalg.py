import numpy as np
import pytest
import scipy.linalg as sla

from tenfold import linalg as la

J2 = np.array([[0.0, 1.0], [-1.0, 0.0]])


def haar_unitary(n, rng):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_is_in_set_examples():
    assert la.is_in_set(np.eye(4), "compact-symplectic")
    assert la.is_in_set(la.symplectic_j(4), "orthogonal")
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert la.is_in_set(0.5 * (np.eye(2) + swap), "projection-rank-n", rank=1)
    assert not la.is_in_set(np.diag([1.0, 0.4]), "projection-rank-n", rank=1)
    with pytest.raises(la.StructureError):
        la.is_in_set(np.eye(3), "compact-symplectic")


def test_hermitian_eig():
    w, v = la.hermitian_eig(np.diag([3.0, 1.0]))
    assert np.allclose(w, [1.0, 3.0])
    # sigma_x: characteristic polynomial lambda^2 - 1 gives eigenvalues -1, 1
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    w, v = la.hermitian_eig(sx)
    assert np.allclose(w, [-1.0, 1.0])
    assert la.max_abs(v @ np.diag(w) @ v.conj().T - sx) < 1e-12
    w, _ = la.hermitian_eig(np.eye(5))
    assert np.allclose(w, 1.0)
    with pytest.raises(la.StructureError):
        la.hermitian_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_polar_unitary():
    assert la.max_abs(la.polar_unitary(2.0 * np.eye(3)) - np.eye(3)) < 1e-12
    assert la.max_abs(la.polar_unitary(np.diag([2.0, -3.0])) - np.diag([1.0, -1.0])) < 1e-12
    rng = np.random.default_rng(0)
    u = haar_unitary(4, rng)
    assert la.max_abs(la.polar_unitary(u) - u) < 1e-12
    # polar(U H) = U for hermitian positive definite H
    h = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    h = h @ h.conj().T + 0.5 * np.eye(4)
    assert la.max_abs(la.polar_unitary(u @ h) - u) < 1e-9
    with pytest.raises(la.SpectralGapError):
        la.polar_unitary(np.diag([1.0, 0.0]))


def test_principal_log_unitary():
    assert la.max_abs(la.principal_log_unitary(np.eye(3))) < 1e-12
    x = la.principal_log_unitary(np.diag([1j, -1j]))
    assert np.allclose(np.diag(x), [1j * np.pi / 2, -1j * np.pi / 2])
    with pytest.raises(la.BranchCutError):
        la.principal_log_unitary(-np.eye(2))
    # log after exp is the identity on generators with spectral radius < pi - 0.1
    rng = np.random.default_rng(1)
    for _ in range(20):
        a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        x = 0.5 * (a - a.conj().T)
        x *= (np.pi - 0.2) / max(np.pi - 0.2, np.max(np.abs(np.linalg.eigvals(x))))
        back = la.principal_log_unitary(sla.expm(x))
        assert la.max_abs(back - x) < 1e-8


def test_log_unitary_auto_rotates_cut():
    x = la.log_unitary_auto(-np.eye(2))
    assert la.max_abs(sla.expm(x) + np.eye(2)) < 1e-9


def test_real_skew_log_so():
    assert la.max_abs(la.real_skew_log_so(np.eye(4))) < 1e-12
    theta = np.pi / 2
    rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    x = la.real_skew_log_so(rot)
    # closed form for the 2x2 rotation log, up to the sign convention
    assert la.max_abs(np.abs(x) - np.abs(np.array([[0, theta], [theta, 0]]))) < 1e-9
    assert la.max_abs(sla.expm(x) - rot) < 1e-9
    with pytest.raises(la.StructureError):
        la.real_skew_log_so(np.diag([1.0, 1.0, -1.0]))
    # -1 eigenvalue pairs are handled
    r = np.diag([-1.0, -1.0, 1.0])
    x = la.real_skew_log_so(r)
    assert la.max_abs(x + x.T) < 1e-12 and la.max_abs(sla.expm(x) - r) < 1e-9
    rng = np.random.default_rng(2)
    for _ in range(10):
        q, _ = np.linalg.qr(rng.standard_normal((5, 5)))
        if np.linalg.det(q) < 0:
            q[:, 0] = -q[:, 0]
        x = la.real_skew_log_so(q)
        assert la.max_abs(x.imag) == 0 and la.max_abs(x + x.T) < 1e-9
        assert la.max_abs(sla.expm(x) - q) < 1e-8


def test_symplectic_log():
    j4 = la.symplectic_j(4)
    assert la.max_abs(la.symplectic_log(np.eye(4, dtype=complex))) < 1e-12
    x = la.symplectic_log(sla.expm(0.1 * j4).astype(complex))
    assert la.max_abs(x - 0.1 * j4) < 1e-9
    # -1 eigenvalue pairs (e.g. -I) stay inside the algebra
    for u in (-np.eye(4, dtype=complex), j4.astype(complex)):
        x = la.symplectic_log(u)
        assert la.max_abs(x + x.conj().T) < 1e-9
        assert la.max_abs(x.T @ j4 + j4 @ x) < 1e-9
        assert la.max_abs(sla.expm(x) - u) < 1e-9
    rng = np.random.default_rng(3)
    for _ in range(10):
        a = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        a = 0.5 * (a - a.conj().T)
        j6 = la.symplectic_j(6)
        a = 0.5 * (a + j6 @ a.T @ j6)
        a = 0.5 * (a - a.conj().T)
        u = sla.expm(a)
        x = la.symplectic_log(u)
        assert la.max_abs(sla.expm(x) - u) < 1e-9
        assert la.max_abs(x.T @ j6 + j6 @ x) < 1e-9


def test_pfaffian_basics():
    assert abs(la.pfaffian(J2) - 1.0) < 1e-14
    assert abs(la.pfaffian(np.zeros((4, 4)))) == 0.0
    with pytest.raises(la.StructureError):
        la.pfaffian(np.zeros((3, 3)))
    with pytest.raises(la.StructureError):
        la.pfaffian(np.eye(2))


def test_pfaffian_methods_agree():
    # the combinatorial sum over pair partitions is the oracle
    rng = np.random.default_rng(4)
    for trial in range(60):
        n = 2 * int(rng.integers(1, 5))
        a = rng.standard_normal((n, n))
        if trial % 2:
            a = a + 1j * rng.standard_normal((n, n))
        a = a - a.T
        comb = la.pfaffian(a, "combinatorial")
        elim = la.pfaffian(a, "elimination")
        det = np.linalg.det(a)
        assert abs(comb - elim) < 1e-9 * (1.0 + abs(comb))
        assert abs(comb**2 - det) < 1e-8 * (1.0 + abs(det))


def test_pfaffian_congruence_property():
    # Pf(B^T A B) = det(B) Pf(A)
    rng = np.random.default_rng(5)
    for _ in range(30):
        n = 2 * int(rng.integers(1, 5))
        a = rng.standard_normal((n, n))
        a = a - a.T
        b = rng.standard_normal((n, n))
        lhs = la.pfaffian(b.T @ a @ b)
        rhs = np.linalg.det(b) * la.pfaffian(a)
        assert abs(lhs - rhs) < 1e-8 * (1.0 + abs(rhs))
