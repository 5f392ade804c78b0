import numpy as np
import pytest
import scipy.linalg as sla

from tenfold import factorizations as fx
from tenfold import linalg as la
from tenfold.models import haar_orthogonal, haar_unitary, random_sp_unitary

J2 = np.array([[0.0, 1.0], [-1.0, 0.0]])


def takagi_recon(res):
    return (res.u * res.lam) @ res.u.T


def test_takagi_examples():
    res = fx.takagi(np.eye(3))
    assert la.max_abs(takagi_recon(res) - np.eye(3)) < 1e-12
    a = np.array([[0.0, 1.0], [1.0, 0.0]])
    res = fx.takagi(a)
    assert np.allclose(res.lam, 1.0)
    assert la.max_abs(takagi_recon(res) - a) < 1e-10
    # 1x1: u^2 = i has the principal solution e^{i pi/4}
    res = fx.takagi(np.array([[1j]]))
    assert np.allclose(res.lam, [1.0])
    assert abs(res.u[0, 0] - np.exp(1j * np.pi / 4)) < 1e-12
    with pytest.raises(la.StructureError):
        fx.takagi(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_takagi_random_and_degenerate():
    rng = np.random.default_rng(0)
    for trial in range(30):
        n = int(rng.integers(1, 9))
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        a = a + a.T
        res = fx.takagi(a)
        assert la.max_abs(takagi_recon(res) - a) < 1e-9 * (1.0 + la.op_norm(a))
        # the singular values from an independent SVD are the oracle for lam
        sv = np.sort(np.linalg.svd(a, compute_uv=False))[::-1]
        assert la.max_abs(res.lam - sv) < 1e-9 * (1.0 + sv[0])
    # degenerate cluster: all singular values equal
    u = haar_unitary(4, rng)
    a = u @ u.T * 2.0
    res = fx.takagi(a)
    assert la.max_abs(takagi_recon(res) - a) < 1e-9


def test_takagi_symplectic():
    rng = np.random.default_rng(1)
    for m in (1, 2, 3):
        j = la.symplectic_j(2 * m)
        v = random_sp_unitary(m, rng)
        a = v.T @ v  # unitary symplectic symmetric
        res = fx.takagi(a, symplectic=True)
        assert la.max_abs(takagi_recon(res) - a) < 1e-9
        assert la.max_abs(res.u.T @ j @ res.u - j) < 1e-7
        lam = np.diag(res.lam)
        assert la.max_abs(lam.T @ j @ lam - j) < 1e-9
    # non-unitary symplectic symmetric input with paired singular values
    v = random_sp_unitary(2, rng)
    lam0 = np.diag([3.0, 2.0, 1.0 / 3.0, 0.5])
    a = v.T @ lam0 @ v
    a = 0.5 * (a + a.T)
    res = fx.takagi(a, symplectic=True)
    assert la.max_abs(takagi_recon(res) - a) < 1e-8 * (1 + la.op_norm(a))
    assert np.allclose(np.sort(res.lam), np.sort(np.diag(lam0)))
    with pytest.raises(la.StructureError):
        fx.takagi(np.diag([2.0, 2.0]), symplectic=True)  # symmetric but not symplectic


def test_hua():
    res = fx.hua(J2)
    assert np.allclose(res.d, [1.0])
    rng = np.random.default_rng(2)
    for trial in range(20):
        m = int(rng.integers(1, 4))
        a = rng.standard_normal((2 * m, 2 * m))
        if trial % 2:
            a = a + 1j * rng.standard_normal((2 * m, 2 * m))
        a = a - a.T
        if np.linalg.svd(a, compute_uv=False)[-1] < 1e-3:
            continue
        res = fx.hua(a)
        recon = res.u @ np.kron(np.diag(res.d), J2) @ res.u.T
        assert la.max_abs(recon - a) < 1e-9 * (1.0 + la.op_norm(a))
        if trial % 2 == 0:
            assert la.max_abs(res.u.imag) < 1e-10  # real input: orthogonal U
        # singular values of D x J2 match those of A, each twice
        sv = np.sort(np.linalg.svd(a, compute_uv=False))[::-1]
        assert la.max_abs(np.repeat(res.d, 2) - sv) < 1e-8 * (1.0 + sv[0])
    with pytest.raises(la.StructureError):
        fx.hua(np.zeros((3, 3)))
    with pytest.raises(la.SpectralGapError):
        fx.hua(np.zeros((4, 4)))


def test_factor_unitary_symmetric():
    v = fx.factor_unitary_symmetric(np.eye(3))
    assert la.max_abs(v.T @ v - np.eye(3)) < 1e-12
    theta = 0.7
    a = np.diag([np.exp(1j * theta)])
    v = fx.factor_unitary_symmetric(a)
    assert la.max_abs(v.T @ v - a) < 1e-12
    rng = np.random.default_rng(3)
    u = haar_unitary(4, rng)
    a = u.T @ u
    v = fx.factor_unitary_symmetric(a)
    assert la.max_abs(v.T @ v - a) < 1e-9
    # gauge: any orthogonal left factor also factors A
    o = haar_orthogonal(4, rng)
    assert la.max_abs((o @ v).T @ (o @ v) - a) < 1e-9


def test_factor_symplectic_symmetric():
    rng = np.random.default_rng(4)
    for m in (1, 2):
        j = la.symplectic_j(2 * m)
        v0 = random_sp_unitary(m, rng)
        a = v0.T @ v0
        v = fx.factor_symplectic_symmetric(a)
        assert la.max_abs(v.T @ v - a) < 1e-9
        assert la.max_abs(v.T @ j @ v - j) < 1e-8
        # gauge between two valid factors lives in Sp cap O(2m)
        z = v0 @ np.linalg.inv(v)
        assert la.max_abs(z.T @ j @ z - j) < 1e-7
        assert la.max_abs(z.conj().T @ z - np.eye(2 * m)) < 1e-7
        assert la.max_abs(z.imag @ z.real.T - z.real @ z.imag.T) < 1e-6
    v = fx.factor_symplectic_symmetric(-np.eye(4, dtype=complex))
    assert la.max_abs(v.T @ v + np.eye(4)) < 1e-9


def test_factor_signature():
    assert fx.factor_signature(np.eye(3)).j == 3
    assert fx.factor_signature(-np.eye(3)).j == 0
    res = fx.factor_signature(np.diag([1.0, -1.0, -1.0]))
    assert res.j == 1
    assert abs(np.linalg.det(res.v.real) - 1.0) < 1e-9
    dj = np.diag([1.0, -1.0, -1.0])
    assert la.max_abs(res.v.T @ dj @ res.v - dj) < 1e-9
    # all n + 1 components are realized
    rng = np.random.default_rng(5)
    n = 4
    seen = set()
    for j in range(n + 1):
        o = haar_orthogonal(n, rng)
        a = o.T @ np.diag([1.0] * j + [-1.0] * (n - j)) @ o
        seen.add(fx.factor_signature(a).j)
    assert seen == set(range(n + 1))


def test_factor_skew_unitary():
    rng = np.random.default_rng(6)
    for m in (1, 2, 3):
        j = la.symplectic_j(2 * m)
        w0 = haar_unitary(2 * m, rng)
        a = w0.T @ j @ w0
        v = fx.factor_skew_unitary(a)
        assert la.max_abs(v.T @ j @ v - a) < 1e-9
        # Pf(A) = det(V) Pf(J), through the pfaffian op as the oracle
        if m <= 4:
            pf_a = la.pfaffian(a)
            pf_j = la.pfaffian(j)
            assert abs(pf_a - np.linalg.det(v) * pf_j) < 1e-8
        # gauge: two factors differ by a compact symplectic
        z = w0 @ np.linalg.inv(v)
        assert la.max_abs(z.T @ j @ z - j) < 1e-7
    assert la.max_abs(fx.factor_skew_unitary(la.symplectic_j(4).astype(complex)).conj().T
                      @ fx.factor_skew_unitary(la.symplectic_j(4).astype(complex))
                      - np.eye(4)) < 1e-9


def test_factor_skew_orthogonal():
    rng = np.random.default_rng(7)
    for m in (1, 2, 3):
        j = la.symplectic_j(2 * m)
        for want in (1.0, -1.0):
            o = haar_orthogonal(2 * m, rng)
            if np.sign(la.pfaffian(o.T @ j @ o).real) != want:
                flip = np.eye(2 * m)
                flip[0, 0] = -1.0
                o = o @ flip
            a = o.T @ j @ o
            pf = la.pfaffian(a).real
            assert np.sign(pf) == want
            lam = fx.pfaffian_normal_form(m, np.sign(pf))
            v = fx.factor_skew_orthogonal(a, form="pfaffian")
            assert la.max_abs(v.T @ lam @ v - a) < 1e-9
            assert abs(np.linalg.det(v.real) - 1.0) < 1e-8
            w = fx.factor_skew_orthogonal(a, form="J")
            assert la.max_abs(w.T @ j @ w - a) < 1e-9
            assert la.max_abs(w.imag) < 1e-12
            # gauge: two J-form factors differ inside Sp(2m;R) cap O(2m)
            z = o @ np.linalg.inv(w.real)
            assert la.max_abs(z.T @ j @ z - j) < 1e-7
            assert la.max_abs(z.T @ z - np.eye(2 * m)) < 1e-7


def test_sp_cap_o_iso():
    rng = np.random.default_rng(8)
    m = 3
    assert la.max_abs(fx.sp_cap_o_to_u(np.eye(2 * m)) - np.eye(m)) < 1e-12
    assert la.max_abs(fx.sp_cap_o_to_u(la.symplectic_j(2 * m)) - 1j * np.eye(m)) < 1e-12
    v1 = haar_unitary(m, rng)
    v2 = haar_unitary(m, rng)
    u1 = fx.u_to_sp_cap_o(v1)
    u2 = fx.u_to_sp_cap_o(v2)
    assert la.max_abs(fx.sp_cap_o_to_u(u1) - v1) < 1e-12
    # the map is multiplicative
    assert la.max_abs(fx.sp_cap_o_to_u(u1 @ u2) - v1 @ v2) < 1e-9
    with pytest.raises(la.StructureError):
        fx.sp_cap_o_to_u(np.eye(3))
