import numpy as np
import pytest

from tenfold import linalg as la
from tenfold import symmetry as sym
from tenfold.models import haar_unitary, kitaev_chain, ssh_chain

# (label, eps_t, eps_c, has_s, d=0 group, d=1 group)
TABLE = [
    ("A", 0, 0, False, "0", "0"),
    ("AIII", 0, 0, True, "0", "Z"),
    ("AI", 1, 0, False, "0", "0"),
    ("BDI", 1, 1, True, "Z2", "Z2xZ"),
    ("D", 0, 1, False, "Z2", "Z2xZ2"),
    ("DIII", -1, 1, True, "0", "Z2"),
    ("AII", -1, 0, False, "0", "0"),
    ("CII", -1, -1, True, "0", "Z"),
    ("C", 0, -1, False, "0", "0"),
    ("CI", 1, -1, True, "0", "0"),
]


def test_registry_matches_table():
    assert set(sym.CLASSES) == {row[0] for row in TABLE}
    for label, eps_t, eps_c, has_s, g0, g1 in TABLE:
        cls = sym.get_class(label)
        assert (cls.eps_t, cls.eps_c, cls.has_s) == (eps_t, eps_c, has_s)
        assert cls.index_group(0) == g0
        assert cls.index_group(1) == g1


def test_dimension_constraints():
    assert sym.get_class("A").check_dims(1, 3) == []
    assert sym.get_class("AIII").check_dims(2, 4) == []
    assert sym.get_class("AIII").check_dims(2, 5)
    assert sym.get_class("D").check_dims(2, 5)
    assert sym.get_class("DIII").check_dims(3, 6)  # n must be even
    assert sym.get_class("DIII").check_dims(2, 4) == []
    assert sym.get_class("AII").check_dims(2, 5)  # N must be even
    assert sym.get_class("CII").check_dims(2, 4) == []


def test_normal_form_ops_consistent():
    for label, *_ in TABLE:
        cls = sym.get_class(label)
        N = 8 if label in ("DIII", "CII") else 8
        ops = sym.SymmetryOps.normal_form(label, N)
        res = ops.residuals(cls)
        assert max(res.values(), default=0.0) < 1e-12, (label, res)


def test_normal_basis_t_even():
    b = sym.normal_basis_t_even(np.eye(4, dtype=complex))
    assert la.max_abs(b - np.eye(4)) < 1e-12
    # 1x1 phase: solve conj(b) e^{i theta} conj(b) = 1
    t = np.array([[np.exp(0.8j)]])
    b = sym.normal_basis_t_even(t)
    assert la.max_abs(b.conj().T @ t @ np.conj(b) - np.eye(1)) < 1e-10
    rng = np.random.default_rng(0)
    for n in (2, 5, 8):
        b0 = haar_unitary(n, rng)
        t = b0 @ b0.T  # admissible: T K with this unitary part squares to +1
        b = sym.normal_basis_t_even(t)
        assert la.max_abs(b.conj().T @ t @ np.conj(b) - np.eye(n)) < 1e-8
    with pytest.raises(la.StructureError):
        sym.normal_basis_t_even(la.symplectic_j(4).astype(complex))


def test_normal_basis_t_odd():
    j4 = la.symplectic_j(4)
    b = sym.normal_basis_t_odd(j4.astype(complex))
    assert la.max_abs(b.conj().T @ j4 @ np.conj(b) - j4) < 1e-10
    with pytest.raises(la.StructureError):
        sym.normal_basis_t_odd(np.eye(3, dtype=complex))
    with pytest.raises(la.StructureError):
        sym.normal_basis_t_odd(np.eye(4, dtype=complex))
    rng = np.random.default_rng(1)
    for m in (1, 2, 4):
        v = haar_unitary(2 * m, rng)
        t = v @ la.symplectic_j(2 * m) @ v.T
        b = sym.normal_basis_t_odd(t)
        assert la.max_abs(b.conj().T @ t @ np.conj(b) - la.symplectic_j(2 * m)) < 1e-8


def test_chiral_reduce_examples():
    s = np.diag([1.0, -1.0]).astype(complex)
    p = 0.5 * np.array([[1.0, 1.0], [1.0, 1.0]], dtype=complex)
    fam = sym.ProjectionFamily.point(p)
    basis, chi = sym.chiral_reduce(fam, s)
    assert la.max_abs(chi.q_samples[0] - 1.0) < 1e-12
    # S = sigma_x requires a basis rotation first
    sx = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    p2 = np.diag([1.0, 0.0]).astype(complex)
    fam2 = sym.ProjectionFamily.point(p2)
    basis2, chi2 = sym.chiral_reduce(fam2, sx)
    back = sym.chiral_expand(chi2)
    assert la.max_abs(back.samples[0] - p2) < 1e-10
    # SSH: Q(k) is the phase of -(t1 + t2 e^{-2 pi i k}) in this convention
    fam3, ops3, _ = ssh_chain(1.0, 2.0, g=16)
    _, chi3 = sym.chiral_reduce(fam3, ops3.s_mat)
    ks = -0.5 + np.arange(32) / 32
    q_expected = np.array([-(1 + 2 * np.exp(-2j * np.pi * k)) for k in ks])
    q_expected /= np.abs(q_expected)
    assert la.max_abs(chi3.q_samples[:, 0, 0] - q_expected) < 1e-10


def test_chiral_roundtrip_random():
    rng = np.random.default_rng(2)
    n = 3
    v = haar_unitary(2 * n, rng)
    s = v @ np.diag([1.0] * n + [-1.0] * n) @ v.conj().T
    q = haar_unitary(n, rng)
    eye = np.eye(n)
    p_normal = 0.5 * np.block([[eye, q], [q.conj().T, eye]])
    b = sym.chiral_basis(s)
    p = b @ p_normal @ b.conj().T
    fam = sym.ProjectionFamily.point(p)
    _, chi = sym.chiral_reduce(fam, s)
    back = sym.chiral_expand(chi)
    assert la.max_abs(back.samples[0] - p) < 1e-10


@pytest.mark.parametrize("label,N", [("BDI", 6), ("CI", 6), ("DIII", 8), ("CII", 8)])
def test_class_basis_roundtrip(label, N):
    rng = np.random.default_rng(3)
    ops = sym.SymmetryOps.normal_form(label, N)
    v = haar_unitary(N, rng)
    scrambled = ops.scrambled(v)
    b = sym.class_basis(label, scrambled)
    ref = sym.SymmetryOps.normal_form(label, N)
    assert la.max_abs(b.conj().T @ scrambled.t_mat @ np.conj(b) - ref.t_mat) < 1e-7
    assert la.max_abs(b.conj().T @ scrambled.c_mat @ np.conj(b) - ref.c_mat) < 1e-7
    assert la.max_abs(b.conj().T @ scrambled.s_mat @ b - ref.s_mat) < 1e-7


def test_class_basis_rejects_bad_dims():
    with pytest.raises((la.StructureError, ValueError)):
        # DIII needs N a multiple of 4; building ops on N = 6 already fails
        sym.SymmetryOps.normal_form("DIII", 6).residuals("DIII")
        sym.class_basis("DIII", sym.SymmetryOps.normal_form("DIII", 6))


def test_validate_class():
    p = np.diag([1.0, 0.0]).astype(complex)
    fam = sym.ProjectionFamily.point(p)
    ops = sym.SymmetryOps(N=2, t_mat=np.eye(2, dtype=complex), eps_t=1)
    assert sym.validate_class(fam, ops, "AI").ok
    # class D with the wrong trace is rejected on the constraint column
    ops_d = sym.SymmetryOps(N=2, c_mat=np.eye(2, dtype=complex), eps_c=1)
    bad = sym.ProjectionFamily(d=0, n=2, N=2, samples=np.eye(2, dtype=complex)[None])
    report = sym.validate_class(bad, ops_d, "D")
    assert not report.ok
    # Kitaev chain validates as class D
    fam_k, ops_k, cls_k = kitaev_chain(mu=0.5, g=16)
    assert sym.validate_class(fam_k, ops_k, cls_k).ok


def test_validate_invariant_under_basis_change():
    fam, ops, cls = kitaev_chain(mu=0.5, g=16)
    rng = np.random.default_rng(4)
    v = haar_unitary(2, rng)
    fam2 = sym.ProjectionFamily(
        d=1, n=1, N=2, samples=np.einsum("ij,kjl,ml->kim", v, fam.samples, np.conj(v))
    )
    report = sym.validate_class(fam2, ops.scrambled(v), cls)
    assert report.ok


def test_reduce_D():
    a0 = np.array([[0.0, 1.0], [-1.0, 0.0]])
    p = 0.5 * (np.eye(2) + 1j * a0)
    fam = sym.ProjectionFamily.point(p)
    ops = sym.SymmetryOps(N=2, c_mat=np.eye(2, dtype=complex), eps_c=1)
    b, a_samples = sym.reduce_D(fam, ops)
    assert la.max_abs(a_samples[0] - a0) < 1e-10
    assert abs(abs(la.pfaffian(a_samples[0].real)) - 1.0) < 1e-10
    back = sym.expand_D(b, a_samples, d=0)
    assert la.max_abs(back.samples[0] - p) < 1e-10
    # Kitaev fixed points: this library's convention gives
    # Pf(A(0)) = sign(mu + 2 t) and Pf(A(1/2)) = sign(mu - 2 t)
    for mu, t in ((1.0, 1.0), (3.0, 1.0), (-3.0, 1.0)):
        fam_k, ops_k, _ = kitaev_chain(t=t, mu=mu, g=16)
        _, a_k = sym.reduce_D(fam_k, ops_k)
        pf0 = la.pfaffian(0.5 * (a_k[fam_k.fixed_point_index(0)].real
                                 - a_k[fam_k.fixed_point_index(0)].real.T)).real
        pfh = la.pfaffian(0.5 * (a_k[fam_k.fixed_point_index(0.5)].real
                                 - a_k[fam_k.fixed_point_index(0.5)].real.T)).real
        assert np.sign(pf0) == np.sign(mu + 2 * t)
        assert np.sign(pfh) == np.sign(mu - 2 * t)
    with pytest.raises(la.StructureError):
        sym.reduce_D(fam, sym.SymmetryOps(N=2, c_mat=la.symplectic_j(2).astype(complex),
                                          eps_c=-1))


def test_reduce_C_roundtrip():
    from tenfold.models import random_in_class

    fam, ops = random_in_class("C", 2, 4, seed=0, d=0, scramble=True)
    b, a_samples = sym.reduce_C(fam, ops)
    j = la.symplectic_j(4)
    a = a_samples[0]
    assert la.max_abs(a - a.T) < 1e-8
    assert la.max_abs(a.T @ j @ a - j) < 1e-8
    back = sym.expand_C(b, a_samples, d=0)
    assert la.max_abs(back.samples[0] - fam.samples[0]) < 1e-8


def test_chiral_constraint_residual():
    eye_q = np.eye(2, dtype=complex)[None, :, :]
    for label in ("BDI", "CI", "DIII", "CII"):
        chi = sym.ChiralData(d=0, n=2, basis=np.eye(4, dtype=complex), q_samples=eye_q)
        res = sym.chiral_constraint_residual(label, chi)
        # Q = I satisfies every class's reality condition (for DIII,
        # J I^T J = -I holds since J^2 = -I)
        assert res < 1e-12, (label, res)
    # AIII has no condition: 0 by convention
    chi = sym.ChiralData(d=0, n=2, basis=np.eye(4, dtype=complex), q_samples=eye_q)
    assert sym.chiral_constraint_residual("AIII", chi) == 0.0
    # a violating sample is measured, not repaired
    q_bad = np.array([[[0.0, 1.0], [1.0, 0.0]]], dtype=complex) @ np.diag([1j, 1.0])
    chi_bad = sym.ChiralData(d=0, n=2, basis=np.eye(4, dtype=complex),
                             q_samples=q_bad[None, 0][None, 0][None] if False else q_bad)
    assert sym.chiral_constraint_residual("BDI", chi_bad) > 0.5


def test_assumption_s_equals_tc_enforced():
    ops = sym.SymmetryOps.normal_form("BDI", 4)
    ops.s_mat = 1j * ops.s_mat  # break S = T conj(C)
    res = ops.residuals("BDI")
    assert res["s-product"] > 0.1
