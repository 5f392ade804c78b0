"""Symmetry operators, the ten-class registry, and normal-form reductions.

Anti-unitary operators are stored by their unitary part only; the
operator acts as x -> M conj(x).  Composition rules follow from that
convention, e.g. the unitary part of T C is t_mat conj(c_mat).

Grid convention for d = 1 families: 2g samples at k = -1/2 + j/(2g),
j = 0..2g-1, covering [-1/2, 1/2) with the periodic endpoint k = +1/2
identified with the stored k = -1/2 sample.  Both fixed points of
k -> -k are on-grid: k = 0 at index g and k = 1/2 at index 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    StructureError,
    as_complex,
    max_abs,
    op_norm,
    require_square,
    symplectic_j,
)

#: default bound on neighbor distance (operator norm) along a d=1 grid
CONTINUITY_BOUND = 0.2

CLASS_LABELS = ("A", "AIII", "AI", "BDI", "D", "DIII", "AII", "CII", "C", "CI")


@dataclass(frozen=True)
class CartanClass:
    """One row of the tenfold-way table.

    eps_t / eps_c are the squares of the anti-unitary operators
    (0 when the symmetry is absent); has_s marks chiral symmetry.
    """

    label: str
    eps_t: int
    eps_c: int
    has_s: bool

    @property
    def has_t(self):
        return self.eps_t != 0

    @property
    def has_c(self):
        return self.eps_c != 0

    def check_dims(self, n, N):
        """Violations of this class's (n, N) constraints; empty when admissible."""
        bad = []
        if not (0 < n < N):
            bad.append("need 0 < n < N, got n=%d N=%d" % (n, N))
            return bad
        if self.label in ("AIII", "BDI", "D", "C", "CI", "DIII", "CII") and N != 2 * n:
            bad.append("%s needs N = 2n, got n=%d N=%d" % (self.label, n, N))
        if self.label in ("DIII", "CII", "AII") and n % 2:
            bad.append("%s needs n = 2m even, got n=%d" % (self.label, n))
        if self.label == "AII" and N % 2:
            bad.append("AII needs N = 2M even, got N=%d" % N)
        return bad

    def index_group(self, d):
        """Descriptor of the index set for dimension d: '0', 'Z', 'Z2', 'Z2xZ2', 'Z2xZ'."""
        table = {
            "A": ("0", "0"),
            "AIII": ("0", "Z"),
            "AI": ("0", "0"),
            "BDI": ("Z2", "Z2xZ"),
            "D": ("Z2", "Z2xZ2"),
            "DIII": ("0", "Z2"),
            "AII": ("0", "0"),
            "CII": ("0", "Z"),
            "C": ("0", "0"),
            "CI": ("0", "0"),
        }
        return table[self.label][d]


CLASSES = {
    "A": CartanClass("A", 0, 0, False),
    "AIII": CartanClass("AIII", 0, 0, True),
    "AI": CartanClass("AI", 1, 0, False),
    "BDI": CartanClass("BDI", 1, 1, True),
    "D": CartanClass("D", 0, 1, False),
    "DIII": CartanClass("DIII", -1, 1, True),
    "AII": CartanClass("AII", -1, 0, False),
    "CII": CartanClass("CII", -1, -1, True),
    "C": CartanClass("C", 0, -1, False),
    "CI": CartanClass("CI", 1, -1, True),
}


def get_class(label):
    try:
        return CLASSES[label]
    except KeyError:
        raise ValueError("unknown Cartan class %r" % label) from None


def antiunitary_apply(mat, x):
    """Apply the anti-unitary with unitary part ``mat`` to a vector."""
    return mat @ np.conj(x)


def antiunitary_conj(mat, a):
    """V A V^{-1} for the anti-unitary V with unitary part ``mat``."""
    return mat @ np.conj(a) @ mat.conj().T


@dataclass
class SymmetryOps:
    """The (T, C, S) operators for one symmetry class on C^N."""

    N: int
    t_mat: np.ndarray | None = None
    c_mat: np.ndarray | None = None
    s_mat: np.ndarray | None = None
    eps_t: int = 0
    eps_c: int = 0

    @staticmethod
    def normal_form(cls, N):
        """Operators in the normal form used by the per-class reductions."""
        cls = get_class(cls) if isinstance(cls, str) else cls
        n = N // 2
        eye = np.eye(N, dtype=complex)
        ops = SymmetryOps(N=N, eps_t=cls.eps_t, eps_c=cls.eps_c)
        if cls.label == "AIII":
            ops.s_mat = _diag_pm(n)
            return ops
        if cls.label == "AI":
            ops.t_mat = eye.copy()
        elif cls.label == "AII":
            ops.t_mat = symplectic_j(N).astype(complex)
        elif cls.label == "D":
            ops.c_mat = eye.copy()
        elif cls.label == "C":
            ops.c_mat = symplectic_j(N).astype(complex)
        elif cls.label == "BDI":
            ops.t_mat = eye.copy()
            ops.c_mat = _diag_pm(n)
        elif cls.label == "CI":
            z = np.zeros((n, n))
            i_n = np.eye(n)
            ops.t_mat = np.block([[z, i_n], [i_n, z]]).astype(complex)
            ops.c_mat = np.block([[z, -i_n], [i_n, z]]).astype(complex)
        elif cls.label == "DIII":
            j_n = symplectic_j(n)
            z = np.zeros((n, n))
            ops.t_mat = np.block([[z, j_n], [j_n, z]]).astype(complex)
            ops.c_mat = np.block([[z, j_n], [-j_n, z]]).astype(complex)
        elif cls.label == "CII":
            j_n = symplectic_j(n)
            z = np.zeros((n, n))
            ops.t_mat = np.block([[-j_n, z], [z, -j_n]]).astype(complex)
            ops.c_mat = np.block([[j_n, z], [z, -j_n]]).astype(complex)
        elif cls.label != "A":
            raise ValueError("unknown class %r" % cls.label)
        if ops.t_mat is not None and ops.c_mat is not None:
            ops.s_mat = ops.t_mat @ np.conj(ops.c_mat)
        return ops

    def scrambled(self, v):
        """Operators after the family is conjugated as P -> V P V*."""
        v = require_square(v)

        def anti(m):
            return None if m is None else v @ m @ v.T

        s = None if self.s_mat is None else v @ self.s_mat @ v.conj().T
        return SymmetryOps(
            N=self.N, t_mat=anti(self.t_mat), c_mat=anti(self.c_mat), s_mat=s,
            eps_t=self.eps_t, eps_c=self.eps_c,
        )

    def residuals(self, cls, tol=DEFAULT_TOL):
        """Consistency residuals of the stored operators for class ``cls``."""
        cls = get_class(cls) if isinstance(cls, str) else cls
        eye = np.eye(self.N)
        out = {}
        if cls.has_t != (self.t_mat is not None) or self.eps_t != cls.eps_t:
            out["t-presence"] = np.inf
        if cls.has_c != (self.c_mat is not None) or self.eps_c != cls.eps_c:
            out["c-presence"] = np.inf
        if cls.has_s != (self.s_mat is not None):
            out["s-presence"] = np.inf
        if self.t_mat is not None:
            t = self.t_mat
            out["t-unitary"] = max_abs(t.conj().T @ t - eye)
            out["t-parity"] = max_abs(t @ np.conj(t) - self.eps_t * eye)
        if self.c_mat is not None:
            c = self.c_mat
            out["c-unitary"] = max_abs(c.conj().T @ c - eye)
            out["c-parity"] = max_abs(c @ np.conj(c) - self.eps_c * eye)
        if self.s_mat is not None:
            s = self.s_mat
            out["s-unitary"] = max_abs(s.conj().T @ s - eye)
            out["s-involution"] = max_abs(s @ s - eye)
        if self.t_mat is not None and self.c_mat is not None:
            if self.s_mat is None:
                out["s-presence"] = np.inf
            else:
                # S := T C, and T C = eps_T eps_C C T
                out["s-product"] = max_abs(self.s_mat - self.t_mat @ np.conj(self.c_mat))
                out["tc-commutation"] = max_abs(
                    self.t_mat @ np.conj(self.c_mat)
                    - self.eps_t * self.eps_c * self.c_mat @ np.conj(self.t_mat)
                )
        return out


def _diag_pm(n):
    return np.diag(np.concatenate([np.ones(n), -np.ones(n)])).astype(complex)


@dataclass
class ProjectionFamily:
    """Grid-sampled map k -> rank-n orthogonal projection on C^N.

    samples has shape (num_k, N, N); num_k == 1 for d == 0 and an even
    count 2g for d == 1 (see the module docstring for the grid layout).
    """

    d: int
    n: int
    N: int
    samples: np.ndarray

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=complex)
        if self.samples.ndim != 3 or self.samples.shape[1:] != (self.N, self.N):
            raise StructureError("samples must have shape (num_k, N, N)")
        if self.d == 0 and self.num_k != 1:
            raise StructureError("d=0 family stores exactly one sample")
        if self.d == 1 and (self.num_k < 4 or self.num_k % 2):
            raise StructureError("d=1 family needs an even number >= 4 of samples")

    @property
    def num_k(self):
        return self.samples.shape[0]

    @property
    def grid_g(self):
        return self.num_k // 2

    def k_values(self):
        if self.d == 0:
            return np.zeros(1)
        return -0.5 + np.arange(self.num_k) / self.num_k

    def fixed_point_index(self, k):
        """Stored index of the fixed point k in {0, 1/2} (1/2 wraps to -1/2)."""
        if self.d == 0:
            return 0
        if k == 0:
            return self.num_k // 2
        if k == 0.5:
            return 0
        raise ValueError("only k = 0 and k = 1/2 are fixed points")

    def reflect_index(self, j):
        """Stored index of -k for the stored index j of k."""
        return (-j) % self.num_k if self.d == 1 else 0

    @staticmethod
    def point(p, n=None):
        p = require_square(p)
        if n is None:
            n = int(round(p.trace().real))
        return ProjectionFamily(d=0, n=n, N=p.shape[0], samples=p[None, :, :])


@dataclass
class ChiralData:
    """Off-diagonal unitary blocks Q(k) of a chiral family, plus the basis
    that diagonalizes S as diag(I_n, -I_n)."""

    d: int
    n: int
    basis: np.ndarray
    q_samples: np.ndarray  # (num_k, n, n)

    @property
    def num_k(self):
        return self.q_samples.shape[0]


@dataclass
class ValidationReport:
    ok: bool
    residuals: dict = field(default_factory=dict)
    messages: list = field(default_factory=list)

    def worst(self):
        return max(self.residuals.values()) if self.residuals else 0.0


def validate_class(family, ops, cls, tol=DEFAULT_TOL, continuity_bound=CONTINUITY_BOUND):
    """Check every symmetry relation at every grid point, plus the
    class's (n, N) constraints, projection structure and grid continuity."""
    cls = get_class(cls) if isinstance(cls, str) else cls
    res = {}
    msgs = []
    ok = True

    bad_dims = cls.check_dims(family.n, family.N)
    if bad_dims:
        ok = False
        msgs.extend(bad_dims)
        res["constraints"] = np.inf

    op_res = ops.residuals(cls, tol)
    worst_ops = max(op_res.values()) if op_res else 0.0
    res["operators"] = worst_ops
    if worst_ops > tol.atol:
        ok = False
        msgs.append("operator consistency residual %.3e" % worst_ops)

    eye = np.eye(family.N)
    proj = 0.0
    for p in family.samples:
        proj = max(proj, max_abs(p @ p - p), max_abs(p - p.conj().T))
        proj = max(proj, abs(p.trace().real - family.n), abs(p.trace().imag))
    res["projection"] = proj
    if proj > tol.atol:
        ok = False
        msgs.append("projection residual %.3e" % proj)

    if ok or not bad_dims:
        rel_t = rel_c = rel_s = 0.0
        for j in range(family.num_k):
            p = family.samples[j]
            p_ref = family.samples[family.reflect_index(j)]
            if cls.has_t:
                rel_t = max(rel_t, max_abs(antiunitary_conj(ops.t_mat, p_ref) - p))
            if cls.has_c:
                rel_c = max(rel_c, max_abs(antiunitary_conj(ops.c_mat, eye - p_ref) - p))
            if cls.has_s:
                s = ops.s_mat
                rel_s = max(rel_s, max_abs(s.conj().T @ p @ s - (eye - p)))
        if cls.has_t:
            res["T"] = rel_t
        if cls.has_c:
            res["C"] = rel_c
        if cls.has_s:
            res["S"] = rel_s
        worst_rel = max(rel_t, rel_c, rel_s)
        if worst_rel > tol.atol:
            ok = False
            msgs.append("symmetry relation residual %.3e" % worst_rel)

    if family.d == 1:
        step = 0.0
        for j in range(family.num_k):
            nxt = (j + 1) % family.num_k
            step = max(step, op_norm(family.samples[nxt] - family.samples[j]))
        res["continuity"] = step
        if step > continuity_bound:
            ok = False
            msgs.append("neighbor jump %.3f exceeds bound %.3f" % (step, continuity_bound))

    return ValidationReport(ok=ok, residuals=res, messages=msgs)


# ---------------------------------------------------------------------------
# normal-form constructions (the lemma proofs as algorithms)


def _next_candidate(accepted, N, tol):
    """First standard basis vector with a healthy component off span(accepted)."""
    for i in range(N):
        v = np.zeros(N, dtype=complex)
        v[i] = 1.0
        for b in accepted:
            v -= np.vdot(b, v) * b
        nrm = np.linalg.norm(v)
        if nrm > 0.3:
            return v / nrm
    raise StructureError("could not find an independent candidate vector")


def _reorthonormalize(v, accepted, real_coeffs=False):
    for _ in range(2):
        for b in accepted:
            c = np.vdot(b, v)
            if real_coeffs:
                c = c.real
            v = v - c * b
    nrm = np.linalg.norm(v)
    if nrm < 1e-8:
        raise StructureError("basis construction degenerated")
    return v / nrm


def normal_basis_t_even(t_mat, tol=DEFAULT_TOL):
    """Unitary B with B* T conj(B) = I for an anti-unitary T with T^2 = +1.

    Built vector by vector: phi := psi + T psi or i (psi - T psi),
    whichever is larger, is T-fixed; Gram-Schmidt keeps the accumulating
    basis orthonormal (projection coefficients onto T-fixed vectors are
    real, so T-fixedness survives the cleanup).
    """
    t = require_square(t_mat)
    N = t.shape[0]
    if max_abs(t @ np.conj(t) - np.eye(N)) > tol.atol:
        raise StructureError("normal_basis_t_even needs T^2 = +1")
    basis = []
    for _ in range(N):
        psi = _next_candidate(basis, N, tol)
        tpsi = antiunitary_apply(t, psi)
        plus = psi + tpsi
        minus = 1j * (psi - tpsi)
        phi = plus if np.linalg.norm(plus) >= np.linalg.norm(minus) else minus
        phi = phi / np.linalg.norm(phi)
        phi = _reorthonormalize(phi, basis, real_coeffs=True)
        if np.linalg.norm(antiunitary_apply(t, phi) - phi) > 1e-7:
            raise StructureError("constructed vector is not T-fixed")
        basis.append(phi)
    b = np.column_stack(basis)
    if max_abs(b.conj().T @ t @ np.conj(b) - np.eye(N)) > 1e-7:
        raise StructureError("even normal form failed")
    return b


def normal_basis_t_odd(t_mat, tol=DEFAULT_TOL):
    """Unitary B with B* T conj(B) = J_N for an anti-unitary T with T^2 = -1.

    Pairs (psi, T psi) are stacked as columns (psi_1..psi_M, -T psi_1..),
    which realizes the quaternionic normal form; N must be even.
    """
    t = require_square(t_mat)
    N = t.shape[0]
    if N % 2:
        raise StructureError("T^2 = -1 needs an even-dimensional space")
    if max_abs(t @ np.conj(t) + np.eye(N)) > tol.atol:
        raise StructureError("normal_basis_t_odd needs T^2 = -1")
    first = []
    second = []
    for _ in range(N // 2):
        psi = _next_candidate(first + second, N, tol)
        psi = _reorthonormalize(psi, first + second)
        tpsi = antiunitary_apply(t, psi)
        first.append(psi)
        second.append(-tpsi)
    b = np.column_stack(first + second)
    if max_abs(b.conj().T @ b - np.eye(N)) > 1e-7:
        raise StructureError("odd normal form lost orthonormality")
    if max_abs(b.conj().T @ t @ np.conj(b) - symplectic_j(N)) > 1e-7:
        raise StructureError("odd normal form failed")
    return b


def chiral_basis(s_mat, tol=DEFAULT_TOL):
    """Unitary B with B* S B = diag(I_n, -I_n); requires Tr S = 0."""
    s = require_square(s_mat)
    N = s.shape[0]
    if max_abs(s @ s - np.eye(N)) > tol.atol or max_abs(s - s.conj().T) > tol.atol:
        raise StructureError("S must be a unitary involution (hence hermitian)")
    if abs(s.trace().real) > tol.atol:
        raise StructureError("chiral reduction needs Tr S = 0")
    n = N // 2
    target = _diag_pm(n)
    if max_abs(s - target) <= tol.atol:
        return np.eye(N, dtype=complex)
    w, v = np.linalg.eigh(s)
    plus = v[:, w > 0.0]
    minus = v[:, w <= 0.0]
    if plus.shape[1] != n:
        raise StructureError("S eigenvalue counts are not (n, n)")
    return np.hstack([plus, minus])


def chiral_reduce(family, s_mat, tol=DEFAULT_TOL):
    """Express a chiral family as P = 1/2 ((I, Q), (Q*, I)) in an
    S-diagonal basis; returns (basis, ChiralData)."""
    b = chiral_basis(s_mat, tol)
    n = family.N // 2
    if family.n != n:
        raise StructureError("chiral family needs rank n = N/2")
    qs = np.empty((family.num_k, n, n), dtype=complex)
    for j in range(family.num_k):
        p = b.conj().T @ family.samples[j] @ b
        if max_abs(p[:n, :n] - 0.5 * np.eye(n)) > 100 * tol.atol:
            raise StructureError("diagonal blocks are not I/2; S-symmetry violated")
        q = 2.0 * p[:n, n:]
        if max_abs(q.conj().T @ q - np.eye(n)) > 100 * tol.atol:
            raise StructureError("off-diagonal block is not unitary")
        qs[j] = q
    return b, ChiralData(d=family.d, n=n, basis=b, q_samples=qs)


def chiral_expand(chiral, tol=DEFAULT_TOL):
    """Inverse of chiral_reduce."""
    n = chiral.n
    b = chiral.basis
    N = 2 * n
    samples = np.empty((chiral.num_k, N, N), dtype=complex)
    eye = np.eye(n)
    for j in range(chiral.num_k):
        q = chiral.q_samples[j]
        blk = 0.5 * np.block([[eye, q], [q.conj().T, eye]])
        samples[j] = b @ blk @ b.conj().T
    return ProjectionFamily(d=chiral.d, n=n, N=N, samples=samples)


def projections_from_q(q_samples, d, basis=None, tol=DEFAULT_TOL):
    """Build the chiral family with given unitary blocks (basis defaults to
    the S-diagonal normal basis)."""
    q_samples = np.asarray(q_samples, dtype=complex)
    n = q_samples.shape[1]
    b = np.eye(2 * n, dtype=complex) if basis is None else basis
    return chiral_expand(ChiralData(d=d, n=n, basis=b, q_samples=q_samples), tol)


def class_basis(cls, ops, tol=DEFAULT_TOL):
    """Unitary B bringing (T, C, S) of a real chiral class to normal form.

    After the change of basis the operators match the displayed normal
    forms of SymmetryOps.normal_form for the class, within tolerance.
    """
    cls = get_class(cls) if isinstance(cls, str) else cls
    if cls.label not in ("BDI", "CI", "DIII", "CII"):
        raise ValueError("class_basis applies to BDI, CI, DIII, CII; got %s" % cls.label)
    bad = ops.residuals(cls, tol)
    worst = max(bad.values()) if bad else 0.0
    if worst > tol.atol:
        raise StructureError("operator parities do not match class %s" % cls.label)
    N = ops.N
    n = N // 2
    b1 = chiral_basis(ops.s_mat, tol)
    t1 = b1.conj().T @ ops.t_mat @ np.conj(b1)

    if cls.label in ("BDI", "CII"):
        # S T = T S: T is block diagonal in the S basis
        if max_abs(t1[:n, n:]) > 1e-7 or max_abs(t1[n:, :n]) > 1e-7:
            raise StructureError("T does not preserve the S eigenspaces")
        if cls.label == "BDI":
            bp = normal_basis_t_even(t1[:n, :n], tol)
            bm = normal_basis_t_even(t1[n:, n:], tol)
            b2 = _blkdiag(bp, bm)
        else:
            if n % 2:
                raise StructureError("CII needs n = 2m even")
            bp = 1j * normal_basis_t_odd(t1[:n, :n], tol)
            bm = 1j * normal_basis_t_odd(t1[n:, n:], tol)
            b2 = _blkdiag(bp, bm)
        b = b1 @ b2
    else:
        # S T = -T S: T swaps the S eigenspaces
        if max_abs(t1[:n, :n]) > 1e-7 or max_abs(t1[n:, n:]) > 1e-7:
            raise StructureError("T does not swap the S eigenspaces")
        uplus = b1[:, :n]
        if cls.label == "CI":
            w = np.column_stack([antiunitary_apply(ops.t_mat, uplus[:, j]) for j in range(n)])
        else:
            if n % 2:
                raise StructureError("DIII needs n = 2m even (N a multiple of 4)")
            m = n // 2
            cols = []
            for j in range(m):
                cols.append(antiunitary_apply(ops.t_mat, uplus[:, m + j]))
            for j in range(m):
                cols.append(-antiunitary_apply(ops.t_mat, uplus[:, j]))
            w = np.column_stack(cols)
        b = np.hstack([uplus, w])

    ref = SymmetryOps.normal_form(cls, N)
    tb = b.conj().T @ ops.t_mat @ np.conj(b)
    cb = b.conj().T @ ops.c_mat @ np.conj(b)
    sb = b.conj().T @ ops.s_mat @ b
    err = max(max_abs(tb - ref.t_mat), max_abs(cb - ref.c_mat), max_abs(sb - ref.s_mat))
    if err > 1e-7:
        raise StructureError("class basis residual %.3e for %s" % (err, cls.label))
    return b


def _blkdiag(a, b):
    n, m = a.shape[0], b.shape[0]
    out = np.zeros((n + m, n + m), dtype=complex)
    out[:n, :n] = a
    out[n:, n:] = b
    return out


# ---------------------------------------------------------------------------
# non-chiral reductions


def reduce_D(family, ops, tol=DEFAULT_TOL):
    """Class D: basis with C = K, then P = 1/2 (I + i A).

    A(k) is skew-hermitian unitary with conj(A(k)) = A(-k); at the fixed
    points it is real, antisymmetric and orthogonal, where its Pfaffian
    sign is the class invariant.
    """
    if ops.eps_c != 1:
        raise StructureError("reduce_D needs an even C symmetry")
    b = normal_basis_t_even(ops.c_mat, tol)
    eye = np.eye(family.N)
    a_samples = np.empty_like(family.samples)
    for j in range(family.num_k):
        p = b.conj().T @ family.samples[j] @ b
        a_samples[j] = -1j * (2.0 * p - eye)
    for k in (0, 0.5) if family.d == 1 else (0,):
        a = a_samples[family.fixed_point_index(k)]
        if max_abs(a.imag) > 100 * tol.atol:
            raise StructureError("fixed-point A has imaginary residual %.3e" % max_abs(a.imag))
    return b, a_samples


def expand_D(b, a_samples, d, tol=DEFAULT_TOL):
    a_samples = np.asarray(a_samples, dtype=complex)
    N = a_samples.shape[1]
    eye = np.eye(N)
    samples = np.array([b @ (0.5 * (eye + 1j * a)) @ b.conj().T for a in a_samples])
    return ProjectionFamily(d=d, n=N // 2, N=N, samples=samples)


def reduce_C(family, ops, tol=DEFAULT_TOL):
    """Class C: basis with C = J K, then P = 1/2 (I + i J A).

    At fixed points A is unitary, symmetric and symplectic.
    """
    if ops.eps_c != -1:
        raise StructureError("reduce_C needs an odd C symmetry")
    b = normal_basis_t_odd(ops.c_mat, tol)
    N = family.N
    j = symplectic_j(N)
    eye = np.eye(N)
    a_samples = np.empty_like(family.samples)
    for jj in range(family.num_k):
        p = b.conj().T @ family.samples[jj] @ b
        a_samples[jj] = 1j * j @ (2.0 * p - eye)
    for k in (0, 0.5) if family.d == 1 else (0,):
        a = a_samples[family.fixed_point_index(k)]
        err = max(max_abs(a - a.T), max_abs(a.T @ j @ a - j), max_abs(a.conj().T @ a - eye))
        if err > 100 * tol.atol:
            raise StructureError("fixed-point A structure residual %.3e" % err)
    return b, a_samples


def expand_C(b, a_samples, d, tol=DEFAULT_TOL):
    a_samples = np.asarray(a_samples, dtype=complex)
    N = a_samples.shape[1]
    j = symplectic_j(N)
    eye = np.eye(N)
    samples = np.array([b @ (0.5 * (eye + 1j * j @ a)) @ b.conj().T for a in a_samples])
    return ProjectionFamily(d=d, n=N // 2, N=N, samples=samples)


# ---------------------------------------------------------------------------
# chiral reality conditions on Q


def chiral_constraint_residual(cls, chiral, tol=DEFAULT_TOL):
    """Worst residual of the class's reality condition on Q over the grid,
    including the fixed-point structure; 0.0 for AIII (no condition)."""
    cls = get_class(cls) if isinstance(cls, str) else cls
    if cls.label == "AIII":
        return 0.0
    qs = chiral.q_samples
    num_k = qs.shape[0]
    n = chiral.n
    worst = 0.0

    def reflected(j):
        return (-j) % num_k if chiral.d == 1 else 0

    j_n = symplectic_j(n) if cls.label in ("DIII", "CII") else None
    for j in range(num_k):
        q = qs[j]
        q_ref = qs[reflected(j)]
        if cls.label == "BDI":
            worst = max(worst, max_abs(np.conj(q_ref) - q))
        elif cls.label == "CI":
            worst = max(worst, max_abs(q_ref.T - q))
        elif cls.label == "DIII":
            worst = max(worst, max_abs(j_n @ q_ref.T @ j_n + q))
        elif cls.label == "CII":
            worst = max(worst, max_abs(q.T @ j_n @ q_ref - j_n))
    fixed = [0] if chiral.d == 0 else [0, num_k // 2]
    for j in fixed:
        q = qs[j]
        if cls.label == "BDI":
            worst = max(worst, max_abs(q.imag))
        elif cls.label == "CI":
            worst = max(worst, max_abs(q - q.T))
        elif cls.label == "DIII":
            a = j_n.T @ q
            worst = max(worst, max_abs(a + a.T))
        elif cls.label == "CII":
            worst = max(worst, max_abs(q.T @ j_n @ q - j_n))
    return float(worst)
