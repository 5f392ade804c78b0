"""Constructive path building between same-index families.

d = 0 connectors interpolate in the class's Cartan parametrization
(frames, skew-orthogonal / symplectic / unitary factors) through matrix
logarithms.  d = 1 connectors build fixed-point paths, fill a square (or
half-square) of momentum-by-deformation parameters, apply the class's
winding cure where one is needed, and extend to the other half of the
torus by the symmetry reflection.

Fill algorithm: the boundary data is extended into the square as the
discrete harmonic function per matrix entry (a sparse Dirichlet solve,
the unique fixed point of boundary-clamped Jacobi relaxation), then each
interior node is retracted to the target manifold (polar retraction for
unitaries, spectral projection for projections).  For unitary fills the
det phase is first lifted along the boundary and extended separately so
the matrix data entering the solve has constant determinant phase; the
winding obstruction is checked before anything else.  Failures refine
the grid (structure-preserving midpoints) up to three times and then
fail loudly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse
import scipy.sparse.linalg

from .factorizations import (
    factor_skew_orthogonal,
    factor_skew_unitary,
    factor_symplectic_symmetric,
    factor_unitary_symmetric,
    pfaffian_normal_form,
)
from .indices import index as class_index
from .indices import winding
from .linalg import (
    DEFAULT_TOL,
    BranchCutError,
    SpectralGapError,
    StructureError,
    SymplecticLogError,
    log_unitary_auto,
    max_abs,
    op_norm,
    polar_unitary,
    real_skew_log_so,
    symplectic_j,
    symplectic_log,
)
from .symmetry import (
    CONTINUITY_BOUND,
    ProjectionFamily,
    antiunitary_conj,
    chiral_basis,
    class_basis,
    get_class,
    normal_basis_t_even,
    normal_basis_t_odd,
    validate_class,
)

DEFAULT_S_COUNT = 65


class NotConnectedError(ValueError):
    """The two families have different indices; no in-class path exists."""

    def __init__(self, index0, index1):
        super().__init__(
            "families are not connected: indices %r vs %r"
            % (index0.as_record(), index1.as_record())
        )
        self.index0 = index0
        self.index1 = index1


class WindingObstructionError(ValueError):
    def __init__(self, w):
        super().__init__("boundary winding %d obstructs the unitary fill" % w)
        self.winding = w


class FillFailedError(ValueError):
    def __init__(self, min_gap, refinements):
        super().__init__(
            "fill failed after %d refinements (min retraction gap %.3e)"
            % (refinements, min_gap)
        )
        self.min_gap = min_gap
        self.refinements = refinements


@dataclass
class FillReport:
    converged: bool
    iterations: int
    min_gap: float
    refinements: int


@dataclass
class Homotopy:
    """Grid-sampled path of families: samples[i, j] = P(k_j, s_i)."""

    d: int
    n: int
    N: int
    s_values: np.ndarray
    samples: np.ndarray  # (num_s, num_k, N, N)
    meta: dict = field(default_factory=dict)

    @property
    def num_s(self):
        return self.samples.shape[0]

    @property
    def num_k(self):
        return self.samples.shape[1]

    def slice_family(self, i):
        return ProjectionFamily(d=self.d, n=self.n, N=self.N, samples=self.samples[i])


@dataclass
class HomotopyReport:
    ok: bool
    worst_residuals: dict = field(default_factory=dict)
    messages: list = field(default_factory=list)
    indices: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# group paths


def _exp_interp(x0, x1, s_values):
    return np.array([sla.expm((1.0 - s) * x0 + s * x1) for s in s_values])


def _path_in_group(u0, u1, log_fn, alg_probe, s_values, depth=0):
    """Endpoint-exact path u(s) in a matrix group.

    Primary form: exp((1-s) log u0 + s log u1) (convex hull of logs stays
    in the Lie algebra).  Falls back to the relative-log geodesic, then to
    recursive subdivision through a deterministic detour point (at most 8
    levels) when logs hit branch trouble.
    """
    log_errors = (BranchCutError, SpectralGapError, SymplecticLogError, StructureError)
    try:
        x0 = log_fn(u0)
        x1 = log_fn(u1)
        return _exp_interp(x0, x1, s_values)
    except log_errors:
        pass
    try:
        xd = log_fn(u0.conj().T @ u1)
        return np.array([u0 @ sla.expm(s * xd) for s in s_values])
    except log_errors:
        if depth >= 8:
            raise
    # detour through a deterministic nearby group element, then glue the
    # two sub-paths at mid-parameter
    w = u0 @ sla.expm(0.37 * alg_probe)
    ns = len(s_values)
    first = _path_in_group(u0, w, log_fn, alg_probe, np.linspace(0, 1, ns), depth + 1)
    second = _path_in_group(w, u1, log_fn, alg_probe, np.linspace(0, 1, ns), depth + 1)
    out = np.empty((ns,) + u0.shape, dtype=complex)
    for i, t in enumerate(np.clip(s_values * 2.0, 0.0, 2.0)):
        out[i] = _sample_path(first, t) if t <= 1.0 else _sample_path(second, t - 1.0)
    return out


def _sample_path(path, t):
    pos = t * (len(path) - 1)
    i = int(round(pos))
    return path[i]


def path_unitary(u0, u1, s_values, tol=DEFAULT_TOL):
    probe = 1j * np.diag(np.linspace(-1.0, 1.0, u0.shape[0]))
    return _path_in_group(u0, u1, lambda u: log_unitary_auto(u, tol), probe, s_values)


def path_so(r0, r1, s_values, tol=DEFAULT_TOL):
    n = r0.shape[0]
    probe = np.zeros((n, n))
    if n >= 2:
        probe[0, 1] = -1.0
        probe[1, 0] = 1.0
    path = _path_in_group(
        r0.real.astype(complex), r1.real.astype(complex),
        lambda r: real_skew_log_so(r.real, tol).astype(complex), probe.astype(complex),
        s_values,
    )
    return np.real(path)


def path_sp(u0, u1, s_values, tol=DEFAULT_TOL):
    return _path_in_group(
        u0, u1, lambda u: symplectic_log(u, tol),
        symplectic_j(u0.shape[0]).astype(complex), s_values,
    )


# ---------------------------------------------------------------------------
# frames


def _frame_from_projection(p, n, tol=DEFAULT_TOL, real=False):
    """Unitary whose first n columns span Ran P; real orthogonal in SO(N)
    when ``real`` (used for class AI in the T = K basis)."""
    mat = p.real if real else p
    w, v = np.linalg.eigh(mat)
    order = np.argsort(-w)
    v = v[:, order]
    if np.any(np.abs(w[order][:n] - 1.0) > 1e-7) or np.any(np.abs(w[order][n:]) > 1e-7):
        raise StructureError("input is not a rank-%d projection" % n)
    if real:
        v = v.real
        if np.linalg.det(v) < 0:
            v[:, -1] = -v[:, -1]
    return v


def _quaternionic_frame(p, m, tol=DEFAULT_TOL):
    """Symplectic unitary frame for a T = J K invariant projection of rank 2m.

    Columns: (ran pairs, ker pairs | -T of the same), so that the frame
    commutes with T and maps the reference pattern onto P.
    """
    N = p.shape[0]
    big_m = N // 2
    j = symplectic_j(N)

    def tmap(x):
        return j @ np.conj(x)

    def collect(proj, count):
        vecs = []
        for i in range(N):
            if len(vecs) == count:
                break
            cand = proj @ np.eye(N, dtype=complex)[:, i]
            for b in vecs:
                cand = cand - np.vdot(b, cand) * b
                tb = tmap(b)
                cand = cand - np.vdot(tb, cand) * tb
            nrm = np.linalg.norm(cand)
            if nrm < 0.3:
                continue
            psi = cand / nrm
            # one cleanup pass against accumulated roundoff
            for b in vecs:
                psi = psi - np.vdot(b, psi) * b
                tb = tmap(b)
                psi = psi - np.vdot(tb, psi) * tb
            psi = psi / np.linalg.norm(psi)
            vecs.append(psi)
        if len(vecs) != count:
            raise StructureError("quaternionic frame construction failed")
        return vecs

    ran = collect(p, m)
    ker = collect(np.eye(N) - p, big_m - m)
    first = ran + ker
    second = [-tmap(v) for v in first]
    u = np.column_stack(first + second)
    if max_abs(u.conj().T @ u - np.eye(N)) > 1e-7:
        raise StructureError("quaternionic frame lost orthonormality")
    if max_abs(u.T @ j @ u - j) > 1e-7:
        raise StructureError("quaternionic frame is not symplectic")
    return u


def _quaternionic_pattern(m, big_m):
    p = np.zeros((2 * big_m, 2 * big_m), dtype=complex)
    for a in range(m):
        p[a, a] = 1.0
        p[big_m + a, big_m + a] = 1.0
    return p


def _rank_pattern(n, N):
    p = np.zeros((N, N), dtype=complex)
    p[np.arange(n), np.arange(n)] = 1.0
    return p


def _q_block(p_transported, n, tol):
    q = 2.0 * p_transported[:n, n:]
    if max_abs(q.conj().T @ q - np.eye(n)) > 1e-7:
        raise StructureError("chiral block is not unitary")
    return q


def _expand_q_slices(q_slices, basis):
    n = q_slices.shape[-1]
    eye = np.eye(n)
    out = np.empty(q_slices.shape[:-2] + (2 * n, 2 * n), dtype=complex)
    flat = q_slices.reshape(-1, n, n)
    outf = out.reshape(-1, 2 * n, 2 * n)
    for i, q in enumerate(flat):
        blk = 0.5 * np.block([[eye, q], [q.conj().T, eye]])
        outf[i] = basis @ blk @ basis.conj().T
    return out


# ---------------------------------------------------------------------------
# d = 0 connectors


def connect0(p0, p1, ops, cls, s_count=DEFAULT_S_COUNT, tol=DEFAULT_TOL):
    """Explicit in-class path between two d=0 projections.

    Raises NotConnectedError when the d=0 invariant differs (D: Pfaffian
    sign, BDI: det component); every other class is path-connected.
    """
    cls = get_class(cls) if isinstance(cls, str) else cls
    f0 = p0 if isinstance(p0, ProjectionFamily) else ProjectionFamily.point(p0)
    f1 = p1 if isinstance(p1, ProjectionFamily) else ProjectionFamily.point(p1)
    for fam in (f0, f1):
        rep = validate_class(fam, ops, cls, tol)
        if not rep.ok:
            raise StructureError("connect0 input invalid: %s" % rep.messages)
    if (f0.n, f0.N) != (f1.n, f1.N):
        raise StructureError("rank/dimension mismatch between endpoints")
    s_values = np.linspace(0.0, 1.0, s_count)
    n, N = f0.n, f0.N
    a, b = f0.samples[0], f1.samples[0]
    meta = {"class": cls.label, "kind": "connect0"}

    if max_abs(a - b) <= tol.atol:
        slices = np.broadcast_to(a, (s_count, N, N)).copy()
        return Homotopy(d=0, n=n, N=N, s_values=s_values,
                        samples=slices[:, None, :, :], meta=meta)

    if cls.index_group(0) != "0":
        i0 = class_index(f0, ops, cls, tol, validated=True)
        i1 = class_index(f1, ops, cls, tol, validated=True)
        if i0.value != i1.value:
            raise NotConnectedError(i0, i1)

    s_values, paths = _joint_edge_paths(cls, ops, [(a, b)], n, N, s_count, tol)
    return Homotopy(d=0, n=n, N=N, s_values=s_values,
                    samples=paths[0][:, None, :, :], meta=meta)


def _joint_edge_paths(cls, ops, pairs, n, N, s_count, tol):
    """d=0 connector slices for several endpoint pairs on one common
    s-grid, refined together until the continuity bound holds."""
    count = s_count
    for _ in range(5):
        s_values = np.linspace(0.0, 1.0, count)
        paths = []
        for a, b in pairs:
            if max_abs(a - b) <= tol.atol:
                paths.append(np.broadcast_to(a, (count,) + a.shape).copy())
            else:
                paths.append(_connect0_slices(cls, ops, a, b, n, N, s_values, tol))
        step = max(
            op_norm(p[i + 1] - p[i]) for p in paths for i in range(count - 1)
        )
        if step <= 0.9 * CONTINUITY_BOUND:
            break
        count = 2 * count - 1
    return s_values, paths


def _connect0_slices(cls, ops, a, b, n, N, s_values, tol):
    label = cls.label
    if label == "A":
        u0 = _frame_from_projection(a, n, tol)
        u1 = _frame_from_projection(b, n, tol)
        pat = _rank_pattern(n, N)
        us = path_unitary(u0, u1, s_values, tol)
        return np.einsum("sij,jl,sml->sim", us, pat, np.conj(us))

    if label == "AI":
        bas = normal_basis_t_even(ops.t_mat, tol)
        a2 = bas.conj().T @ a @ bas
        b2 = bas.conj().T @ b @ bas
        o0 = _frame_from_projection(a2, n, tol, real=True)
        o1 = _frame_from_projection(b2, n, tol, real=True)
        pat = _rank_pattern(n, N)
        os_ = path_so(o0, o1, s_values, tol).astype(complex)
        inner = np.einsum("sij,jl,sml->sim", os_, pat, np.conj(os_))
        return np.einsum("ij,sjl,ml->sim", bas, inner, np.conj(bas))

    if label == "AII":
        bas = normal_basis_t_odd(ops.t_mat, tol)
        a2 = bas.conj().T @ a @ bas
        b2 = bas.conj().T @ b @ bas
        m = n // 2
        u0 = _quaternionic_frame(a2, m, tol)
        u1 = _quaternionic_frame(b2, m, tol)
        pat = _quaternionic_pattern(m, N // 2)
        us = path_sp(u0, u1, s_values, tol)
        inner = np.einsum("sij,jl,sml->sim", us, pat, np.conj(us))
        return np.einsum("ij,sjl,ml->sim", bas, inner, np.conj(bas))

    if label == "D":
        bas = normal_basis_t_even(ops.c_mat, tol)
        eye = np.eye(N)
        a_mat = (-1j * (2.0 * (bas.conj().T @ a @ bas) - eye)).real
        b_mat = (-1j * (2.0 * (bas.conj().T @ b @ bas) - eye)).real
        v0 = factor_skew_orthogonal(a_mat, "pfaffian", tol).real
        v1 = factor_skew_orthogonal(b_mat, "pfaffian", tol).real
        from .linalg import pfaffian

        pf = pfaffian(a_mat, "auto" if N <= 8 else "elimination", tol).real
        lam = pfaffian_normal_form(N // 2, 1.0 if pf > 0 else -1.0)
        vs = path_so(v0, v1, s_values, tol)
        a_s = np.einsum("sji,jl,slm->sim", vs, lam, vs)
        return np.einsum("ij,sjl,ml->sim",
                         bas, 0.5 * (eye + 1j * a_s), np.conj(bas))

    if label == "C":
        bas = normal_basis_t_odd(ops.c_mat, tol)
        j = symplectic_j(N)
        eye = np.eye(N)
        a_mat = 1j * j @ (2.0 * (bas.conj().T @ a @ bas) - eye)
        b_mat = 1j * j @ (2.0 * (bas.conj().T @ b @ bas) - eye)
        v0 = factor_symplectic_symmetric(a_mat, tol)
        v1 = factor_symplectic_symmetric(b_mat, tol)
        vs = path_sp(v0, v1, s_values, tol)
        a_s = np.einsum("sji,sjm->sim", vs, vs)
        return np.einsum("ij,sjl,ml->sim",
                         bas, 0.5 * (eye + 1j * np.einsum("jl,slm->sjm", j, a_s)),
                         np.conj(bas))

    # chiral classes: work on the unitary block Q
    if label == "AIII":
        bas = chiral_basis(ops.s_mat, tol)
    else:
        bas = class_basis(cls, ops, tol)
    q0 = _q_block(bas.conj().T @ a @ bas, n, tol)
    q1 = _q_block(bas.conj().T @ b @ bas, n, tol)
    q_s = _fixed_point_q_path(cls, q0, q1, s_values, tol)
    return _expand_q_slices(q_s, bas)


def _joint_q_paths(cls, pairs, s_count, tol):
    """Fixed-point Q paths for several endpoint pairs on one common s-grid,
    refined together until the continuity bound holds at the P level."""
    count = s_count
    for _ in range(5):
        s_values = np.linspace(0.0, 1.0, count)
        paths = [_fixed_point_q_path(cls, a, b, s_values, tol) for a, b in pairs]
        step = max(
            op_norm(p[i + 1] - p[i]) for p in paths for i in range(count - 1)
        )
        # a Q jump of size x moves the projection by x/2
        if 0.5 * step <= 0.9 * CONTINUITY_BOUND:
            break
        count = 2 * count - 1
    return s_values, paths


def _fixed_point_q_path(cls, q0, q1, s_values, tol, cure=None):
    """Path between two fixed-point blocks inside the class's d=0 space.

    cure = (winding, ) applies the CI / DIII determinant twist
    diag(e^{i pi W s}, 1, ..., 1) to the factor path.
    """
    label = cls.label
    n = q0.shape[0]

    def cure_diag(s):
        d = np.ones(n, dtype=complex)
        if cure:
            d[0] = np.exp(1j * np.pi * cure * s)
        return d

    if label == "AIII":
        return path_unitary(q0, q1, s_values, tol)
    if label == "BDI":
        d0 = np.linalg.det(q0.real)
        d1 = np.linalg.det(q1.real)
        if d0 * d1 < 0:
            raise StructureError("BDI blocks in different O(n) components")
        flip = np.eye(n)
        if d0 < 0:
            flip = np.diag(np.concatenate([np.ones(n - 1), [-1.0]]))
        r_s = path_so(q0.real @ flip, q1.real @ flip, s_values, tol)
        return np.einsum("sij,jl->sil", r_s, flip).astype(complex)
    if label == "CI":
        v0 = factor_unitary_symmetric(q0, tol)
        v1 = factor_unitary_symmetric(q1, tol)
        v_s = path_unitary(v0, v1, s_values, tol)
        if cure:
            v_s = np.array([cure_diag(s)[:, None] * v for s, v in zip(s_values, v_s)])
        return np.einsum("sji,sjl->sil", v_s, v_s)
    if label == "DIII":
        j_n = symplectic_j(n)
        v0 = factor_skew_unitary(j_n.T @ q0, tol)
        v1 = factor_skew_unitary(j_n.T @ q1, tol)
        v_s = path_unitary(v0, v1, s_values, tol)
        if cure:
            v_s = np.array([cure_diag(s)[:, None] * v for s, v in zip(s_values, v_s)])
        a_s = np.einsum("sji,jl,slm->sim", v_s, j_n, v_s)
        return np.einsum("ij,sjm->sim", j_n, a_s)
    if label == "CII":
        return path_sp(q0, q1, s_values, tol)
    raise AssertionError(label)


# ---------------------------------------------------------------------------
# square fills


@dataclass
class SquareBoundary:
    """Values on the boundary of a parameter square.

    bottom/top run along the k direction (s = 0 / s = 1); left/right run
    along the s direction (first / last k node).  Corners must agree.
    """

    bottom: np.ndarray
    top: np.ndarray
    left: np.ndarray
    right: np.ndarray

    def check(self, tol=DEFAULT_TOL):
        pairs = [
            (self.bottom[0], self.left[0]),
            (self.bottom[-1], self.right[0]),
            (self.top[0], self.left[-1]),
            (self.top[-1], self.right[-1]),
        ]
        worst = max(max_abs(x - y) for x, y in pairs)
        if worst > 100 * tol.atol:
            raise StructureError("boundary corners disagree (%.3e)" % worst)

    @property
    def nk(self):
        return self.bottom.shape[0]

    @property
    def ns(self):
        return self.left.shape[0]

    def loop(self):
        """Closed boundary loop, counterclockwise from (s=0, k=0)."""
        return np.concatenate([
            self.bottom,
            self.right[1:],
            self.top[-2::-1],
            self.left[-2:0:-1],
        ])

    def refined(self, midpoint, refine_k=True, refine_s=True):
        def refine_edge(edge):
            out = [edge[0]]
            for a, b in zip(edge[:-1], edge[1:]):
                out.append(midpoint(a, b))
                out.append(b)
            return np.array(out)

        bottom, top = self.bottom, self.top
        left, right = self.left, self.right
        if refine_k:
            bottom, top = refine_edge(bottom), refine_edge(top)
        if refine_s:
            left, right = refine_edge(left), refine_edge(right)
        return SquareBoundary(bottom=bottom, top=top, left=left, right=right)


def _unitary_midpoint(a, b):
    return polar_unitary(0.5 * (a + b))


def _projection_midpoint(a, b):
    n = int(round(a.trace().real))
    p, _, _ = _spectral_retract(0.5 * (a + b), n, DEFAULT_TOL)
    return p


def _laplace_solver(ns, nk):
    """Sparse factorization of the grid Laplacian with Dirichlet boundary."""
    interior = [(i, j) for i in range(1, ns - 1) for j in range(1, nk - 1)]
    num = {node: t for t, node in enumerate(interior)}
    rows, cols, vals = [], [], []
    for t, (i, j) in enumerate(interior):
        rows.append(t)
        cols.append(t)
        vals.append(4.0)
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nb = (i + di, j + dj)
            if nb in num:
                rows.append(t)
                cols.append(num[nb])
                vals.append(-1.0)
    mat = scipy.sparse.csc_matrix(
        (np.asarray(vals, dtype=complex), (rows, cols)),
        shape=(len(interior), len(interior)),
    )
    return interior, num, scipy.sparse.linalg.factorized(mat)


def _harmonic_extend(grid):
    """Fill the interior of grid (ns, nk, ...) with the discrete harmonic
    extension of its boundary values."""
    ns, nk = grid.shape[:2]
    if ns <= 2 or nk <= 2:
        return grid, 0
    interior, num, solve = _laplace_solver(ns, nk)
    extra = int(np.prod(grid.shape[2:])) if grid.ndim > 2 else 1
    rhs = np.zeros((len(interior), extra), dtype=complex)
    flat = grid.reshape(ns, nk, extra)
    for t, (i, j) in enumerate(interior):
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nb = (i + di, j + dj)
            if nb not in num:
                rhs[t] += flat[nb[0], nb[1]]
    sol = np.column_stack([solve(rhs[:, c]) for c in range(extra)])
    out = grid.copy()
    outf = out.reshape(ns, nk, extra)
    for t, (i, j) in enumerate(interior):
        outf[i, j] = sol[t]
    return out, 1


def _spectral_retract(m, n, tol):
    """Nearest rank-n projection to a hermitian contraction, plus its gap."""
    h = 0.5 * (m + m.conj().T)
    w, v = np.linalg.eigh(h)
    gap = float(w[-n] - w[-n - 1]) if 0 < n < h.shape[0] else np.inf
    keep = v[:, -n:]
    return keep @ keep.conj().T, gap, int(n)


def _grid_continuity_kd(grid):
    """(worst k-direction jump, worst s-direction jump) of a filled grid."""
    ns, nk = grid.shape[:2]
    worst_k = 0.0
    worst_s = 0.0
    for i in range(ns):
        for j in range(nk - 1):
            worst_k = max(worst_k, op_norm(grid[i, j + 1] - grid[i, j]))
    for i in range(ns - 1):
        for j in range(nk):
            worst_s = max(worst_s, op_norm(grid[i + 1, j] - grid[i, j]))
    return worst_k, worst_s


def _grid_continuity(grid):
    return max(_grid_continuity_kd(grid))


def _slerp(a, b, t):
    """Great-circle interpolation from a (t=0) to b (t=1) on the unit sphere
    of C^n viewed as a real sphere; requires b != -a."""
    ip = float(np.clip(np.real(np.vdot(a, b)), -1.0, 1.0))
    omega = np.arccos(ip)
    if omega < 1e-9:
        v = (1.0 - t) * a + t * b
        return v / np.linalg.norm(v)
    return (np.sin((1.0 - t) * omega) * a + np.sin(t * omega) * b) / np.sin(omega)


def _rot_between(x, y):
    """Unitary mapping x to y (unit vectors) and fixing span{x, y}^perp."""
    n = x.shape[0]
    overlap = np.vdot(x, y)
    resid = y - overlap * x
    nr = np.linalg.norm(resid)
    eye = np.eye(n, dtype=complex)
    if nr < 1e-12:
        phase = overlap / abs(overlap)
        return eye + (phase - 1.0) * np.outer(x, x.conj())
    e2 = resid / nr
    r = eye.copy()
    r += (overlap - 1.0) * np.outer(x, x.conj())
    r += (np.conj(overlap) - 1.0) * np.outer(e2, e2.conj())
    r += nr * np.outer(e2, x.conj()) - nr * np.outer(x, e2.conj())
    return r


class _LoopContraction:
    """Explicit null-homotopy of a winding-0 closed loop of unitaries.

    After peeling the det phase, the loop is contracted in n stages:
    each column stage moves one column loop to a fixed unit vector along
    great circles (possible since spheres of dim >= 3 are simply
    connected), and the final stage unwinds the remaining scalar phase,
    whose winding vanishes exactly because the total winding did.

    eval(r, u): the contracted loop at shrink radius r in [0, 1] (1 = the
    input loop, 0 = a constant) and fractional loop position u; exact at
    r = 1 on the input nodes.
    """

    def __init__(self, loop, tol=DEFAULT_TOL, seed=7):
        loop = np.asarray(loop, dtype=complex)
        self.L = loop.shape[0]
        self.n = loop.shape[1]
        self.tol = tol
        self.v0 = loop[0]
        mu = np.einsum("ij,ujl->uil", self.v0.conj().T, loop)
        dets = np.array([np.linalg.det(q) for q in mu])
        dets = dets / np.abs(dets)
        from .indices import track_phases

        closed = np.concatenate([dets, dets[:1]])
        alpha = track_phases(closed, tol).alpha
        if abs(alpha[-1] - alpha[0]) > 1e-6:
            raise WindingObstructionError(int(round((alpha[-1] - alpha[0]) / (2 * np.pi))))
        self.beta_closed = alpha
        rng = np.random.default_rng(seed)
        cur = mu * np.exp(-1j * alpha[: self.L] / self.n)[:, None, None]
        self.stages = []  # (loop values at stage start, target vector) per column
        self.targets = []
        for col in range(self.n - 1):
            cols = cur[:, :, col]
            q = self._pick_target(cols, self.targets, rng)
            self.stages.append(cur.copy())
            self.targets.append(q)
            for u in range(self.L):
                rot = _rot_between(cur[u][:, col], q)
                cur[u] = rot @ cur[u]
        # scalar stage: the last column is the fixed completion times z(u)
        self.stages.append(cur.copy())
        if self.n > 1:
            frame = np.column_stack(self.targets)
            comp = np.eye(self.n, dtype=complex) - frame @ frame.conj().T
            w_eig, vecs = np.linalg.eigh(comp)
            q_last = vecs[:, -1]
        else:
            q_last = np.ones(1, dtype=complex)
        self.q_last = q_last
        z = np.array([np.vdot(q_last, cur[u][:, -1]) for u in range(self.L)])
        z = z / np.abs(z)
        theta = track_phases(np.concatenate([z, z[:1]]), tol).alpha
        if abs(theta[-1] - theta[0]) > 1e-6:
            raise StructureError("residual scalar winding after column reduction")
        self.theta_closed = theta

    def _pick_target(self, cols, previous, rng):
        """Unit vector q orthogonal to previous targets with the column loop
        staying away from the antipode -q."""
        n = self.n

        def project(v):
            for p in previous:
                v = v - np.vdot(p, v) * p
            nrm = np.linalg.norm(v)
            return v / nrm if nrm > 1e-8 else None

        candidates = [cols[0].copy()]
        for i in range(n):
            e = np.zeros(n, dtype=complex)
            e[i] = 1.0
            candidates.append(e)
        for _ in range(60):
            candidates.append(
                rng.standard_normal(n) + 1j * rng.standard_normal(n)
            )
        best, best_score = None, -1.0
        for cand in candidates:
            q = project(np.asarray(cand, dtype=complex))
            if q is None:
                continue
            score = min(float(np.linalg.norm(c + q)) for c in cols)
            if score > best_score:
                best, best_score = q, score
            if score >= 0.7:
                return q
        if best is None or best_score < 0.1:
            raise FillFailedError(best_score if best_score > 0 else 0.0, 0)
        return best

    def _interp_loop(self, arr, u):
        a = int(np.floor(u)) % self.L
        b = (a + 1) % self.L
        frac = float(u - np.floor(u))
        if frac < 1e-12:
            return arr[a].copy()
        return polar_unitary((1.0 - frac) * arr[a] + frac * arr[b], self.tol)

    def _interp_closed_scalar(self, arr, u):
        a = int(np.floor(u)) % self.L
        frac = float(u - np.floor(u))
        return (1.0 - frac) * arr[a] + frac * arr[a + 1]

    def eval(self, r, u):
        r = float(np.clip(r, 0.0, 1.0))
        n_stage = len(self.stages)
        pos = (1.0 - r) * n_stage
        idx = min(int(np.floor(pos)), n_stage - 1)
        t_local = 1.0 - (pos - idx)  # 1 at the shell start, 0 at its end
        w = self._interp_loop(self.stages[idx], u)
        if idx < n_stage - 1:
            x = w[:, idx]
            y = _slerp(self.targets[idx], x, t_local)
            w = _rot_between(x, y) @ w
        else:
            theta = self._interp_closed_scalar(self.theta_closed, u)
            w = w.copy()
            w[:, -1] = w[:, -1] * np.exp(1j * (t_local - 1.0) * theta)
        phase = np.exp(1j * r * self._interp_closed_scalar(self.beta_closed, u) / self.n)
        return self.v0 @ (phase * w)


def _contraction_unitary_fill(boundary, tol):
    """Unitary square fill: transport sweep plus a based defect contraction.

    Rows are the bottom edge carried along the left edge, with a small
    blended correction pinning the right edge; the residual defect
    against the top edge is a loop pinned to the identity at both ends,
    whose null-homotopy (evaluated along s, so the loop parameter keeps
    the full k resolution) is multiplied in simultaneously.
    """
    ns, nk = boundary.ns, boundary.nk
    n = boundary.bottom.shape[-1]
    bottom, top = boundary.bottom, boundary.top
    left, right = boundary.left, boundary.right
    grid = np.zeros((ns, nk, n, n), dtype=complex)
    if ns <= 2 or nk <= 2:
        grid[0, :] = bottom
        grid[-1, :] = top
        grid[:, 0] = left
        grid[:, -1] = right
        return grid
    t_blend = np.linspace(0.0, 1.0, nk)
    rows = np.zeros((ns, nk, n, n), dtype=complex)
    rows[0] = bottom
    e_cur = np.broadcast_to(np.eye(n, dtype=complex), (nk, n, n)).copy()
    c_prev = np.eye(n, dtype=complex)
    l0_inv = left[0].conj().T
    for i in range(1, ns):
        mover = left[i] @ l0_inv
        base = np.einsum("ij,kjl->kil", mover, bottom)
        c_cur = base[-1].conj().T @ right[i]
        y = log_unitary_auto(c_prev.conj().T @ c_cur, tol)
        for k in range(nk):
            e_cur[k] = e_cur[k] @ sla.expm(t_blend[k] * y)
        rows[i] = np.einsum("kij,kjl->kil", base, e_cur)
        c_prev = c_cur
    delta = np.einsum("kji,kjl->kil", np.conj(rows[-1]), top)
    contraction = _LoopContraction(delta[:-1], tol)
    s_values = np.linspace(0.0, 1.0, ns)
    for i in range(ns):
        r = s_values[i]
        base_val = contraction.eval(r, 0.0)
        base_inv = base_val.conj().T
        for k in range(nk):
            u = float(k % (nk - 1))
            corr = base_inv @ contraction.eval(r, u)
            grid[i, k] = rows[i, k] @ corr
    grid[0, :] = bottom
    grid[-1, :] = top
    grid[:, 0] = left
    grid[:, -1] = right
    return grid


def _transport_projection_fill(boundary, rank, tol):
    """Projection fill via the gauge loop of exact direct rotations.

    Writes the boundary loop as P(t) = G(t) P(0) G(t)*, closes G through
    the stabilizer of P(0), kills its det winding inside the stabilizer,
    fills G as a unitary square and conjugates P(0) by the result, so
    interior nodes are rank-``rank`` projections by construction.
    """
    loop = boundary.loop()
    L = loop.shape[0]
    N = loop.shape[1]
    eye = np.eye(N)
    gam = [np.eye(N, dtype=complex)]
    for t in range(L):
        p_cur = loop[t]
        p_nxt = loop[(t + 1) % L]
        rot = polar_unitary(p_nxt @ p_cur + (eye - p_nxt) @ (eye - p_cur), tol)
        gam.append(rot @ gam[-1])
    p0 = loop[0]
    monodromy = gam[L]
    if max_abs(monodromy @ p0 - p0 @ monodromy) > 1e-7:
        raise StructureError("transport monodromy does not stabilize the base point")
    w_eig, vecs = np.linalg.eigh(p0)
    order = np.argsort(-w_eig)
    frame = vecs[:, order]
    m_t = frame.conj().T @ monodromy @ frame
    x_blk = np.zeros((N, N), dtype=complex)
    x_blk[:rank, :rank] = log_unitary_auto(m_t[:rank, :rank], tol)
    x_blk[rank:, rank:] = log_unitary_auto(m_t[rank:, rank:], tol)

    def stab_path(tau):
        return frame @ sla.expm(tau * x_blk) @ frame.conj().T

    gauge = np.array([gam[t] @ stab_path(t / L).conj().T for t in range(L)])
    w = winding(gauge, tol)
    if w != 0:
        twist = np.ones(N, dtype=complex)
        for t in range(L):
            tw = twist.copy()
            tw[0] = np.exp(-2j * np.pi * w * t / L)
            gauge[t] = gauge[t] @ frame @ np.diag(tw) @ frame.conj().T
        if winding(gauge, tol) != 0:
            raise StructureError("gauge winding kill failed")
    u_boundary = SquareBoundary(
        bottom=gauge[: boundary.nk],
        right=np.concatenate([gauge[boundary.nk - 1 : boundary.nk],
                              gauge[boundary.nk : boundary.nk + boundary.ns - 1]]),
        top=_loop_segment(gauge, boundary, "top"),
        left=_loop_segment(gauge, boundary, "left"),
    )
    g_grid = _contraction_unitary_fill(u_boundary, tol)
    ns, nk = boundary.ns, boundary.nk
    grid = np.zeros((ns, nk, N, N), dtype=complex)
    grid[0, :] = boundary.bottom
    grid[-1, :] = boundary.top
    grid[:, 0] = boundary.left
    grid[:, -1] = boundary.right
    for i in range(1, ns - 1):
        for j in range(1, nk - 1):
            g = g_grid[i, j]
            grid[i, j] = g @ p0 @ g.conj().T
    return grid


def _loop_segment(loop_vals, boundary, which):
    """Slice a closed loop array back into one of the four boundary edges."""
    nk, ns = boundary.nk, boundary.ns
    L = loop_vals.shape[0]
    if which == "top":
        # loop positions nk-1+ns-1 .. nk-1+ns-1+nk-1 traverse the top from
        # the last k node back to the first
        start = (nk - 1) + (ns - 1)
        idx = [(start + t) % L for t in range(nk)]
        return loop_vals[idx][::-1]
    if which == "left":
        start = 2 * (nk - 1) + (ns - 1)
        idx = [(start + t) % L for t in range(ns)]
        return loop_vals[idx][::-1]
    raise ValueError(which)


def _try_harmonic_projection_fill(boundary, rank, tol, continuity_bound):
    ns, nk = boundary.ns, boundary.nk
    N = boundary.bottom.shape[-1]
    grid = np.zeros((ns, nk, N, N), dtype=complex)
    grid[0, :] = boundary.bottom
    grid[-1, :] = boundary.top
    grid[:, 0] = boundary.left
    grid[:, -1] = boundary.right
    grid, _ = _harmonic_extend(grid)
    min_gap = np.inf
    for i in range(1, ns - 1):
        for j in range(1, nk - 1):
            p, gap, _ = _spectral_retract(grid[i, j], rank, tol)
            min_gap = min(min_gap, gap)
            if gap < tol.gap_min:
                return None, min_gap
            grid[i, j] = p
    if _grid_continuity(grid) > continuity_bound:
        return None, min_gap
    return grid, min_gap


def fill_projection_square(boundary, rank, tol=DEFAULT_TOL, max_refine=3,
                           continuity_bound=CONTINUITY_BOUND):
    """Extend a boundary loop of rank-``rank`` projections into the square.

    The harmonic extension with spectral retraction is tried first; if it
    cannot meet the gap or continuity requirements, the fill switches to
    the transport construction: the boundary loop is written as
    P(t) = G(t) P(0) G(t)* with G built from exact direct rotations, the
    gauge loop is closed through the stabilizer of P(0) and filled as a
    unitary square, making every interior node a conjugate of P(0).

    Returns (grid, FillReport); the boundary is reproduced exactly.
    """
    boundary.check(tol)
    for edge in (boundary.bottom, boundary.top, boundary.left, boundary.right):
        for p in edge:
            if abs(p.trace().real - rank) > 1e-6 or max_abs(p @ p - p) > 1e-6:
                raise StructureError("boundary node is not a rank-%d projection" % rank)
    harmonic_boundary = boundary
    min_gap = np.inf
    for attempt in range(2):
        grid, gap = _try_harmonic_projection_fill(harmonic_boundary, rank, tol,
                                                  continuity_bound)
        min_gap = min(min_gap, gap)
        if grid is not None:
            return grid, FillReport(True, 1 + attempt, float(gap), attempt)
        harmonic_boundary = harmonic_boundary.refined(_projection_midpoint)
    refinements = 0
    while True:
        try:
            grid = _transport_projection_fill(boundary, rank, tol)
            jump_k, jump_s = _grid_continuity_kd(grid)
        except SpectralGapError:
            grid, jump_k, jump_s = None, np.inf, np.inf
        if grid is not None and max(jump_k, jump_s) <= continuity_bound:
            return grid, FillReport(True, 1, float(min_gap), refinements)
        if refinements >= 2 * max_refine:
            raise FillFailedError(float(min_gap), refinements)
        boundary = boundary.refined(_projection_midpoint,
                                    refine_k=jump_k > continuity_bound,
                                    refine_s=jump_s > continuity_bound)
        refinements += 1


def _try_harmonic_unitary_fill(boundary, tol, continuity_bound):
    ns, nk = boundary.ns, boundary.nk
    n = boundary.bottom.shape[-1]
    loop = boundary.loop()
    dets = np.array([np.linalg.det(q) for q in loop])
    from .indices import track_phases

    beta_loop = track_phases(dets / np.abs(dets), tol).alpha
    beta = np.zeros((ns, nk))
    pos = 0
    for j in range(nk):
        beta[0, j] = beta_loop[pos]
        pos += 1
    for i in range(1, ns):
        beta[i, nk - 1] = beta_loop[pos]
        pos += 1
    for j in range(nk - 2, -1, -1):
        beta[ns - 1, j] = beta_loop[pos]
        pos += 1
    for i in range(ns - 2, 0, -1):
        beta[i, 0] = beta_loop[pos]
        pos += 1
    beta_grid, _ = _harmonic_extend(beta.astype(complex))
    beta_grid = beta_grid.real

    grid = np.zeros((ns, nk, n, n), dtype=complex)
    grid[0, :] = boundary.bottom
    grid[-1, :] = boundary.top
    grid[:, 0] = boundary.left
    grid[:, -1] = boundary.right
    phase = np.exp(-1j * beta_grid / n)
    grid = grid * phase[:, :, None, None]
    grid, _ = _harmonic_extend(grid)
    min_gap = np.inf
    for i in range(1, ns - 1):
        for j in range(1, nk - 1):
            svals = np.linalg.svd(grid[i, j], compute_uv=False)
            min_gap = min(min_gap, float(svals[-1]))
            if svals[-1] < tol.gap_min:
                return None, min_gap
            grid[i, j] = polar_unitary(grid[i, j], tol)
    grid = grid * np.exp(1j * beta_grid / n)[:, :, None, None]
    grid[0, :] = boundary.bottom
    grid[-1, :] = boundary.top
    grid[:, 0] = boundary.left
    grid[:, -1] = boundary.right
    if _grid_continuity(grid) > continuity_bound:
        return None, min_gap
    return grid, min_gap


def fill_unitary_square(boundary, tol=DEFAULT_TOL, max_refine=3,
                        continuity_bound=CONTINUITY_BOUND):
    """Extend a boundary loop of unitaries into the square.

    The boundary winding must vanish (WindingObstructionError otherwise).
    A harmonic extension (det phase extended separately, polar
    retraction) is tried first; on failure the fill switches to an
    explicit null-homotopy of the boundary loop built by multiplicative
    smoothing (see _LoopContraction), evaluated radially on the square.
    """
    boundary.check(tol)
    w = winding(boundary.loop(), tol)
    if w != 0:
        raise WindingObstructionError(w)
    harmonic_boundary = boundary
    min_gap = np.inf
    for attempt in range(2):
        grid, gap = _try_harmonic_unitary_fill(harmonic_boundary, tol, continuity_bound)
        min_gap = min(min_gap, gap)
        if grid is not None:
            return grid, FillReport(True, 1 + attempt, float(gap), attempt)
        harmonic_boundary = harmonic_boundary.refined(_unitary_midpoint)
    refinements = 0
    while True:
        grid = _contraction_unitary_fill(boundary, tol)
        jump_k, jump_s = _grid_continuity_kd(grid)
        if max(jump_k, jump_s) <= continuity_bound:
            return grid, FillReport(True, 1, float(min_gap), refinements)
        if refinements >= 2 * max_refine:
            raise FillFailedError(float(min_gap), refinements)
        boundary = boundary.refined(_unitary_midpoint,
                                    refine_k=jump_k > continuity_bound,
                                    refine_s=jump_s > continuity_bound)
        refinements += 1


# ---------------------------------------------------------------------------
# d = 1 connectors


def _half_line_nodes(num_k):
    g = num_k // 2
    return list(range(g, num_k)) + [0]


def _full_line_nodes(num_k):
    return list(range(num_k)) + [0]


def connect1_A(f0, f1, ops, cls, s_count=DEFAULT_S_COUNT, tol=DEFAULT_TOL):
    """Class A in d=1: connect at the seam k = +-1/2, fill the full square."""
    cls = get_class(cls) if isinstance(cls, str) else cls
    _, (edge_slices,) = _joint_edge_paths(
        cls, ops, [(f0.samples[0], f1.samples[0])], f0.n, f0.N, s_count, tol,
    )
    nodes = _full_line_nodes(f0.num_k)
    boundary = SquareBoundary(
        bottom=f0.samples[nodes], top=f1.samples[nodes],
        left=edge_slices, right=edge_slices,
    )
    grid, report = fill_projection_square(boundary, f0.n, tol)
    samples = grid[:, :-1]
    return Homotopy(
        d=1, n=f0.n, N=f0.N, s_values=np.linspace(0, 1, grid.shape[0]),
        samples=samples, meta={"class": cls.label, "kind": "connect1-A",
                               "fill": report},
    )


def connect1_nonchiral(f0, f1, ops, cls, s_count=DEFAULT_S_COUNT, tol=DEFAULT_TOL):
    """Real non-chiral classes (AI, AII, C, D): connect the fixed points,
    fill the half square, and reflect through the anti-unitary relation."""
    cls = get_class(cls) if isinstance(cls, str) else cls
    if cls.index_group(1) != "0":
        i0 = class_index(f0, ops, cls, tol, validated=True)
        i1 = class_index(f1, ops, cls, tol, validated=True)
        if i0.value != i1.value:
            raise NotConnectedError(i0, i1)
    j_zero = f0.fixed_point_index(0)
    j_half = f0.fixed_point_index(0.5)
    _, (path0, path_h) = _joint_edge_paths(
        cls, ops,
        [(f0.samples[j_zero], f1.samples[j_zero]),
         (f0.samples[j_half], f1.samples[j_half])],
        f0.n, f0.N, s_count, tol,
    )
    nodes = _half_line_nodes(f0.num_k)
    boundary = SquareBoundary(
        bottom=f0.samples[nodes], top=f1.samples[nodes],
        left=path0, right=path_h,
    )
    grid, report = fill_projection_square(boundary, f0.n, tol)

    if cls.has_c:
        def reflect(p):
            return antiunitary_conj(ops.c_mat, np.eye(f0.N) - p)
    else:
        def reflect(p):
            return antiunitary_conj(ops.t_mat, p)

    samples = _assemble_reflected(grid, reflect)
    return Homotopy(
        d=1, n=f0.n, N=f0.N, s_values=np.linspace(0, 1, grid.shape[0]),
        samples=samples, meta={"class": cls.label, "kind": "connect1-nonchiral",
                               "fill": report},
    )


def _assemble_reflected(grid, reflect):
    """Assemble full-torus slices from a half-square fill on k in [0, 1/2].

    grid has g'+1 k-columns; the output has 2g' stored nodes with the
    k < 0 half defined by the class reflection.
    """
    ns, cols = grid.shape[:2]
    gp = cols - 1
    num_k = 2 * gp
    out = np.empty((ns, num_k) + grid.shape[2:], dtype=complex)
    for i in range(ns):
        for j in range(num_k):
            if j == 0:
                out[i, 0] = grid[i, gp]
            elif j >= gp:
                out[i, j] = grid[i, j - gp]
            else:
                out[i, j] = reflect(grid[i, gp - j])
    return out


def connect1_chiral(f0, f1, ops, cls, s_count=DEFAULT_S_COUNT, tol=DEFAULT_TOL):
    """Chiral classes in d=1 via the unitary blocks Q(k).

    AIII fills the full square; the real chiral classes fill the half
    square after curing any boundary det winding (CI: any integer twist,
    DIII: the even twist that index equality guarantees), then reflect
    through the class's functional relation on Q.
    """
    cls = get_class(cls) if isinstance(cls, str) else cls
    if cls.index_group(1) != "0":
        i0 = class_index(f0, ops, cls, tol, validated=True)
        i1 = class_index(f1, ops, cls, tol, validated=True)
        if i0.value != i1.value:
            raise NotConnectedError(i0, i1)
    n = f0.n
    s_values = np.linspace(0.0, 1.0, s_count)

    if cls.label == "AIII":
        bas = chiral_basis(ops.s_mat, tol)
    else:
        bas = class_basis(cls, ops, tol)
    q0 = np.array([_q_block(bas.conj().T @ p @ bas, n, tol) for p in f0.samples])
    q1 = np.array([_q_block(bas.conj().T @ p @ bas, n, tol) for p in f1.samples])

    if cls.label == "AIII":
        s_values, (edge,) = _joint_q_paths(cls, [(q0[0], q1[0])], s_count, tol)
        nodes = _full_line_nodes(f0.num_k)
        boundary = SquareBoundary(bottom=q0[nodes], top=q1[nodes],
                                  left=edge, right=edge)
        w = winding(boundary.loop(), tol)
        if w != 0:
            raise AssertionError("AIII boundary winding %d with equal indices" % w)
        grid, report = fill_unitary_square(boundary, tol)
        samples = _expand_q_slices(grid[:, :-1], bas)
        return Homotopy(d=1, n=n, N=f0.N,
                        s_values=np.linspace(0, 1, grid.shape[0]), samples=samples,
                        meta={"class": "AIII", "kind": "connect1-chiral",
                              "fill": report, "cure": 0})

    j_zero = f0.fixed_point_index(0)
    j_half = f0.fixed_point_index(0.5)
    nodes = _half_line_nodes(f0.num_k)

    s_values, (path_z, path_h) = _joint_q_paths(
        cls, [(q0[j_zero], q1[j_zero]), (q0[j_half], q1[j_half])], s_count, tol,
    )
    cure = 0
    boundary = SquareBoundary(bottom=q0[nodes], top=q1[nodes],
                              left=path_z, right=path_h)
    w = winding(boundary.loop(), tol)
    if w != 0:
        if cls.label in ("BDI", "CII"):
            raise AssertionError(
                "%s boundary winding %d should vanish when indices match"
                % (cls.label, w))
        if cls.label == "DIII" and w % 2:
            raise AssertionError("DIII boundary winding must be even; got %d" % w)
        for cure_try in (w, -w):
            cured = _fixed_point_q_path(cls, q0[j_zero], q1[j_zero], s_values, tol,
                                        cure=cure_try)
            boundary = SquareBoundary(bottom=q0[nodes], top=q1[nodes],
                                      left=cured, right=path_h)
            if winding(boundary.loop(), tol) == 0:
                cure = cure_try
                break
        else:
            raise AssertionError("winding cure failed to cancel w=%d" % w)

    grid, report = fill_unitary_square(boundary, tol)
    j_n = symplectic_j(n) if cls.label in ("DIII", "CII") else None

    def reflect(q):
        if cls.label == "BDI":
            return np.conj(q)
        if cls.label == "CI":
            return q.T
        if cls.label == "DIII":
            return -j_n @ q.T @ j_n
        return -j_n @ np.conj(q) @ j_n  # CII

    q_full = _assemble_reflected(grid, reflect)
    samples = _expand_q_slices(q_full, bas)
    return Homotopy(d=1, n=n, N=f0.N,
                    s_values=np.linspace(0, 1, grid.shape[0]), samples=samples,
                    meta={"class": cls.label, "kind": "connect1-chiral",
                          "fill": report, "cure": cure})


def connect(f0, f1, ops, cls, s_count=DEFAULT_S_COUNT, tol=DEFAULT_TOL):
    """Dispatch to the class- and dimension-appropriate connector."""
    cls = get_class(cls) if isinstance(cls, str) else cls
    for fam in (f0, f1):
        rep = validate_class(fam, ops, cls, tol)
        if not rep.ok:
            raise StructureError("connect input invalid: %s" % rep.messages)
    if (f0.d, f0.n, f0.N, f0.num_k) != (f1.d, f1.n, f1.N, f1.num_k):
        raise StructureError("family shapes differ")
    if f0.d == 0:
        return connect0(f0, f1, ops, cls, s_count, tol)
    if max_abs(f0.samples - f1.samples) <= tol.atol:
        samples = np.broadcast_to(f0.samples, (s_count,) + f0.samples.shape).copy()
        return Homotopy(d=1, n=f0.n, N=f0.N, s_values=np.linspace(0, 1, s_count),
                        samples=samples, meta={"class": cls.label, "kind": "constant"})
    if cls.label == "A":
        return connect1_A(f0, f1, ops, cls, s_count, tol)
    if cls.label in ("AI", "AII", "C", "D"):
        return connect1_nonchiral(f0, f1, ops, cls, s_count, tol)
    return connect1_chiral(f0, f1, ops, cls, s_count, tol)


# ---------------------------------------------------------------------------
# verification


def verify_homotopy(h, ops, cls, p0=None, p1=None, tol=DEFAULT_TOL,
                    continuity_bound=CONTINUITY_BOUND, check_index=True,
                    slice_atol=1e-8):
    """Independent checker for everything the connectors produce.

    Re-validates every slice, endpoint agreement (when the endpoint
    families are supplied), continuity in both directions, and index
    constancy along the deformation.
    """
    cls = get_class(cls) if isinstance(cls, str) else cls
    res = {}
    msgs = []
    ok = True
    from .linalg import Tolerance

    slice_tol = Tolerance(atol=max(slice_atol, tol.atol), gap_min=tol.gap_min)
    worst_slice = 0.0
    for i in range(h.num_s):
        rep = validate_class(h.slice_family(i), ops, cls, slice_tol, continuity_bound)
        worst_slice = max(worst_slice, rep.worst() if not rep.ok else 0.0)
        if not rep.ok:
            ok = False
            msgs.append("slice %d invalid: %s" % (i, rep.messages))
            break
    res["slices"] = worst_slice

    step = 0.0
    for i in range(h.num_s - 1):
        for j in range(h.num_k):
            step = max(step, op_norm(h.samples[i + 1, j] - h.samples[i, j]))
    res["s-continuity"] = step
    if step > continuity_bound:
        ok = False
        msgs.append("s-direction jump %.3f exceeds %.3f" % (step, continuity_bound))

    for name, fam, idx in (("start", p0, 0), ("end", p1, h.num_s - 1)):
        if fam is None:
            continue
        if h.num_k % fam.num_k:
            ok = False
            msgs.append("%s grid incompatible" % name)
            continue
        stride = h.num_k // fam.num_k
        err = max_abs(h.samples[idx, ::stride] - fam.samples)
        res["endpoint-" + name] = err
        if err > slice_atol:
            ok = False
            msgs.append("%s endpoint error %.3e" % (name, err))

    indices = []
    if check_index and cls.index_group(h.d) != "0":
        try:
            for i in range(h.num_s):
                indices.append(class_index(h.slice_family(i), ops, cls, tol,
                                           validated=True).value)
            if len(set(indices)) > 1:
                ok = False
                msgs.append("index changes along the path: %s" % sorted(set(map(str, indices))))
        except Exception as exc:  # index failure on a corrupted slice
            ok = False
            msgs.append("index evaluation failed: %s" % exc)

    return HomotopyReport(ok=ok, worst_residuals=res, messages=msgs, indices=indices)
