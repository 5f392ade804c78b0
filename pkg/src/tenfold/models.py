"""Ground-truth generators: model families and in-class random samplers.

Model conventions (this library's, not imported from anywhere):

* Kitaev chain:  H(k) = (-2 t cos 2 pi k - mu) sigma_z + 2 Delta sin 2 pi k sigma_y
  with charge conjugation C = sigma_x K (even), class D, N = 2, n = 1.
  The gap closes exactly at |mu| = 2|t| (and at Delta = 0 for |mu| < 2|t|).
* SSH chain:  off-diagonal Bloch block q(k) = t1 + t2 e^{-2 pi i k},
  S = sigma_z, class AIII; the gap closes at t1 = t2.

Random families are built in the class normal basis from a core with a
prescribed index, dressed by a symmetry-equivariant random gauge family
exp(X(k)), and finally scrambled by a fixed random unitary that is also
applied to the operators.  Everything is deterministic per seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .indices import index as class_index
from .linalg import DEFAULT_TOL, StructureError, max_abs, symplectic_j
from .symmetry import (
    CONTINUITY_BOUND,
    ProjectionFamily,
    SymmetryOps,
    get_class,
    projections_from_q,
    validate_class,
)

_SZ = np.diag([1.0, -1.0]).astype(complex)
_SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_SY = np.array([[0.0, -1.0j], [1.0j, 0.0]])


class GapClosedError(ValueError):
    def __init__(self, k, gap):
        super().__init__("spectral gap %.3e at k = %.6f" % (gap, k))
        self.k = k
        self.gap = gap


@dataclass
class ModelSpec:
    name: str  # kitaev-chain | ssh | random-class
    parameters: dict = field(default_factory=dict)
    grid_g: int = 128


def k_grid(g):
    """Stored grid k_j = -1/2 + j/(2g), j = 0..2g-1."""
    return -0.5 + np.arange(2 * g) / (2 * g)


def fermi_projection(h, fermi_level=0.0, tol=DEFAULT_TOL):
    """Spectral projection onto eigenvalues below fermi_level, plus the gap."""
    w, v = np.linalg.eigh(h)
    below = w < fermi_level
    gap = float(np.min(np.abs(w - fermi_level)))
    p = (v[:, below]) @ (v[:, below]).conj().T
    return p, gap, int(np.sum(below))


def kitaev_chain(t=1.0, delta=1.0, mu=0.0, g=128, tol=DEFAULT_TOL):
    """Class-D family of the Kitaev chain; returns (family, ops, class)."""
    ks = k_grid(g)
    samples = np.empty((2 * g, 2, 2), dtype=complex)
    for j, k in enumerate(ks):
        h = (-2.0 * t * np.cos(2 * np.pi * k) - mu) * _SZ + 2.0 * delta * np.sin(2 * np.pi * k) * _SY
        p, gap, rank = fermi_projection(h, 0.0, tol)
        if gap < tol.gap_min or rank != 1:
            raise GapClosedError(k, gap)
        samples[j] = p
    fam = ProjectionFamily(d=1, n=1, N=2, samples=samples)
    ops = SymmetryOps(N=2, c_mat=_SX.copy(), eps_c=1)
    return fam, ops, get_class("D")


def ssh_chain(t1=1.0, t2=2.0, g=128, tol=DEFAULT_TOL):
    """Class-AIII family of the SSH chain; returns (family, ops, class)."""
    ks = k_grid(g)
    samples = np.empty((2 * g, 2, 2), dtype=complex)
    for j, k in enumerate(ks):
        q = t1 + t2 * np.exp(-2j * np.pi * k)
        if abs(q) < tol.gap_min:
            raise GapClosedError(k, abs(q))
        h = np.array([[0.0, q], [np.conj(q), 0.0]])
        p, gap, rank = fermi_projection(h, 0.0, tol)
        if gap < tol.gap_min or rank != 1:
            raise GapClosedError(k, gap)
        samples[j] = p
    fam = ProjectionFamily(d=1, n=1, N=2, samples=samples)
    ops = SymmetryOps(N=2, s_mat=_SZ.copy())
    return fam, ops, get_class("AIII")


def generate(spec, tol=DEFAULT_TOL):
    """Build the family described by a ModelSpec; validates before returning."""
    params = dict(spec.parameters)
    if spec.name == "kitaev-chain":
        fam, ops, cls = kitaev_chain(
            t=params.pop("t", 1.0), delta=params.pop("delta", 1.0),
            mu=params.pop("mu", 0.0), g=spec.grid_g, tol=tol,
        )
    elif spec.name == "ssh":
        fam, ops, cls = ssh_chain(
            t1=params.pop("t1", 1.0), t2=params.pop("t2", 2.0), g=spec.grid_g, tol=tol,
        )
    elif spec.name == "random-class":
        label = params.pop("class")
        cls = get_class(label)
        fam, ops = random_in_class(
            label, int(params.pop("n")), int(params.pop("N")),
            seed=int(params.pop("seed", 0)), d=int(params.pop("d", 1)),
            grid_g=spec.grid_g, tol=tol,
        )
    else:
        raise ValueError("unknown model %r" % spec.name)
    if params:
        raise ValueError("unused parameters: %s" % sorted(params))
    report = validate_class(fam, ops, cls, tol)
    if not report.ok:
        raise StructureError("generated family failed validation: %s" % report.messages)
    return fam, ops, cls


# ---------------------------------------------------------------------------
# random in-class families


def haar_unitary(n, rng):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def haar_orthogonal(n, rng):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def random_sp_algebra(m, rng, amp=1.0):
    """Random element of the compact symplectic Lie algebra on C^{2m}."""
    n = 2 * m
    j = symplectic_j(n)
    x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    x = 0.5 * (x - x.conj().T)
    x = 0.5 * (x + j @ x.T @ j)
    x = 0.5 * (x - x.conj().T)
    return amp * x


def random_sp_unitary(m, rng, amp=1.0):
    return sla.expm(random_sp_algebra(m, rng, amp))


def _rank_pattern(n, N):
    p = np.zeros((N, N), dtype=complex)
    p[np.arange(n), np.arange(n)] = 1.0
    return p


def _quaternionic_pattern(m, M):
    """Rank-2m projection with T = J K invariant support {0..m-1, M..M+m-1}."""
    p = np.zeros((2 * M, 2 * M), dtype=complex)
    for a in range(m):
        p[a, a] = 1.0
        p[M + a, M + a] = 1.0
    return p


def _core_d0(cls, n, N, rng, target):
    """Random point of the class's Cartan space, in the normal basis."""
    label = cls.label
    if label == "A":
        u = haar_unitary(N, rng)
        return u @ _rank_pattern(n, N) @ u.conj().T
    if label == "AI":
        o = haar_orthogonal(N, rng).astype(complex)
        return o @ _rank_pattern(n, N) @ o.T
    if label == "AII":
        u = random_sp_unitary(N // 2, rng)
        return u @ _quaternionic_pattern(n // 2, N // 2) @ u.conj().T
    if label == "AIII":
        q = haar_unitary(n, rng)
        return _projection_from_block(q)
    if label == "BDI":
        q = haar_orthogonal(n, rng).astype(complex)
        sgn = target if target is not None else (1 if rng.integers(2) else -1)
        if np.sign(np.linalg.det(q.real)) != sgn:
            q[:, -1] = -q[:, -1]
        return _projection_from_block(q)
    if label == "D":
        sgn = target if target is not None else (1 if rng.integers(2) else -1)
        v = haar_orthogonal(N, rng)
        if np.linalg.det(v) < 0:
            v[0, :] = -v[0, :]
        lam = _pf_form(N // 2, sgn)
        a = v.T @ lam @ v
        return 0.5 * (np.eye(N) + 1j * a)
    if label == "C":
        v = random_sp_unitary(N // 2, rng)
        a = v.T @ v
        return 0.5 * (np.eye(N) + 1j * symplectic_j(N) @ a)
    if label == "CI":
        v = haar_unitary(n, rng)
        return _projection_from_block(v.T @ v)
    if label == "DIII":
        v = haar_unitary(n, rng)
        a = v.T @ symplectic_j(n) @ v
        return _projection_from_block(symplectic_j(n) @ a)
    if label == "CII":
        q = random_sp_unitary(n // 2, rng)
        return _projection_from_block(q)
    raise AssertionError(label)


def _projection_from_block(q):
    n = q.shape[0]
    eye = np.eye(n)
    return 0.5 * np.block([[eye, q], [q.conj().T, eye]])


def _pf_form(m, sign):
    """blockdiag(J_2, ..., J_2, sign * J_2)."""
    j2 = np.array([[0.0, 1.0], [-1.0, 0.0]])
    blocks = [j2] * (m - 1) + [sign * j2]
    return sla.block_diag(*blocks)


def _core_d1(cls, n, N, ks, rng, target):
    """Core d=1 family with a prescribed index, in the normal basis."""
    label = cls.label
    num_k = len(ks)

    def phase_col(w):
        return np.exp(2j * np.pi * w * ks)

    if label in ("A", "AI"):
        return np.broadcast_to(_rank_pattern(n, N), (num_k, N, N)).copy()
    if label == "AII":
        return np.broadcast_to(_quaternionic_pattern(n // 2, N // 2), (num_k, N, N)).copy()
    if label == "C":
        p = 0.5 * (np.eye(N) + 1j * symplectic_j(N))
        return np.broadcast_to(p, (num_k, N, N)).copy()
    if label == "CI":
        return np.broadcast_to(_projection_from_block(np.eye(n, dtype=complex)), (num_k, N, N)).copy()
    if label == "AIII":
        w = int(target) if target is not None else int(rng.integers(-1, 2))
        qs = np.tile(np.eye(n, dtype=complex), (num_k, 1, 1))
        qs[:, 0, 0] = phase_col(w)
        return _expand_qs(qs)
    if label == "BDI":
        if target is not None:
            sgn, w = target
        else:
            sgn, w = (1 if rng.integers(2) else -1), int(rng.integers(-1, 2))
        qs = np.tile(np.eye(n, dtype=complex), (num_k, 1, 1))
        qs[:, 0, 0] = phase_col(w)
        qs[:, -1, -1] = qs[:, -1, -1] * sgn
        return _expand_qs(qs)
    if label == "D":
        if target is not None:
            p0, ph = target
        else:
            p0 = 1 if rng.integers(2) else -1
            ph = 1 if rng.integers(2) else -1
        m1 = 0 if p0 == ph else 1
        zs = np.tile(np.ones(num_k, dtype=complex), (N // 2, 1))
        zs[0] = p0 * phase_col(m1)
        return _d_family_from_blocks(zs, ks)
    if label == "CII":
        w = int(target) if target is not None else 2 * int(rng.integers(-1, 2))
        if w % 2:
            raise ValueError("CII windings are even; got target %d" % w)
        m = n // 2
        qs = np.tile(np.eye(n, dtype=complex), (num_k, 1, 1))
        qs[:, 0, 0] = phase_col(w // 2)
        qs[:, m, m] = phase_col(w // 2)
        return _expand_qs(qs)
    if label == "DIII":
        eps = int(target) if target is not None else (1 if rng.integers(2) else -1)
        m1 = 0 if eps == 1 else 1
        m = n // 2
        j_n = symplectic_j(n)
        qs = np.empty((num_k, n, n), dtype=complex)
        for jj, k in enumerate(ks):
            a = np.zeros((n, n), dtype=complex)
            for b in range(m):
                z = np.exp(2j * np.pi * m1 * k) if b == 0 else 1.0
                zr = np.exp(-2j * np.pi * m1 * k) if b == 0 else 1.0
                a[b, m + b] = z
                a[m + b, b] = -zr
            qs[jj] = j_n @ a
        return _expand_qs(qs)
    raise AssertionError(label)


def _expand_qs(qs):
    return projections_from_q(qs, d=1).samples


def _d_family_from_blocks(zs, ks):
    """Class-D samples from per-block unit scalars z_b(k) with
    z_b(-k) = conj(z_b(k)); P = 1/2 (I + i A), A = blkdiag ((0, z), (-conj z, 0))."""
    nblocks, num_k = zs.shape
    N = 2 * nblocks
    eye = np.eye(N)
    out = np.empty((num_k, N, N), dtype=complex)
    for j in range(num_k):
        a = np.zeros((N, N), dtype=complex)
        for b in range(nblocks):
            a[2 * b, 2 * b + 1] = zs[b, j]
            a[2 * b + 1, 2 * b] = -np.conj(zs[b, j])
        out[j] = 0.5 * (eye + 1j * a)
    return out


def _equivariant_gauge(cls, ops, ks, rng, amp, harmonics=2):
    """exp(X(k)) with X skew-hermitian, trig-polynomial, and equivariant:
    conjugating by it preserves every symmetry relation of the class."""
    N = ops.N
    num_k = len(ks)

    def rand_skew():
        x = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
        return 0.5 * (x - x.conj().T)

    cos_c = [rand_skew() * amp / (l + 1.0) for l in range(harmonics + 1)]
    sin_c = [rand_skew() * amp / (l + 1.0) for l in range(1, harmonics + 1)]

    def project(mats, odd):
        out = []
        for x in mats:
            if ops.s_mat is not None:
                s = ops.s_mat
                x = 0.5 * (x + s @ x @ s.conj().T)
            for mat in (ops.t_mat, ops.c_mat):
                if mat is None:
                    continue
                image = mat @ np.conj(x) @ mat.conj().T
                x = 0.5 * (x - image) if odd else 0.5 * (x + image)
            out.append(0.5 * (x - x.conj().T))
        return out

    cos_c = project(cos_c, odd=False)
    sin_c = project(sin_c, odd=True)
    gauge = np.empty((num_k, N, N), dtype=complex)
    for j, k in enumerate(ks):
        x = np.zeros((N, N), dtype=complex)
        for l, c in enumerate(cos_c):
            x += c * np.cos(2 * np.pi * l * k)
        for l, c in enumerate(sin_c, start=1):
            x += c * np.sin(2 * np.pi * l * k)
        gauge[j] = sla.expm(x)
    return gauge


def random_in_class(label, n, N, seed=0, d=0, grid_g=16, index_target=None,
                    scramble=True, amp=0.4, tol=DEFAULT_TOL):
    """Deterministic random member of a class, optionally with a target index.

    Returns (family, ops); the family always passes validate_class.  For
    d = 1 the construction is core-with-index times an equivariant gauge,
    so the index equals ``index_target`` whenever one is given.
    """
    cls = get_class(label)
    bad = cls.check_dims(n, N)
    if bad:
        raise StructureError("; ".join(bad))
    rng = np.random.default_rng(seed)
    ops = SymmetryOps.normal_form(cls, N)
    if d == 0:
        samples = _core_d0(cls, n, N, rng, index_target)[None, :, :]
        fam = ProjectionFamily(d=0, n=n, N=N, samples=samples)
        report = validate_class(fam, ops, cls, tol)
    else:
        ks = k_grid(grid_g)
        core = _core_d1(cls, n, N, ks, rng, index_target)
        core_fam = ProjectionFamily(d=1, n=n, N=N, samples=core)
        report = validate_class(core_fam, ops, cls, tol)
        if not report.ok:
            raise StructureError(
                "core family invalid (increase grid_g for large windings): %s" % report.messages
            )
        # dress with an equivariant gauge; shrink its amplitude until the
        # neighbor-continuity bound holds on this grid
        gauge_rng_state = rng.bit_generator.state
        for scale in (1.0, 0.5, 0.25, 0.125, 0.0):
            rng.bit_generator.state = gauge_rng_state
            gauge = _equivariant_gauge(cls, ops, ks, rng, amp * scale)
            samples = np.einsum("kij,kjl,kml->kim", gauge, core, np.conj(gauge))
            fam = ProjectionFamily(d=1, n=n, N=N, samples=samples)
            report = validate_class(fam, ops, cls, tol)
            if report.ok:
                break
    if not report.ok:
        raise StructureError("random_in_class produced an invalid family: %s" % report.messages)
    if scramble:
        v = haar_unitary(N, rng)
        fam = ProjectionFamily(d=fam.d, n=n, N=N,
                               samples=np.einsum("ij,kjl,ml->kim", v, fam.samples, np.conj(v)))
        ops = ops.scrambled(v)
        report = validate_class(fam, ops, cls, tol)
        if not report.ok:
            raise StructureError("scramble broke validation: %s" % report.messages)
    if index_target is not None and cls.index_group(d) != "0":
        want = tuple(index_target) if isinstance(index_target, (tuple, list)) else index_target
        got = class_index(fam, ops, cls, tol, validated=True)
        if got.value != want and cls.label in ("BDI", "D"):
            # the det / Pfaffian sign components are convention-fixed by the
            # normal-form construction; a scramble can flip them globally.
            # Conjugate by an in-class reflection to land on the target.
            g = _flip_conjugation(cls, N)
            if scramble:
                g = v @ g @ v.conj().T
            fam = ProjectionFamily(
                d=fam.d, n=n, N=N,
                samples=np.einsum("ij,kjl,ml->kim", g, fam.samples, np.conj(g)),
            )
            got = class_index(fam, ops, cls, tol)
        if got.value != want:
            raise StructureError("index target %r not achieved (got %r)" % (want, got.value))
    return fam, ops


def random_pair_in_class(label, n, N, seed=0, d=0, grid_g=16,
                         index_targets=(None, None), amp=0.4, tol=DEFAULT_TOL):
    """Two random members of one class sharing the same symmetry operators.

    The families are built independently (seed and seed+1) in the normal
    basis and then scrambled by one common unitary, so they can be fed to
    the connectors.  index_targets fixes the index of each endpoint.
    """
    f0, _ = random_in_class(label, n, N, seed=seed, d=d, grid_g=grid_g,
                            index_target=index_targets[0], scramble=False,
                            amp=amp, tol=tol)
    f1, _ = random_in_class(label, n, N, seed=seed + 1, d=d, grid_g=grid_g,
                            index_target=index_targets[1], scramble=False,
                            amp=amp, tol=tol)
    ops = SymmetryOps.normal_form(label, N)
    rng = np.random.default_rng(seed + 2)
    v = haar_unitary(N, rng)
    out = []
    for fam in (f0, f1):
        out.append(ProjectionFamily(
            d=fam.d, n=n, N=N,
            samples=np.einsum("ij,kjl,ml->kim", v, fam.samples, np.conj(v)),
        ))
    return out[0], out[1], ops.scrambled(v)


def _flip_conjugation(cls, N):
    """Unitary commuting with the class's normal-form operators that flips
    the convention-dependent sign component of the index."""
    if cls.label == "BDI":
        n = N // 2
        f = np.ones(N)
        f[n - 1] = -1.0
        return np.diag(f).astype(complex)
    if cls.label == "D":
        f = np.ones(N)
        f[-1] = -1.0
        return np.diag(f).astype(complex)
    raise AssertionError(cls.label)
