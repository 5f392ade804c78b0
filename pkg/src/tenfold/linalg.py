"""Dense complex matrix kernels and structure predicates.

Everything downstream (symmetry validation, factorizations, index
computations, homotopy construction) is built on the routines here.
Matrices are plain complex numpy arrays; all structure checks are
absolute entrywise comparisons at ``Tolerance.atol`` since every matrix
in this library is unitary-scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla


class StructureError(ValueError):
    """Input matrix violates the structure required by an operation."""


class SpectralGapError(ValueError):
    """A spectral gap required by an operation is below ``gap_min``."""


class BranchCutError(ValueError):
    """A matrix-log branch cut collides with an eigenvalue.

    Carries the offending phase so the caller can rotate the cut.
    """

    def __init__(self, message, phase):
        super().__init__(message)
        self.phase = phase


@dataclass(frozen=True)
class Tolerance:
    """Numerical tolerances used across the library.

    atol: absolute entrywise tolerance for structure checks.
    gap_min: minimal spectral gap required by retractions and logs.
    """

    atol: float = 1e-10
    gap_min: float = 1e-6

    def __post_init__(self):
        if not self.atol > 0:
            raise ValueError("atol must be positive")
        if not self.gap_min > 0:
            raise ValueError("gap_min must be positive")


DEFAULT_TOL = Tolerance()


def as_complex(a):
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise StructureError("expected a matrix, got ndim=%d" % a.ndim)
    if not np.all(np.isfinite(a)):
        raise StructureError("matrix has non-finite entries")
    return a


def require_square(a):
    a = as_complex(a)
    if a.shape[0] != a.shape[1]:
        raise StructureError("expected a square matrix, got shape %r" % (a.shape,))
    return a


def symplectic_j(size):
    """The symplectic matrix J with blocks ((0, I), (-I, 0)); J^2 = -I."""
    if size % 2:
        raise StructureError("symplectic J needs even size, got %d" % size)
    m = size // 2
    j = np.zeros((size, size))
    j[:m, m:] = np.eye(m)
    j[m:, :m] = -np.eye(m)
    return j


def max_abs(a):
    a = np.asarray(a)
    return 0.0 if a.size == 0 else float(np.max(np.abs(a)))


def op_norm(a):
    """Spectral (operator) norm."""
    return float(np.linalg.norm(a, 2))


# ---------------------------------------------------------------------------
# structure predicates


def structure_residual(a, tag, rank=None):
    """Worst absolute residual of the defining relations of ``tag``."""
    a = require_square(a)
    n = a.shape[0]
    eye = np.eye(n)
    if tag == "unitary":
        return max_abs(a.conj().T @ a - eye)
    if tag == "orthogonal":
        return max(max_abs(a.imag), max_abs(a.T.real @ a.real - eye))
    if tag == "special-orthogonal":
        r = structure_residual(a, "orthogonal")
        return max(r, abs(np.linalg.det(a.real) - 1.0))
    if tag == "hermitian":
        return max_abs(a - a.conj().T)
    if tag == "skew-hermitian":
        return max_abs(a + a.conj().T)
    if tag == "symmetric":
        return max_abs(a - a.T)
    if tag == "antisymmetric":
        return max_abs(a + a.T)
    if tag == "symplectic-2M-K":
        j = symplectic_j(n)
        return max_abs(a.T @ j @ a - j)
    if tag == "compact-symplectic":
        j = symplectic_j(n)
        return max(max_abs(a.conj().T @ a - eye), max_abs(a.T @ j @ a - j))
    if tag == "projection-rank-n":
        r = max(max_abs(a @ a - a), max_abs(a - a.conj().T))
        tr = a.trace().real
        if rank is None:
            rank = int(round(tr))
        return max(r, abs(tr - rank), max_abs(a.trace().imag))
    raise ValueError("unknown structure tag %r" % tag)


def is_in_set(a, tag, tol=DEFAULT_TOL, rank=None):
    """True iff the defining relations of ``tag`` hold entrywise within atol."""
    return structure_residual(a, tag, rank=rank) <= tol.atol


def check_structure(a, tag, tol=DEFAULT_TOL, rank=None, what=""):
    res = structure_residual(a, tag, rank=rank)
    if res > tol.atol:
        raise StructureError(
            "%snot %s within atol=%g (residual %.3e)" % (what and what + ": ", tag, tol.atol, res)
        )
    return a


# ---------------------------------------------------------------------------
# spectral helpers


def hermitian_eig(h, tol=DEFAULT_TOL):
    """Eigendecomposition of a hermitian matrix: ascending values, unitary vectors."""
    h = require_square(h)
    check_structure(h, "hermitian", tol)
    w, v = np.linalg.eigh(h)
    return w, v


def unitary_diagonalize(u):
    """Orthonormal eigenvectors of a (normal) unitary matrix via Schur.

    Returns (eigenvalues, vectors); vectors are exactly orthonormal,
    unlike numpy's eig for degenerate clusters.
    """
    t, z = sla.schur(np.asarray(u, dtype=complex), output="complex")
    return np.diag(t).copy(), z


def polar_unitary(a, tol=DEFAULT_TOL):
    """Closest unitary in Frobenius norm, V = A (A*A)^{-1/2}.

    Requires the smallest singular value of A to be >= gap_min.
    """
    a = require_square(a)
    u, s, vh = np.linalg.svd(a)
    if s[-1] < tol.gap_min:
        raise SpectralGapError(
            "polar retraction needs sigma_min >= %g, got %.3e" % (tol.gap_min, s[-1])
        )
    return u @ vh


def principal_log_unitary(u, branch_cut_angle=np.pi, tol=DEFAULT_TOL):
    """Skew-hermitian X with exp(X) = U, eigenphases off the branch cut.

    The eigenphases of X lie in the open 2*pi interval ending at
    ``branch_cut_angle``. Raises BranchCutError when an eigenvalue sits
    within gap_min of the cut direction.
    """
    u = require_square(u)
    check_structure(u, "unitary", tol)
    vals, vecs = unitary_diagonalize(u)
    theta = np.angle(vals)
    # circular distance of each eigenphase from the cut direction
    delta = np.mod(branch_cut_angle - theta, 2.0 * np.pi)
    dist = np.minimum(delta, 2.0 * np.pi - delta)
    if np.min(dist) < tol.gap_min:
        bad = theta[int(np.argmin(dist))]
        raise BranchCutError(
            "eigenvalue phase %.6f on branch cut at %.6f" % (bad, branch_cut_angle), bad
        )
    lifted = branch_cut_angle - delta  # in (cut - 2*pi, cut)
    x = (vecs * (1j * lifted)) @ vecs.conj().T
    return 0.5 * (x - x.conj().T)


def log_unitary_auto(u, tol=DEFAULT_TOL):
    """principal_log_unitary with automatic cut rotation.

    Tries the default cut at pi; on collision the cut is moved to the
    midpoint of the largest gap in the eigenphase circle.
    """
    try:
        return principal_log_unitary(u, np.pi, tol)
    except BranchCutError:
        pass
    vals, _ = unitary_diagonalize(u)
    theta = np.sort(np.angle(vals))
    gaps = np.diff(np.concatenate([theta, [theta[0] + 2.0 * np.pi]]))
    k = int(np.argmax(gaps))
    if gaps[k] < 2.0 * tol.gap_min:
        raise SpectralGapError(
            "no spectral gap of width >= %g on the unit circle" % (2.0 * tol.gap_min)
        )
    cut = theta[k] + 0.5 * gaps[k]
    return principal_log_unitary(u, cut, tol)


def _so_block_log(t, tol):
    """Antisymmetric log of the (block-diagonal) real Schur form of an SO matrix."""
    n = t.shape[0]
    ell = np.zeros((n, n))
    minus_ones = []
    i = 0
    while i < n:
        if i + 1 < n and abs(t[i + 1, i]) > 1e-8:
            theta = float(np.arctan2(t[i + 1, i], t[i, i]))
            ell[i, i + 1] = -theta
            ell[i + 1, i] = theta
            i += 2
        else:
            d = t[i, i]
            if abs(d - 1.0) <= 1e-6:
                pass
            elif abs(d + 1.0) <= 1e-6:
                minus_ones.append(i)
            else:
                raise StructureError("real Schur diagonal %.6f is not +-1" % d)
            i += 1
    if len(minus_ones) % 2:
        raise StructureError("odd count of -1 eigenvalues; determinant is -1")
    for p, q in zip(minus_ones[::2], minus_ones[1::2]):
        ell[p, q] = -np.pi
        ell[q, p] = np.pi
    return ell


def real_skew_log_so(r, tol=DEFAULT_TOL):
    """Real antisymmetric X with exp(X) = R for R in SO(N).

    Eigenvalue pairs at -1 are handled by an explicit pi-rotation plane,
    so the log always exists on SO(N).
    """
    r = require_square(r)
    check_structure(r, "orthogonal", tol)
    rr = r.real
    if np.linalg.det(rr) < 0:
        raise StructureError("det(R) = -1: R is not in SO(N), no real antisymmetric log")
    t, z = sla.schur(rr, output="real")
    ell = _so_block_log(t, tol)
    x = z @ ell @ z.T
    x = 0.5 * (x - x.T)
    if max_abs(sla.expm(x) - rr) > 1e-9 * (1.0 + op_norm(rr)):
        raise StructureError("real skew log round-trip failed")
    return x


class SymplecticLogError(ValueError):
    """symplectic_log could not meet its tolerances; caller should subdivide."""


def symplectic_log(u, tol=DEFAULT_TOL):
    """X with exp(X) = U for U in the compact symplectic group.

    X is skew-hermitian and satisfies X^T J + J X = 0.  Eigenphases come
    in +-theta pairs; a -1 eigenvalue cluster (even-dimensional) is split
    into a J-adapted (+pi, -pi) pair so the result stays in the algebra.
    """
    u = require_square(u)
    n = u.shape[0]
    j = symplectic_j(n)
    check_structure(u, "compact-symplectic", tol)
    vals, vecs = unitary_diagonalize(u)
    theta = np.angle(vals)
    near_pi = np.abs(np.abs(theta) - np.pi) < 1e-9
    regular = ~near_pi
    x = np.zeros((n, n), dtype=complex)
    if np.any(regular):
        v = vecs[:, regular]
        x += (v * (1j * theta[regular])) @ v.conj().T
    if np.any(near_pi):
        f = vecs[:, near_pi]
        r2 = f.shape[1]
        if r2 % 2:
            raise StructureError("-1 eigenvalue of a compact symplectic has even multiplicity")
        # J-adapted basis of the -1 eigenspace: Gram F^T J F is antisymmetric
        # unitary, factored as W^T J W; columns of F W* then pair under J.
        from .factorizations import factor_skew_unitary

        gram = f.T @ j @ f
        w = factor_skew_unitary(gram, tol)
        fa = f @ w.conj().T
        r = r2 // 2
        phases = 1j * np.pi * np.concatenate([np.ones(r), -np.ones(r)])
        x += (fa * phases) @ fa.conj().T
    # orthogonal projection onto the Lie algebra, then skew-hermitize
    x = 0.5 * (x + j @ x.T @ j)
    x = 0.5 * (x - x.conj().T)
    alg_res = max_abs(x.T @ j + j @ x)
    if alg_res > 10.0 * tol.atol:
        raise SymplecticLogError("Lie-algebra residual %.3e after projection" % alg_res)
    if max_abs(sla.expm(x) - u) > 1e-9 * (1.0 + op_norm(u)):
        raise SymplecticLogError("symplectic log round-trip failed; subdivide the path")
    return x


# ---------------------------------------------------------------------------
# pfaffian


def _pfaffian_combinatorial(a):
    """Sum over perfect matchings; the defining formula, used as the oracle."""
    n = a.shape[0]
    if n == 0:
        return complex(1.0)

    def rec(idx):
        if not idx:
            return complex(1.0)
        i0 = idx[0]
        total = complex(0.0)
        sign = 1.0
        for pos in range(1, len(idx)):
            jj = idx[pos]
            rest = idx[1:pos] + idx[pos + 1 :]
            total += sign * a[i0, jj] * rec(rest)
            sign = -sign
        return total

    return rec(tuple(range(n)))


def _pfaffian_parlett_reid(a):
    """Skew-symmetric elimination with pivoting, tracking the permutation sign."""
    a = a.copy()
    n = a.shape[0]
    pf = complex(1.0)
    for k in range(0, n - 1, 2):
        pivot = k + 1 + int(np.argmax(np.abs(a[k + 1 :, k])))
        if pivot != k + 1:
            a[[k + 1, pivot], :] = a[[pivot, k + 1], :]
            a[:, [k + 1, pivot]] = a[:, [pivot, k + 1]]
            pf = -pf
        if a[k + 1, k] == 0:
            return complex(0.0)
        pf *= a[k, k + 1]
        if k + 2 < n:
            tau = a[k, k + 2 :] / a[k, k + 1]
            col = a[k + 2 :, k + 1]
            a[k + 2 :, k + 2 :] += np.outer(tau, col) - np.outer(col, tau)
    return pf


def pfaffian(a, method="auto", tol=DEFAULT_TOL):
    """Pfaffian of an even-dimensional antisymmetric matrix.

    method: 'combinatorial' (the defining sum over pair partitions,
    only for sizes <= 8), 'elimination' (Parlett-Reid style), or 'auto'.
    """
    a = require_square(a)
    n = a.shape[0]
    if n % 2:
        raise StructureError("pfaffian needs even dimension, got %d" % n)
    check_structure(a, "antisymmetric", tol)
    a = 0.5 * (a - a.T)
    if method == "auto":
        method = "combinatorial" if n <= 8 else "elimination"
    if method == "combinatorial":
        if n > 8:
            raise ValueError("combinatorial pfaffian restricted to sizes <= 8")
        val = _pfaffian_combinatorial(a)
    elif method == "elimination":
        val = _pfaffian_parlett_reid(a)
    else:
        raise ValueError("unknown pfaffian method %r" % method)
    if max_abs(a.imag) <= tol.atol:
        val = complex(val.real, 0.0)
    return val
