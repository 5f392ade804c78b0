"""Structured matrix factorizations with verified reconstruction.

Congruence factorizations (A = U L U^T and friends) for symmetric,
antisymmetric, orthogonal and symplectic matrices.  These parametrize the
Cartan spaces the homotopy construction interpolates in.  Every routine
verifies its reconstruction before returning and raises StructureError
rather than produce a silently wrong factor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .linalg import (
    DEFAULT_TOL,
    SpectralGapError,
    StructureError,
    check_structure,
    max_abs,
    op_norm,
    pfaffian,
    require_square,
    structure_residual,
    symplectic_j,
    unitary_diagonalize,
)

_J2 = np.array([[0.0, 1.0], [-1.0, 0.0]])


@dataclass
class TakagiResult:
    u: np.ndarray
    lam: np.ndarray  # nonnegative singular values, as a vector
    symplectic: bool = False


@dataclass
class HuaResult:
    u: np.ndarray
    d: np.ndarray  # half the singular values, each once


@dataclass
class SignatureResult:
    v: np.ndarray
    j: int  # dim Ker(A - 1), the count of +1 eigenvalues


def _recon_check(a, recon, what):
    err = max_abs(a - recon)
    if err > 1e-9 * (1.0 + op_norm(a)):
        raise StructureError("%s reconstruction failed (error %.3e)" % (what, err))
    return err


def _clusters(values, ctol):
    """Split a descending-sorted 1d array into clusters of nearly equal values."""
    groups = []
    start = 0
    for i in range(1, len(values) + 1):
        if i == len(values) or abs(values[i] - values[start]) > ctol:
            groups.append(slice(start, i))
            start = i
    return groups


def _spectral_sqrt_unitary(v):
    """Square root of a unitary matrix by halving principal phases.

    Phases live in (-pi, pi]; the tie at -pi resolves to +pi before
    halving, so the output is a deterministic function of the input.
    """
    vals, vecs = unitary_diagonalize(v)
    half = np.exp(0.5j * np.angle(vals))
    return (vecs * half) @ vecs.conj().T


def _symmetric_unitary_sqrt(v, tol=DEFAULT_TOL):
    """Symmetric square root of a symmetric unitary matrix."""
    x = _spectral_sqrt_unitary(v)
    x = 0.5 * (x + x.T)
    if max_abs(x @ x - v) > 1e-8 * (1.0 + op_norm(v)):
        raise StructureError("symmetric unitary sqrt failed")
    return x


def _interleave_perm(m):
    """Permutation P with J_{2m} = P^T (I_m x J_2) P.

    Fixes the column reshuffle between adjacent-pair blocks and the
    half-split symplectic form: odd slots first, then even slots.
    """
    p = np.zeros((2 * m, 2 * m))
    for a in range(m):
        p[2 * a, a] = 1.0
        p[2 * a + 1, m + a] = 1.0
    return p


def _real_skew_canonical(a, tol=DEFAULT_TOL):
    """Real Schur canonical form of a real antisymmetric matrix.

    Returns (z, b) with A = Z blkdiag(b_1 J_2, ..., b_m J_2, 0, ...) Z^T,
    Z orthogonal and b sorted descending positive.
    """
    n = a.shape[0]
    t, z = sla.schur(a, output="real")
    detect = max(tol.atol, 1e-12 * (1.0 + max_abs(a)))
    pairs = []
    zeros = []
    i = 0
    while i < n:
        if i + 1 < n and abs(t[i + 1, i]) > detect:
            b = float(t[i, i + 1])
            cols = (i, i + 1) if b >= 0 else (i + 1, i)
            pairs.append((abs(b), cols))
            i += 2
        else:
            zeros.append(i)
            i += 1
    pairs.sort(key=lambda item: -item[0])
    order = []
    for _, cols in pairs:
        order.extend(cols)
    order.extend(zeros)
    z2 = z[:, order]
    bs = np.array([b for b, _ in pairs])
    return z2, bs


# ---------------------------------------------------------------------------
# symplectic helpers


def _symmetric_symplectic_log(a, tol=DEFAULT_TOL):
    """Y with exp(Y) = A for A unitary, symmetric and symplectic.

    Y is symmetric, skew-hermitian and anticommutes with J, so that
    exp(Y/2) is a symplectic unitary V with V^T V = A.  A -1 eigenvalue
    cluster (conjugation-stable, J-stable) gets an explicit J-adapted
    (+i pi, -i pi) splitting in a real orthonormal basis.
    """
    a = require_square(a)
    n = a.shape[0]
    j = symplectic_j(n)
    vals, vecs = unitary_diagonalize(a)
    theta = np.angle(vals)
    near_pi = np.abs(np.abs(theta) - np.pi) < 1e-9
    y = np.zeros((n, n), dtype=complex)
    regular = ~near_pi
    if np.any(regular):
        v = vecs[:, regular]
        y += (v * (1j * theta[regular])) @ v.conj().T
    if np.any(near_pi):
        f = vecs[:, near_pi]
        proj = f @ f.conj().T
        if max_abs(proj.imag) > 1e-7:
            raise StructureError("-1 eigenspace of a symmetric unitary must be real")
        w_eig, v_eig = np.linalg.eigh(proj.real)
        rbasis = v_eig[:, w_eig > 0.5]
        r2 = rbasis.shape[1]
        if r2 != f.shape[1] or r2 % 2:
            raise StructureError("-1 eigenspace has odd dimension; input not symplectic")
        omega = rbasis.T @ j @ rbasis
        w_o = factor_skew_orthogonal(omega, form="J", tol=tol)
        rt = rbasis @ w_o.T
        r = r2 // 2
        dvec = 1j * np.pi * np.concatenate([np.ones(r), -np.ones(r)])
        y += (rt * dvec) @ rt.T
    y = 0.5 * (y + y.T)
    y = 0.5 * (y - y.conj().T)
    if max_abs(y @ j + j @ y) > 1e-7 * (1.0 + max_abs(y)):
        raise StructureError("log does not anticommute with J; input not symplectic")
    if max_abs(sla.expm(y) - a) > 1e-9 * (1.0 + op_norm(a)):
        raise StructureError("symmetric symplectic log round-trip failed")
    return y


def symplectic_eigh(h, tol=DEFAULT_TOL):
    """Symplectic eigendecomposition of a positive hermitian symplectic H.

    Returns (w, mu) with H = W diag(mu) W*, W unitary symplectic and
    mu = (mu_1..mu_M, 1/mu_1..1/mu_M), first half >= 1 descending.
    Eigenvalue pairs (mu, 1/mu) are matched through x -> -J conj(x); the
    mu = 1 eigenspace gets a J-adapted basis from its skew Gram matrix.
    """
    h = require_square(h)
    n = h.shape[0]
    m = n // 2
    j = symplectic_j(n)
    check_structure(h, "hermitian", tol)
    if structure_residual(h, "symplectic-2M-K") > 1e-8 * (1.0 + op_norm(h)):
        raise StructureError("symplectic_eigh needs a symplectic input")
    w_eig, v_eig = np.linalg.eigh(h)
    if w_eig[0] <= tol.gap_min:
        raise SpectralGapError("symplectic_eigh needs a positive definite input")
    pair_tol = 1e-8 * (1.0 + w_eig[-1])
    big = w_eig > 1.0 + pair_tol
    ones = np.abs(w_eig - 1.0) <= pair_tol
    order = np.argsort(-w_eig[big])
    f = v_eig[:, big][:, order]
    mu_big = w_eig[big][order]
    if 2 * f.shape[1] + int(np.sum(ones)) != n:
        raise StructureError("eigenvalues of a symplectic H must pair as (mu, 1/mu)")
    g = -j @ f.conj()
    u1 = v_eig[:, ones]
    r2 = u1.shape[1]
    if r2 % 2:
        raise StructureError("mu = 1 eigenspace must be even dimensional")
    r = r2 // 2
    if r2:
        gram = u1.T @ j @ u1
        w_g = factor_skew_unitary(gram, tol)
        u1 = u1 @ w_g.conj().T
    w = np.hstack([f, u1[:, :r], g, u1[:, r:]])
    mu = np.concatenate([mu_big, np.ones(r), 1.0 / mu_big, np.ones(r)])
    if max_abs(w.conj().T @ w - np.eye(n)) > 1e-8:
        raise StructureError("symplectic eigenbasis lost orthonormality")
    if max_abs(w.T @ j @ w - j) > 1e-7:
        raise StructureError("symplectic eigenbasis is not symplectic")
    _recon_check(h, (w * mu) @ w.conj().T, "symplectic eigendecomposition")
    return w, mu


# ---------------------------------------------------------------------------
# the factorizations


def takagi(a, symplectic=False, tol=DEFAULT_TOL):
    """Congruence diagonalization A = U Lambda U^T of a symmetric matrix.

    Lambda holds the singular values of A.  Without the symplectic flag
    they come in descending order; with it (A symplectic, even size) U
    and Lambda are symplectic as well and Lambda is arranged in (sigma,
    1/sigma) pairing order, descending on the first half.
    """
    a = require_square(a)
    check_structure(a, "symmetric", tol)
    n = a.shape[0]
    if not symplectic:
        h = a.conj().T @ a
        w_eig, w = np.linalg.eigh(h)
        idx = np.argsort(-w_eig)
        w = w[:, idx]
        sigma = np.sqrt(np.clip(w_eig[idx], 0.0, None))
        el = w.T @ a @ w
        ctol = 1e-8 * (1.0 + (sigma[0] if len(sigma) else 0.0))
        vh = np.zeros((n, n), dtype=complex)
        for grp in _clusters(sigma, ctol):
            if sigma[grp][0] <= ctol:
                vh[grp, grp] = np.eye(grp.stop - grp.start)
                continue
            block = el[grp, grp] / sigma[grp][0]
            vh[grp, grp] = _symmetric_unitary_sqrt(block, tol)
        u = w.conj() @ vh
        res = TakagiResult(u=u, lam=sigma, symplectic=False)
    else:
        if n % 2:
            raise StructureError("symplectic takagi needs even size")
        j = symplectic_j(n)
        if structure_residual(a, "symplectic-2M-K") > tol.atol:
            raise StructureError("symplectic flag requires A^T J A = J")
        m = n // 2
        h = a.conj().T @ a
        w, mu = symplectic_eigh(h, tol)
        sigma = np.sqrt(mu)
        el = w.T @ a @ w
        vh = np.zeros((n, n), dtype=complex)
        ctol = 1e-8 * (1.0 + sigma[0])
        ones_first = [i for i in range(m) if abs(sigma[i] - 1.0) <= ctol]
        idx1 = np.array(ones_first + [m + i for i in ones_first], dtype=int)
        if len(idx1):
            b1 = el[np.ix_(idx1, idx1)]
            y1 = _symmetric_symplectic_log(b1, tol)
            vh[np.ix_(idx1, idx1)] = sla.expm(0.5 * y1)
        pos = [i for i in range(m) if abs(sigma[i] - 1.0) > ctol]
        for grp in _clusters(sigma[pos], ctol):
            idxc = np.array(pos[grp.start : grp.stop], dtype=int)
            s_c = sigma[idxc[0]]
            bc = el[np.ix_(idxc, idxc)] / s_c
            sq = _symmetric_unitary_sqrt(bc, tol)
            vh[np.ix_(idxc, idxc)] = sq
            vh[np.ix_(m + idxc, m + idxc)] = sq.conj()
        u = w.conj() @ vh
        if max_abs(u.T @ j @ u - j) > 1e-7:
            raise StructureError("symplectic takagi produced a non-symplectic U")
        res = TakagiResult(u=u, lam=sigma, symplectic=True)
    _recon_check(a, (res.u * res.lam) @ res.u.T, "takagi")
    check_structure(res.u, "unitary", _loose(tol), what="takagi U")
    return res


def _loose(tol):
    # factor outputs are checked at a slightly looser scale than atol to
    # absorb accumulated roundoff in eigh/schur; reconstruction stays 1e-9
    from .linalg import Tolerance

    return Tolerance(atol=max(tol.atol, 1e-8), gap_min=tol.gap_min)


def hua(a, tol=DEFAULT_TOL):
    """A = U (D x J_2) U^T for a nondegenerate antisymmetric matrix.

    D holds each (even-multiplicity) singular value once, descending.
    Real input takes the real Schur route, so U is then orthogonal.
    """
    a = require_square(a)
    n = a.shape[0]
    if n % 2:
        raise StructureError("odd antisymmetric matrices are degenerate")
    check_structure(a, "antisymmetric", tol)
    smin = np.linalg.svd(a, compute_uv=False)[-1]
    if smin < tol.gap_min:
        raise SpectralGapError("hua needs sigma_min >= gap_min, got %.3e" % smin)
    if max_abs(a.imag) <= tol.atol:
        z2, bs = _real_skew_canonical(a.real, tol)
        if len(bs) != n // 2:
            raise StructureError("real antisymmetric canonical form found a zero block")
        res = HuaResult(u=z2.astype(complex), d=bs)
    else:
        h = a.conj().T @ a
        w_eig, w = np.linalg.eigh(h)
        idx = np.argsort(-w_eig)
        w = w[:, idx]
        sigma = np.sqrt(np.clip(w_eig[idx], 0.0, None))
        for grp in _clusters(sigma, 1e-8 * (1.0 + sigma[0])):
            if (grp.stop - grp.start) % 2:
                raise StructureError("singular values must have even multiplicities")
        d = sigma[::2]
        lam = np.kron(np.diag(d), _J2)
        el = w.T @ a @ w
        v = el @ np.linalg.inv(lam)
        if structure_residual(v, "unitary") > 1e-7:
            raise StructureError("hua inner factor is not unitary; input malformed")
        vh = _spectral_sqrt_unitary(v)
        res = HuaResult(u=w.conj() @ vh, d=d)
    _recon_check(a, res.u @ np.kron(np.diag(res.d), _J2) @ res.u.T, "hua")
    check_structure(res.u, "unitary", _loose(tol), what="hua U")
    return res


def factor_unitary_symmetric(a, tol=DEFAULT_TOL):
    """V in U(n) with A = V^T V, for A unitary symmetric."""
    a = require_square(a)
    check_structure(a, "unitary", tol)
    check_structure(a, "symmetric", tol)
    res = takagi(a, symplectic=False, tol=tol)
    if max_abs(res.lam - 1.0) > 1e-8:
        raise StructureError("unitary symmetric input must have unit singular values")
    v = res.u.T
    _recon_check(a, v.T @ v, "V^T V")
    return v


def factor_symplectic_symmetric(a, tol=DEFAULT_TOL):
    """V in Sp(m) (compact) with A = V^T V, for A symplectic symmetric unitary."""
    a = require_square(a)
    check_structure(a, "unitary", tol)
    check_structure(a, "symmetric", tol)
    check_structure(a, "symplectic-2M-K", tol)
    y = _symmetric_symplectic_log(a, tol)
    v = sla.expm(0.5 * y)
    j = symplectic_j(a.shape[0])
    if max_abs(v.T @ j @ v - j) > 1e-8:
        raise StructureError("symplectic symmetric factor is not symplectic")
    check_structure(v, "unitary", _loose(tol), what="factor V")
    _recon_check(a, v.T @ v, "V^T V (symplectic)")
    return v


def factor_signature(a, tol=DEFAULT_TOL):
    """A = V^T D_j V with V in SO(n), D_j = diag(1 x j, -1 x (n-j)).

    j = dim Ker(A - 1) labels the connected component of A inside the
    orthogonal symmetric matrices.
    """
    a = require_square(a)
    check_structure(a, "orthogonal", tol)
    check_structure(a, "symmetric", tol)
    n = a.shape[0]
    w_eig, vecs = np.linalg.eigh(a.real)
    if np.any(np.abs(np.abs(w_eig) - 1.0) > 1e-7):
        raise StructureError("orthogonal symmetric matrix must have +-1 eigenvalues")
    plus = vecs[:, w_eig > 0.0]
    minus = vecs[:, w_eig <= 0.0]
    jcount = plus.shape[1]
    v = np.hstack([plus, minus]).T
    if np.linalg.det(v) < 0:
        v[-1, :] = -v[-1, :]
    dj = np.diag(np.concatenate([np.ones(jcount), -np.ones(n - jcount)]))
    _recon_check(a, v.T @ dj @ v, "signature factorization")
    return SignatureResult(v=v.astype(complex), j=int(jcount))


def factor_skew_unitary(a, tol=DEFAULT_TOL):
    """V in U(2m) with A = V^T J_{2m} V, for A unitary antisymmetric."""
    a = require_square(a)
    n = a.shape[0]
    if n % 2:
        raise StructureError("skew unitary factorization needs even size")
    check_structure(a, "unitary", tol)
    check_structure(a, "antisymmetric", tol)
    res = hua(a, tol)
    if max_abs(res.d - 1.0) > 1e-7:
        raise StructureError("unitary antisymmetric input must have unit singular values")
    p = _interleave_perm(n // 2)
    v = p.T @ res.u.T
    _recon_check(a, v.T @ symplectic_j(n) @ v, "V^T J V")
    return v


def factor_skew_orthogonal(a, form="pfaffian", tol=DEFAULT_TOL):
    """Factor A in O(2m), A^T = -A.

    form='J':        A = W^T J_{2m} W with W in O(2m); returns W.
    form='pfaffian': A = V^T Lambda_A V with V in SO(2m) and
                     Lambda_A = diag(1, ..., 1, Pf(A)) x J_2; returns V.
    """
    a = require_square(a)
    n = a.shape[0]
    if n % 2:
        raise StructureError("skew orthogonal factorization needs even size")
    check_structure(a, "orthogonal", tol)
    check_structure(a, "antisymmetric", tol)
    m = n // 2
    z2, bs = _real_skew_canonical(a.real, tol)
    if len(bs) != m or max_abs(bs - 1.0) > 1e-7:
        raise StructureError("orthogonal antisymmetric input must have unit blocks")
    if form == "J":
        w = _interleave_perm(m).T @ z2.T
        _recon_check(a, w.T @ symplectic_j(n) @ w, "W^T J W")
        return w
    if form != "pfaffian":
        raise ValueError("form must be 'J' or 'pfaffian'")
    detz = float(np.linalg.det(z2))
    pf = pfaffian(a, method="auto", tol=tol) if n <= 8 else pfaffian(a, "elimination", tol)
    pf_sign = 1.0 if pf.real > 0 else -1.0
    if abs(pf.real - detz) > 1e-6:
        raise StructureError("pfaffian/orientation mismatch: Pf=%.6f det=%.1f" % (pf.real, detz))
    if pf_sign > 0:
        v = z2.T
    else:
        g = np.ones(n)
        g[-1] = -1.0
        v = (z2 * g).T  # flips the last column of Z, i.e. Lambda's last block sign
    lam = sla.block_diag(*([_J2] * (m - 1) + [pf_sign * _J2])) if m > 1 else pf_sign * _J2
    _recon_check(a, v.T @ lam @ v, "V^T Lambda_A V")
    if np.linalg.det(v.real) < 0:
        raise StructureError("pfaffian-form factor must have determinant +1")
    return v.astype(complex)


def pfaffian_normal_form(m, sign):
    """blkdiag(J_2, ..., J_2, sign * J_2): the canonical antisymmetric
    orthogonal matrix with Pfaffian ``sign``."""
    blocks = [_J2] * (m - 1) + [float(sign) * _J2]
    return sla.block_diag(*blocks) if m > 1 else blocks[0]


def sp_cap_o_to_u(u, tol=DEFAULT_TOL):
    """The isomorphism Sp(2m;R) cap O(2m) -> U(m), U = ((A,B),(-B,A)) -> A + iB."""
    u = require_square(u)
    n = u.shape[0]
    if n % 2:
        raise StructureError("needs even size")
    m = n // 2
    check_structure(u, "orthogonal", tol)
    check_structure(u, "symplectic-2M-K", tol)
    x = u[:m, :m].real
    b = u[:m, m:].real
    model = np.block([[x, b], [-b, x]])
    if max_abs(u - model) > 10.0 * tol.atol:
        raise StructureError("block structure violated (UJ != JU)")
    v = x + 1j * b
    check_structure(v, "unitary", _loose(tol), what="Sp cap O image")
    return v


def u_to_sp_cap_o(v, tol=DEFAULT_TOL):
    """Inverse of sp_cap_o_to_u: rebuilds the real block form from V in U(m)."""
    v = require_square(v)
    check_structure(v, "unitary", tol)
    x = v.real
    b = v.imag
    u = np.block([[x, b], [-b, x]])
    check_structure(u, "orthogonal", _loose(tol), what="rebuilt block form")
    check_structure(u, "symplectic-2M-K", _loose(tol), what="rebuilt block form")
    return u
