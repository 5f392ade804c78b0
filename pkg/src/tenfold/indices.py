"""Topological indices of validated projection families.

Orientation convention (the single source of sign truth for this repo):
k increases from -1/2 to 1/2 and windings accumulate principal phase
increments along that orientation, closing the loop through the
identified endpoint.  Half-line quantities run over k in [0, 1/2].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import DEFAULT_TOL, StructureError, max_abs, symplectic_j
from .symmetry import (
    chiral_reduce,
    class_basis,
    get_class,
    reduce_D,
    validate_class,
)
from .linalg import pfaffian

#: per-step phase increments must stay below this (stricter than the
#: mathematical < pi bound, leaving numerical margin)
MAX_PHASE_STEP = np.pi / 2


class GridTooCoarseError(ValueError):
    """Neighboring samples differ by too large a phase step."""


@dataclass
class PhaseTrack:
    """Continuous lift alpha of arg det along a sample path."""

    alpha: np.ndarray
    max_step: float


def track_phases(values, tol=DEFAULT_TOL):
    """Continuous phase lift of a path of unit-modulus complex numbers."""
    values = np.asarray(values, dtype=complex)
    if np.any(np.abs(np.abs(values) - 1.0) > 1e-6):
        raise StructureError("phase tracking needs unit-modulus values")
    steps = np.angle(values[1:] / values[:-1])
    max_step = float(np.max(np.abs(steps))) if len(steps) else 0.0
    if max_step >= MAX_PHASE_STEP:
        raise GridTooCoarseError(
            "phase step %.3f exceeds pi/2; grid too coarse" % max_step
        )
    alpha = np.concatenate([[np.angle(values[0])], np.angle(values[0]) + np.cumsum(steps)])
    return PhaseTrack(alpha=alpha, max_step=max_step)


def _unit_dets(q_samples):
    dets = np.array([np.linalg.det(q) for q in np.asarray(q_samples, dtype=complex)])
    mags = np.abs(dets)
    if np.any(np.abs(mags - 1.0) > 1e-6):
        raise StructureError("non-unitary sample (|det| = %.6f)" % mags.max())
    return dets / mags


def winding(q_samples, tol=DEFAULT_TOL):
    """Winding number of det Q around a closed loop of unitaries.

    The loop is the sample sequence with the wrap-around step appended.
    """
    dets = _unit_dets(q_samples)
    closed = np.concatenate([dets, dets[:1]])
    track = track_phases(closed, tol)
    total = (track.alpha[-1] - track.alpha[0]) / (2.0 * np.pi)
    w = int(round(total))
    if abs(total - w) > 1e-6:
        raise StructureError("winding %.8f is not an integer" % total)
    return w


def semi_winding(q_samples, tol=DEFAULT_TOL):
    """Half-turn count of det Q over k in [0, 1/2], endpoints orthogonal.

    Returns (alpha(1/2) - alpha(0)) / pi, which is an integer because the
    endpoint determinants are +-1.
    """
    dets = _unit_dets(q_samples)
    for which, d in (("start", dets[0]), ("end", dets[-1])):
        if abs(d.imag) > 1e-6 or abs(abs(d.real) - 1.0) > 1e-6:
            raise StructureError("%s determinant %s is not +-1" % (which, d))
    track = track_phases(dets, tol)
    total = (track.alpha[-1] - track.alpha[0]) / np.pi
    w = int(round(total))
    if abs(total - w) > 1e-6:
        raise StructureError("semi-winding %.8f is not an integer" % total)
    return w


def diii_sign_index(a_samples, tol=DEFAULT_TOL):
    """The DIII sign: (e^{i alpha(0)/2} / Pf A(0)) (e^{i alpha(1/2)/2} / Pf A(1/2)).

    a_samples runs over k in [0, 1/2]; the endpoints must be unitary
    antisymmetric.  Both quotient factors are asserted to be +-1; the
    result is independent of the choice of phase lift.
    """
    a_samples = np.asarray(a_samples, dtype=complex)
    dets = _unit_dets(a_samples)
    track = track_phases(dets, tol)
    factors = []
    for pos, idx in ((0, 0), (-1, len(a_samples) - 1)):
        a = a_samples[idx]
        if max_abs(a + a.T) > 1e-6:
            raise StructureError("endpoint A is not antisymmetric")
        pf = pfaffian(0.5 * (a - a.T), "auto" if a.shape[0] <= 8 else "elimination", tol)
        quotient = np.exp(0.5j * track.alpha[pos]) / pf
        if abs(abs(quotient) - 1.0) > 1e-6 or abs(quotient.imag) > 1e-6:
            raise StructureError(
                "Pfaffian/phase inconsistency: quotient %s is not +-1" % quotient
            )
        factors.append(1 if quotient.real > 0 else -1)
    return factors[0] * factors[1]


def _sign_of(x, what):
    if abs(abs(x) - 1.0) > 1e-6:
        raise StructureError("%s = %.8f is not +-1" % (what, x))
    return 1 if x > 0 else -1


@dataclass
class ClassIndex:
    """Index value of a family: lives in the group Table-1 assigns to
    (class, d).  value is None for the trivial group, an int for Z or
    Z2 (as a sign), and a tuple for product groups.  For class D in
    d = 1 the weak/strong decomposition is also reported."""

    label: str
    d: int
    group: str
    value: object = None
    weak: int | None = None
    strong: int | None = None

    @property
    def trivial(self):
        return self.group == "0"

    def as_record(self):
        val = list(self.value) if isinstance(self.value, tuple) else self.value
        return {
            "class": self.label,
            "d": self.d,
            "value": val,
            "weak": self.weak,
            "strong": self.strong,
            "group": self.group,
        }

    def __eq__(self, other):
        if not isinstance(other, ClassIndex):
            return NotImplemented
        return (self.label, self.d, self.value) == (other.label, other.d, other.value)


def _half_line_indices(num_k):
    """Stored indices walking k = 0 -> 1/2 (the +1/2 endpoint wraps to 0)."""
    g = num_k // 2
    return list(range(g, num_k)) + [0]


def index(family, ops, cls, tol=DEFAULT_TOL, validated=False):
    """The Table-1 index of a family (dispatch over the ten classes)."""
    cls = get_class(cls) if isinstance(cls, str) else cls
    if not validated:
        report = validate_class(family, ops, cls, tol)
        if not report.ok:
            raise StructureError(
                "family fails validation for %s: %s" % (cls.label, "; ".join(report.messages))
            )
    d = family.d
    group = cls.index_group(d)
    out = ClassIndex(label=cls.label, d=d, group=group)
    if group == "0":
        return out

    if cls.label == "D":
        _, a_samples = reduce_D(family, ops, tol)

        def pf_sign(k):
            a = a_samples[family.fixed_point_index(k)]
            a = 0.5 * (a.real - a.real.T)
            val = pfaffian(a, "auto" if a.shape[0] <= 8 else "elimination", tol)
            return _sign_of(val.real, "Pf(A(%s))" % k)

        if d == 0:
            out.value = pf_sign(0)
        else:
            p0, ph = pf_sign(0), pf_sign(0.5)
            out.value = (p0, ph)
            out.weak = p0
            out.strong = p0 * ph
        return out

    if cls.label == "AIII":
        _, chi = chiral_reduce(family, ops.s_mat, tol)
        out.value = winding(chi.q_samples, tol)
        return out

    # real chiral classes: move to the class basis, where S = diag(I, -I)
    # exactly and the blocks Q(k) carry the class's reality condition
    b = class_basis(cls, ops, tol)
    qs = np.array([b.conj().T @ family.samples[j] @ b for j in range(family.num_k)])
    n = family.N // 2
    qs = 2.0 * qs[:, :n, n:]

    if cls.label == "BDI":
        if d == 0:
            out.value = _sign_of(np.linalg.det(qs[0]).real, "det Q")
            return out
        half = qs[_half_line_indices(family.num_k)]
        det0 = _sign_of(np.linalg.det(half[0]).real, "det Q(0)")
        deth = _sign_of(np.linalg.det(half[-1]).real, "det Q(1/2)")
        w = semi_winding(half, tol)
        if deth != det0 * (-1) ** w:
            raise StructureError("BDI consistency det Q(1/2) = det Q(0) (-1)^W violated")
        out.value = (det0, w)
        out.weak = det0
        out.strong = deth
        return out

    if cls.label == "CII":
        out.value = winding(qs, tol)
        return out

    if cls.label == "DIII":
        j_n = symplectic_j(n)
        a_samples = np.array([j_n.T @ q for q in qs[_half_line_indices(family.num_k)]])
        out.value = diii_sign_index(a_samples, tol)
        return out

    raise AssertionError("unhandled class %s" % cls.label)


def _s_normal(N):
    n = N // 2
    return np.diag(np.concatenate([np.ones(n), -np.ones(n)])).astype(complex)
