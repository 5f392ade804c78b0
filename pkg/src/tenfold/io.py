"""Document format and ingestion.

Families, homotopies and bare matrices are stored as JSON with explicit
real/imaginary entry arrays (human-diffable; no binary format at desk
scale).  Ingestion optionally builds Fermi projections from Bloch
Hamiltonian samples and optionally repairs near-projections by spectral
rounding; repair is opt-in and recorded, never silent.
"""

from __future__ import annotations

import json

import numpy as np

from .linalg import DEFAULT_TOL, StructureError, max_abs
from .models import fermi_projection
from .symmetry import ProjectionFamily, SymmetryOps, get_class, validate_class

FORMAT_VERSION = 1


class DocumentError(ValueError):
    """Malformed or inconsistent input document."""


def mat_to_json(a):
    a = np.asarray(a, dtype=complex)
    return {"re": a.real.tolist(), "im": a.imag.tolist()}


def mat_from_json(obj, what="matrix"):
    try:
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentError("bad %s entry: %s" % (what, exc)) from None
    if re.shape != im.shape:
        raise DocumentError("%s re/im shapes differ" % what)
    return re + 1j * im


def export_family(family, ops, cls, provenance=None):
    cls = get_class(cls) if isinstance(cls, str) else cls
    doc = {
        "format_version": FORMAT_VERSION,
        "kind": "family",
        "class": cls.label,
        "d": family.d,
        "n": family.n,
        "N": family.N,
        "symmetry": {
            "eps_t": ops.eps_t,
            "eps_c": ops.eps_c,
            "t": None if ops.t_mat is None else mat_to_json(ops.t_mat),
            "c": None if ops.c_mat is None else mat_to_json(ops.c_mat),
            "s": None if ops.s_mat is None else mat_to_json(ops.s_mat),
        },
        "samples": {"projections": [mat_to_json(p) for p in family.samples]},
        "provenance": provenance or {},
    }
    if family.d == 1:
        doc["grid_g"] = family.grid_g
    return doc


def _ops_from_doc(doc, N):
    sym = doc.get("symmetry", {})

    def get(key):
        entry = sym.get(key)
        return None if entry is None else mat_from_json(entry, key)

    return SymmetryOps(
        N=N, t_mat=get("t"), c_mat=get("c"), s_mat=get("s"),
        eps_t=int(sym.get("eps_t", 0)), eps_c=int(sym.get("eps_c", 0)),
    )


def _repair_projection(p, n, tol):
    """Spectral rounding of a near-projection; eigenvalues must keep a
    margin of at least 0.1 from 1/2."""
    w, v = np.linalg.eigh(0.5 * (p + p.conj().T))
    if np.any(np.abs(w - 0.5) < 0.1):
        raise DocumentError(
            "repair refused: eigenvalue %.3f within 0.1 of 1/2" % w[np.argmin(np.abs(w - 0.5))]
        )
    keep = v[:, w > 0.5]
    if keep.shape[1] != n:
        raise DocumentError("repair found rank %d, expected %d" % (keep.shape[1], n))
    return keep @ keep.conj().T


def ingest(doc, tol=DEFAULT_TOL, repair=False, force=False):
    """Build (family, ops, cls, report) from a family document.

    Hamiltonian documents take the Fermi projection below fermi_level
    (requiring a spectral gap of at least gap_min); projection documents
    are taken as-is, with opt-in spectral repair.  Validation runs last;
    a failing report raises unless force is set, in which case the family
    is returned tagged by the failing report.
    """
    if not isinstance(doc, dict) or doc.get("kind") != "family":
        raise DocumentError("not a family document")
    if doc.get("format_version") != FORMAT_VERSION:
        raise DocumentError("unrecognized format_version %r" % doc.get("format_version"))
    try:
        label = doc["class"]
        d = int(doc["d"])
        n = int(doc["n"])
        N = int(doc["N"])
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentError("missing header field: %s" % exc) from None
    cls = get_class(label)
    samples_doc = doc.get("samples", {})
    repaired = 0
    if "projections" in samples_doc:
        mats = [mat_from_json(m, "projection") for m in samples_doc["projections"]]
        samples = []
        for p in mats:
            if p.shape != (N, N):
                raise DocumentError("sample shape %r does not match N=%d" % (p.shape, N))
            if repair and max_abs(p @ p - p) > tol.atol:
                p = _repair_projection(p, n, tol)
                repaired += 1
            samples.append(p)
        samples = np.array(samples)
    elif "hamiltonians" in samples_doc:
        fermi = float(samples_doc.get("fermi_level", 0.0))
        samples = []
        for m in samples_doc["hamiltonians"]:
            h = mat_from_json(m, "hamiltonian")
            p, gap, rank = fermi_projection(h, fermi, tol)
            if gap < tol.gap_min:
                raise DocumentError("spectral gap %.3e below gap_min at some sample" % gap)
            if rank != n:
                raise DocumentError("Fermi projection rank %d, expected n=%d" % (rank, n))
            samples.append(p)
        samples = np.array(samples)
    else:
        raise DocumentError("document carries neither projections nor hamiltonians")
    if d == 1 and "grid_g" in doc and 2 * int(doc["grid_g"]) != len(samples):
        raise DocumentError("grid_g inconsistent with sample count")
    family = ProjectionFamily(d=d, n=n, N=N, samples=samples)
    ops = _ops_from_doc(doc, N)
    report = validate_class(family, ops, cls, tol)
    report.messages.append("repaired %d samples" % repaired) if repaired else None
    if not report.ok and not force:
        raise StructureError("validation failed: %s" % "; ".join(report.messages))
    return family, ops, cls, report


def export_homotopy(h, ops, cls, provenance=None):
    cls = get_class(cls) if isinstance(cls, str) else cls
    meta = {k: v for k, v in h.meta.items() if isinstance(v, (str, int, float))}
    fill = h.meta.get("fill")
    if fill is not None:
        meta["fill"] = {
            "converged": bool(fill.converged),
            "iterations": int(fill.iterations),
            "min_gap": float(fill.min_gap) if np.isfinite(fill.min_gap) else None,
            "refinements": int(fill.refinements),
        }
    doc = {
        "format_version": FORMAT_VERSION,
        "kind": "homotopy",
        "class": cls.label,
        "d": h.d,
        "n": h.n,
        "N": h.N,
        "s_count": h.num_s,
        "num_k": h.num_k,
        "symmetry": export_family(h.slice_family(0), ops, cls)["symmetry"],
        "slices": [[mat_to_json(p) for p in row] for row in h.samples],
        "meta": meta,
        "provenance": provenance or {},
    }
    return doc


def ingest_homotopy(doc, tol=DEFAULT_TOL):
    from .homotopy import Homotopy

    if not isinstance(doc, dict) or doc.get("kind") != "homotopy":
        raise DocumentError("not a homotopy document")
    if doc.get("format_version") != FORMAT_VERSION:
        raise DocumentError("unrecognized format_version %r" % doc.get("format_version"))
    cls = get_class(doc["class"])
    N = int(doc["N"])
    samples = np.array(
        [[mat_from_json(m, "slice sample") for m in row] for row in doc["slices"]]
    )
    h = Homotopy(
        d=int(doc["d"]), n=int(doc["n"]), N=N,
        s_values=np.linspace(0.0, 1.0, samples.shape[0]),
        samples=samples, meta=dict(doc.get("meta", {})),
    )
    ops = _ops_from_doc(doc, N)
    return h, ops, cls


def export_matrix(a):
    return {"format_version": FORMAT_VERSION, "kind": "matrix", "matrix": mat_to_json(a)}


def ingest_matrix(doc):
    if not isinstance(doc, dict) or doc.get("kind") != "matrix":
        raise DocumentError("not a matrix document")
    return mat_from_json(doc.get("matrix", {}), "matrix")


def save_json(doc, path):
    with open(path, "w") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DocumentError("cannot read %s: %s" % (path, exc)) from None
