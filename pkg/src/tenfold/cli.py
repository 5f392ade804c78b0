"""Command-line surface.

Exit codes are a stable contract:
  0 success
  1 usage error
  2 validation failure
  3 families not connected (their indices are printed)
  4 fill failure
  5 i/o or document error
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import factorizations as fx
from . import homotopy as ht
from . import io as tio
from . import models
from .indices import index as class_index
from .linalg import StructureError, Tolerance, max_abs
from .symmetry import get_class, validate_class

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_NOT_CONNECTED = 3
EXIT_FILL = 4
EXIT_IO = 5


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--atol", type=float, default=1e-10,
                        help="absolute entrywise tolerance (default 1e-10)")
    common.add_argument("--gap-min", type=float, default=1e-6,
                        help="minimal spectral gap for retractions (default 1e-6)")
    common.add_argument("--grid", type=int, default=128,
                        help="momentum grid parameter g (2g stored samples)")
    common.add_argument("--seed", type=int, default=0, help="random seed")
    common.add_argument("--s-grid", type=int, default=65,
                        help="deformation grid point count")
    parser = _Parser(prog="tenfold", description=__doc__, parents=[common],
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common],
                       help="run the symmetry validation report")
    p.add_argument("file")

    p = sub.add_parser("index", parents=[common],
                       help="print the topological index record")
    p.add_argument("files", nargs="+")

    p = sub.add_parser("connect", parents=[common],
                       help="construct a homotopy between two families")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("factor", parents=[common],
                       help="run a structured factorization on a matrix document")
    p.add_argument("file")
    p.add_argument("--kind", required=True, choices=[
        "takagi", "takagi-symplectic", "hua", "unitary-symmetric",
        "symplectic-symmetric", "signature", "skew-unitary",
        "skew-orthogonal-j", "skew-orthogonal-pfaffian", "sp-o-to-u",
    ])
    p.add_argument("-o", "--output", default=None)

    p = sub.add_parser("generate", parents=[common],
                       help="generate a model family document")
    p.add_argument("--model", required=True, choices=["kitaev-chain", "ssh", "random-class"])
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--t1", type=float, default=1.0)
    p.add_argument("--t2", type=float, default=2.0)
    p.add_argument("--class", dest="cls", default="A")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--N", type=int, default=2)
    p.add_argument("--d", type=int, default=1, choices=[0, 1])

    p = sub.add_parser("verify-homotopy", parents=[common],
                       help="independently check a homotopy document")
    p.add_argument("file")
    return parser


def _load_family(path, tol):
    doc = tio.load_json(path)
    return tio.ingest(doc, tol)


def _index_record(fam, ops, cls, tol):
    idx = class_index(fam, ops, cls, tol, validated=True)
    return idx.as_record()


def cmd_validate(args, tol):
    fam, ops, cls, report = tio.ingest(tio.load_json(args.file), tol, force=True)
    print("class %s  d=%d  n=%d  N=%d" % (cls.label, fam.d, fam.n, fam.N))
    for name in sorted(report.residuals):
        print("  %-12s %.3e" % (name, report.residuals[name]))
    for msg in report.messages:
        print("  ! %s" % msg)
    print("ok" if report.ok else "FAILED")
    return EXIT_OK if report.ok else EXIT_VALIDATION


def cmd_index(args, tol):
    for path in args.files:
        fam, ops, cls, _ = _load_family(path, tol)
        print(json.dumps(_index_record(fam, ops, cls, tol)))
    return EXIT_OK


def cmd_connect(args, tol):
    fam_a, ops, cls, _ = _load_family(args.file_a, tol)
    fam_b, ops_b, cls_b, _ = _load_family(args.file_b, tol)
    if cls_b.label != cls.label:
        raise StructureError("class mismatch: %s vs %s" % (cls.label, cls_b.label))
    worst = 0.0
    for a, b in ((ops.t_mat, ops_b.t_mat), (ops.c_mat, ops_b.c_mat), (ops.s_mat, ops_b.s_mat)):
        if (a is None) != (b is None):
            raise StructureError("operator presence mismatch between the two documents")
        if a is not None:
            worst = max(worst, max_abs(a - b))
    if worst > tol.atol:
        raise StructureError("the families carry different symmetry operators (%.3e)" % worst)
    try:
        h = ht.connect(fam_a, fam_b, ops, cls, s_count=args.s_grid, tol=tol)
    except ht.NotConnectedError as exc:
        print(json.dumps(exc.index0.as_record()))
        print(json.dumps(exc.index1.as_record()))
        print("not connected")
        return EXIT_NOT_CONNECTED
    except (ht.FillFailedError, ht.WindingObstructionError) as exc:
        print("fill failed: %s" % exc)
        return EXIT_FILL
    tio.save_json(tio.export_homotopy(h, ops, cls, {"from": [args.file_a, args.file_b]}),
                  args.output)
    report = ht.verify_homotopy(h, ops, cls, p0=fam_a, p1=fam_b, tol=tol)
    print("homotopy written to %s (slices=%d, verified=%s)"
          % (args.output, h.num_s, report.ok))
    return EXIT_OK if report.ok else EXIT_VALIDATION


def cmd_factor(args, tol):
    a = tio.ingest_matrix(tio.load_json(args.file))
    kind = args.kind
    factors = {}
    if kind in ("takagi", "takagi-symplectic"):
        res = fx.takagi(a, symplectic=kind.endswith("symplectic"), tol=tol)
        recon = (res.u * res.lam) @ res.u.T
        factors = {"u": tio.mat_to_json(res.u), "lam": list(map(float, res.lam))}
    elif kind == "hua":
        res = fx.hua(a, tol)
        recon = res.u @ np.kron(np.diag(res.d), np.array([[0, 1.0], [-1.0, 0]])) @ res.u.T
        factors = {"u": tio.mat_to_json(res.u), "d": list(map(float, res.d))}
    elif kind == "unitary-symmetric":
        v = fx.factor_unitary_symmetric(a, tol)
        recon = v.T @ v
        factors = {"v": tio.mat_to_json(v)}
    elif kind == "symplectic-symmetric":
        v = fx.factor_symplectic_symmetric(a, tol)
        recon = v.T @ v
        factors = {"v": tio.mat_to_json(v)}
    elif kind == "signature":
        res = fx.factor_signature(a, tol)
        n = a.shape[0]
        dj = np.diag(np.concatenate([np.ones(res.j), -np.ones(n - res.j)]))
        recon = res.v.T @ dj @ res.v
        factors = {"v": tio.mat_to_json(res.v), "j": res.j}
    elif kind == "skew-unitary":
        v = fx.factor_skew_unitary(a, tol)
        from .linalg import symplectic_j

        recon = v.T @ symplectic_j(a.shape[0]) @ v
        factors = {"v": tio.mat_to_json(v)}
    elif kind in ("skew-orthogonal-j", "skew-orthogonal-pfaffian"):
        form = "J" if kind.endswith("-j") else "pfaffian"
        v = fx.factor_skew_orthogonal(a, form, tol)
        from .linalg import pfaffian, symplectic_j

        if form == "J":
            recon = v.T @ symplectic_j(a.shape[0]) @ v
        else:
            pf = pfaffian(a if a.shape[0] <= 8 else a, "auto" if a.shape[0] <= 8 else "elimination", tol)
            lam = fx.pfaffian_normal_form(a.shape[0] // 2, 1.0 if pf.real > 0 else -1.0)
            recon = v.T @ lam @ v
        factors = {"v": tio.mat_to_json(v)}
    elif kind == "sp-o-to-u":
        v = fx.sp_cap_o_to_u(a, tol)
        recon = fx.u_to_sp_cap_o(v, tol)
        factors = {"v": tio.mat_to_json(v)}
    err = max_abs(a - recon)
    print("reconstruction error %.3e" % err)
    if args.output:
        tio.save_json({"format_version": tio.FORMAT_VERSION, "kind": "factors",
                       "factor_kind": kind, "factors": factors,
                       "reconstruction_error": err}, args.output)
    return EXIT_OK


def cmd_generate(args, tol):
    params = {}
    if args.model == "kitaev-chain":
        params = {"t": args.t, "delta": args.delta, "mu": args.mu}
    elif args.model == "ssh":
        params = {"t1": args.t1, "t2": args.t2}
    else:
        params = {"class": args.cls, "n": args.n, "N": args.N,
                  "seed": args.seed, "d": args.d}
    spec = models.ModelSpec(name=args.model, parameters=params, grid_g=args.grid)
    fam, ops, cls = models.generate(spec, tol)
    tio.save_json(tio.export_family(fam, ops, cls, {"model": args.model, **params}),
                  args.output)
    print("wrote %s (%s, d=%d, n=%d, N=%d)" % (args.output, cls.label, fam.d, fam.n, fam.N))
    return EXIT_OK


def cmd_verify_homotopy(args, tol):
    h, ops, cls = tio.ingest_homotopy(tio.load_json(args.file), tol)
    report = ht.verify_homotopy(h, ops, cls, tol=tol)
    for name in sorted(report.worst_residuals):
        print("  %-16s %.3e" % (name, report.worst_residuals[name]))
    if report.indices:
        print("  index along path: %s" % (report.indices[0],))
    for msg in report.messages:
        print("  ! %s" % msg)
    print("ok" if report.ok else "FAILED")
    return EXIT_OK if report.ok else EXIT_VALIDATION


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print("usage error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    tol = Tolerance(atol=args.atol, gap_min=args.gap_min)
    handlers = {
        "validate": cmd_validate,
        "index": cmd_index,
        "connect": cmd_connect,
        "factor": cmd_factor,
        "generate": cmd_generate,
        "verify-homotopy": cmd_verify_homotopy,
    }
    try:
        return handlers[args.command](args, tol)
    except tio.DocumentError as exc:
        print("document error: %s" % exc, file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print("i/o error: %s" % exc, file=sys.stderr)
        return EXIT_IO
    except ht.NotConnectedError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_NOT_CONNECTED
    except (ht.FillFailedError, ht.WindingObstructionError) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_FILL
    except (StructureError, models.GapClosedError, ValueError) as exc:
        print("validation error: %s" % exc, file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
