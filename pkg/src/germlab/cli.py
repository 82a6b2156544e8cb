"""Batch command-line front end.

Parses algebra or germ specs, runs the verification pipelines and emits
machine-readable JSON reports with stable exit codes: 0 when every check
passes, 1 when a mathematical check fails, 2 on input or usage errors.
Identical inputs and seeds produce byte-identical reports.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from . import dilation as dil
from . import germ as gm
from . import ito_algebra as ia
from . import jsonio
from . import noise_sim as ns
from .errors import (
    GermlabError,
    InvariantError,
    NegativeDissipator,
    NegativeEigenvalue,
    ParseError,
    ResidualTooLarge,
    SchemaError,
)
from .linalg import DEFAULT_REL_EPS, Tolerance

SCHEMA = "germlab.report/1"
_CANONICAL = {"newton", "wiener", "poisson"}


def parse_spec(path: str, tol: Tolerance | None = None, validate: bool = True):
    """Load and validate an algebra or germ spec.

    ``path`` may also be a canonical algebra name, optionally suffixed
    with a scale as ``name:scale``.  With ``validate`` the full type
    invariants are enforced: algebra axioms for algebras, table laws,
    representation laws and block symmetry for germs; violations raise
    :class:`InvariantError` naming the offending field.  The reporting
    commands pass ``validate=False`` so they can grade a broken input
    instead of refusing it.
    """
    tol = tol or Tolerance()
    name, _, scale = path.partition(":")
    if name in _CANONICAL:
        return ia.canonical_algebra(name, float(scale) if scale else 1.0)
    if not os.path.exists(path):
        raise ParseError("no such file: %s" % path)
    with open(path, "r", encoding="utf-8") as fh:
        raw = fh.read()
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseError("invalid JSON in %s: %s" % (path, exc)) from exc
    if not isinstance(data, dict):
        raise SchemaError("top-level spec must be a JSON object")
    if "structure" in data:
        alg = ia.algebra_from_dict(data)
        if validate:
            report = ia.verify_axioms(alg)
            if not report.ok:
                bad = [n for n, _, _, ok in report.entries if not ok]
                raise InvariantError("algebra axiom failures: %s" % ", ".join(bad))
        return alg
    if "semigroup" in data:
        germ = gm.germ_from_dict(data)
        if validate:
            try:
                germ.rep.validate(germ.sg, tol)
            except GermlabError as exc:
                raise InvariantError("rep: %s" % exc) from exc
            sym = gm.check_symmetry(germ, tol)
            if not sym.ok:
                unit = germ.sg.elements[germ.sg.unit]
                bad = [n for n, _, _, ok in sym.entries if not ok]
                raise InvariantError(
                    "germ symmetry failures (%s; unit element %s)" % (", ".join(bad), unit)
                )
        return germ
    raise SchemaError("spec is neither an algebra (no 'structure') nor a germ (no 'semigroup')")


def _require(value, kind, flag):
    if value is None:
        raise SchemaError("command requires %s" % flag)
    return value


def _parse_element(text: str, dim: int) -> np.ndarray:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("element must be JSON: %s" % exc) from exc
    if not isinstance(data, list):
        raise SchemaError("element must be a JSON array")
    out = np.zeros(len(data), dtype=complex)
    for i, entry in enumerate(data):
        if isinstance(entry, (int, float)) and not isinstance(entry, bool):
            out[i] = entry
        else:
            out[i] = jsonio.decode_complex(entry, "element[%d]" % i)
    if out.shape[0] != dim:
        raise SchemaError("element has %d coordinates, algebra dimension is %d" % (out.shape[0], dim))
    return out


def _cmd_verify_algebra(alg, args, tol):
    report = ia.verify_axioms(alg)
    return report.ok, {"axioms": report.to_dict()}


def _cmd_gns(alg, args, tol):
    report = ia.verify_axioms(alg)
    if not report.ok:
        return False, {"axioms": report.to_dict()}
    gns = ia.gns_quadruple(alg)
    thr = tol.threshold(max(1.0, float(np.max(np.abs(alg.gram())))) ** 2)
    ok = all(v <= thr for v in gns.residuals.values())
    return ok, {"axioms": report.to_dict(), "gns": gns.to_dict(), "threshold": thr}


def _cmd_germ_check(germ, args, tol):
    sym = gm.check_symmetry(germ, tol)
    if not sym.ok:
        # positivity checks presuppose the block symmetries
        return False, {"symmetry": sym.to_dict()}
    cond = gm.conditional_pd(germ, tol)
    diss = gm.dissipator_pd(germ, tol)
    decidable = not (cond.indeterminate or diss.indeterminate)
    agree = cond.ok == diss.ok
    ok = bool(sym.ok and cond.ok and diss.ok)
    return ok, {
        "symmetry": sym.to_dict(),
        "conditional_pd": cond.to_dict(),
        "dissipator_pd": diss.to_dict(),
        "verdicts_agree": agree,
        "decidable": decidable,
    }


def _cmd_dilate(germ, args, tol):
    try:
        dl = dil.dilate(germ, tol)
    except (NegativeDissipator, ResidualTooLarge) as exc:
        return False, {"error": {"type": type(exc).__name__, "message": str(exc)}}
    structure = dil.verify_structure(dl, germ, tol)
    ph = dil.assemble_pseudo_hilbert(dl, germ, tol)
    ok = bool(structure.ok)
    return ok, {
        "dilation": dl.to_dict(),
        "structure": structure.to_dict(),
        "pseudo_hilbert": ph.to_dict(),
    }


def _cmd_sim_exp(alg, args, tol):
    element = _parse_element(_require(args.element, str, "--element"), alg.dim)
    report = ns.stochastic_exponential_mc(
        alg, element, args.horizon, args.step, args.seed, args.batch
    )
    deterministic = report.stderr == 0.0
    if deterministic:
        ok = report.abs_error <= abs(report.closed_form) * args.step
    else:
        ok = report.sigmas <= args.sigmas
    return bool(ok), {"exponential": report.to_dict(), "sigma_bound": args.sigmas}


def _cmd_sim_moments(args, tol):
    paths = ns.sample_paths(args.kind, args.horizon, args.step, args.seed, args.batch)
    report = ns.ito_moment_check(paths, args.sigmas)
    return report.ok, {"moments": report.to_dict()}


def _cmd_kernel_check(alg, args, tol):
    raw = json.loads(_require(args.elements, str, "--elements"))
    if not isinstance(raw, list) or not raw:
        raise SchemaError("--elements must be a nonempty JSON array of element arrays")
    elements = [_parse_element(json.dumps(e), alg.dim) for e in raw]
    report = ns.pd_kernel_check(
        alg,
        elements,
        args.time,
        tol,
        seed=args.seed,
        batch=args.batch,
        step=args.step,
        tol_sigmas=args.sigmas,
    )
    return report.ok, {"kernel": report.to_dict()}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="germlab",
        description="verification lab for Ito *-algebras, germs and dilations",
    )
    parser.add_argument("--version", action="version", version="germlab %s" % __version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, spec=True):
        if spec:
            p.add_argument("--spec", required=True, help="spec file or canonical algebra name")
        p.add_argument("--tol", type=float, default=None, help="absolute tolerance floor")
        p.add_argument("--seed", type=int, default=None, help="RNG seed (fallback: GERMLAB_SEED)")
        p.add_argument("--batch", type=int, default=10000)
        p.add_argument("--out", default=None, help="write the JSON report to this path")
        p.add_argument("--json", action="store_true", help="print the JSON report to stdout")

    common(sub.add_parser("verify-algebra", help="check algebra axioms"))
    common(sub.add_parser("gns", help="axioms plus GNS quadruples"))
    common(sub.add_parser("germ-check", help="conditional positivity of a germ"))
    common(sub.add_parser("dilate", help="dilate a germ and verify the factorization"))

    p = sub.add_parser("sim-exp", help="Monte Carlo stochastic exponential")
    common(p)
    p.add_argument("--element", required=True, help="JSON coordinates of the algebra element")
    p.add_argument("--horizon", type=float, default=1.0)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--sigmas", type=float, default=4.0)

    p = sub.add_parser("sim-moments", help="statistical multiplication-table checks")
    common(p, spec=False)
    p.add_argument("--kind", required=True, choices=sorted(ns.KINDS))
    p.add_argument("--horizon", type=float, default=1.0)
    p.add_argument("--step", type=float, default=1e-2)
    p.add_argument("--sigmas", type=float, default=4.0)

    p = sub.add_parser("kernel-check", help="kernel positivity with MC cross-check")
    common(p)
    p.add_argument("--elements", required=True, help="JSON array of element coordinate arrays")
    p.add_argument("--time", type=float, default=1.0)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--sigmas", type=float, default=4.0)

    return parser


def run_command(args) -> tuple[int, dict]:
    """Execute a parsed command; returns (exit_code, report)."""
    tol = Tolerance(args.tol, DEFAULT_REL_EPS) if args.tol is not None else Tolerance()
    if args.seed is None:
        args.seed = int(os.environ.get("GERMLAB_SEED", "0"))

    if args.command == "sim-moments":
        ok, result = _cmd_sim_moments(args, tol)
    else:
        reporting = args.command in ("verify-algebra", "germ-check")
        value = parse_spec(args.spec, tol, validate=not reporting)
        handlers = {
            "verify-algebra": (_cmd_verify_algebra, ia.ItoAlgebra),
            "gns": (_cmd_gns, ia.ItoAlgebra),
            "sim-exp": (_cmd_sim_exp, ia.ItoAlgebra),
            "kernel-check": (_cmd_kernel_check, ia.ItoAlgebra),
            "germ-check": (_cmd_germ_check, gm.GermMap),
            "dilate": (_cmd_dilate, gm.GermMap),
        }
        handler, expected = handlers[args.command]
        if not isinstance(value, expected):
            raise SchemaError(
                "command %s needs a %s spec" % (args.command, expected.__name__.lower())
            )
        ok, result = handler(value, args, tol)

    report = {
        "schema": SCHEMA,
        "command": args.command,
        "params": {
            "seed": args.seed,
            "batch": args.batch,
            "tol": args.tol,
            "spec": getattr(args, "spec", None),
        },
        "result": result,
        "verdict": "pass" if ok else "fail",
    }
    return (0 if ok else 1), report


def _emit(report: dict, args, code: int):
    text = jsonio.dumps_canonical(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
            fh.write("\n")
    if args.json:
        sys.stdout.write(text + "\n")
    else:
        sys.stdout.write("%s: %s (exit %d)\n" % (report["command"], report["verdict"], code))


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, 0 on --help/--version
        return int(exc.code or 0) and 2
    try:
        code, report = run_command(args)
        _emit(report, args, code)
        return code
    except (ParseError, SchemaError, InvariantError) as exc:
        diagnostic = {
            "schema": SCHEMA,
            "command": args.command,
            "error": {"type": type(exc).__name__, "message": str(exc)},
        }
        if args.json:
            sys.stdout.write(jsonio.dumps_canonical(diagnostic) + "\n")
        else:
            sys.stderr.write("error: %s: %s\n" % (type(exc).__name__, exc))
        return 2
    except (NegativeEigenvalue, ResidualTooLarge, NegativeDissipator) as exc:
        diagnostic = {
            "schema": SCHEMA,
            "command": args.command,
            "error": {"type": type(exc).__name__, "message": str(exc)},
            "verdict": "fail",
        }
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(jsonio.dumps_canonical(diagnostic) + "\n")
        if args.json:
            sys.stdout.write(jsonio.dumps_canonical(diagnostic) + "\n")
        else:
            sys.stderr.write("check failed: %s: %s\n" % (type(exc).__name__, exc))
        return 1


if __name__ == "__main__":
    sys.exit(main())
