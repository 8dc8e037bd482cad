"""Command-line interface: ``hyperhomog verify`` and ``hyperhomog inspect``.

Exit codes: 0 when every check passes, 1 when any check fails, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Sequence

from . import __version__

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SUITE_CHOICES = ("lemmas", "irreducibility", "examples", "geometry", "all")


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _rational_list(text: str) -> list[Fraction]:
    return [_rational(t) for t in text.split(",")]


# --- verify ---------------------------------------------------------------------------------


def _run_one(check_id: str, opts: dict) -> dict:
    from .checks import REGISTRY

    chk = REGISTRY[check_id]
    start = time.perf_counter()
    try:
        passed, computed = chk.fn(opts)
        status = "pass" if passed else "fail"
    except Exception as exc:  # a crashing check is a failing check
        status, computed = "fail", {"error": f"{type(exc).__name__}: {exc}"}
    elapsed = int((time.perf_counter() - start) * 1000)
    return {"id": check_id, "status": status, "computed": _jsonable(computed), "elapsed_ms": elapsed}


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def run_suite(name: str, opts: dict | None = None, threads: int = 1) -> dict:
    """Run a named suite and return the report as a JSON-ready dict."""
    from .checks import checks_for

    opts = dict(opts or {})
    ids = [c.id for c in checks_for(name)]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run_one, ids, [opts] * len(ids)))
    else:
        results = [_run_one(i, opts) for i in ids]
    results.sort(key=lambda r: r["id"])
    summary = {s: sum(1 for r in results if r["status"] == s) for s in ("pass", "fail", "skipped")}
    summary["total"] = len(results)
    return {
        "tool": "hyperhomog",
        "version": __version__,
        "suite": name,
        "options": _describe_options(opts),
        "results": results,
        "summary": summary,
    }


def _describe_options(opts: dict) -> dict:
    out = {"seed": opts.get("seed", 0)}
    if opts.get("beta") is not None:
        out["beta"] = opts["beta"].to_json()
    else:
        out["ell"] = opts.get("ell") or 1
        out["lambda"] = [str(x) for x in (opts.get("lambda") or [1] * out["ell"])]
    return out


def format_report(report: dict) -> str:
    lines = [f"hyperhomog {report['version']}  suite={report['suite']}"]
    for r in report["results"]:
        lines.append(f"{r['status'].upper():5} {r['id']:42} {r['elapsed_ms']:>7} ms  {json.dumps(r['computed'])}")
    s = report["summary"]
    lines.append(f"{s['pass']} passed, {s['fail']} failed, {s['skipped']} skipped ({s['total']} checks)")
    return "\n".join(lines)


def _model_options(parser: argparse.ArgumentParser, args) -> dict:
    from .homog import ModelError, build_beta, load_beta

    opts: dict = {}
    if args.beta is not None and (args.ell is not None or args.lambdas is not None):
        parser.error("--beta cannot be combined with --ell/--lambda")
    if args.beta is not None:
        try:
            opts["beta"] = load_beta(args.beta)
        except (OSError, ValueError, ModelError) as exc:
            parser.error(f"cannot read --beta file: {exc}")
        return opts
    ell = args.ell
    lam = args.lambdas
    if ell is None and lam is not None:
        ell = len(lam)
    if ell is not None:
        if not 1 <= ell <= 4:
            parser.error(f"--ell must be in 1..4, got {ell}")
        lam = lam if lam is not None else [Fraction(1)] * ell
        if len(lam) != ell:
            parser.error(f"--lambda needs {ell} values, got {len(lam)}")
        build_beta(ell, lam)
        opts["ell"], opts["lambda"] = ell, lam
    return opts


def _add_model_args(p: argparse.ArgumentParser):
    p.add_argument("--ell", type=int, help="number of so(1,2) summands, 1..4")
    p.add_argument("--lambda", dest="lambdas", type=_rational_list, metavar="A,B,...",
                   help="comma-separated rationals lambda_1..lambda_ell")
    p.add_argument("--beta", metavar="PATH", help="JSON file with the 50 coefficients of beta")


def cmd_verify(parser, args) -> int:
    opts = _model_options(parser, args)
    opts["seed"] = args.seed
    if args.threads < 1:
        parser.error("--threads must be positive")
    report = run_suite(args.suite, opts, threads=args.threads)
    print(format_report(report))
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return EXIT_OK if report["summary"]["fail"] == 0 else EXIT_FAIL


# --- inspect --------------------------------------------------------------------------------


def _catalog_from(parser, args):
    from .quatrep import CatalogError, catalog

    try:
        return catalog(args.algebra, n=args.n, a=args.a, b=args.b)
    except CatalogError as exc:
        parser.error(str(exc))


def _sparse_vector(spec, vec) -> dict:
    out = {}
    for idx, v in enumerate(vec):
        if v:
            key = spec.key(idx)
            out[",".join("".join(str(i) for i in part) if len(part) == 1 else "(" + " ".join(map(str, part)) + ")"
                         for part in key)] = str(v)
    return out


def inspect_invariants(parser, args) -> dict:
    from .invariants import SpecParseError, invariant_basis, make_action, parse_spec

    entry = _catalog_from(parser, args)
    spaces = {}
    for name, desc in (("V", args.V), ("W", args.W)):
        if desc:
            spaces[name] = desc
    for item in args.bind or []:
        name, _, desc = item.partition("=")
        if not desc:
            parser.error(f"--bind expects NAME=DESCRIPTOR, got {item!r}")
        spaces[name] = desc
    try:
        spec = parse_spec(args.space, spaces)
        used = {n: spaces.get(n, n) for n in spec.spaces}
        action = make_action(entry, used)
    except SpecParseError as exc:
        parser.error(str(exc))
    except ValueError as exc:
        parser.error(str(exc))
    basis = invariant_basis(action, spec)
    return {"algebra": entry.name, "space": str(spec), "spaces": used, "space_dim": spec.dim,
            "dimension": basis.dim, "basis": [_sparse_vector(spec, v) for v in basis.vectors]}


def inspect_model(parser, args) -> dict:
    from .homog import Geometry, assemble_model, jacobi_residual, tensor_coords, tensor_spec
    from .checks import model_beta

    opts = _model_options(parser, args)
    beta = model_beta(opts)
    res = jacobi_residual(beta)
    out = {"beta": beta.to_json(), "jacobi_ok": res.ok, "jacobi_nonzero": len(res.failures)}
    if not res.ok:
        return out
    model = assemble_model(beta)
    geo = Geometry(model)
    sc = model.structure_constants()
    out["structure_constants"] = {f"{p},{r}": {str(k): str(v) for k, v in enumerate(sc[p][r]) if v}
                                  for p in range(len(sc)) for r in range(p + 1, len(sc)) if any(sc[p][r])}
    out["metric_diagonal"] = [str(model.metric[i, i]) for i in range(model.dim)]
    out["predicates"] = {"is_symmetric": geo.is_symmetric(), "is_flat": geo.is_flat(),
                         "is_hyperkaehler": geo.is_hyperkaehler()}
    if args.tensor:
        alpha = args.alpha
        if args.tensor in ("d_omega", "nijenhuis"):
            t = geo.d_omega(alpha) if args.tensor == "d_omega" else geo.nijenhuis(alpha)
            out["alpha"] = alpha
        elif args.tensor == "curvature":
            t = geo.curvature
        else:
            t = geo.intrinsic_torsion
        spec = tensor_spec(args.tensor)
        out["tensor"] = {"kind": args.tensor, "space": str(spec),
                         "components": _sparse_vector(spec, tensor_coords(args.tensor, t))}
    return out


NAMED_OPS = {f"{lbl}_phi": lbl for lbl in "xyzuvw"}


def inspect_eigenlines(parser, args) -> dict:
    from .quatrep import NotSplitError, catalog, quat_eigenlines

    if args.op:
        if args.op not in NAMED_OPS:
            parser.error(f"unknown operator {args.op!r}; known: {', '.join(sorted(NAMED_OPS))}")
        entry, label = catalog("u_phi"), NAMED_OPS[args.op]
    else:
        if not args.algebra:
            parser.error("give --op or --algebra with --generator")
        entry = _catalog_from(parser, args)
        label = args.generator or (entry.labels[0] if entry.labels else None)
        if label not in entry.labels:
            parser.error(f"{entry.name} has generators {', '.join(entry.labels)}")
    op = entry.quat_generators[entry.labels.index(label)]
    if (op.rows, op.cols) != (2, 2):
        parser.error("eigenlines are available for 2x2 quaternionic operators only")
    try:
        lines = quat_eigenlines(op)
    except NotSplitError as exc:
        return {"algebra": entry.name, "generator": label, "split": False, "reason": str(exc)}
    return {"algebra": entry.name, "generator": label, "split": True,
            "lines": [{"generator": [str(x) for x in L.generator], "eigenvalue": str(L.eigenvalue)}
                      for L in lines]}


def inspect_killing(parser, args) -> dict:
    from .irreducibility import DependentGeneratorsError, killing_signature

    entry = _catalog_from(parser, args)
    try:
        res = killing_signature(entry)
    except (DependentGeneratorsError, ValueError) as exc:
        parser.error(str(exc))
    return {"algebra": entry.name, "dim": res.dim, "signature": list(res.signature),
            "nondegenerate": res.nondegenerate, "form": [[str(x) for x in row] for row in res.form.tolist()]}


def inspect_irreducibility(parser, args) -> dict:
    from .irreducibility import ScopeError, UndecidedError, is_H_irreducible, verify_certificate

    entry = _catalog_from(parser, args)
    try:
        cert = is_H_irreducible(entry, seed=args.seed)
    except (ScopeError, UndecidedError) as exc:
        parser.error(str(exc))
    out = cert.to_json()
    out["verified"] = verify_certificate(cert, entry)
    return out


INSPECTORS = {
    "invariants": inspect_invariants,
    "model": inspect_model,
    "eigenlines": inspect_eigenlines,
    "killing": inspect_killing,
    "irreducibility": inspect_irreducibility,
}


def _add_algebra_args(p, required: bool):
    p.add_argument("--algebra", required=required, help="catalog name, e.g. so12, u_phi, S")
    p.add_argument("--n", type=int, help="quaternionic dimension parameter for the so/su/u/sp families")
    p.add_argument("--a", type=_rational, help="parameter a of S(a,b)")
    p.add_argument("--b", type=_rational, help="parameter b of S(a,b)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hyperhomog", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    pv = sub.add_parser("verify", help="run a suite of checks")
    pv.add_argument("--suite", required=True, choices=SUITE_CHOICES)
    _add_model_args(pv)
    pv.add_argument("--out", metavar="PATH", help="write the JSON report here")
    pv.add_argument("--threads", type=int, default=1, help="worker processes (default 1)")
    pv.add_argument("--seed", type=int, default=0, help="seed for the randomized checks")
    pv.set_defaults(subparser=pv)

    pi = sub.add_parser("inspect", help="print exact objects as JSON")
    isub = pi.add_subparsers(dest="what", required=True)
    p = isub.add_parser("invariants")
    p.set_defaults(subparser=p)
    _add_algebra_args(p, True)
    p.add_argument("--space", required=True, help="tensor space spec, e.g. L3:dualV")
    p.add_argument("--V", help="descriptor bound to V, e.g. R12xR4")
    p.add_argument("--W", help="descriptor bound to W")
    p.add_argument("--bind", action="append", metavar="NAME=DESC", help="bind another space name")
    p = isub.add_parser("model")
    p.set_defaults(subparser=p)
    _add_model_args(p)
    p.add_argument("--tensor", choices=("d_omega", "nijenhuis", "curvature", "torsion"))
    p.add_argument("--alpha", type=int, default=1, choices=(1, 2, 3))
    p = isub.add_parser("eigenlines")
    p.set_defaults(subparser=p)
    p.add_argument("--op", help="named operator: " + ", ".join(sorted(NAMED_OPS)))
    _add_algebra_args(p, False)
    p.add_argument("--generator", help="generator label within --algebra")
    p = isub.add_parser("killing")
    p.set_defaults(subparser=p)
    _add_algebra_args(p, True)
    p = isub.add_parser("irreducibility")
    p.set_defaults(subparser=p)
    _add_algebra_args(p, True)
    p.add_argument("--seed", type=int, default=0)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify":
        return cmd_verify(args.subparser, args)
    result = INSPECTORS[args.what](args.subparser, args)
    print(json.dumps(_jsonable(result), indent=2))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
