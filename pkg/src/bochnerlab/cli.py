"""Command-line front end: ``bochnerlab {analyze,proofcheck,scan,synthetic}``.

Every mode builds one JSON report with the top-level keys ``structure``,
``curvature``, ``bochner``, ``frame``, ``proof``, ``verdict`` and ``timings``.
Without ``--out`` the report goes to standard output; with it, the report is
written to the file and a short text summary is printed instead.

Exit codes: 0 for a consistent result, 2 for a violation candidate, 1 for
bad input or a point outside the chart domain.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import sys
import time
import warnings
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .bochner import bochner_package
from .cframe import FrameError, frame_for
from .exprjet import DomainError, ExprSyntaxError, parse_expr
from .manifold import DEFAULT_TOL, ChartManifold, StructureError, curvature_package, validate
from .tensor import max_norm
from .verify.cases import FLAT, KAHLER, case_deduction
from .verify.identities import STEPS
from .verify.synthetic import EXPECTED_CONSTANTS, run_oracle, step_sides, symmetry_split, synthetic_point
from .verify.theorem import CONSISTENT, VIOLATION, classify_package, neighborhood_scan, proof_report
from .zoo import NAMES, default_point, zoo

ORACLE_TOL = 1e-9
REPORT_KEYS = ("structure", "curvature", "bochner", "frame", "proof", "verdict", "timings")


class ConfigError(ValueError):
    """Malformed manifold config; the message starts with the offending field path."""


# -- config loading -------------------------------------------------------------

def _matrix(data, field: str, dim: int) -> list[list[str]]:
    if not isinstance(data, list) or len(data) != dim:
        raise ConfigError(f"{field}: expected {dim} rows")
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != dim:
            raise ConfigError(f"{field}[{i}]: expected {dim} entries (matrix must be square)")
    return data


def _parse(text, field: str, dim: int):
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        text = repr(text)
    if not isinstance(text, str):
        raise ConfigError(f"{field}: expected an expression string, got {type(text).__name__}")
    try:
        return parse_expr(text, dim)
    except ExprSyntaxError as exc:
        raise ConfigError(f"{field}: {exc}") from exc


def load_manifold(path) -> ChartManifold:
    """Read ``{"dim": int, "metric": [[str]], "J": [[str]]}`` (optionally ``embedding``, ``name``)
    or ``{"zoo": name, "params": {...}}``.

    The metric's upper triangle is authoritative; a lower entry that differs
    from its mirror is ignored with a warning.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError:
        raise
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigError("<root>: expected an object")
    if "zoo" in data:
        params = data.get("params", {})
        if not isinstance(params, dict):
            raise ConfigError("params: expected an object")
        try:
            return zoo(str(data["zoo"]), **params)
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"zoo: {exc}") from exc
    for key in ("dim", "metric", "J"):
        if key not in data:
            raise ConfigError(f"{key}: missing")
    dim = data["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 2:
        raise ConfigError("dim: expected an integer >= 2")
    if dim % 2:
        raise ConfigError(f"dim: must be even, got {dim}")
    metric = [[_parse(s, f"metric[{i}][{j}]", dim) for j, s in enumerate(row)]
              for i, row in enumerate(_matrix(data["metric"], "metric", dim))]
    J = [[_parse(s, f"J[{i}][{j}]", dim) for j, s in enumerate(row)]
         for i, row in enumerate(_matrix(data["J"], "J", dim))]
    for i, j in itertools.combinations(range(dim), 2):
        if metric[j][i] != metric[i][j]:
            warnings.warn(f"metric[{j}][{i}] differs from metric[{i}][{j}]; the lower entry is ignored",
                          UserWarning, stacklevel=2)
    embedding = data.get("embedding")
    if embedding is not None:
        if not isinstance(embedding, list):
            raise ConfigError("embedding: expected a list of expressions")
        embedding = tuple(_parse(s, f"embedding[{k}]", dim) for k, s in enumerate(embedding))
    return ChartManifold(dim=dim, metric=tuple(map(tuple, metric)), J=tuple(map(tuple, J)),
                         embedding=embedding, name=str(data.get("name", path.stem)))


# -- report helpers ----------------------------------------------------------------

def _clean(obj):
    """Plain JSON types; non-finite floats become strings so the output stays valid JSON."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, complex):
        return [_clean(obj.real), _clean(obj.imag)]
    return obj


def _empty_report() -> dict:
    return {k: None for k in REPORT_KEYS}


def _manifold(args) -> ChartManifold:
    if args.config:
        return load_manifold(args.config)
    params = {"n": args.n} if args.n is not None else {}
    return zoo(args.zoo, **params)


def _point(args, M: ChartManifold) -> np.ndarray:
    if args.point:
        try:
            p = np.array([float(v) for v in args.point.split(",")])
        except ValueError as exc:
            raise ConfigError(f"--point: {exc}") from exc
        if p.shape != (M.dim,):
            raise ConfigError(f"--point: expected {M.dim} coordinates, got {p.size}")
        return p
    if M.name in NAMES:
        return default_point(M.name, M.n)
    return np.zeros(M.dim)


def _input_echo(args) -> dict:
    keys = ("mode", "zoo", "config", "n", "point", "tol", "seeds", "seed", "radius", "grid")
    return {k: getattr(args, k, None) for k in keys}


def _point_sections(M: ChartManifold, p, tol: float, timings: dict) -> tuple[dict, object, object]:
    """structure / curvature / bochner / frame sections at a validated point."""
    t0 = time.perf_counter()
    diag = validate(M, p, tol)
    if not diag.passed:
        raise StructureError(f"(g, J) is not almost Hermitian at the point: {diag.as_dict()}")
    pkg = curvature_package(M, p)
    timings["curvature"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    bpkg = bochner_package(pkg)
    timings["bochner"] = time.perf_counter() - t0
    nR = max_norm(pkg.riemann)
    sections = {
        "structure": {"manifold": M.name, "dim": M.dim, "point": p, "diagnostics": diag.as_dict()},
        "curvature": {
            "riemann_norm": nR, "ricci_norm": max_norm(pkg.ricci), "scalar": pkg.scalar,
            "nabla_J_norm": max_norm(pkg.nabla_J),
            "bianchi_residual": pkg.bianchi_residual(),
            "norm": "coordinate max-norm",
        },
        "bochner": {
            "norm": bpkg.norm, "relative": bpkg.norm / (1.0 + nR),
            "residuals": dict(bpkg.residuals), "tol": tol,
        },
    }
    try:
        frame = frame_for(pkg, bpkg.Q)
        sections["frame"] = {"mu": frame.mu, "e": frame.e, "Je": frame.Je}
    except FrameError as exc:
        frame = None
        sections["frame"] = {"error": str(exc)}
    return sections, (pkg, bpkg), frame


def _run_analyze(args, report: dict, timings: dict) -> str:
    M = _manifold(args)
    p = _point(args, M)
    sections, (pkg, bpkg), frame = _point_sections(M, p, args.tol, timings)
    report.update(sections)
    t0 = time.perf_counter()
    pr = proof_report(pkg, bpkg, args.tol, frame) if frame is not None else None
    timings["proof"] = time.perf_counter() - t0
    if pr is None:
        cls = classify_package(pkg, bpkg, args.tol)
        report["proof"] = {"classification": cls.as_dict()}
        return cls.verdict
    report["proof"] = {"classification": pr.classification.as_dict(), **pr.as_dict()}
    return pr.verdict


def _oracle_section(n: int, seeds: int, start: int, timings: dict) -> tuple[dict, bool]:
    t0 = time.perf_counter()
    run = run_oracle(n, seeds, start)
    timings["oracle"] = time.perf_counter() - t0
    mismatched = [k for k, c in run.checks.items()
                  if c.constant is None or abs(c.constant - EXPECTED_CONSTANTS[k]) > ORACLE_TOL]
    ok = run.max_rel_error <= ORACLE_TOL and not mismatched
    out = run.as_dict()
    out.update({"tol": ORACLE_TOL, "expected_constants": {k: complex(v) for k, v in EXPECTED_CONSTANTS.items()},
                "constant_mismatches": mismatched, "passed": ok})
    return out, ok


def _run_proofcheck(args, report: dict, timings: dict) -> str:
    n = args.n if args.n is not None else 3
    oracle, ok = _oracle_section(n, args.seeds, args.seed, timings)
    t0 = time.perf_counter()
    cases = []
    for flags in itertools.product((False, True), repeat=4):
        res = case_deduction(flags, n)
        cases.append({"flags": list(flags), "conclusion": res.conclusion, "zero": list(res.zero),
                      "mirrored": res.mirrored})
        ok &= res.conclusion == (FLAT if any(flags) else KAHLER)
    timings["cases"] = time.perf_counter() - t0
    report["proof"] = {"oracle": oracle, "cases": cases}
    verdict = CONSISTENT if ok else VIOLATION
    if args.zoo or args.config:
        verdict = _run_analyze(args, report, timings) if ok else verdict
        report["proof"].update({"oracle": oracle, "cases": cases})
    return verdict


def _run_scan(args, report: dict, timings: dict) -> str:
    M = _manifold(args)
    p = _point(args, M)
    verdict = _run_analyze(args, report, timings)
    t0 = time.perf_counter()
    scan = neighborhood_scan(M, p, args.radius, args.grid, args.tol)
    timings["scan"] = time.perf_counter() - t0
    report["proof"]["scan"] = scan.as_dict()
    return verdict


def _run_synthetic(args, report: dict, timings: dict) -> str:
    n = args.n if args.n is not None else 3
    sp = synthetic_point(args.seed, n)
    t0 = time.perf_counter()
    steps = {}
    ok = True
    for name, step in STEPS.items():
        if step.arity > n:
            continue
        value, closed = step_sides(sp, name)
        c = EXPECTED_CONSTANTS[name]
        scale = max(abs(value), abs(c * closed))
        rel = abs(value - c * closed) / scale if scale >= 1e-14 else 0.0
        ok &= rel <= ORACLE_TOL
        steps[name] = {"evaluated": value, "closed_form": closed, "constant": complex(c),
                       "relative_error": rel}
    timings["synthetic"] = time.perf_counter() - t0
    report["structure"] = {"synthetic": {"n": n, "seed": args.seed, "indices": list(sp.indices)}}
    report["frame"] = {"mu": sp.mu}
    report["proof"] = {"steps": steps, "symmetry_split": symmetry_split(sp), "tol": ORACLE_TOL}
    return CONSISTENT if ok else VIOLATION


MODES = {"analyze": _run_analyze, "proofcheck": _run_proofcheck, "scan": _run_scan,
         "synthetic": _run_synthetic}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bochnerlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        sp = sub.add_parser(mode)
        src = sp.add_mutually_exclusive_group(required=mode in ("analyze", "scan"))
        src.add_argument("--zoo", metavar="NAME")
        src.add_argument("--config", metavar="PATH")
        sp.add_argument("--n", type=int)
        sp.add_argument("--point", metavar="CSV")
        sp.add_argument("--tol", type=float, default=DEFAULT_TOL)
        sp.add_argument("--seeds", type=int, default=100)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--radius", type=float, default=0.5)
        sp.add_argument("--grid", type=int, default=3)
        sp.add_argument("--out", metavar="PATH")
        sp.add_argument("--timings", action="store_true",
                        help="include wall-clock timings (makes the report non-reproducible)")
    return parser


def _check_args(args) -> None:
    if not args.tol > 0:
        raise ConfigError("--tol: must be positive")
    if args.seeds < 1:
        raise ConfigError("--seeds: must be positive")
    if args.grid < 1 or args.radius < 0:
        raise ConfigError("--grid must be >= 1 and --radius >= 0")
    if args.n is not None and args.n < 1:
        raise ConfigError("--n: must be positive")
    if args.mode in ("proofcheck", "synthetic") and args.n is not None and args.n < 3:
        raise ConfigError(f"--n: {args.mode} requires n >= 3 (theorem requires n > 2)")


def run(args) -> tuple[dict, int]:
    """Execute one parsed configuration; returns ``(report, exit_code)``."""
    report = _empty_report()
    timings: dict[str, float] = {}
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            _check_args(args)
            verdict = MODES[args.mode](args, report, timings)
            code = 2 if verdict == VIOLATION else 0
        except (ConfigError, KeyError, ValueError, DomainError, StructureError,
                FileNotFoundError) as exc:
            msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
            report["verdict"] = "error"
            report["structure"] = {**(report["structure"] or {}), "error": f"{type(exc).__name__}: {msg}"}
            verdict, code = "error", 1
    messages = sorted({str(w.message) for w in caught})
    for m in messages:
        print(f"warning: {m}", file=sys.stderr)
    structure = report["structure"] or {}
    structure.update({"tool": {"name": "bochnerlab", "version": __version__},
                      "input": _input_echo(args), "warnings": messages})
    report["structure"] = structure
    report["verdict"] = verdict
    report["timings"] = timings if getattr(args, "timings", False) else None
    return _clean(report), code


def summary(report: dict) -> str:
    lines = [f"verdict: {report['verdict']}"]
    s = report["structure"] or {}
    if "error" in s:
        lines.append(f"error: {s['error']}")
    if report["curvature"]:
        c = report["curvature"]
        lines.append(f"|R| = {c['riemann_norm']:.3e}  |rho| = {c['ricci_norm']:.3e}  "
                     f"tau = {c['scalar']:.6g}  |nabla J| = {c['nabla_J_norm']:.3e}")
    if report["bochner"]:
        lines.append(f"|B| = {report['bochner']['norm']:.3e}  (relative {report['bochner']['relative']:.3e})")
    proof = report["proof"] or {}
    if "classification" in proof:
        c = proof["classification"]
        lines.append(f"bochner0 = {c['bochner0']}  kahler = {c['kahler']}  flat = {c['flat']}")
    if "oracle" in proof:
        o = proof["oracle"]
        lines.append(f"oracle n = {o['n']}, {o['seeds']} seeds: max relative error {o['max_rel_error']:.3e}")
    if "scan" in proof:
        sc = proof["scan"]
        lines.append(f"scan: {sc['evaluated']} points, {sc['clipped']} clipped, "
                     f"max |R| = {sc['max_riemann']:.3e}")
    return "\n".join(lines)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    report, code = run(args)
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n")
        print(summary(report))
    else:
        print(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
