"""Command-line front end for the solvers and verifiers.

Every subcommand emits a machine-readable document (JSON by default, CSV
for sampled profiles and sweeps) with a top-level schema tag, and maps the
library's exception taxonomy onto stable exit codes:

    0  success
    1  usage error (bad flags, malformed grid, unreadable config)
    2  bracket failure in a root scan
    3  non-convergence, blow-up, or step failure
    4  regime violation (no explicit solution, wrong coefficient signs)
    5  validation, domain, pole, or tail errors

so that parameter sweeps and scripted studies can sort outcomes without
parsing messages.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import jsonio
from .closed_form import (
    EmdenFowlerMap,
    build_cosh_solution,
    curve_rows,
    radial_curve_rows,
)
from .errors import (
    BlowUpError,
    BracketError,
    ConvergenceError,
    DomainError,
    Radial4Error,
    RegimeError,
    StepFailureError,
    TailError,
    ValidationError,
)
from .identities import (
    IdentityId,
    TEST_FUNCTIONS,
    QuadratureGrid,
    record_deviation,
    run_identity_suite,
    verify_identity,
)
from .orbits import classify_singularity, find_homoclinic, find_periodic
from .params import ProblemParams, check_conditions, derive_coefficients
from .variational import best_constant_numerical, phi_closed_form

SCHEMA = "1"

_EXIT_USAGE = 1
_EXIT_BRACKET = 2
_EXIT_CONVERGENCE = 3
_EXIT_REGIME = 4
_EXIT_VALIDATION = 5


class _UsageError(Exception):
    pass


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, default=None, help="space dimension (integer >= 5)")
    p.add_argument("--alpha", type=float, default=None, help="weight exponent in (-n, n-4)")
    p.add_argument("--beta", type=float, default=None,
                   help="right-hand weight exponent; derived from the balance relation when absent")
    p.add_argument("--p", type=float, default=None, dest="p_exp", help="nonlinearity exponent > 1")
    p.add_argument("--lambda", type=float, default=None, dest="lam", help="gradient-term coefficient")
    p.add_argument("--mu", type=float, default=None, help="zero-order coefficient")
    p.add_argument("--config", type=str, default=None, help="JSON file with parameter defaults")


def _add_output_flags(p: argparse.ArgumentParser, formats=("json", "csv")) -> None:
    p.add_argument("--format", choices=list(formats), default="json", help="output document format")
    p.add_argument("--output", type=str, default=None, help="output path (stdout when absent)")


def _load_config(path: Optional[str]) -> Dict:
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise _UsageError(f"cannot read config file {path}: {exc}")
    if not isinstance(doc, dict):
        raise _UsageError(f"config file {path} must hold a JSON object")
    return doc


def _build_params(args) -> ProblemParams:
    cfg = _load_config(getattr(args, "config", None))

    def pick(flag_value, key, default=None):
        if flag_value is not None:
            return flag_value
        if key in cfg:
            return cfg[key]
        return default

    n = pick(args.n, "n")
    alpha = pick(args.alpha, "alpha")
    p_exp = pick(args.p_exp, "p")
    if n is None or alpha is None or p_exp is None:
        raise _UsageError("parameters --n, --alpha, --p are required (flags or config)")
    lam = pick(args.lam, "lambda", 0.0)
    mu = pick(args.mu, "mu", 0.0)
    beta = pick(args.beta, "beta", None)
    return ProblemParams(n=int(n), alpha=float(alpha), p=float(p_exp),
                         lam=float(lam), mu=float(mu),
                         beta=None if beta is None else float(beta))


def _write(args, text: str) -> None:
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _sorted_eigenvalues(coeff) -> List:
    eigs = list(coeff.eigenvalues)
    if coeff.eigenvalues_real:
        return sorted((float(e.real) if isinstance(e, complex) else float(e) for e in eigs),
                      reverse=True)
    enc = []
    for e in sorted((complex(e) for e in eigs), key=lambda z: (-z.real, -z.imag)):
        enc.append({"re": e.real, "im": e.imag})
    return enc


def _cmd_info(args) -> int:
    params = _build_params(args)
    coeff = derive_coefficients(params)
    report = check_conditions(params)
    doc = {
        "schema": SCHEMA,
        "params": params.to_dict(),
        "K2": coeff.K2,
        "K0": coeff.K0,
        "l": coeff.l,
        "eigenvalues": _sorted_eigenvalues(coeff),
        "conditions": report.to_dict(),
    }
    _write(args, jsonio.dumps(doc))
    return 0


def _cmd_explicit(args) -> int:
    params = _build_params(args)
    sol = build_cosh_solution(params)
    if args.format == "csv":
        if args.curve == "radial":
            efmap = EmdenFowlerMap(params.n, params.alpha)
            header, rows = radial_curve_rows(sol, efmap)
        else:
            header, rows = curve_rows(sol)
        _write(args, jsonio.write_csv(header, rows))
        return 0
    doc = {
        "schema": SCHEMA,
        "params": params.to_dict(),
        "m": sol.m,
        "nu": sol.nu,
        "C": sol.C,
        "case": sol.case_tag.value,
        "gamma_decay": sol.gamma_decay,
        "K2": sol.K2,
        "K0": sol.K0,
    }
    _write(args, jsonio.dumps(doc))
    return 0


def _cmd_orbit(args) -> int:
    params = _build_params(args)
    if args.a is None:
        raise _UsageError("--a (orbit minimum value) is required")
    orbit = find_periodic(args.a, params, tol=args.tol)
    if args.format == "csv":
        header, rows = orbit.trajectory.rows()
        _write(args, jsonio.write_csv(header, rows))
        return 0
    doc = {"schema": SCHEMA, "params": params.to_dict()}
    doc.update(orbit.to_dict())
    _write(args, jsonio.dumps(doc))
    return 0


def _cmd_homoclinic(args) -> int:
    params = _build_params(args)
    profile = find_homoclinic(params)
    if args.format == "csv":
        header, rows = profile.samples.rows()
        _write(args, jsonio.write_csv(header, rows))
        return 0
    verdict = None
    try:
        verdict = classify_singularity(params).to_dict()
    except RegimeError:
        pass
    doc = {"schema": SCHEMA, "params": params.to_dict()}
    doc.update(profile.to_dict())
    doc["n_samples"] = int(len(profile.samples.ts))
    if verdict is not None:
        doc["singularity"] = verdict
    _write(args, jsonio.dumps(doc))
    return 0


def _cmd_best_constant(args) -> int:
    params = _build_params(args)
    if args.method == "numerical":
        result, mres = best_constant_numerical(params, L=args.grid_L, h=args.grid_h)
        doc = {
            "schema": SCHEMA,
            "params": params.to_dict(),
            "phi": result.phi,
            "S_rad": result.S_rad,
            "source": result.source.value,
            "L": float(args.grid_L),
            "h": float(args.grid_h),
            "iterations": int(mres.iterations),
        }
    else:
        result = phi_closed_form(params)
        doc = {
            "schema": SCHEMA,
            "params": params.to_dict(),
            "phi": result.phi,
            "S_rad": result.S_rad,
            "source": result.source.value,
        }
    _write(args, jsonio.dumps(doc))
    return 0


def _cmd_verify(args) -> int:
    if args.manifest is not None:
        try:
            with open(args.manifest, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise _UsageError(f"cannot read manifest {args.manifest}: {exc}")
        cases = doc.get("cases") if isinstance(doc, dict) else doc
        if not isinstance(cases, list):
            raise _UsageError("manifest must be a JSON list or an object with a 'cases' list")
        records = []
        grid = QuadratureGrid.build(T=args.T)
        for case in cases:
            ident = IdentityId(case["identity"])
            fname = case["function"]
            if fname not in TEST_FUNCTIONS:
                raise _UsageError(f"unknown test function {fname!r} in manifest")
            rec = {
                "identity": ident.value,
                "function": fname,
                "n": int(case["n"]),
                "alpha": float(case["alpha"]),
            }
            report = verify_identity(
                ident, TEST_FUNCTIONS[fname], int(case["n"]), float(case["alpha"]),
                float(case.get("lambda", 0.0)), float(case.get("mu", 0.0)), grid,
            )
            rec["status"] = "ok"
            rec.update(report.to_dict())
            records.append(rec)
    else:
        records = run_identity_suite()

    worst = 0.0
    n_ok = 0
    n_skipped = 0
    for rec in records:
        if rec["status"] == "ok":
            n_ok += 1
            worst = max(worst, record_deviation(rec))
        else:
            n_skipped += 1
    doc = {
        "schema": SCHEMA,
        "n_ok": n_ok,
        "n_skipped": n_skipped,
        "worst_rel_err": worst,
        "tolerance": args.tolerance,
        "reports": records,
    }
    _write(args, jsonio.dumps(doc))
    if n_ok == 0:
        raise ConvergenceError("verification suite produced no successful checks")
    if worst > args.tolerance:
        raise ConvergenceError(
            f"worst relative identity error {worst:.3e} exceeds tolerance {args.tolerance:.3e}"
        )
    return 0


def _parse_vary(specs: Sequence[str]) -> List:
    if not specs:
        raise _UsageError("sweep requires at least one --vary name=start:stop:count")
    if len(specs) > 2:
        raise _UsageError("sweep supports at most two --vary axes")
    axes = []
    allowed = {"n", "alpha", "beta", "p", "lambda", "mu", "a"}
    for spec in specs:
        if "=" not in spec:
            raise _UsageError(f"malformed --vary {spec!r}; expected name=start:stop:count")
        name, _, rng = spec.partition("=")
        name = name.strip()
        if name not in allowed:
            raise _UsageError(f"cannot vary {name!r}; choose from {sorted(allowed)}")
        parts = rng.split(":")
        if len(parts) != 3:
            raise _UsageError(f"malformed --vary range {rng!r}; expected start:stop:count")
        try:
            start, stop = float(parts[0]), float(parts[1])
            count = int(parts[2])
        except ValueError as exc:
            raise _UsageError(f"malformed --vary range {rng!r}: {exc}")
        if count < 1:
            raise _UsageError(f"--vary count must be >= 1, got {count}")
        values = np.linspace(start, stop, count)
        if name == "n":
            ints = np.round(values)
            if np.any(np.abs(ints - values) > 1e-9):
                raise _UsageError("--vary n requires integer grid values")
            values = ints
        axes.append((name, values))
    total = 1
    for _, values in axes:
        total *= len(values)
    if total > 10_000:
        raise _UsageError(f"sweep grid has {total} points, exceeding the cap of 10000")
    if total == 0:
        raise _UsageError("sweep grid is empty")
    return axes


def _sweep_point(command: str, args, overrides: Dict[str, float]) -> Dict:
    row: Dict[str, object] = dict(overrides)
    try:
        flat = argparse.Namespace(**vars(args))
        for key, val in overrides.items():
            if key == "lambda":
                flat.lam = val
            elif key == "p":
                flat.p_exp = val
            elif key == "n":
                flat.n = int(val)
            elif key == "a":
                flat.a = val
            else:
                setattr(flat, key, val)
        params = _build_params(flat)
        if command == "info":
            coeff = derive_coefficients(params)
            report = check_conditions(params)
            row.update({
                "K2": coeff.K2, "K0": coeff.K0, "l": coeff.l,
            })
            row.update(report.to_dict())
        else:
            if flat.a is None:
                raise _UsageError("--a is required for orbit sweeps (fixed or varied)")
            orbit = find_periodic(float(flat.a), params, tol=args.tol)
            row.update(orbit.to_dict())
        row["error"] = ""
    except _UsageError:
        raise
    except Radial4Error as exc:
        row["error"] = _exit_code_for(exc)
    return row


def _cmd_sweep(args) -> int:
    if args.command not in ("info", "orbit"):
        raise _UsageError(f"sweep wraps 'info' or 'orbit', not {args.command!r}")
    axes = _parse_vary(args.vary)
    points: List[Dict[str, float]] = []
    if len(axes) == 1:
        name, values = axes[0]
        points = [{name: float(v)} for v in values]
    else:
        (n1, v1), (n2, v2) = axes
        points = [{n1: float(a), n2: float(b)} for a in v1 for b in v2]

    rows = [_sweep_point(args.command, args, pt) for pt in points]

    columns: List[str] = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    table = [[row.get(c) for c in columns] for row in rows]
    if args.format == "json":
        doc = {"schema": SCHEMA, "command": args.command, "columns": columns,
               "rows": [dict(zip(columns, r)) for r in table]}
        _write(args, jsonio.dumps(doc))
    else:
        _write(args, jsonio.write_csv(columns, table))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="radial4",
        description="Solvers and verifiers for a weighted fourth-order radial problem.",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    p_info = sub.add_parser("info", help="derived coefficients, eigenvalues, condition report")
    _add_param_flags(p_info)
    _add_output_flags(p_info, formats=("json",))
    p_info.set_defaults(fn=_cmd_info)

    p_exp = sub.add_parser("explicit", help="closed-form cosh profile when it exists")
    _add_param_flags(p_exp)
    _add_output_flags(p_exp)
    p_exp.add_argument("--curve", choices=("reduced", "radial"), default="reduced",
                       help="which profile to sample for CSV output")
    p_exp.set_defaults(fn=_cmd_explicit)

    p_orb = sub.add_parser("orbit", help="periodic orbit with prescribed minimum value")
    _add_param_flags(p_orb)
    _add_output_flags(p_orb)
    p_orb.add_argument("--a", type=float, default=None, help="orbit minimum value in (0, l)")
    p_orb.add_argument("--tol", type=float, default=1e-8, help="matching residual tolerance")
    p_orb.set_defaults(fn=_cmd_orbit)

    p_hom = sub.add_parser("homoclinic", help="even decaying zero-energy profile")
    _add_param_flags(p_hom)
    _add_output_flags(p_hom)
    p_hom.set_defaults(fn=_cmd_homoclinic)

    p_bc = sub.add_parser("best-constant", help="1-D infimum and radial best constant")
    _add_param_flags(p_bc)
    _add_output_flags(p_bc, formats=("json",))
    p_bc.add_argument("--method", choices=("closed-form", "numerical"), default="closed-form")
    p_bc.add_argument("--grid-L", type=float, default=40.0, dest="grid_L")
    p_bc.add_argument("--grid-h", type=float, default=0.01, dest="grid_h")
    p_bc.set_defaults(fn=_cmd_best_constant)

    p_ver = sub.add_parser("verify", help="run the weighted-identity suite")
    _add_output_flags(p_ver, formats=("json",))
    p_ver.add_argument("--manifest", type=str, default=None,
                       help="JSON manifest of cases; default runs the built-in suite")
    p_ver.add_argument("--T", type=float, default=40.0, help="quadrature half-width for manifests")
    p_ver.add_argument("--tolerance", type=float, default=1e-6,
                       help="worst acceptable relative identity error")
    p_ver.set_defaults(fn=_cmd_verify)

    p_sw = sub.add_parser("sweep", help="grid sweep wrapping info or orbit")
    p_sw.add_argument("command", choices=("info", "orbit"), help="command to run per grid point")
    _add_param_flags(p_sw)
    _add_output_flags(p_sw, formats=("csv", "json"))
    p_sw.add_argument("--a", type=float, default=None, help="orbit minimum (for orbit sweeps)")
    p_sw.add_argument("--tol", type=float, default=1e-8, help="orbit matching tolerance")
    p_sw.add_argument("--vary", action="append", default=[],
                      help="axis spec name=start:stop:count (repeat for a 2-D grid)")
    p_sw.set_defaults(fn=_cmd_sweep)
    p_sw.set_defaults(format="csv")

    return parser


def _exit_code_for(exc: Exception) -> int:
    if isinstance(exc, BracketError):
        return _EXIT_BRACKET
    if isinstance(exc, (ConvergenceError, BlowUpError, StepFailureError)):
        return _EXIT_CONVERGENCE
    if isinstance(exc, RegimeError):
        return _EXIT_REGIME
    if isinstance(exc, (ValidationError, DomainError, TailError)):
        return _EXIT_VALIDATION
    return _EXIT_VALIDATION


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help, 2 for usage problems; remap the latter.
        return 0 if exc.code in (0, None) else _EXIT_USAGE
    try:
        return args.fn(args)
    except _UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return _EXIT_USAGE
    except Radial4Error as exc:
        sys.stderr.write(f"error: {exc}\n")
        return _exit_code_for(exc)


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
