"""Command-line entry point.

Exit codes: 0 decisive result, 2 input error, 3 undetermined, 4 incompatible
right-hand side.
"""
from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

import numpy as np

from . import io as vio
from .classifiers import Status, analyze
from .diophantine import (
    cf_expand,
    irrationality_exponent_estimate,
    non_liouville_certificate,
    small_divisor_scan,
)
from .discriminant import ScanConfig, dc_scan, scan_rows
from .fields import CoefficientField
from .obstruction import (
    build_case1_conditions,
    decay_report,
    diagnostics_rows,
    find_slow_sequence,
    build_case2_witness,
)
from .operator import PRESETS, VekuaOperator, preset
from .scalar import GaussianRational
from .solver import GridError, grid_nodes, solve, solve_grid

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_UNDETERMINED = 3
EXIT_INCOMPATIBLE = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits with 2 as well; keep one path
        raise UsageError(message)


def _grid_arg(text: str) -> tuple[int, ...]:
    try:
        sizes = tuple(int(s) for s in text.split(","))
    except ValueError:
        raise vio.SpecError("--grid", f"expected N1,N2,..., got {text!r}") from None
    for s in sizes:
        if s < 1 or s % 2 == 0:
            raise vio.SpecError("--grid", f"grid size {s} must be a positive odd integer")
    return sizes


def _add_operator_args(p: argparse.ArgumentParser, spec_required: bool = False):
    p.add_argument("spec", nargs=None if spec_required else "?", help="operator spec JSON")
    p.add_argument("--preset", choices=sorted(PRESETS), help="build the operator from a named family")
    p.add_argument("--dim", type=int, default=1, help="spatial dimension for presets")
    p.add_argument("--eta", help="eta spec: rational:p/q, sqrt:d, decimal:<digits>, liouville:b,K, e, pi")
    p.add_argument("--C", help="vector-field coefficient re,im or an eta-style spec")
    p.add_argument("--A", help="zero-order coefficient re,im")
    p.add_argument("--B", help="conjugate coefficient re,im")
    p.add_argument("--backend", choices=["exact", "float"], help="force an arithmetic backend")
    p.add_argument("--out", help="output path (written atomically)")


def _load_operator(args) -> tuple[VekuaOperator, Optional[object]]:
    eta = vio.parse_eta(args.eta, "--eta") if getattr(args, "eta", None) else None
    if args.preset:
        A = vio.parse_pair_arg(args.A, "--A") if args.A else GaussianRational(0)
        B = vio.parse_pair_arg(args.B, "--B") if args.B else GaussianRational(0)
        kw = {"dim": args.dim, "A": A, "B": B}
        if eta is not None:
            kw["eta"] = eta
        if args.C:
            kw["C"] = vio.parse_eta(args.C, "--C") if ":" in args.C else vio.parse_pair_arg(args.C, "--C")
        try:
            P = preset(args.preset, **kw)
        except (ValueError, TypeError) as exc:
            raise vio.SpecError("--preset", str(exc)) from None
    elif args.spec:
        P, spec_eta = vio.parse_operator(vio.load_json(args.spec), args.spec)
        eta = eta or spec_eta
    else:
        raise vio.SpecError("spec", "give a spec file or --preset")
    if args.backend == "exact" and not P.exact:
        raise vio.SpecError("--backend", "exact backend requires rational coefficients")
    if args.backend == "float":
        P = P.to_float()
    return P, eta


def _emit(args, payload, text: Optional[str] = None):
    text = text if text is not None else vio.dumps(payload)
    if args.out:
        vio.write_atomic(args.out, text)
    else:
        sys.stdout.write(text)


# commands ------------------------------------------------------------------------------


def cmd_analyze(args) -> int:
    P, eta = _load_operator(args)
    v = analyze(P, args.radius, eta=eta)
    _emit(args, {"operator": vio.operator_to_json(P), "verdict": v.to_dict()})
    return EXIT_OK if v.decisive else EXIT_UNDETERMINED


def _sample_field(f: CoefficientField, shape) -> np.ndarray:
    nodes = np.meshgrid(*grid_nodes(shape), indexing="ij")
    out = np.zeros(shape, dtype=complex)
    for xi, c in f.items():
        phase = sum(k * x for k, x in zip(xi, nodes))
        out += complex(c) * np.exp(1j * phase)
    return out


def cmd_solve(args) -> int:
    P, _ = _load_operator(args)
    data = vio.load_json(args.rhs)
    grid = _grid_arg(args.grid) if args.grid else None
    payload = {}
    if isinstance(data, dict) and "shape" in data:
        samples = vio.parse_grid(data, args.rhs)
        if grid is not None and tuple(samples.shape) != grid:
            raise vio.SpecError("--grid", f"does not match rhs shape {list(samples.shape)}")
        res = solve_grid(P, samples)
        outcome = res.outcome
        payload["grid"] = vio.grid_to_json(res.values)
    else:
        f = vio.parse_field(data, args.rhs)
        if f.dim != P.dim:
            raise vio.SpecError(args.rhs, f"field dimension {f.dim} != operator dimension {P.dim}")
        if grid is not None:
            res = solve_grid(P, _sample_field(f, grid), grid)
            outcome = res.outcome
            payload["grid"] = vio.grid_to_json(res.values)
        else:
            outcome = solve(P, f)
    payload["outcome"] = vio.outcome_to_json(outcome)
    _emit(args, payload)
    if not outcome.compatible:
        bad = ", ".join(str(list(x)) for x in outcome.incompatible)
        sys.stderr.write(f"incompatible right-hand side at pairs: {bad}\n")
        return EXIT_INCOMPATIBLE
    return EXIT_OK


def cmd_scan(args) -> int:
    if args.radius < 4:
        raise vio.SpecError("--radius", "scan radius must be >= 4")
    P, _ = _load_operator(args)
    report = dc_scan(P, args.radius, ScanConfig(drift_tolerance=args.drift_tolerance))
    summary = report.to_dict()
    if args.out and args.out.endswith(".csv"):
        header, rows = scan_rows(report)
        vio.write_atomic(args.out, vio.csv_text(header, rows))
        sys.stdout.write(vio.dumps(summary))
    else:
        _emit(args, summary)
    return EXIT_OK


def cmd_counterexample(args) -> int:
    P, _ = _load_operator(args)
    if not P.exact:
        raise vio.SpecError("spec", "witnesses need exact (rational) coefficients")
    R = args.radius
    payload = {"operator": vio.operator_to_json(P), "radius": R}
    # zero sets are enumerated over the full ball, so cap the box size
    r1 = args.case1_radius or min(R, 0.5 * (2e5 ** (1.0 / P.dim)))
    conds = build_case1_conditions(P, r1)
    half = build_case1_conditions(P, r1 / 2)
    payload["case1"] = {
        "radius": r1,
        "conditions": len(conds),
        "conditions_at_half_radius": len(half),
        "pairs": [list(c.xi) for c in conds],
    }
    decisive = len(conds) > len(half)
    seq = find_slow_sequence(P, R)
    payload["slow_sequence"] = [
        {"xi": list(t.xi), "abs_delta": t.abs_delta, "log_abs_delta": t.log_abs_delta, "level": t.level}
        for t in seq.terms
    ]
    if seq.terms:
        w = build_case2_witness(P, seq.frequencies)
        w.flags.extend(seq.flags)
        u_side = w.induced_u_hat.restrict(w.frequencies)
        payload["case2"] = {
            "witness": vio.witness_to_json(w),
            "decay_f": vio.decay_to_json(decay_report(w.f_hat)),
            "decay_u": vio.decay_to_json(decay_report(u_side)),
        }
        decisive = True
        if args.diagnostics:
            header, rows = diagnostics_rows(w)
            vio.write_atomic(args.diagnostics, vio.csv_text(header, rows))
    _emit(args, payload)
    return EXIT_OK if decisive else EXIT_UNDETERMINED


def cmd_diophantine(args) -> int:
    if not args.eta:
        raise vio.SpecError("--eta", "required")
    x = vio.parse_eta(args.eta, "--eta")
    cf = cf_expand(x, args.depth)
    payload = {"eta": str(x), "continued_fraction": cf.to_dict()}
    try:
        payload["exponent"] = irrationality_exponent_estimate(cf).to_dict()
    except ValueError as exc:
        payload["exponent"] = {"error": str(exc)}
    payload["certificate"] = non_liouville_certificate(x, max(args.depth, 64)).to_dict()
    if args.gamma0 is not None:
        payload["small_divisors"] = small_divisor_scan(x, args.radius, args.gamma0).to_dict()
    _emit(args, payload)
    return EXIT_OK


def cmd_presets(args) -> int:
    payload = {
        "laplace": {"params": ["dim"], "torus_dim": "dim"},
        "heat": {"params": ["dim", "eta"], "torus_dim": "dim + 1 (coordinate 0 is time)"},
        "wave": {"params": ["dim", "eta"], "torus_dim": "dim + 1 (coordinate 0 is time)"},
        "vector_field": {"params": ["C"], "torus_dim": "2"},
    }
    _emit(args, payload)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="vekua", description="Vekua-type periodic operators: analysis and solvers.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="solvability / global hypoellipticity verdict")
    _add_operator_args(a)
    a.add_argument("--radius", type=float, default=64.0)
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("solve", help="solve Pu = f (coefficients or odd grid)")
    _add_operator_args(s)
    s.add_argument("rhs", help="right-hand side: coefficient field or grid JSON")
    s.add_argument("--grid", help="odd grid sizes N1,N2,...")
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("scan", help="finite-box Diophantine scan")
    _add_operator_args(c)
    c.add_argument("--radius", type=float, default=64.0)
    c.add_argument("--drift-tolerance", type=float, default=0.1)
    c.set_defaults(func=cmd_scan)

    w = sub.add_parser("counterexample", help="non-solvability witnesses")
    _add_operator_args(w)
    w.add_argument("--radius", type=float, default=1000.0)
    w.add_argument("--case1-radius", type=float, help="radius for zero-set enumeration")
    w.add_argument("--diagnostics", help="CSV path for norm, abs_f, abs_u")
    w.set_defaults(func=cmd_counterexample)

    d = sub.add_parser("diophantine", help="continued fractions and small divisors")
    d.add_argument("--eta", required=False)
    d.add_argument("--depth", type=int, default=30)
    d.add_argument("--radius", type=float, default=200.0)
    d.add_argument("--gamma0", type=float)
    d.add_argument("--out")
    d.set_defaults(func=cmd_diophantine)

    r = sub.add_parser("presets", help="list operator presets")
    r.add_argument("--out")
    r.set_defaults(func=cmd_presets)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"vekua: {exc}\n")
        return EXIT_INPUT
    except (vio.SpecError, GridError) as exc:
        sys.stderr.write(f"vekua: input error: {exc}\n")
        return EXIT_INPUT
    except ValueError as exc:
        sys.stderr.write(f"vekua: input error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
