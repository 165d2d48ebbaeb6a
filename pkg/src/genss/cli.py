"""Command-line front end: solve, green, constants, circuit, verify, rod.

Every command prints a human-readable summary and can emit a JSON report
(fixed envelope, schema shipped with the package) plus CSV sweep files.
Exit codes: 0 success, 1 input error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from fractions import Fraction
from importlib import resources
from typing import List, Optional, Sequence

import numpy as np

from . import __version__
from .circuits import (CircuitSpec, CircuitSolution, Lightning, Switch,
                       rod_frequency, rod_rate, solve_lightning_rod,
                       rod_regularized_rhs, steady_state_current)
from .dsl import (parse_forcing, parse_operator, parse_scalar, render_dist,
                  render_operator, render_scalar)
from .errors import GenssError, ParseError
from .exactnum import CNum
from .genfunc import Dist
from .green import green_function
from .mollifier import MollifierSpec
from .oracle import (SweepConfig, estimate_constant, integrate_regularized,
                     numeric_eval_dist, verify_solution)
from .scalars import GenScalar, LAM
from .solver import IVProblem, Solution, has_distributional_solution, solve_ivp

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_VERIFY = 2

ROD_REL_TOL = 1e-6


def _empty_report(command: str) -> dict:
    return {
        "tool": "genss",
        "version": __version__,
        "command": command,
        "status": "ok",
        "problem": None,
        "solution": None,
        "solvability": None,
        "green": None,
        "constants": None,
        "verify": None,
        "circuit": None,
        "rod": None,
        "runtime_s": 0.0,
    }


def _pair(c) -> List[float]:
    z = complex(c)
    return [z.real, z.imag]


def _coeff_entries(solution: Solution) -> List[dict]:
    out = []
    for i, (value, cls) in enumerate(zip(solution.coefficients,
                                         solution.classifications), start=1):
        out.append({
            "name": f"c{i}",
            "value": render_scalar(value),
            "classification": cls.kind,
            "standard_part": _pair(cls.standard_part)
            if cls.standard_part is not None else None,
        })
    return out


def _solution_block(solution: Solution, latex: bool = True) -> dict:
    return {
        "text": render_dist(solution.dist),
        "latex": render_dist(solution.dist, "latex") if latex else None,
        "particular": render_dist(solution.particular),
        "coefficients": _coeff_entries(solution),
    }


def _solvability_block(problem: IVProblem) -> dict:
    ok, rep = has_distributional_solution(problem)
    return {
        "distributional": ok,
        "status": rep.status,
        "reason": rep.reason,
        "offending_order": rep.offending_order,
        "jump": _pair(rep.jump) if rep.jump is not None else None,
    }


def _verify_block(report) -> dict:
    rows = []
    for row in report.rows:
        rows.append({
            "eps": row.eps,
            "max_weighted_error": None if math.isnan(row.max_weighted_error)
            else row.max_weighted_error,
            "max_abs_error": None if math.isnan(row.max_abs_error)
            else row.max_abs_error,
            "runtime_s": row.runtime_s,
            "failure": row.failure,
        })
    order = report.fitted_order
    return {
        "passed": report.passed,
        "fitted_order": None if (order is None or not math.isfinite(order))
        else order,
        "cause": report.cause,
        "rows": rows,
    }


def _write_report(report: dict, path: Optional[str]) -> None:
    if path:
        with open(path, "w") as fh:
            json.dump(report, fh, indent=2)
        print(f"report written to {path}")


def _parse_sweep(text: Optional[str], quad_tol: float,
                 horizon: Optional[float] = None,
                 grid: Optional[int] = None) -> SweepConfig:
    kwargs = {"quad_tol": quad_tol}
    if text and text != "default":
        eps = tuple(float(p) for p in text.split(",") if p.strip())
        kwargs["eps_list"] = eps
    if horizon is not None:
        kwargs["horizon"] = horizon
    if grid is not None:
        kwargs["grid_points"] = grid
    return SweepConfig(**kwargs)


def _parse_excitation(text: str) -> object:
    parts = text.split(":")
    name = parts[0].strip().lower()
    if name == "switch":
        amp = parse_scalar(parts[1]) if len(parts) > 1 else GenScalar.from_value(1)
        return Switch(amp)
    if name == "lightning":
        if len(parts) < 2:
            raise ParseError("lightning requires an order, e.g. lightning:0", 0)
        order = int(parts[1])
        amp = parse_scalar(parts[2]) if len(parts) > 2 else GenScalar.from_value(1)
        return Lightning(order, amp)
    raise ParseError(f"unknown excitation {name!r}", 0,
                     ("switch[:A]", "lightning:n[:A]"))


def _load_config(path: Optional[str]) -> dict:
    if not path:
        return {}
    values = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError(f"bad config line {line!r}", 0)
            key, val = line.split("=", 1)
            values[key.strip()] = val.strip().strip('"')
    return values


# -- commands ------------------------------------------------------------------

def _cmd_solve(args) -> int:
    report = _empty_report("solve")
    problem = IVProblem(parse_operator(args.P), parse_forcing(args.f))
    solution = solve_ivp(problem)
    report["problem"] = {
        "operator": render_operator(problem.operator),
        "operator_coeffs_desc": [render_scalar(GenScalar.from_value(c))
                                 for c in reversed(problem.operator.coeffs)],
        "forcing": render_dist(problem.forcing),
        "circuit": None,
    }
    report["solution"] = _solution_block(solution)
    report["solvability"] = _solvability_block(problem)
    fmt = args.render or "text"
    print(f"P(d/dt) = {render_operator(problem.operator)}")
    print(f"forcing  = {render_dist(problem.forcing)}")
    print(f"solution = {render_dist(solution.dist, fmt)}")
    for entry in report["solution"]["coefficients"]:
        print(f"  {entry['name']} = {entry['value']}  [{entry['classification']}]")
    verdict = report["solvability"]
    print(f"distributional: {str(verdict['distributional']).lower()}"
          f" ({verdict['reason']})")
    return EXIT_OK, report


def _cmd_green(args) -> int:
    report = _empty_report("green")
    op = parse_operator(args.P)
    gd = green_function(op)
    entries = []
    for n, const in enumerate(gd.constants):
        cls = const.classify()
        entries.append({
            "order": n,
            "value": render_scalar(const),
            "classification": cls.kind,
            "standard_part": _pair(cls.standard_part)
            if cls.standard_part is not None else None,
        })
    report["problem"] = {
        "operator": render_operator(op),
        "operator_coeffs_desc": [render_scalar(GenScalar.from_value(c))
                                 for c in reversed(op.coeffs)],
        "forcing": None,
        "circuit": None,
    }
    report["green"] = {
        "function": render_dist(gd.green),
        "constants": entries,
        "roots": [{"root": _pair(lam), "multiplicity": mult}
                  for lam, mult in gd.roots],
    }
    print(f"P(d/dt) = {render_operator(op)}")
    print(f"G = {render_dist(gd.green)}")
    for entry in entries:
        print(f"  G^({entry['order']})(0) = {entry['value']}"
              f"  [{entry['classification']}]")
    return EXIT_OK, report


def _cmd_constants(args) -> int:
    report = _empty_report("constants")
    op = parse_operator(args.P)
    gd = green_function(op)
    cfg = _parse_sweep(args.sweep, args.quad_tol)
    rows = []
    for n, const in enumerate(gd.constants):
        sweep = estimate_constant(const, cfg)
        rows.append({
            "order": n,
            "standard_part": _pair(sweep.standard_part),
            "fitted_order": sweep.fitted_order
            if math.isfinite(sweep.fitted_order) else None,
            "values": [{"eps": eps, "value": _pair(v)}
                       for eps, v in sweep.values],
        })
        print(f"G^({n})(0): standard part {sweep.standard_part:.6g}, "
              f"deviation order "
              f"{'exact' if not math.isfinite(sweep.fitted_order) else f'{sweep.fitted_order:.3f}'}")
        for eps, v in sweep.values:
            print(f"    eps={eps:<8g} value={v.real:+.10f}")
    report["problem"] = {
        "operator": render_operator(op),
        "operator_coeffs_desc": [render_scalar(GenScalar.from_value(c))
                                 for c in reversed(op.coeffs)],
        "forcing": None,
        "circuit": None,
    }
    report["constants"] = rows
    return EXIT_OK, report


def _cmd_circuit(args) -> int:
    report = _empty_report("circuit")
    excitation = _parse_excitation(args.V)
    preset = (args.preset or "").lower()
    if preset == "rod":
        return _run_rod(args, report, excitation)
    lam2 = None
    if preset == "rc":
        L = GenScalar.from_value(0)
        R = parse_scalar(args.R) if args.R else None
        C = parse_scalar(args.Cap) if args.Cap else None
    elif preset == "superconductivity":
        L = parse_scalar(args.L) if args.L else None
        R = GenScalar.from_value(0)
        C = parse_scalar(args.Cap) if args.Cap else None
    else:
        L = parse_scalar(args.L) if args.L else GenScalar.from_value(0)
        R = parse_scalar(args.R) if args.R else GenScalar.from_value(0)
        C = parse_scalar(args.Cap) if args.Cap else None
    if C is None or (preset == "rc" and R is None) or \
            (preset == "superconductivity" and L is None):
        raise ParseError("circuit needs L/R/Cap values for the chosen preset", 0)
    spec = CircuitSpec.make(L, R, C, excitation)
    result = steady_state_current(spec)
    report["problem"] = {
        "operator": render_operator(result.problem.operator),
        "operator_coeffs_desc": [render_scalar(GenScalar.from_value(c))
                                 for c in reversed(result.problem.operator.coeffs)],
        "forcing": render_dist(result.problem.forcing),
        "circuit": {
            "L": render_scalar(spec.inductance),
            "R": render_scalar(spec.resistance),
            "C": render_scalar(spec.capacitance),
            "excitation": args.V,
        },
    }
    report["solution"] = _solution_block(result.solution)
    report["solvability"] = _solvability_block(result.problem)
    report["circuit"] = {
        "regime": result.regime,
        "superconducting": result.superconducting,
        "lightning_rod": spec.lightning_rod,
        "within_printed_cases": result.within_printed_cases,
    }
    print(f"regime: {result.regime}"
          + (" (superconducting)" if result.superconducting else ""))
    print(f"I(t) = {render_dist(result.solution.dist, args.render or 'text')}")
    return EXIT_OK, report


def _rod_eps_list(args) -> List[float]:
    if args.eps:
        return [float(p) for p in str(args.eps).split(",") if p.strip()]
    return [1e-2, 1e-3]


def _run_rod(args, report: dict, excitation) -> int:
    if isinstance(excitation, Switch) or excitation.order != 0:
        raise ParseError("the lightning-rod path is defined for lightning:0", 0)
    amplitude = excitation.amplitude
    horizon = args.T or 1.0
    n_grid = args.grid or 50
    grid = list(np.linspace(0.0, horizon, n_grid))
    per_eps = []
    all_ok = True
    for eps in _rod_eps_list(args):
        rod, samples = solve_lightning_rod(amplitude, grid, eps,
                                           quad_tol=args.quad_tol)
        spec = MollifierSpec(eps=eps, quad_tol=args.quad_tol)
        ref = _integrate_rod(rod, spec, horizon, grid)
        formula = np.array([v for _, v in samples])
        scale = max(float(np.max(np.abs(ref))), 1e-30)
        mismatch = float(np.max(np.abs(formula - ref)) / scale)
        ok = bool(mismatch <= ROD_REL_TOL and abs(float(formula[0])) <= 1e-9)
        all_ok = all_ok and ok
        per_eps.append({
            "eps": eps,
            "rate": rod_rate(eps),
            "frequency": rod_frequency(eps),
            "sine_moment": rod.sine_moment(spec),
            "cosine_moment": rod.cosine_moment(spec),
            "max_rel_mismatch": mismatch,
            "passed": ok,
            "samples": [[float(t), float(v)] for t, v in samples],
        })
        print(f"eps={eps:g}: lam={rod_rate(eps):.4f} omega={rod_frequency(eps):.4f} "
              f"max rel mismatch={mismatch:.3e} -> {'ok' if ok else 'FAIL'}")
        if args.csv_dir:
            _rod_csv(args.csv_dir, eps, grid, ref, formula)
    report["command"] = "rod"
    report["rod"] = {"amplitude": render_scalar(amplitude), "per_eps": per_eps}
    if not all_ok:
        report["status"] = "verification-failed"
        return EXIT_VERIFY, report
    return EXIT_OK, report


def _integrate_rod(rod, spec: MollifierSpec, horizon: float,
                   grid: Sequence[float]) -> np.ndarray:
    from scipy.integrate import solve_ivp as scipy_ivp
    lam = rod_rate(spec.eps)
    amp = rod.amplitude_value(spec)

    def rhs(t, u):
        return [u[1],
                -2.0 * lam * u[1] - lam ** 4 * u[0]
                + amp * lam * lam * spec.phi_deriv(1, t)]

    eps = spec.eps
    out = np.zeros(len(grid))
    u = [0.0, 0.0]
    segments = [(0.0, eps, eps / 20.0), (eps, horizon, np.inf)]
    cursor = 0
    grid = sorted(grid)
    for a, b, max_step in segments:
        res = scipy_ivp(rhs, (a, b), u, method="DOP853", rtol=1e-11,
                        atol=1e-13, max_step=max_step, dense_output=True)
        if not res.success:
            raise GenssError(f"rod oracle integration failed: {res.message}")
        while cursor < len(grid) and grid[cursor] <= b + 1e-15:
            out[cursor] = res.sol(min(max(grid[cursor], a), b))[0]
            cursor += 1
        u = res.y[:, -1]
    return out


def _rod_csv(csv_dir: str, eps: float, grid, ref, formula) -> None:
    import csv as _csv
    os.makedirs(csv_dir, exist_ok=True)
    with open(os.path.join(csv_dir, f"rod_eps{eps:g}.csv"), "w",
              newline="") as fh:
        writer = _csv.writer(fh)
        writer.writerow(["t", "re_y_num", "re_y_sym", "abs_err", "weighted_err"])
        for t, r, s in zip(grid, ref, formula):
            err = abs(s - r)
            writer.writerow([f"{t:.12g}", f"{r:.15g}", f"{s:.15g}",
                             f"{err:.6e}", f"{err / (1.0 + abs(r)):.6e}"])


def _cmd_verify(args) -> int:
    report = _empty_report("verify")
    problem = IVProblem(parse_operator(args.P), parse_forcing(args.f))
    solution = solve_ivp(problem)
    cfg = _parse_sweep(args.sweep, args.quad_tol, args.T, args.grid)
    vrep = verify_solution(problem, solution, cfg, csv_dir=args.csv_dir)
    report["problem"] = {
        "operator": render_operator(problem.operator),
        "operator_coeffs_desc": [render_scalar(GenScalar.from_value(c))
                                 for c in reversed(problem.operator.coeffs)],
        "forcing": render_dist(problem.forcing),
        "circuit": None,
    }
    report["solution"] = _solution_block(solution)
    report["solvability"] = _solvability_block(problem)
    report["verify"] = _verify_block(vrep)
    for row in vrep.rows:
        msg = row.failure or f"max weighted err {row.max_weighted_error:.3e}"
        print(f"eps={row.eps:<8g} {msg}  ({row.runtime_s:.2f}s)")
    order_txt = ("n/a" if not math.isfinite(vrep.fitted_order)
                 else f"{vrep.fitted_order:.3f}")
    print(f"fitted order: {order_txt}; "
          f"{'PASS' if vrep.passed else 'FAIL: ' + vrep.cause}")
    if not vrep.passed:
        report["status"] = "verification-failed"
        return EXIT_VERIFY, report
    return EXIT_OK, report


def _cmd_rod(args) -> int:
    report = _empty_report("rod")
    excitation = Lightning(0, parse_scalar(args.A) if args.A
                           else GenScalar.from_value(1))
    return _run_rod(args, report, excitation)


# -- entry point ------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="genss",
        description="Steady-state solutions of impulsively forced "
                    "constant-coefficient ODEs over generalized scalars.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, forcing=False, sweep=False):
        p.add_argument("--config", help="flat key=value config file; flags win")
        p.add_argument("--out", help="write a JSON report here")
        p.add_argument("--render", choices=["text", "latex"])
        p.add_argument("--quad-tol", dest="quad_tol", type=float, default=None,
                       help="quadrature tolerance (env GENSS_QUADTOL)")
        if forcing:
            p.add_argument("--P", help="operator: 'a_k,...,a_0' or '(x+1)^2*(x^2+4)'")
            p.add_argument("--f", help="forcing expression, e.g. \"delta'\"")
        if sweep:
            p.add_argument("--sweep", help="'default' or comma list of eps")
            p.add_argument("--T", type=float, help="time horizon")
            p.add_argument("--grid", type=int, help="comparison grid points")
            p.add_argument("--csv-dir", dest="csv_dir",
                           help="emit per-eps CSV trajectories here")

    common(sub.add_parser("solve", help="solve and classify"), forcing=True)
    p_green = sub.add_parser("green", help="Green function and its constants")
    common(p_green)
    p_green.add_argument("--P")
    p_const = sub.add_parser("constants", help="eps sweep of the constants")
    common(p_const)
    p_const.add_argument("--P")
    p_const.add_argument("--sweep", help="'default' or comma list of eps")
    p_circ = sub.add_parser("circuit", help="LRC circuit presets")
    common(p_circ, sweep=True)
    p_circ.add_argument("--preset", choices=["rc", "superconductivity", "rod"])
    p_circ.add_argument("--V", help="switch[:A] or lightning:n[:A]")
    p_circ.add_argument("--L")
    p_circ.add_argument("--R")
    p_circ.add_argument("--Cap")
    p_circ.add_argument("--eps", help="rod only: comma list of scales")
    common(sub.add_parser("verify", help="solve and run the numeric oracle"),
           forcing=True, sweep=True)
    p_rod = sub.add_parser("rod", help="lightning-rod formula vs integration")
    common(p_rod, sweep=True)
    p_rod.add_argument("--eps", help="comma list of scales (default 1e-2,1e-3)")
    p_rod.add_argument("--A", help="amplitude (scalar expression)")
    return parser


_HANDLERS = {
    "solve": _cmd_solve,
    "green": _cmd_green,
    "constants": _cmd_constants,
    "circuit": _cmd_circuit,
    "verify": _cmd_verify,
    "rod": _cmd_rod,
}

_REQUIRED = {"solve": ("P", "f"), "green": ("P",), "constants": ("P",),
             "verify": ("P", "f"), "circuit": ("V",), "rod": ()}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    start = time.perf_counter()
    try:
        config = _load_config(args.config)
        for key, value in config.items():
            attr = key.replace("-", "_")
            if hasattr(args, attr) and getattr(args, attr) in (None, False):
                setattr(args, attr, value)
        if args.quad_tol is None:
            args.quad_tol = float(os.environ.get("GENSS_QUADTOL", "1e-10"))
        missing = [name for name in _REQUIRED[args.command]
                   if not getattr(args, name, None)]
        if missing:
            print(f"error: missing required option(s): "
                  + ", ".join(f"--{m}" for m in missing), file=sys.stderr)
            return EXIT_INPUT
        code, report = _HANDLERS[args.command](args)
        report["runtime_s"] = time.perf_counter() - start
        _write_report(report, args.out)
        return code
    except (GenssError, ValueError, OSError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
