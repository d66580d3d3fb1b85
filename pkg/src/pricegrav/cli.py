"""Batch command line: ``pricegrav <command> SCENARIO... [options]``.

Exit codes: 0 success, 2 parse/validation failure, 3 model or numerical
failure, 4 solver did not converge (results are still written).
"""

import argparse
import json
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, Optional

import numpy as np

from .calibrate import ShootOptions, shoot
from .dynamics import default_steps, integrate_rk4, verify_rk4
from .errors import NegativeEntry, PriceGravError
from .model import solve_steady_state, validate
from .scenario import ScenarioError, load_scenario
from .spectral import perron_eigenpair

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_MODEL = 3
EXIT_SOLVER = 4

COMMANDS = ("spectral", "steady", "simulate", "calibrate", "verify")


@dataclass
class RunOutput:
    code: int = EXIT_OK
    report: Optional[dict] = None
    error: Optional[dict] = None
    files: Dict[str, str] = field(default_factory=dict)


class ModelFailure(Exception):
    """Maps to exit code 3."""


def _num(x):
    return format(float(x), ".17g")


def trajectory_csv(traj):
    n = traj.prices.shape[1]
    lines = [",".join(["t"] + [f"P_{i + 1}" for i in range(n)])]
    for t, row in zip(traj.times, traj.prices):
        lines.append(",".join([_num(t)] + [_num(x) for x in row]))
    return "\n".join(lines) + "\n"


def _dumps(obj):
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _error_line(obj):
    return json.dumps(obj, allow_nan=False) + "\n"


class _JsonArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_PARSE, _error_line({"error": message, "kind": "parse"}))


def _floats(arr):
    return [float(x) for x in np.asarray(arr).reshape(-1)]


def _solver_overrides(scn, opts):
    cfg = replace(scn.solver)
    if opts.get("steps") is not None:
        cfg.steps = opts["steps"]
    if opts.get("tol") is not None:
        cfg.tol = opts["tol"]
    if opts.get("stride") is not None:
        cfg.stride = opts["stride"]
    if opts.get("no_damping"):
        cfg.damping = False
    return cfg


def _rates(scn, opts, n):
    if opts.get("rates") is not None:
        try:
            V = np.array([float(x) for x in opts["rates"].split(",")])
        except ValueError as exc:
            raise ScenarioError(f"--rates must be comma-separated numbers: {exc}", "rates")
        if V.size != n or not np.all(np.isfinite(V)):
            raise ScenarioError(f"--rates must give {n} finite numbers", "rates")
        return V
    return scn.vector("V", n)


def _target(scn, model):
    spec = scn.p_star_spec(model.n)
    if isinstance(spec, str):
        return solve_steady_state(model).p_star
    return spec


def _warnings(model):
    return validate(model).violations


def cmd_spectral(scn, opts):
    try:
        res = perron_eigenpair(scn.A, allow_reducible=True)
    except NegativeEntry as exc:
        raise ScenarioError(str(exc), "economy.A") from exc
    report = {
        "rho": res.rho,
        "perron_vector": _floats(res.perron_vector),
        "irreducible": res.irreducible,
        "positive": res.positive,
        "max_profit_rate": res.max_profit_rate,
        "iterations": res.iterations,
    }
    if not res.irreducible:
        report["warning"] = "A is reducible; the Perron vector may have zero entries"
    return RunOutput(report=report)


def cmd_steady(scn, opts):
    model = scn.model()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        ss = solve_steady_state(model)
    report = {
        "p_star": _floats(ss.p_star),
        "wage_used": ss.wage_used,
        "normalization_residual": ss.normalization_residual,
    }
    notes = [str(w.message) for w in caught] + _warnings(model)
    if notes:
        report["warnings"] = notes
    return RunOutput(report=report)


def cmd_simulate(scn, opts):
    model = scn.model()
    n = model.n
    V = _rates(scn, opts, n)
    P0 = scn.vector("P0", n)
    f = scn.forcing(n)
    cfg = _solver_overrides(scn, opts)
    steps = cfg.steps if cfg.steps is not None else default_steps(model, V)
    state, traj = integrate_rk4(model, V, P0, f, steps=steps, stride=cfg.stride)
    target = _target(scn, model)
    report = {
        "P_at_T": _floats(state.prices),
        "distance_to_p_star": None if target is None
        else float(np.abs(state.prices - target).max()),
        "steps": steps,
        "stride": cfg.stride,
    }
    return RunOutput(report=report, files={f"{scn.name}.trajectory.csv": trajectory_csv(traj)})


def cmd_calibrate(scn, opts):
    model = scn.model()
    n = model.n
    P0 = scn.vector("P0", n)
    target = _target(scn, model)
    if target is None:
        raise ScenarioError("missing field 'p_star'", "p_star")
    cfg = _solver_overrides(scn, opts)
    sopts = ShootOptions(tol=cfg.tol, max_iter=cfg.max_iter, damping=cfg.damping,
                         steps=cfg.steps, stride=cfg.stride)
    res = shoot(model, P0, target, scn.forcing(n), scn.v0(n), sopts)
    report = {
        "v_solution": _floats(res.v_solution),
        "converged": res.converged,
        "viable": res.viable,
        "iterations": res.iterations,
        "residual_history": [float(g) if np.isfinite(g) else None for g in res.residual_history],
        "failure_reason": res.failure_reason.value,
        "steps": res.steps,
        "p_star": _floats(target),
        "P_at_T": None if res.prices_at_T is None else _floats(res.prices_at_T),
    }
    notes = _warnings(model)
    if notes:
        report["warnings"] = notes
    files = {}
    if res.final_trajectory is not None:
        files[f"{scn.name}.trajectory.csv"] = trajectory_csv(res.final_trajectory)
    return RunOutput(code=EXIT_OK if res.converged else EXIT_SOLVER, report=report, files=files)


def cmd_verify(scn, opts):
    model = scn.model()
    n = model.n
    V = _rates(scn, opts, n)
    P0 = scn.vector("P0", n)
    f = scn.forcing(n)
    if f is not None and not f.is_constant:
        raise ModelFailure("closed-form oracle unavailable: forcing is not constant")
    cfg = _solver_overrides(scn, opts)
    rep = verify_rk4(model, V, P0, f, steps=cfg.steps)
    report = {
        "reference": rep.reference,
        "discrepancy": rep.discrepancy,
        "order_estimate": rep.order_estimate,
        "order_steps": None if rep.order_steps is None else list(rep.order_steps),
        "steps": rep.steps,
        "P_at_T": _floats(rep.prices_rk4),
        "P_reference": _floats(rep.prices_reference),
    }
    return RunOutput(report=report)


HANDLERS = {
    "spectral": cmd_spectral,
    "steady": cmd_steady,
    "simulate": cmd_simulate,
    "calibrate": cmd_calibrate,
    "verify": cmd_verify,
}


def run_one(command, path, opts):
    """Run one command on one scenario file; never raises."""
    try:
        scn = load_scenario(path)
        out = HANDLERS[command](scn, opts)
    except ScenarioError as exc:
        return RunOutput(code=EXIT_PARSE, error={**exc.to_dict(), "scenario": str(path)})
    except (ModelFailure, PriceGravError) as exc:
        return RunOutput(code=EXIT_MODEL, error={"error": str(exc), "kind": "model",
                                                 "type": type(exc).__name__,
                                                 "scenario": str(path)})
    except ValueError as exc:
        return RunOutput(code=EXIT_PARSE, error={"error": str(exc), "kind": "parse",
                                                 "scenario": str(path)})
    out.report = {"name": scn.name, "command": command, **out.report}
    if out.code == EXIT_SOLVER:
        out.error = {"error": "solver did not converge", "kind": "solver",
                     "failure_reason": out.report.get("failure_reason"),
                     "scenario": str(path)}
    return out


def build_parser():
    parser = _JsonArgumentParser(
        prog="pricegrav",
        description="Calibrate differentiation rates and analyse input-output price dynamics.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("scenarios", nargs="+", metavar="scenario.json")
    parser.add_argument("--out", type=Path, default=None,
                        help="directory for CSV/JSON outputs (CSV defaults to the current one)")
    parser.add_argument("--steps", type=int, default=None, help="RK4 steps over [0, T]")
    parser.add_argument("--tol", type=float, default=None, help="Newton tolerance on |G|_inf")
    parser.add_argument("--stride", type=int, default=None, help="trajectory recording stride")
    parser.add_argument("--no-damping", action="store_true", help="take bare Newton steps")
    parser.add_argument("--rates", default=None,
                        help="comma-separated rates V for simulate/verify (overrides scenario)")
    parser.add_argument("--jobs", type=int, default=1, help="scenario files run in parallel")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    for flag in ("steps", "stride", "jobs"):
        value = getattr(args, flag)
        if value is not None and value < 1:
            sys.stderr.write(_error_line({"error": f"--{flag} must be >= 1", "kind": "parse"}))
            return EXIT_PARSE
    if args.tol is not None and not args.tol > 0:
        sys.stderr.write(_error_line({"error": "--tol must be positive", "kind": "parse"}))
        return EXIT_PARSE
    opts = {k: getattr(args, k) for k in ("steps", "tol", "stride", "no_damping", "rates")}

    jobs = [(args.command, p, opts) for p in args.scenarios]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(run_one, *zip(*jobs)))
    else:
        results = [run_one(*job) for job in jobs]

    code = EXIT_OK
    for out in results:
        if out.report is not None:
            text = _dumps(out.report)
            sys.stdout.write(text)
            files = dict(out.files)
            if args.out is not None:
                files[f"{out.report['name']}.{args.command}.json"] = text
            if files:
                target = args.out or Path(".")
                target.mkdir(parents=True, exist_ok=True)
                for fname, content in files.items():
                    (target / fname).write_text(content)
        if out.error is not None:
            sys.stderr.write(_error_line(out.error))
        code = max(code, out.code)
    return code


if __name__ == "__main__":
    sys.exit(main())
