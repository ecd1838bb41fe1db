"""``ctq`` command-line front end.

Exit codes: 0 ok, 1 verification failure, 2 invalid input, 3 analytic optimum
unsupported for the state, 4 internal cross-check failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from .analytic import pmax_analytic
from .errors import CaseMismatch, ConsistencyError, DomainError, UnsupportedGeneralCase, ValidationError
from .numeric import OptimizerConfig, pmax_numeric
from .objective import MeasurementBasis, inject_expansion_fault, success_probability
from .protocol import MessageQubit, run_protocol
from .serialize import dumps, fmt_float
from .state import _FORCED_ZEROS, NORM_TOL, Case, classify, state_from_json, validate
from .verify import VerifyCounts, run_verify

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_UNSUPPORTED, EXIT_CROSS = 0, 1, 2, 3, 4
DEFAULT_SEED = 42
SWEEP_HEADER = ["params", "case", "pmax_analytic", "pmax_numeric", "delta", "theta_opt", "phi_opt"]


class InputError(Exception):
    pass


class CrossCheckFailed(Exception):
    def __init__(self, payload):
        super().__init__("analytic and numeric optima disagree")
        self.payload = payload


def _load_json(text: str):
    src = text
    if not text.lstrip().startswith(("{", "[")):
        try:
            src = Path(text).read_text()
        except OSError as exc:
            raise InputError(f"cannot read {text!r}: {exc}") from exc
    try:
        return json.loads(src)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc}") from exc


def _state(args):
    return state_from_json(_load_json(args.state), normalize=args.normalize, zero_tol=args.zero_tol)


def _complex(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    raise InputError(f"complex amplitude must be a number or [re, im], got {v!r}")


def _message(text: str) -> MessageQubit:
    obj = _load_json(text)
    try:
        return MessageQubit(_complex(obj["alpha"]), _complex(obj["beta"]))
    except (KeyError, TypeError) as exc:
        raise InputError(f"message must look like {{\"alpha\": [re, im], \"beta\": [re, im]}}: {exc}") from exc


def _basis(text: str) -> MeasurementBasis:
    obj = _load_json(text)
    try:
        return MeasurementBasis(float(obj["theta"]), float(obj["phi"]))
    except (KeyError, TypeError) as exc:
        raise InputError(f"basis must look like {{\"theta\": t, \"phi\": p}}: {exc}") from exc


def _cfg(args) -> OptimizerConfig:
    return OptimizerConfig(grid_theta=args.grid_theta, grid_phi=args.grid_phi, threads=args.threads)


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("CTQ_SEED")
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise InputError(f"CTQ_SEED must be an integer, got {env!r}") from exc
    return DEFAULT_SEED


def cmd_classify(args):
    s = _state(args)
    label = classify(s, args.zero_tol)
    return {"case": label.case.value, "zero_pattern": label.zero_amplitudes, "mu_class": label.mu_class}


def cmd_pmax(args):
    s = _state(args)
    out = {"state": s.to_json()}
    if args.method in ("analytic", "both"):
        out["analytic"] = pmax_analytic(s, args.zero_tol).to_json()
    if args.method in ("numeric", "both"):
        out["numeric"] = pmax_numeric(s, _cfg(args), args.zero_tol).to_json()
    if args.method == "both":
        delta = abs(out["analytic"]["pmax"] - out["numeric"]["pmax"])
        out["delta"] = delta
        out["cross_tol"] = args.cross_tol
        if delta > args.cross_tol:
            raise CrossCheckFailed(out)
    return out


def _parse_range(text: str):
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return float(parts[0])
        if len(parts) == 2:
            return (float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise InputError(f"bad parameter value {text!r}; use a number or lo:hi")


def parse_family(text: str, points: int):
    """Family as JSON ``{"case", "params", "points"}`` or compact ``CASE:name=lo:hi,name=value``."""
    if text.lstrip().startswith("{"):
        obj = _load_json(text)
        try:
            case_name, raw = obj["case"], obj.get("params", {})
            points = int(obj.get("points", points))
            params = {
                k: tuple(float(x) for x in v) if isinstance(v, (list, tuple)) else float(v)
                for k, v in raw.items()
            }
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise InputError(f"bad family spec: {exc}") from exc
    else:
        case_name, _, rest = text.partition(":")
        params = {}
        for item in filter(None, rest.split(",")):
            name, eq, val = item.partition("=")
            if not eq:
                raise InputError(f"bad family parameter {item!r}; expected name=value")
            params[name.strip()] = _parse_range(val.strip())
    try:
        case = Case(case_name)
    except ValueError as exc:
        raise InputError(f"unknown case {case_name!r}") from exc
    if case is Case.DEGENERATE_PRODUCT:
        raise InputError("DegenerateProduct has no single parametrization; pick a concrete case")
    allowed = {f"a{i}sq" for i in range(5) if i not in _FORCED_ZEROS[case]} | {"mu"}
    unknown = set(params) - allowed
    if unknown:
        raise InputError(f"parameters {sorted(unknown)} not free in case {case.value}; use {sorted(allowed)}")
    sweeps = [k for k, v in params.items() if isinstance(v, tuple)]
    if not 1 <= len(sweeps) <= 2:
        raise InputError("a family sweeps one or two parameters")
    if points < 1:
        raise InputError("points must be positive")
    return case, params, sweeps, points


def _family_states(case, params, sweeps, points):
    free = [f"a{i}" for i in range(5) if i not in _FORCED_ZEROS[case]]
    axes = [np.linspace(*params[k], points) for k in sweeps]
    for combo in itertools.product(*axes):
        vals = {**params, **dict(zip(sweeps, (float(x) for x in combo)))}
        label = ";".join(f"{k}={fmt_float(v)}" for k, v in vals.items())
        mu = vals.pop("mu", {Case.J_MUPI: math.pi, Case.GENERAL_FULL: math.pi / 2}.get(case, 0.0))
        sq = {k[:-2]: v for k, v in vals.items()}
        rest = [n for n in free if n not in sq]
        remaining = 1.0 - math.fsum(sq.values())
        if rest:
            sq.update({n: remaining / len(rest) for n in rest})
        elif abs(remaining) > NORM_TOL:
            raise InputError(f"squared amplitudes {vals} do not sum to 1")
        if min(sq.values()) < 0:
            raise InputError(f"squared amplitudes {vals} leave a negative remainder")
        a = [math.sqrt(sq.get(f"a{i}", 0.0)) for i in range(5)]
        yield label, validate(a, mu)


def cmd_sweep(args):
    case, params, sweeps, points = parse_family(args.family, args.points)
    cfg = _cfg(args)
    rows = []
    for label, s in _family_states(case, params, sweeps, points):
        lab = classify(s, args.zero_tol)
        try:
            pa = pmax_analytic(s, args.zero_tol).pmax
        except UnsupportedGeneralCase:
            pa = None
        num = pmax_numeric(s, cfg, args.zero_tol)
        bp = num.best_points[0]
        rows.append({
            "params": label,
            "case": lab.case.value,
            "pmax_analytic": pa,
            "pmax_numeric": num.pmax,
            "delta": None if pa is None else abs(pa - num.pmax),
            "theta_opt": bp.theta,
            "phi_opt": bp.phi,
        })
    return rows


def cmd_simulate(args):
    s = _state(args)
    b = _basis(args.basis)
    m = _message(args.message)
    trace = run_protocol(s, b, m)
    formula = success_probability(s, b)
    out = trace.to_json()
    out["success_probability_formula"] = formula
    out["formula_delta"] = abs(trace.total_success_probability - formula)
    out["formula_agrees"] = out["formula_delta"] <= 1e-10
    return out


def cmd_verify(args):
    counts = VerifyCounts(args.samples, args.states, args.protocol_pairs, args.collapse_states)
    if args.inject_fault:
        with inject_expansion_fault(1e-3):
            return run_verify(_seed(args), counts, _cfg(args))
    return run_verify(_seed(args), counts, _cfg(args))


def _rows_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for r in rows:
        w.writerow(
            [
                r[k] if isinstance(r[k], str) else ("" if r[k] is None else fmt_float(r[k]))
                for k in SWEEP_HEADER
            ]
        )
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid-theta", type=int, default=721)
    common.add_argument("--grid-phi", type=int, default=1441)
    common.add_argument("--seed", type=int, default=None, help="default: $CTQ_SEED or 42")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--normalize", action="store_true", help="rescale amplitudes to unit norm")
    common.add_argument("--zero-tol", type=float, default=1e-12)
    common.add_argument("--cross-tol", type=float, default=1e-5)
    common.add_argument("--format", choices=("json", "csv"), default=None)

    p = argparse.ArgumentParser(prog="ctq", description="Optimal controlled teleportation through canonical three-qubit channels.")
    sub = p.add_subparsers(dest="command", required=True)
    state_help = 'inline JSON {"a": [a0..a4], "mu": radians} or a path to such a file'

    sp = sub.add_parser("classify", parents=[common], help="case label of a state")
    sp.add_argument("state", help=state_help)

    sp = sub.add_parser("pmax", parents=[common], help="maximal success probability")
    sp.add_argument("state", help=state_help)
    sp.add_argument("--method", choices=("analytic", "numeric", "both"), default="both")

    sp = sub.add_parser("sweep", parents=[common], help="pmax over a one- or two-parameter family")
    sp.add_argument("family", help='e.g. "GhzClass:a0sq=0.1:0.9" or JSON {"case", "params", "points"}')
    sp.add_argument("--points", type=int, default=9)

    sp = sub.add_parser("simulate", parents=[common], help="run the full protocol for one basis")
    sp.add_argument("state", help=state_help)
    sp.add_argument("--basis", required=True, help='JSON {"theta": t, "phi": p}')
    sp.add_argument("--message", default='{"alpha": [1, 0], "beta": [0, 0]}',
                    help='JSON {"alpha": [re, im], "beta": [re, im]}')

    sp = sub.add_parser("verify", parents=[common], help="run the invariant battery")
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--states", type=int, default=3, help="states per case class for the optimum cross-check")
    sp.add_argument("--protocol-pairs", type=int, default=50)
    sp.add_argument("--collapse-states", type=int, default=20)
    sp.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    return p


COMMANDS = {
    "classify": cmd_classify,
    "pmax": cmd_pmax,
    "sweep": cmd_sweep,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    fmt = args.format or ("csv" if args.command == "sweep" else "json")
    out = sys.stdout
    code = EXIT_OK
    try:
        if fmt == "csv" and args.command != "sweep":
            raise InputError("csv output is only available for sweep")
        result = COMMANDS[args.command](args)
    except (ValidationError, DomainError, CaseMismatch, InputError) as exc:
        print(f"ctq: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except UnsupportedGeneralCase as exc:
        print(f"ctq: {exc}; try --method numeric", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except CrossCheckFailed as exc:
        result, code = exc.payload, EXIT_CROSS
        print(f"ctq: |delta| = {result['delta']:.3g} exceeds --cross-tol {args.cross_tol:g}", file=sys.stderr)
    except ConsistencyError as exc:
        print(f"ctq: internal cross-check failed: {exc}", file=sys.stderr)
        return EXIT_CROSS

    if args.command == "verify" and not result["passed"]:
        code = EXIT_VERIFY
        print(f"ctq: failed suites: {', '.join(result['failed_suites'])}", file=sys.stderr)
    if fmt == "csv":
        out.write(_rows_csv(result))
    else:
        out.write(dumps(result) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
