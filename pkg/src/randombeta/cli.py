"""Batch command-line front end.

Every command prints one JSON document (sorted keys) to stdout and, with
``--out DIR``, also writes it to ``DIR/<command>.json`` together with any CSV
tables.  Exit codes: 0 success, 2 invalid input, 3 class-B verdict unknown.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import re
import sys
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .field import FieldError, make_field
from .measures import build_lebesgue_chain, build_measure, cylinder_table, entropy_pressure, novelty_check
from .partition import PartitionError, check_partition, is_class_B
from .pipeline import ClassBUnknown, build_pipeline
from .sft import SftError, check_primitive
from .simulate import (SimConfig, empirical_stats, frequency_sigmas, merge_reports, orbit_check, rng_header,
                       sample_chain, write_report)
from .thermo import (CylinderFunction, PotentialSpec, depth_for_tolerance, eigen_residual, power_lambda,
                     residual_bound, ruelle_floor, ruelle_limit_check, variation_tail)

EXIT_OK, EXIT_INVALID, EXIT_UNKNOWN = 0, 2, 3

_VALUE_FLAGS = {"--minpoly", "--theta", "--weights", "--alpha", "--p", "--depth", "--steps", "--seed",
                "--streams", "--budget", "--k-max", "--check-windows"}
_NEGATIVE = re.compile(r"^-\d")


class UsageError(ValueError):
    pass


def _join_negative_values(argv: Sequence[str]) -> list[str]:
    """Let ``--minpoly -1,-1,1`` through argparse by rewriting to ``--minpoly=-1,-1,1``."""
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and _NEGATIVE.match(argv[i + 1]):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated decimals, got {text!r}")


def _fractions(text: str) -> list[Fraction]:
    try:
        return [Fraction(x.strip()) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated rationals, got {text!r}")


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a rational a/b, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--minpoly", type=_ints, default=[-1, -1, 1],
                        help="integer coefficients, ascending degree (default golden: -1,-1,1)")
    common.add_argument("--interval", nargs=2, type=_fraction, metavar=("LO", "HI"),
                        default=[Fraction(1), Fraction(2)], help="isolating interval for beta")
    common.add_argument("--budget", type=int, default=10_000, help="orbit-closure point budget")
    common.add_argument("--out", type=Path, default=None, help="directory for JSON/CSV artifacts")

    pot = argparse.ArgumentParser(add_help=False)
    pot.add_argument("--theta", type=_floats, default=None, help="digit potential, comma-separated")
    pot.add_argument("--alpha", type=float, default=2.0)
    pot.add_argument("--depth", type=int, default=None,
                     help="truncation depth (default: smallest with variation tail < 1e-8)")

    parser = argparse.ArgumentParser(prog="randombeta", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("classb", parents=[common], help="certify class B")
    sub.add_parser("partition", parents=[common], help="Markov partition")
    sub.add_parser("sft", parents=[common], help="SFT adjacency and digit labels")
    m = sub.add_parser("measure", parents=[common], help="g-measure as a Markov chain")
    m.add_argument("--theta", type=_floats, default=None)
    m.add_argument("--weights", type=_fractions, default=None, help="exact rational digit weights")
    m.add_argument("--depth", type=int, default=0, help="write cylinder measures up to this length")
    lb = sub.add_parser("lebesgue", parents=[common], help="Lebesgue Markov chain")
    lb.add_argument("--p", type=_fraction, default=Fraction(1, 2))
    sub.add_parser("eigen", parents=[common, pot], help="closed-form eigenvalue checks")
    r = sub.add_parser("ruelle", parents=[common, pot], help="Ruelle convergence of L^k 1 / lambda^k")
    r.add_argument("--k-max", type=int, default=40)
    nv = sub.add_parser("novelty", parents=[common], help="compare mu_theta with the Lebesgue chain")
    nv.add_argument("--theta", type=_floats, default=None)
    nv.add_argument("--p", type=_fraction, default=Fraction(1, 2))
    sm = sub.add_parser("simulate", parents=[common], help="sample paths and statistics")
    sm.add_argument("--theta", type=_floats, default=None)
    sm.add_argument("--steps", type=int, default=100_000)
    sm.add_argument("--seed", type=int, default=0)
    sm.add_argument("--streams", type=int, default=1)
    sm.add_argument("--depth", type=int, default=12, help="enclosure depth for the conjugacy check")
    sm.add_argument("--k-max", type=int, default=20)
    sm.add_argument("--check-windows", type=int, default=10_000, help="windows per stream for the conjugacy check")
    return parser


def manifest(args: argparse.Namespace) -> dict:
    params = {k: _jsonable(v) for k, v in sorted(vars(args).items()) if k not in ("command", "out", "func")}
    return {
        "command": args.command,
        "field": {"minpoly": list(args.minpoly), "interval": [str(x) for x in args.interval]},
        "parameters": params,
        "tool_version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, Path):
        return str(v)
    return v


def _theta(args, n_digits: int) -> list[float]:
    theta = args.theta if args.theta is not None else [0.0] * n_digits
    if len(theta) != n_digits:
        raise UsageError(f"--theta needs {n_digits} values (floor(beta) + 1), got {len(theta)}")
    return theta


def _pipeline(args):
    return build_pipeline(args.minpoly, args.interval, args.budget)


# -- commands ------------------------------------------------------------------

def cmd_classb(args) -> tuple[dict, int]:
    ctx = make_field(args.minpoly, args.interval)
    res = is_class_B(ctx, args.budget)
    verdict = {"yes": True, "no": False, "unknown": None}[res.verdict]
    out = {
        "class_b": verdict,
        "verdict": res.verdict,
        "F_size": len(res.orbit.points) if res.verdict == "yes" else None,
        "truncated": res.orbit.truncated,
        "witness": None if res.witness is None else {"exact": res.witness.to_json(), "approx": float(res.witness)},
        "beta": ctx.beta_float,
        "floor_beta": ctx.floor_beta,
    }
    if res.verdict == "yes":
        out["F"] = [float(x) for x in res.orbit.sorted_points()]
    return out, EXIT_UNKNOWN if res.verdict == "unknown" else EXIT_OK


def cmd_partition(args) -> tuple[dict, int]:
    pipe = _pipeline(args)
    out = pipe.partition.to_json()
    out["problems"] = check_partition(pipe.partition)
    out["F_size"] = len(pipe.certificate.orbit.points)
    return out, EXIT_OK


def cmd_sft(args) -> tuple[dict, int]:
    pipe = _pipeline(args)
    out = pipe.sft.to_json()
    out["primitive_exponent"] = check_primitive(pipe.sft)
    out["incoming_digit_bijection"] = pipe.sft.has_incoming_digit_bijection()
    return out, EXIT_OK


def cmd_measure(args) -> tuple[dict, int]:
    pipe = _pipeline(args)
    if args.weights is not None:
        if args.theta is not None:
            raise UsageError("give --theta or --weights, not both")
        if len(args.weights) != pipe.sft.n_digits:
            raise UsageError(f"--weights needs {pipe.sft.n_digits} values")
        rep = build_measure(pipe.sft, weights=args.weights)
        theta = [math.log(float(w)) for w in args.weights]
    else:
        theta = _theta(args, pipe.sft.n_digits)
        rep = build_measure(pipe.sft, theta)
    out = rep.to_json()
    out.update(entropy_pressure(rep, theta))
    out["theta"] = theta
    tables = {}
    if args.depth:
        rows = []
        for n in range(1, args.depth + 1):
            rows += [(" ".join(map(str, w)), str(v) if not isinstance(v, float) else repr(v))
                     for w, v in cylinder_table(rep, n)]
        tables["cylinders.csv"] = (["word", "measure"], rows)
    return out, EXIT_OK, tables


def cmd_lebesgue(args) -> tuple[dict, int]:
    pipe = _pipeline(args)
    chain = build_lebesgue_chain(pipe.partition, pipe.sft, args.p)
    return chain.to_json(), EXIT_OK


def _spec_and_depth(args, sft):
    if args.alpha <= 1:
        raise UsageError("--alpha must exceed 1")
    spec = PotentialSpec(tuple(_theta(args, sft.n_digits)), args.alpha)
    depth = args.depth if args.depth is not None else depth_for_tolerance(spec, 1e-8)
    if depth < 2:
        raise UsageError("--depth must be >= 2")
    return spec, depth


def cmd_eigen(args) -> tuple[dict, int]:
    pipe = _pipeline(args)
    spec, depth = _spec_and_depth(args, pipe.sft)
    pw = power_lambda(pipe.sft, spec, depth)
    return {
        "lambda_closed_form": spec.lam,
        "lambda_power_iter": pw.lambda_est,
        "power_residual": pw.residual,
        "power_method": pw.method,
        "residual": eigen_residual(pipe.sft, spec, depth),
        "residual_bound": residual_bound(spec, depth),
        "depth": depth,
        "tail_bound": spec.theta_norm * spec.ratio ** (depth - 1),
        "variation_tail": variation_tail(spec, depth - 1),
    }, EXIT_OK


def cmd_ruelle(args) -> tuple[dict, int]:
    pipe = _pipeline(args)
    spec, depth = _spec_and_depth(args, pipe.sft)
    if args.depth is None:
        depth = min(depth, 12)
    f = CylinderFunction.constant(pipe.sft, depth)
    rep = ruelle_limit_check(pipe.sft, spec, f, args.k_max)
    return {
        "depth": depth,
        "spread": rep.spreads.tolist(),
        "relative_spread": rep.rel_spreads.tolist(),
        "relative_floor": ruelle_floor(spec, depth),
        "ratio_mean": rep.ratio_mean.tolist(),
    }, EXIT_OK


def cmd_novelty(args) -> tuple[dict, int]:
    pipe = _pipeline(args)
    rep = build_measure(pipe.sft, _theta(args, pipe.sft.n_digits))
    chain = build_lebesgue_chain(pipe.partition, pipe.sft, args.p)
    return novelty_check(rep, chain).to_json(), EXIT_OK


def cmd_simulate(args) -> tuple[dict, int]:
    if args.steps < 1 or args.streams < 1:
        raise UsageError("--steps and --streams must be positive")
    pipe = _pipeline(args)
    rep = build_measure(pipe.sft, _theta(args, pipe.sft.n_digits))
    reports = []
    for sid in range(args.streams):
        cfg = SimConfig(args.seed, args.steps, 0, sid)
        path = sample_chain(rep, cfg)
        r = empirical_stats(path, pipe.sft, rep, args.k_max, config=cfg)
        chk = orbit_check(pipe.partition, pipe.sft, path[: args.check_windows + args.depth], args.depth)
        r.conjugacy_violations = chk.violations
        reports.append(r)
    merged = merge_reports(reports) if len(reports) > 1 else reports[0]
    out = merged.to_json()
    out["expected"] = {
        "digit": rep.weights.tolist(),
        "switch_mass": float(rep.m[list(pipe.sft.switch_states)].sum()),
        "sigma": frequency_sigmas(rep, pipe.sft, merged.steps),
    }
    out["rng"] = rng_header()
    return out, EXIT_OK, {"__report__": merged}


COMMANDS = {
    "classb": cmd_classb, "partition": cmd_partition, "sft": cmd_sft, "measure": cmd_measure,
    "lebesgue": cmd_lebesgue, "eigen": cmd_eigen, "ruelle": cmd_ruelle, "novelty": cmd_novelty,
    "simulate": cmd_simulate,
}


def _emit(args, payload: dict, tables: dict) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True, allow_nan=True) + "\n"
    sys.stdout.write(text)
    if args.out is None:
        return
    args.out.mkdir(parents=True, exist_ok=True)
    for name, value in tables.items():
        if name == "__report__":
            write_report(value, args.out, payload["manifest"])
            continue
        header, rows = value
        with open(args.out / name, "w", newline="", encoding="utf-8") as fh:
            wr = csv.writer(fh)
            wr.writerow(header)
            wr.writerows(rows)
    (args.out / f"{args.command}.json").write_text(text, encoding="utf-8")


def run(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_join_negative_values(argv))
    except SystemExit as e:
        return EXIT_INVALID if e.code else EXIT_OK
    try:
        result = COMMANDS[args.command](args)
    except ClassBUnknown as e:
        print(f"error: class-B verdict unknown: {e}", file=sys.stderr)
        return EXIT_UNKNOWN
    except (UsageError, FieldError, PartitionError, SftError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    payload, code = result[0], result[1]
    tables = result[2] if len(result) > 2 else {}
    payload["manifest"] = manifest(args)
    _emit(args, _clean(payload), tables)
    return code


def _clean(obj):
    """Replace numpy scalars and non-finite floats so the JSON is portable."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
