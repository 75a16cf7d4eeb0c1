"""Command-line entry point: ``nlkorovkin {run,integrate,check,bounds}``.

Exit codes: 0 success, 2 validation error, 3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings

import numpy as np

from .capacity import Distortion, MeasurableSet, distorted_capacity, lebesgue_capacity, sqrt_lebesgue
from .choquet import QuadratureConfig, choquet_integral_1d
from .exceptions import (ConfigurationError, DomainError, EvaluationError, KorovkinLabError,
                         QuadratureWarning, StructuralError)
from .experiment import ExperimentConfig, build_probe, emit_report, run_experiment
from .fields import DomainSpec
from .korovkin import RATE_BOUNDS, verify_rate_bound
from .opalgebra import axiom_matrix
from .operators import FAMILIES, make_family

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4


def _write(text, out):
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as err:
        raise OSError(f"cannot write {out}: {err.strerror or err}") from err


def _load_config(args):
    cfg = ExperimentConfig.load(args.config)
    if args.grid is not None:
        cfg.grid = args.grid
    if args.seed is not None:
        cfg.seed = args.seed
    return cfg.validate()


def cmd_run(args):
    cfg = _load_config(args)
    report = run_experiment(cfg, jobs=args.jobs)
    text = emit_report(report, args.format or cfg.output)
    _write(text, args.out)


def cmd_bounds(args):
    if args.config:
        cfg = _load_config(args)
        if cfg.bounds is None:
            cfg.bounds = cfg.family
        family, bound, schedule = cfg.make_family(), cfg.bounds, cfg.schedule
    else:
        if not args.family:
            raise ConfigurationError("bounds needs --config or --family")
        family = make_family(args.family)
        bound = args.family
        schedule = [int(n) for n in args.schedule.split(",")]
    if bound == "theorem3" or bound not in RATE_BOUNDS:
        raise ConfigurationError(f"no rate bound named {bound!r}; known: {sorted(RATE_BOUNDS)}")
    rep = verify_rate_bound(family, bound, schedule, grid=args.grid or 21)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "function", "sup_error", "bound_value", "verdict"])
    for n in schedule:
        per = rep.details["per_n"][n]
        lhs = per["bound_at_worst"] - per["min_margin"]
        ok = per["min_margin"] >= -rep.tolerance
        w.writerow([n, f"rate[{bound}]", repr(lhs), repr(per["bound_at_worst"]),
                    "within-bound" if ok else "exceeds-bound"])
    _write(buf.getvalue(), args.out)


def _capacity(spec: str):
    if spec == "sqrt":
        return sqrt_lebesgue()
    if spec == "lebesgue":
        return lebesgue_capacity()
    if spec.startswith("power:"):
        a = float(spec.split(":", 1)[1])
        if not 0 < a <= 1:
            raise ConfigurationError("power exponent must lie in (0, 1]")
        u = Distortion(lambda t, a=a: np.power(t, a), concave=True, name=f"t^{a:g}")
        return distorted_capacity(lebesgue_capacity(), u)
    raise ConfigurationError(f"unknown capacity {spec!r} (sqrt, lebesgue, power:A)")


def cmd_integrate(args):
    a, b = args.interval
    if not b > a:
        raise ConfigurationError("interval needs a < b")
    if args.poly is not None:
        spec = {"name": "poly", "polynomial": [float(c) for c in args.poly.split(",")]}
    else:
        spec = args.function
    f = build_probe(spec, DomainSpec.interval())
    cfg = QuadratureConfig(domain_samples=args.samples,
                           refinement="double-until-stable" if args.refine else "none")
    value, info = choquet_integral_1d(f, MeasurableSet.interval(a, b), _capacity(args.capacity),
                                      cfg, full_output=True)
    out = {"function": f.name, "interval": [a, b], "capacity": args.capacity,
           "value": value, "samples": info["samples"]}
    if args.format == "csv":
        text = "function,a,b,capacity,value,samples\n" \
               f"{f.name},{a!r},{b!r},{args.capacity},{value!r},{info['samples']}\n"
    else:
        text = json.dumps(out, indent=2) + "\n"
    _write(text, args.out)


def cmd_check(args):
    kw = json.loads(args.options) if args.options else {}
    T = make_family(args.family, **kw)
    ns = [int(n) for n in args.ns.split(",")]
    m = axiom_matrix(T, ns, trials=args.trials, grid=args.grid, seed=args.seed or 0)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "axiom", "worst_violation", "tolerance", "verdict", "claimed", "matches"])
    for (n, axiom), rep in sorted(m.items()):
        claimed = T.profile.claim(axiom)
        w.writerow([n, axiom, repr(float(rep.worst_violation)), repr(rep.tolerance), rep.verdict,
                    claimed, claimed == rep.passed])
    _write(buf.getvalue(), args.out)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nlkorovkin", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, formats=True):
        sp.add_argument("--out", help="output path (default: stdout)")
        if formats:
            sp.add_argument("--format", choices=("csv", "json"))
        sp.add_argument("--grid", type=int, help="evaluation points per axis")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--jobs", type=int, default=1)

    sp = sub.add_parser("run", help="run an experiment config")
    sp.add_argument("--config", required=True)
    common(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("integrate", help="one Choquet integral over an interval")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--function", default="exp", help="probe corpus name on [0, 1]")
    g.add_argument("--poly", help="comma-separated power-basis coefficients")
    sp.add_argument("--interval", type=float, nargs=2, default=(0.0, 1.0), metavar=("A", "B"))
    sp.add_argument("--capacity", default="sqrt")
    sp.add_argument("--samples", type=int, default=4096)
    sp.add_argument("--refine", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_integrate)

    sp = sub.add_parser("check", help="axiom suite for one family")
    sp.add_argument("family", choices=sorted(FAMILIES))
    sp.add_argument("--ns", default="2,8,32")
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--options", help="JSON dict of family options")
    common(sp, formats=False)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("bounds", help="rate-bound verification only")
    sp.add_argument("--config")
    sp.add_argument("--family", choices=sorted(RATE_BOUNDS))
    sp.add_argument("--schedule", default="4,16,64")
    common(sp, formats=False)
    sp.set_defaults(func=cmd_bounds)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_VALIDATION if exc.code else EXIT_OK
    if getattr(args, "jobs", 1) < 1:
        print("error: --jobs must be at least 1", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        # non-finite values are reported through EvaluationError, not numpy warnings
        with warnings.catch_warnings(), np.errstate(over="ignore", invalid="ignore"):
            warnings.simplefilter("error", QuadratureWarning)
            args.func(args)
    except (ConfigurationError, DomainError, StructuralError, json.JSONDecodeError) as err:
        print(f"validation error: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    except (EvaluationError, QuadratureWarning, ArithmeticError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as err:
        print(f"I/O error: {err}", file=sys.stderr)
        return EXIT_IO
    except (KorovkinLabError, ValueError) as err:
        print(f"validation error: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
