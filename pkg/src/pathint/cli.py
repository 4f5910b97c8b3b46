"""Command-line interface: ``pathint <command> [flags]``.

Exit codes: 0 success, 2 usage or domain error, 3 refused (a size cap
would be exceeded), 4 a declared value bound was violated. Failures print
one line to stderr of the form ``pathint: error[<code>]: <Type>: <message>``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from itertools import cycle, islice

from .errors import BoundViolationError, CapExceededError, PathIntError
from .grid import DEFAULT_ENUMERATION_CAP, build_grid, grid_info
from .integrate import BENCH_COLUMNS, Method, bench_rows, integrate, load_config
from .measure import EigenSpectrum, eigenvalue, partial_trace, tail_bound
from .oracle import Integrand, SummandOracle
from .qae import DEFAULT_MEMORY_CAP, QaeMode, qsum
from .truncate import SmoothnessClass, dimension_by_tail, dimension_theorem2, dimension_upper

EXIT_OK, EXIT_USAGE, EXIT_CAP, EXIT_BOUND = 0, 2, 3, 4
DEMO_VALUES = (1.0, -1.0, 1.0, 1.0)
BENCH_EPS = (0.2, 0.1, 0.05, 0.025)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _spectrum(args) -> EigenSpectrum:
    if args.spec == "wiener":
        return EigenSpectrum.wiener()
    return EigenSpectrum.power_law(args.a, args.k)


def _smoothness(args) -> SmoothnessClass:
    K = [args.K0, args.K1, args.K2, *([args.K2] * max(0, args.r - 2))][: args.r + 1]
    return SmoothnessClass(args.r, K)


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_spectrum(args) -> str:
    spec = _spectrum(args)
    out = {}
    if args.trace:
        out["trace"] = spec.trace
    if args.eigen is not None:
        out["eigenvalue"] = eigenvalue(spec, args.eigen)
    if args.partial is not None:
        out["partial_trace"] = partial_trace(spec, args.partial)
    if args.tail is not None:
        out["tail_bound"] = tail_bound(spec, args.tail)
    if len(out) == 1 and args.format is None:
        return f"{next(iter(out.values()))!r}\n"
    out["spectrum"] = spec.to_json()
    return _dump_json(out)


def cmd_dim(args) -> str:
    spec, cls = _spectrum(args), _smoothness(args)
    if args.method == "upper":
        d = dimension_upper(spec, cls, args.eps)
    elif args.method == "tail":
        d = dimension_by_tail(spec, cls, args.eps)
    else:
        d = dimension_theorem2(cls, cls.K0, args.eps)
    if args.format == "json":
        return _dump_json({"d": d, "eps": args.eps, "method": args.method,
                           "class": cls.to_json(), "spectrum": spec.to_json()})
    return f"{d}\n"


def cmd_grid_info(args) -> str:
    grid = build_grid(_spectrum(args), args.d, args.m, variance_factor=args.variance_factor,
                      inner_selection=args.inner_selection)
    return _dump_json(grid_info(grid, args.K1))


def cmd_qae_demo(args) -> str:
    if args.values:
        values = [float(v) for v in args.values.split(",")]
        n = len(values) if args.n is None else args.n
        if n != len(values):
            raise UsageError(f"--n {n} does not match {len(values)} values")
    else:
        n = 4 if args.n is None else args.n
        values = list(islice(cycle(DEMO_VALUES), n))
    oracle = SummandOracle.from_values(values)
    res = qsum(oracle, args.delta, repetitions=args.reps, mode=args.mode, seed=args.seed,
               memory_cap=args.memory_cap, enumeration_cap=args.enumeration_cap)
    return _dump_json(res.to_json())


def cmd_integrate(args) -> str:
    with open(args.config, encoding="utf-8") as fh:
        obj = json.load(fh)
    if args.seed is not None:
        obj["seed"] = args.seed
    config, spec, cls, f = load_config(obj)
    report = integrate(config, spec, cls, f)
    return _dump_json(report.to_json(include_timing=args.timing))


def cmd_bench(args) -> str:
    spec, cls = _spectrum(args), _smoothness(args)
    if args.integrand != "cosine_path_integral":
        raise UsageError(f"unsupported integrand {args.integrand!r}")
    f = Integrand.cosine_path_integral()
    seed0 = 0 if args.seed is None else args.seed
    skipped: list = []
    rows = bench_rows(spec, cls, f, args.eps, methods=args.methods,
                      seeds=range(seed0, seed0 + args.trials),
                      enumeration_cap=args.enumeration_cap, skipped=skipped)
    for eps, method, digits in skipped:
        print(f"pathint: note: skipped {method} at eps={eps!r} (n has {digits} digits)",
              file=sys.stderr)
    if args.format == "json":
        return _dump_json(rows)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if v is None else repr(v) if isinstance(v, float) else v)
                         for k, v in row.items()})
    return buf.getvalue()


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _methods(text: str) -> list[str]:
    out = [x for x in text.split(",") if x]
    for x in out:
        try:
            Method(x)
        except ValueError:
            raise argparse.ArgumentTypeError(f"unknown method {x!r}")
    return out


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    # SUPPRESS so a flag given before the command is not reset by the subparser
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="RNG seed (default 0)")
    common.add_argument("--out", default=argparse.SUPPRESS,
                        help="write output to this file instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS,
                        help="output format; bench defaults to csv, the others to json or a bare number")

    spec_flags = _Parser(add_help=False)
    spec_flags.add_argument("--spec", choices=("wiener", "power_law"), default="wiener",
                            help="eigenvalue sequence of the covariance operator")
    spec_flags.add_argument("--a", type=float, default=1.0, help="power-law scale a in a*j**-k")
    spec_flags.add_argument("--k", type=float, default=2.0, help="power-law exponent k > 1")

    class_flags = _Parser(add_help=False)
    class_flags.add_argument("--r", type=int, default=1, help="smoothness order r >= 1")
    class_flags.add_argument("--K0", type=float, default=1.0, help="sup bound of the integrand")
    class_flags.add_argument("--K1", type=float, default=1.0, help="bound on the first derivative")
    class_flags.add_argument("--K2", type=float, default=1.0,
                             help="bound on the second and higher derivatives (r >= 2)")

    parser = _Parser(prog="pathint", description=__doc__.splitlines()[0],
                     parents=[common])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("spectrum", parents=[common, spec_flags],
                       help="eigenvalues, traces and tail bounds")
    p.add_argument("--trace", action="store_true", help="total trace")
    p.add_argument("--eigen", type=int, metavar="J", help="eigenvalue lambda_J")
    p.add_argument("--partial", type=int, metavar="D", help="sum of the first D eigenvalues")
    p.add_argument("--tail", type=int, metavar="D", help="upper bound on the tail beyond D")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("dim", parents=[common, spec_flags, class_flags],
                       help="truncation dimension for accuracy eps")
    p.add_argument("--eps", type=float, required=True, help="target accuracy")
    p.add_argument("--method", choices=("upper", "tail", "d_up"), default="upper",
                   help="closed form (upper), tail search (tail) or the K0-scaled d_up formula (d_up)")
    p.set_defaults(func=cmd_dim)

    p = sub.add_parser("grid-info", parents=[common, spec_flags],
                       help="describe a product quantile grid as JSON")
    p.add_argument("--d", type=int, required=True, help="dimension")
    p.add_argument("--m", type=int, required=True, help="odd number of nodes per axis")
    p.add_argument("--K1", type=float, default=1.0, help="K1 for the worst-case bound")
    p.add_argument("--variance-factor", type=float, default=1.0,
                   help="node scale sqrt(factor * lambda_i) (default 1)")
    p.add_argument("--inner-selection", action="store_true",
                   help="replace each node by the neighbour closer to zero")
    p.set_defaults(func=cmd_grid_info)

    p = sub.add_parser("qae-demo", parents=[common], help="simulated quantum summation on a small vector")
    p.add_argument("--n", type=int, default=None, help="number of summands (default 4)")
    p.add_argument("--values", default=None,
                   help="comma-separated summands in [-1, 1] (default repeats 1,-1,1,1)")
    p.add_argument("--delta", type=float, required=True, help="target accuracy in (0, 1)")
    p.add_argument("--mode", choices=[m.value for m in QaeMode], default="statevector")
    p.add_argument("--reps", type=int, default=1, help="odd number of repetitions (median)")
    p.add_argument("--memory-cap", type=int, default=DEFAULT_MEMORY_CAP,
                   help="max amplitudes in the statevector")
    p.add_argument("--enumeration-cap", type=int, default=DEFAULT_ENUMERATION_CAP)
    p.set_defaults(func=cmd_qae_demo)

    p = sub.add_parser("integrate", parents=[common], help="run the pipeline from a JSON config")
    p.add_argument("--config", required=True, help="config JSON (docs/config.schema.json)")
    p.add_argument("--timing", action="store_true",
                   help="include wall-clock time in the report (breaks byte determinism)")
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("bench", parents=[common, spec_flags, class_flags],
                       help="resource and error table over several eps (CSV)")
    p.add_argument("--eps", type=_floats, default=list(BENCH_EPS),
                   help="comma-separated accuracies (default 0.2,0.1,0.05,0.025)")
    p.add_argument("--methods", type=_methods,
                   default=["quantum_analytic", "monte_carlo", "worst_case_classical"],
                   help="comma-separated methods")
    p.add_argument("--trials", type=int, default=1, help="seeds per (eps, method)")
    p.add_argument("--integrand", default="cosine_path_integral")
    p.add_argument("--enumeration-cap", type=int, default=DEFAULT_ENUMERATION_CAP)
    p.set_defaults(func=cmd_bench, r=2)
    return parser


def _fail(code: int, exc: BaseException) -> int:
    msg = " ".join(str(exc).split())
    print(f"pathint: error[{code}]: {type(exc).__name__}: {msg}", file=sys.stderr)
    return code


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        for name in ("seed", "out", "format"):
            if not hasattr(args, name):
                setattr(args, name, None)
        if args.command == "qae-demo" and args.seed is None:
            args.seed = 0
        text = args.func(args)
    except UsageError as exc:
        return _fail(EXIT_USAGE, exc)
    except CapExceededError as exc:
        return _fail(EXIT_CAP, exc)
    except BoundViolationError as exc:
        return _fail(EXIT_BOUND, exc)
    except (PathIntError, ValueError, KeyError, OSError) as exc:
        return _fail(EXIT_USAGE, exc)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main() -> None:
    sys.exit(run())
