"""Command line entry point: ``resspec <command> [options]``.

Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 connectivity
grid with untestable pairs.
"""

from __future__ import annotations

import argparse
import sys

from ..core import WINDOWS, EstimationConfig
from ..decomposition import decompose, regression_coefficients
from ..errors import (InvalidArgumentError, NumericalConsistencyError, ParseError,
                      ResSpecError, SingularSpectrumError)
from ..joint import run_joint_test
from ..lags import CRITERIA, select_lag, select_lags
from ..residual import run_test
from ..simulation import CASES, monte_carlo
from ..spectral import field_from_config
from .connectivity import SCENARIOS, connectivity
from .emit import FORMATS, emit
from .io import difference, load_csv

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_PARTIAL = 0, 2, 3, 4


def _int_list(text: str):
    """``"0-5"`` or ``"0,2,4"`` (mixable) to a list of ints."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def _str_list(text: str):
    return [s.strip() for s in text.split(",") if s.strip()]


def _common():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--window", choices=WINDOWS, default="parzen")
    g.add_argument("--bandwidth", type=int, default=None,
                   help="lag-window bandwidth M (default: max(4, round(1.5 n^0.3)))")
    g.add_argument("--grid", type=int, default=512, help="even number of frequencies, >= 64")
    g.add_argument("--alpha", type=float, default=0.05)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--format", choices=FORMATS, default="json")
    g.add_argument("--out", default="-", help="output file (default: stdout)")
    return p


def _input(p):
    p.add_argument("csv", help="input table")
    p.add_argument("--no-header", dest="header", action="store_false")
    p.add_argument("--long", action="store_true",
                   help="long format: time,subject,region,value (averaged over subjects)")
    p.add_argument("--difference", type=int, default=0, choices=(0, 1, 2))


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="resspec", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", parents=[common], help="kernel spectral matrix estimate")
    _input(p)
    p.add_argument("--columns", type=_str_list, default=None)

    p = sub.add_parser("decompose", parents=[common],
                       help="coherences and residual spectra; first column is the response")
    _input(p)
    p.add_argument("--columns", type=_str_list, default=None)
    p.add_argument("--coefficients", type=int, default=None, metavar="KMAX",
                   help="also report regression coefficients b_i(k), |k| <= KMAX (JSON only)")

    p = sub.add_parser("test", parents=[common],
                       help="test the last covariate given the others")
    _input(p)
    p.add_argument("--response", required=True)
    p.add_argument("--covariates", type=_str_list, required=True,
                   help="comma list; the last one is tested")

    p = sub.add_parser("joint-test", parents=[common],
                       help="joint test over lagged products of the first covariate")
    _input(p)
    p.add_argument("--response", required=True)
    p.add_argument("--covariates", type=_str_list, required=True)
    p.add_argument("--lags", type=_int_list, default=list(range(6)))

    p = sub.add_parser("select-lag", parents=[common], help="choose interaction lag(s)")
    _input(p)
    p.add_argument("--response", required=True)
    p.add_argument("--covariates", type=_str_list, required=True,
                   help="one covariate for X1(t)X1(t-u); more for a tuple search")
    p.add_argument("--max-lag", type=int, default=5)
    p.add_argument("--criterion", choices=CRITERIA, default="integrated")

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo size/power")
    p.add_argument("--case", type=_int_list, required=True)
    p.add_argument("--n", type=_int_list, default=[250, 500, 1000, 2000])
    p.add_argument("--reps", type=int, default=1000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="include wall time (not reproducible)")

    p = sub.add_parser("connectivity", parents=[common], help="two-group pairwise screening")
    p.add_argument("group_a")
    p.add_argument("group_b")
    p.add_argument("--no-header", dest="header", action="store_false")
    p.add_argument("--long", action="store_true")
    p.add_argument("--difference", type=int, default=0, choices=(0, 1, 2))
    p.add_argument("--regions", type=_str_list, default=None)
    p.add_argument("--scenario", choices=SCENARIOS, default="linear")
    p.add_argument("--lags", type=_int_list, default=list(range(6)))
    p.add_argument("--bonferroni", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    return parser


def _config(args) -> EstimationConfig:
    return EstimationConfig(window=args.window, bandwidth=args.bandwidth, grid_size=args.grid)


def _load(path, args):
    d = load_csv(path, header=args.header, long=args.long)
    return difference(d, args.difference)


def _run(args):
    config = _config(args)
    cmd = args.command
    if cmd == "simulate":
        unknown = [c for c in args.case if c not in CASES]
        if unknown:
            raise InvalidArgumentError(f"unknown case ids {unknown}")
        rows = [monte_carlo(c, n, args.reps, args.alpha, args.seed, config, args.workers)
                for c in args.case for n in args.n]
        return {"simulate": rows}, False
    if cmd == "connectivity":
        a, b = _load(args.group_a, args), _load(args.group_b, args)
        grid = connectivity(a, b, args.regions, args.scenario, args.alpha, config,
                            args.lags, args.bonferroni, args.workers)
        return {"connectivity": grid}, bool(grid.untestable)

    data = _load(args.csv, args)
    if cmd in ("estimate", "decompose"):
        keys = args.columns if args.columns is not None else list(range(data.regions))
        x = data.series(keys)
        field = field_from_config(x, config)
        if cmd == "estimate":
            return {"estimate": field}, False
        dec = decompose(field)
        out = {"decompose": dec}
        if args.coefficients is not None:
            ks = list(range(-args.coefficients, args.coefficients + 1))
            out["coefficients"] = {"k": ks, "b": {
                x.labels[i]: regression_coefficients(dec, i, ks).tolist()
                for i in range(1, dec.K + 1)}}
        return out, False
    y = data.column(args.response)
    covs = [data.column(c) for c in args.covariates]
    if cmd == "test":
        x = data.series([args.response] + args.covariates)
        return {"test": run_test(x, args.alpha, config)}, False
    if cmd == "joint-test":
        return {"joint-test": run_joint_test(y, covs, args.lags, args.alpha, config)}, False
    if cmd == "select-lag":
        if len(covs) == 1:
            sel = select_lag(y, covs[0], args.max_lag, args.criterion, config)
        else:
            sel = select_lags(y, covs, args.max_lag, args.criterion, config)
        return {"select-lag": sel}, False
    raise InvalidArgumentError(f"unknown command {cmd}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        results, partial = _run(args)
        config = _config(args).as_dict() | {"alpha": args.alpha, "seed": args.seed,
                                            "command": args.command}
        emit(results, args.format, args.out, config, timing=getattr(args, "timing", False))
    except (ParseError, InvalidArgumentError) as exc:
        print(f"resspec: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SingularSpectrumError, NumericalConsistencyError) as exc:
        print(f"resspec: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ResSpecError as exc:
        print(f"resspec: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if partial:
        print("resspec: some pairs were untestable (see 'untestable')", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
