"""Command line: ``doiforge verify|demo|profiles``.

Exit codes: 0 when every trial passes, 1 when any fails, 2 for usage,
configuration or output errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import runner
from .config import RunConfig, expand_theorems, load_config, override
from .errors import ConfigError


def _csv_floats(text):
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _csv_ints(text):
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(runner.EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", type=Path, help="TOML run configuration; flags override it")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", type=Path, help="output directory (default: reports)")
    p.add_argument("--quick", action="store_true", default=None, help="small smoke-test sizes")
    p.add_argument("--tol", type=float, help="relative slack added to each inequality")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="doiforge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run the trial suites for one theorem id or all")
    v.add_argument("theorem", help="theorem id (doi, thm3, thm11, ..., thm19) or 'all'")
    v.add_argument("--n", type=_csv_ints, help="matrix sizes, comma separated")
    v.add_argument("--trials", type=int)
    v.add_argument("--alpha", type=_csv_floats)
    v.add_argument("--theta", type=_csv_floats)
    v.add_argument("--p", type=_csv_floats)
    v.add_argument("--r", type=_csv_floats)
    v.add_argument("--norm", action="append", help="norm spec such as schatten:2, weak:1, kyfan:3, op")
    _common(v)

    d = sub.add_parser("demo", help="worked examples")
    d.add_argument("example", choices=["periodic"])
    d.add_argument("--N", type=int, help="Fourier modes -N..N")
    d.add_argument("--p", type=float, help="weak-L^p exponent")
    _common(d)

    pr = sub.add_parser("profiles", help="write CSV profiles")
    _common(pr)
    return parser


def config_from_args(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    flags = {"seed": args.seed, "out": args.out, "quick": args.quick, "tol": args.tol}
    if args.verb == "verify":
        flags.update(theorems=expand_theorems([args.theorem]), n=args.n, trials=args.trials,
                     alpha=args.alpha, theta=args.theta, p=args.p, r=args.r,
                     norms=tuple(args.norm) if args.norm else None)
    elif args.verb == "demo":
        flags.update(demo_N=args.N, demo_p=args.p)
    return override(cfg, **flags).validate()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        if args.verb == "verify":
            status, records = runner.run(cfg)
            print(runner.format_summary(records))
            print(f"records: {Path(cfg.out) / 'records.jsonl'}")
        elif args.verb == "demo":
            status, rec = runner.run_demo(cfg)
            ex = rec["extras"]
            print(json.dumps({k: rec[k] for k in ("theorem_id", "lhs", "rhs", "constant_used", "ratio",
                                                  "passed")}, sort_keys=True))
            print(f"weak-L^{ex['p']} norms: |Delta0^-1| = {ex['weak_norm_inv_delta0']:.6g}, "
                  f"|Delta^-1 - Delta0^-1| = {ex['weak_norm_inv_difference']:.6g}")
        else:
            status, paths = runner.emit_profiles(cfg)
            for name, path in paths.items():
                print(f"{name}: {path}")
    except ConfigError as e:
        print(f"doiforge: {e}", file=sys.stderr)
        return runner.EXIT_USAGE
    except OSError as e:
        print(f"doiforge: {e}", file=sys.stderr)
        return runner.EXIT_USAGE
    return status


if __name__ == "__main__":
    sys.exit(main())
