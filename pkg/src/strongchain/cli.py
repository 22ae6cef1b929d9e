"""Command line: ``strongchain {simulate,analyze,reproduce,demo-mine}``.

Exit codes: 0 ok, 1 usage, 2 bad configuration, 3 a reproduction check failed.
"""

import argparse
import csv
import math
import sys
from pathlib import Path

from . import analytics
from .core import RewardKind, compute_block_rewards, effective_timestamp, make_genesis
from .core.jsonio import dump_blocks
from .core.params import COIN, ParamsError
from .mining import BudgetExhausted, mine_toy_chain, toy_params
from .presets import PRESETS
from .sim import ConfigInvalid, load_config, run_matrix, write_csv

EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_TOLERANCE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    return open(path, "w", newline="")


def cmd_simulate(args) -> int:
    try:
        cfg = load_config(args.config)
    except OSError as e:
        print(f"config: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigInvalid as e:
        for line in e.errors:
            print(f"config: {line}", file=sys.stderr)
        return EXIT_CONFIG
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.seeds is not None:
        changes["seeds"] = args.seeds
    try:
        cfg = cfg.with_(**changes)
    except ConfigInvalid as e:
        print("\n".join(f"config: {x}" for x in e.errors), file=sys.stderr)
        return EXIT_CONFIG
    runs = run_matrix([cfg], args.workers)[0]
    f = _open_out(args.out)
    try:
        write_csv(runs, f)
    finally:
        if f is not sys.stdout:
            f.close()
    return EXIT_OK


ANALYZE_COLUMNS = ("alpha", "ratio", "gamma", "c", "var_bitcoin", "var_strongchain", "cov_bitcoin",
                   "cov_strongchain", "gamma_star")
POOL_COLUMNS = ("pool", "bitcoin_share", "equivalent_share", "reduction")


def _analyze_rows(args):
    if args.pools:
        ratio = args.ratio[0] if args.ratio else 1024
        gamma = args.gamma if args.gamma is not None else 10
        return POOL_COLUMNS, [(name, share, eq, red)
                              for name, share, eq, red in analytics.pool_table(ratio, gamma)]
    rows = []
    for r in args.ratio or [2, 64, 1024]:
        g = math.log2(r) if args.gamma is None else args.gamma
        for a in args.alpha or [0.001, 0.01, 0.1]:
            x = analytics.RewardModelInputs(a, r, g, args.reward)
            bx = analytics.RewardModelInputs(a, 1, 0, args.reward)
            rows.append((a, r, g, float(analytics.scaling_constant(r, g)),
                         analytics.bitcoin_reward_variance(bx), analytics.strongchain_reward_variance(x),
                         analytics.coefficient_of_variation(bx, analytics.Protocol.BITCOIN),
                         analytics.coefficient_of_variation(x), analytics.variance_minimizing_gamma(a, r)))
    return ANALYZE_COLUMNS, rows


def cmd_analyze(args) -> int:
    try:
        columns, rows = _analyze_rows(args)
    except (ValueError, ArithmeticError) as e:
        print(f"analyze: {e}", file=sys.stderr)
        return EXIT_CONFIG
    f = _open_out(args.out)
    try:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([v if isinstance(v, str) else f"{float(v):.10g}" for v in row])
    finally:
        if f is not sys.stdout:
            f.close()
    return EXIT_OK


def cmd_reproduce(args) -> int:
    res = PRESETS[args.preset](seed=args.seed or 0, full=args.full, workers=args.workers)
    out = Path(args.out or "results")
    out.mkdir(parents=True, exist_ok=True)
    with open(out / f"{res.name}.csv", "w", newline="") as f:
        w = csv.DictWriter(f, res.columns, restval="", lineterminator="\n")
        w.writeheader()
        for row in res.rows:
            w.writerow({k: f"{v:.10g}" if isinstance(v, float) else v for k, v in row.items()})
    if res.runs:
        with open(out / f"{res.name}-runs.csv", "w", newline="") as f:
            write_csv(res.runs, f)
    report = res.report()
    (out / f"{res.name}-report.txt").write_text(report)
    sys.stdout.write(report)
    return EXIT_OK if res.passed else EXIT_TOLERANCE


def cmd_demo_mine(args) -> int:
    try:
        params = toy_params(args.bits, args.ratio, args.gamma)
    except (ParamsError, ValueError) as e:
        print(f"demo-mine: {e}", file=sys.stderr)
        return EXIT_CONFIG
    if args.blocks == 0:
        return EXIT_OK
    try:
        _, blocks = mine_toy_chain(params, args.blocks, nonce_budget=args.budget,
                                       start_nonce=(args.seed or 0) << 16 & 0xFFFFFFFF)
    except BudgetExhausted as e:
        print(f"demo-mine: {e}", file=sys.stderr)
        return EXIT_CONFIG
    print("height  hash              weak  finder_reward  weak_rewards  effective_timestamp")
    genesis_ts = make_genesis(params).header.timestamp
    total = 0
    for h, b in enumerate(blocks, 1):
        pays = compute_block_rewards(b, 0, params)
        finder = sum(p.amount for p in pays if p.kind is RewardKind.STRONG)
        weak = sum(p.amount for p in pays) - finder
        total += finder + weak
        ts = float(effective_timestamp(b, params)) - genesis_ts
        print(f"{h:6d}  {b.digest[::-1].hex()[:16]}  {len(b.weak_headers):4d}  "
              f"{finder / COIN:13.8f}  {weak / COIN:12.8f}  genesis+{ts:.1f}s")
    print(f"{len(blocks)} blocks valid; minted {total / COIN:.8f} (R = {params.block_reward / COIN:g})")
    if args.out:
        dump_blocks(blocks, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="strongchain", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", help="run a scenario config and write metrics CSV")
    s.add_argument("config", help="scenario file (see docs/config.md)")
    s.add_argument("--seed", type=int, help="first seed (overrides the config)")
    s.add_argument("--seeds", type=int, help="number of seeds (overrides the config)")
    s.add_argument("--out", help="CSV path (default: stdout)")
    s.add_argument("--workers", type=int, help="worker processes (default: CPU count)")
    s.set_defaults(fn=cmd_simulate)

    a = sub.add_parser("analyze", help="closed-form reward statistics as CSV")
    a.add_argument("--alpha", type=float, nargs="+", help="hash shares (default 0.001 0.01 0.1)")
    a.add_argument("--ratio", type=float, nargs="+", help="T_w/T_s values (default 2 64 1024)")
    a.add_argument("--gamma", type=float, help="weak reward factor (default log2(ratio))")
    a.add_argument("--reward", type=float, default=12.5, help="block reward R (default 12.5)")
    a.add_argument("--pools", action="store_true", help="print the equivalent pool-share table instead")
    a.add_argument("--out", help="CSV path (default: stdout)")
    a.set_defaults(fn=cmd_analyze)

    r = sub.add_parser("reproduce", help="run a named experiment preset and check it")
    r.add_argument("preset", choices=sorted(PRESETS))
    r.add_argument("--seed", type=int, help="base seed (default 0)")
    r.add_argument("--out", help="output directory (default: results)")
    r.add_argument("--full", action="store_true", help="larger horizons, more seeds and grid points")
    r.add_argument("--workers", type=int, help="worker processes (default: CPU count)")
    r.set_defaults(fn=cmd_reproduce)

    d = sub.add_parser("demo-mine", help="grind a toy chain with real hashing and validate it")
    d.add_argument("--bits", type=int, default=12, help="strong difficulty in bits of work (default 12)")
    d.add_argument("--blocks", type=int, default=3)
    d.add_argument("--ratio", type=int, default=16, help="T_w/T_s (default 16; 1 disables weak headers)")
    d.add_argument("--gamma", type=float, default=4)
    d.add_argument("--budget", type=int, default=1 << 24, help="nonces tried per block before giving up")
    d.add_argument("--seed", type=int, help="first nonce is seed * 65536, so seeds give different chains")
    d.add_argument("--out", help="write the mined blocks as JSON")
    d.set_defaults(fn=cmd_demo_mine)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "blocks", 0) < 0:
        print("demo-mine: --blocks must be >= 0", file=sys.stderr)
        return EXIT_USAGE
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
