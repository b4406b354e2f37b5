"""Command-line entry point: ``rfvlc-alloc {run,sweep,oracle}``.

Exit codes: 0 success, 2 constraint violation, 3 oracle refused the instance size.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .channel import build_channel_state, dump_channels
from .exhaustive import OracleRefusal, run_exhaustive
from .experiment import SWEEP_PARAMS, run_experiment
from .matching import dump_matching
from .power import dump_pareto
from .rates import ConstraintViolation, check_allocation
from .scenario import ScenarioConfig, generate_topology, load_scenario
from .schemes import SchemeId, run_scheme

EXIT_OK = 0
EXIT_CONSTRAINT = 2
EXIT_REFUSAL = 3


def _config(args) -> ScenarioConfig:
    if args.scenario:
        return load_scenario(args.scenario, seed=args.seed)
    cfg = ScenarioConfig()
    return cfg if args.seed is None else cfg.replace(seed=args.seed)


def _summary(res) -> dict:
    ev = res.evaluated
    return {"scheme": res.scheme, "seed": int(res.seed), "sum_rate_bps": float(ev.sum_rate),
            "total_power_w": float(ev.total_power), "ee": float(ev.ee),
            "outage_count": int(res.outage_count), "iterations": int(res.iterations_used),
            "wall_time_s": round(float(res.wall_time), 4)}


def parse_seeds(text: str) -> list[int]:
    """``"0-19"``, ``"0:20"`` or a comma list ``"1,4,7"``."""
    text = text.strip()
    if "-" in text[1:]:
        lo, hi = text.split("-", 1)
        return list(range(int(lo), int(hi) + 1))
    if ":" in text:
        lo, hi = text.split(":", 1)
        return list(range(int(lo), int(hi)))
    return [int(s) for s in text.split(",") if s.strip()]


def _split(values: list[str]) -> list[str]:
    return [v for item in values for v in item.split(",") if v]


def cmd_run(args) -> int:
    cfg = _config(args)
    state = build_channel_state(generate_topology(cfg), cfg)
    if args.dump_channels:
        dump_channels(state, args.dump_channels)
    res = run_scheme(args.scheme, cfg, state, seed=cfg.seed, power_levels=args.levels)
    check_allocation(res.allocation, cfg)
    if args.dump_matching and res.matching is not None:
        dump_matching(res.matching, res.preferences, args.dump_matching)
    if args.dump_pareto and res.frontier is not None:
        dump_pareto(res.frontier, args.dump_pareto)
    print(json.dumps(_summary(res)))
    return EXIT_OK


def _parse_value(param: str, v: str):
    if param == "los":
        return v
    if param == "users":
        return int(v)
    return float(v)


def cmd_sweep(args) -> int:
    cfg = _config(args)
    values = [_parse_value(args.param, v) for v in _split(args.values)]
    schemes = [SchemeId(s).value for s in _split(args.schemes)]
    table = run_experiment(cfg, args.param, values, schemes, parse_seeds(args.seeds),
                           power_levels=args.levels)
    if args.out:
        table.to_csv(args.out)
    if args.summary:
        table.summary_to_csv(args.summary)
    for cell in table.summary():
        print(f"{cell['sweep_param']}={cell['sweep_value']} {cell['scheme']:<20s} "
              f"ee={cell['ee_mean']:.4g}+-{cell['ee_se']:.2g} "
              f"outage={cell['outage_count_mean']:.2f}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    cfg = _config(args)
    state = build_channel_state(generate_topology(cfg), cfg)
    oracle = run_exhaustive(cfg, state, args.levels, seed=cfg.seed)
    check_allocation(oracle.allocation, cfg)
    out = {"oracle": _summary(oracle)}
    if args.compare:
        res = run_scheme(args.compare, cfg, state, seed=cfg.seed)
        out[args.compare] = _summary(res)
        out["ratio"] = res.ee / oracle.ee if oracle.ee > 0 else float("nan")
    print(json.dumps(out))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rfvlc-alloc",
                                     description="Energy-efficient resource allocation "
                                                 "for aggregated RF/VLC networks")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scenario", help="JSON scenario file (default: desk scenario)")
        p.add_argument("--seed", type=int, default=None, help="overrides the scenario seed")
        p.add_argument("--levels", type=int, default=3,
                       help="power levels per subchannel for the exhaustive oracle")

    p = sub.add_parser("run", help="run one scheme on one scenario")
    common(p)
    p.add_argument("--scheme", default=SchemeId.PROPOSED_ITERATIVE.value,
                   choices=[s.value for s in SchemeId])
    p.add_argument("--dump-channels", metavar="PATH")
    p.add_argument("--dump-matching", metavar="PATH")
    p.add_argument("--dump-pareto", metavar="PATH")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="Monte-Carlo sweep over one parameter")
    common(p)
    p.add_argument("--param", required=True, choices=SWEEP_PARAMS)
    p.add_argument("--values", required=True, nargs="+",
                   help="sweep values (users: count, rmin: Mbit/s, los: band, circuit: factor)")
    p.add_argument("--schemes", nargs="+", default=[SchemeId.PROPOSED_ITERATIVE.value])
    p.add_argument("--seeds", default="0-19", help="range 'a-b' (inclusive), 'a:b' or list")
    p.add_argument("--out", metavar="CSV", help="per-run rows")
    p.add_argument("--summary", metavar="CSV", help="per-cell means and standard errors")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle", help="exhaustive search on a tiny instance")
    common(p)
    p.add_argument("--compare", default=None, choices=[s.value for s in SchemeId if
                                                       s != SchemeId.EXHAUSTIVE_ORACLE],
                   help="also run this scheme and report its EE ratio")
    p.set_defaults(func=cmd_oracle, levels=5)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except OracleRefusal as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSAL
    except ConstraintViolation as exc:
        print(f"constraint violation: {exc}", file=sys.stderr)
        return EXIT_CONSTRAINT


if __name__ == "__main__":
    sys.exit(main())
