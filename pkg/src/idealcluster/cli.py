"""Command line interface: ``idealcluster <command> [options]``."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from . import harness, report
from .harness import ExperimentConfig
from .ideals import (ConfigError, DensityAlpha, family_statistic, membership)
from .indexset import named_set
from .limitset import estimate_Gamma, estimate_L, estimate_Lambda
from .sequences import generate


def _config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.from_toml(args.config) if args.config else ExperimentConfig()
    over = {}
    if args.seed is not None:
        over["seed"] = args.seed
    if args.n is not None:
        over["N"] = args.n
    if args.trials is not None:
        over["trials"] = args.trials
    if args.ideal is not None:
        over["ideal"] = args.ideal
    if args.sequence is not None:
        over["sequence"] = args.sequence
    if args.out is not None:
        over["output"] = args.out
    if args.format is not None:
        over["format"] = args.format
    if getattr(args, "workers", None) is not None:
        over["workers"] = args.workers
    return replace(cfg, **over)


def _emit(cfg, summary, rows):
    text = report.emit(summary, rows, cfg.format, cfg.output)
    if cfg.output is None:
        sys.stdout.write(text)


def cmd_density(args, cfg):
    A = named_set(args.set)
    ideal = cfg.ideal_spec()
    N = cfg.resolved_N()
    mask = A.mask(N)
    stat, window, lo, hi = family_statistic(ideal, mask, cfg.thresholds)
    rows = [{"set": A.name, "ideal": ideal.label, "N": N, "statistic": stat,
             "window_lo": window[0], "window_hi": window[1]}]
    if isinstance(ideal, DensityAlpha):
        from .ideals import alpha_weight_ratio
        rows[0]["ratio_at_N"] = alpha_weight_ratio(mask, ideal.alpha, N)
    _emit(cfg, {"density": rows[0]}, rows)
    return 0


def cmd_member(args, cfg):
    A = named_set(args.set)
    ideal = cfg.ideal_spec()
    v = membership(ideal, A, cfg.resolved_N(), cfg.thresholds)
    row = {"set": A.name, "ideal": ideal.label, "N": cfg.resolved_N(), **v.as_dict()}
    _emit(cfg, {"membership": row}, [row])
    return 0


def cmd_limitsets(args, cfg):
    cfg.validate()
    x = generate(cfg.sequence_spec(), cfg.resolved_N())
    sch = cfg.schedule()
    ideal = cfg.ideal_spec()
    L = estimate_L(x, sch, config=cfg.thresholds)
    G = estimate_Gamma(x, ideal, sch, cfg.thresholds)
    Lam = estimate_Lambda(x, ideal, sch, cfg.thresholds, cfg.qgrid)
    summary = {"L": L.as_dict(), "Gamma": G.as_dict(), "Lambda": Lam.as_dict()}
    _emit(cfg, summary, L.rows() + G.rows() + Lam.rows())
    return 0


def cmd_montecarlo(args, cfg):
    s = harness.run_montecarlo(cfg)
    _emit(cfg, s.as_dict(), s.rows())
    return 0


def cmd_dichotomy(args, cfg):
    r = harness.run_dichotomy(cfg)
    _emit(cfg, r, harness.dichotomy_rows(r))
    return 0 if r["coherent"] else 1


def cmd_corollary_fin(args, cfg):
    r = harness.run_corollary_fin(cfg)
    _emit(cfg, r, r["random"]["records"])
    return 0


def cmd_oracle_suite(args, cfg):
    res = harness.run_oracle_suite(args.size, cfg.seed, cfg.thresholds)
    _emit(cfg, res.as_dict(), res.rows())
    if not res.passed:
        for c in res.checks:
            if not c.passed:
                print(f"FAIL {c.name}: {c.detail}", file=sys.stderr)
    return 0 if res.passed else 1


COMMANDS = {
    "density": (cmd_density, "ideal statistic of a named index set"),
    "member": (cmd_member, "membership verdict of a named index set"),
    "limitsets": (cmd_limitsets, "estimate L, Gamma and Lambda for a sequence"),
    "montecarlo": (cmd_montecarlo, "random-subsequence preservation experiment"),
    "dichotomy": (cmd_dichotomy, "constructed versus random subsequences"),
    "corollary-fin": (cmd_corollary_fin, "ordinary limit points under constructed and random subsequences"),
    "oracle-suite": (cmd_oracle_suite, "run the exact and exhaustive oracle comparisons"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML experiment configuration")
    common.add_argument("--seed", type=int)
    common.add_argument("--n", type=int, help="prefix length N")
    common.add_argument("--trials", type=int)
    common.add_argument("--ideal", help="fin | density:ALPHA | erdos-ulam:W | summable:W | gdi:natural-density")
    common.add_argument("--sequence", help="zoo entry name")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("tabular", "structured"))
    common.add_argument("--workers", type=int, help="worker processes for trials")
    p = argparse.ArgumentParser(prog="idealcluster", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, parents=[common], help=help_text)
        if name in ("density", "member"):
            sp.add_argument("--set", default="squares", help="named index set, e.g. evens, multiples-of-3")
        if name == "oracle-suite":
            sp.add_argument("--size", default="small", choices=("small", "full"))
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        cfg.thresholds.validate()
        return COMMANDS[args.command][0](args, cfg)
    except (ConfigError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
