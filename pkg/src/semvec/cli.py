"""Command line front end.

Subcommands: train, eval, baseline, sweep, plot-data. Exit codes: 0 on
success, 1 on usage or configuration errors, 2 on runtime failures.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .config import ConfigError, load_config
from .harness import (plot_data, run_experiment, run_train)

USAGE_EXIT = 1
RUNTIME_EXIT = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:   # argparse default exits 2
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(USAGE_EXIT)


def _add_common(sub: argparse.ArgumentParser, checkpoint: bool = False) -> None:
    sub.add_argument("--config", required=True, help="INI experiment config")
    sub.add_argument("--seed", type=int, default=None, help="override the first run seed")
    sub.add_argument("--out", default=None, help="output directory (default from [run])")
    if checkpoint:
        sub.add_argument("--checkpoint", default=None, help="policy checkpoint (.npz)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="semvec",
                     description="RIS-assisted semantic offloading simulator")
    cmds = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name, needs_ckpt, text in (
            ("train", True, "train a PPO policy and write a checkpoint"),
            ("eval", True, "evaluate a trained policy deterministically"),
            ("baseline", False, "run the GA and QPSO search baselines"),
            ("sweep", False, "run every (sweep value, seed, method) cell"),
            ("plot-data", False, "aggregate a run directory into figure-ready CSVs")):
        sub = cmds.add_parser(name, help=text)
        if name != "plot-data":
            _add_common(sub, checkpoint=needs_ckpt)
        else:
            sub.add_argument("--out", required=True, help="run directory holding metrics.csv")
    return parser


def _load(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.run = replace(cfg.run, seeds=(int(args.seed),))
        cfg.resolved["run"]["seeds"] = (int(args.seed),)
    if getattr(args, "out", None):
        cfg.run = replace(cfg.run, out_dir=args.out)
        cfg.resolved["run"]["out_dir"] = args.out
    if getattr(args, "checkpoint", None):
        cfg.run = replace(cfg.run, checkpoint=args.checkpoint)
        cfg.resolved["run"]["checkpoint"] = args.checkpoint
    return cfg


def _cmd_train(args) -> int:
    cfg = _load(args)
    seed = cfg.run.seeds[0]
    out = run_train(cfg, seed, cfg.run.out_dir)
    print(f"trained {out['episodes']} episodes (seed {seed}); "
          f"final mean reward {out['final_reward']:.4f}")
    print(f"checkpoint: {out['checkpoint']}")
    return 0


def _run_methods(args, methods) -> int:
    cfg = _load(args)
    cfg.run = replace(cfg.run, methods=methods)
    cfg.resolved["run"]["methods"] = methods
    summary = run_experiment(cfg, cfg.run.out_dir)
    print(f"wrote {summary['records']} metric rows to {summary['out_dir']}")
    for failure in summary["failures"]:
        print(f"cell failed: {failure}", file=sys.stderr)
    return 0 if not summary["failures"] else RUNTIME_EXIT


def _cmd_eval(args) -> int:
    if not args.checkpoint:
        print("eval requires --checkpoint", file=sys.stderr)
        return USAGE_EXIT
    return _run_methods(args, ("ppo",))


def _cmd_baseline(args) -> int:
    cfg = load_config(args.config)
    methods = tuple(m for m in cfg.run.methods if m in ("ga", "qpso")) or ("ga", "qpso")
    return _run_methods(args, methods)


def _cmd_sweep(args) -> int:
    cfg = _load(args)
    return_code = 0
    summary = run_experiment(cfg, cfg.run.out_dir)
    print(f"wrote {summary['records']} metric rows to {summary['out_dir']}")
    for failure in summary["failures"]:
        print(f"cell failed: {failure}", file=sys.stderr)
        return_code = RUNTIME_EXIT
    return return_code


def _cmd_plot_data(args) -> int:
    written = plot_data(args.out)
    for name in written:
        print(f"wrote {name} in {args.out}")
    return 0


_COMMANDS = {"train": _cmd_train, "eval": _cmd_eval, "baseline": _cmd_baseline,
             "sweep": _cmd_sweep, "plot-data": _cmd_plot_data}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RUNTIME_EXIT
    except Exception as exc:
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return RUNTIME_EXIT


if __name__ == "__main__":
    sys.exit(main())
