"""Command line: ``fkriesz run | list-experiments | validate``.

Thread count must be fixed before numba starts, so compute modules are
imported only after the arguments are parsed.
"""

from __future__ import annotations

import argparse
import os
import sys


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fkriesz", description="Feynman-Kac Riesz transform experiments")
    sub = ap.add_subparsers(dest="cmd", required=True)
    r = sub.add_parser("run", help="run one experiment and write its report")
    r.add_argument("--config", required=True, help="YAML experiment config")
    r.add_argument("--out", help="output directory (overrides 'output' in the config)")
    r.add_argument("--threads", type=int, help="worker threads for the path kernels")
    r.add_argument("--seed", type=int, help="override mc.seed")
    sub.add_parser("list-experiments", help="print the registered experiment ids")
    v = sub.add_parser("validate", help="check a config without computing anything")
    v.add_argument("--config", required=True)
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if getattr(args, "threads", None) is not None:
        if args.threads < 1:
            print("error: --threads must be >= 1", file=sys.stderr)
            return 64
        os.environ["NUMBA_NUM_THREADS"] = str(args.threads)

    from .config import ConfigError, load
    from .experiments import REGISTRY, run_experiment
    from .report import EXIT_CONFIG, emit

    if args.cmd == "list-experiments":
        for eid, exp in REGISTRY.items():
            crit = ",".join(str(c) for c in exp.criteria)
            print(f"{eid:28s} criterion {crit:4s} {exp.title}")
        return 0
    try:
        cfg = load(args.config)
        if args.cmd == "run" and args.seed is not None:
            if args.seed < 0:
                raise ConfigError("--seed", "must be >= 0")
            cfg.mc["seed"] = args.seed
        out = getattr(args, "out", None) or cfg.output
        if args.cmd == "run" and not out:
            raise ConfigError("output", "no output directory: pass --out or set 'output'")
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.cmd == "validate":
        print(f"ok: {cfg.experiment}")
        return 0
    if args.threads is not None:
        import numba
        numba.set_num_threads(min(args.threads, numba.config.NUMBA_NUM_THREADS))
    rep = run_experiment(cfg)
    path = emit(rep, out)
    for v in rep.verdicts:
        print(f"[{v.status}] {v.claim}")
    print(f"{rep.experiment}: {rep.status} ({path})")
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
