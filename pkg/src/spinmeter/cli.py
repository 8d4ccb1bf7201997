"""Command line front end: qm <scenario> --config <file> [overrides]."""

import argparse
import dataclasses
import sys

from .config import SCENARIOS, load_config
from .experiments import RUNNERS, emit


def build_parser():
    p = argparse.ArgumentParser(
        prog="qm",
        description="Run a spin-measurement simulation scenario and write "
                    "CSV observables plus meta.json.")
    p.add_argument("scenario", choices=SCENARIOS,
                   help="experiment family to run")
    p.add_argument("--config", required=True, metavar="FILE",
                   help="JSON config; fields mirror ExperimentConfig")
    p.add_argument("--seed", type=int, metavar="N",
                   help="override master_seed")
    p.add_argument("--realizations", type=int, metavar="N",
                   help="override n_r")
    p.add_argument("--threads", type=int, metavar="N",
                   help="cap BLAS/LAPACK thread pools for this run")
    p.add_argument("--out", metavar="DIR",
                   help="output directory (default: from config, else "
                        "qm_<scenario>_out)")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if cfg.scenario is None:
            cfg = dataclasses.replace(cfg, scenario=args.scenario)
        elif cfg.scenario != args.scenario:
            raise ValueError(
                f"config is for scenario {cfg.scenario!r}, "
                f"command line says {args.scenario!r}")
        overrides = {}
        if args.seed is not None:
            overrides["master_seed"] = args.seed
        if args.realizations is not None:
            overrides["n_r"] = args.realizations
        if args.threads is not None:
            overrides["threads"] = args.threads
        if args.out is not None:
            overrides["out_dir"] = args.out
        if overrides:
            cfg = dataclasses.replace(cfg, **overrides)
        cfg = cfg.resolve()

        if cfg.threads is not None:
            # runtime cap; kernels are serial, this pins the BLAS pools
            from threadpoolctl import threadpool_limits
            threadpool_limits(limits=cfg.threads)

        out_dir = cfg.out_dir or f"qm_{cfg.scenario}_out"
        result = RUNNERS[cfg.scenario](cfg)
        paths = emit(result, out_dir)
    except (ValueError, OSError, RuntimeError) as err:
        print(f"qm: error: {err}", file=sys.stderr)
        return 1
    for path in paths:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
