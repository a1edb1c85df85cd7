"""Command line entry point: ``diracphase --experiment NAME [options]``.

Exit codes: 0 all verdicts pass, 1 some verdict fails, 2 configuration or
usage error, 3 numerical abort.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .config import ConfigError, load, resolve
from .dressing import LoopConsistencyError
from .dyson import DysonConvergenceError
from .evolve import ConvergenceError, dump_csv
from .experiments import EXPERIMENTS, UnknownExperiment, evolve_model, model_from, run_experiment
from .polarized import SectionDomainError
from .quadrature import QuadratureError
from .report import emit_report
from .symbolic import ExtrapolationError, SymbolError

NUMERICAL_ERRORS = (SectionDomainError, ConvergenceError, DysonConvergenceError,
                    QuadratureError, ExtrapolationError, LoopConsistencyError)

log = logging.getLogger("diracphase")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="diracphase", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--experiment", choices=sorted(EXPERIMENTS))
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--grid-nmax", type=int)
    p.add_argument("--mass", type=float)
    p.add_argument("--coupling", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--dressing")
    p.add_argument("--seed", type=int)
    p.add_argument("--dump-path", help="write the sampled interaction-picture path as CSV")
    p.add_argument("-v", "--verbose", action="count", default=0)
    return p


def overrides_from(args) -> dict:
    out = load(args.config) if args.config else {}
    flags = {"experiment": args.experiment, "grid.nmax": args.grid_nmax,
             "model.mass": args.mass, "pot.lambda": args.coupling, "evolve.tol": args.tol,
             "dressing.recipe": args.dressing, "seed": args.seed}
    out.update({k: v for k, v in flags.items() if v is not None})
    return out


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(message)s")
    try:
        cfg = resolve(overrides_from(args))
        if args.dump_path:
            dump_csv(evolve_model(model_from(cfg), cfg), args.dump_path)
        bundle = run_experiment(cfg["experiment"], cfg)
    except (ConfigError, UnknownExperiment, SymbolError) as exc:
        print(f"diracphase: error: {exc}", file=sys.stderr)
        return 2
    except NUMERICAL_ERRORS as exc:
        print(f"diracphase: numerical abort: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    try:
        text = emit_report(bundle, args.format, args.out)
    except OSError as exc:
        print(f"diracphase: error: {exc}", file=sys.stderr)
        return 2
    if args.out is None:
        sys.stdout.write(text)
    for name, v in bundle.verdicts.items():
        log.info("%s %s value=%s threshold=%s", "PASS" if v.passed else "FAIL",
                 name, v.value, v.threshold)
    log.info("runtime %.2fs", bundle.runtimes.get("total", 0.0))
    return 0 if bundle.passed else 1


if __name__ == "__main__":
    sys.exit(main())
