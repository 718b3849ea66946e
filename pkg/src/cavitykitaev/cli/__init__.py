"""Command-line runner: ``cavitykitaev <workflow> --config run.toml``.

Exit status is 0 on success (a failed condition audit is a result, not an
error), 2 for configuration errors and 1 for any other error.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
import warnings

from ..errors import CavityKitaevError, ConfigError
from .config import WORKFLOWS, RunConfig, parse_config
from .emit import RunReport, emit
from .workflows import run

log = logging.getLogger("cavitykitaev")

__all__ = ["main", "parse_config", "run", "emit", "RunConfig", "RunReport", "WORKFLOWS"]


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cavitykitaev", description=__doc__.splitlines()[0])
    ap.add_argument("workflow", choices=WORKFLOWS)
    ap.add_argument("--config", required=True, help="TOML run configuration")
    ap.add_argument("--out", default=".", help="output directory (default: current)")
    ap.add_argument("--format", choices=("json", "csv"), default="json")
    ap.add_argument("--strict", action=argparse.BooleanOptionalAction, default=True,
                    help="reject unknown sections and keys (default: on)")
    ap.add_argument("--threads", type=int, default=1, help="parallel width for sweeps")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    if args.threads < 1:
        print("cavitykitaev: --threads must be >= 1", file=sys.stderr)
        return 2
    start = time.perf_counter()
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            cfg = parse_config(args.config, workflow=args.workflow, strict=args.strict)
            report = run(args.workflow, cfg, threads=args.threads)
        report.warnings = sorted({str(w.message) for w in caught})
        paths = emit(report, args.format, args.out)
    except ConfigError as exc:
        print(f"cavitykitaev {args.workflow}: configuration error: {exc}", file=sys.stderr)
        return 2
    except (CavityKitaevError, OSError) as exc:
        print(f"cavitykitaev {args.workflow}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    for w in report.warnings:
        print(f"cavitykitaev {args.workflow}: warning: {w}", file=sys.stderr)
    log.info("%s finished in %.3f s", args.workflow, time.perf_counter() - start)
    for p in paths:
        print(p)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
