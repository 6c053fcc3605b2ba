import argparse
import logging
import os
import sys
from typing import Optional, Sequence

from dotenv import load_dotenv

from junction import __version__
from junction.errors import JunctionError
from junction.routes import series_routes, solve_routes, sweep_routes, table1_routes
from junction.services.config_service import ENV_LOG_LEVEL

logger = logging.getLogger("junction")

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="junction",
        description="Field equation of a two-ion liquid junction: reference solves, "
                    "perturbation series and their convergence analysis",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    # Include routes
    solve_routes.router.include(subparsers)
    series_routes.router.include(subparsers)
    sweep_routes.router.include(subparsers)
    table1_routes.router.include(subparsers)
    return parser


def configure_logging(level: Optional[str]) -> None:
    level = (level or os.getenv(ENV_LOG_LEVEL) or "INFO").upper()
    logging.basicConfig(level=getattr(logging, level, logging.INFO), format=LOG_FORMAT,
                        stream=sys.stderr, force=True)


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    try:
        return args.handler(args)
    except JunctionError as exc:
        logger.debug("command %s failed", args.command, exc_info=True)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
