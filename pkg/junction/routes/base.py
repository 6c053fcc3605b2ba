import argparse
import logging
from typing import Callable, Dict, List, NamedTuple, Sequence, Tuple

from junction.models.config_models import RunConfig
from junction.services import config_service

logger = logging.getLogger(__name__)

Handler = Callable[[argparse.Namespace], int]
Argument = Tuple[Tuple[str, ...], Dict]
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")

# flag dest -> RunConfig key
OVERRIDE_KEYS = ("nu", "tau_plus", "c0", "j", "delta_j", "grid_n", "n_max", "newton_tol",
                 "newton_max_iter", "continuation_step", "damping_min", "richardson", "weights",
                 "weight_refine", "snapshots", "formats", "jobs", "out", "dump_basis",
                 "case_traces", "log_level")


def argument(*flags: str, **kwargs) -> Argument:
    return flags, kwargs


class Command(NamedTuple):
    name: str
    help: str
    arguments: Tuple[Argument, ...]
    handler: Handler


class CommandRouter:
    """Collects subcommands so the entry point can include them into one parser."""

    def __init__(self):
        self.commands: List[Command] = []

    def command(self, name: str, help: str, arguments: Sequence[Argument] = ()):
        def decorator(handler: Handler) -> Handler:
            self.commands.append(Command(name, help, tuple(arguments), handler))
            return handler
        return decorator

    def include(self, subparsers) -> None:
        for command in self.commands:
            parser = subparsers.add_parser(command.name, help=command.help,
                                           description=command.help)
            add_common_arguments(parser)
            for flags, kwargs in command.arguments:
                parser.add_argument(*flags, **kwargs)
            parser.set_defaults(handler=command.handler)


def add_common_arguments(parser: argparse.ArgumentParser) -> None:
    # Defaults stay None so that config files and the environment can fill them.
    parser.add_argument("--config", type=str, default=None, help="flat KEY=value config file")
    parser.add_argument("--out", type=str, default=None, help="output directory")
    parser.add_argument("--nu", type=str, default=None)
    parser.add_argument("--tau-plus", dest="tau_plus", type=str, default=None)
    parser.add_argument("--c0", type=str, default=None)
    parser.add_argument("--j", type=float, default=None)
    parser.add_argument("--delta-j", dest="delta_j", type=str, default=None)
    parser.add_argument("--grid-n", dest="grid_n", type=int, default=None)
    parser.add_argument("--n-max", dest="n_max", type=int, default=None)
    parser.add_argument("--newton-tol", dest="newton_tol", type=float, default=None)
    parser.add_argument("--newton-max-iter", dest="newton_max_iter", type=int, default=None)
    parser.add_argument("--continuation-step", dest="continuation_step", type=float, default=None)
    parser.add_argument("--damping-min", dest="damping_min", type=float, default=None)
    parser.add_argument("--no-richardson", dest="richardson", action="store_false", default=None)
    parser.add_argument("--weights", type=str, default=None, help="comma-separated weights")
    parser.add_argument("--weight-refine", dest="weight_refine", action="store_true", default=None)
    parser.add_argument("--snapshots", type=str, default=None, help="orders n1,n2,...")
    parser.add_argument("--formats", type=str, default=None, help="csv,json")
    parser.add_argument("--jobs", type=int, default=None)
    parser.add_argument("--log-level", dest="log_level", type=str.upper, choices=LOG_LEVELS,
                        default=None)


def overrides(args: argparse.Namespace) -> Dict[str, object]:
    return {key: getattr(args, key, None) for key in OVERRIDE_KEYS}


def load_config(args: argparse.Namespace, command: str) -> RunConfig:
    file_values = config_service.read_config_file(args.config)
    return config_service.build_run_config(command, file_values, overrides(args))
