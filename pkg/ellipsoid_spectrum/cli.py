# coding: utf8
"""This module is the command line front end.

    ellipsoid-spectrum table1 --eps 0.1,0.05 --grid 400
    ellipsoid-spectrum table2 --lmax 12 --format json --out table2.json
    ellipsoid-spectrum sweep-biaxial --modes 1-5 --jobs 4
    ellipsoid-spectrum nodal --perturb 1,2,3 --levels 1-4
    ellipsoid-spectrum spectrum --axes 1.2,0.8,1.0
    ellipsoid-spectrum verify --seed 0

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 verification failure.
"""
import argparse
import dataclasses
import json
import logging
import sys
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

from ellipsoid_spectrum import commands
from ellipsoid_spectrum.biaxial_fd import DEFAULT_GRID, MIN_GRID, PoleBC
from ellipsoid_spectrum.eigensolve import ConvergenceError, NotPositiveDefiniteError
from ellipsoid_spectrum.nodal import DEFAULT_NODAL_GRID
from ellipsoid_spectrum.progress import Progress
from ellipsoid_spectrum.result_writer import FORMATS
from ellipsoid_spectrum.special_fn import BesselRootError
from ellipsoid_spectrum.spectrum_logging import add_console_handler, logger
from ellipsoid_spectrum.triaxial_galerkin import DEFAULT_LMAX, ClusterAmbiguityError
from ellipsoid_spectrum.utils import parse_floats, parse_ints
from ellipsoid_spectrum.version import __version__

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_VERIFICATION = 3

COMMANDS = {
    "table1": commands.cmd_table1,
    "table2": commands.cmd_table2,
    "sweep-biaxial": commands.cmd_sweep_biaxial,
    "nodal": commands.cmd_nodal,
    "verify": commands.cmd_verify,
    "spectrum": commands.cmd_spectrum,
}

NUMERICAL_ERRORS = (ConvergenceError, NotPositiveDefiniteError, BesselRootError, ClusterAmbiguityError)


@dataclass(frozen=True)
class RunConfig:
    command: str
    axes: Optional[Tuple[float, float, float]] = None
    perturb: Optional[Tuple[float, ...]] = None
    eps: Optional[Tuple[float, ...]] = None
    grid: int = DEFAULT_GRID
    lmax: int = DEFAULT_LMAX
    count: int = 10
    levels: Optional[Tuple[int, ...]] = None
    modes: Optional[Tuple[int, ...]] = None
    b_min: float = 0.1
    b_max: float = 500.0
    b_count: int = 60
    nodal_grid: Tuple[int, int] = DEFAULT_NODAL_GRID
    resolution_check: bool = True
    random_specs: int = 20
    pgm_dir: Optional[str] = None
    jobs: int = 1
    fmt: str = "csv"
    out: Optional[str] = None
    seed: int = 0
    pole_bc: str = PoleBC.AUTO.value
    analytic_tolerance: float = 1e-5
    numeric_tolerance: float = 0.3

    def __post_init__(self):
        for name in ("axes", "perturb", "eps", "levels", "modes", "nodal_grid"):
            value = getattr(self, name)
            if isinstance(value, list):
                object.__setattr__(self, name, tuple(value))
        self.validate()

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"Unknown command <{self.command}>, use one of {sorted(COMMANDS)}")
        if self.axes is not None and (len(self.axes) != 3 or min(self.axes) <= 0):
            raise UsageError(f"--axes needs three positive numbers, got {self.axes}")
        if self.perturb is not None and not 2 <= len(self.perturb) <= 4:
            raise UsageError(f"--perturb takes alpha,beta[,gamma[,eps]], got {self.perturb}")
        if self.eps is not None and min(self.eps) <= 0:
            raise UsageError(f"--eps values must be positive, got {self.eps}")
        if self.grid < MIN_GRID:
            raise UsageError(f"--grid must be at least {MIN_GRID}, got {self.grid}")
        if self.lmax < 2:
            raise UsageError(f"--lmax must be at least 2, got {self.lmax}")
        if self.count < 1 or self.jobs < 1 or self.b_count < 2 or self.random_specs < 0:
            raise UsageError("--count, --jobs must be positive and --b-count at least 2")
        if any(level < 0 for level in self.levels or ()) or any(m < 0 for m in self.modes or ()):
            raise UsageError("--levels and --modes must be non negative")
        if len(self.nodal_grid) != 2 or min(self.nodal_grid) < 4:
            raise UsageError(f"--nodal-grid takes two sizes, got {self.nodal_grid}")
        if self.nodal_grid[0] % 2 or self.nodal_grid[1] % 4:
            raise UsageError(f"--nodal-grid needs an even n_phi and n_theta divisible by 4, got {self.nodal_grid}")
        if self.fmt not in FORMATS:
            raise UsageError(f"--format must be one of {FORMATS}, got {self.fmt}")
        if self.pole_bc not in [item.value for item in PoleBC]:
            raise UsageError(f"--pole-bc must be auto or neumann, got {self.pole_bc}")

    @classmethod
    def from_mapping(cls, values: Dict[str, Any]) -> "RunConfig":
        known = {item.name for item in dataclasses.fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise UsageError(f"Unknown configuration keys {sorted(unknown)}")
        return cls(**values)


class SpectrumArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _type(converter, name):
    def convert(text):
        try:
            return converter(text)
        except ValueError as err:
            raise argparse.ArgumentTypeError(str(err)) from err

    convert.__name__ = name
    return convert


def _common_options() -> argparse.ArgumentParser:
    common = SpectrumArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", dest="config_file", help="JSON file with RunConfig keys")
    common.add_argument("--axes", type=_type(lambda text: parse_floats(text, 3), "axes"), help="a,b,c")
    common.add_argument("--perturb", type=_type(parse_floats, "perturb"), help="alpha,beta[,gamma[,eps]]")
    common.add_argument("--eps", type=_type(parse_floats, "eps"), help="comma separated ε values")
    common.add_argument("--grid", type=int, help=f"finite difference intervals (default {DEFAULT_GRID})")
    common.add_argument("--lmax", type=int, help=f"Galerkin degree (default {DEFAULT_LMAX})")
    common.add_argument("--count", type=int, help="eigenvalues per mode (default 10)")
    common.add_argument("--levels", type=_type(parse_ints, "levels"), help="sphere levels, e.g. 1-4")
    common.add_argument("--modes", type=_type(parse_ints, "modes"), help="azimuthal modes, e.g. 1-5")
    common.add_argument("--b-min", dest="b_min", type=float, help="smallest polar axis (default 0.1)")
    common.add_argument("--b-max", dest="b_max", type=float, help="largest polar axis (default 500)")
    common.add_argument("--b-count", dest="b_count", type=int, help="logarithmic samples (default 60)")
    common.add_argument(
        "--nodal-grid",
        dest="nodal_grid",
        type=_type(lambda text: tuple(int(value) for value in parse_floats(text, 2)), "nodal_grid"),
        help="n_phi,n_theta (default 800,1600)",
    )
    common.add_argument(
        "--no-resolution-check", dest="resolution_check", action="store_false",
        help="skip the recount at twice the nodal grid",
    )
    common.add_argument("--random-specs", dest="random_specs", type=int, help="random triaxial shapes in verify")
    common.add_argument("--pgm-dir", dest="pgm_dir", help="dump nodal sign patterns as graymaps")
    common.add_argument("--jobs", type=int, help="worker processes (default 1)")
    common.add_argument("--format", dest="fmt", choices=FORMATS, help="output format (default csv)")
    common.add_argument("--out", help="output path (default <command>.<format>)")
    common.add_argument("--seed", type=int, help="seed of randomized checks (default 0)")
    common.add_argument("--pole-bc", dest="pole_bc", choices=[item.value for item in PoleBC])
    common.add_argument("--analytic-tolerance", dest="analytic_tolerance", type=float, help="Λ₁ column tolerance")
    common.add_argument("--numeric-tolerance", dest="numeric_tolerance", type=float, help="slope column tolerance")
    common.add_argument("--verbose", action="store_true", help="log INFO to stderr")
    common.add_argument("--debug", action="store_true", help="log DEBUG to stderr")
    common.add_argument("--progress", action="store_true", help="report progress to stderr")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = SpectrumArgumentParser(
        prog="ellipsoid-spectrum",
        description="Laplace–Beltrami eigenvalues of near-spherical ellipsoids",
    )
    parser.add_argument("--version", action="version", version=__version__)
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=SpectrumArgumentParser)
    common = _common_options()
    for name, func in COMMANDS.items():
        subparsers.add_parser(name, parents=[common], help=func.__doc__.splitlines()[0])
    return parser


RUNTIME_OPTIONS = ("verbose", "debug", "progress")


def parse_args(argv: Optional[List[str]] = None) -> Tuple[RunConfig, Dict[str, bool]]:
    """RunConfig from defaults, then the --config file, then explicit flags"""
    namespace = vars(build_parser().parse_args(argv))
    runtime = {name: bool(namespace.pop(name, False)) for name in RUNTIME_OPTIONS}
    values: Dict[str, Any] = {}
    config_file = namespace.pop("config_file", None)
    if config_file:
        try:
            with open(config_file, encoding="utf-8") as json_file:
                loaded = json.load(json_file)
        except (OSError, json.JSONDecodeError) as err:
            raise UsageError(f"Cannot read configuration {config_file}: {err}") from err
        if not isinstance(loaded, dict):
            raise UsageError(f"Configuration {config_file} must hold a JSON object")
        values.update(loaded)
    values.update(namespace)
    return RunConfig.from_mapping(values), runtime


def _print_progress(percentage, step_id, message):
    print(f"[{percentage:3d}%] {step_id} {message}", file=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    try:
        config, runtime = parse_args(argv)
    except (UsageError, TypeError) as err:
        print(f"ellipsoid-spectrum: error: {err}", file=sys.stderr)
        return EXIT_USAGE

    if runtime["debug"]:
        add_console_handler(logging.DEBUG)
    elif runtime["verbose"]:
        add_console_handler(logging.INFO)
    if runtime["progress"]:
        Progress.progress_func = _print_progress

    try:
        result = COMMANDS[config.command](config)
        if result.passed is False:
            raise VerificationFailure(f"{config.command} has failing checks, see {result.paths[0]}")
    except VerificationFailure as err:
        logger.error(str(err))
        print(f"ellipsoid-spectrum: {err}", file=sys.stderr)
        return EXIT_VERIFICATION
    except NUMERICAL_ERRORS as err:
        logger.exception(f"Numerical failure in {config.command}")
        print(f"ellipsoid-spectrum: numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError) as err:
        logger.exception(f"Invalid input for {config.command}")
        print(f"ellipsoid-spectrum: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        Progress.progress_func = None
    for path in result.paths:
        print(path)
    return EXIT_OK


class UsageError(ValueError):
    pass


class VerificationFailure(RuntimeError):
    pass


if __name__ == "__main__":
    sys.exit(main())
