"""zernq - Zernike-mode optics and two-photon entanglement from the command line."""

import argparse
import logging
import sys

from . import __version__
from .config import config
from .errors import (
    ConvergenceError,
    EmptyState,
    FormatError,
    GridCoverageError,
    ZernqError,
)

# Configure logging
from logging.handlers import RotatingFileHandler
from .log_context import RunTagFilter, run_tag

_log_fmt = "%(asctime)s [%(levelname)s] %(name)s%(run_tag)s: %(message)s"
_run_filter = RunTagFilter()

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_GRID_COVERAGE = 4
EXIT_CONVERGENCE = 5
EXIT_EMPTY_STATE = 6


def setup_logging(level: str | None = None, log_to_file: bool = True):
    """Console handler at the configured level plus a rotating DEBUG file under data_dir/logs."""
    _console = logging.StreamHandler()
    _console.setLevel(getattr(logging, (level or config.log_level).upper(), logging.INFO))
    _console.setFormatter(logging.Formatter(_log_fmt))
    _console.addFilter(_run_filter)
    handlers: list[logging.Handler] = [_console]

    if log_to_file:
        try:
            _log_dir = config.data_dir / "logs"
            _log_dir.mkdir(parents=True, exist_ok=True)
            _file = RotatingFileHandler(
                _log_dir / "zernq.log", maxBytes=20 * 1024 * 1024, backupCount=10, encoding="utf-8",
            )
            _file.setLevel(logging.DEBUG)
            _file.setFormatter(logging.Formatter(_log_fmt))
            _file.addFilter(_run_filter)
            handlers.append(_file)
        except OSError as e:
            print(f"warning: file logging disabled ({e})", file=sys.stderr)

    logging.basicConfig(level=logging.DEBUG, handlers=handlers, force=True)


def _add_grid_flags(p: argparse.ArgumentParser, extent: float):
    p.add_argument("--size", type=int, default=config.grid_size, help="grid width = height in pixels")
    p.add_argument("--extent", type=float, default=extent, help="half-width of the grid")


def _add_output_flags(p: argparse.ArgumentParser):
    p.add_argument("--out", help="output path prefix (default: command name)")
    p.add_argument("--format", dest="output_format", help='comma list of "csv", "pgm"')
    p.add_argument("--prune", type=float, help="drop coefficients with |a| below this")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zernq",
        description=f"zernq v{__version__} - Zernike-mode optics and two-photon entanglement",
    )
    parser.add_argument("--version", action="version", version=f"zernq {__version__}")
    parser.add_argument("--threads", type=int, help=f"worker threads (default {config.threads})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="sample Z_n^m on the pupil grid")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    _add_grid_flags(p, 1.0)
    _add_output_flags(p)

    p = sub.add_parser("fit", help="fit a pupil-grid CSV to a Zernike expansion")
    p.add_argument("--input", required=True, help="FieldGrid CSV")
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--capacity", type=int, help="quadrature capacity (default 2*nmax+8)")
    _add_output_flags(p)

    p = sub.add_parser("ft", help="image-plane (Fraunhofer) field of an expansion")
    p.add_argument("--input", required=True, help="expansion JSON")
    _add_grid_flags(p, 4.0)
    _add_output_flags(p)

    p = sub.add_parser("propagate", help="Fresnel-plane field of an expansion")
    p.add_argument("--input", required=True, help="expansion JSON")
    p.add_argument("--z", type=float, required=True, help="propagation distance")
    p.add_argument("--k", type=float, required=True, help="wavenumber")
    p.add_argument("--h-max", type=int)
    p.add_argument("--l-max", type=int)
    p.add_argument("--margin", dest="truncation_margin", type=int)
    p.add_argument("--tol", dest="fresnel_tolerance", type=float)
    _add_grid_flags(p, 4.0)
    _add_output_flags(p)

    p = sub.add_parser("product", help="linearisation coefficients of Z_a Z_b")
    p.add_argument("--a", required=True, help="mode n,m")
    p.add_argument("--b", required=True, help="mode n,m")
    p.add_argument("--out", help="also write <out>.json")

    p = sub.add_parser("spdc", help="thin-crystal two-photon state and entanglement report")
    p.add_argument("--pump", action="append", help="pump mode n,m (repeatable, unit weights)")
    p.add_argument("--pump-file", help="pump expansion JSON")
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--out", help="output path prefix (default: spdc)")

    p = sub.add_parser("verify", help="orthonormality and invariant suites")
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--plane", choices=("pupil", "image"), default="pupil")

    p = sub.add_parser("config", help="show effective settings")
    p.add_argument("--write", action="store_true", help="persist settings to the config file")
    p.add_argument("--path", help="config file to write (default ~/.config/zernq/config.toml)")

    return parser


def run(argv: list[str] | None = None) -> int:
    """Parse, dispatch and map errors onto the exit-code contract."""
    from . import commands

    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rc = commands.RunConfig.from_args(args, config)
        token = run_tag.set(f"{rc.command}:{rc.config_hash[:8]}")
        try:
            logger.info("zernq %s %s", __version__, rc.command)
            if rc.command == "config":
                return commands.cmd_config(rc, config)
            handler = getattr(commands, f"cmd_{rc.command}")
            return handler(rc)
        finally:
            run_tag.reset(token)
    except GridCoverageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_GRID_COVERAGE
    except ConvergenceError as e:
        print(f"error: {e}", file=sys.stderr)
        for key, value in e.diagnostic.items():
            print(f"  {key}: {value}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except EmptyState as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_EMPTY_STATE
    except (FormatError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        # InvalidMode, DomainError, CapacityError, DegenerateInput, ... : bad flags or inputs
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ZernqError as e:
        logger.exception("computation failed")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VERIFY_FAILED


def main():
    setup_logging()
    sys.exit(run())


if __name__ == "__main__":
    main()
