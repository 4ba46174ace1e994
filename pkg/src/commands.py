"""CLI command implementations. Each ``cmd_*`` takes a RunConfig and returns an exit code."""

import argparse
import dataclasses
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import Config
from .config_manager import CONFIG_FILE, save_config_file
from .core.coupling import check_normalization, coupling_coefficients, coupling_records
from .core.grid import GridSpec
from .core.mode_index import ModeIndex, enumerate_up_to, parse_mode
from .core.quadrature import build_quadrature
from .core.zernike import ZernikeExpansion, fit_grid, prune, pupil_gram, residual_rms, zernike_grid
from .errors import DomainError
from .formats import (
    config_hash,
    provenance,
    read_expansion,
    read_grid_csv,
    write_config_echo,
    write_expansion,
    write_grid,
    state_to_dict,
    write_json,
)
from .optics.propagation import FresnelParams, TruncationRule, fraunhofer_field, fresnel_field, image_gram
from .quantum.entanglement import entanglement_report
from .quantum.spdc import spdc_zeta

log = logging.getLogger(__name__)

PUPIL_GRAM_TOLERANCE = 1e-12
IMAGE_GRAM_TOLERANCE = 2e-3
COUPLING_TOLERANCE = 1e-12

# Flags that only say where results go; they do not enter the config hash.
_UNHASHED = {"out", "func", "threads"}


@dataclass
class RunConfig:
    """Effective settings of one CLI run: parsed flags layered over ``Config``."""

    command: str
    flags: dict
    out: Path
    threads: int = 1
    formats: list[str] = field(default_factory=lambda: ["csv", "pgm"])
    epsilon: float = 1e-6
    truncation_margin: int = 12
    fresnel_tolerance: float = 1e-12

    @classmethod
    def from_args(cls, args: argparse.Namespace, cfg: Config) -> "RunConfig":
        flags = {k: v for k, v in vars(args).items() if k != "func"}
        for key in ("threads", "epsilon", "truncation_margin", "fresnel_tolerance", "output_format"):
            if flags.get(key) is None:
                flags[key] = getattr(cfg, key)
        threads = int(flags["threads"])
        if threads < 1:
            raise DomainError(f"--threads must be >= 1, got {threads}")
        formats = [f.strip() for f in str(flags["output_format"]).split(",") if f.strip()]
        return cls(
            command=args.command,
            flags=flags,
            out=Path(flags.get("out") or args.command),
            threads=threads,
            formats=formats,
            epsilon=float(flags["epsilon"]),
            truncation_margin=int(flags["truncation_margin"]),
            fresnel_tolerance=float(flags["fresnel_tolerance"]),
        )

    @property
    def hashed_flags(self) -> dict:
        return {k: v for k, v in self.flags.items() if k not in _UNHASHED}

    @property
    def config_hash(self) -> str:
        return config_hash(self.hashed_flags)

    def provenance(self) -> dict:
        return provenance(self.command, self.hashed_flags)

    def echo(self) -> Path:
        return write_config_echo(self.out, self.command, self.hashed_flags)


def _spec(run: RunConfig, default_extent: float) -> GridSpec:
    size = run.flags.get("size")
    extent = run.flags.get("extent")
    return GridSpec.square(int(size), float(extent if extent is not None else default_extent))


def _maybe_prune(run: RunConfig, exp: ZernikeExpansion) -> ZernikeExpansion:
    threshold = run.flags.get("prune")
    return prune(exp, float(threshold)) if threshold is not None else exp


# ── Commands ──


def cmd_eval(run: RunConfig) -> int:
    idx = ModeIndex(int(run.flags["n"]), int(run.flags["m"]))
    grid = zernike_grid(idx, _spec(run, 1.0), run.threads)
    for path in write_grid(run.out, grid, run.formats):
        print(path)
    run.echo()
    return 0


def cmd_fit(run: RunConfig) -> int:
    n_max = int(run.flags["nmax"])
    if n_max < 0:
        raise DomainError(f"--nmax must be >= 0, got {n_max}")
    capacity = run.flags.get("capacity")
    quad = build_quadrature(int(capacity) if capacity is not None else 2 * n_max + 8)
    grid = read_grid_csv(Path(run.flags["input"]))
    exp = _maybe_prune(run, fit_grid(grid, n_max, quad))
    rms = residual_rms(exp, grid)
    path = write_expansion(Path(f"{run.out}.json"), exp, {**run.provenance(), "residual_rms": rms})
    run.echo()
    print(path)
    print(f"residual_rms {rms:.17g}")
    return 0


def cmd_ft(run: RunConfig) -> int:
    exp = _maybe_prune(run, read_expansion(Path(run.flags["input"])))
    grid = fraunhofer_field(exp, _spec(run, 4.0), run.threads)
    for path in write_grid(run.out, grid, run.formats):
        print(path)
    run.echo()
    return 0


def cmd_propagate(run: RunConfig) -> int:
    params = FresnelParams(float(run.flags["z"]), float(run.flags["k"]))
    rule = TruncationRule(
        h_max=run.flags.get("h_max"),
        l_max=run.flags.get("l_max"),
        margin=run.truncation_margin,
        tolerance=run.fresnel_tolerance,
    )
    exp = _maybe_prune(run, read_expansion(Path(run.flags["input"])))
    grid = fresnel_field(exp, params, _spec(run, 4.0), rule, run.threads)
    for path in write_grid(run.out, grid, run.formats):
        print(path)
    run.echo()
    return 0


def cmd_product(run: RunConfig) -> int:
    a = parse_mode(run.flags["a"])
    b = parse_mode(run.flags["b"])
    records = coupling_records(coupling_coefficients(a, b))
    print(json.dumps(records, indent=2))
    if run.flags.get("out"):
        write_json(Path(f"{run.out}.json"), {"provenance": run.provenance(), "entries": records})
        run.echo()
    return 0


def _pump(run: RunConfig) -> ZernikeExpansion:
    if run.flags.get("pump_file"):
        return read_expansion(Path(run.flags["pump_file"]))
    modes = run.flags.get("pump") or ["0,0"]
    coefficients = {parse_mode(text): 1.0 + 0.0j for text in modes}
    return ZernikeExpansion(coefficients, max(idx.n for idx in coefficients))


def cmd_spdc(run: RunConfig) -> int:
    n_max = int(run.flags["nmax"])
    if n_max < 0:
        raise DomainError(f"--nmax must be >= 0, got {n_max}")
    pump = _pump(run)
    state = spdc_zeta(pump, n_max)
    report = entanglement_report(state, run.epsilon)
    meta = run.provenance()
    state_path = write_json(Path(f"{run.out}.state.json"), {**state_to_dict(state), "provenance": meta})
    report_path = write_json(Path(f"{run.out}.report.json"), {**report, "provenance": meta})
    run.echo()
    print(state_path)
    print(report_path)
    print(f"verdict {report['verdict']} purity {report['purity']:.17g} schmidt_number {report['schmidt_number']:.6g}")
    return 0


def verify_suite(n_max: int, plane: str = "pupil") -> dict[str, tuple[float, float]]:
    """Named checks -> (max deviation, tolerance)."""
    if n_max < 0:
        raise DomainError(f"--nmax must be >= 0, got {n_max}")
    modes = enumerate_up_to(n_max)
    results: dict[str, tuple[float, float]] = {}
    results["mode_count"] = (float(abs(len(modes) - (n_max + 1) * (n_max + 2) // 2)), 0.0)
    if plane == "pupil":
        gram = pupil_gram(n_max, build_quadrature(n_max))
        deviation = float(np.max(np.abs(gram - math.pi * np.eye(len(modes)))))
        results["pupil_gram"] = (deviation, PUPIL_GRAM_TOLERANCE)
    elif plane == "image":
        gram = image_gram(n_max)
        deviation = float(np.max(np.abs(gram - math.pi * np.eye(len(modes)))))
        results["image_gram"] = (deviation, IMAGE_GRAM_TOLERANCE)
    else:
        raise DomainError(f"--plane must be pupil or image, got {plane!r}")
    results["coupling_normalization"] = (check_normalization()["projection"], COUPLING_TOLERANCE)
    return results


def cmd_verify(run: RunConfig) -> int:
    results = verify_suite(int(run.flags["nmax"]), run.flags.get("plane") or "pupil")
    ok = True
    for name, (deviation, tolerance) in results.items():
        passed = deviation <= tolerance
        ok = ok and passed
        print(f"{name:<24} max_dev {deviation:.3e}  tol {tolerance:.1e}  {'ok' if passed else 'FAIL'}")
    return 0 if ok else 1


def cmd_config(run: RunConfig, cfg: Config) -> int:
    settings = {f.name: getattr(cfg, f.name) for f in dataclasses.fields(cfg)}
    for key, value in settings.items():
        print(f"{key} = {value}")
    if run.flags.get("write"):
        path = save_config_file(settings, Path(run.flags["path"]) if run.flags.get("path") else CONFIG_FILE)
        print(f"wrote {path}")
    return 0
