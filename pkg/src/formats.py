"""On-disk formats: expansion/state/report JSON, FieldGrid CSV and PGM, config echo.

Every writer goes through ``atomic_write`` (temp file in the target directory,
then ``os.replace``), so a failed run never leaves a partial file behind.
Floats are written with 17 significant digits.
"""

import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .core.grid import FieldGrid, GridSpec
from .core.mode_index import ModeIndex, mode_count, to_single_index
from .core.zernike import ZernikeExpansion
from .errors import FormatError, InvalidMode
from .quantum.states import TwoPhotonState

log = logging.getLogger(__name__)

CSV_HEADER = "# width,height,extent_x,extent_y,plane"
PGM_MAXVAL = 65535


def _g17(value: float) -> str:
    return format(float(value), ".17g")


def atomic_write(path: Path, data: str | bytes) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, mode, **({} if mode == "wb" else {"encoding": "utf-8", "newline": "\n"})) as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    log.debug("wrote %s", path)
    return path


def write_json(path: Path, payload) -> Path:
    return atomic_write(path, json.dumps(payload, indent=2, ensure_ascii=False) + "\n")


def read_json(path: Path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: not valid JSON ({e})") from e


# ── Provenance ──


def config_hash(flags: dict) -> str:
    """sha256 over the canonical JSON of the effective flags."""
    canonical = json.dumps(flags, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def provenance(command: str, flags: dict) -> dict:
    return {"tool": "zernq", "version": __version__, "command": command, "config_hash": config_hash(flags)}


def write_config_echo(prefix: Path, command: str, flags: dict) -> Path:
    """``<prefix>.config.json`` next to the run's outputs."""
    payload = {**provenance(command, flags), "flags": flags}
    return write_json(Path(f"{prefix}.config.json"), payload)


# ── Expansion JSON ──


def expansion_to_dict(exp: ZernikeExpansion) -> dict:
    return {
        "n_max": exp.n_max,
        "coefficients": [
            {"n": idx.n, "m": idx.m, "re": float(a.real), "im": float(a.imag)} for idx, a in exp.items()
        ],
    }


def expansion_from_dict(payload: dict) -> ZernikeExpansion:
    try:
        n_max = int(payload["n_max"])
        coefficients = {
            ModeIndex(int(c["n"]), int(c["m"])): complex(float(c["re"]), float(c["im"]))
            for c in payload["coefficients"]
        }
    except InvalidMode:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"malformed expansion payload: {e!r}") from e
    return ZernikeExpansion(coefficients, n_max)


def write_expansion(path: Path, exp: ZernikeExpansion, meta: dict | None = None) -> Path:
    payload = expansion_to_dict(exp)
    if meta:
        payload["provenance"] = meta
    return write_json(path, payload)


def read_expansion(path: Path) -> ZernikeExpansion:
    return expansion_from_dict(read_json(path))


# ── Two-photon state / report JSON ──


def state_to_dict(state: TwoPhotonState) -> dict:
    return {
        "n_max": state.n_max,
        "raw_norm": state.raw_norm,
        "entries": [
            {"n1": a.n, "m1": a.m, "n2": b.n, "m2": b.m, "re": float(z.real), "im": float(z.imag)}
            for a, b, z in state.nonzero_entries()
        ],
    }


def state_from_dict(payload: dict) -> TwoPhotonState:
    try:
        n_max = int(payload["n_max"])
        d = mode_count(n_max)
        zeta = np.zeros((d, d), dtype=complex)
        for e in payload["entries"]:
            i = to_single_index(ModeIndex(int(e["n1"]), int(e["m1"])))
            j = to_single_index(ModeIndex(int(e["n2"]), int(e["m2"])))
            zeta[i, j] = complex(float(e["re"]), float(e["im"]))
        raw_norm = float(payload.get("raw_norm", 1.0))
    except (KeyError, TypeError, ValueError, IndexError) as e:
        raise FormatError(f"malformed two-photon payload: {e!r}") from e
    return TwoPhotonState(zeta, n_max, normalized=True, raw_norm=raw_norm)


# ── FieldGrid CSV ──


def grid_to_csv(grid: FieldGrid) -> str:
    """Header, one metadata row, then ``ix,iy,re,im`` rows (x fastest)."""
    spec = grid.spec
    lines = [
        CSV_HEADER,
        f"# {spec.width},{spec.height},{_g17(spec.extent_x)},{_g17(spec.extent_y)},{grid.plane}",
    ]
    samples = np.asarray(grid.samples, dtype=complex)
    for iy in range(spec.height):
        row = samples[iy]
        for ix in range(spec.width):
            v = row[ix]
            lines.append(f"{ix},{iy},{_g17(v.real)},{_g17(v.imag)}")
    return "\n".join(lines) + "\n"


def write_grid_csv(path: Path, grid: FieldGrid) -> Path:
    return atomic_write(path, grid_to_csv(grid))


def read_grid_csv(path: Path) -> FieldGrid:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if len(lines) < 2 or lines[0].strip() != CSV_HEADER or not lines[1].startswith("#"):
        raise FormatError(f"{path}: missing FieldGrid CSV header")
    try:
        w, h, ex, ey, plane = lines[1][1:].strip().split(",", 4)
        spec = GridSpec(int(w), int(h), float(ex), float(ey))
        samples = np.zeros((spec.height, spec.width), dtype=complex)
        seen = 0
        for line in lines[2:]:
            if not line.strip():
                continue
            ix, iy, re, im = line.split(",")
            samples[int(iy), int(ix)] = complex(float(re), float(im))
            seen += 1
    except (ValueError, IndexError) as e:
        raise FormatError(f"{path}: malformed FieldGrid CSV ({e})") from e
    if seen != spec.width * spec.height:
        raise FormatError(f"{path}: expected {spec.width * spec.height} samples, found {seen}")
    return FieldGrid(spec, samples, plane.strip())


# ── PGM preview ──


def grid_to_pgm(grid: FieldGrid) -> bytes:
    """P5, 16-bit big-endian, |field|^2 min-max normalised, top row (+y) first."""
    intensity = grid.intensity()
    lo, hi = float(intensity.min()), float(intensity.max())
    if hi > lo:
        scaled = np.rint((intensity - lo) / (hi - lo) * PGM_MAXVAL)
    else:
        scaled = np.zeros_like(intensity)
    pixels = scaled[::-1].astype(">u2")
    header = f"P5\n{grid.width} {grid.height}\n{PGM_MAXVAL}\n".encode("ascii")
    return header + pixels.tobytes()


def write_pgm(path: Path, grid: FieldGrid) -> Path:
    return atomic_write(path, grid_to_pgm(grid))


def write_grid(prefix: Path, grid: FieldGrid, formats: list[str]) -> list[Path]:
    """Write ``<prefix>.csv`` and/or ``<prefix>.pgm``."""
    written = []
    for fmt in formats:
        if fmt == "csv":
            written.append(write_grid_csv(Path(f"{prefix}.csv"), grid))
        elif fmt == "pgm":
            written.append(write_pgm(Path(f"{prefix}.pgm"), grid))
        else:
            raise FormatError(f"unknown output format {fmt!r} (expected csv or pgm)")
    return written
