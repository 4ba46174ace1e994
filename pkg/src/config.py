"""Configuration management."""

import os
from pathlib import Path
from dataclasses import dataclass
from dotenv import load_dotenv

load_dotenv()


def _load_toml_defaults() -> dict:
    try:
        from .config_manager import load_config_file
        return load_config_file()
    except Exception:
        return {}


_file_cfg = _load_toml_defaults()


def _get(key: str, env_key: str | None = None) -> str | None:
    env = env_key or key.upper()
    val = os.getenv(env)
    if val is not None:
        return val
    val = _file_cfg.get(key)
    if val is not None:
        return str(val)
    return None


@dataclass
class Config:
    log_level: str = _get("log_level", "LOG_LEVEL") or "info"

    # Data directory (logs)
    data_dir: Path = Path(
        _get("data_dir", "ZERNQ_DATA_DIR")
        or str(Path.home() / ".local/share/zernq")
    ).expanduser()

    # Compute
    threads: int = int(_get("threads", "ZERNQ_THREADS") or "1")
    grid_size: int = int(_get("grid_size", "ZERNQ_GRID_SIZE") or "256")

    # Numerics
    epsilon: float = float(_get("epsilon", "ZERNQ_EPSILON") or "1e-6")
    truncation_margin: int = int(_get("truncation_margin", "ZERNQ_TRUNCATION_MARGIN") or "12")
    fresnel_tolerance: float = float(_get("fresnel_tolerance", "ZERNQ_FRESNEL_TOL") or "1e-12")

    # Output: comma-separated subset of "csv", "pgm"
    output_format: str = _get("output_format", "ZERNQ_OUTPUT_FORMAT") or "csv,pgm"

    def formats(self) -> list[str]:
        return [f.strip() for f in self.output_format.split(",") if f.strip()]


config = Config()
