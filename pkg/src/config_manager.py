"""Config file management for zernq."""

from pathlib import Path

import tomli_w

CONFIG_DIR = Path.home() / ".config" / "zernq"
CONFIG_FILE = CONFIG_DIR / "config.toml"

# Flat key -> TOML section mapping
_SECTIONS = {
    "log_level": "general",
    "data_dir": "general",
    "threads": "compute",
    "grid_size": "compute",
    "epsilon": "numerics",
    "truncation_margin": "numerics",
    "fresnel_tolerance": "numerics",
    "output_format": "output",
}


def load_config_file(path: Path | None = None) -> dict:
    """Read config from TOML file, return flat dict."""
    path = path or CONFIG_FILE
    if not path.exists():
        return {}

    import tomllib

    with open(path, "rb") as f:
        data = tomllib.load(f)

    # Flatten sections (one level deep)
    flat: dict = {}
    for section_key, section_data in data.items():
        if isinstance(section_data, dict):
            for k, v in section_data.items():
                flat[k] = v
        else:
            flat[section_key] = section_data
    return flat


def save_config_file(flat: dict, path: Path | None = None) -> Path:
    """Write flat config dict to TOML file with sections."""
    path = path or CONFIG_FILE
    path.parent.mkdir(parents=True, exist_ok=True)

    # Group by section
    sections: dict[str, dict] = {}
    for key, value in flat.items():
        if value is None or value == "":
            continue
        if isinstance(value, Path):
            value = str(value)
        section = _SECTIONS.get(key, "general")
        sections.setdefault(section, {})[key] = value

    path.write_text(tomli_w.dumps(sections), encoding="utf-8")
    return path
