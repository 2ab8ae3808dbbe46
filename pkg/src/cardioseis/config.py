"""Pipeline configuration: defaults, flat key=value config files, overrides."""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .errors import InputError

DEFAULT_CHANNEL_MAP = {"time": "time_s", "scg": "scg_z", "ecg": "ecg", "flow": "flow_lps"}


@dataclass(frozen=True)
class PipelineConfig:
    inputs: tuple[str, ...] = ()
    channel_map: dict = field(default_factory=lambda: dict(DEFAULT_CHANNEL_MAP))
    acquisition_fs: float = 10000.0
    analysis_fs: float = 320.0
    lowpass_cutoff_hz: float = 100.0
    template_start_s: float = 0.0
    template_length_s: float = 0.25
    threshold_frac: float = 0.5
    min_separation_s: float = 0.4
    detrend: bool = True
    max_shift: int | None = None          # default: template length // 4
    outlier_screen: bool = True
    out_dir: str = "out"
    seed: int = 0

    def __post_init__(self):
        if self.analysis_fs > self.acquisition_fs:
            raise InputError("analysis_fs must not exceed acquisition_fs")
        if self.template_length_s <= 0:
            raise InputError("template_length_s must be > 0")


_BOOL = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}

# config-file key -> (field name, parser)
_KEYS = {
    "input": ("inputs", lambda v: tuple(s.strip() for s in v.split(",") if s.strip())),
    "acquisition_fs": ("acquisition_fs", float),
    "analysis_fs": ("analysis_fs", float),
    "lowpass_cutoff_hz": ("lowpass_cutoff_hz", float),
    "template_start_s": ("template_start_s", float),
    "template_length_s": ("template_length_s", float),
    "threshold_frac": ("threshold_frac", float),
    "min_separation_s": ("min_separation_s", float),
    "detrend": ("detrend", lambda v: _parse_bool(v)),
    "max_shift": ("max_shift", lambda v: None if v.lower() == "auto" else int(v)),
    "outlier_screen": ("outlier_screen", lambda v: _parse_bool(v)),
    "out_dir": ("out_dir", str),
    "seed": ("seed", int),
    "channel.time": None,
    "channel.scg": None,
    "channel.ecg": None,
    "channel.flow": None,
}


def _parse_bool(v: str) -> bool:
    try:
        return _BOOL[v.strip().lower()]
    except KeyError:
        raise InputError(f"not a boolean: {v!r}") from None


def load_config(path) -> PipelineConfig:
    """Parse a flat `key = value` config file. Unknown keys are errors."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"config file not found: {path}")
    values: dict = {}
    channel_map = dict(DEFAULT_CHANNEL_MAP)
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{path}:{lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _KEYS:
            raise InputError(f"{path}:{lineno}: unknown key {key!r}")
        if key.startswith("channel."):
            channel_map[key.split(".", 1)[1]] = value
            continue
        name, parse = _KEYS[key]
        try:
            values[name] = parse(value)
        except (ValueError, InputError) as exc:
            raise InputError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
    return PipelineConfig(channel_map=channel_map, **values)


def apply_overrides(config: PipelineConfig, **overrides) -> PipelineConfig:
    """Replace fields for which a non-None override was given."""
    known = {f.name for f in fields(PipelineConfig)}
    updates = {k: v for k, v in overrides.items() if v is not None}
    unknown = set(updates) - known
    if unknown:
        raise InputError(f"unknown config fields: {sorted(unknown)}")
    return replace(config, **updates) if updates else config
