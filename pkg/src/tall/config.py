"""YAML pipeline configuration with CLI-flag overrides.

One document with nested sections; unknown keys are rejected so typos fail
fast, before any output is written.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .imgio import DEFAULT_PNG_LEVEL
from .sampling import SamplerConfig
from .transform import (
    DEFAULT_LAYOUT_NAME,
    DEFAULT_MASK_SIZE,
    DEFAULT_THUMB_SIDE,
    LayoutSpec,
    layout_catalog,
)

__all__ = [
    "ConfigError",
    "MaskConfig",
    "FaceCropConfig",
    "ThumbnailConfig",
    "AnalysisConfig",
    "PipelineConfig",
    "parse_order_setting",
]

MISSING_BBOX_POLICIES = ("full_frame", "skip")


class ConfigError(Exception):
    """Invalid or inconsistent configuration."""


@dataclass(frozen=True)
class MaskConfig:
    enabled: bool = True
    size: int = DEFAULT_MASK_SIZE

    def __post_init__(self) -> None:
        if self.size < 0:
            raise ConfigError(f"mask.size must be >= 0, got {self.size}")


@dataclass(frozen=True)
class FaceCropConfig:
    margin: float = 0.3
    missing_bbox: str = "full_frame"

    def __post_init__(self) -> None:
        if self.margin < 0:
            raise ConfigError(f"face_crop.margin must be >= 0, got {self.margin}")
        if self.missing_bbox not in MISSING_BBOX_POLICIES:
            raise ConfigError(
                f"face_crop.missing_bbox must be one of {MISSING_BBOX_POLICIES}, "
                f"got {self.missing_bbox!r}"
            )


@dataclass(frozen=True)
class ThumbnailConfig:
    side: int = DEFAULT_THUMB_SIDE
    frame_side: int = DEFAULT_THUMB_SIDE
    layout: str = DEFAULT_LAYOUT_NAME
    order: str = "forward"
    fill_missing: float = 0.0
    png_level: int = DEFAULT_PNG_LEVEL

    def __post_init__(self) -> None:
        if self.side < 1:
            raise ConfigError(f"thumbnail.side must be >= 1, got {self.side}")
        if self.frame_side < 1:
            raise ConfigError(f"thumbnail.frame_side must be >= 1, got {self.frame_side}")
        if not (0 <= self.png_level <= 9):
            raise ConfigError(f"thumbnail.png_level must be in [0, 9], got {self.png_level}")
        parse_order_setting(self.order)


@dataclass(frozen=True)
class AnalysisConfig:
    input_side: int = 224
    patch_size: int = 4
    frame_rows: int = 2
    frame_cols: int = 2
    windows: tuple[int, ...] = (14, 14, 14, 7)

    def __post_init__(self) -> None:
        if self.input_side < 1 or self.patch_size < 1:
            raise ConfigError("analysis.input_side and analysis.patch_size must be >= 1")
        if self.input_side % self.patch_size:
            raise ConfigError(
                f"analysis.input_side {self.input_side} not divisible by "
                f"patch_size {self.patch_size}"
            )
        if self.frame_rows < 1 or self.frame_cols < 1:
            raise ConfigError("analysis frame grid must be at least 1x1")
        windows = tuple(int(w) for w in self.windows)
        if not windows or any(w < 1 for w in windows):
            raise ConfigError(f"analysis.windows must be positive, got {self.windows}")
        object.__setattr__(self, "windows", windows)

    @property
    def token_side(self) -> int:
        return self.input_side // self.patch_size


@dataclass(frozen=True)
class PipelineConfig:
    seed: int = 0
    default_label: str = "real"
    workers: int = 1
    sampler: SamplerConfig = field(
        default_factory=lambda: SamplerConfig(num_clips=8, clip_len=4)
    )
    mask: MaskConfig = field(default_factory=MaskConfig)
    face_crop: FaceCropConfig = field(default_factory=FaceCropConfig)
    thumbnail: ThumbnailConfig = field(default_factory=ThumbnailConfig)
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    custom_layouts: dict = field(default_factory=dict)

    def resolve_layout(self) -> tuple[str, LayoutSpec]:
        name = self.thumbnail.layout
        catalog = layout_catalog()
        catalog.update(self.custom_layouts)
        if name not in catalog:
            raise ConfigError(
                f"unknown layout {name!r}; available: {sorted(catalog)}"
            )
        layout = catalog[name]
        if self.thumbnail.fill_missing != layout.fill_missing:
            layout = LayoutSpec(
                layout.rows, layout.cols, layout.slots,
                fill_missing=self.thumbnail.fill_missing,
            )
        return name, layout

    def validate_for_dataset(self) -> None:
        """Reject clip/layout mismatches before any output is written."""
        _, layout = self.resolve_layout()
        if layout.num_slots != self.sampler.clip_len:
            raise ConfigError(
                f"layout {self.thumbnail.layout!r} has {layout.num_slots} slots "
                f"but sampler.clip_len is {self.sampler.clip_len}"
            )
        kind, keep = parse_order_setting(self.thumbnail.order)
        if kind == "absence" and keep > self.sampler.clip_len:
            raise ConfigError(
                f"order keeps {keep} frames but clips have only "
                f"{self.sampler.clip_len}"
            )


def parse_order_setting(text: str) -> tuple[str, int | None]:
    """Parse an order string: forward, reverse, random, or absence:<k>."""
    if text in ("forward", "reverse", "random"):
        return text, None
    if text.startswith("absence:"):
        try:
            keep = int(text.split(":", 1)[1])
        except ValueError:
            raise ConfigError(f"bad absence count in order {text!r}") from None
        if keep < 1:
            raise ConfigError(f"absence keep count must be >= 1, got {keep}")
        return "absence", keep
    raise ConfigError(
        f"unknown order {text!r}; expected forward, reverse, random, or absence:<k>"
    )


def _expect_mapping(value, where: str) -> dict:
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(f"{where} must be a mapping, got {type(value).__name__}")
    return value


def _check_keys(mapping: dict, allowed: set[str], where: str) -> None:
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"unknown {where} keys: {sorted(unknown)}")


def _coerce_int(mapping: dict, key: str, default: int, where: str) -> int:
    value = mapping.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}.{key} must be an integer, got {value!r}")
    return value


def _coerce_bool(mapping: dict, key: str, default: bool, where: str) -> bool:
    value = mapping.get(key, default)
    if not isinstance(value, bool):
        raise ConfigError(f"{where}.{key} must be a boolean, got {value!r}")
    return value


def _coerce_float(mapping: dict, key: str, default: float, where: str) -> float:
    value = mapping.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}.{key} must be a number, got {value!r}")
    return float(value)


def _parse_custom_layouts(mapping: dict) -> dict:
    layouts = {}
    for name, entry in mapping.items():
        entry = _expect_mapping(entry, f"layouts.{name}")
        _check_keys(entry, {"rows", "cols", "slots", "fill_missing"}, f"layouts.{name}")
        try:
            layouts[str(name)] = LayoutSpec(
                rows=entry.get("rows", 1),
                cols=entry.get("cols", 1),
                slots=tuple(tuple(s) for s in entry.get("slots", ())),
                fill_missing=float(entry.get("fill_missing", 0.0)),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad layout {name!r}: {exc}") from exc
    return layouts


def config_from_mapping(mapping: dict) -> PipelineConfig:
    """Validate a parsed YAML mapping into a PipelineConfig."""
    mapping = _expect_mapping(mapping, "config")
    _check_keys(
        mapping,
        {"seed", "default_label", "workers", "sampler", "mask", "face_crop",
         "thumbnail", "analysis", "layouts"},
        "config",
    )
    seed = _coerce_int(mapping, "seed", 0, "config")
    workers = _coerce_int(mapping, "workers", 1, "config")
    if workers < 1:
        raise ConfigError(f"workers must be >= 1, got {workers}")
    label = mapping.get("default_label", "real")
    if label not in ("real", "fake"):
        raise ConfigError(f"default_label must be 'real' or 'fake', got {label!r}")

    sampler_map = _expect_mapping(mapping.get("sampler"), "sampler")
    _check_keys(sampler_map, {"num_clips", "clip_len", "allow_short"}, "sampler")
    mask_map = _expect_mapping(mapping.get("mask"), "mask")
    _check_keys(mask_map, {"enabled", "size"}, "mask")
    face_map = _expect_mapping(mapping.get("face_crop"), "face_crop")
    _check_keys(face_map, {"margin", "missing_bbox"}, "face_crop")
    thumb_map = _expect_mapping(mapping.get("thumbnail"), "thumbnail")
    _check_keys(
        thumb_map,
        {"side", "frame_side", "layout", "order", "fill_missing", "png_level"},
        "thumbnail"
    )
    analysis_map = _expect_mapping(mapping.get("analysis"), "analysis")
    _check_keys(
        analysis_map,
        {"input_side", "patch_size", "frame_rows", "frame_cols", "windows"},
        "analysis",
    )

    try:
        sampler = SamplerConfig(
            num_clips=_coerce_int(sampler_map, "num_clips", 8, "sampler"),
            clip_len=_coerce_int(sampler_map, "clip_len", 4, "sampler"),
            seed=seed,
            allow_short=_coerce_bool(sampler_map, "allow_short", False, "sampler"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    windows = analysis_map.get("windows", (14, 14, 14, 7))
    if not isinstance(windows, (list, tuple)):
        raise ConfigError(f"analysis.windows must be a list, got {windows!r}")

    return PipelineConfig(
        seed=seed,
        default_label=label,
        workers=workers,
        sampler=sampler,
        mask=MaskConfig(
            enabled=_coerce_bool(mask_map, "enabled", True, "mask"),
            size=_coerce_int(mask_map, "size", DEFAULT_MASK_SIZE, "mask"),
        ),
        face_crop=FaceCropConfig(
            margin=_coerce_float(face_map, "margin", 0.3, "face_crop"),
            missing_bbox=face_map.get("missing_bbox", "full_frame"),
        ),
        thumbnail=ThumbnailConfig(
            side=_coerce_int(thumb_map, "side", DEFAULT_THUMB_SIDE, "thumbnail"),
            frame_side=_coerce_int(thumb_map, "frame_side", DEFAULT_THUMB_SIDE, "thumbnail"),
            layout=str(thumb_map.get("layout", DEFAULT_LAYOUT_NAME)),
            order=str(thumb_map.get("order", "forward")),
            fill_missing=_coerce_float(thumb_map, "fill_missing", 0.0, "thumbnail"),
            png_level=_coerce_int(thumb_map, "png_level", DEFAULT_PNG_LEVEL, "thumbnail"),
        ),
        analysis=AnalysisConfig(
            input_side=_coerce_int(analysis_map, "input_side", 224, "analysis"),
            patch_size=_coerce_int(analysis_map, "patch_size", 4, "analysis"),
            frame_rows=_coerce_int(analysis_map, "frame_rows", 2, "analysis"),
            frame_cols=_coerce_int(analysis_map, "frame_cols", 2, "analysis"),
            windows=tuple(windows),
        ),
        custom_layouts=_parse_custom_layouts(
            _expect_mapping(mapping.get("layouts"), "layouts")
        ),
    )


def load_config(path: str | Path | None, overrides: dict | None = None) -> PipelineConfig:
    """Load YAML config (all sections optional) and apply nested overrides."""
    mapping: dict = {}
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        try:
            loaded = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"bad YAML in {path}: {exc}") from exc
        mapping = _expect_mapping(loaded, "config")
    if overrides:
        mapping = _merge(mapping, overrides)
    return config_from_mapping(mapping)


def _merge(base: dict, extra: dict) -> dict:
    merged = dict(base)
    for key, value in extra.items():
        if value is None:
            continue
        if isinstance(value, dict):
            merged[key] = _merge(_expect_mapping(merged.get(key), key), value)
        else:
            merged[key] = value
    return merged
