"""Batch conversion of per-video frame directories into thumbnail datasets.

Directory layout: either ``input_root/<video>/<frame>.png`` (label taken
from the config) or ``input_root/{real,fake}/<video>/<frame>.png``. Frame
filenames are zero-padded numbers. Face boxes come from a plain text file
with one ``video_id frame_number row0 col0 row1 col1`` record per line.

The manifest is written last via temp-file-then-rename, so an interrupted
run never leaves a manifest pointing at missing thumbnails.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .config import ConfigError, PipelineConfig, parse_order_setting
from .imgio import FRAME_EXTENSIONS, load_frame, save_frame
from .pixel import Rect, face_crop, resize_bilinear
from .rng import clip_stream
from .sampling import VideoMeta, sample_clip, validate_sampling
from .transform import Clip, LayoutSpec, OrderVariant, apply_mask, arrange, draw_mask

__all__ = [
    "VideoSource",
    "RunStats",
    "BBoxError",
    "find_videos",
    "load_bboxes",
    "order_for_clip",
    "convert_dataset",
    "MANIFEST_NAME",
    "MANIFEST_VERSION",
]

MANIFEST_VERSION = 1
MANIFEST_NAME = "manifest.json"


class BBoxError(ValueError):
    """Malformed face-box file."""


@dataclass(frozen=True)
class VideoSource:
    """One video directory: identity, label, and its frame files in order."""

    id: str
    label: str
    frame_paths: tuple[Path, ...]
    frame_numbers: tuple[int, ...]


@dataclass(frozen=True)
class RunStats:
    videos: int
    failed_videos: int
    thumbnails: int
    seconds: float

    @property
    def per_second(self) -> float:
        return self.thumbnails / self.seconds if self.seconds > 0 else float("inf")


def _frame_files(video_dir: Path) -> list[tuple[int, Path]]:
    entries = []
    for path in video_dir.iterdir():
        if path.is_file() and path.suffix.lower() in FRAME_EXTENSIONS and path.stem.isdigit():
            entries.append((int(path.stem), path))
    entries.sort()
    return entries


def find_videos(input_root: str | Path, default_label: str = "real") -> list[VideoSource]:
    """Scan the corpus root for video directories, sorted by id."""
    root = Path(input_root)
    if not root.is_dir():
        raise ConfigError(f"input root {root} is not a directory")
    grouped: list[tuple[str, str, Path]] = []
    label_dirs = [name for name in ("real", "fake") if (root / name).is_dir()]
    if label_dirs:
        for label in label_dirs:
            for video_dir in sorted((root / label).iterdir()):
                if video_dir.is_dir():
                    grouped.append((f"{label}/{video_dir.name}", label, video_dir))
    else:
        for video_dir in sorted(root.iterdir()):
            if video_dir.is_dir():
                grouped.append((video_dir.name, default_label, video_dir))
    sources = []
    for video_id, label, video_dir in sorted(grouped):
        entries = _frame_files(video_dir)
        sources.append(
            VideoSource(
                id=video_id,
                label=label,
                frame_paths=tuple(path for _, path in entries),
                frame_numbers=tuple(number for number, _ in entries),
            )
        )
    return sources


def load_bboxes(path: str | Path) -> dict[tuple[str, int], Rect]:
    """Parse face boxes keyed by (video id, frame number)."""
    boxes: dict[tuple[str, int], Rect] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 6:
            raise BBoxError(
                f"{path}:{lineno}: expected 6 fields "
                f"(video_id frame row0 col0 row1 col1), got {len(parts)}"
            )
        video_id = parts[0]
        try:
            frame_number = int(parts[1])
            rect = Rect(*(int(v) for v in parts[2:]))
        except ValueError as exc:
            raise BBoxError(f"{path}:{lineno}: {exc}") from exc
        if rect.height <= 0 or rect.width <= 0:
            raise BBoxError(f"{path}:{lineno}: degenerate box {rect.as_tuple()}")
        boxes[(video_id, frame_number)] = rect
    return boxes


def order_for_clip(
    kind: str, keep: int | None, rng
) -> tuple[OrderVariant, dict]:
    if kind == "random":
        # Drawn after the mask draws so toggling order never moves the mask.
        order_seed = int(rng.integers(0, 1 << 63))
        return OrderVariant.random(order_seed), {"kind": "random", "seed": order_seed}
    if kind == "absence":
        return OrderVariant.absence(keep), {"kind": "absence", "keep_count": keep}
    if kind == "reverse":
        return OrderVariant.reverse(), {"kind": "reverse"}
    return OrderVariant.forward(), {"kind": "forward"}


def _process_video(
    source: VideoSource,
    cfg: PipelineConfig,
    layout_name: str,
    layout: LayoutSpec,
    boxes: dict[tuple[str, int], Rect],
    output_root: Path,
) -> dict:
    record: dict = {
        "id": source.id,
        "label": source.label,
        "frame_count": len(source.frame_paths),
        "error": None,
        "warnings": [],
        "clips": [],
    }
    order_kind, order_keep = parse_order_setting(cfg.thumbnail.order)
    frame_side = cfg.thumbnail.frame_side
    missing_warned = False
    try:
        if not source.frame_paths:
            raise ValueError("no frame images found")
        meta = VideoMeta(total_frames=len(source.frame_paths), id=source.id)
        validate_sampling(meta, cfg.sampler)
        video_out = output_root / source.id
        video_out.mkdir(parents=True, exist_ok=True)
        for clip_i in range(cfg.sampler.num_clips):
            # Per-clip stream; draw order is pinned: clip start, then mask
            # center (when masking), then the order seed (when random).
            rng = clip_stream(cfg.seed, source.id, clip_i)
            clip_index = sample_clip(meta, cfg.sampler, clip_i, rng)

            frames = []
            for position in clip_index.frame_indices:
                frame = load_frame(source.frame_paths[position])
                bbox = boxes.get((source.id, source.frame_numbers[position]))
                if bbox is not None:
                    frame = face_crop(frame, bbox, cfg.face_crop.margin)
                elif cfg.face_crop.missing_bbox == "skip":
                    raise ValueError(
                        f"missing face box for frame {source.frame_numbers[position]} "
                        f"(policy: skip)"
                    )
                elif not missing_warned:
                    record["warnings"].append(
                        "missing face box for some frames; used full frames"
                    )
                    missing_warned = True
                frames.append(resize_bilinear(frame, frame_side, frame_side))
            clip = Clip(tuple(frames))

            mask_entry = None
            if cfg.mask.enabled:
                mask = draw_mask((frame_side, frame_side), cfg.mask.size, rng)
                clip = apply_mask(clip, mask)
                mask_entry = {
                    "center_row": mask.center_row,
                    "center_col": mask.center_col,
                    "size": mask.size,
                    "rect": list(mask.effective_rect(frame_side, frame_side).as_tuple()),
                }

            order, order_entry = order_for_clip(order_kind, order_keep, rng)
            thumb = arrange(clip, layout, order, cfg.thumbnail.side)

            rel_path = f"{source.id}/clip_{clip_i:03d}.png"
            save_frame(thumb.image, output_root / rel_path, cfg.thumbnail.png_level)
            record["clips"].append(
                {
                    "index": clip_i,
                    "segment": clip_index.segment,
                    "frame_indices": list(clip_index.frame_indices),
                    "frame_numbers": [
                        source.frame_numbers[p] for p in clip_index.frame_indices
                    ],
                    "mask": mask_entry,
                    "layout": layout_name,
                    "order": order_entry,
                    "output": rel_path,
                }
            )
    except (OSError, ValueError) as exc:
        record["error"] = str(exc)
        record["clips"] = []
    return record


def _settings_dict(cfg: PipelineConfig, layout_name: str, layout: LayoutSpec) -> dict:
    return {
        "sampler": {
            "num_clips": cfg.sampler.num_clips,
            "clip_len": cfg.sampler.clip_len,
            "allow_short": cfg.sampler.allow_short,
        },
        "mask": {"enabled": cfg.mask.enabled, "size": cfg.mask.size},
        "face_crop": {
            "margin": cfg.face_crop.margin,
            "missing_bbox": cfg.face_crop.missing_bbox,
        },
        "thumbnail": {
            "side": cfg.thumbnail.side,
            "frame_side": cfg.thumbnail.frame_side,
            "layout": layout_name,
            "layout_rows": layout.rows,
            "layout_cols": layout.cols,
            "layout_slots": [list(slot) for slot in layout.slots],
            "fill_missing": layout.fill_missing,
            "order": cfg.thumbnail.order,
            "png_level": cfg.thumbnail.png_level,
        },
    }


def write_manifest(manifest: dict, output_root: str | Path) -> Path:
    """Serialize with stable key order and rename into place atomically."""
    path = Path(output_root) / MANIFEST_NAME
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    os.replace(tmp, path)
    return path


def convert_dataset(
    input_root: str | Path,
    output_root: str | Path,
    cfg: PipelineConfig,
    bbox_path: str | Path | None = None,
) -> tuple[dict, RunStats]:
    """Convert every video under ``input_root`` and write the manifest.

    Per-video failures are recorded in the manifest and do not abort the
    run. Worker count never changes the outputs: each clip draws from its
    own keyed stream and the manifest is assembled in video-id order.
    """
    cfg.validate_for_dataset()
    layout_name, layout = cfg.resolve_layout()
    boxes = load_bboxes(bbox_path) if bbox_path is not None else {}
    sources = find_videos(input_root, cfg.default_label)
    if not sources:
        raise ConfigError(f"no video directories found under {input_root}")

    out_root = Path(output_root)
    out_root.mkdir(parents=True, exist_ok=True)

    start = time.perf_counter()
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            records = list(
                pool.map(
                    lambda src: _process_video(
                        src, cfg, layout_name, layout, boxes, out_root
                    ),
                    sources,
                )
            )
    else:
        records = [
            _process_video(src, cfg, layout_name, layout, boxes, out_root)
            for src in sources
        ]
    elapsed = time.perf_counter() - start

    manifest = {
        "version": MANIFEST_VERSION,
        "global_seed": cfg.seed,
        "settings": _settings_dict(cfg, layout_name, layout),
        "videos": records,
    }
    write_manifest(manifest, out_root)

    stats = RunStats(
        videos=len(records),
        failed_videos=sum(1 for r in records if r["error"] is not None),
        thumbnails=sum(len(r["clips"]) for r in records),
        seconds=elapsed,
    )
    return manifest, stats
