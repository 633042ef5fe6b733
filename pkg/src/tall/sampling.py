"""Dense clip sampling.

A video of ``total_frames`` frames is divided into ``num_clips`` equal
segments (floor division; trailing remainder frames are never sampled) and
one run of ``clip_len`` consecutive frames is drawn uniformly inside each
segment.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .rng import clip_stream

__all__ = [
    "VideoMeta",
    "SamplerConfig",
    "ClipIndex",
    "VideoTooShortError",
    "SegmentTooShortError",
    "validate_sampling",
    "sample_clip",
    "sample_clips",
]


class VideoTooShortError(ValueError):
    """Video has fewer frames than one clip needs."""


class SegmentTooShortError(ValueError):
    """Segments are shorter than one clip and short clips are not allowed."""


@dataclass(frozen=True)
class VideoMeta:
    """Frame count and identity of one source video."""

    total_frames: int
    id: str
    fps: float | None = None

    def __post_init__(self) -> None:
        if self.total_frames < 1:
            raise ValueError(f"total_frames must be >= 1, got {self.total_frames}")


@dataclass(frozen=True)
class SamplerConfig:
    num_clips: int
    clip_len: int
    seed: int = 0
    allow_short: bool = False

    def __post_init__(self) -> None:
        if self.num_clips < 1:
            raise ValueError(f"num_clips must be >= 1, got {self.num_clips}")
        if self.clip_len < 1:
            raise ValueError(f"clip_len must be >= 1, got {self.clip_len}")


@dataclass(frozen=True)
class ClipIndex:
    """One sampled clip: its segment and the consecutive frame positions."""

    segment: int
    start_frame: int
    frame_indices: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        indices = tuple(int(i) for i in self.frame_indices)
        if not indices:
            raise ValueError("frame_indices must be non-empty")
        if indices[0] != self.start_frame:
            raise ValueError("frame_indices must start at start_frame")
        for prev, cur in zip(indices, indices[1:]):
            if cur != prev + 1:
                raise ValueError(f"frame_indices must be consecutive, got {indices}")
        object.__setattr__(self, "frame_indices", indices)


def validate_sampling(meta: VideoMeta, cfg: SamplerConfig) -> None:
    """Raise if ``cfg`` cannot be sampled from ``meta``."""
    if meta.total_frames < cfg.clip_len:
        raise VideoTooShortError(
            f"video {meta.id!r} has {meta.total_frames} frames, "
            f"needs at least {cfg.clip_len}"
        )
    segment_len = meta.total_frames // cfg.num_clips
    if not cfg.allow_short and segment_len < cfg.clip_len:
        raise SegmentTooShortError(
            f"video {meta.id!r}: segment length {segment_len} < clip length "
            f"{cfg.clip_len} (set allow_short to sample anyway)"
        )


def sample_clip(
    meta: VideoMeta, cfg: SamplerConfig, segment: int, rng: np.random.Generator
) -> ClipIndex:
    """Draw one clip for ``segment`` using the caller-supplied stream.

    The start frame is the first value drawn from ``rng``, so downstream
    draws (mask position, order shuffle) can continue on the same stream.
    Segments shorter than the clip take no draw: the start is forced to
    min(segment start, total_frames - clip_len).
    """
    segment_len = meta.total_frames // cfg.num_clips
    seg_start = segment * segment_len
    if segment_len >= cfg.clip_len:
        slack = segment_len - cfg.clip_len
        start = int(rng.integers(seg_start, seg_start + slack + 1))
    else:
        start = min(seg_start, meta.total_frames - cfg.clip_len)
    return ClipIndex(
        segment=segment,
        start_frame=start,
        frame_indices=tuple(range(start, start + cfg.clip_len)),
    )


def sample_clips(meta: VideoMeta, cfg: SamplerConfig) -> list[ClipIndex]:
    """Sample one clip per segment, deterministically for (seed, video id)."""
    validate_sampling(meta, cfg)
    return [
        sample_clip(meta, cfg, segment, clip_stream(cfg.seed, meta.id, segment))
        for segment in range(cfg.num_clips)
    ]
