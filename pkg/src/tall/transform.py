"""Thumbnail assembly: fixed-position masking, layouts, and sub-image tiling.

A clip of consecutive frames is masked with one shared square zero-region,
tiled into a grid canvas at full resolution, and bilinearly resized to the
thumbnail side. Masking always precedes assembly, so a mask can never
straddle a seam between sub-images.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .pixel import Frame, Rect, resize_bilinear
from .rng import seeded_stream

__all__ = [
    "Clip",
    "MaskSpec",
    "LayoutSpec",
    "OrderVariant",
    "Thumbnail",
    "draw_mask",
    "apply_mask",
    "arrange",
    "layout_catalog",
    "layout_compactness",
    "DEFAULT_LAYOUT_NAME",
    "DEFAULT_MASK_SIZE",
    "DEFAULT_THUMB_SIDE",
]

DEFAULT_LAYOUT_NAME = "compact_2x2"
DEFAULT_MASK_SIZE = 56
DEFAULT_THUMB_SIDE = 224


@dataclass(frozen=True)
class Clip:
    """An ordered run of consecutive frames, all with identical dimensions."""

    frames: tuple[Frame, ...]

    def __post_init__(self) -> None:
        frames = tuple(self.frames)
        if not frames:
            raise ValueError("clip must contain at least one frame")
        shape = frames[0].shape
        for i, frame in enumerate(frames):
            if frame.shape != shape:
                raise ValueError(
                    f"frame {i} has shape {frame.shape}, expected {shape}"
                )
        object.__setattr__(self, "frames", frames)

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def frame_shape(self) -> tuple[int, int, int]:
        return self.frames[0].shape


@dataclass(frozen=True)
class MaskSpec:
    """One square zero-region shared by every frame of a clip.

    The effective rectangle is centered on (center_row, center_col) with
    half-extent size // 2 on each side, clipped to the frame.
    """

    center_row: int
    center_col: int
    size: int
    enabled: bool = True

    def __post_init__(self) -> None:
        if self.enabled and self.size < 0:
            raise ValueError(f"mask size must be >= 0, got {self.size}")

    @classmethod
    def disabled(cls) -> "MaskSpec":
        return cls(center_row=0, center_col=0, size=0, enabled=False)

    def effective_rect(self, height: int, width: int) -> Rect:
        half = self.size // 2
        return Rect(
            min(max(self.center_row - half, 0), height),
            min(max(self.center_col - half, 0), width),
            min(max(self.center_row + half, 0), height),
            min(max(self.center_col + half, 0), width),
        )


def draw_mask(
    clip_dims: tuple[int, int], size: int, rng: np.random.Generator
) -> MaskSpec:
    """Draw one mask center uniformly over the frame, shared by the clip."""
    if size < 0:
        raise ValueError(f"mask size must be >= 0, got {size}")
    height, width = clip_dims
    center_row = int(rng.integers(height))
    center_col = int(rng.integers(width))
    return MaskSpec(center_row=center_row, center_col=center_col, size=size)


def apply_mask(clip: Clip, mask: MaskSpec) -> Clip:
    """Zero the mask rectangle at identical coordinates in every frame."""
    if not mask.enabled:
        return clip
    _, height, width = clip.frame_shape
    if not (0 <= mask.center_row < height and 0 <= mask.center_col < width):
        raise ValueError(
            f"mask center ({mask.center_row}, {mask.center_col}) outside "
            f"frame dims {height}x{width}"
        )
    rect = mask.effective_rect(height, width)
    if rect.is_empty:
        return clip
    masked = []
    for frame in clip.frames:
        data = frame.data.copy()
        data[:, rect.row0 : rect.row1, rect.col0 : rect.col1] = 0.0
        masked.append(Frame(data))
    return Clip(tuple(masked))


@dataclass(frozen=True)
class LayoutSpec:
    """Grid geometry plus the cell each sub-image occupies, in frame order."""

    rows: int
    cols: int
    slots: tuple[tuple[int, int], ...]
    fill_missing: float = 0.0

    def __post_init__(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"grid must be at least 1x1, got {self.rows}x{self.cols}")
        slots = tuple((int(r), int(c)) for r, c in self.slots)
        if not slots:
            raise ValueError("layout needs at least one slot")
        if len(set(slots)) != len(slots):
            raise ValueError(f"slots must be distinct, got {slots}")
        for r, c in slots:
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise ValueError(f"slot ({r}, {c}) outside {self.rows}x{self.cols} grid")
        object.__setattr__(self, "slots", slots)

    @property
    def num_slots(self) -> int:
        return len(self.slots)


@dataclass(frozen=True)
class OrderVariant:
    """How clip frames map onto layout slots.

    kind is one of "forward", "reverse", "random" (seeded shuffle), or
    "absence" (keep the first keep_count frames, fill the rest).
    """

    kind: str
    seed: int | None = None
    keep_count: int | None = None

    _KINDS = ("forward", "reverse", "random", "absence")

    def __post_init__(self) -> None:
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown order kind {self.kind!r}")
        if self.kind == "random" and self.seed is None:
            raise ValueError("random order requires a seed")
        if self.kind == "absence":
            if self.keep_count is None or self.keep_count < 1:
                raise ValueError("absence order requires keep_count >= 1")

    @classmethod
    def forward(cls) -> "OrderVariant":
        return cls("forward")

    @classmethod
    def reverse(cls) -> "OrderVariant":
        return cls("reverse")

    @classmethod
    def random(cls, seed: int) -> "OrderVariant":
        return cls("random", seed=seed)

    @classmethod
    def absence(cls, keep_count: int) -> "OrderVariant":
        return cls("absence", keep_count=keep_count)

    def slot_sources(self, num_frames: int) -> tuple[int | None, ...]:
        """Source frame index for each slot position, None for absent slots."""
        if self.kind == "forward":
            return tuple(range(num_frames))
        if self.kind == "reverse":
            return tuple(range(num_frames - 1, -1, -1))
        if self.kind == "random":
            perm = seeded_stream(self.seed).permutation(num_frames)
            return tuple(int(i) for i in perm)
        if self.keep_count > num_frames:
            raise ValueError(
                f"keep_count {self.keep_count} exceeds clip length {num_frames}"
            )
        kept: tuple[int | None, ...] = tuple(range(self.keep_count))
        return kept + (None,) * (num_frames - self.keep_count)


@dataclass(frozen=True)
class Thumbnail:
    """Assembled grid image plus the source frame index of every grid cell."""

    image: Frame
    provenance_grid: tuple[tuple[int | None, ...], ...]


def arrange(
    clip: Clip,
    layout: LayoutSpec,
    order: OrderVariant,
    thumb_side: int = DEFAULT_THUMB_SIDE,
) -> Thumbnail:
    """Tile ordered sub-images into the layout grid and resize to a square.

    Frames are tiled at full resolution into their cells (absent slots and
    unused cells get layout.fill_missing) and the whole canvas is then
    resized bilinearly to thumb_side x thumb_side. When the canvas already
    measures thumb_side on both axes the resize is an exact no-op, so grid
    slicing recovers the sub-images bit-exactly.
    """
    if thumb_side < 1:
        raise ValueError(f"thumb_side must be >= 1, got {thumb_side}")
    if layout.num_slots != len(clip):
        raise ValueError(
            f"layout has {layout.num_slots} slots but clip has {len(clip)} frames"
        )
    channels, height, width = clip.frame_shape
    sources = order.slot_sources(len(clip))

    canvas_shape = (channels, layout.rows * height, layout.cols * width)
    if layout.num_slots == layout.rows * layout.cols and None not in sources:
        canvas = np.empty(canvas_shape, dtype=np.float32)  # every cell written below
    else:
        canvas = np.full(canvas_shape, np.float32(layout.fill_missing), dtype=np.float32)
    grid: list[list[int | None]] = [
        [None] * layout.cols for _ in range(layout.rows)
    ]
    for (row, col), source in zip(layout.slots, sources):
        if source is None:
            continue
        canvas[:, row * height : (row + 1) * height, col * width : (col + 1) * width] = (
            clip.frames[source].data
        )
        grid[row][col] = source

    image = resize_bilinear(Frame(canvas), thumb_side, thumb_side)
    return Thumbnail(image=image, provenance_grid=tuple(tuple(r) for r in grid))


def layout_catalog() -> dict[str, LayoutSpec]:
    """Named four-slot layouts; compact_2x2 is the default."""
    return {
        "compact_2x2": LayoutSpec(2, 2, ((0, 0), (0, 1), (1, 0), (1, 1))),
        "strip_1x4": LayoutSpec(1, 4, ((0, 0), (0, 1), (0, 2), (0, 3))),
        "strip_4x1": LayoutSpec(4, 1, ((0, 0), (1, 0), (2, 0), (3, 0))),
        "diag_4x4": LayoutSpec(4, 4, ((0, 0), (1, 1), (2, 2), (3, 3))),
    }


def layout_compactness(layout: LayoutSpec, sub_dims: tuple[int, int]) -> float:
    """Largest center-to-center distance between any two sub-images."""
    if layout.num_slots < 2:
        raise ValueError("compactness needs at least 2 slots")
    sub_h, sub_w = sub_dims
    centers = [((r + 0.5) * sub_h, (c + 0.5) * sub_w) for r, c in layout.slots]
    return max(
        math.hypot(a[0] - b[0], a[1] - b[1])
        for i, a in enumerate(centers)
        for b in centers[i + 1 :]
    )
