"""Windowed-attention frame-mixing analysis and complexity formulas.

Tokens carry two frame sets: ``frame_bits`` (which source frames the token
physically contains; grows only through patch merging) and ``provenance``
(which source frames can influence the token; grows through window
attention and merging). Both are stored as uint64 bitmasks, so at most 64
distinct source frames are supported.

The shifted-window pass is modeled as a truncated offset partition: bands
[0, shift), [shift, shift + window), ... tile the grid exactly once, which
reproduces the reachability semantics of a cyclic shift plus attention
mask without simulating either.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .transform import LayoutSpec

__all__ = [
    "TokenGrid",
    "WindowRegion",
    "WindowStageConfig",
    "ComplexityInput",
    "ModelKind",
    "StageReport",
    "PipelineReport",
    "partition_windows",
    "crossing_windows",
    "merge_patches",
    "propagate_stage",
    "analyze_pipeline",
    "tall_swin_stages",
    "flops",
    "bce_loss",
    "MAX_FRAMES",
]

MAX_FRAMES = 64


def _popcount(bits: np.ndarray) -> np.ndarray:
    return np.bitwise_count(bits)


def _bit(frame_id: int) -> np.uint64:
    if not (0 <= frame_id < MAX_FRAMES):
        raise ValueError(f"frame id must be in [0, {MAX_FRAMES}), got {frame_id}")
    return np.uint64(1) << np.uint64(frame_id)


def _bits_to_ids(bits: int) -> frozenset[int]:
    return frozenset(i for i in range(MAX_FRAMES) if bits >> i & 1)


@dataclass(frozen=True)
class TokenGrid:
    """Token grid with per-token frame membership and reachability sets."""

    frame_bits: np.ndarray
    provenance: np.ndarray

    def __post_init__(self) -> None:
        frame_bits = np.ascontiguousarray(self.frame_bits, dtype=np.uint64)
        provenance = np.ascontiguousarray(self.provenance, dtype=np.uint64)
        if frame_bits.ndim != 2 or frame_bits.shape != provenance.shape:
            raise ValueError(
                f"frame_bits and provenance must be matching 2-d arrays, got "
                f"{frame_bits.shape} and {provenance.shape}"
            )
        if frame_bits.shape[0] < 1 or frame_bits.shape[1] < 1:
            raise ValueError(f"grid must be at least 1x1, got {frame_bits.shape}")
        if np.any(frame_bits & ~provenance):
            raise ValueError("provenance must contain each token's own frames")
        frame_bits.setflags(write=False)
        provenance.setflags(write=False)
        object.__setattr__(self, "frame_bits", frame_bits)
        object.__setattr__(self, "provenance", provenance)

    @classmethod
    def uniform_partition(
        cls, height: int, width: int, frame_rows: int, frame_cols: int
    ) -> "TokenGrid":
        """Grid split into frame_rows x frame_cols equal sub-images, ids row-major."""
        if height % frame_rows or width % frame_cols:
            raise ValueError(
                f"grid {height}x{width} not divisible into "
                f"{frame_rows}x{frame_cols} sub-images"
            )
        if frame_rows * frame_cols > MAX_FRAMES:
            raise ValueError(f"at most {MAX_FRAMES} sub-images supported")
        block_h = height // frame_rows
        block_w = width // frame_cols
        bits = np.zeros((height, width), dtype=np.uint64)
        for fr in range(frame_rows):
            for fc in range(frame_cols):
                bits[
                    fr * block_h : (fr + 1) * block_h,
                    fc * block_w : (fc + 1) * block_w,
                ] = _bit(fr * frame_cols + fc)
        return cls(frame_bits=bits, provenance=bits.copy())

    @classmethod
    def from_layout(
        cls, layout: LayoutSpec, cell_height: int, cell_width: int
    ) -> "TokenGrid":
        """Grid for a thumbnail layout; unoccupied cells carry no frame."""
        if cell_height < 1 or cell_width < 1:
            raise ValueError("cell dimensions must be >= 1")
        if layout.num_slots > MAX_FRAMES:
            raise ValueError(f"at most {MAX_FRAMES} sub-images supported")
        bits = np.zeros(
            (layout.rows * cell_height, layout.cols * cell_width), dtype=np.uint64
        )
        for frame_id, (row, col) in enumerate(layout.slots):
            bits[
                row * cell_height : (row + 1) * cell_height,
                col * cell_width : (col + 1) * cell_width,
            ] = _bit(frame_id)
        return cls(frame_bits=bits, provenance=bits.copy())

    @property
    def height(self) -> int:
        return self.frame_bits.shape[0]

    @property
    def width(self) -> int:
        return self.frame_bits.shape[1]

    @property
    def all_frame_bits(self) -> int:
        return int(np.bitwise_or.reduce(self.frame_bits, axis=None))

    def frame_ids(self, row: int, col: int) -> frozenset[int]:
        return _bits_to_ids(int(self.frame_bits[row, col]))

    def provenance_ids(self, row: int, col: int) -> frozenset[int]:
        return _bits_to_ids(int(self.provenance[row, col]))

    def multi_frame_fraction(self) -> float:
        """Fraction of tokens reachable from two or more source frames."""
        return float(np.mean(_popcount(self.provenance) >= 2))

    def full_mixing(self) -> bool:
        """True when every token is reachable from every source frame."""
        return bool(np.all(self.provenance == np.uint64(self.all_frame_bits)))


@dataclass(frozen=True)
class WindowRegion:
    """One window of a partition: token rows [row0, row1) x cols [col0, col1)."""

    row0: int
    col0: int
    row1: int
    col1: int

    @property
    def num_tokens(self) -> int:
        return (self.row1 - self.row0) * (self.col1 - self.col0)

    def cells(self) -> list[tuple[int, int]]:
        return [
            (r, c)
            for r in range(self.row0, self.row1)
            for c in range(self.col0, self.col1)
        ]

    @property
    def slices(self) -> tuple[slice, slice]:
        return (slice(self.row0, self.row1), slice(self.col0, self.col1))


@dataclass(frozen=True)
class WindowStageConfig:
    """One window-attention pass: window size, band offset, optional merge."""

    window: int
    shift: int = 0
    merge_after: bool = False

    def __post_init__(self) -> None:
        if self.window < 1:
            raise ValueError(f"window must be >= 1, got {self.window}")
        if not (0 <= self.shift < self.window):
            raise ValueError(
                f"shift must satisfy 0 <= shift < window, got shift={self.shift} "
                f"window={self.window}"
            )


def _axis_bands(extent: int, window: int, shift: int) -> list[tuple[int, int]]:
    if shift == 0:
        edges = list(range(0, extent, window)) + [extent]
    else:
        edges = [0] + list(range(shift, extent, window)) + [extent]
    return list(zip(edges, edges[1:]))


def partition_windows(
    grid: TokenGrid, window: int, shift: int = 0
) -> list[WindowRegion]:
    """Partition the grid into windows, each token covered exactly once.

    With shift 0 the windows are window x window tiles. With shift > 0 the
    partition is offset by the shift with truncated bands at the edges,
    mirroring the masked (non-wrapping) shifted-window semantics.
    """
    if window > min(grid.height, grid.width):
        raise ValueError(
            f"window {window} larger than grid {grid.height}x{grid.width}"
        )
    if not (0 <= shift < window):
        raise ValueError(
            f"shift must satisfy 0 <= shift < window, got shift={shift} window={window}"
        )
    return [
        WindowRegion(r0, c0, r1, c1)
        for r0, r1 in _axis_bands(grid.height, window, shift)
        for c0, c1 in _axis_bands(grid.width, window, shift)
    ]


def crossing_windows(
    grid: TokenGrid, windows: list[WindowRegion]
) -> list[WindowRegion]:
    """Windows whose tokens come from two or more source frames."""
    crossing = []
    for win in windows:
        union = np.bitwise_or.reduce(grid.frame_bits[win.slices], axis=None)
        if int(_popcount(union)) >= 2:
            crossing.append(win)
    return crossing


def merge_patches(grid: TokenGrid) -> TokenGrid:
    """Fuse each 2x2 token block into one token, halving both dimensions.

    The merged token's frame membership and provenance are the unions over
    the block, so provenance sets never shrink.
    """
    if grid.height % 2 or grid.width % 2:
        raise ValueError(f"grid dims must be even to merge, got {grid.height}x{grid.width}")

    def merge(bits: np.ndarray) -> np.ndarray:
        return bits[0::2, 0::2] | bits[0::2, 1::2] | bits[1::2, 0::2] | bits[1::2, 1::2]

    return TokenGrid(
        frame_bits=merge(grid.frame_bits), provenance=merge(grid.provenance)
    )


def propagate_stage(grid: TokenGrid, stage: WindowStageConfig) -> TokenGrid:
    """Union provenance over every window (any-to-any attention), then merge."""
    windows = partition_windows(grid, stage.window, stage.shift)
    provenance = grid.provenance.copy()
    for win in windows:
        union = np.bitwise_or.reduce(provenance[win.slices], axis=None)
        provenance[win.slices] = union
    out = TokenGrid(frame_bits=grid.frame_bits.copy(), provenance=provenance)
    return merge_patches(out) if stage.merge_after else out


@dataclass(frozen=True)
class StageReport:
    stage: int
    window: int
    shift: int
    num_windows: int
    num_crossing: int
    multi_frame_fraction: float
    full_mixing: bool

    def to_dict(self) -> dict:
        return {
            "stage": self.stage,
            "window": self.window,
            "shift": self.shift,
            "num_windows": self.num_windows,
            "num_crossing": self.num_crossing,
            "multi_frame_fraction": self.multi_frame_fraction,
            "full_mixing": self.full_mixing,
        }


@dataclass(frozen=True)
class PipelineReport:
    """Per-stage crossing/mixing measurements plus the final mixing verdict."""

    stages: tuple[StageReport, ...]
    full_mixing: bool
    final_height: int
    final_width: int

    def to_dict(self) -> dict:
        return {
            "stages": [s.to_dict() for s in self.stages],
            "full_mixing": self.full_mixing,
            "final_grid": [self.final_height, self.final_width],
        }

    def to_text(self) -> str:
        lines = []
        for s in self.stages:
            lines.append(
                f"stage {s.stage}: window={s.window} shift={s.shift} "
                f"windows={s.num_windows} crossing={s.num_crossing} "
                f"multi_frame={s.multi_frame_fraction:.4f} "
                f"full_mixing={'yes' if s.full_mixing else 'no'}"
            )
        lines.append(
            f"final grid {self.final_height}x{self.final_width}, "
            f"full mixing: {'yes' if self.full_mixing else 'no'}"
        )
        return "\n".join(lines)


def analyze_pipeline(
    stages: list[WindowStageConfig], grid0: TokenGrid
) -> PipelineReport:
    """Run every stage over the grid and report crossing and mixing per stage."""
    if not stages:
        raise ValueError("stage list must be non-empty")
    grid = grid0
    reports = []
    for index, stage in enumerate(stages):
        windows = partition_windows(grid, stage.window, stage.shift)
        num_crossing = len(crossing_windows(grid, windows))
        grid = propagate_stage(grid, stage)
        reports.append(
            StageReport(
                stage=index,
                window=stage.window,
                shift=stage.shift,
                num_windows=len(windows),
                num_crossing=num_crossing,
                multi_frame_fraction=grid.multi_frame_fraction(),
                full_mixing=grid.full_mixing(),
            )
        )
    return PipelineReport(
        stages=tuple(reports),
        full_mixing=grid.full_mixing(),
        final_height=grid.height,
        final_width=grid.width,
    )


def tall_swin_stages(
    window_sizes: tuple[int, ...] = (14, 14, 14, 7),
    token_side: int = 56,
) -> list[WindowStageConfig]:
    """Expand per-stage window sizes into alternating plain/shifted passes.

    Each stage runs one unshifted pass and one pass shifted by half the
    window; patch merging follows every stage except the last, halving the
    grid. Windows are clamped to the current grid side, and a clamped
    (global) window runs unshifted, following standard shifted-window
    practice.
    """
    if not window_sizes:
        raise ValueError("window_sizes must be non-empty")
    stages = []
    side = token_side
    for index, window in enumerate(window_sizes):
        if window < 1:
            raise ValueError(f"window sizes must be >= 1, got {window}")
        effective = min(window, side)
        shift = effective // 2 if effective < side else 0
        merge = index < len(window_sizes) - 1
        stages.append(WindowStageConfig(window=effective, shift=0, merge_after=False))
        stages.append(
            WindowStageConfig(window=effective, shift=shift, merge_after=merge)
        )
        if merge:
            if side % 2:
                raise ValueError(f"grid side {side} not divisible for merging")
            side //= 2
    return stages


class ModelKind(enum.Enum):
    """Attention backbones with closed-form per-block complexity."""

    VIT = "vit"
    SWIN = "swin"
    VIVIT = "vivit"
    TALL_SWIN = "tall-swin"


@dataclass(frozen=True)
class ComplexityInput:
    """Symbolic sizes for the complexity formulas.

    patches_per_window is only needed for the windowed kinds.
    """

    num_frames: int
    patches_per_frame: int
    channels: int
    patches_per_window: int | None = None

    def __post_init__(self) -> None:
        for name in ("num_frames", "patches_per_frame", "channels"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be a positive integer")
        if self.patches_per_window is not None and self.patches_per_window < 1:
            raise ValueError("patches_per_window must be a positive integer")


def flops(kind: ModelKind, inp: ComplexityInput) -> int | float:
    """Self-attention operation count for one backbone kind.

    Integer-exact everywhere except the halved window term when its product
    is odd.
    """
    t = inp.num_frames
    n = inp.patches_per_frame
    c = inp.channels
    if kind is ModelKind.VIT:
        return 4 * t * n * c * c + 2 * t * n * n * c
    if kind is ModelKind.VIVIT:
        return 4 * t * n * c + 2 * t * t * n * n * c
    p = inp.patches_per_window
    if p is None:
        raise ValueError(f"{kind.value} requires patches_per_window")
    if kind is ModelKind.SWIN:
        return 4 * t * n * c * c + 2 * t * p * n * c
    window_term = t * p * n * c
    half = window_term // 2 if window_term % 2 == 0 else window_term / 2
    return t * n * c * c + half


def bce_loss(preds: "list[float] | np.ndarray", labels: "list[int] | np.ndarray") -> float:
    """Mean binary cross-entropy with probabilities clamped to [1e-7, 1 - 1e-7]."""
    p = np.asarray(preds, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if p.ndim != 1 or y.ndim != 1 or p.shape != y.shape:
        raise ValueError(
            f"preds and labels must be equal-length vectors, got {p.shape} and {y.shape}"
        )
    if p.size < 1:
        raise ValueError("need at least one prediction")
    if np.any(p < 0) or np.any(p > 1):
        raise ValueError("predictions must lie in [0, 1]")
    if np.any((y != 0) & (y != 1)):
        raise ValueError("labels must be 0 or 1")
    eps = 1e-7
    p = np.clip(p, eps, 1.0 - eps)
    return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))
