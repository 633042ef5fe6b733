"""Pixel buffers, bilinear resizing, and rectangle cropping.

Images are stored channel-planar (channels, height, width) as float32 in
[0, 1]. 8-bit conversion happens only at file I/O boundaries (see imgio).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = ["Frame", "Rect", "resize_bilinear", "crop", "face_crop"]


@dataclass(frozen=True)
class Frame:
    """Immutable channel-planar pixel buffer of shape (channels, height, width)."""

    data: np.ndarray

    def __post_init__(self) -> None:
        data = np.ascontiguousarray(self.data, dtype=np.float32)
        if data.ndim != 3:
            raise ValueError(
                f"frame buffer must be (channels, height, width), got shape {data.shape}"
            )
        channels, height, width = data.shape
        if channels not in (1, 3):
            raise ValueError(f"channel count must be 1 or 3, got {channels}")
        if height < 1 or width < 1:
            raise ValueError(f"frame dimensions must be >= 1, got {height}x{width}")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.data.shape


@dataclass(frozen=True)
class Rect:
    """Half-open pixel rectangle [row0, row1) x [col0, col1)."""

    row0: int
    col0: int
    row1: int
    col1: int

    def __post_init__(self) -> None:
        for name in ("row0", "col0", "row1", "col1"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)):
                raise ValueError(f"{name} must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if self.row0 < 0 or self.col0 < 0:
            raise ValueError(f"rect origin must be non-negative, got {self}")
        if self.row1 < self.row0 or self.col1 < self.col0:
            raise ValueError(f"rect must have row0 <= row1 and col0 <= col1, got {self}")

    @property
    def height(self) -> int:
        return self.row1 - self.row0

    @property
    def width(self) -> int:
        return self.col1 - self.col0

    @property
    def is_empty(self) -> bool:
        return self.height == 0 or self.width == 0

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.row0, self.col0, self.row1, self.col1)


@lru_cache(maxsize=512)
def _axis_samples(n_in: int, n_out: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Source indices and fractional weights for one axis, half-pixel centers."""
    scale = n_in / n_out
    src = (np.arange(n_out, dtype=np.float64) + 0.5) * scale - 0.5
    lo = np.floor(src)
    frac = (src - lo).astype(np.float32)
    idx0 = np.clip(lo, 0, n_in - 1).astype(np.intp)
    idx1 = np.clip(lo + 1, 0, n_in - 1).astype(np.intp)
    for arr in (idx0, idx1, frac):
        arr.setflags(write=False)
    return idx0, idx1, frac


def resize_bilinear(frame: Frame, out_h: int, out_w: int) -> Frame:
    """Resize with the half-pixel-center convention and edge clamping.

    Output pixel i samples input coordinate (i + 0.5) * (in / out) - 0.5; the
    two nearest input samples per axis are clamped to the image border and
    linearly blended. When the output dimensions equal the input dimensions
    the input frame is returned unchanged (bit-exact).
    """
    if out_h < 1 or out_w < 1:
        raise ValueError(f"output dimensions must be >= 1, got {out_h}x{out_w}")
    if out_h == frame.height and out_w == frame.width:
        return frame
    return Frame(_resize_data(frame.data, out_h, out_w))


def _resize_data(data: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    in_h, in_w = data.shape[1], data.shape[2]

    # Separable lerp computed as a + f * (b - a): exact for constant inputs
    # and never leaves [min(a, b), max(a, b)]. In-place ops keep the two
    # source planes as the only temporaries per axis. Exact 2x decimation
    # hits f = 1/2 on neighbor pairs (2i, 2i+1), so strided views replace
    # the index gathers; the arithmetic is unchanged, hence bit-identical.
    if in_h == 2 * out_h:
        top = data[:, 0::2, :]
        rows = data[:, 1::2, :] - top
        rows *= np.float32(0.5)
        rows += top
    else:
        y0, y1, fy = _axis_samples(in_h, out_h)
        top = data[:, y0, :]
        rows = data[:, y1, :]
        rows -= top
        rows *= fy[None, :, None]
        rows += top

    if in_w == 2 * out_w:
        left = rows[:, :, 0::2]
        out = rows[:, :, 1::2] - left
        out *= np.float32(0.5)
        out += left
    else:
        x0, x1, fx = _axis_samples(in_w, out_w)
        left = rows[:, :, x0]
        out = rows[:, :, x1]
        out -= left
        out *= fx[None, None, :]
        out += left
    return out


def crop(frame: Frame, rect: Rect) -> Frame:
    """Copy the pixels inside ``rect`` into a new frame."""
    if rect.row1 > frame.height or rect.col1 > frame.width:
        raise ValueError(
            f"rect {rect.as_tuple()} exceeds frame bounds {frame.height}x{frame.width}"
        )
    return Frame(frame.data[:, rect.row0 : rect.row1, rect.col0 : rect.col1].copy())


def _round_half_up(value: float) -> int:
    return int(math.floor(value + 0.5))


def face_crop(frame: Frame, bbox: Rect, margin: float) -> Frame:
    """Crop a face box expanded by ``margin`` of its own size on every side.

    The box grows by margin * height above and below and margin * width left
    and right (rounded to the nearest pixel), is clipped to the frame, and is
    then cropped.
    """
    if bbox.height <= 0 or bbox.width <= 0:
        raise ValueError(f"bbox must be non-degenerate, got {bbox.as_tuple()}")
    if margin < 0:
        raise ValueError(f"margin must be >= 0, got {margin}")
    pad_rows = _round_half_up(margin * bbox.height)
    pad_cols = _round_half_up(margin * bbox.width)
    expanded = Rect(
        max(0, bbox.row0 - pad_rows),
        max(0, bbox.col0 - pad_cols),
        min(frame.height, bbox.row1 + pad_rows),
        min(frame.width, bbox.col1 + pad_cols),
    )
    return crop(frame, expanded)
