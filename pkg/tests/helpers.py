"""Shared test helpers: independent oracles and synthetic corpus builders.

The oracles here are deliberately written as plain scalar loops and set
arithmetic, independent of the vectorized implementations they check.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from tall.pixel import Frame


def bilinear_oracle(data: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Per-pixel half-pixel-center bilinear resize in float64."""
    channels, in_h, in_w = data.shape
    out = np.zeros((channels, out_h, out_w), dtype=np.float64)
    scale_y = in_h / out_h
    scale_x = in_w / out_w
    for c in range(channels):
        for oy in range(out_h):
            src_y = (oy + 0.5) * scale_y - 0.5
            y0 = math.floor(src_y)
            fy = src_y - y0
            y0c = min(max(y0, 0), in_h - 1)
            y1c = min(max(y0 + 1, 0), in_h - 1)
            for ox in range(out_w):
                src_x = (ox + 0.5) * scale_x - 0.5
                x0 = math.floor(src_x)
                fx = src_x - x0
                x0c = min(max(x0, 0), in_w - 1)
                x1c = min(max(x0 + 1, 0), in_w - 1)
                top = (1.0 - fx) * data[c, y0c, x0c] + fx * data[c, y0c, x1c]
                bot = (1.0 - fx) * data[c, y1c, x0c] + fx * data[c, y1c, x1c]
                out[c, oy, ox] = (1.0 - fy) * top + fy * bot
    return out


def mask_rect_oracle(
    center_row: int, center_col: int, size: int, height: int, width: int
) -> tuple[int, int, int, int]:
    """Clipped square mask bounds: center +- size // 2, floor division."""
    half = size // 2
    r0 = min(max(center_row - half, 0), height)
    r1 = min(max(center_row + half, 0), height)
    c0 = min(max(center_col - half, 0), width)
    c1 = min(max(center_col + half, 0), width)
    return r0, c0, r1, c1


def bands_oracle(extent: int, window: int, shift: int) -> list[tuple[int, int]]:
    """Band boundaries for a (possibly shifted) window partition of one axis."""
    edges = [0]
    pos = shift if shift > 0 else window
    while pos < extent:
        edges.append(pos)
        pos += window
    edges.append(extent)
    return list(zip(edges, edges[1:]))


def windows_oracle(
    height: int, width: int, window: int, shift: int
) -> list[set[tuple[int, int]]]:
    """Each window as an explicit token set."""
    result = []
    for r0, r1 in bands_oracle(height, window, shift):
        for c0, c1 in bands_oracle(width, window, shift):
            result.append({(r, c) for r in range(r0, r1) for c in range(c0, c1)})
    return result


def crossing_count_oracle(
    labels: np.ndarray, windows: list[set[tuple[int, int]]]
) -> int:
    """Count windows whose token labels form a set of size >= 2."""
    count = 0
    for cells in windows:
        if len({int(labels[r, c]) for r, c in cells}) >= 2:
            count += 1
    return count


def quadrant_labels(height: int, width: int, frame_rows: int, frame_cols: int) -> np.ndarray:
    """Row-major sub-image label per token for an evenly split grid."""
    labels = np.zeros((height, width), dtype=np.int64)
    bh = height // frame_rows
    bw = width // frame_cols
    for r in range(height):
        for c in range(width):
            labels[r, c] = (r // bh) * frame_cols + (c // bw)
    return labels


def const_frame(channels: int, height: int, width: int, value: float) -> Frame:
    return Frame(np.full((channels, height, width), np.float32(value), dtype=np.float32))


def random_frame(rng: np.random.Generator, channels: int, height: int, width: int) -> Frame:
    return Frame(rng.random((channels, height, width), dtype=np.float32))


def paste(dest: np.ndarray, patch: np.ndarray, row0: int, col0: int) -> np.ndarray:
    out = dest.copy()
    out[:, row0 : row0 + patch.shape[1], col0 : col0 + patch.shape[2]] = patch
    return out


def synthetic_face_frame(
    side: int, frame_index: int, video_seed: int
) -> np.ndarray:
    """Smooth face-like RGB frame (HWC uint8): gradient plus a drifting blob."""
    yy, xx = np.mgrid[0:side, 0:side].astype(np.float32)
    cy = side / 2 + (frame_index % 9) - 4 + (video_seed % 5)
    cx = side / 2 + ((frame_index * 3) % 11) - 5
    blob = np.exp(-(((yy - cy) ** 2 + (xx - cx) ** 2) / (2 * (side / 6.0) ** 2)))
    r = np.clip(0.35 + 0.5 * blob + 0.002 * frame_index, 0, 1)
    g = np.clip(0.25 + 0.4 * blob + yy / (4.0 * side), 0, 1)
    b = np.clip(0.3 + 0.3 * blob + xx / (4.0 * side), 0, 1)
    return (np.stack([r, g, b], axis=-1) * 255).astype(np.uint8)


def build_corpus(
    root: Path,
    num_videos: int,
    num_frames: int,
    side: int = 224,
    fmt: str = "jpg",
    with_boxes: bool = False,
    box_side: int | None = None,
) -> Path | None:
    """Write a small labeled synthetic corpus; returns the bbox file if any.

    Videos alternate between real/ and fake/ subdirectories. PNG frames are
    written with Pillow so the corpus bytes do not depend on the code under
    test.
    """
    from PIL import Image

    lines = []
    for v in range(num_videos):
        label = "real" if v % 2 == 0 else "fake"
        vid = f"vid{v:02d}"
        video_dir = root / label / vid
        video_dir.mkdir(parents=True, exist_ok=True)
        for i in range(num_frames):
            arr = synthetic_face_frame(side, i, v)
            path = video_dir / f"{i:04d}.{fmt}"
            if fmt == "jpg":
                Image.fromarray(arr).save(path, quality=92)
            else:
                Image.fromarray(arr).save(path)
            if with_boxes:
                b = box_side or side // 2
                r0 = (side - b) // 2 + (i % 5)
                c0 = (side - b) // 2 + (i % 3)
                r0 = min(r0, side - b)
                c0 = min(c0, side - b)
                lines.append(f"{label}/{vid} {i} {r0} {c0} {r0 + b} {c0 + b}")
    if with_boxes:
        bbox_path = root / "boxes.txt"
        bbox_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return bbox_path
    return None
