"""Raster file I/O. The only place 8-bit integer pixels exist."""

from __future__ import annotations

from pathlib import Path

import cv2
import numpy as np

from .pixel import Frame

__all__ = ["load_frame", "save_frame", "FRAME_EXTENSIONS", "DEFAULT_PNG_LEVEL"]

FRAME_EXTENSIONS = (".png", ".jpg", ".jpeg", ".bmp")

# Thumbnail writes sit on the hot path of dataset conversion; PNG stays
# lossless at every zlib level, so the default trades file size for speed.
DEFAULT_PNG_LEVEL = 0


def load_frame(path: str | Path) -> Frame:
    """Decode an image file into a float32 frame in [0, 1].

    Single-channel files stay single-channel; everything else comes back
    as RGB.
    """
    raw = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise OSError(f"cannot decode image {path}")
    if raw.dtype != np.uint8:
        raise OSError(f"{path}: only 8-bit images are supported, got {raw.dtype}")
    if raw.ndim == 2:
        planes = raw[None, :, :].astype(np.float32)
    else:
        if raw.shape[2] == 4:
            raw = cv2.cvtColor(raw, cv2.COLOR_BGRA2BGR)
        planes = cv2.cvtColor(raw, cv2.COLOR_BGR2RGB).transpose(2, 0, 1).astype(np.float32)
    planes *= np.float32(1.0 / 255.0)
    return Frame(planes)


def save_frame(frame: Frame, path: str | Path, png_level: int = DEFAULT_PNG_LEVEL) -> None:
    """Write a frame as lossless 8-bit PNG, rounding half up."""
    scaled = np.clip(frame.data, 0.0, 1.0) * 255.0
    scaled += 0.5
    quantized = scaled.astype(np.uint8)  # trunc of non-negative == floor
    if frame.channels == 1:
        image = quantized[0]
    else:
        image = cv2.merge([quantized[2], quantized[1], quantized[0]])
    ok, encoded = cv2.imencode(".png", image, [cv2.IMWRITE_PNG_COMPRESSION, png_level])
    if not ok:
        raise OSError(f"PNG encoding failed for {path}")
    Path(path).write_bytes(encoded.tobytes())
