"""Keyed, counter-based random streams.

Each clip of each video gets its own stream derived from
(seed, video id, clip index), so draws for one clip never depend on how
many other clips exist or in what order they are processed.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["clip_stream", "seeded_stream"]

_U64 = (1 << 64) - 1


def _id_words(video_id: str) -> tuple[int, int]:
    digest = hashlib.blake2b(video_id.encode("utf-8"), digest_size=16).digest()
    return (
        int.from_bytes(digest[:8], "little"),
        int.from_bytes(digest[8:], "little"),
    )


def clip_stream(seed: int, video_id: str, clip_index: int) -> np.random.Generator:
    """Independent stream for one clip, keyed by (seed, video id, clip index)."""
    entropy = [seed & _U64, *_id_words(video_id), clip_index & _U64]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def seeded_stream(seed: int) -> np.random.Generator:
    """Stream keyed by a single integer seed (used for order shuffles)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed & _U64)))
