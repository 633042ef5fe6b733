"""Thumbnail-layout video preprocessing and window-attention mixing analysis.

Packs runs of consecutive video frames into single grid images (with a
shared fixed-position mask per clip) so an image model sees spatial and
temporal signal together, and provides a discrete reachability analysis of
how shifted-window attention mixes information across the packed frames.
"""

from .pixel import Frame, Rect, crop, face_crop, resize_bilinear
from .rng import clip_stream, seeded_stream
from .sampling import (
    ClipIndex,
    SamplerConfig,
    SegmentTooShortError,
    VideoMeta,
    VideoTooShortError,
    sample_clip,
    sample_clips,
    validate_sampling,
)
from .transform import (
    DEFAULT_LAYOUT_NAME,
    DEFAULT_MASK_SIZE,
    DEFAULT_THUMB_SIDE,
    Clip,
    LayoutSpec,
    MaskSpec,
    OrderVariant,
    Thumbnail,
    apply_mask,
    arrange,
    draw_mask,
    layout_catalog,
    layout_compactness,
)
from .windows import (
    ComplexityInput,
    ModelKind,
    PipelineReport,
    StageReport,
    TokenGrid,
    WindowRegion,
    WindowStageConfig,
    analyze_pipeline,
    bce_loss,
    crossing_windows,
    flops,
    merge_patches,
    partition_windows,
    propagate_stage,
    tall_swin_stages,
)

__version__ = "0.1.0"
