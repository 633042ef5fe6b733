import pytest

from tall.rng import clip_stream
from tall.sampling import (
    ClipIndex,
    SamplerConfig,
    SegmentTooShortError,
    VideoMeta,
    VideoTooShortError,
    sample_clip,
    sample_clips,
)


def test_zero_slack_forces_starts():
    meta = VideoMeta(total_frames=32, id="v")
    cfg = SamplerConfig(num_clips=8, clip_len=4, seed=123)
    clips = sample_clips(meta, cfg)
    assert [c.start_frame for c in clips] == [4 * i for i in range(8)]
    for i, clip in enumerate(clips):
        assert clip.segment == i
        assert clip.frame_indices == tuple(range(4 * i, 4 * i + 4))


def test_dense_sampling_bounds():
    meta = VideoMeta(total_frames=320, id="video-a")
    for seed in range(50):
        cfg = SamplerConfig(num_clips=8, clip_len=4, seed=seed)
        clips = sample_clips(meta, cfg)
        assert len(clips) == 8
        for i, clip in enumerate(clips):
            assert 40 * i <= clip.start_frame <= 40 * i + 36
            assert clip.frame_indices == tuple(
                range(clip.start_frame, clip.start_frame + 4)
            )
            assert clip.frame_indices[-1] < 320


def test_deterministic_across_runs():
    meta = VideoMeta(total_frames=320, id="video-b")
    cfg = SamplerConfig(num_clips=8, clip_len=4, seed=77)
    assert sample_clips(meta, cfg) == sample_clips(meta, cfg)


def test_video_id_changes_draws():
    cfg = SamplerConfig(num_clips=8, clip_len=4, seed=77)
    a = sample_clips(VideoMeta(total_frames=320, id="a"), cfg)
    b = sample_clips(VideoMeta(total_frames=320, id="b"), cfg)
    assert [c.start_frame for c in a] != [c.start_frame for c in b]


def test_clip_streams_are_independent():
    # Drawing clip 3 on its own must match its draw inside the full batch.
    meta = VideoMeta(total_frames=320, id="solo")
    cfg = SamplerConfig(num_clips=8, clip_len=4, seed=9)
    batch = sample_clips(meta, cfg)
    alone = sample_clip(meta, cfg, 3, clip_stream(cfg.seed, meta.id, 3))
    assert alone == batch[3]


def test_video_too_short():
    with pytest.raises(VideoTooShortError):
        sample_clips(VideoMeta(total_frames=3, id="v"), SamplerConfig(8, 4))


def test_segment_too_short():
    with pytest.raises(SegmentTooShortError):
        sample_clips(VideoMeta(total_frames=8, id="v"), SamplerConfig(8, 4))


def test_allow_short_spills_over_segments():
    meta = VideoMeta(total_frames=10, id="v")
    cfg = SamplerConfig(num_clips=8, clip_len=4, seed=5, allow_short=True)
    clips = sample_clips(meta, cfg)
    assert len(clips) == 8
    for i, clip in enumerate(clips):
        assert clip.start_frame == min(i, 10 - 4)
        assert clip.frame_indices[-1] < 10


def test_zero_slack_coverage_tiles_video():
    meta = VideoMeta(total_frames=24, id="v")
    cfg = SamplerConfig(num_clips=6, clip_len=4, seed=1)
    clips = sample_clips(meta, cfg)
    covered = sorted(i for c in clips for i in c.frame_indices)
    assert covered == list(range(24))


def test_remainder_frames_never_sampled():
    meta = VideoMeta(total_frames=35, id="v")  # 35 // 8 = 4, remainder 3
    for seed in range(20):
        cfg = SamplerConfig(num_clips=8, clip_len=4, seed=seed)
        for clip in sample_clips(meta, cfg):
            assert clip.frame_indices[-1] < 32


def test_clip_index_validation():
    with pytest.raises(ValueError):
        ClipIndex(segment=0, start_frame=5, frame_indices=(5, 7))
    with pytest.raises(ValueError):
        ClipIndex(segment=0, start_frame=5, frame_indices=(6, 7))
    with pytest.raises(ValueError):
        ClipIndex(segment=0, start_frame=0, frame_indices=())


def test_config_validation():
    with pytest.raises(ValueError):
        SamplerConfig(num_clips=0, clip_len=4)
    with pytest.raises(ValueError):
        SamplerConfig(num_clips=4, clip_len=0)
    with pytest.raises(ValueError):
        VideoMeta(total_frames=0, id="v")
