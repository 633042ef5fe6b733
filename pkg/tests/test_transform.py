import numpy as np
import pytest

from tall.pixel import Frame
from tall.rng import clip_stream
from tall.transform import (
    Clip,
    LayoutSpec,
    MaskSpec,
    OrderVariant,
    apply_mask,
    arrange,
    draw_mask,
    layout_catalog,
    layout_compactness,
)

from helpers import const_frame, mask_rect_oracle, random_frame


def make_clip(rng, t=4, c=3, h=32, w=32):
    return Clip(tuple(random_frame(rng, c, h, w) for _ in range(t)))


def const_clip(values, c=1, h=32, w=32):
    return Clip(tuple(const_frame(c, h, w, v) for v in values))


class TestMaskSpec:
    def test_centered_rect(self):
        mask = MaskSpec(center_row=112, center_col=112, size=56)
        rect = mask.effective_rect(224, 224)
        assert rect.as_tuple() == (84, 84, 140, 140)

    def test_clipped_at_origin(self):
        mask = MaskSpec(center_row=0, center_col=0, size=56)
        rect = mask.effective_rect(224, 224)
        assert rect.as_tuple() == (0, 0, 28, 28)

    def test_size_zero_is_empty(self):
        mask = MaskSpec(center_row=10, center_col=10, size=0)
        assert mask.effective_rect(32, 32).is_empty

    def test_negative_size_rejected(self):
        with pytest.raises(ValueError):
            MaskSpec(center_row=0, center_col=0, size=-1)


class TestDrawMask:
    def test_center_in_bounds_and_deterministic(self):
        for i in range(50):
            mask = draw_mask((224, 224), 56, clip_stream(4, "vid", i))
            again = draw_mask((224, 224), 56, clip_stream(4, "vid", i))
            assert 0 <= mask.center_row < 224
            assert 0 <= mask.center_col < 224
            assert (mask.center_row, mask.center_col) == (
                again.center_row,
                again.center_col,
            )

    def test_independent_streams_mostly_differ(self):
        centers = {
            (m.center_row, m.center_col)
            for m in (
                draw_mask((224, 224), 56, clip_stream(4, "vid", i)) for i in range(100)
            )
        }
        assert len(centers) > 95

    def test_negative_size_rejected(self):
        with pytest.raises(ValueError):
            draw_mask((32, 32), -4, clip_stream(0, "v", 0))


class TestApplyMask:
    def test_disabled_is_identity(self):
        rng = np.random.default_rng(0)
        clip = make_clip(rng)
        out = apply_mask(clip, MaskSpec.disabled())
        for a, b in zip(out.frames, clip.frames):
            assert np.array_equal(a.data, b.data)

    def test_zero_block_shared_by_all_frames(self):
        clip = const_clip([1.0, 1.0, 1.0, 1.0], c=3, h=224, w=224)
        mask = MaskSpec(center_row=112, center_col=112, size=56)
        out = apply_mask(clip, mask)
        for frame in out.frames:
            zeros = np.argwhere(frame.data[0] == 0.0)
            assert len(zeros) == 56 * 56
            assert np.all(frame.data[:, 84:140, 84:140] == 0.0)
            # everything else untouched
            untouched = frame.data.copy()
            untouched[:, 84:140, 84:140] = 1.0
            assert np.all(untouched == 1.0)

    def test_zero_coordinates_match_oracle(self):
        rng_ids = ["a", "b", "c"]
        for vid in rng_ids:
            stream = clip_stream(7, vid, 0)
            clip = const_clip([1.0] * 4, c=1, h=40, w=30)
            mask = draw_mask((40, 30), 12, stream)
            out = apply_mask(clip, mask)
            r0, c0, r1, c1 = mask_rect_oracle(
                mask.center_row, mask.center_col, 12, 40, 30
            )
            for frame in out.frames:
                got = {tuple(p) for p in np.argwhere(frame.data[0] == 0.0)}
                want = {(r, c) for r in range(r0, r1) for c in range(c0, c1)}
                assert got == want

    def test_center_outside_frame_rejected(self):
        clip = const_clip([1.0] * 4, h=16, w=16)
        with pytest.raises(ValueError):
            apply_mask(clip, MaskSpec(center_row=20, center_col=3, size=4))

    def test_empty_rect_returns_input(self):
        clip = const_clip([0.5] * 4)
        out = apply_mask(clip, MaskSpec(center_row=3, center_col=3, size=0))
        for a, b in zip(out.frames, clip.frames):
            assert np.array_equal(a.data, b.data)


class TestOrderVariant:
    def test_slot_sources(self):
        assert OrderVariant.forward().slot_sources(4) == (0, 1, 2, 3)
        assert OrderVariant.reverse().slot_sources(4) == (3, 2, 1, 0)
        assert OrderVariant.absence(2).slot_sources(4) == (0, 1, None, None)
        perm = OrderVariant.random(99).slot_sources(4)
        assert sorted(p for p in perm) == [0, 1, 2, 3]
        assert perm == OrderVariant.random(99).slot_sources(4)

    def test_validation(self):
        with pytest.raises(ValueError):
            OrderVariant("sideways")
        with pytest.raises(ValueError):
            OrderVariant("random")
        with pytest.raises(ValueError):
            OrderVariant.absence(0)
        with pytest.raises(ValueError):
            OrderVariant.absence(5).slot_sources(4)


class TestArrange:
    def test_forward_quadrants(self):
        clip = const_clip([0.1, 0.2, 0.3, 0.4], c=3, h=224, w=224)
        thumb = arrange(clip, layout_catalog()["compact_2x2"], OrderVariant.forward(), 224)
        image = thumb.image.data
        assert image.shape == (3, 224, 224)
        # constant quadrants survive the 2x decimation exactly
        assert np.all(image[:, :112, :112] == np.float32(0.1))
        assert np.all(image[:, :112, 112:] == np.float32(0.2))
        assert np.all(image[:, 112:, :112] == np.float32(0.3))
        assert np.all(image[:, 112:, 112:] == np.float32(0.4))
        assert thumb.provenance_grid == ((0, 1), (2, 3))

    def test_reverse_quadrants(self):
        clip = const_clip([0.1, 0.2, 0.3, 0.4], c=1, h=224, w=224)
        thumb = arrange(clip, layout_catalog()["compact_2x2"], OrderVariant.reverse(), 224)
        image = thumb.image.data
        assert np.all(image[:, :112, :112] == np.float32(0.4))
        assert np.all(image[:, 112:, 112:] == np.float32(0.1))
        assert thumb.provenance_grid == ((3, 2), (1, 0))

    def test_single_frame_identity(self):
        rng = np.random.default_rng(1)
        frame = random_frame(rng, 3, 224, 224)
        clip = Clip((frame,))
        layout = LayoutSpec(1, 1, ((0, 0),))
        thumb = arrange(clip, layout, OrderVariant.forward(), 224)
        assert np.array_equal(thumb.image.data, frame.data)

    def test_disassembly_round_trip(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            side = int(rng.integers(4, 40))
            clip = make_clip(rng, t=4, c=3, h=side, w=side)
            thumb = arrange(
                clip, layout_catalog()["compact_2x2"], OrderVariant.forward(), 2 * side
            )
            image = thumb.image.data
            for slot, (r, c) in enumerate([(0, 0), (0, 1), (1, 0), (1, 1)]):
                sub = image[:, r * side : (r + 1) * side, c * side : (c + 1) * side]
                assert np.array_equal(sub, clip.frames[slot].data)

    def test_diag_round_trip(self):
        rng = np.random.default_rng(3)
        side = 16
        clip = make_clip(rng, t=4, c=1, h=side, w=side)
        layout = layout_catalog()["diag_4x4"]
        thumb = arrange(clip, layout, OrderVariant.forward(), 4 * side)
        image = thumb.image.data
        for slot, (r, c) in enumerate(layout.slots):
            sub = image[:, r * side : (r + 1) * side, c * side : (c + 1) * side]
            assert np.array_equal(sub, clip.frames[slot].data)
        # off-diagonal cells are fill
        assert np.all(image[:, :side, side : 2 * side] == np.float32(0.0))

    def test_absence_fills_missing(self):
        clip = const_clip([0.5, 0.6, 0.7, 0.8], c=1, h=8, w=8)
        layout = LayoutSpec(2, 2, ((0, 0), (0, 1), (1, 0), (1, 1)), fill_missing=0.25)
        thumb = arrange(clip, layout, OrderVariant.absence(2), 16)
        image = thumb.image.data
        assert np.all(image[:, :8, :8] == np.float32(0.5))
        assert np.all(image[:, :8, 8:] == np.float32(0.6))
        assert np.all(image[:, 8:, :] == np.float32(0.25))
        assert thumb.provenance_grid == ((0, 1), (None, None))

    def test_random_order_is_seeded(self):
        rng = np.random.default_rng(4)
        clip = make_clip(rng, t=4, c=1, h=8, w=8)
        layout = layout_catalog()["compact_2x2"]
        a = arrange(clip, layout, OrderVariant.random(5), 16)
        b = arrange(clip, layout, OrderVariant.random(5), 16)
        assert np.array_equal(a.image.data, b.image.data)
        assert a.provenance_grid == b.provenance_grid
        flat = [v for row in a.provenance_grid for v in row]
        assert sorted(flat) == [0, 1, 2, 3]

    def test_reverse_provenance_is_reversal_of_forward(self):
        rng = np.random.default_rng(5)
        clip = make_clip(rng, t=4, c=1, h=8, w=8)
        layout = layout_catalog()["compact_2x2"]
        fwd = arrange(clip, layout, OrderVariant.forward(), 16)
        rev = arrange(clip, layout, OrderVariant.reverse(), 16)
        fwd_seq = [fwd.provenance_grid[r][c] for r, c in layout.slots]
        rev_seq = [rev.provenance_grid[r][c] for r, c in layout.slots]
        assert rev_seq == fwd_seq[::-1]

    def test_slot_count_mismatch(self):
        clip = const_clip([0.1] * 3)
        with pytest.raises(ValueError):
            arrange(clip, layout_catalog()["compact_2x2"], OrderVariant.forward(), 32)

    def test_mask_never_touches_seams(self):
        # masking precedes assembly, so the zero block stays inside one cell
        for i in range(25):
            stream = clip_stream(13, "seam", i)
            side = 32
            clip = const_clip([1.0] * 4, c=1, h=side, w=side)
            mask = draw_mask((side, side), 12, stream)
            masked = apply_mask(clip, mask)
            thumb = arrange(
                masked, layout_catalog()["compact_2x2"], OrderVariant.forward(), 2 * side
            )
            canvas = thumb.image.data[0]
            rect = mask.effective_rect(side, side)
            expected = set()
            for qr, qc in ((0, 0), (0, 1), (1, 0), (1, 1)):
                for r in range(rect.row0, rect.row1):
                    for c in range(rect.col0, rect.col1):
                        expected.add((qr * side + r, qc * side + c))
            got = {tuple(p) for p in np.argwhere(canvas == 0.0)}
            assert got == expected


class TestLayouts:
    def test_catalog_contents(self):
        catalog = layout_catalog()
        assert catalog["compact_2x2"].slots == ((0, 0), (0, 1), (1, 0), (1, 1))
        assert set(catalog) >= {"compact_2x2", "strip_1x4", "strip_4x1", "diag_4x4"}
        for layout in catalog.values():
            assert layout.num_slots == 4
            assert len(set(layout.slots)) == 4

    def test_compactness_values(self):
        catalog = layout_catalog()
        assert layout_compactness(catalog["compact_2x2"], (112, 112)) == pytest.approx(
            np.hypot(112, 112)
        )
        assert layout_compactness(catalog["strip_1x4"], (112, 112)) == pytest.approx(336.0)
        assert layout_compactness(catalog["strip_4x1"], (112, 112)) == pytest.approx(336.0)

    def test_compact_minimizes_catalog(self):
        catalog = layout_catalog()
        compact = layout_compactness(catalog["compact_2x2"], (112, 112))
        for name, layout in catalog.items():
            if name != "compact_2x2":
                assert layout_compactness(layout, (112, 112)) > compact

    def test_compactness_needs_two_slots(self):
        with pytest.raises(ValueError):
            layout_compactness(LayoutSpec(1, 1, ((0, 0),)), (8, 8))

    def test_layout_validation(self):
        with pytest.raises(ValueError):
            LayoutSpec(2, 2, ((0, 0), (0, 0)))
        with pytest.raises(ValueError):
            LayoutSpec(2, 2, ((0, 0), (2, 0)))
        with pytest.raises(ValueError):
            LayoutSpec(0, 2, ((0, 0),))


class TestClip:
    def test_mismatched_frames_rejected(self):
        with pytest.raises(ValueError):
            Clip((const_frame(1, 8, 8, 0.0), const_frame(1, 9, 8, 0.0)))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            Clip(())
