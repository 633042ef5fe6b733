"""Command-line front-end: dataset conversion, preview, and analysis."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import ConfigError, load_config, parse_order_setting
from .dataset import MANIFEST_NAME, convert_dataset, order_for_clip
from .imgio import FRAME_EXTENSIONS, load_frame, save_frame
from .pixel import resize_bilinear
from .rng import clip_stream
from .transform import Clip, apply_mask, arrange, draw_mask
from .windows import (
    ComplexityInput,
    ModelKind,
    TokenGrid,
    analyze_pipeline,
    flops,
    tall_swin_stages,
)
EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PARTIAL = 3


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="global seed override")
    common.add_argument("--config", default=None, help="YAML config file")

    parser = argparse.ArgumentParser(
        prog="tall",
        description="Pack consecutive video frames into grid thumbnails and "
        "analyze windowed-attention frame mixing.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_dataset = sub.add_parser(
        "dataset", parents=[common], help="convert a frame corpus into thumbnails"
    )
    p_dataset.add_argument("input_root", help="directory of per-video frame directories")
    p_dataset.add_argument("--output", required=True, help="output dataset directory")
    p_dataset.add_argument("--bboxes", default=None, help="face box file")
    p_dataset.add_argument("--workers", type=int, default=None, help="parallel videos")
    p_dataset.add_argument(
        "--allow-short", action="store_true", default=None,
        help="sample even when segments are shorter than a clip",
    )
    p_dataset.set_defaults(func=cmd_dataset)

    p_preview = sub.add_parser(
        "preview", parents=[common], help="assemble one thumbnail from a clip directory"
    )
    p_preview.add_argument("clip_dir", help="directory with exactly clip_len frames")
    p_preview.add_argument("--output", default="thumbnail.png", help="output image path")
    p_preview.add_argument("--order", default=None, help="forward|reverse|random|absence:<k>")
    p_preview.add_argument("--layout", default=None, help="layout name")
    p_preview.add_argument("--no-mask", action="store_true", help="disable masking")
    p_preview.set_defaults(func=cmd_preview)

    p_analyze = sub.add_parser(
        "analyze-windows", parents=[common], help="report per-stage frame mixing"
    )
    p_analyze.add_argument("--output", default=None, help="write JSON report here")
    p_analyze.set_defaults(func=cmd_analyze_windows)

    p_flops = sub.add_parser(
        "flops", parents=[common], help="evaluate an attention complexity formula"
    )
    p_flops.add_argument(
        "kind", choices=[k.value for k in ModelKind], help="backbone kind"
    )
    p_flops.add_argument("frames", type=int, help="number of frames")
    p_flops.add_argument("patches", type=int, help="patches per frame")
    p_flops.add_argument("channels", type=int, help="channel width")
    p_flops.add_argument(
        "window_patches", type=int, nargs="?", default=None,
        help="patches per window (windowed kinds only)",
    )
    p_flops.add_argument("--output", default=None, help="also write the value here")
    p_flops.set_defaults(func=cmd_flops)

    return parser


def cmd_dataset(args: argparse.Namespace) -> int:
    overrides: dict = {"seed": args.seed, "workers": args.workers}
    if args.allow_short:
        overrides["sampler"] = {"allow_short": True}
    cfg = load_config(args.config, overrides)
    manifest, stats = convert_dataset(args.input_root, args.output, cfg, args.bboxes)
    print(
        f"{stats.thumbnails} thumbnails from {stats.videos} videos in "
        f"{stats.seconds:.2f}s ({stats.per_second:.1f} thumbnails/s)"
    )
    if stats.failed_videos:
        print(
            f"warning: {stats.failed_videos} video(s) failed; see "
            f"{Path(args.output) / MANIFEST_NAME}",
            file=sys.stderr,
        )
        return EXIT_PARTIAL
    return EXIT_OK


def _clip_files(clip_dir: Path) -> list[Path]:
    files = [
        p for p in clip_dir.iterdir()
        if p.is_file() and p.suffix.lower() in FRAME_EXTENSIONS
    ]
    if all(p.stem.isdigit() for p in files):
        return sorted(files, key=lambda p: int(p.stem))
    return sorted(files)


def cmd_preview(args: argparse.Namespace) -> int:
    overrides: dict = {"seed": args.seed, "thumbnail": {}}
    if args.order is not None:
        overrides["thumbnail"]["order"] = args.order
    if args.layout is not None:
        overrides["thumbnail"]["layout"] = args.layout
    if args.no_mask:
        overrides["mask"] = {"enabled": False}
    cfg = load_config(args.config, overrides)
    layout_name, layout = cfg.resolve_layout()

    clip_dir = Path(args.clip_dir)
    if not clip_dir.is_dir():
        print(f"error: {clip_dir} is not a directory", file=sys.stderr)
        return EXIT_CONFIG
    files = _clip_files(clip_dir)
    if len(files) != cfg.sampler.clip_len:
        print(
            f"error: expected exactly {cfg.sampler.clip_len} frame images in "
            f"{clip_dir}, found {len(files)}",
            file=sys.stderr,
        )
        return EXIT_CONFIG

    side = cfg.thumbnail.frame_side
    clip = Clip(tuple(resize_bilinear(load_frame(p), side, side) for p in files))
    rng = clip_stream(cfg.seed, clip_dir.name, 0)

    mask_entry = None
    if cfg.mask.enabled:
        mask = draw_mask((side, side), cfg.mask.size, rng)
        clip = apply_mask(clip, mask)
        mask_entry = {
            "center_row": mask.center_row,
            "center_col": mask.center_col,
            "size": mask.size,
            "rect": list(mask.effective_rect(side, side).as_tuple()),
        }

    order_kind, order_keep = parse_order_setting(cfg.thumbnail.order)
    order, order_entry = order_for_clip(order_kind, order_keep, rng)
    thumb = arrange(clip, layout, order, cfg.thumbnail.side)

    out_path = Path(args.output)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    save_frame(thumb.image, out_path)
    sidecar = out_path.with_suffix(".json")
    sidecar.write_text(
        json.dumps(
            {
                "layout": layout_name,
                "order": order_entry,
                "mask": mask_entry,
                "provenance": [list(row) for row in thumb.provenance_grid],
                "frames": [p.name for p in files],
            },
            indent=2,
            sort_keys=True,
        )
        + "\n",
        encoding="utf-8",
    )
    print(f"wrote {out_path} and {sidecar}")
    return EXIT_OK


def cmd_analyze_windows(args: argparse.Namespace) -> int:
    cfg = load_config(args.config, {"seed": args.seed})
    analysis = cfg.analysis
    token_side = analysis.token_side
    try:
        grid = TokenGrid.uniform_partition(
            token_side, token_side, analysis.frame_rows, analysis.frame_cols
        )
        stages = tall_swin_stages(analysis.windows, token_side)
        report = analyze_pipeline(stages, grid)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    print(report.to_text())
    if args.output:
        Path(args.output).write_text(
            json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
    return EXIT_OK


def cmd_flops(args: argparse.Namespace) -> int:
    inp = ComplexityInput(
        num_frames=args.frames,
        patches_per_frame=args.patches,
        channels=args.channels,
        patches_per_window=args.window_patches,
    )
    value = flops(ModelKind(args.kind), inp)
    text = str(value)
    print(text)
    if args.output:
        Path(args.output).write_text(text + "\n", encoding="utf-8")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
