"""Command-line harness.

Subcommands cover the whole pipeline: ``fixtures`` synthesizes a toy
dataset, ``prepare-data`` degrades it and caches audio features,
``train`` fits the restoration network, ``eval`` scores a checkpoint
against the bicubic baseline, and ``restore`` runs a checkpoint on a
degraded clip without ground truth.

Every command prints one ``effective-config`` JSON line before doing
work, so a run can be reproduced from its log.  Exit codes: 0 on
success, 2 for invalid input or arguments, 3 for missing environment
pieces (no H.264 encoder), 1 for everything else.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np
import torch

from .clips import load_video, load_wav, save_video
from .codec import CRF_VALUES
from .config import config_dict, load_overrides, train_config
from .emotions import all_state_names, parse_state_name
from .errors import EnvironmentFailure, SoftvidError, ValidationError
from .evaluate import EvalReport, evaluate_clips, format_table, restore_clip, write_report
from .fixtures import make_fixture
from .manifest import SPLITS, degradation_labels, load_split, read_manifest
from .prepare import prepare_dataset
from .trainer import CHECKPOINT_NAME, load_model, train
from .windows import WindowDataset, inference_windows

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_VALIDATION = 2
EXIT_ENVIRONMENT = 3

REPORT_NAME = "eval_report.jsonl"


def _echo(command: str, settings: dict) -> None:
    print("effective-config " + json.dumps({"command": command, **settings}, sort_keys=True))


def _pick_label(available: list[str], requested: str | None) -> str:
    if not available:
        raise ValidationError(
            "manifest has no degraded clips; run prepare-data first"
        )
    if requested is None:
        if len(available) == 1:
            return available[0]
        raise ValidationError(
            "manifest has several degradation labels "
            f"({', '.join(available)}); pick one with --degradation"
        )
    if requested not in available:
        raise ValidationError(
            f"degradation {requested!r} not in manifest; "
            f"available: {', '.join(available)}"
        )
    return requested


def cmd_fixtures(args: argparse.Namespace) -> int:
    _echo("fixtures", {
        "out": str(args.out), "clips": args.clips, "frames": args.frames,
        "hq_height": args.hq_height, "hq_width": args.hq_width,
        "fps": args.fps, "seed": args.seed,
    })
    manifest = make_fixture(
        args.out, n_clips=args.clips, n_frames=args.frames,
        hq_height=args.hq_height, hq_width=args.hq_width,
        fps=args.fps, seed=args.seed,
    )
    print(f"wrote {manifest} ({args.clips} clips, {args.frames} frames each)")
    return EXIT_OK


def cmd_prepare(args: argparse.Namespace) -> int:
    crfs = args.crf if args.codec == "x264" else []
    _echo("prepare-data", {
        "manifest": str(args.manifest), "scale": args.scale,
        "codec": args.codec, "crf": crfs,
    })
    result = prepare_dataset(args.manifest, args.scale, crfs=crfs, codec=args.codec)
    for clip_id, reason in result.failures:
        print(f"failed {clip_id}: {reason}", file=sys.stderr)
    print(
        f"prepared {result.degraded} artifacts, skipped {result.skipped} "
        f"already present, {len(result.failures)} clips failed"
    )
    return EXIT_OK if result.ok else EXIT_RUNTIME


def cmd_train(args: argparse.Namespace) -> int:
    overrides = load_overrides(args.config) if args.config else None
    cfg = train_config(
        overrides,
        epochs=args.epochs, batch_size=args.batch_size, lr=args.lr,
        warmup_epochs=args.warmup_epochs, seed=args.seed, n=args.n,
        miniature=args.miniature, deterministic=args.deterministic,
    )
    records = read_manifest(args.manifest)
    label = _pick_label(degradation_labels(records), args.degradation)
    _echo("train", {
        "manifest": str(args.manifest), "out": str(args.out),
        "degradation": label, "resume": args.resume and str(args.resume),
        **config_dict(cfg),
    })
    clips = load_split(Path(args.manifest).parent, records, "train", cfg.n, label)
    dataset = WindowDataset(clips)
    state = train(cfg, dataset, args.out, resume=args.resume)
    print(
        f"trained to epoch {state.epoch} ({state.step} steps); "
        f"checkpoint: {Path(args.out) / CHECKPOINT_NAME}"
    )
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    model = load_model(args.checkpoint)
    records = read_manifest(args.manifest)
    available = degradation_labels(records)
    labels = available if args.degradation is None else [
        _pick_label(available, name) for name in args.degradation
    ]
    if not labels:
        raise ValidationError("manifest has no degraded clips; run prepare-data first")
    out_dir = Path(args.out) if args.out else Path(args.checkpoint).parent
    _echo("eval", {
        "manifest": str(args.manifest), "checkpoint": str(args.checkpoint),
        "split": args.split, "degradation": labels, "out": str(out_dir),
        "batch_size": args.batch_size,
    })
    rows = []
    for label in labels:
        clips = load_split(
            Path(args.manifest).parent, records, args.split,
            model.cfg.window_half, label,
        )
        rows.extend(evaluate_clips(model, clips, label, args.batch_size).rows)
    report = EvalReport(rows)
    print(format_table(report))
    out_dir.mkdir(parents=True, exist_ok=True)
    write_report(report, out_dir / REPORT_NAME)
    print(f"wrote {out_dir / REPORT_NAME}")
    return EXIT_OK


def cmd_restore(args: argparse.Namespace) -> int:
    if args.emotion is None:
        raise ValidationError(
            "--emotion is required; expected one of: " + ", ".join(all_state_names())
        )
    state = parse_state_name(args.emotion)
    _echo("restore", {
        "video": str(args.video), "audio": str(args.audio),
        "emotion": args.emotion, "checkpoint": str(args.checkpoint),
        "out": str(args.out), "fps": args.fps,
        "batch_size": args.batch_size, "deterministic": args.deterministic,
    })
    if args.deterministic:
        torch.use_deterministic_algorithms(True)
    model = load_model(args.checkpoint)
    frames = load_video(args.video)
    audio, rate = load_wav(args.audio)
    clip = inference_windows(
        Path(args.video).stem, frames, audio, rate, args.fps,
        state.index, model.cfg.window_half,
    )
    restored = restore_clip(model, clip, args.batch_size)
    out_frames = np.rint(restored * 255.0).astype(np.uint8)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    save_video(args.out, out_frames)
    t, h, w = out_frames.shape[:3]
    print(f"wrote {args.out} ({t} frames at {h}x{w})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="softvid",
        description="Soft decoding of compressed talking-head video.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fixtures", help="synthesize a toy dataset")
    p.add_argument("--out", required=True, help="dataset directory to create")
    p.add_argument("--clips", type=int, default=4)
    p.add_argument("--frames", type=int, default=24, help="frames per clip")
    p.add_argument("--hq-height", type=int, default=64)
    p.add_argument("--hq-width", type=int, default=96)
    p.add_argument("--fps", type=float, default=25.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_fixtures)

    p = sub.add_parser("prepare-data", help="degrade clips and cache audio features")
    p.add_argument("--manifest", required=True)
    p.add_argument("--scale", type=int, default=4, help="spatial downsampling factor")
    p.add_argument("--codec", choices=("x264", "none"), default="x264",
                   help="'none' skips compression and only downsamples")
    p.add_argument("--crf", type=int, nargs="+", default=list(CRF_VALUES),
                   help="compression levels to encode (x264 only)")
    p.set_defaults(func=cmd_prepare)

    p = sub.add_parser("train", help="fit the restoration network")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="run directory for checkpoint and loss log")
    p.add_argument("--degradation", help="which degraded variant to train on")
    p.add_argument("--config", help="YAML file of training overrides (flags win)")
    p.add_argument("--resume", help="checkpoint to continue from")
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--warmup-epochs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--n", type=int, help="temporal window half-width")
    p.add_argument("--miniature", action="store_const", const=True, default=None,
                   help="use the small CI topology")
    p.add_argument("--deterministic", action="store_const", const=True, default=None,
                   help="force deterministic kernels")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="score a checkpoint against the bicubic baseline")
    p.add_argument("--manifest", required=True)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--split", choices=SPLITS, default="val")
    p.add_argument("--degradation", nargs="+",
                   help="labels to evaluate (default: all present)")
    p.add_argument("--out", help="report directory (default: checkpoint's)")
    p.add_argument("--batch-size", type=int, default=8)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("restore", help="restore a degraded clip with a checkpoint")
    p.add_argument("--video", required=True, help="degraded clip, .npy uint8 (T, h, w, 3)")
    p.add_argument("--audio", required=True, help="matching mono WAV")
    p.add_argument("--emotion", help="emotion state name, e.g. happy-normal")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--out", required=True, help="output .npy path")
    p.add_argument("--fps", type=float, default=25.0)
    p.add_argument("--batch-size", type=int, default=8)
    p.add_argument("--deterministic", action="store_true")
    p.set_defaults(func=cmd_restore)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EnvironmentFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENVIRONMENT
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SoftvidError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
