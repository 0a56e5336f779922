"""Command-line driver: segment, eval, sweep-beta, generate, validate-physics.

Every command returns a process exit status; diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import csv
import os
import sys
import time
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .core import PipelineConfig
from .io import (FrameError, dump_config, load_config, numbered_files, read_frames,
                 read_label_png, write_color_png, write_label_png)
from .metrics import (iou, labeled_iou, sweep_beta, write_frame_metrics_csv,
                      write_sweep_csv)
from .segmentation import run_video, video_maps, video_metrics


class CommandError(Exception):
    """A user-facing failure; the message is printed and the exit status is 1."""


@dataclass
class RunManifest:
    input_dir: str
    output_dir: str
    config: PipelineConfig
    version: str = __version__
    stage_seconds: dict = field(default_factory=dict)

    def render(self) -> str:
        head = [f"# crowdflow {self.version}",
                f"# input = {self.input_dir}",
                f"# output = {self.output_dir}"]
        head += [f"# seconds.{k} = {v:.3f}" for k, v in self.stage_seconds.items()]
        return "\n".join(head) + "\n" + dump_config(self.config)

    def write(self, path) -> None:
        path = Path(path)
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_text(self.render())
        os.replace(tmp, path)


@contextmanager
def _timed(store: dict, stage: str):
    t0 = time.perf_counter()
    yield
    store[stage] = time.perf_counter() - t0


def _config(config_path, seed=None, windows=None, beta=None, bins=None) -> PipelineConfig:
    try:
        cfg = load_config(config_path)
        changes = {k: v for k, v in (("rng_seed", seed), ("window_size", windows),
                                     ("beta", beta), ("bins", bins)) if v is not None}
        return cfg.replace(**changes) if changes else cfg
    except (OSError, ValueError) as exc:
        raise CommandError(f"bad configuration: {exc}") from exc


def _load_frames(input_dir):
    try:
        frames = read_frames(input_dir)
    except FrameError as exc:
        raise CommandError(str(exc)) from exc
    if len(frames) < 3:
        raise CommandError(f"{input_dir}: need at least 3 frames, found {len(frames)}")
    return frames


def _load_truths(truth_dir, frames):
    try:
        truths = [read_label_png(p) for _, p in numbered_files(truth_dir, (".png",))]
    except FrameError as exc:
        raise CommandError(str(exc)) from exc
    if len(truths) != len(frames):
        raise CommandError(f"{truth_dir}: {len(truths)} truth maps for {len(frames)} frames")
    for t in truths:
        if (t.width, t.height) != (frames[0].width, frames[0].height):
            raise CommandError(f"{truth_dir}: truth size {t.width}x{t.height} differs from "
                               f"frame size {frames[0].width}x{frames[0].height}")
    return truths


def cmd_segment(input_dir, output_dir, config_path=None, truth_dir=None, *, seed=None,
                windows=None, beta=None, bins=None) -> int:
    """Segment a frame directory; write label/colour PNGs, metrics CSV and the manifest."""
    times: dict = {}
    cfg = _config(config_path, seed, windows, beta, bins)
    with _timed(times, "read"):
        frames = _load_frames(input_dir)
        numbers = [n for n, _ in numbered_files(input_dir)]
        truths = _load_truths(truth_dir, frames) if truth_dir is not None else None
    with _timed(times, "segment"):
        try:
            results = run_video(frames, cfg, truths=truths)
        except ValueError as exc:
            raise CommandError(str(exc)) from exc

    out = Path(output_dir)
    with _timed(times, "write"):
        (out / "labels").mkdir(parents=True, exist_ok=True)
        (out / "color").mkdir(parents=True, exist_ok=True)
        digits = max(5, len(str(max(numbers))))
        for frame, seg in video_maps(results):
            name = f"{numbers[frame]:0{digits}d}.png"
            write_label_png(seg, out / "labels" / name)
            write_color_png(seg, out / "color" / name)
        if truths is not None:
            metrics = [replace(m, frame_index=numbers[m.frame_index])
                       for m in video_metrics(results)]
            write_frame_metrics_csv(metrics, out / "metrics.csv")
    RunManifest(str(input_dir), str(output_dir), cfg, stage_seconds=times).write(
        out / "manifest.txt")
    return 0


def cmd_eval(pred_dir, truth_dir, out_csv="eval.csv") -> int:
    """Score predicted label maps against truths with the same frame numbers.

    Truth frames without a prediction (window starts) are skipped; a
    prediction without a truth is an error.
    """
    try:
        preds = dict(numbered_files(pred_dir, (".png",)))
        truths = dict(numbered_files(truth_dir, (".png",)))
    except FrameError as exc:
        raise CommandError(str(exc)) from exc
    if not preds:
        raise CommandError(f"{pred_dir}: no label maps")
    missing = sorted(set(preds) - set(truths))
    if missing:
        raise CommandError(f"{truth_dir}: no truth for predicted frames {missing[:5]}"
                           f"{' ...' if len(missing) > 5 else ''}")
    rows = []
    for n in sorted(preds):
        try:
            p, t = read_label_png(preds[n]), read_label_png(truths[n])
        except FrameError as exc:
            raise CommandError(str(exc)) from exc
        if p.labels.shape != t.labels.shape:
            raise CommandError(f"{preds[n]}: size {p.width}x{p.height} differs from truth "
                               f"{t.width}x{t.height}")
        rows.append((n, iou(p, t), labeled_iou(p, t)))
    mean_iou = float(np.mean([r[1] for r in rows]))
    mean_liou = float(np.mean([r[2] for r in rows]))
    with open(out_csv, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["frame", "iou", "labeled_iou"])
        for n, a, b in rows:
            w.writerow([n, repr(a), repr(b)])
        w.writerow(["mean", repr(mean_iou), repr(mean_liou)])
    print(f"mean iou {mean_iou:.6f}  mean labeled_iou {mean_liou:.6f}  ({len(rows)} frames)")
    return 0


def cmd_sweep_beta(input_dir, config_path=None, beta_list=None, out_csv="sweep.csv", *,
                   seed=None, windows=None, bins=None) -> int:
    cfg = _config(config_path, seed, windows, None, bins)
    frames = _load_frames(input_dir)
    try:
        result = sweep_beta(frames, cfg, beta_list)
    except ValueError as exc:
        raise CommandError(str(exc)) from exc
    write_sweep_csv(result, out_csv)
    for b, e, r in zip(result.betas, result.mean_errors, result.raw_errors):
        print(f"beta {b:g}: normalised error {e:.4f} ({r:.4f} px)")
    print(f"best beta {result.best_beta:g}")
    return 0


def cmd_generate(kind, out_dir, *, width=200, height=200, frames=40, blobs=12,
                 speed=(3.0, 0.0), blob_radius=10.0, seed=0, bins=None) -> int:
    from .synthgen import SceneSpec, generate, write_scene

    try:
        spec = SceneSpec(kind=kind, width=width, height=height, n_frames=frames,
                         n_blobs=blobs, speed=speed, blob_radius=blob_radius,
                         texture_seed=seed, bins=bins)
    except ValueError as exc:
        raise CommandError(f"invalid scene: {exc}") from exc
    write_scene(generate(spec), out_dir)
    print(f"wrote {frames} {kind} frames to {out_dir}")
    return 0


def cmd_validate_physics(out_dir=None, seed=0) -> int:
    from .dynamics.passive import PassiveLangevinConfig, physics_suite, simulate_passive

    checks = physics_suite()
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.detail}")
    if out_dir is not None:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
        cfg = PassiveLangevinConfig(gamma=1.0, noise_strength_B=0.5, steps=2000, dt=1e-2,
                                    n_particles=1000, rng_seed=seed)
        simulate_passive(cfg).to_csv(Path(out_dir) / "passive_msv.csv")
    return 0 if all(c.passed for c in checks) else 1


def _floats(text: str) -> list[float]:
    try:
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _pair(text: str) -> tuple[float, float]:
    vals = _floats(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"expected 'vx,vy', got {text!r}")
    return vals[0], vals[1]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="crowdflow", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def pipeline_flags(p, with_beta=True):
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--seed", type=int, help="override rng_seed")
        p.add_argument("--windows", type=int, help="override window_size (frames per window)")
        p.add_argument("--bins", type=int, help="override the number of direction bins")
        if with_beta:
            p.add_argument("--beta", type=float, help="override the drift coefficient")

    p = sub.add_parser("segment", help="segment a directory of numbered frames")
    p.add_argument("input_dir")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--truth", help="directory of ground-truth label PNGs for metrics")
    pipeline_flags(p)

    p = sub.add_parser("eval", help="score predicted label maps against ground truth")
    p.add_argument("pred_dir")
    p.add_argument("--truth", required=True)
    p.add_argument("--out", default="eval.csv", help="CSV path (default eval.csv)")

    p = sub.add_parser("sweep-beta", help="flow error across a grid of beta values")
    p.add_argument("input_dir")
    p.add_argument("--beta", type=_floats, help="comma-separated betas (default 0.1..0.9)")
    p.add_argument("--out", default="sweep.csv", help="CSV path (default sweep.csv)")
    pipeline_flags(p, with_beta=False)

    p = sub.add_parser("generate", help="write a synthetic scene with ground truth")
    p.add_argument("kind", choices=["linear", "elliptical", "bilinear"])
    p.add_argument("--out", required=True)
    p.add_argument("--width", type=int, default=200)
    p.add_argument("--height", type=int, default=200)
    p.add_argument("--frames", type=int, default=40)
    p.add_argument("--blobs", type=int, default=12)
    p.add_argument("--speed", type=_pair, default=(3.0, 0.0), help="vx,vy in pixels/frame")
    p.add_argument("--blob-radius", type=float, default=10.0)
    p.add_argument("--seed", type=int, default=0, help="texture seed")
    p.add_argument("--bins", type=int, help="truth label bins (default 4 elliptical, else 8)")

    p = sub.add_parser("validate-physics", help="passive Langevin checks against closed forms")
    p.add_argument("--out", help="directory for the <v^2> trajectory CSV")
    p.add_argument("--seed", type=int, default=0)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "segment":
            return cmd_segment(args.input_dir, args.out, args.config, args.truth,
                               seed=args.seed, windows=args.windows, beta=args.beta,
                               bins=args.bins)
        if args.command == "eval":
            return cmd_eval(args.pred_dir, args.truth, args.out)
        if args.command == "sweep-beta":
            return cmd_sweep_beta(args.input_dir, args.config, args.beta, args.out,
                                  seed=args.seed, windows=args.windows, bins=args.bins)
        if args.command == "generate":
            return cmd_generate(args.kind, args.out, width=args.width, height=args.height,
                                frames=args.frames, blobs=args.blobs, speed=args.speed,
                                blob_radius=args.blob_radius, seed=args.seed, bins=args.bins)
        return cmd_validate_physics(args.out, args.seed)
    except CommandError as exc:
        print(f"crowdflow {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
