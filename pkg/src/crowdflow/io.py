"""Frame, label-map and config file I/O."""
from __future__ import annotations

import os
import re
import tempfile
from dataclasses import fields
from pathlib import Path

import numpy as np
from PIL import Image

from .core import GrayFrame, PipelineConfig

FRAME_SUFFIXES = (".pgm", ".png")
_NUMBERED = re.compile(r"^(?P<prefix>[A-Za-z_\-]*)(?P<num>\d+)$")


class FrameError(Exception):
    """A frame file is missing, unreadable or inconsistent with its sequence."""


def numbered_files(directory, suffixes=FRAME_SUFFIXES) -> list[tuple[int, Path]]:
    """Image files in ``directory`` ordered by their zero-padded frame number.

    Every file with a matching suffix must be named ``<letters><digits>``;
    anything else is rejected rather than guessed at.
    """
    d = Path(directory)
    if not d.is_dir():
        raise FrameError(f"{d}: not a directory")
    found = []
    for p in sorted(d.iterdir()):
        if p.suffix.lower() not in suffixes or not p.is_file():
            continue
        m = _NUMBERED.match(p.stem)
        if m is None:
            raise FrameError(f"{p}: frame names must end in a zero-padded number")
        found.append((int(m.group("num")), p))
    found.sort()
    numbers = [n for n, _ in found]
    if len(set(numbers)) != len(numbers):
        raise FrameError(f"{d}: duplicate frame numbers")
    if [p.name for _, p in found] != sorted(p.name for _, p in found):
        raise FrameError(f"{d}: frame numbers are not zero-padded consistently")
    return found


def read_gray(path) -> GrayFrame:
    try:
        with Image.open(path) as im:
            im.load()
            if im.mode not in ("L", "I;16", "I", "P", "1"):
                raise FrameError(f"{path}: expected a grayscale image, got mode {im.mode}")
            arr = np.asarray(im.convert("L"), dtype=np.float64)
    except FrameError:
        raise
    except Exception as exc:  # PIL raises a zoo of types for corrupt files
        raise FrameError(f"{path}: cannot read image ({exc})") from exc
    return GrayFrame(arr)


def read_frames(directory) -> list[GrayFrame]:
    files = numbered_files(directory)
    frames = []
    for _, p in files:
        f = read_gray(p)
        if frames and f.shape != frames[0].shape:
            raise FrameError(f"{p}: size {f.width}x{f.height} differs from "
                             f"{frames[0].width}x{frames[0].height}")
        frames.append(f)
    return frames


def _atomic_save(img: Image.Image, path, fmt: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    os.close(fd)
    try:
        img.save(tmp, format=fmt)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_pgm(frame: GrayFrame, path) -> None:
    arr = np.clip(np.rint(frame.data), 0, 255).astype(np.uint8)
    _atomic_save(Image.fromarray(arr, mode="L"), path, "PPM")


def write_label_png(seg, path) -> None:
    _atomic_save(Image.fromarray(np.asarray(seg.labels, dtype=np.uint8), mode="L"), path, "PNG")


def write_color_png(seg, path) -> None:
    _atomic_save(Image.fromarray(seg.colorized(), mode="RGB"), path, "PNG")


def read_label_png(path):
    from .segmentation import SegmentationMap

    try:
        with Image.open(path) as im:
            im.load()
            arr = np.asarray(im.convert("L") if im.mode != "L" else im, dtype=np.uint8)
    except Exception as exc:
        raise FrameError(f"{path}: cannot read label map ({exc})") from exc
    return SegmentationMap(arr)


def _coerce(name: str, typ, raw: str):
    raw = raw.strip()
    typ = str(typ)
    try:
        if typ == "bool":
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if typ == "int":
            return int(raw)
        return float(raw)
    except ValueError:
        raise ValueError(f"config key {name!r}: cannot parse {raw!r} as {typ}") from None


def parse_config_text(text: str, base: PipelineConfig | None = None) -> PipelineConfig:
    """Parse flat ``key = value`` lines; ``#`` starts a comment; unknown keys are errors."""
    types = {f.name: f.type for f in fields(PipelineConfig)}
    values = {} if base is None else base.as_dict()
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key = value")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in types:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        values[key] = _coerce(key, types[key], raw)
    return PipelineConfig(**values)


def load_config(path=None) -> PipelineConfig:
    if path is None:
        return PipelineConfig()
    return parse_config_text(Path(path).read_text())


def dump_config(cfg: PipelineConfig) -> str:
    return "".join(f"{k} = {v}\n" for k, v in cfg.as_dict().items())
