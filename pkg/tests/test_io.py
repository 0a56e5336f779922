import numpy as np
import pytest
from PIL import Image

from crowdflow.core import GrayFrame, PipelineConfig
from crowdflow.io import (FrameError, dump_config, numbered_files, parse_config_text,
                          read_frames, read_gray, read_label_png, write_label_png, write_pgm)
from crowdflow.segmentation import SegmentationMap


def save(path, arr, mode="L"):
    Image.fromarray(np.asarray(arr, dtype=np.uint8), mode=mode).save(path)


def test_numbered_files_order(tmp_path):
    for n in (10, 2, 1):
        save(tmp_path / f"f{n:03d}.png", np.zeros((4, 4)))
    (tmp_path / "notes.txt").write_text("ignored")
    assert [n for n, _ in numbered_files(tmp_path)] == [1, 2, 10]


@pytest.mark.parametrize("names", [["a1.png", "frame.png"], ["1.png", "01.png"],
                                   ["9.png", "10.png"]])
def test_bad_names_rejected(tmp_path, names):
    for name in names:
        save(tmp_path / name, np.zeros((4, 4)))
    with pytest.raises(FrameError):
        numbered_files(tmp_path)


def test_pgm_round_trip(tmp_path):
    a = np.random.default_rng(0).integers(0, 256, (7, 9)).astype(float)
    write_pgm(GrayFrame(a), tmp_path / "00000.pgm")
    assert np.array_equal(read_gray(tmp_path / "00000.pgm").data, a)


def test_corrupt_file_is_named(tmp_path):
    (tmp_path / "00001.png").write_bytes(b"not an image")
    with pytest.raises(FrameError, match="00001.png"):
        read_frames(tmp_path)


def test_colour_frames_rejected(tmp_path):
    save(tmp_path / "00001.png", np.zeros((4, 4, 3)), mode="RGB")
    with pytest.raises(FrameError, match="grayscale"):
        read_frames(tmp_path)


def test_size_mismatch_named(tmp_path):
    save(tmp_path / "00001.png", np.zeros((4, 4)))
    save(tmp_path / "00002.png", np.zeros((4, 5)))
    with pytest.raises(FrameError, match="00002.png"):
        read_frames(tmp_path)


def test_label_png_round_trip(tmp_path):
    seg = SegmentationMap(np.array([[0, 1, 8], [3, 3, 0]], dtype=np.uint8))
    write_label_png(seg, tmp_path / "l.png")
    assert read_label_png(tmp_path / "l.png") == seg


def test_config_text():
    assert parse_config_text("") == PipelineConfig()
    cfg = parse_config_text("# comment\nbeta = 0.3  # inline\nbins=4\ncentered_bins = false\n")
    assert (cfg.beta, cfg.bins, cfg.centered_bins) == (0.3, 4, False)
    assert parse_config_text(dump_config(cfg)) == cfg
    for bad in ["nonsense = 1", "bins = four", "beta 0.3", "bins = 1"]:
        with pytest.raises(ValueError):
            parse_config_text(bad)
