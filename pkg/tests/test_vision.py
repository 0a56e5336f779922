import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from crowdflow.core import GrayFrame, PipelineConfig, Vec2, quantize_orientation
from crowdflow.vision import (abs_difference, corner_scores, extract_keypoints, fast_detect,
                              lk_flow, threshold_difference)
from oracles import brute_fast, shifted, smooth_texture

CFG = PipelineConfig()


def square_image(size=21, lo=0, hi=255, at=8, side=5):
    a = np.full((size, size), float(lo))
    a[at:at + side, at:at + side] = hi
    return a


# --- differencing ---------------------------------------------------------

def test_abs_difference_examples():
    f1, f2 = GrayFrame(np.full((5, 5), 10.0)), GrayFrame(np.full((5, 5), 12.0))
    assert np.all(abs_difference(f1, f2).data == 2)
    assert np.all(abs_difference(f1, f1).data == 0)
    a = np.full((5, 5), 10.0)
    a[2, 3] = 15
    d = abs_difference(f1, GrayFrame(a)).data
    assert d[2, 3] == 5 and np.count_nonzero(d) == 1


def test_abs_difference_size_mismatch():
    with pytest.raises(ValueError):
        abs_difference(GrayFrame(np.zeros((5, 5))), GrayFrame(np.zeros((5, 6))))


def test_threshold_difference_zeroes_small_values():
    d = GrayFrame(np.array([[0.0, 9.0, 10.0, 50.0]]))
    assert threshold_difference(d, 10).data.tolist() == [[0.0, 0.0, 10.0, 50.0]]


# --- FAST -------------------------------------------------------------------

def test_fast_uniform_is_empty():
    assert fast_detect(GrayFrame(np.full((20, 20), 90.0)), 20) == []


def test_fast_rejects_tiny_image():
    with pytest.raises(ValueError):
        fast_detect(GrayFrame(np.zeros((6, 10))), 20)


def test_fast_square_finds_all_four_corners():
    a = square_image()
    pts = set(fast_detect(GrayFrame(a), 20))
    for c in [(8, 8), (12, 8), (8, 12), (12, 12)]:
        assert c in pts
    # a 5-pixel square is narrower than the 7-pixel circle, so edge midpoints
    # pass the segment test too; the exhaustive oracle settles the full set
    assert sorted(pts) == sorted(brute_fast(a, 20))


def test_fast_border_never_reported():
    rng = np.random.default_rng(3)
    a = rng.uniform(0, 255, (15, 15))
    for x, y in fast_detect(GrayFrame(a), 10, nonmax=False):
        assert 3 <= x < 12 and 3 <= y < 12


@pytest.mark.parametrize("seed", range(6))
def test_fast_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    a = np.round(rng.uniform(0, 255, (16, 18)))
    for nonmax in (False, True):
        assert sorted(fast_detect(GrayFrame(a), 25, nonmax)) == sorted(brute_fast(a, 25, nonmax))


def test_fast_scores_are_arc_sums():
    a = square_image()
    s = corner_scores(GrayFrame(a), 20)
    assert s[8, 8] > 0 and s[0, 0] == 0 and s[10, 10] == 0


@given(st.integers(0, 2**32 - 1), st.integers(1, 60))
def test_fast_invariant_under_intensity_shift(seed, thr):
    rng = np.random.default_rng(seed)
    a = np.round(rng.uniform(0, 235, (14, 14)))
    assert fast_detect(GrayFrame(a), thr) == fast_detect(GrayFrame(a + 20), thr)


# --- Lucas-Kanade -----------------------------------------------------------

def test_lk_identity():
    a = smooth_texture(np.random.default_rng(0), (48, 48))
    f = GrayFrame(a)
    est = lk_flow(f, f, [Vec2(20, 20), Vec2(30, 25)], CFG)
    for e in est:
        assert e.valid and e.displacement.norm() < 1e-9


def test_lk_integer_translation():
    a = smooth_texture(np.random.default_rng(1), (64, 64))
    f1, f2 = GrayFrame(a), GrayFrame(shifted(a, 2, 1))
    pts = [Vec2(x, y) for x in (20, 32, 44) for y in (20, 32, 44)]
    for e in lk_flow(f1, f2, pts, CFG):
        assert e.valid
        assert abs(e.displacement.x - 2) < 0.5 and abs(e.displacement.y - 1) < 0.5


def test_lk_flat_region_invalid():
    a = np.full((40, 40), 100.0)
    est = lk_flow(GrayFrame(a), GrayFrame(a), [Vec2(20, 20)], CFG)[0]
    assert not est.valid and est.displacement == Vec2(0, 0)


def test_lk_size_mismatch():
    with pytest.raises(ValueError):
        lk_flow(GrayFrame(np.zeros((20, 20))), GrayFrame(np.zeros((20, 21))), [], CFG)


def test_lk_output_follows_input_order():
    a = smooth_texture(np.random.default_rng(2), (64, 64))
    f1, f2 = GrayFrame(a), GrayFrame(shifted(a, 1, -2))
    pts = [Vec2(20, 30), Vec2(40, 22), Vec2(33, 41)]
    fwd = lk_flow(f1, f2, pts, CFG)
    rev = lk_flow(f1, f2, pts[::-1], CFG)
    assert fwd == rev[::-1]


@given(st.integers(0, 2**32 - 1), st.integers(-3, 3), st.integers(-3, 3))
def test_lk_recovers_small_translations(seed, dx, dy):
    a = smooth_texture(np.random.default_rng(seed), (56, 56))
    est = lk_flow(GrayFrame(a), GrayFrame(shifted(a, dx, dy)), [Vec2(28, 28)], CFG)[0]
    assert est.valid
    assert abs(est.displacement.x - dx) < 0.5 and abs(est.displacement.y - dy) < 0.5


# --- keypoints ----------------------------------------------------------------

def blob_pair(shift, n=1, size=60):
    """Bright 5x5 squares with a little texture, before and after moving by ``shift``."""
    rng = np.random.default_rng(0)
    f1, f2 = np.full((size, size), 20.0), np.full((size, size), 20.0)
    patch = rng.uniform(150, 255, (5, 5))
    for k in range(n):
        x, y = 20 + 12 * k, 22 + 12 * k
        sx, sy = shift[k] if n > 1 else shift
        f1[y:y + 5, x:x + 5] = patch
        f2[y + sy:y + sy + 5, x + sx:x + sx + 5] = patch
    return GrayFrame(f1), GrayFrame(f2)


def test_static_scene_has_no_keypoints():
    f = GrayFrame(smooth_texture(np.random.default_rng(0), (40, 40)))
    assert extract_keypoints(f, f, CFG) == []


def test_single_blob_moving_right():
    f1, f2 = blob_pair((3, 0))
    ps = extract_keypoints(f1, f2, CFG)
    assert ps
    for p in ps:
        assert abs(p.vel.x - 3) < 0.5 and abs(p.vel.y) < 0.5
        assert p.bin == quantize_orientation(0.0, CFG.bins, CFG.centered_bins)


def test_two_opposing_blobs_give_two_bins():
    f1, f2 = blob_pair([(4, 0), (-4, 0)], n=2)
    ps = extract_keypoints(f1, f2, CFG)
    assert len({p.bin for p in ps}) == 2


def test_keypoints_inside_frame_and_valid():
    f1, f2 = blob_pair((3, 0))
    for p in extract_keypoints(f1, f2, CFG):
        assert f1.contains(p.pos)
        p.check(CFG.bins, CFG.centered_bins)


def test_pyramid_stops_before_levels_get_narrow():
    from crowdflow.vision import build_pyramid
    assert len(build_pyramid(np.zeros((64, 64)), 3, 22)) == 2
    assert len(build_pyramid(np.zeros((64, 64)), 3, 16)) == 3
    assert [p.shape for p in build_pyramid(np.zeros((200, 120)), 3, 30)] == \
        [(200, 120), (100, 60), (50, 30)]
    assert all(p.flags.c_contiguous for p in build_pyramid(np.zeros((64, 64)), 3))
