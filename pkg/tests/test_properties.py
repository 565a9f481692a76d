"""Property-based checks of the invariants each module promises."""

import tempfile
from pathlib import Path

import numpy as np
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import brute_knn, col_extent, row_extent
from sketchmatch.cli import main
from sketchmatch.errors import GeometryError
from sketchmatch.evaluation import ExtractionOutcome, cmc, extraction_success_rate, rank_k_accuracy
from sketchmatch.features import center, horizontal_extent, vertical_extent
from sketchmatch.filters import canny, median_filter
from sketchmatch.geometry import (
    GeometricModel, eye_ball_row, predict_left_eye, predict_left_eyebrow, predict_lips, predict_nose,
    predict_right_eye, predict_right_eyebrow,
)
from sketchmatch.matcher import Gallery, Match, knn_query
from sketchmatch.morphology import FaceRegion, closing, dilate, disk_se, erode, opening
from sketchmatch.pipeline import analyze
from sketchmatch.raster import (
    Rect, binarize, crop, decode_netpbm, encode_pgm, normalize_size, saturating_add,
)
from sketchmatch.synthetic import random_face, render

M = GeometricModel()

gray = st.integers(1, 24).flatmap(
    lambda r: st.integers(1, 24).flatmap(
        lambda c: arrays(np.uint8, (r, c), elements=st.integers(0, 255))))
binary = st.tuples(st.integers(3, 24), st.integers(3, 24)).flatmap(
    lambda s: arrays(np.bool_, s, elements=st.booleans()))
radius = st.integers(0, 3)


# -- raster -----------------------------------------------------------------------

@given(gray)
def test_pgm_round_trip(img):
    data = encode_pgm(img)
    assert encode_pgm(decode_netpbm(data)) == data


@given(gray, st.integers(0, 255))
def test_saturating_add_monotone(img, offset):
    out = saturating_add(img, offset)
    assert (out >= img).all() and (out <= 255).all()
    assert np.array_equal(saturating_add(out, 0), out)


@given(arrays(np.uint8, st.tuples(st.integers(1, 60), st.integers(1, 60)), elements=st.integers(0, 255)))
def test_normalize_idempotent(img):
    once = normalize_size(img)
    assert once.shape == (200, 150)
    assert np.array_equal(normalize_size(once), once)


@given(gray, st.one_of(st.none(), st.integers(0, 256)))
def test_binarize_partitions(img, t):
    b = binarize(img, t)
    assert int(b.sum()) + int((~b).sum()) == img.size


@given(gray)
def test_crop_full_rect(img):
    assert np.array_equal(crop(img, Rect(1, 1, *img.shape)), img)


# -- morphology -------------------------------------------------------------------

@given(binary, radius)
def test_duality(b, r):
    se = disk_se(r)
    pad = max(r, 1)
    # pad with background so out-of-bounds reads agree on both sides
    padded = np.pad(b, pad, constant_values=False)
    dual = ~dilate(~padded, se)
    assert np.array_equal(erode(b, se), dual[pad:-pad, pad:-pad])


@given(binary, radius)
def test_extensive_and_antiextensive(b, r):
    se = disk_se(r)
    assert not (b & ~dilate(b, se)).any()
    assert not (erode(b, se) & ~b).any()


@given(binary, radius)
def test_opening_closing_idempotent(b, r):
    se = disk_se(r)
    o, c = opening(b, se), closing(b, se)
    assert np.array_equal(opening(o, se), o)
    assert np.array_equal(closing(c, se), c)


# -- filters ----------------------------------------------------------------------

@given(gray, st.sampled_from([1, 3, 5]))
def test_median_range(img, window):
    out = median_filter(img, window)
    assert out.min() >= img.min() and out.max() <= img.max()


@given(st.integers(0, 255), st.integers(3, 20), st.integers(3, 20))
def test_median_and_canny_constant(v, r, c):
    img = np.full((max(r, 6), max(c, 6)), v, np.uint8)
    assert np.array_equal(median_filter(img, 3), img)
    assert not canny(img).any()


@given(arrays(np.uint8, (16, 16), elements=st.integers(0, 200)), st.integers(0, 55))
def test_canny_offset_invariant(img, k):
    edges = canny(img)
    assert edges.dtype == np.bool_
    assert np.array_equal(canny(img + np.uint8(k)), edges)


@given(st.integers(6, 34), st.integers(20, 40))
def test_step_edge_localised(pos, cols):
    assume(pos <= cols - 6)
    img = np.zeros((16, cols), np.uint8)
    img[:, pos:] = 255
    ys, xs = np.nonzero(canny(img))
    assert xs.size > 0
    # discontinuity between 0-based columns pos-1 and pos
    assert (np.abs(xs - (pos - 0.5)) <= 1.5).all()


# -- geometry ---------------------------------------------------------------------

@given(st.integers(40, 150), st.integers(1, 30))
def test_rects_translate_with_anchor(ebr, k):
    assume(ebr + k <= 170)
    for fn in (predict_right_eye, predict_left_eye, predict_right_eyebrow, predict_left_eyebrow):
        a, b = fn(ebr, M), fn(ebr + k, M)
        assert (b.x1 - a.x1, b.x2 - a.x2, b.y1, b.y2) == (k, k, a.y1, a.y2)


@given(st.integers(25, 120), st.integers(60, 120))
def test_layout_order(ebr, gap):
    mlr = ebr + gap
    eye = predict_right_eye(ebr, M)
    assert predict_right_eyebrow(ebr, M).x2 < eye.x1
    assert predict_left_eyebrow(ebr, M).x2 < predict_left_eye(ebr, M).x1
    assume(mlr - M.e <= M.L)
    lips = predict_lips(mlr, M)
    assert predict_nose(eye, lips, M).x2 < lips.x1


@given(st.integers(-300, 500))
def test_clamping_never_inverts(ebr):
    for fn in (predict_right_eye, predict_left_eye, predict_right_eyebrow, predict_left_eyebrow, predict_lips):
        try:
            r = fn(ebr, M)
        except GeometryError:
            continue
        assert r.x1 <= r.x2 and r.y1 <= r.y2
        assert Rect(1, 1, M.L, M.W).contains(r)


@given(arrays(np.uint8, (40, 12), elements=st.integers(0, 255)), st.randoms(use_true_random=False))
def test_eye_row_ignores_order_within_rows(img, rnd):
    mask = np.ones(img.shape, bool)
    shuffled = img.copy()
    for row in shuffled:
        perm = list(range(row.size))
        rnd.shuffle(perm)
        row[:] = row[perm]
    assert eye_ball_row(FaceRegion(mask, img)) == eye_ball_row(FaceRegion(mask, shuffled))


# -- features ---------------------------------------------------------------------

@given(binary)
def test_extents_match_oracle(b):
    assume(b.any())
    assert horizontal_extent(b) == col_extent(b.tolist())
    assert vertical_extent(b) == row_extent(b.tolist())


finite = st.floats(-1e3, 1e3, allow_nan=False)


@given(arrays(np.float64, st.tuples(st.integers(1, 10), st.just(8)), elements=finite))
def test_per_vector_centering_zero_mean(vecs):
    assert np.abs(center(vecs).mean(axis=1)).max() <= 1e-12 * max(1.0, np.abs(vecs).max())


# the high-contrast family: no intensity comes near saturation after the +64 lift and +20
HIGH_CONTRAST = dict(bg=171, skin=125, eye=20, pupil=5, eye_line=20, brow=90, ridge=100,
                     nostril=30, lip=50, lip_gap=10, face_line=125, noise=0.0)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**31), st.integers(1, 20), st.sampled_from(["photo", "sketch"]))
def test_features_offset_invariant(seed, k, modality):
    img = render(random_face(np.random.default_rng(seed), "f"), "sketch", palette=HIGH_CONTRAST)
    _, base = analyze(img, modality)
    _, shifted = analyze(img + np.uint8(k), modality)
    assert np.array_equal(base, shifted)


# -- matcher ----------------------------------------------------------------------

int_vecs = st.integers(1, 40).flatmap(
    lambda m: arrays(np.int64, (m, 8), elements=st.integers(-3, 3)))
probe_vec = arrays(np.int64, 8, elements=st.integers(-3, 3))


def _gallery(vecs):
    ids = [f"id{i:03d}" for i in range(len(vecs))]
    return Gallery(ids, ids, vecs.astype(float))


@given(int_vecs, probe_vec, st.integers(1, 8))
def test_knn_equals_brute_force(vecs, probe, k):
    g = _gallery(vecs)
    got = [(m.identity, m.distance) for m in knn_query(g, probe.astype(float), k)]
    assert got == brute_knn(g.identities, vecs.tolist(), probe.tolist(), k)


@given(int_vecs, probe_vec)
def test_far_entry_does_not_change_result(vecs, probe):
    assume(len(vecs) >= 5)      # with fewer than K entries every newcomer is returned
    g = _gallery(vecs)
    before = knn_query(g, probe.astype(float), 5)
    far = probe + 100
    g2 = _gallery(np.vstack([vecs, far]))
    assert knn_query(g2, probe.astype(float), 5) == before


@given(int_vecs, probe_vec, st.integers(1, 10))
def test_scaling_preserves_ranking(vecs, probe, c):
    a = [m.identity for m in knn_query(_gallery(vecs), probe.astype(float), 40)]
    b = [m.identity for m in knn_query(_gallery(vecs * c), (probe * c).astype(float), 40)]
    assert a == b


@given(arrays(np.float64, st.tuples(st.integers(1, 30), st.just(8)), elements=st.floats(-10, 10)),
       arrays(np.float64, 8, elements=st.floats(-10, 10)))
def test_centering_sign_does_not_change_ranking(vecs, probe):
    plus = _gallery(center(vecs))
    minus = _gallery(-center(vecs))
    a = knn_query(plus, center(probe), 5)
    b = knn_query(minus, -center(probe), 5)
    assert [m.identity for m in a] == [m.identity for m in b]
    assert np.allclose([m.distance for m in a], [m.distance for m in b])


# -- evaluation -------------------------------------------------------------------

@given(st.lists(st.booleans(), min_size=1, max_size=50))
def test_success_rate_bounds(flags):
    truth = Rect(1, 1, 10, 10)
    outs = [ExtractionOutcome(str(i), "lips", truth if ok else None, truth) for i, ok in enumerate(flags)]
    rate = extraction_success_rate(outs, "lips")
    assert 0 <= rate <= 100
    assert (rate == 100) == all(flags)


def _results(ranks, m):
    out = []
    for i, r in enumerate(ranks):
        ids = [f"x{j}" for j in range(m - 1)]
        ids.insert(r - 1, f"mate{i}")
        out.append((str(i), [Match(x, "", 0.0) for x in ids], f"mate{i}"))
    return out


@given(st.integers(1, 12).flatmap(lambda m: st.tuples(st.just(m), st.lists(st.integers(1, m), min_size=1, max_size=20))))
def test_cmc_monotone_and_complete(case):
    m, ranks = case
    res = _results(ranks, m)
    curve = cmc(res, m)
    assert (np.diff(curve) >= 0).all()
    assert rank_k_accuracy(res, m) == 100.0


# -- cli --------------------------------------------------------------------------

tokens = st.sampled_from(["extract", "enroll", "query", "evaluate", "--k", "0", "3", "--modality",
                          "photo", "paint", "--config", "--out", "missing.pgm", "dir", "g.txt",
                          "m.tsv", "-h", "--bogus", ""])


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.lists(tokens, max_size=6))
def test_exit_codes_closed(argv):
    with tempfile.TemporaryDirectory() as tmp:
        base = Path(tmp)
        (base / "dir").mkdir()
        (base / "m.tsv").write_text("a\tb\n")
        args = [str(base / a) if a in ("missing.pgm", "dir", "g.txt", "m.tsv") else a for a in argv]
        try:
            code = main(args)
        except SystemExit as exc:    # --help exits through argparse
            code = exc.code
        assert code in (0, 1, 2, 3, 4)
