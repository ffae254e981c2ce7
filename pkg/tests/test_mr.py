import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from artcode_mr.classifier import Prediction, TrainConfig, train
from artcode_mr.errors import DimensionMismatch, InvalidSpec, UnsupportedMaskCount
from artcode_mr.image import GrayImage
from artcode_mr.mr import (
    RhoRecord, Thresholds, WeightVector, aggregate_rho, build_masks, classify_augmented, generate_followups,
    read_rho_csv, record_from_probas, rectify, write_rho_csv,
)

W = WeightVector()


def test_default_rho_max_is_exactly_one():
    assert W.rho_max == 1.0
    assert W.values == (0.1,) * 4 + (0.15,) * 4


def test_all_binary_vectors_match_brute_force():
    # exact rational dot product of the float weights, rounded once
    weights = [Fraction(0.1)] * 4 + [Fraction(0.15)] * 4
    for p in itertools.product((0, 1), repeat=8):
        want = float(sum((w for pi, w in zip(p, weights) if pi), Fraction(0)))
        assert aggregate_rho(p, W) == want


@pytest.mark.parametrize("p, rho", [
    ((1,) * 8, 1.0),
    ((0,) * 8, 0.0),
    ((1, 0, 1, 1, 1, 0, 1, 1), 0.75),
])
def test_rho_examples(p, rho):
    assert aggregate_rho(p, W) == pytest.approx(rho, abs=1e-15)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.booleans(), min_size=8, max_size=8), st.lists(st.booleans(), min_size=8, max_size=8))
def test_rho_is_additive_on_disjoint_supports(a, b):
    b = [bi and not ai for ai, bi in zip(a, b)]
    s = [int(ai or bi) for ai, bi in zip(a, b)]
    assert aggregate_rho(a, W) + aggregate_rho(b, W) == pytest.approx(aggregate_rho(s, W), abs=1e-15)


def test_rho_input_checks():
    with pytest.raises(DimensionMismatch):
        aggregate_rho((1, 0), W)
    with pytest.raises(InvalidSpec):
        aggregate_rho((0.5,) * 8, W)
    assert aggregate_rho((0.5,) * 8, W, binary=False) == pytest.approx(0.5)


@pytest.mark.parametrize("kwargs", [{"w_s": 0.2, "w_o": 0.1}, {"w_s": 0.0}, {"n": 0}])
def test_weight_ordering(kwargs):
    with pytest.raises(InvalidSpec):
        WeightVector(**kwargs)


def test_masks_geometry_default():
    ms = build_masks((256, 256))
    assert ms.n == 4 and ms.m == 4 and len(ms) == 8
    assert all((mk.width, mk.height) == (128, 128) for mk in ms.separation)
    assert sorted((mk.width, mk.height) for mk in ms.occlusion) == [(128, 256)] * 2 + [(256, 128)] * 2
    for tile in ms.separation:
        assert sum(occ.covers(tile) for occ in ms.occlusion) == 2


@settings(max_examples=40, deadline=None)
@given(st.integers(64, 300), st.integers(64, 300), st.sampled_from([4, 9, 16]))
def test_separation_partitions_and_occlusion_halves(w, h, n):
    ms = build_masks((w, h), n)
    cover = sum(mk.array((w, h)).astype(int) for mk in ms.separation)
    assert np.all(cover == 1)
    for occ in ms.occlusion:
        area = occ.width * occ.height
        assert abs(area - w * h / 2) <= max(w, h) / 2


def test_unsupported_counts():
    with pytest.raises(UnsupportedMaskCount):
        build_masks((256, 256), 5, 4)
    with pytest.raises(UnsupportedMaskCount):
        build_masks((256, 256), 4, 2)


def test_followups_of_blank_are_blank():
    blocks = generate_followups(GrayImage.blank(64, 64), build_masks((64, 64)))
    assert len(blocks) == 8 and all(np.all(b.data == 255) for b in blocks)


def test_content_lands_in_its_quadrant():
    a = np.full((64, 64), 255, np.uint8)
    a[5:20, 5:20] = 0
    blocks = generate_followups(GrayImage(a), build_masks((64, 64)))
    assert blocks[0].data.min() == 0
    assert all(b.data.min() == 255 for b in blocks[1:4])
    left, right, top, bottom = blocks[4:]
    assert left.data.min() == 0 and top.data.min() == 0
    assert right.data.min() == 255 and bottom.data.min() == 255
    assert left.shape == (64, 64)


def test_tiles_reassemble_the_image():
    rng = np.random.default_rng(0)
    a = rng.integers(0, 256, (67, 73), dtype=np.uint8)
    ms = build_masks((73, 67), 9)
    out = np.zeros_like(a)
    for mk, block in zip(ms.separation, generate_followups(GrayImage(a), ms)):
        out[mk.y0:mk.y1, mk.x0:mk.x1] = block.data
    assert np.array_equal(out, a)


def test_followups_dimension_check():
    with pytest.raises(DimensionMismatch):
        generate_followups(GrayImage.blank(64, 65), build_masks((64, 64)))


@pytest.mark.parametrize("rho, t, original, final, changed", [
    (0.75, (0.2, 0.2), "non_artcode", "artcode", True),
    (0.1, (0.15, 0.3), "artcode", "non_artcode", True),
    (0.2, (0.15, 0.3), "artcode", "artcode", False),
    (0.2, (0.15, 0.3), "non_artcode", "non_artcode", False),
    (0.2, (0.2, 0.2), "non_artcode", "artcode", True),
])
def test_rectify_examples(rho, t, original, final, changed):
    assert rectify(rho, Prediction(original, 0.5), Thresholds(*t)) == (final, changed)


def test_threshold_validation():
    with pytest.raises(InvalidSpec):
        Thresholds(0.0, 1.0 + 1e-9)
    with pytest.raises(InvalidSpec):
        Thresholds(0.3, 0.2)
    t = Thresholds(0.0, 1.0)
    assert rectify(0.9, "non_artcode", t) == ("non_artcode", False)
    assert rectify(1.0, "non_artcode", t) == ("artcode", True)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), st.sampled_from(["artcode", "non_artcode"]))
def test_rectification_partition(rho, a, b, original):
    t1, t2 = sorted((a, b))
    final, changed = rectify(rho, original, Thresholds(t1, t2))
    by_rule = rho < t1 or rho >= t2
    if not by_rule:
        assert final == original and not changed
    assert changed == (final != original)
    if t1 == t2:
        assert by_rule


class _Constant:
    """Stand-in model returning fixed probabilities: first for the whole image, then blocks."""

    def __init__(self, whole, block):
        self.whole, self.block = whole, block

    def predict_proba(self, X):
        return np.r_[self.whole, np.full(len(X) - 1, self.block)]


def test_augmented_all_blocks_artcode():
    rec = classify_augmented(GrayImage.blank(64, 64), _Constant(0.1, 0.9), build_masks((64, 64)))
    assert rec.original == "non_artcode" and rec.final == "artcode" and rec.rho == 1.0 and rec.rectified


def test_augmented_no_blocks_artcode():
    rec = classify_augmented(GrayImage.blank(64, 64), _Constant(0.9, 0.1), build_masks((64, 64)),
                             t=Thresholds(0.15, 0.3))
    assert rec.final == "non_artcode" and rec.rho == 0.0


def test_augmented_with_real_model():
    rng = np.random.default_rng(0)
    X = rng.random((40, 6))
    model = train(X, np.r_[np.ones(20, int), np.zeros(20, int)], TrainConfig(n_trees=5))
    rec = classify_augmented(GrayImage(rng.integers(0, 256, (64, 64))), model, build_masks((64, 64)))
    assert rec.rho == aggregate_rho(rec.p, W)
    assert rec.rectified == (rec.final != rec.original)


def test_mask_weight_mismatch():
    with pytest.raises(DimensionMismatch):
        classify_augmented(GrayImage.blank(64, 64), _Constant(0.5, 0.5), build_masks((64, 64), 9))


def test_record_from_probas_binarises_at_half():
    rec = record_from_probas("x", [0.4, 0.5, 0.49, 1, 0, 0.7, 0.2, 0.6, 0.51], W, Thresholds())
    assert rec.p == (1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 1.0)
    assert rec.original == "non_artcode"


def test_rho_csv_round_trip(tmp_path):
    recs = [record_from_probas(f"im{i}", np.random.default_rng(i).random(9), W, Thresholds()) for i in range(5)]
    write_rho_csv(tmp_path / "r.csv", recs)
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert lines[0] == "id,rho,p0,p1,p2,p3,p4,p5,p6,p7,original,final,rectified"
    assert lines[1].split(",")[-1] in ("true", "false")
    back = read_rho_csv(tmp_path / "r.csv")
    for a, b in zip(recs, back):
        assert (a.image_id, a.p, a.rho, a.original, a.final, a.rectified) == \
               (b.image_id, b.p, b.rho, b.original, b.final, b.rectified)
    assert isinstance(back[0], RhoRecord)
