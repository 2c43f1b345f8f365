"""Core value types: construction rules, immutability, pairing checks."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from semdepth import (
    ArityMismatch,
    BinPartition,
    ChannelMismatch,
    DepthMap,
    FeatureMap,
    Manifest,
    ManifestError,
    ManifestRecord,
    TextBank,
    ValidationError,
    validate_pairing,
)


def test_feature_map_basic(rng):
    fm = FeatureMap(rng.standard_normal((13, 17, 1024)), source_id="nyu_0001")
    assert (fm.height_f, fm.width_f, fm.channels) == (13, 17, 1024)
    assert fm.data.dtype == np.float64


def test_feature_map_is_immutable(rng):
    arr = rng.standard_normal((2, 2, 4))
    fm = FeatureMap(arr, source_id="x")
    with pytest.raises(ValueError):
        fm.data[0, 0, 0] = 99.0
    # mutating the source array must not leak in
    arr[0, 0, 0] = 99.0
    assert fm.data[0, 0, 0] != 99.0


@pytest.mark.parametrize("shape", [(4,), (2, 3), (2, 3, 4, 5)])
def test_feature_map_rejects_wrong_rank(rng, shape):
    with pytest.raises(ValidationError):
        FeatureMap(rng.standard_normal(shape), source_id="x")


def test_feature_map_rejects_nonfinite(rng):
    arr = rng.standard_normal((2, 2, 4))
    arr[1, 1, 2] = np.nan
    with pytest.raises(ValidationError):
        FeatureMap(arr, source_id="x")


def test_text_bank_shape_and_tokens(rng):
    tb = TextBank(("close", "far"), rng.standard_normal((2, 8)))
    assert tb.k == 2 and tb.channels == 8
    assert tb.template == "This object is {}"


def test_text_bank_token_count_mismatch(rng):
    with pytest.raises(ArityMismatch):
        TextBank(("close", "far", "unseen"), rng.standard_normal((2, 8)))


def test_text_bank_rejects_zero_row(rng):
    emb = rng.standard_normal((3, 8))
    emb[1] = 0.0
    with pytest.raises(ValidationError):
        TextBank(("a", "b", "c"), emb)


def test_bin_partition_accepts_increasing():
    bp = BinPartition("original", [1.0, 1.5, 2.0, 2.25, 2.5, 2.75, 3.0])
    assert bp.k == 7
    assert bp.bins[0] == 1.0 and bp.bins[-1] == 3.0


@pytest.mark.parametrize(
    "bins",
    [
        [1.0, 1.0, 2.0],  # ties are not increasing
        [2.0, 1.0, 3.0],
        [0.0, 1.0, 2.0],  # zero depth is meaningless
        [-1.0, 1.0, 2.0],
        [1.0, 2.0, float("inf")],
    ],
)
def test_bin_partition_rejects_bad_sequences(bins):
    with pytest.raises(ValidationError):
        BinPartition("bad", bins)


@given(st.permutations(list(range(5))))
def test_bin_partition_rejects_every_unsorted_order(perm):
    base = [1.0, 1.5, 2.0, 2.5, 3.0]
    shuffled = [base[i] for i in perm]
    if shuffled == base:
        BinPartition("sorted", shuffled)
    else:
        with pytest.raises(ValidationError):
            BinPartition("shuffled", shuffled)


def test_depth_map_valid_mask():
    data = np.array([[1.0, 0.0], [-2.0, np.nan]])
    dm = DepthMap(data)
    assert dm.valid.tolist() == [[True, False], [False, False]]


def test_depth_map_rejects_positive_infinity():
    with pytest.raises(ValidationError):
        DepthMap(np.array([[1.0, np.inf]]))


def test_manifest_rejects_duplicate_ids():
    rec = ManifestRecord(image_id="a", features_path="a.dce")
    with pytest.raises(ManifestError):
        Manifest((rec, rec))


def test_manifest_scene_classes_first_appearance_order():
    records = tuple(
        ManifestRecord(image_id=f"i{n}", features_path="f.dce", scene_class=c)
        for n, c in enumerate(["office", "kitchen", "office", None])
    )
    assert Manifest(records).scene_classes() == ("office", "kitchen")


def test_validate_pairing_accepts_matching(rng):
    fm = FeatureMap(rng.standard_normal((13, 17, 1024)), source_id="x")
    tb = TextBank(tuple(f"t{i}" for i in range(7)), rng.standard_normal((7, 1024)))
    bp = BinPartition("original", [1.0, 1.5, 2.0, 2.25, 2.5, 2.75, 3.0])
    validate_pairing(fm, tb, bp)  # should not raise


def test_validate_pairing_channel_mismatch(rng):
    fm = FeatureMap(rng.standard_normal((2, 2, 512)), source_id="x")
    tb = TextBank(("a", "b"), rng.standard_normal((2, 1024)))
    bp = BinPartition("p", [1.0, 2.0])
    with pytest.raises(ChannelMismatch):
        validate_pairing(fm, tb, bp)


def test_validate_pairing_arity_mismatch(rng):
    fm = FeatureMap(rng.standard_normal((2, 2, 8)), source_id="x")
    tb = TextBank(tuple(f"t{i}" for i in range(7)), rng.standard_normal((7, 8)))
    bp = BinPartition("p", [1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
    with pytest.raises(ArityMismatch):
        validate_pairing(fm, tb, bp)
