import numpy as np
import pytest

import oracles
from randomized import oracle_timeline, random_fixture
from jointmovelet.classify import (
    MoveletMatch,
    classify_movelets,
    classify_series,
    map_to_accel_timestamps,
    match_movelet,
    vote_timepoint,
)
from jointmovelet.core import (
    ActivityLabel,
    ClassifiedTimeline,
    Dictionary,
    LabeledSeries,
    Mode,
    Movelet,
    SensorKind,
    TriaxialSeries,
)
from jointmovelet.errors import ChannelMismatch, EmptyTimeline, MissingSensor, SeriesTooShort
from jointmovelet.ingest import Recording
from jointmovelet.movelets import extract_movelets

L = ActivityLabel


def mv(values, start=0):
    values = np.asarray(values, dtype=float)
    return Movelet(start, values, np.arange(values.shape[1]) / 10)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def test_exact_match_retrieval(rng):
    refs = {lab: [mv(rng.normal(size=(3, 10))) for _ in range(4)] for lab in (L.WALK, L.SIT, L.STAND)}
    d = Dictionary("p", refs)
    target = refs[L.SIT][2]
    m = match_movelet(target, d)
    assert m.label is L.SIT
    assert m.discrepancy == 0.0
    assert m.dictionary_index == 4 + 4 + 2  # walk and stand entries come first


def test_single_candidate(rng):
    d = Dictionary("p", {L.WALK: [mv(rng.normal(size=(3, 10)))]})
    for _ in range(5):
        assert match_movelet(rng.normal(size=(3, 10)) * 100, d).label is L.WALK


def test_match_against_brute_force(rng):
    labels = [L.WALK, L.STAND, L.STAIR_UP, L.STAIR_DOWN, L.SIT, L.SIT_TO_STAND]
    d = Dictionary("p", {lab: [mv(rng.normal(size=(3, 10))) for _ in range(10)] for lab in labels})
    plain = [(lab.value, m.values.tolist()) for lab, ms in d.entries.items() for m in ms]
    assert len(d) == 60
    for _ in range(20):
        m = rng.normal(size=(3, 10))
        label, dist = oracles.best_match(m.tolist(), plain)
        got = match_movelet(m, d)
        assert got.label.value == label
        assert got.discrepancy == pytest.approx(dist, rel=1e-12)


def test_match_tie_goes_to_scan_order():
    same = np.ones((3, 10))
    d = Dictionary("p", {L.SIT: [mv(same)], L.WALK: [mv(same)]})
    assert match_movelet(np.zeros((3, 10)), d).label is L.WALK


def test_channel_mismatch(rng):
    d = Dictionary("p", {L.WALK: [mv(rng.normal(size=(3, 10)))]})
    with pytest.raises(ChannelMismatch):
        match_movelet(rng.normal(size=(6, 10)), d)


def test_classify_movelets_cardinality_and_workers(rng):
    d = Dictionary("p", {L.WALK: [mv(rng.normal(size=(3, 10))) for _ in range(5)],
                         L.SIT: [mv(rng.normal(size=(3, 10))) for _ in range(5)]})
    tests = extract_movelets(rng.normal(size=(3, 50)), np.arange(50) / 10)
    out = classify_movelets(tests, d)
    assert len(out) == 41
    assert [m.index for m in out] == list(range(41))
    assert classify_movelets(tests, d, workers=4) == out


def test_self_classification(rng):
    walk = rng.normal(size=(3, 50))
    d = Dictionary("p", {L.WALK: extract_movelets(walk, np.arange(50) / 10),
                         L.SIT: extract_movelets(rng.normal(size=(3, 30)), np.arange(30) / 10)})
    out = classify_movelets(extract_movelets(walk, np.arange(50) / 10), d)
    assert all(m.label is L.WALK and m.discrepancy == 0.0 for m in out)


def test_concatenated_segments(rng):
    stand = rng.normal(size=(3, 30)) + 5
    sit = rng.normal(size=(3, 30)) - 5
    d = Dictionary("p", {L.STAND: extract_movelets(stand, np.arange(30)),
                         L.SIT: extract_movelets(sit, np.arange(30))})
    series = np.hstack([stand, sit])
    plain = [(lab.value, m.values.tolist()) for lab, ms in d.entries.items() for m in ms]
    out = classify_movelets(extract_movelets(series, np.arange(60)), d)
    for m in out:
        if m.index <= 20:
            assert m.label is L.STAND
        elif m.index >= 30:
            assert m.label is L.SIT
        else:  # straddles the seam: brute force decides
            expected, _ = oracles.best_match(oracles.window(series.T.tolist(), m.index, 10), plain)
            assert m.label.value == expected


def matches(labels, discs=None):
    discs = discs or [0.0] * len(labels)
    return [MoveletMatch(i, lab, d, 0) for i, (lab, d) in enumerate(zip(labels, discs))]


def test_vote_unanimous():
    assert vote_timepoint(matches([L.WALK] * 10), 0) is L.WALK


def test_vote_majority():
    assert vote_timepoint(matches([L.STAIR_UP] * 4 + [L.WALK] * 6), 0) is L.WALK


def test_vote_tie_by_discrepancy():
    labels = [L.STAIR_UP, L.WALK] * 5
    discs = [0.62, 0.4] * 5  # stair up sums to 3.1, walk to 2.0
    ms = matches(labels, discs)
    sums = {}
    for lab, d in zip(labels, discs):
        sums[lab] = sums.get(lab, 0.0) + d
    assert sums[L.WALK] == pytest.approx(2.0) and sums[L.STAIR_UP] == pytest.approx(3.1)
    assert vote_timepoint(ms, 0) is L.WALK
    # swap the discrepancies and the other label wins
    assert vote_timepoint(matches(labels, [0.4, 0.62] * 5), 0) is L.STAIR_UP


def test_vote_tie_by_label_order():
    assert vote_timepoint(matches([L.SIT, L.WALK]), 0) is L.WALK


def test_vote_window_shrinks_at_end():
    ms = matches([L.WALK] * 10 + [L.SIT] * 3)
    assert vote_timepoint(ms, 10) is L.SIT
    assert vote_timepoint(ms, 3) is L.WALK  # 7 walk vs 3 sit
    with pytest.raises(IndexError):
        vote_timepoint(ms, 13)


def test_vote_window_locality(rng):
    labels = [list(L)[k] for k in rng.integers(0, 7, 40)]
    base = [vote_timepoint(matches(labels), i) for i in range(40)]
    j = 25
    labels[j] = L.STAND_TO_SIT if labels[j] is not L.STAND_TO_SIT else L.WALK
    changed = [vote_timepoint(matches(labels), i) for i in range(40)]
    diff = [i for i in range(40) if base[i] is not changed[i]]
    assert all(j - 9 <= i <= j for i in diff)


def recording_from(values, labels, gyro_values=None, gyro_t=None):
    t = np.arange(values.shape[1]) / 10
    accel = LabeledSeries(TriaxialSeries(t, values.T), labels)
    gyro = None
    if gyro_values is not None:
        gt = t if gyro_t is None else gyro_t
        gyro = LabeledSeries(TriaxialSeries(gt, gyro_values.T, kind=SensorKind.GYROSCOPE), labels)
    return Recording(accel, gyro)


@pytest.mark.parametrize("mode", list(Mode))
def test_classify_series_self_consistency(rng, mode):
    a, g = rng.normal(size=(3, 30)), rng.normal(size=(3, 30))
    rec = recording_from(a, (L.WALK,) * 30, g)
    source = {Mode.ACCEL: a, Mode.GYRO: g, Mode.JOINT: np.vstack([a, g])}[mode]
    other = rng.normal(size=(mode.channel_count, 20)) + 10
    d = Dictionary("p", {L.WALK: extract_movelets(source, np.arange(30)),
                         L.SIT: extract_movelets(other, np.arange(20))})
    tl = classify_series(rec, d, mode)
    assert len(tl) == 30
    assert set(tl.predicted) == {L.WALK}
    assert tl.truth == (L.WALK,) * 30


def test_classify_series_errors(rng):
    a = rng.normal(size=(3, 30))
    d3 = Dictionary("p", {L.WALK: extract_movelets(a, np.arange(30))})
    rec = recording_from(a, (L.WALK,) * 30)
    with pytest.raises(MissingSensor):
        classify_series(rec, d3, Mode.GYRO)
    with pytest.raises(ChannelMismatch):
        classify_series(rec, d3, Mode.JOINT)
    with pytest.raises(SeriesTooShort):
        classify_series(recording_from(a[:, :9], (L.WALK,) * 9), d3, Mode.ACCEL)


@pytest.mark.parametrize("mode", list(Mode))
def test_pipeline_equals_oracle(mode):
    rng = np.random.default_rng(7)
    for _ in range(15):
        rec, d, plain = random_fixture(rng, mode)
        ts, expected = oracle_timeline(mode, rec, plain)
        if expected is None:
            with pytest.raises(SeriesTooShort):
                classify_series(rec, d, mode)
            continue
        tl = classify_series(rec, d, mode)
        np.testing.assert_array_equal(tl.timestamps, ts)
        assert [p.value for p in tl.predicted] == expected


def test_map_identity():
    ts = np.arange(5) / 10
    tl = ClassifiedTimeline(ts, (L.WALK, L.SIT, L.SIT, L.STAND, L.WALK), (None,) * 5)
    assert map_to_accel_timestamps(tl, ts).predicted == tl.predicted


def test_map_nearest():
    tl = ClassifiedTimeline([0.08, 0.15], (L.WALK, L.STAND), (None, None))
    assert map_to_accel_timestamps(tl, [0.10]).predicted == (L.WALK,)
    assert map_to_accel_timestamps(tl, [0.0, 0.14, 0.5]).predicted == (L.WALK, L.STAND, L.STAND)


def test_map_midpoint_goes_earlier():
    g = [0.0, 0.25]
    tl = ClassifiedTimeline(g, (L.SIT, L.STAND), (None, None))
    t = 0.125
    assert abs(t - g[0]) == abs(g[1] - t)
    assert oracles.nearest(g, ["sit", "stand"], t) == "sit"
    assert map_to_accel_timestamps(tl, [t]).predicted == (L.SIT,)


def test_map_carries_truth():
    tl = ClassifiedTimeline([0.0, 1.0], (L.SIT, L.STAND), (None, None))
    out = map_to_accel_timestamps(tl, [0.2, 0.9], truth=(L.SIT, L.WALK))
    assert out.truth == (L.SIT, L.WALK)
    with pytest.raises(EmptyTimeline):
        map_to_accel_timestamps(tl, [])


def test_map_against_oracle(rng):
    g = np.sort(rng.uniform(0, 10, 40))
    labs = tuple(list(L)[k] for k in rng.integers(0, 7, 40))
    tl = ClassifiedTimeline(g, labs, (None,) * 40)
    a = np.sort(rng.uniform(-1, 11, 100))
    got = map_to_accel_timestamps(tl, a).predicted
    assert list(got) == [oracles.nearest(g.tolist(), labs, t) for t in a]
