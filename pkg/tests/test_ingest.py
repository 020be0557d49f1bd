import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jointmovelet.core import ActivityLabel, SensorKind, TriaxialSeries
from jointmovelet.errors import (
    ActivityAbsent,
    DatasetMissing,
    MalformedRow,
    NonMonotoneTimestamps,
    OverlappingIntervals,
)
from jointmovelet.ingest import (
    STUDY_STEPS,
    ColumnMapping,
    DatasetLayout,
    LabelColumns,
    LabeledInterval,
    StudyStep,
    attach_labels,
    extract_training_segment,
    labels_to_intervals,
    load_recording,
    load_step,
    parse_label_csv,
    parse_sensor_csv,
    write_sensor_csv,
)

L = ActivityLabel
ACC = SensorKind.ACCELEROMETER


def test_parse_minimal(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("timestamp,x,y,z\n0.0,1,2,3\n0.1,4,5,6\n0.2,7,8,9\n")
    s = parse_sensor_csv(p, ACC)
    assert len(s) == 3
    assert s.values[2].tolist() == [7.0, 8.0, 9.0]
    assert s.kind is ACC


def test_parse_wrong_arity(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("timestamp,x,y,z\n0.0,1,2,3\n0.1,0.0\n")
    with pytest.raises(MalformedRow):
        parse_sensor_csv(p, ACC)


def test_parse_bad_number(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("timestamp,x,y,z\n0.0,1,2,abc\n")
    with pytest.raises(MalformedRow):
        parse_sensor_csv(p, ACC)


def test_parse_non_monotone(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("timestamp,x,y,z\n0.1,1,2,3\n0.0,1,2,3\n")
    with pytest.raises(NonMonotoneTimestamps):
        parse_sensor_csv(p, ACC)


def test_column_mapping(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("ms;extra;ax;ay;az\n1000;q;1;2;3\n1100;q;4;5;6\n")
    cols = ColumnMapping(timestamp="ms", x="ax", y="ay", z="az", timestamp_scale=0.001, delimiter=";")
    s = parse_sensor_csv(p, ACC, cols)
    np.testing.assert_allclose(s.timestamps, [1.0, 1.1])
    assert s.values[1].tolist() == [4.0, 5.0, 6.0]


def test_missing_column(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("t,x,y,z\n0,1,2,3\n")
    with pytest.raises(MalformedRow):
        parse_sensor_csv(p, ACC)


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.floats(0.001, 5.0), finite, finite, finite), min_size=1, max_size=30))
def test_csv_roundtrip(tmp_path_factory, rows):
    t = np.cumsum([r[0] for r in rows])
    s = TriaxialSeries(t, [r[1:] for r in rows], kind=ACC)
    p = tmp_path_factory.mktemp("rt") / "s.csv"
    write_sensor_csv(s, p)
    back = parse_sensor_csv(p, ACC)
    assert back.samples == s.samples


def test_label_csv(tmp_path):
    p = tmp_path / "labels.csv"
    p.write_text("start,end,label\n0,1,walk\n1,2.5,revolving door\n")
    ivs = parse_label_csv(p)
    assert ivs == [LabeledInterval(0.0, 1.0, L.WALK), LabeledInterval(1.0, 2.5, L.OUT_OF_DICTIONARY)]


def test_label_csv_aliases(tmp_path):
    p = tmp_path / "labels.csv"
    p.write_text("from,to,activity\n0,1,W\n")
    cols = LabelColumns(start="from", end="to", label="activity", aliases={"W": "walk"})
    assert parse_label_csv(p, cols)[0].label is L.WALK


def test_attach_labels_full_interval():
    s = TriaxialSeries(np.arange(10) / 10, np.zeros((10, 3)))
    lab = attach_labels(s, [LabeledInterval(0.0, 1.0, L.WALK)])
    assert lab.labels == (L.WALK,) * 10


def test_attach_labels_outside_is_unlabeled():
    s = TriaxialSeries([0.5, 1.5], np.zeros((2, 3)))
    lab = attach_labels(s, [LabeledInterval(0.0, 1.0, L.WALK)])
    assert lab.labels == (L.WALK, None)


def test_attach_labels_end_exclusive():
    s = TriaxialSeries([0.9, 1.0], np.zeros((2, 3)))
    lab = attach_labels(s, [LabeledInterval(0.0, 1.0, L.WALK), LabeledInterval(1.0, 2.0, L.SIT)])
    assert lab.labels == (L.WALK, L.SIT)


def test_attach_labels_overlap():
    s = TriaxialSeries([0.0], np.zeros((1, 3)))
    with pytest.raises(OverlappingIntervals):
        attach_labels(s, [LabeledInterval(0, 1, L.WALK), LabeledInterval(0.5, 2, L.SIT)])


def test_interval_roundtrip():
    s = TriaxialSeries(np.arange(30) / 10, np.zeros((30, 3)))
    ivs = [LabeledInterval(0.0, 1.0, L.WALK), LabeledInterval(2.0, 3.0, L.SIT)]
    lab = attach_labels(s, ivs)
    assert attach_labels(s, labels_to_intervals(lab)).labels == lab.labels


def labeled_run(pattern, rate=10.0):
    labels = [lab for lab, k in pattern for _ in range(k)]
    s = TriaxialSeries(np.arange(len(labels)) / rate, np.arange(3 * len(labels)).reshape(-1, 3))
    return attach_labels(s, labels_to_intervals_of(labels, rate))


def labels_to_intervals_of(labels, rate):
    out, i = [], 0
    while i < len(labels):
        j = i
        while j + 1 < len(labels) and labels[j + 1] is labels[i]:
            j += 1
        if labels[i] is not None:
            out.append(LabeledInterval(i / rate, (j + 1) / rate, labels[i]))
        i = j + 1
    return out


def test_training_segment_capped():
    lab = labeled_run([(L.WALK, 80)])
    seg = extract_training_segment(lab, L.WALK, 5.0)
    assert len(seg) == 50
    assert seg.timestamps[0] == 0.0


def test_training_segment_short_run_kept_whole():
    lab = labeled_run([(L.SIT, 20), (L.SIT_TO_STAND, 9), (L.STAND, 20)])
    seg = extract_training_segment(lab, L.SIT_TO_STAND)
    assert len(seg) == 9
    np.testing.assert_array_equal(seg.timestamps, lab.timestamps[20:29])


def test_training_segment_first_run():
    lab = labeled_run([(None, 3), (L.WALK, 12), (L.SIT, 4), (L.WALK, 30)])
    seg = extract_training_segment(lab, L.WALK)
    assert len(seg) == 12
    np.testing.assert_array_equal(seg.values, lab.series.values[3:15])


def test_training_segment_absent():
    with pytest.raises(ActivityAbsent):
        extract_training_segment(labeled_run([(L.WALK, 20)]), L.STAND)


def write(dirpath, name, text):
    dirpath.mkdir(parents=True, exist_ok=True)
    (dirpath / name).write_text(text)


def test_load_recording_rebases_both_sensors(tmp_path):
    d = tmp_path / "rec"
    write(d, "accelerometer.csv", "timestamp,x,y,z\n100.0,1,1,1\n100.1,1,1,1\n100.2,1,1,1\n")
    write(d, "gyroscope.csv", "timestamp,x,y,z\n100.05,0,0,0\n100.15,0,0,0\n")
    write(d, "labels.csv", "start,end,label\n100.0,100.1,stand\n100.1,101,walk\n")
    rec = load_recording(d)
    np.testing.assert_allclose(rec.accel.timestamps, [0.0, 0.1, 0.2], atol=1e-9)
    np.testing.assert_allclose(rec.gyro.timestamps, [0.05, 0.15], atol=1e-9)
    assert rec.accel.labels == (L.STAND, L.WALK, L.WALK)
    assert rec.gyro.labels == (L.STAND, L.WALK)


def test_load_recording_per_row_labels(tmp_path):
    d = tmp_path / "rec"
    write(d, "accelerometer.csv", "timestamp,x,y,z,activity\n0,1,1,1,walk\n0.1,1,1,1,\n")
    rec = load_recording(d, columns=ColumnMapping(label="activity"), gyro=False)
    assert rec.gyro is None
    assert rec.accel.labels == (L.WALK, None)


def test_load_recording_missing(tmp_path):
    with pytest.raises(DatasetMissing):
        load_recording(tmp_path / "nope")
    (tmp_path / "rec").mkdir()
    with pytest.raises(DatasetMissing):
        load_recording(tmp_path / "rec")


def test_step_four_never_loaded(tmp_path):
    assert 4 not in STUDY_STEPS
    with pytest.raises(ValueError):
        load_step(tmp_path, "1", 4)
    with pytest.raises(ValueError):
        StudyStep(None, step=4)


def test_layout_paths():
    lay = DatasetLayout(participant_dir="P{participant}", step_dir="S{step}")
    assert lay.recording_path("/r", "3", 2).as_posix() == "/r/P3/S2"
    assert lay.recording_path("/r", "3").as_posix() == "/r/P3/training"
