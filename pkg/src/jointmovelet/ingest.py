"""Reading sensor and annotation CSV files into labeled series.

Sensor files have a header row and one row per sample; the column names are
configurable through :class:`ColumnMapping`. Annotation files list labeled
intervals ``start,end,label`` on the same clock as the sensor files, each
interval covering ``start <= t < end``.

A dataset on disk is organised per participant (see :class:`DatasetLayout`)::

    <root>/participant1/training/{accelerometer,gyroscope,labels}.csv
    <root>/participant1/step1/{accelerometer,gyroscope,labels}.csv
    ...
"""

from __future__ import annotations

import csv
import dataclasses
import math
import os
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .core import (
    NOMINAL_RATE,
    ActivityLabel,
    LabeledSeries,
    SensorKind,
    Series,
    TriaxialSeries,
    validate_series,
)
from .errors import (
    ActivityAbsent,
    DatasetMissing,
    MalformedRow,
    OverlappingIntervals,
)

#: test steps analysed; step 4 (phone reorientation) is never loaded
STUDY_STEPS = (1, 2, 3, 5, 6)


@dataclasses.dataclass(frozen=True)
class ColumnMapping:
    """Column names of a sensor CSV file.

    ``timestamp_scale`` converts the file's time unit to seconds (use 0.001
    for milliseconds). When ``label`` names a column, per-row ground truth is
    read from it and no annotation file is needed.
    """

    timestamp: str = "timestamp"
    x: str = "x"
    y: str = "y"
    z: str = "z"
    label: Optional[str] = None
    timestamp_scale: float = 1.0
    delimiter: str = ","


@dataclasses.dataclass(frozen=True)
class LabelColumns:
    start: str = "start"
    end: str = "end"
    label: str = "label"
    delimiter: str = ","
    #: raw label string -> canonical label value, for datasets with their own spelling
    aliases: Mapping[str, str] = dataclasses.field(default_factory=dict)


@dataclasses.dataclass(frozen=True)
class DatasetLayout:
    participant_dir: str = "participant{participant}"
    training_dir: str = "training"
    step_dir: str = "step{step}"
    accel_file: str = "accelerometer.csv"
    gyro_file: str = "gyroscope.csv"
    labels_file: str = "labels.csv"

    def participant_path(self, root, participant) -> Path:
        return Path(root) / self.participant_dir.format(participant=participant)

    def recording_path(self, root, participant, step: Optional[int] = None) -> Path:
        base = self.participant_path(root, participant)
        if step is None:
            return base / self.training_dir
        return base / self.step_dir.format(step=step)


@dataclasses.dataclass(frozen=True)
class LabeledInterval:
    start: float
    end: float
    label: ActivityLabel

    def __post_init__(self):
        if not (math.isfinite(self.start) and math.isfinite(self.end)) or self.start >= self.end:
            raise ValueError(f"invalid interval [{self.start}, {self.end})")


@dataclasses.dataclass(frozen=True)
class Recording:
    """Labeled accelerometer and (optionally) gyroscope data of one session."""

    accel: LabeledSeries
    gyro: Optional[LabeledSeries] = None
    name: str = ""


@dataclasses.dataclass(frozen=True)
class StudyStep(Recording):
    step: int = 1

    def __post_init__(self):
        if self.step not in STUDY_STEPS:
            raise ValueError(f"step {self.step} is not analysed (allowed: {STUDY_STEPS})")


def _read_table(path, columns: ColumnMapping):
    """Return timestamps (seconds), ``(T, 3)`` values and raw labels (or None)."""
    path = Path(path)
    wanted = [columns.timestamp, columns.x, columns.y, columns.z]
    if columns.label:
        wanted.append(columns.label)
    with path.open(newline="") as fh:
        reader = csv.reader(fh, delimiter=columns.delimiter)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise MalformedRow(f"{path}: empty file, expected a header row") from None
        missing = [c for c in wanted if c not in header]
        if missing:
            raise MalformedRow(f"{path}: header lacks columns {missing}")
        idx = [header.index(c) for c in wanted]
        rows, labels = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise MalformedRow(
                    f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}"
                )
            try:
                rows.append([float(row[i]) for i in idx[:4]])
            except ValueError:
                raise MalformedRow(f"{path}:{lineno}: unparseable number in {row!r}") from None
            if columns.label:
                labels.append(row[idx[4]].strip())
    arr = np.asarray(rows, dtype=float).reshape(-1, 4)
    return arr[:, 0] * columns.timestamp_scale, arr[:, 1:], (labels if columns.label else None)


def parse_sensor_csv(path, kind: SensorKind, columns: ColumnMapping = ColumnMapping(),
                     nominal_rate: float = NOMINAL_RATE) -> TriaxialSeries:
    """Read one sensor file into a validated :class:`TriaxialSeries`.

    Raises
    ------
    MalformedRow
        Wrong number of fields or a value that is not a number.
    NonMonotoneTimestamps
        Duplicate or backwards timestamps.
    """
    t, values, _ = _read_table(path, columns)
    series = TriaxialSeries(t, values, kind=kind, nominal_rate=nominal_rate)
    return validate_series(series)


def write_sensor_csv(series: TriaxialSeries, path, columns: ColumnMapping = ColumnMapping()):
    """Write a series in the format :func:`parse_sensor_csv` reads.

    Values are written with ``repr`` so parsing them back is exact.
    """
    header = [columns.timestamp, columns.x, columns.y, columns.z]
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, delimiter=columns.delimiter, lineterminator="\n")
        w.writerow(header)
        for t, row in zip(series.timestamps / columns.timestamp_scale, series.values):
            w.writerow([repr(float(t))] + [repr(float(v)) for v in row])


def parse_label_csv(path, columns: LabelColumns = LabelColumns()) -> list[LabeledInterval]:
    path = Path(path)
    out = []
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh, delimiter=columns.delimiter)
        missing = {columns.start, columns.end, columns.label} - set(reader.fieldnames or ())
        if missing:
            raise MalformedRow(f"{path}: header lacks columns {sorted(missing)}")
        for lineno, row in enumerate(reader, start=2):
            try:
                out.append(
                    LabeledInterval(
                        float(row[columns.start]),
                        float(row[columns.end]),
                        ActivityLabel.parse(row[columns.label], columns.aliases),
                    )
                )
            except (TypeError, ValueError) as exc:
                raise MalformedRow(f"{path}:{lineno}: {exc}") from None
    return out


def write_label_csv(intervals: Iterable[LabeledInterval], path, columns: LabelColumns = LabelColumns()):
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, delimiter=columns.delimiter, lineterminator="\n")
        w.writerow([columns.start, columns.end, columns.label])
        for iv in intervals:
            w.writerow([repr(float(iv.start)), repr(float(iv.end)), iv.label.value])


def attach_labels(series: Series, intervals: Sequence[LabeledInterval]) -> LabeledSeries:
    """Label every sample with the interval containing its timestamp.

    Samples outside every interval get ``None``.
    """
    ordered = sorted(intervals, key=lambda iv: iv.start)
    for prev, cur in zip(ordered, ordered[1:]):
        if cur.start < prev.end:
            raise OverlappingIntervals(
                f"[{prev.start}, {prev.end}) {prev.label} overlaps [{cur.start}, {cur.end}) {cur.label}"
            )
    labels: list = [None] * len(series)
    t = series.timestamps
    for iv in ordered:
        lo, hi = np.searchsorted(t, [iv.start, iv.end], side="left")
        for i in range(lo, hi):
            labels[i] = iv.label
    return LabeledSeries(series, tuple(labels))


def labels_to_intervals(labeled: LabeledSeries) -> list[LabeledInterval]:
    """Inverse of :func:`attach_labels` for a regularly sampled series.

    Each run of equal labels becomes an interval ending at the next sample's
    timestamp (or one nominal period after the last sample).
    """
    t = labeled.timestamps
    period = 1.0 / labeled.series.nominal_rate
    out = []
    i = 0
    while i < len(t):
        j = i
        while j + 1 < len(t) and labeled.labels[j + 1] is labeled.labels[i]:
            j += 1
        if labeled.labels[i] is not None:
            end = t[j + 1] if j + 1 < len(t) else t[j] + period
            out.append(LabeledInterval(float(t[i]), float(end), labeled.labels[i]))
        i = j + 1
    return out


def extract_training_segment(labeled: LabeledSeries, activity: ActivityLabel,
                             max_duration: float = 5.0) -> Series:
    """First contiguous run of ``activity``, capped at ``max_duration`` seconds.

    The cap is a sample count (``max_duration * nominal_rate``) counted from
    the start of the run; shorter runs such as transitions come back whole.
    """
    try:
        start = labeled.labels.index(activity)
    except ValueError:
        raise ActivityAbsent(f"no samples labeled {activity}") from None
    stop = start
    while stop < len(labeled) and labeled.labels[stop] is activity:
        stop += 1
    cap = int(round(max_duration * labeled.series.nominal_rate))
    stop = min(stop, start + cap)
    return labeled.series.slice(start, stop)


def _rebase(series: TriaxialSeries, origin: float) -> TriaxialSeries:
    return dataclasses.replace(series, timestamps=series.timestamps - origin)


def load_recording(directory, columns: ColumnMapping = ColumnMapping(),
                   label_columns: LabelColumns = LabelColumns(),
                   layout: DatasetLayout = DatasetLayout(), *, gyro: bool = True,
                   nominal_rate: float = NOMINAL_RATE, name: str = "") -> Recording:
    """Load accelerometer (and optionally gyroscope) data of one session.

    Both sensors and the annotation are shifted by the same origin, the first
    accelerometer timestamp, so elapsed time starts at zero and the two
    streams stay aligned.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise DatasetMissing(f"recording directory not found: {directory}")

    def load(filename, kind):
        path = directory / filename
        if not path.is_file():
            raise DatasetMissing(f"sensor file not found: {path}")
        t, values, raw = _read_table(path, columns)
        series = validate_series(TriaxialSeries(t, values, kind=kind, nominal_rate=nominal_rate))
        return series, raw

    accel, accel_raw = load(layout.accel_file, SensorKind.ACCELEROMETER)
    gyro_pair = load(layout.gyro_file, SensorKind.GYROSCOPE) if gyro else None
    origin = float(accel.timestamps[0]) if len(accel) else 0.0

    if columns.label:
        def label_rows(series, raw):
            labs = tuple(
                ActivityLabel.parse(r, label_columns.aliases) if r else None for r in raw
            )
            return LabeledSeries(_rebase(series, origin), labs)

        accel_l = label_rows(accel, accel_raw)
        gyro_l = label_rows(*gyro_pair) if gyro_pair else None
    else:
        labels_path = directory / layout.labels_file
        if not labels_path.is_file():
            raise DatasetMissing(f"label file not found: {labels_path}")
        intervals = [
            LabeledInterval(iv.start - origin, iv.end - origin, iv.label)
            for iv in parse_label_csv(labels_path, label_columns)
        ]
        accel_l = attach_labels(_rebase(accel, origin), intervals)
        gyro_l = attach_labels(_rebase(gyro_pair[0], origin), intervals) if gyro_pair else None
    return Recording(accel_l, gyro_l, name=name or directory.name)


def load_step(root, participant, step: int, **kwargs) -> StudyStep:
    if step not in STUDY_STEPS:
        raise ValueError(f"step {step} is not analysed (allowed: {STUDY_STEPS})")
    layout = kwargs.get("layout", DatasetLayout())
    rec = load_recording(layout.recording_path(root, participant, step), **kwargs)
    return StudyStep(rec.accel, rec.gyro, name=rec.name, step=step)


def load_training(root, participant, **kwargs) -> Recording:
    layout = kwargs.get("layout", DatasetLayout())
    return load_recording(layout.recording_path(root, participant), **kwargs)


def dataset_root(default=None) -> Optional[Path]:
    """Dataset root from ``JOINTMOVELET_DATA`` if set, else ``default``."""
    env = os.environ.get("JOINTMOVELET_DATA")
    if env:
        return Path(env)
    return Path(default) if default is not None else None
