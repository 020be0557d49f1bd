"""Domain vocabulary: activity labels, sensor series, movelets, dictionaries
and classified timelines.

Series store their samples as numpy arrays (``timestamps`` of shape ``(T,)``
and ``values`` of shape ``(T, c)``); all arrays are made read-only on
construction so instances can be shared between workers.
"""

from __future__ import annotations

import dataclasses
import enum
import re
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence, Union

import numpy as np

from .errors import (
    ChannelMismatch,
    EmptyDictionary,
    LengthMismatch,
    NonFiniteValue,
    NonMonotoneTimestamps,
)

#: samples per movelet (one second at 10 Hz)
WINDOW = 10
#: number of forward movelets taking part in each vote
VOTE_WINDOW = 10
NOMINAL_RATE = 10.0


class ActivityLabel(str, enum.Enum):
    """Activities known to a dictionary, plus a truth-only catch-all.

    Declaration order is significant: it is the order dictionary entries are
    scanned in and the last resort for breaking ties.
    """

    WALK = "walk"
    STAND = "stand"
    STAIR_UP = "stairUp"
    STAIR_DOWN = "stairDown"
    SIT = "sit"
    SIT_TO_STAND = "sitToStand"
    STAND_TO_SIT = "standToSit"
    OUT_OF_DICTIONARY = "outOfDictionary"

    def __str__(self) -> str:
        return self.value

    @property
    def in_dictionary(self) -> bool:
        return self is not ActivityLabel.OUT_OF_DICTIONARY

    @property
    def rank(self) -> int:
        return _LABEL_RANK[self]

    @classmethod
    def parse(cls, text: str, aliases: Optional[Mapping[str, str]] = None) -> "ActivityLabel":
        """Parse a label string, tolerant of case, spaces, dashes and underscores.

        ``"stair up"``, ``"Stair_Up"`` and ``"stairUp"`` all map to
        :attr:`STAIR_UP`; ``"revolvingDoor"`` maps to :attr:`OUT_OF_DICTIONARY`.
        Extra ``aliases`` map raw strings onto canonical label values.
        """
        if aliases and text in aliases:
            text = aliases[text]
        key = _normalise(text)
        try:
            return _PARSE_TABLE[key]
        except KeyError:
            raise ValueError(f"unknown activity label {text!r}") from None


def _normalise(text: str) -> str:
    return re.sub(r"[^a-z0-9]", "", text.strip().lower())


DICTIONARY_LABELS: tuple[ActivityLabel, ...] = tuple(
    label for label in ActivityLabel if label.in_dictionary
)
_LABEL_RANK = {label: i for i, label in enumerate(ActivityLabel)}
_PARSE_TABLE = {_normalise(label.value): label for label in ActivityLabel}
_PARSE_TABLE.update(
    {
        "revolvingdoor": ActivityLabel.OUT_OF_DICTIONARY,
        "ascendingstairs": ActivityLabel.STAIR_UP,
        "descendingstairs": ActivityLabel.STAIR_DOWN,
        "walking": ActivityLabel.WALK,
        "standing": ActivityLabel.STAND,
        "sitting": ActivityLabel.SIT,
    }
)


class Mode(str, enum.Enum):
    """Which sensor data a classification uses."""

    ACCEL = "accel-only"
    GYRO = "gyro-only"
    JOINT = "joint"

    def __str__(self) -> str:
        return self.value

    @property
    def channel_count(self) -> int:
        return 6 if self is Mode.JOINT else 3

    @classmethod
    def parse(cls, text: str) -> "Mode":
        key = _normalise(text)
        for mode in cls:
            if key in (_normalise(mode.value), _normalise(mode.name)):
                return mode
        if key in ("accelerometer", "accelerometeronly"):
            return cls.ACCEL
        if key in ("gyroscope", "gyroscopeonly"):
            return cls.GYRO
        raise ValueError(f"unknown mode {text!r}")


class SensorKind(enum.Enum):
    ACCELEROMETER = "accelerometer"
    GYROSCOPE = "gyroscope"

    @property
    def unit(self) -> str:
        return "g" if self is SensorKind.ACCELEROMETER else "rad/s"


class Sample(NamedTuple):
    t: float
    x: float
    y: float
    z: float


def _frozen_array(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    arr.flags.writeable = False
    return arr


@dataclasses.dataclass(frozen=True, eq=False)
class _Series:
    timestamps: np.ndarray
    values: np.ndarray
    nominal_rate: float

    _channels = 0  # overridden; 0 means any

    def __post_init__(self):
        t = _frozen_array(self.timestamps)
        v = _frozen_array(self.values)
        if t.ndim != 1:
            raise LengthMismatch("timestamps must be one-dimensional")
        if v.ndim == 1 and t.size == 0:
            v = v.reshape(0, self._channels or 0)
            v.flags.writeable = False
        if v.ndim != 2 or v.shape[0] != t.shape[0]:
            raise LengthMismatch(
                f"values of shape {v.shape} do not match {t.shape[0]} timestamps"
            )
        if self._channels and v.shape[1] != self._channels:
            raise ChannelMismatch(f"expected {self._channels} channels, got {v.shape[1]}")
        object.__setattr__(self, "timestamps", t)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.timestamps.shape[0]

    @property
    def channel_count(self) -> int:
        return self.values.shape[1]

    @property
    def channels(self) -> np.ndarray:
        """Values as a ``(c, T)`` view, one row per channel."""
        return self.values.T

    def slice(self, start: int, stop: int):
        return dataclasses.replace(
            self, timestamps=self.timestamps[start:stop], values=self.values[start:stop]
        )

    def __eq__(self, other) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return (
            all(
                getattr(self, f.name) == getattr(other, f.name)
                for f in dataclasses.fields(self)
                if f.name not in ("timestamps", "values")
            )
            and np.array_equal(self.timestamps, other.timestamps)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


@dataclasses.dataclass(frozen=True, eq=False)
class TriaxialSeries(_Series):
    """Timestamped ``(x, y, z)`` stream from one sensor."""

    kind: SensorKind = SensorKind.ACCELEROMETER
    nominal_rate: float = NOMINAL_RATE

    _channels = 3

    @classmethod
    def from_samples(cls, kind: SensorKind, samples: Iterable[Sequence[float]],
                     nominal_rate: float = NOMINAL_RATE) -> "TriaxialSeries":
        rows = np.asarray(list(samples), dtype=float).reshape(-1, 4)
        return cls(rows[:, 0], rows[:, 1:], kind=kind, nominal_rate=nominal_rate)

    @property
    def samples(self) -> tuple[Sample, ...]:
        return tuple(
            Sample(float(t), *map(float, row)) for t, row in zip(self.timestamps, self.values)
        )


@dataclasses.dataclass(frozen=True, eq=False)
class SyncedSeries(_Series):
    """Six channels (accelerometer x, y, z then gyroscope x, y, z) on the
    accelerometer timeline."""

    nominal_rate: float = NOMINAL_RATE

    _channels = 6

    @property
    def accel(self) -> np.ndarray:
        return self.values[:, :3]

    @property
    def gyro(self) -> np.ndarray:
        return self.values[:, 3:]


Series = Union[TriaxialSeries, SyncedSeries]


def validate_series(series: Series) -> Series:
    """Check that timestamps strictly increase and every value is finite.

    Returns the series unchanged so the call can be chained.
    """
    t = series.timestamps
    if not np.all(np.isfinite(t)):
        raise NonFiniteValue("non-finite timestamp")
    if not np.all(np.isfinite(series.values)):
        row = int(np.argwhere(~np.isfinite(series.values))[0, 0])
        raise NonFiniteValue(f"non-finite value at sample {row} (t={t[row]!r})")
    steps = np.diff(t)
    if np.any(steps <= 0):
        i = int(np.argmax(steps <= 0))
        raise NonMonotoneTimestamps(
            f"timestamp {t[i + 1]!r} at sample {i + 1} does not follow {t[i]!r}"
        )
    return series


@dataclasses.dataclass(frozen=True, eq=False)
class LabeledSeries:
    """A series with one ground-truth label per sample; ``None`` marks samples
    outside every annotated interval."""

    series: Series
    labels: tuple[Optional[ActivityLabel], ...]

    def __post_init__(self):
        labels = tuple(self.labels)
        if len(labels) != len(self.series):
            raise LengthMismatch(f"{len(labels)} labels for {len(self.series)} samples")
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return len(self.series)

    @property
    def timestamps(self) -> np.ndarray:
        return self.series.timestamps

    def slice(self, start: int, stop: int) -> "LabeledSeries":
        return LabeledSeries(self.series.slice(start, stop), self.labels[start:stop])

    def counts(self) -> dict[ActivityLabel, int]:
        """Number of samples per label, in label declaration order."""
        out = {}
        for label in ActivityLabel:
            k = sum(1 for lab in self.labels if lab is label)
            if k:
                out[label] = k
        return out


@dataclasses.dataclass(frozen=True, eq=False)
class Movelet:
    """A ``(c, n)`` window of consecutive samples starting at ``start_index``."""

    start_index: int
    values: np.ndarray
    timestamps: np.ndarray

    def __post_init__(self):
        v = _frozen_array(self.values)
        t = _frozen_array(self.timestamps)
        if v.ndim != 2 or t.shape != (v.shape[1],):
            raise LengthMismatch(f"movelet values {v.shape} vs timestamps {t.shape}")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "timestamps", t)

    @property
    def channel_count(self) -> int:
        return self.values.shape[0]

    @property
    def length(self) -> int:
        return self.values.shape[1]


@dataclasses.dataclass(frozen=True, eq=False)
class Dictionary:
    """Per-person map from activity to its training movelets.

    Entries are stored in label declaration order whatever order they were
    given in, which fixes the scan order used when matching.
    """

    person: str
    entries: Mapping[ActivityLabel, tuple[Movelet, ...]]

    def __post_init__(self):
        entries = {}
        for label in DICTIONARY_LABELS:
            if label in self.entries:
                entries[label] = tuple(self.entries[label])
        extra = set(self.entries) - set(entries)
        if extra:
            raise ValueError(f"labels not allowed in a dictionary: {sorted(map(str, extra))}")
        shapes = {m.values.shape for ms in entries.values() for m in ms}
        if not shapes:
            raise EmptyDictionary(f"dictionary for {self.person!r} has no movelets")
        if len(shapes) != 1:
            raise ChannelMismatch(f"dictionary movelets have mixed shapes {sorted(shapes)}")
        object.__setattr__(self, "entries", entries)

    @property
    def channel_count(self) -> int:
        return self.stacked_values.shape[1]

    @property
    def window(self) -> int:
        return self.stacked_values.shape[2]

    @property
    def entry_sizes(self) -> dict[ActivityLabel, int]:
        return {label: len(ms) for label, ms in self.entries.items()}

    def __len__(self) -> int:
        return self.stacked_values.shape[0]

    @cached_property
    def stacked_values(self) -> np.ndarray:
        """All movelets as one ``(M, c, n)`` array in scan order."""
        arr = np.stack([m.values for ms in self.entries.values() for m in ms])
        arr.flags.writeable = False
        return arr

    @cached_property
    def stacked_labels(self) -> tuple[ActivityLabel, ...]:
        return tuple(label for label, ms in self.entries.items() for _ in ms)


@dataclasses.dataclass(frozen=True, eq=False)
class ClassifiedTimeline:
    """Predicted and ground-truth label per timestamp.

    ``truth`` entries may be ``None`` for samples outside the annotation.
    """

    timestamps: np.ndarray
    predicted: tuple[ActivityLabel, ...]
    truth: tuple[Optional[ActivityLabel], ...]

    def __post_init__(self):
        t = _frozen_array(self.timestamps)
        predicted, truth = tuple(self.predicted), tuple(self.truth)
        if not (t.ndim == 1 and len(predicted) == len(truth) == t.shape[0]):
            raise LengthMismatch("timeline fields differ in length")
        if np.any(np.diff(t) <= 0):
            raise NonMonotoneTimestamps("timeline timestamps must strictly increase")
        if any(not p.in_dictionary for p in predicted):
            raise ValueError("predicted labels must be dictionary activities")
        object.__setattr__(self, "timestamps", t)
        object.__setattr__(self, "predicted", predicted)
        object.__setattr__(self, "truth", truth)

    def __len__(self) -> int:
        return self.timestamps.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, ClassifiedTimeline):
            return NotImplemented
        return (
            np.array_equal(self.timestamps, other.timestamps)
            and self.predicted == other.predicted
            and self.truth == other.truth
        )

    __hash__ = None

    @property
    def labeled_count(self) -> int:
        return sum(1 for lab in self.truth if lab is not None)

    def accuracy(self) -> float:
        """Fraction of labeled samples predicted correctly."""
        pairs = [(p, g) for p, g in zip(self.predicted, self.truth) if g is not None]
        if not pairs:
            return float("nan")
        return sum(p is g for p, g in pairs) / len(pairs)
