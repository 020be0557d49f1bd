"""Confusion matrices, activity-group accuracies and percent improvements."""

from __future__ import annotations

import dataclasses
import enum
import math
from typing import Iterable, Mapping, Optional, Union

import numpy as np

from .core import DICTIONARY_LABELS, ActivityLabel, ClassifiedTimeline, Mode
from .errors import EmptyTimeline, MissingActivity, ZeroBaseline

TRUTH_LABELS: tuple[ActivityLabel, ...] = tuple(ActivityLabel)
PREDICTED_LABELS = DICTIONARY_LABELS


class ActivityGroup(enum.Enum):
    ALL = "All"
    VIGOROUS = "Vigorous"
    STATIONARY = "Stationary"
    TRANSITION = "Transition"

    def __str__(self) -> str:
        return self.value

    @property
    def members(self) -> tuple[ActivityLabel, ...]:
        L = ActivityLabel
        return {
            ActivityGroup.ALL: DICTIONARY_LABELS,
            ActivityGroup.VIGOROUS: (L.WALK, L.STAIR_UP, L.STAIR_DOWN),
            ActivityGroup.STATIONARY: (L.STAND, L.SIT),
            ActivityGroup.TRANSITION: (L.SIT_TO_STAND, L.STAND_TO_SIT),
        }[self]


@dataclasses.dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """Counts of (predicted, truth) pairs.

    Rows are predicted labels (the seven dictionary activities), columns are
    truth labels (those seven plus the out-of-dictionary column). ``excluded``
    counts unlabeled samples that were skipped.
    """

    counts: np.ndarray
    excluded: int = 0

    def __post_init__(self):
        counts = np.array(self.counts, dtype=np.int64)
        if counts.shape != (len(PREDICTED_LABELS), len(TRUTH_LABELS)):
            raise ValueError(f"confusion counts must be 7x8, got {counts.shape}")
        counts.flags.writeable = False
        object.__setattr__(self, "counts", counts)

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(self.counts + other.counts, self.excluded + other.excluded)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConfusionMatrix):
            return NotImplemented
        return np.array_equal(self.counts, other.counts) and self.excluded == other.excluded

    __hash__ = None

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def column_total(self, truth: ActivityLabel) -> int:
        return int(self.counts[:, TRUTH_LABELS.index(truth)].sum())

    @property
    def percentages(self) -> np.ndarray:
        """Column-normalised percentages; empty columns are NaN."""
        col = self.counts.sum(axis=0)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(col > 0, 100.0 * self.counts / col, np.nan)

    def accuracy(self, label: ActivityLabel) -> float:
        """Percent of ``label`` samples predicted as ``label`` (NaN if none)."""
        if not label.in_dictionary:
            raise ValueError("out-of-dictionary samples can never be predicted correctly")
        return float(self.percentages[PREDICTED_LABELS.index(label), TRUTH_LABELS.index(label)])

    def to_dict(self, decimals: int = 6) -> dict:
        pct = self.percentages
        return {
            "predicted_labels": [p.value for p in PREDICTED_LABELS],
            "truth_labels": [t.value for t in TRUTH_LABELS],
            "counts": self.counts.tolist(),
            "percent": [
                [None if math.isnan(v) else round(float(v), decimals) for v in row] for row in pct
            ],
            "excluded_unlabeled": self.excluded,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "ConfusionMatrix":
        if list(data["predicted_labels"]) != [p.value for p in PREDICTED_LABELS] or list(
            data["truth_labels"]
        ) != [t.value for t in TRUTH_LABELS]:
            raise ValueError("confusion matrix labels are not in the expected order")
        return cls(np.asarray(data["counts"]), int(data.get("excluded_unlabeled", 0)))

    def to_text(self, decimals: int = 1) -> str:
        """Aligned-column table of percentages, truth on columns."""
        pct = self.percentages
        width = max(len(t.value) for t in TRUTH_LABELS) + 1
        head = " " * width + "".join(t.value.rjust(width) for t in TRUTH_LABELS)
        lines = [head]
        for r, label in enumerate(PREDICTED_LABELS):
            cells = [
                ("-" if math.isnan(v) else f"{v:.{decimals}f}").rjust(width) for v in pct[r]
            ]
            lines.append(label.value.ljust(width) + "".join(cells))
        lines.append("n".ljust(width) + "".join(str(c).rjust(width) for c in self.counts.sum(axis=0)))
        return "\n".join(lines)


def confusion_matrix(timelines: Union[ClassifiedTimeline, Iterable[ClassifiedTimeline]]) -> ConfusionMatrix:
    """Tally predicted against truth labels over one or more timelines.

    Samples whose truth is ``None`` are skipped and counted in ``excluded``.
    """
    if isinstance(timelines, ClassifiedTimeline):
        timelines = [timelines]
    counts = np.zeros((len(PREDICTED_LABELS), len(TRUTH_LABELS)), dtype=np.int64)
    excluded = 0
    seen = 0
    for tl in timelines:
        seen += len(tl)
        for p, g in zip(tl.predicted, tl.truth):
            if g is None:
                excluded += 1
            else:
                counts[PREDICTED_LABELS.index(p), TRUTH_LABELS.index(g)] += 1
    if seen == 0:
        raise EmptyTimeline("no samples to evaluate")
    return ConfusionMatrix(counts, excluded)


def group_average_accuracy(cm: ConfusionMatrix, group: ActivityGroup) -> float:
    """Unweighted mean of the diagonal percentages over the group's members."""
    missing = [label.value for label in group.members if cm.column_total(label) == 0]
    if missing:
        raise MissingActivity(f"{group} group lacks truth samples for {missing}")
    return float(np.mean([cm.accuracy(label) for label in group.members]))


def relative_change(value: float, baseline: float) -> float:
    """Percent change of ``value`` relative to ``baseline``."""
    if baseline == 0:
        raise ZeroBaseline("baseline accuracy is zero")
    return 100.0 * (value - baseline) / baseline


def percent_improvement(joint: float, accel: float, gyro: float) -> float:
    """Relative gain of ``joint`` over the better single-sensor accuracy, in percent."""
    for name, v in (("joint", joint), ("accel", accel), ("gyro", gyro)):
        if not 0.0 <= v <= 100.0:
            raise ValueError(f"{name} accuracy {v} outside [0, 100]")
    return relative_change(joint, max(accel, gyro))


def group_table(matrices: Mapping[Mode, ConfusionMatrix]) -> dict[ActivityGroup, dict[Mode, Optional[float]]]:
    """Group accuracies for each method; ``None`` where a group member has no samples."""
    table = {}
    for group in ActivityGroup:
        row = {}
        for mode, cm in matrices.items():
            try:
                row[mode] = group_average_accuracy(cm, group)
            except MissingActivity:
                row[mode] = None
        table[group] = row
    return table


def improvement_table(table: Mapping[ActivityGroup, Mapping[Mode, Optional[float]]]) -> dict[ActivityGroup, Optional[float]]:
    out = {}
    for group, row in table.items():
        vals = [row.get(m) for m in (Mode.JOINT, Mode.ACCEL, Mode.GYRO)]
        if any(v is None for v in vals):
            out[group] = None
            continue
        try:
            out[group] = percent_improvement(*vals)
        except ZeroBaseline:
            out[group] = None
    return out


def format_group_tables(tables: Mapping[str, Mapping[ActivityGroup, Mapping[Mode, Optional[float]]]]) -> str:
    """Render per-participant group accuracies as one aligned text table."""
    modes = (Mode.ACCEL, Mode.GYRO, Mode.JOINT)
    lines = [f"{'group':<12}{'participant':>12}" + "".join(f"{m.value:>12}" for m in modes)]
    for group in ActivityGroup:
        for participant, table in tables.items():
            row = table.get(group, {})
            cells = "".join(
                f"{row[m]:>12.1f}" if row.get(m) is not None else f"{'-':>12}" for m in modes
            )
            lines.append(f"{group.value:<12}{participant:>12}" + cells)
    return "\n".join(lines)
