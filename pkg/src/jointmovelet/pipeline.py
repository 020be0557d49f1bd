"""End-to-end analyses: training data -> dictionary -> classification -> evaluation.

Configuration is an INI file::

    [experiment]
    dataset_root = data            ; relative to the config file
    participants = 1, 2, 3, 4
    steps = 1, 2, 3, 5, 6
    modes = accel-only, gyro-only, joint
    window = 10
    vote_window = 10
    training_seconds = 5
    nominal_rate = 10
    workers = 1

    [sensor_columns]                ; see ingest.ColumnMapping
    timestamp = timestamp
    timestamp_scale = 1

    [label_columns]                 ; see ingest.LabelColumns
    [label_aliases]                 ; raw label = canonical label
    revolving door = revolvingDoor

    [layout]                        ; see ingest.DatasetLayout
    participant_dir = participant{participant}

All sections but ``[experiment]`` are optional.
"""

from __future__ import annotations

import configparser
import dataclasses
import hashlib
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Mapping, Optional

import numpy as np

from .classify import classify_series, map_to_accel_timestamps
from .core import (
    DICTIONARY_LABELS,
    NOMINAL_RATE,
    VOTE_WINDOW,
    WINDOW,
    ActivityLabel,
    ClassifiedTimeline,
    Dictionary,
    LabeledSeries,
    Mode,
    Movelet,
)
from .errors import ArtifactMissing, ConfigInvalid, DatasetMissing, MoveletError, SeriesTooShort
from .evaluate import (
    ActivityGroup,
    ConfusionMatrix,
    confusion_matrix,
    group_table,
    improvement_table,
)
from .ingest import (
    STUDY_STEPS,
    ColumnMapping,
    DatasetLayout,
    LabelColumns,
    Recording,
    extract_training_segment,
    load_step,
    load_training,
)
from .movelets import extract_movelets
from .sync import synchronize

log = logging.getLogger(__name__)

ALL_MODES = (Mode.ACCEL, Mode.GYRO, Mode.JOINT)


@dataclasses.dataclass(frozen=True)
class ExperimentConfig:
    dataset_root: Path
    participants: tuple[str, ...] = ("1", "2", "3", "4")
    steps: tuple[int, ...] = STUDY_STEPS
    modes: tuple[Mode, ...] = ALL_MODES
    window: int = WINDOW
    vote_window: int = VOTE_WINDOW
    training_seconds: float = 5.0
    nominal_rate: float = NOMINAL_RATE
    columns: ColumnMapping = ColumnMapping()
    label_columns: LabelColumns = LabelColumns()
    layout: DatasetLayout = DatasetLayout()
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "dataset_root", Path(self.dataset_root))
        object.__setattr__(self, "participants", tuple(str(p) for p in self.participants))
        object.__setattr__(self, "steps", tuple(int(s) for s in self.steps))
        object.__setattr__(self, "modes", tuple(Mode.parse(m) for m in self.modes))
        bad = [s for s in self.steps if s not in STUDY_STEPS]
        if bad:
            raise ConfigInvalid(f"steps {bad} are not analysed (allowed: {STUDY_STEPS})")
        if self.window < 1 or self.vote_window < 1:
            raise ConfigInvalid("window and vote_window must be at least 1")
        if self.training_seconds <= 0 or self.nominal_rate <= 0:
            raise ConfigInvalid("training_seconds and nominal_rate must be positive")
        if not self.participants or not self.steps or not self.modes:
            raise ConfigInvalid("participants, steps and modes must be non-empty")

    def to_dict(self) -> dict:
        return {
            "dataset_root": str(self.dataset_root),
            "participants": list(self.participants),
            "steps": list(self.steps),
            "modes": [m.value for m in self.modes],
            "window": self.window,
            "vote_window": self.vote_window,
            "training_seconds": self.training_seconds,
            "nominal_rate": self.nominal_rate,
            "columns": dataclasses.asdict(self.columns),
            "label_columns": {**dataclasses.asdict(self.label_columns),
                              "aliases": dict(sorted(self.label_columns.aliases.items()))},
            "layout": dataclasses.asdict(self.layout),
        }

    @property
    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def recording_kwargs(self, gyro: bool) -> dict:
        return dict(columns=self.columns, label_columns=self.label_columns, layout=self.layout,
                    gyro=gyro, nominal_rate=self.nominal_rate)


def _split(value: str) -> list[str]:
    return [v.strip() for v in value.replace(";", ",").split(",") if v.strip()]


def load_config(path, **overrides) -> ExperimentConfig:
    """Read an INI config; keyword ``overrides`` replace ``[experiment]`` values."""
    path = Path(path)
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    parser.optionxform = str
    try:
        read = parser.read(path)
    except configparser.Error as exc:
        raise ConfigInvalid(f"{path}: {exc}") from None
    if not read:
        raise ConfigInvalid(f"cannot read config file {path}")
    if not parser.has_section("experiment"):
        raise ConfigInvalid(f"{path}: missing [experiment] section")
    exp = dict(parser["experiment"])
    exp.update({k: v for k, v in overrides.items() if v is not None})

    def section(name, cls, conv=None):
        if not parser.has_section(name):
            return cls()
        known = {f.name: f for f in dataclasses.fields(cls)}
        kwargs = {}
        for key, value in parser[name].items():
            if key not in known:
                raise ConfigInvalid(f"{path}: unknown key {key!r} in [{name}]")
            kwargs[key] = conv(key, value) if conv else value
        return cls(**kwargs)

    def column_conv(key, value):
        if key == "timestamp_scale":
            return float(value)
        if key == "label":
            return value or None
        return value

    aliases = dict(parser["label_aliases"]) if parser.has_section("label_aliases") else {}
    try:
        label_columns = dataclasses.replace(section("label_columns", LabelColumns), aliases=aliases)
        root = Path(exp.pop("dataset_root", "."))
        if not root.is_absolute():
            root = path.parent / root
        kwargs: dict[str, Any] = {"dataset_root": root}
        for key, value in exp.items():
            if key in ("participants", "modes"):
                kwargs[key] = tuple(_split(value)) if isinstance(value, str) else tuple(value)
            elif key == "steps":
                kwargs[key] = tuple(int(s) for s in (_split(value) if isinstance(value, str) else value))
            elif key in ("window", "vote_window", "workers"):
                kwargs[key] = int(value)
            elif key in ("training_seconds", "nominal_rate"):
                kwargs[key] = float(value)
            else:
                raise ConfigInvalid(f"{path}: unknown key {key!r} in [experiment]")
        return ExperimentConfig(
            columns=section("sensor_columns", ColumnMapping, column_conv),
            label_columns=label_columns,
            layout=section("layout", DatasetLayout),
            **kwargs,
        )
    except ConfigInvalid:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigInvalid(f"{path}: {exc}") from None


# ---------------------------------------------------------------- dictionaries

def training_series(training: Recording, mode: Mode) -> LabeledSeries:
    """The labeled training data a dictionary for ``mode`` is cut from."""
    if mode is Mode.ACCEL:
        return training.accel
    if training.gyro is None:
        raise DatasetMissing(f"{mode} needs gyroscope training data")
    if mode is Mode.GYRO:
        return training.gyro
    synced = synchronize(training.accel.series, training.gyro.series)
    return LabeledSeries(synced.series, training.accel.labels[synced.retained])


def build_dictionary(training: Recording, mode, person: str = "", window: int = WINDOW,
                     training_seconds: float = 5.0) -> Dictionary:
    """One entry per dictionary activity, each holding every ``window``-sample
    movelet of that activity's training segment."""
    mode = Mode.parse(mode)
    labeled = training_series(training, mode)
    entries = {}
    for label in DICTIONARY_LABELS:
        seg = extract_training_segment(labeled, label, training_seconds)
        try:
            entries[label] = extract_movelets(seg.channels, seg.timestamps, window)
        except SeriesTooShort as exc:
            raise SeriesTooShort(f"training segment for {label}: {exc}") from None
    return Dictionary(person, entries)


def dictionary_to_dict(dictionary: Dictionary, mode: Optional[Mode] = None) -> dict:
    return {
        "person": dictionary.person,
        "mode": mode.value if mode else None,
        "channels": dictionary.channel_count,
        "window": dictionary.window,
        "entry_sizes": {k.value: v for k, v in dictionary.entry_sizes.items()},
        "entries": {
            label.value: [
                {
                    "start_index": m.start_index,
                    "timestamps": [_r(t) for t in m.timestamps],
                    "values": [[float(v) for v in row] for row in m.values],
                }
                for m in ms
            ]
            for label, ms in dictionary.entries.items()
        },
    }


def dictionary_from_dict(data: Mapping) -> Dictionary:
    entries = {
        ActivityLabel(label): [
            Movelet(m["start_index"], np.asarray(m["values"]), np.asarray(m["timestamps"]))
            for m in ms
        ]
        for label, ms in data["entries"].items()
    }
    return Dictionary(data.get("person", ""), entries)


# ---------------------------------------------------------------- timelines

def _r(x: float) -> float:
    return round(float(x), 6)


def _label_or_none(value: Optional[str]) -> Optional[ActivityLabel]:
    return None if value is None else ActivityLabel(value)


def timeline_to_dict(timeline: ClassifiedTimeline, **meta) -> dict:
    return {
        **meta,
        "timestamps": [_r(t) for t in timeline.timestamps],
        "predicted": [p.value for p in timeline.predicted],
        "truth": [None if g is None else g.value for g in timeline.truth],
    }


def timeline_from_dict(data: Mapping) -> ClassifiedTimeline:
    try:
        return ClassifiedTimeline(
            np.asarray(data["timestamps"], dtype=float),
            tuple(ActivityLabel(p) for p in data["predicted"]),
            tuple(_label_or_none(g) for g in data["truth"]),
        )
    except KeyError as exc:
        raise ArtifactMissing(f"timeline artifact lacks field {exc}") from None


def read_timeline(path) -> ClassifiedTimeline:
    path = Path(path)
    if not path.is_file():
        raise ArtifactMissing(f"timeline artifact not found: {path}")
    return timeline_from_dict(json.loads(path.read_text()))


def dump_json(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True, allow_nan=False) + "\n"


# ---------------------------------------------------------------- experiment

@dataclasses.dataclass
class ModeResult:
    mode: Mode
    timelines: dict[int, ClassifiedTimeline]
    confusion: ConfusionMatrix
    dictionary_sizes: dict[ActivityLabel, int]
    sample_counts: dict[ActivityLabel, int]
    clipped: dict[int, tuple[int, int]] = dataclasses.field(default_factory=dict)


@dataclasses.dataclass
class ParticipantResult:
    participant: str
    modes: dict[Mode, ModeResult] = dataclasses.field(default_factory=dict)

    @property
    def groups(self) -> dict[ActivityGroup, dict[Mode, Optional[float]]]:
        return group_table({m: r.confusion for m, r in self.modes.items()})

    @property
    def improvements(self) -> dict[ActivityGroup, Optional[float]]:
        return improvement_table(self.groups)

    @property
    def sample_counts(self) -> dict[ActivityLabel, int]:
        for r in self.modes.values():
            return r.sample_counts
        return {}


@dataclasses.dataclass
class ExperimentResult:
    config: ExperimentConfig
    participants: dict[str, ParticipantResult]
    errors: list[str]

    @property
    def ok(self) -> bool:
        return not self.errors


def run_mode(config: ExperimentConfig, participant: str, mode: Mode) -> ModeResult:
    """Train, classify every configured step and tally one participant/method."""
    root = config.dataset_root
    needs_gyro = mode is not Mode.ACCEL
    kwargs = config.recording_kwargs(gyro=needs_gyro)
    training = load_training(root, participant, **kwargs)
    dictionary = build_dictionary(training, mode, person=participant, window=config.window,
                                  training_seconds=config.training_seconds)
    timelines, clipped = {}, {}
    counts: dict[ActivityLabel, int] = {}
    for step in config.steps:
        rec = load_step(root, participant, step, **kwargs)
        for label, k in rec.accel.counts().items():
            counts[label] = counts.get(label, 0) + k
        tl = classify_series(rec, dictionary, mode, config.vote_window)
        if mode is Mode.GYRO:
            tl = map_to_accel_timestamps(tl, rec.accel.timestamps, rec.accel.labels)
        elif mode is Mode.JOINT:
            sync = synchronize(rec.accel.series, rec.gyro.series)
            clipped[step] = (sync.clipped_head, sync.clipped_tail)
        timelines[step] = tl
    counts = {label: counts[label] for label in ActivityLabel if label in counts}
    return ModeResult(mode, timelines, confusion_matrix(timelines.values()),
                      dictionary.entry_sizes, counts, clipped)


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run every configured participant and method.

    A failure in one participant/method pair is logged and reported in
    ``errors`` without stopping the others.
    """
    if not config.dataset_root.is_dir():
        raise DatasetMissing(f"dataset root not found: {config.dataset_root}")
    tasks = [(p, m) for p in config.participants for m in config.modes]

    def work(task):
        p, m = task
        try:
            return run_mode(config, p, m), None
        except (MoveletError, OSError) as exc:
            log.warning("participant %s, %s failed: %s", p, m, exc)
            return None, f"participant {p}, {m}: {type(exc).__name__}: {exc}"

    if config.workers > 1:
        with ThreadPoolExecutor(config.workers) as pool:
            outcomes = list(pool.map(work, tasks))
    else:
        outcomes = [work(t) for t in tasks]

    participants = {p: ParticipantResult(p) for p in config.participants}
    errors = []
    for (p, m), (res, err) in zip(tasks, outcomes):
        if err:
            errors.append(err)
        else:
            participants[p].modes[m] = res
    return ExperimentResult(config, participants, errors)


def _opt(v: Optional[float]) -> Optional[float]:
    return None if v is None else _r(v)


def summary_dict(result: ExperimentResult) -> dict:
    """Group accuracies, improvements and sample counts of every participant."""
    parts = result.participants
    return {
        "config_hash": result.config.config_hash,
        "groups": {
            g.value: {
                p: {m.value: _opt(v) for m, v in pr.groups[g].items()} for p, pr in parts.items()
            }
            for g in ActivityGroup
        },
        "improvement_percent": {
            g.value: {p: _opt(pr.improvements[g]) for p, pr in parts.items()} for g in ActivityGroup
        },
        "sample_counts": {p: {k.value: v for k, v in pr.sample_counts.items()} for p, pr in parts.items()},
        "errors": list(result.errors),
    }


def write_artifacts(result: ExperimentResult, out_dir) -> list[Path]:
    """Write timelines, confusion matrices and the summary table as JSON.

    Layout: ``<participant>/<mode>/step<k>.timeline.json``,
    ``<participant>/<mode>/confusion.json`` and ``summary/table3.json``.
    """
    out_dir = Path(out_dir)
    h = result.config.config_hash
    written = []

    def put(rel, obj):
        path = out_dir / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(dump_json(obj))
        written.append(path)

    for p, pr in result.participants.items():
        for m, mr in pr.modes.items():
            base = Path(p) / m.value
            for step, tl in mr.timelines.items():
                meta = {"config_hash": h, "participant": p, "mode": m.value, "step": step}
                if step in mr.clipped:
                    meta["clipped_head"], meta["clipped_tail"] = mr.clipped[step]
                put(base / f"step{step}.timeline.json", timeline_to_dict(tl, **meta))
            put(base / "confusion.json", {
                "config_hash": h,
                "participant": p,
                "mode": m.value,
                "dictionary_sizes": {k.value: v for k, v in mr.dictionary_sizes.items()},
                **mr.confusion.to_dict(),
            })
    put(Path("summary") / "table3.json", summary_dict(result))
    return written
