"""Movelet-based activity recognition from smartphone accelerometer and
gyroscope data, single-sensor and joint."""

from .core import (
    DICTIONARY_LABELS,
    VOTE_WINDOW,
    WINDOW,
    ActivityLabel,
    ClassifiedTimeline,
    Dictionary,
    LabeledSeries,
    Mode,
    Movelet,
    Sample,
    SensorKind,
    SyncedSeries,
    TriaxialSeries,
    validate_series,
)
from .classify import (
    MoveletMatch,
    classify_movelets,
    classify_series,
    map_to_accel_timestamps,
    match_movelet,
    vote_timepoint,
)
from .evaluate import (
    ActivityGroup,
    ConfusionMatrix,
    confusion_matrix,
    group_average_accuracy,
    percent_improvement,
)
from .ingest import (
    ColumnMapping,
    DatasetLayout,
    LabelColumns,
    LabeledInterval,
    Recording,
    StudyStep,
    attach_labels,
    extract_training_segment,
    parse_label_csv,
    parse_sensor_csv,
)
from .movelets import axis_distance, discrepancy, extract_movelets
from .pipeline import ExperimentConfig, build_dictionary, load_config, run_experiment
from .sync import InterpolationResult, linear_interpolate, synchronize

__version__ = "0.1.0"
