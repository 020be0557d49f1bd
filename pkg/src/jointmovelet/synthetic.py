"""Synthetic study recordings with known labels.

Each activity is a smooth function of the time elapsed since it began, so the
accelerometer and gyroscope can sample it on their own, mutually offset and
jittered clocks. Standing and sitting differ only in the accelerometer (the
gyroscope reads zero in both), which mimics a real phone in a pocket.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .core import ActivityLabel, SensorKind, TriaxialSeries
from .ingest import (
    STUDY_STEPS,
    DatasetLayout,
    LabeledInterval,
    Recording,
    attach_labels,
    write_label_csv,
    write_sensor_csv,
)

L = ActivityLabel
TWO_PI = 2 * np.pi

STAND_LEVEL = np.array([-0.15, 0.98, 0.02])
SIT_LEVEL = np.array([-0.73, 0.26, 0.64])

TRAINING_SCRIPT = (
    (L.WALK, 6.0), (None, 1.0), (L.STAND, 6.0), (L.STAIR_UP, 6.0), (None, 1.0),
    (L.STAIR_DOWN, 6.0), (L.SIT, 6.0), (L.SIT_TO_STAND, 2.0), (L.STAND, 2.0),
    (L.STAND_TO_SIT, 2.0), (L.SIT, 2.0),
)

STEP_SCRIPTS = {
    1: ((L.STAND, 5.0), (L.STAIR_DOWN, 8.0), (L.WALK, 20.0), (L.STAIR_UP, 8.0)),
    2: ((L.STAND, 4.0), (L.WALK, 10.0), (L.STAND_TO_SIT, 2.0), (L.SIT, 8.0),
        (L.SIT_TO_STAND, 2.0), (L.WALK, 8.0), (L.STAND_TO_SIT, 2.0), (L.SIT, 6.0),
        (L.SIT_TO_STAND, 2.0), (L.STAND, 3.0)),
    3: ((L.WALK, 15.0), (None, 2.0), (L.WALK, 15.0)),
    5: ((L.STAND, 3.0), (L.STAIR_DOWN, 6.0), (L.WALK, 15.0), (L.STAIR_UP, 6.0),
        (L.WALK, 4.0), (L.OUT_OF_DICTIONARY, 3.0)),
    6: ((L.STAIR_UP, 12.0), (None, 2.0), (L.STAIR_DOWN, 12.0)),
}


def _smoothstep(u):
    u = np.clip(u, 0.0, 1.0)
    return u * u * (3 - 2 * u)


def activity_signal(label: Optional[ActivityLabel], tau: np.ndarray, duration: float,
                    kind: SensorKind, tempo: float = 1.0) -> np.ndarray:
    """Noise-free ``(len(tau), 3)`` sensor signal ``tau`` seconds into an activity.

    ``tempo`` scales the gait frequency, standing in for person-to-person
    differences.
    """
    tau = np.asarray(tau, dtype=float)[:, None]
    accel = kind is SensorKind.ACCELEROMETER

    def wave(freq, amps, phases, base=(0.0, 0.0, 0.0)):
        f = freq * tempo
        return np.asarray(base) + np.asarray(amps) * np.sin(TWO_PI * f * tau + np.asarray(phases))

    if label is None or label is L.STAND:
        return np.broadcast_to(STAND_LEVEL if accel else np.zeros(3), (tau.shape[0], 3)).copy()
    if label is L.SIT:
        return np.broadcast_to(SIT_LEVEL if accel else np.zeros(3), (tau.shape[0], 3)).copy()
    if label is L.WALK:
        if accel:
            return wave(1.8, (0.35, 0.35, 0.2), (0.0, np.pi, 0.5), (-0.2, 0.95, 0.1))
        return wave(1.8, (1.2, 0.8, 0.5), (0.3, 1.0, 0.0))
    if label is L.STAIR_UP:
        if accel:
            return wave(1.3, (0.25, 0.3, 0.4), (0.4, 2.0, 1.0), (-0.3, 0.9, 0.2))
        return wave(1.3, (0.9, 1.1, 0.3), (0.0, 0.7, 2.2))
    if label is L.STAIR_DOWN:
        if accel:
            return wave(2.0, (0.45, 0.2, 0.3), (1.2, 0.3, 2.5), (-0.1, 0.95, 0.05))
        return wave(2.0, (1.5, 0.6, 0.7), (2.0, 0.1, 1.4))
    if label in (L.SIT_TO_STAND, L.STAND_TO_SIT):
        u = tau / duration
        up = label is L.SIT_TO_STAND
        if accel:
            lo, hi = (SIT_LEVEL, STAND_LEVEL) if up else (STAND_LEVEL, SIT_LEVEL)
            return lo + (hi - lo) * _smoothstep(u)
        arc = np.sin(np.pi * np.clip(u, 0, 1))
        if up:
            return arc * np.array([1.0, -0.5, 0.2])
        return arc * np.exp(-2 * u) * np.array([-1.6, 0.9, -0.6]) * (1 + 0.5 * np.sin(6 * np.pi * u))
    # out-of-dictionary activity (revolving door): slow turn
    if accel:
        return wave(0.5, (0.1, 0.05, 0.15), (0.0, 0.0, 1.0), (-0.2, 0.9, 0.3))
    return wave(0.5, (0.1, 0.1, 0.3), (0.0, 1.0, 0.0), (0.0, 0.0, 0.8))


def script_intervals(script, start_time: float = 0.0) -> list[tuple[Optional[ActivityLabel], float, float]]:
    out, t = [], start_time
    for label, seconds in script:
        out.append((label, t, t + seconds))
        t += seconds
    return out


def _sample_times(start, stop, rate, offset, jitter, rng):
    k = np.arange(int(np.floor((stop - start - offset) * rate)) + 1)
    t = start + offset + k / rate
    if jitter:
        t = t + rng.uniform(-jitter, jitter, size=t.size)
    return t[(t >= start) & (t < stop)]


def simulate_sensor(script, kind: SensorKind, rng: np.random.Generator, start_time: float = 0.0,
                    rate: float = 10.0, offset: float = 0.0, jitter: float = 0.003,
                    noise: float = 0.02, tempo: float = 1.0) -> TriaxialSeries:
    spans = script_intervals(script, start_time)
    t = _sample_times(spans[0][1], spans[-1][2], rate, offset, jitter, rng)
    values = np.empty((t.size, 3))
    for label, lo, hi in spans:
        sel = (t >= lo) & (t < hi)
        values[sel] = activity_signal(label, t[sel] - lo, hi - lo, kind, tempo)
    if noise:
        values += rng.normal(0.0, noise, size=values.shape)
    return TriaxialSeries(t, values, kind=kind, nominal_rate=rate)


def simulate_recording(script, seed=0, start_time: float = 0.0, gyro_offset: float = 0.04,
                       jitter: float = 0.003, noise: float = 0.02, tempo: float = 1.0,
                       name: str = "") -> tuple[Recording, list[LabeledInterval]]:
    """Labeled accelerometer and gyroscope data for a script of
    ``(label, seconds)`` pairs; ``None`` labels leave a gap in the annotation."""
    rng = np.random.default_rng(seed)
    accel = simulate_sensor(script, SensorKind.ACCELEROMETER, rng, start_time,
                            jitter=jitter, noise=noise, tempo=tempo)
    gyro = simulate_sensor(script, SensorKind.GYROSCOPE, rng, start_time, offset=gyro_offset,
                           jitter=jitter, noise=noise * 1.5, tempo=tempo)
    intervals = [LabeledInterval(lo, hi, label)
                 for label, lo, hi in script_intervals(script, start_time) if label is not None]
    rec = Recording(attach_labels(accel, intervals), attach_labels(gyro, intervals), name=name)
    return rec, intervals


def write_recording(rec: Recording, intervals, directory, layout: DatasetLayout = DatasetLayout()):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_sensor_csv(rec.accel.series, directory / layout.accel_file)
    if rec.gyro is not None:
        write_sensor_csv(rec.gyro.series, directory / layout.gyro_file)
    write_label_csv(intervals, directory / layout.labels_file)


CONFIG_TEMPLATE = """\
[experiment]
dataset_root = {root}
participants = {participants}
steps = {steps}
modes = accel-only, gyro-only, joint
window = 10
vote_window = 10
training_seconds = 5
nominal_rate = 10
"""


def make_dataset(root, participants: Sequence[str] = ("1", "2"), steps=STUDY_STEPS, seed: int = 0,
                 layout: DatasetLayout = DatasetLayout(), noise: float = 0.02,
                 start_time: float = 1_530_000_000.0) -> Path:
    """Write a small study-shaped dataset and a matching ``config.ini`` under ``root``."""
    root = Path(root)
    for pi, p in enumerate(participants):
        tempo = 1.0 + 0.05 * pi
        rec, iv = simulate_recording(TRAINING_SCRIPT, seed=(seed, pi, 0), start_time=start_time,
                                     noise=noise, tempo=tempo, name="training")
        write_recording(rec, iv, layout.recording_path(root, p), layout)
        for step in steps:
            rec, iv = simulate_recording(STEP_SCRIPTS[step], seed=(seed, pi, step),
                                         start_time=start_time + 1000.0 * step, noise=noise,
                                         tempo=tempo, name=f"step{step}")
            write_recording(rec, iv, layout.recording_path(root, p, step), layout)
    (root / "config.ini").write_text(CONFIG_TEMPLATE.format(
        root=".", participants=", ".join(participants), steps=", ".join(map(str, steps))))
    return root
