"""Dictionary matching, forward majority vote and per-mode classification."""

from __future__ import annotations

import dataclasses
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence, Union

import numpy as np

from .core import (
    VOTE_WINDOW,
    ActivityLabel,
    ClassifiedTimeline,
    Dictionary,
    Mode,
    Movelet,
)
from .errors import ChannelMismatch, EmptyDictionary, EmptyTimeline, LengthMismatch, MissingSensor
from .movelets import pairwise_discrepancy, window_stack
from .sync import synchronize

# bytes of the (B, M, c, n) difference array allowed per chunk
_CHUNK_BYTES = 32 * 2**20


@dataclasses.dataclass(frozen=True)
class MoveletMatch:
    index: int
    label: ActivityLabel
    discrepancy: float
    dictionary_index: int


def _stack(movelets) -> np.ndarray:
    if isinstance(movelets, np.ndarray):
        return movelets
    if isinstance(movelets, Movelet):
        return movelets.values[None]
    return np.stack([m.values for m in movelets])


def _check(tests: np.ndarray, dictionary: Dictionary):
    if len(dictionary.stacked_labels) == 0:
        raise EmptyDictionary("dictionary has no movelets")
    refs = dictionary.stacked_values
    if tests.ndim != 3:
        raise LengthMismatch(f"test movelets must be (N, c, n), got {tests.shape}")
    if tests.shape[1] != refs.shape[1]:
        raise ChannelMismatch(
            f"{tests.shape[1]}-channel movelets against a {refs.shape[1]}-channel dictionary"
        )
    if tests.shape[2] != refs.shape[2]:
        raise LengthMismatch(f"movelet length {tests.shape[2]} vs dictionary {refs.shape[2]}")


def classify_movelets(movelets: Union[np.ndarray, Sequence[Movelet]], dictionary: Dictionary,
                      workers: int = 1) -> list[MoveletMatch]:
    """Match every test movelet to its nearest dictionary movelet.

    The scan is exhaustive. Equal discrepancies go to the movelet met first
    in dictionary order (activity declaration order, then position within
    the entry). ``workers > 1`` spreads chunks over threads; the result order
    does not depend on it.
    """
    tests = _stack(movelets)
    _check(tests, dictionary)
    if tests.shape[0] == 0:
        raise EmptyTimeline("no test movelets")
    refs = dictionary.stacked_values
    per_test = max(refs.size * 8, 1)
    chunk = max(1, _CHUNK_BYTES // per_test)
    bounds = [(s, min(s + chunk, tests.shape[0])) for s in range(0, tests.shape[0], chunk)]

    def run(bound):
        lo, hi = bound
        d = pairwise_discrepancy(tests[lo:hi], refs)
        best = np.argmin(d, axis=1)
        return best, d[np.arange(hi - lo), best]

    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(run, bounds))
    else:
        parts = [run(b) for b in bounds]

    labels = dictionary.stacked_labels
    out = []
    for (lo, _), (best, dist) in zip(bounds, parts):
        for k, (j, d) in enumerate(zip(best.tolist(), dist.tolist())):
            out.append(MoveletMatch(lo + k, labels[j], d, j))
    return out


def match_movelet(m: Union[Movelet, np.ndarray], dictionary: Dictionary) -> MoveletMatch:
    """Nearest dictionary movelet to a single test movelet."""
    values = m.values if isinstance(m, Movelet) else np.asarray(m, dtype=float)
    match = classify_movelets(values[None], dictionary)[0]
    if isinstance(m, Movelet):
        match = dataclasses.replace(match, index=m.start_index)
    return match


def vote_timepoint(matches: Sequence[MoveletMatch], i: int, window: int = VOTE_WINDOW) -> ActivityLabel:
    """Plurality label among the movelets starting at ``i`` and the
    ``window - 1`` that follow it.

    Near the end of the series fewer voters remain and the window shrinks.
    Ties go to the label whose voters have the smallest summed discrepancy,
    then to the label declared first.
    """
    if not 0 <= i < len(matches):
        raise IndexError(f"time point {i} outside {len(matches)} matches")
    voters = matches[i:i + window]
    counts = Counter(m.label for m in voters)
    top = max(counts.values())
    tied = [label for label, c in counts.items() if c == top]
    if len(tied) == 1:
        return tied[0]
    sums = {label: 0.0 for label in tied}
    for m in voters:
        if m.label in sums:
            sums[m.label] += m.discrepancy
    return min(tied, key=lambda label: (sums[label], label.rank))


def vote_labels(matches: Sequence[MoveletMatch], window: int = VOTE_WINDOW) -> list[ActivityLabel]:
    return [vote_timepoint(matches, i, window) for i in range(len(matches))]


def classify_values(timestamps, values, truth, dictionary: Dictionary,
                    vote_window: int = VOTE_WINDOW, workers: int = 1) -> ClassifiedTimeline:
    """Classify a ``(T, c)`` array sample by sample.

    The last ``n - 1`` samples, where no full movelet starts, take the label
    voted for the last movelet.
    """
    n = dictionary.window
    stack = window_stack(np.asarray(values, dtype=float).T, n)
    matches = classify_movelets(stack, dictionary, workers=workers)
    voted = vote_labels(matches, vote_window)
    predicted = voted + [voted[-1]] * (n - 1)
    return ClassifiedTimeline(timestamps, tuple(predicted), tuple(truth))


def classify_series(recording, dictionary: Dictionary, mode: Union[Mode, str],
                    vote_window: int = VOTE_WINDOW, workers: int = 1) -> ClassifiedTimeline:
    """Classify one recording (a test step) with the given method.

    ``accel-only``
        3-channel accelerometer movelets, labels on accelerometer timestamps.
    ``gyro-only``
        3-channel movelets from the original gyroscope samples, labels on
        gyroscope timestamps (see :func:`map_to_accel_timestamps`).
    ``joint``
        6-channel movelets after interpolating the gyroscope onto the
        accelerometer clock; accelerometer samples outside the gyroscope span
        are dropped.
    """
    mode = Mode.parse(mode) if isinstance(mode, str) and not isinstance(mode, Mode) else mode
    if dictionary.channel_count != mode.channel_count:
        raise ChannelMismatch(
            f"{mode} needs a {mode.channel_count}-channel dictionary, got {dictionary.channel_count}"
        )
    accel = recording.accel
    gyro = getattr(recording, "gyro", None)
    if mode is Mode.ACCEL:
        if accel is None:
            raise MissingSensor("accel-only classification needs accelerometer data")
        return classify_values(accel.timestamps, accel.series.values, accel.labels,
                               dictionary, vote_window, workers)
    if gyro is None:
        raise MissingSensor(f"{mode} classification needs gyroscope data")
    if mode is Mode.GYRO:
        return classify_values(gyro.timestamps, gyro.series.values, gyro.labels,
                               dictionary, vote_window, workers)
    if accel is None:
        raise MissingSensor("joint classification needs accelerometer data")
    synced = synchronize(accel.series, gyro.series)
    truth = accel.labels[synced.retained]
    return classify_values(synced.series.timestamps, synced.series.values, truth,
                           dictionary, vote_window, workers)


def map_to_accel_timestamps(gyro_timeline: ClassifiedTimeline, accel_ts,
                            truth: Optional[Sequence[Optional[ActivityLabel]]] = None) -> ClassifiedTimeline:
    """Give each accelerometer timestamp the prediction of the nearest
    gyroscope timestamp; an exact midpoint goes to the earlier one.

    ``truth`` supplies the accelerometer ground truth; without it every
    sample is unlabeled.
    """
    accel_ts = np.asarray(accel_ts, dtype=float)
    g = gyro_timeline.timestamps
    if len(g) == 0 or accel_ts.size == 0:
        raise EmptyTimeline("cannot map an empty timeline")
    right = np.clip(np.searchsorted(g, accel_ts, side="left"), 0, len(g) - 1)
    left = np.clip(right - 1, 0, len(g) - 1)
    take_left = np.abs(accel_ts - g[left]) <= np.abs(g[right] - accel_ts)
    nearest = np.where(take_left, left, right)
    predicted = tuple(gyro_timeline.predicted[j] for j in nearest.tolist())
    if truth is None:
        truth = (None,) * accel_ts.size
    return ClassifiedTimeline(accel_ts, predicted, tuple(truth))
