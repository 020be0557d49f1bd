"""Putting gyroscope samples onto the accelerometer clock."""

from __future__ import annotations

import dataclasses

import numpy as np

from .core import SyncedSeries, TriaxialSeries
from .errors import NoOverlap, NonMonotoneTimestamps, OutOfRange


@dataclasses.dataclass(frozen=True)
class InterpolationResult:
    """Synchronised series plus how many accelerometer samples were dropped at
    each end for lying outside the gyroscope's time span."""

    series: SyncedSeries
    clipped_head: int
    clipped_tail: int

    @property
    def retained(self) -> slice:
        """Slice of the input accelerometer samples kept in :attr:`series`."""
        return slice(self.clipped_head, self.clipped_head + len(self.series))


def linear_interpolate(series: TriaxialSeries, target_ts) -> np.ndarray:
    """Piecewise-linear values of ``series`` at ``target_ts``.

    Returns an array of shape ``(len(target_ts), channels)``. Targets equal to
    a source timestamp get that sample's value exactly, and no result leaves
    the range of its two bracketing samples.

    Raises
    ------
    OutOfRange
        A target lies before the first or after the last source timestamp.
    """
    src_t = series.timestamps
    src_v = series.values
    tgt = np.asarray(target_ts, dtype=float)
    if tgt.size == 0:
        return np.empty((0, src_v.shape[1]))
    if np.any(np.diff(tgt) < 0):
        raise NonMonotoneTimestamps("target timestamps must be sorted")
    if len(src_t) == 0 or tgt[0] < src_t[0] or tgt[-1] > src_t[-1]:
        raise OutOfRange(
            f"targets [{tgt[0]}, {tgt[-1]}] exceed source span "
            f"[{src_t[0] if len(src_t) else 'nan'}, {src_t[-1] if len(src_t) else 'nan'}]"
        )

    # index of the right bracketing sample: src_t[hi-1] <= t < src_t[hi]
    hi = np.searchsorted(src_t, tgt, side="right")
    exact = src_t[np.minimum(hi, len(src_t)) - 1] == tgt
    hi = np.clip(hi, 1, len(src_t) - 1) if len(src_t) > 1 else np.ones_like(hi)
    lo = hi - 1

    out = np.empty((tgt.size, src_v.shape[1]))
    if len(src_t) > 1:
        t0, t1 = src_t[lo], src_t[hi]
        frac = ((tgt - t0) / (t1 - t0))[:, None]
        v0, v1 = src_v[lo], src_v[hi]
        out[:] = v0 + (v1 - v0) * frac
        # rounding in the segment equation may step one ulp past an endpoint
        np.clip(out, np.minimum(v0, v1), np.maximum(v0, v1), out=out)
    out[exact] = src_v[np.searchsorted(src_t, tgt[exact], side="left")]
    return out


def synchronize(accel: TriaxialSeries, gyro: TriaxialSeries) -> InterpolationResult:
    """Interpolate gyroscope data to the accelerometer timestamps.

    Accelerometer samples outside the gyroscope span are dropped rather than
    extrapolated; the counts are reported on the result. Accelerometer values
    are copied unchanged.
    """
    a_t, g_t = accel.timestamps, gyro.timestamps
    if len(a_t) == 0 or len(g_t) == 0:
        raise NoOverlap("cannot synchronise an empty series")
    head = int(np.searchsorted(a_t, g_t[0], side="left"))
    stop = int(np.searchsorted(a_t, g_t[-1], side="right"))
    if stop <= head:
        raise NoOverlap(
            f"accelerometer [{a_t[0]}, {a_t[-1]}] and gyroscope [{g_t[0]}, {g_t[-1]}] do not overlap"
        )
    kept_t = a_t[head:stop]
    gyro_v = linear_interpolate(gyro, kept_t)
    synced = SyncedSeries(
        kept_t, np.hstack([accel.values[head:stop], gyro_v]), nominal_rate=accel.nominal_rate
    )
    return InterpolationResult(synced, clipped_head=head, clipped_tail=len(a_t) - stop)
