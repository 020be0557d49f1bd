"""Sliding-window movelets and the discrepancy between them."""

from __future__ import annotations

import dataclasses

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .core import WINDOW, Movelet
from .errors import ChannelMismatch, LengthMismatch, SeriesTooShort


@dataclasses.dataclass(frozen=True)
class DiscrepancyValue:
    value: float
    channels: int

    def __float__(self) -> float:
        return self.value


def window_stack(values, n: int = WINDOW) -> np.ndarray:
    """All length-``n`` windows of a ``(c, T)`` array as a ``(T - n + 1, c, n)`` view."""
    values = np.asarray(values, dtype=float)
    if values.ndim != 2:
        raise LengthMismatch(f"expected a (channels, samples) array, got shape {values.shape}")
    if n < 1:
        raise ValueError("window length must be positive")
    if values.shape[1] < n:
        raise SeriesTooShort(f"{values.shape[1]} samples is shorter than the window of {n}")
    return np.moveaxis(sliding_window_view(values, n, axis=1), 1, 0)


def extract_movelets(values, timestamps, n: int = WINDOW) -> list[Movelet]:
    """Slide an ``n``-sample window one sample at a time along ``values``.

    Parameters
    ----------
    values : array_like, shape (c, T)
        One row per channel.
    timestamps : array_like, shape (T,)
    n : int
        Samples per movelet.

    Returns
    -------
    list of Movelet
        ``T - n + 1`` movelets; movelet ``i`` covers samples ``[i, i + n)``.
    """
    stack = window_stack(values, n)
    t = np.asarray(timestamps, dtype=float)
    if t.shape != (np.shape(values)[1],):
        raise LengthMismatch(f"{t.shape[0]} timestamps for {np.shape(values)[1]} samples")
    t_stack = sliding_window_view(t, n)
    return [Movelet(i, stack[i], t_stack[i]) for i in range(stack.shape[0])]


def axis_distance(a, b) -> float:
    """Euclidean distance between two equal-length vectors."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise LengthMismatch(f"cannot compare vectors of shape {a.shape} and {b.shape}")
    return float(_norms(a - b))


def _as_values(m) -> np.ndarray:
    return m.values if isinstance(m, Movelet) else np.asarray(m, dtype=float)


def discrepancy(m1, m2) -> DiscrepancyValue:
    """Per-channel Euclidean distance averaged over the channels.

    Accepts :class:`Movelet` objects or raw ``(c, n)`` arrays. With three
    channels this is the single-sensor discrepancy; with six (accelerometer
    then gyroscope) the joint-sensor one.
    """
    a, b = _as_values(m1), _as_values(m2)
    if a.ndim != 2 or b.ndim != 2:
        raise LengthMismatch("movelets must be (channels, samples) arrays")
    if a.shape[0] != b.shape[0]:
        raise ChannelMismatch(f"{a.shape[0]} vs {b.shape[0]} channels")
    if a.shape[1] != b.shape[1]:
        raise LengthMismatch(f"{a.shape[1]} vs {b.shape[1]} samples")
    return DiscrepancyValue(float(pairwise_discrepancy(a[None], b[None])[0, 0]), a.shape[0])


def pairwise_discrepancy(tests: np.ndarray, refs: np.ndarray) -> np.ndarray:
    """Discrepancy between every test and every reference movelet.

    ``tests`` is ``(B, c, n)`` and ``refs`` is ``(M, c, n)``; the result is
    ``(B, M)``.
    """
    diff = tests[:, None, :, :] - refs[None, :, :, :]
    return _norms(diff).sum(axis=2) / tests.shape[1]


def _norms(diff: np.ndarray) -> np.ndarray:
    """Euclidean norm over the last axis, scaled so tiny differences do not
    underflow to zero when squared."""
    scale = np.abs(diff).max(axis=-1, keepdims=True)
    safe = np.where(scale > 0, scale, 1.0)
    u = diff / safe
    return np.sqrt(np.einsum("...n,...n->...", u, u)) * safe[..., 0]
