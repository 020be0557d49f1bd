"""Exception types raised across the package.

Every error derives from :class:`MoveletError`, which is itself a
``ValueError`` so callers that only care about bad input can catch that.
"""


class MoveletError(ValueError):
    pass


# series / ingest
class NonMonotoneTimestamps(MoveletError):
    pass


class NonFiniteValue(MoveletError):
    pass


class MalformedRow(MoveletError):
    pass


class OverlappingIntervals(MoveletError):
    pass


class ActivityAbsent(MoveletError):
    pass


# sync
class OutOfRange(MoveletError):
    pass


class NoOverlap(MoveletError):
    pass


# movelets / classify
class SeriesTooShort(MoveletError):
    pass


class LengthMismatch(MoveletError):
    pass


class ChannelMismatch(MoveletError):
    pass


class EmptyDictionary(MoveletError):
    pass


class MissingSensor(MoveletError):
    pass


class EmptyTimeline(MoveletError):
    pass


# evaluate
class MissingActivity(MoveletError):
    pass


class ZeroBaseline(MoveletError):
    pass


# pipeline / cli
class ConfigInvalid(MoveletError):
    pass


class DatasetMissing(MoveletError):
    pass


class ArtifactMissing(MoveletError):
    pass
