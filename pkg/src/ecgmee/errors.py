"""Exception types shared across the toolkit.

Every error callers are expected to branch on gets its own class; generic
misuse (wrong argument types, non-increasing peak lists, ...) raises plain
ValueError.
"""


class EcgMeeError(Exception):
    """Base class for all toolkit errors."""


# --- record loading / validation ---

class MalformedHeader(EcgMeeError):
    """Record or sidecar file is structurally invalid (header, fields, fs)."""


class LengthMismatch(EcgMeeError):
    """Parallel sequences (leads, flag/label lists) have unequal lengths."""


class NonMonotonicAnnotations(EcgMeeError):
    """Annotation sample indices are not strictly increasing or lie out of range."""


# --- segmentation ---

class LeadNotFound(EcgMeeError):
    """Requested lead name is not present in the record."""


class RecordTooShort(EcgMeeError):
    """Record is too short for the requested operation."""


# --- entropy metrics ---

class SequenceTooShort(EcgMeeError):
    """Input sequence shorter than the metric's minimum length."""


class UndefinedEntropy(EcgMeeError):
    """A match count of zero makes the entropy value undefined (log of zero)."""


class NonpositiveTolerance(EcgMeeError):
    """Fuzzy entropy requires a strictly positive tolerance."""


class DegenerateAmplitude(EcgMeeError):
    """max(x) == min(x); the [0, 1] normalization is undefined."""


# --- screening ---

class EmptyBeatList(EcgMeeError):
    """An operation requiring at least one beat received none."""


class NonpositiveRR(EcgMeeError):
    """RR intervals must be strictly positive."""


class NotApplicable(EcgMeeError):
    """The adaptive threshold is undefined (equal RR intervals)."""


# --- diversity / quality ---

class TooFewBeats(EcgMeeError):
    """Not enough beats for a record-level computation."""


class EmptyGroup(EcgMeeError):
    """Pruning received an empty record group."""


class TargetOutOfRange(EcgMeeError):
    """Random-prune target count outside [1, group size]."""
