"""Exception hierarchy.

Every domain error derives from :class:`HtkError`.  The CLI maps the three
families below onto exit codes: input-data errors (1), IO/config errors (2)
and mathematical infeasibility (3).
"""


class HtkError(Exception):
    """Base class for all library errors."""


class DataError(HtkError):
    """Bad input data (exit code 1)."""


class ConfigError(HtkError):
    """Bad configuration or unreadable file (exit code 2)."""


class InfeasibilityError(HtkError):
    """A mathematical construction cannot be completed (exit code 3)."""


# grammar
class MalformedLabel(DataError):
    pass


class UnknownMainSymbol(DataError):
    pass


class ModifierRuleViolation(DataError):
    pass


# taxonomy
class DuplicateLabel(DataError):
    pass


class DanglingMixtureParent(DataError):
    pass


class LabelNotInTaxonomy(DataError):
    pass


class MixtureNotAllowed(DataError):
    pass


# embed
class InfeasibleHierarchy(InfeasibilityError):
    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class SingularStep(InfeasibilityError):
    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class ParentNotEmbedded(InfeasibilityError):
    pass


class SameMainSymbol(DataError):
    pass


# cluster
class EmptyRetainedSet(InfeasibilityError):
    pass


class OverrideTargetNotRetained(DataError):
    pass


# decode
class ZeroVector(DataError):
    pass


class DimensionMismatch(InfeasibilityError):
    pass


class KOutOfRange(DataError):
    pass


# metrics
class NonMonotone(DataError):
    pass


class NoTerminator(DataError):
    pass


class EmptySampleSet(DataError):
    pass


class LengthMismatch(DataError):
    pass


class NegativeLoss(DataError):
    pass


class NonPositiveEpochCount(DataError):
    pass


class UnknownLabel(DataError):
    pass


# simgen
class InvalidConfig(ConfigError):
    pass


class EmptyTrainingSet(DataError):
    pass


class TooFewRecords(DataError):
    pass


# evaluation
class RecordMismatch(InfeasibilityError):
    """A sample record disagrees with the embeddings or taxonomy."""

    def __init__(self, message, record_id=None):
        super().__init__(f"record {record_id}: {message}" if record_id is not None else message)
        self.record_id = record_id
