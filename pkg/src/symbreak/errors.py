"""Exception types shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for all symbreak errors."""


class SizeCapError(ToolkitError):
    """Requested group or representation exceeds the supported order cap."""


class GroupMismatchError(ToolkitError):
    """Operands are defined over different groups."""


class RepresentationError(ToolkitError):
    """Matrix table fails homomorphism / identity / orthogonality validation."""


class FaithfulnessError(ToolkitError):
    """Operation requires a faithful representation."""


class ToleranceInconsistencyError(ToolkitError):
    """Near-stabilizer set is not closed under the group product: the input
    is numerically ambiguous at the given tolerance."""


class RankInstabilityError(ToolkitError):
    """Singular values cluster around the null-space threshold, so the solved
    rank is not trustworthy."""


class DivergenceError(ToolkitError):
    """Training loss became non-finite."""


class ConfigError(ToolkitError):
    """Run configuration is missing, unparseable, or inconsistent."""


class DataFormatError(ToolkitError):
    """An exported artifact (basis CSV, manifest, checkpoint) is corrupted."""
