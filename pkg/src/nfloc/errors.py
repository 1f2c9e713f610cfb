"""Exception types shared across the simulator."""


class NflocError(Exception):
    """Base class for all library errors."""


class ZeroDistance(NflocError):
    """A geometric quantity collapsed to zero length."""


class IndexOutOfRange(NflocError):
    """Subcarrier or beam index outside the configured range."""


class DimensionMismatch(NflocError):
    """Operands describe incompatible array, codebook, or subcarrier sizes."""


class InvalidRegion(NflocError):
    """Service region bounds are empty or unphysical."""


class InvalidThreshold(NflocError):
    """Beam-weight floor outside [0, 1]."""


class AllBeamsSuppressed(NflocError):
    """Every beam weight fell below the configured floor."""


class SingularModel(NflocError):
    """Fisher information is rank deficient beyond the nuisance block."""


class ParseError(NflocError):
    """Configuration file could not be parsed."""


class ValidationError(NflocError):
    """Configuration violates one or more invariants."""
