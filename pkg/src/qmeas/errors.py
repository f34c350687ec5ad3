"""Exception types shared across the package.

The CLI maps these onto distinct exit codes, so library code should raise
the most specific class that applies.
"""


class QmeasError(Exception):
    """Base class for all package errors."""


class ConfigError(QmeasError):
    """Bad user input: malformed file, unknown family, value out of domain."""


class CompletenessError(QmeasError):
    """Kraus operators do not sum to the identity within tolerance."""


class ImpossibleOutcomeError(QmeasError):
    """Conditioning on an outcome whose probability is zero for the input."""


class NotRealizableError(QmeasError):
    """Measurement cannot be realized by the diagonal waveplate construction."""


class InfeasibleTripleError(QmeasError):
    """(G, F, R) triple lies outside the region any measurement can reach."""


class InsufficientDataError(QmeasError):
    """Not enough data to perform a fit or reconstruction."""
