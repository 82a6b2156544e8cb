"""Exception hierarchy.

Every failure mode that a caller can act on gets its own class; all of them
derive from :class:`GermlabError` so batch drivers can catch one type.
"""


class GermlabError(Exception):
    """Base class for all errors raised by this package."""


class NonSquare(GermlabError):
    """A square matrix was required."""


class NonFinite(GermlabError):
    """Input contains NaN or infinite entries."""


class DimensionMismatch(GermlabError):
    """Operand shapes are incompatible."""


class NegativeEigenvalue(GermlabError):
    """A matrix that must be a positive semidefinite Gram has an eigenvalue
    below the negative tolerance band."""


class ResidualTooLarge(GermlabError):
    """A residual-checked linear solve failed, signalling an ill-posed
    construction (for instance a germ that is not conditionally positive
    definite)."""


class UnknownKind(GermlabError):
    """Unrecognized canonical algebra or noise kind."""


class AxiomViolation(GermlabError):
    """An algebraic structure failed its axioms beyond tolerance."""


class NonCommutingGauge(GermlabError):
    """The Hermitian gauge operator fails to commute with the reference
    representation."""


class NegativeDissipator(GermlabError):
    """The dissipation Gram of a germ is not positive semidefinite, so no
    dilation exists."""


class FactorizationDefect(GermlabError):
    """The assembled indefinite-metric representation fails to reproduce a
    germ block within tolerance."""


class UnsupportedAlgebra(GermlabError):
    """The Monte Carlo driver only handles canonical noise algebras and
    their direct sums."""


class BadStep(GermlabError):
    """Invalid time discretization parameters."""


class ParseError(GermlabError):
    """Input file is not valid JSON."""


class SchemaError(GermlabError):
    """Input JSON misses required fields or carries unknown ones."""


class InvariantError(GermlabError):
    """Parsed value violates a type invariant; the message names the
    offending field."""
