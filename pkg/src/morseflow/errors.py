"""Exception taxonomy shared across the package.

Grouped by the area that raises them; everything derives from
MorseflowError so callers can catch coarsely.
"""


class MorseflowError(Exception):
    """Base class for all engine errors."""


# exact linear algebra

class DimensionMismatch(MorseflowError):
    """Operands are indexed by incompatible generator sets."""


class NotADifferential(MorseflowError):
    """Square of the proposed boundary operator is nonzero."""


class NonUnitError(MorseflowError):
    """Inversion requested for a ring element that is not a unit."""


# diagram geometry

class InvalidTuple(MorseflowError):
    """Operation requires a structurally valid diagram and got one that fails validation."""


class VerticalTangency(MorseflowError):
    """Front has a point with y' = 0 but z' != 0; no Legendrian lift exists there."""


class NonIsolatedCusp(MorseflowError):
    """Cusp locus (y' = 0) is not isolated among the samples."""


# event algebra

class NonTriangularDelta(MorseflowError):
    """Jump data has an entry that violates the strict action ordering."""


class NonUnitPivot(MorseflowError):
    """Birth or death pivot entry is not invertible in the coefficient ring."""


class CycleConditionViolated(MorseflowError):
    """New birth column is not annihilated by the incoming boundary operator."""


class ActionConstraintViolated(MorseflowError):
    """Birth column entry refers to a generator at or below the birth level."""


class ConstraintViolated(MorseflowError):
    """Zero constraints around a death pair do not hold in the incoming matrix."""


class EvolutionError(MorseflowError):
    """Event schedule is inconsistent with the diagram (indices, parameters, vertices)."""


# class tracking

class DegenerateParameter(MorseflowError):
    """Parameter value sits exactly on an event or vertex."""


class InvalidWindow(MorseflowError):
    """Window boundaries intersect the diagram or are malformed."""


class NonNestedLadder(MorseflowError):
    """Window ladder is not nested (floors descending, ceilings ascending)."""


class VerificationFailed(MorseflowError):
    """Constructed comparison maps fail their defining identities."""


class NotACycle(MorseflowError):
    """Chain supplied as a class representative is not a cycle."""


# escape analysis

class NonMonotoneTail(MorseflowError):
    """Trace heights outside the exclusion interval are not monotone."""


class UnsupportedFamily(MorseflowError):
    """No closed-form antiderivative is registered for this growth bound."""


class InvalidParameters(MorseflowError):
    """Growth bound or cascade parameters out of their legal range."""


# model classification

class MissingClassData(MorseflowError):
    """Verdict requires data (initial spectral value, kappa) that was not supplied."""


class OutOfRange(MorseflowError):
    """Model parameter outside the range where the classification applies."""


# scenario files

class ScenarioError(MorseflowError):
    """Base for scenario file problems; carries a line number when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)


class ScenarioSyntaxError(ScenarioError):
    """Input is not well-formed scenario text."""


class ScenarioSemanticError(ScenarioError):
    """Well-formed text with inconsistent content."""
