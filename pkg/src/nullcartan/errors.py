"""Exception hierarchy.

Grouping mirrors the CLI exit-code contract: input problems (bad files,
unparsable expressions, wrong dimensions), violated theorem hypotheses or
family membership, and numerical breakdowns (degenerate curvatures, step-size
failures).
"""


class NullCartanError(Exception):
    """Base class for all library errors."""


class InputError(NullCartanError, ValueError):
    """Malformed input file or argument."""


class DimensionMismatchError(InputError):
    """Vector or component count does not match the ambient dimension."""


class ExprSyntaxError(InputError):
    """Expression text failed to parse.

    ``position`` is the 0-based column of the offending token.
    """

    def __init__(self, message, position):
        super().__init__(f"{message} (column {position})")
        self.position = position


class ExprEvaluationError(NullCartanError, ArithmeticError):
    """Expression hit a domain violation during jet evaluation."""

    def __init__(self, message, subexpression):
        super().__init__(f"{message} in '{subexpression}'")
        self.subexpression = subexpression


class ClassificationError(NullCartanError):
    """Derivative system unusable for the classification sequences.

    Either a linearly dependent prefix (``prefix_length`` set) or sequences
    that disagree between two grid points (``points`` set).
    """

    def __init__(self, message, prefix_length=None, points=None):
        super().__init__(message)
        self.prefix_length = prefix_length
        self.points = points


class DegenerateBasisError(NullCartanError):
    """Determinant-based test was ambiguous or the system rank-deficient."""


class FamilyError(NullCartanError):
    """Curve is not in the supported nullity-sequence family."""


class HypothesisError(NullCartanError):
    """A theorem hypothesis fails on the requested grid.

    Distinct from a negative verdict: the construction/test does not apply.
    """

    def __init__(self, message, condition=None, location=None):
        super().__init__(message)
        self.condition = condition
        self.location = location


class FrameDegeneracyError(NullCartanError):
    """A frame normalizer curvature fell below tolerance.

    ``index`` is the curvature index that vanished; ``partial`` holds the
    frame data extracted up to that point, when available.
    """

    def __init__(self, message, index=None, partial=None):
        super().__init__(message)
        self.index = index
        self.partial = partial


class SingularRecursionError(NullCartanError):
    """Division by a vanishing curvature inside the sphere recursion."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class StepSizeError(NullCartanError):
    """Integration step too coarse for the requested frame-defect budget."""
