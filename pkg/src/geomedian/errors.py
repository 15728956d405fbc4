"""Exception hierarchy shared by all solver modules."""


class GeoMedianError(Exception):
    """Base class for errors raised by geomedian."""


class InvalidArgumentError(GeoMedianError, ValueError):
    """Malformed input: bad shapes, non-finite values, out-of-range indices."""


class AtVertexError(GeoMedianError, ValueError):
    """The evaluation point sits on an anchor, where the objective is not differentiable.

    Use :func:`geomedian.subdiff.certify` or :func:`geomedian.subdiff.resultant`
    to reason about optimality at an anchor.
    """

    def __init__(self, index, message=None):
        self.index = index
        super().__init__(
            message
            or f"point coincides with anchor {index}; the objective is not "
            "differentiable there (use geomedian.subdiff instead)"
        )


class UnsupportedError(GeoMedianError):
    """The request is well-formed but outside what the routine handles."""


class NumericDegeneracyError(GeoMedianError, ArithmeticError):
    """A geometric construction became numerically singular."""
