"""Bundled demonstration data: a null quintic in the 5-dimensional index-2 space.

The curve is pseudo-arc parametrized with k1 = k2 = 0, so every theorem-level
construction applies to it; its frame has polynomial closed forms, which makes
it the reference dataset for the test suite and a convenient CLI input
(``nullcartan fixture``).
"""

from .curve import Curve

NULL_QUINTIC = {
    "dimension": 5,
    "parameter": "s",
    "components": [
        "(s - s^5)/(4*sqrt(15))",
        "(s^2 + s^4)/(4*sqrt(6))",
        "s^3/6",
        "(s^2 - s^4)/(4*sqrt(6))",
        "(s + s^5)/(4*sqrt(15))",
    ],
    "domain": [-0.2, 1.2],
}


def null_quintic_curve():
    """The bundled curve as a :class:`~nullcartan.curve.Curve`."""
    return Curve.from_strings(NULL_QUINTIC["components"],
                              parameter=NULL_QUINTIC["parameter"],
                              domain=tuple(NULL_QUINTIC["domain"]))
