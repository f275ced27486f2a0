"""Curve model, family classification and pseudo-arc reparametrization.

A curve is anything with ``dimension``, ``domain``, ``point(t)`` and
``derivatives(t, m)``; the symbolic :class:`Curve` evaluates parsed component
expressions through jets, while spline-backed and construction-derived curves
elsewhere implement the same surface.  ``classify`` checks membership in the
nullity-sequence family {0,1,2,2,1,0,...,0} on a grid, and
``pseudo_arc_reparam`` normalizes the parameter so the third derivative has
unit self-product.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.interpolate import make_interp_spline
from scipy.optimize import brentq

from .errors import (
    ClassificationError,
    DimensionMismatchError,
    ExprEvaluationError,
    FamilyError,
    InputError,
)
from .expr import Expr, VecJet, jet_compose, jet_eval, jet_invert, parse
from .metric import PseudoMetric, family_nullity_sequence

__all__ = [
    "Curve",
    "SampledCurve",
    "SplineCurve",
    "ReparametrizedCurve",
    "ArcLengthCurve",
    "MappedCurve",
    "ClassificationReport",
    "classify",
    "require_family",
    "pseudo_arc_reparam",
    "chebyshev_grid",
    "as_vec_jet",
]

DEFAULT_JET_BUDGET = 8
DEFAULT_CLASSIFY_POINTS = 17


def chebyshev_grid(a, b, m):
    """m Chebyshev-distributed points in (a, b), ascending."""
    k = np.arange(m)
    nodes = 0.5 * (a + b) + 0.5 * (b - a) * np.cos(np.pi * (2 * k + 1) / (2 * m))
    return np.sort(nodes)


def _check_in_domain(t, domain):
    a, b = domain
    slack = 1e-12 * (1.0 + abs(a) + abs(b))
    if not (a - slack <= t <= b + slack):
        raise InputError(f"parameter {t} outside domain [{a}, {b}]")


@dataclass(frozen=True, eq=False)
class Curve:
    """Symbolic curve: n component expressions over one parameter.

    ``jet_budget`` caps the derivative order served by :meth:`derivatives`;
    internal consumers that need deeper jets use :meth:`vec_jet` directly.
    """

    dimension: int
    components: tuple[Expr, ...]
    parameter: str = "s"
    domain: tuple[float, float] = (0.0, 1.0)
    jet_budget: int = DEFAULT_JET_BUDGET

    def __post_init__(self):
        if self.dimension < 4:
            raise DimensionMismatchError("curves need dimension >= 4")
        if len(self.components) != self.dimension:
            raise DimensionMismatchError(
                f"{len(self.components)} components for dimension {self.dimension}")
        if not self.domain[0] < self.domain[1]:
            raise InputError("domain must be a nonempty interval [a, b] with a < b")

    @classmethod
    def from_strings(cls, components, parameter="s", domain=(0.0, 1.0), **kwargs):
        exprs = tuple(parse(text, parameter) for text in components)
        return cls(len(exprs), exprs, parameter, tuple(domain), **kwargs)

    @property
    def metric(self):
        return PseudoMetric(self.dimension)

    def component_jets(self, t, order):
        jets = []
        for i, comp in enumerate(self.components):
            try:
                jets.append(jet_eval(comp, t, order))
            except ExprEvaluationError as exc:
                raise ExprEvaluationError(
                    f"component {i}: {exc}", exc.subexpression) from None
        return jets

    def vec_jet(self, t, order):
        return VecJet.from_jets(self.component_jets(t, order))

    def point(self, t):
        return np.array([jet_eval(c, t, 0).value for c in self.components])

    def derivatives(self, t, m):
        """alpha^(1), ..., alpha^(m) at t."""
        _check_in_domain(t, self.domain)
        if m > self.jet_budget:
            raise InputError(
                f"derivative order {m} exceeds jet budget {self.jet_budget}")
        vj = self.vec_jet(t, m)
        return [vj.derivative_value(k) for k in range(1, m + 1)]

    def precompose(self, inner, parameter="u", domain=None):
        """The curve t -> alpha(phi(t)) for a reparametrizing expression phi."""
        if isinstance(inner, str):
            inner = parse(inner, parameter)
        comps = tuple(c.substitute(inner) for c in self.components)
        return replace(self, components=comps, parameter=parameter,
                       domain=tuple(domain) if domain else self.domain)


@dataclass(frozen=True, eq=False)
class SampledCurve:
    """Curve samples on a strictly increasing parameter grid.

    ``derivative_stacks[i, k - 1]`` is the k-th derivative at ``grid[i]`` when
    stacks are present; all samples share one stack order.
    """

    grid: np.ndarray
    points: np.ndarray
    derivative_stacks: np.ndarray | None = None

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        points = np.asarray(self.points, dtype=float)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "points", points)
        if grid.ndim != 1 or points.ndim != 2 or len(grid) != len(points):
            raise InputError("grid and points must have matching lengths")
        if np.any(np.diff(grid) <= 0):
            raise InputError("grid must be strictly increasing")
        if self.derivative_stacks is not None:
            stacks = np.asarray(self.derivative_stacks, dtype=float)
            object.__setattr__(self, "derivative_stacks", stacks)
            if (stacks.ndim != 3 or stacks.shape[0] != len(grid)
                    or stacks.shape[2] != points.shape[1]):
                raise InputError("derivative stacks do not match the samples")

    @property
    def dimension(self):
        return self.points.shape[1]

    @property
    def domain(self):
        return (float(self.grid[0]), float(self.grid[-1]))


class SplineCurve:
    """Quintic-spline view of a SampledCurve; derivatives up to the spline order."""

    def __init__(self, sampled, order=5):
        if len(sampled.grid) <= order:
            raise InputError(f"need more than {order} samples for a degree-{order} spline")
        self._spline = make_interp_spline(sampled.grid, sampled.points, k=order)
        self._max_order = order
        self.dimension = sampled.dimension
        self.domain = sampled.domain

    def point(self, t):
        return np.asarray(self._spline(t), dtype=float)

    def derivatives(self, t, m):
        if m > self._max_order:
            raise InputError(
                f"spline-backed curve serves derivatives up to order {self._max_order}")
        return [np.asarray(self._spline.derivative(k)(t), dtype=float)
                for k in range(1, m + 1)]


def as_vec_jet(curve, t, order):
    """Vector jet of any curve-like object at t."""
    if hasattr(curve, "vec_jet"):
        return curve.vec_jet(t, order)
    return VecJet.from_derivatives(t, curve.point(t), curve.derivatives(t, order))


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClassificationReport:
    report: "SequenceReport"
    family: bool
    grid: tuple[float, ...]
    tolerance: float


def classify(curve, grid=None, tol=1e-9):
    """Sequence report of the curve, constant across the grid, plus family flag.

    The nullity and index sequences are computed from {alpha', ..., alpha^(n)}
    at every grid point and must agree everywhere; two disagreeing points are
    reported otherwise.  The family flag is True iff the nullity sequence is
    {0,1,2,2,1,0,...,0}.
    """
    n = curve.dimension
    metric = PseudoMetric(n)
    if grid is None:
        grid = chebyshev_grid(curve.domain[0], curve.domain[1], DEFAULT_CLASSIFY_POINTS)
    grid = [float(t) for t in grid]
    for t in grid:
        _check_in_domain(t, curve.domain)
    reports = []
    for t in grid:
        vj = as_vec_jet(curve, t, n)
        derivs = [vj.derivative_value(k) for k in range(1, n + 1)]
        reports.append(metric.sequence_report(derivs, tol))
    first = reports[0]
    for t, rep in zip(grid[1:], reports[1:]):
        if rep != first:
            raise ClassificationError(
                f"classification sequences differ between t={grid[0]} and t={t}: "
                f"{first.nullity_sequence} vs {rep.nullity_sequence}",
                points=(grid[0], t))
    family = first.nullity_sequence == family_nullity_sequence(n)
    return ClassificationReport(first, family, tuple(grid), tol)


def require_family(curve, grid=None, tol=1e-9):
    """classify() that raises FamilyError unless the curve is in the family."""
    report = classify(curve, grid, tol)
    if not report.family:
        raise FamilyError(
            f"curve has nullity sequence {report.report.nullity_sequence}, "
            f"not the supported family {family_nullity_sequence(curve.dimension)}")
    return report


# ---------------------------------------------------------------------------
# Pseudo-arc reparametrization
# ---------------------------------------------------------------------------

class CumulativeIntegral:
    """Cumulative integral of a positive integrand on [a, b].

    Composite Simpson on a uniform fine grid (each subinterval uses its
    midpoint), with a 5-point Gauss-Legendre tail for off-node queries.
    Strict monotonicity of the primitive makes inversion by bracketing safe.
    """

    _GL_NODES = np.array([-0.9061798459386640, -0.5384693101056831, 0.0,
                          0.5384693101056831, 0.9061798459386640])
    _GL_WEIGHTS = np.array([0.2369268850561891, 0.4786286704993665,
                            0.5688888888888889, 0.4786286704993665,
                            0.2369268850561891])

    def __init__(self, f, a, b, intervals=512):
        if intervals < 1:
            raise InputError("cumulative integral needs at least one interval")
        self.f = f
        self.a = float(a)
        self.b = float(b)
        self.nodes = np.linspace(a, b, intervals + 1)
        h = self.nodes[1] - self.nodes[0]
        values = np.array([f(t) for t in self.nodes])
        mids = np.array([f(t) for t in self.nodes[:-1] + h / 2])
        pieces = h / 6.0 * (values[:-1] + 4.0 * mids + values[1:])
        self.cumulative = np.concatenate(([0.0], np.cumsum(pieces)))

    def __call__(self, t):
        t = float(t)
        i = int(np.clip(np.searchsorted(self.nodes, t, side="right") - 1,
                        0, len(self.nodes) - 2))
        t0 = self.nodes[i]
        if t == t0:
            return float(self.cumulative[i])
        half = 0.5 * (t - t0)
        mid = t0 + half
        tail = half * np.dot(self._GL_WEIGHTS,
                             [self.f(mid + half * x) for x in self._GL_NODES])
        return float(self.cumulative[i] + tail)

    @property
    def total(self):
        return float(self.cumulative[-1])

    def solve(self, target):
        """Parameter t with integral(t) = target."""
        slack = 1e-12 * (1.0 + self.total)
        if not -slack <= target <= self.total + slack:
            raise InputError(f"target {target} outside the table range [0, {self.total}]")
        target = min(max(target, 0.0), self.total)
        i = int(np.clip(np.searchsorted(self.cumulative, target) - 1,
                        0, len(self.nodes) - 2))
        lo, hi = self.nodes[i], self.nodes[i + 1]
        flo, fhi = self(lo) - target, self(hi) - target
        if flo >= 0.0:
            return float(lo)
        if fhi <= 0.0:
            return float(hi)
        return float(brentq(lambda t: self(t) - target, lo, hi, xtol=1e-14))


class _MonotoneReparamCurve:
    """View of a curve in a new parameter with a positive jet-expressible rate.

    The monotone table integrates the subclass rate over the base domain;
    point and derivative queries invert it, then transplant the jets of the
    base curve through series reversion of the rate's antiderivative jet.
    Exact up to table accuracy.  ``origin`` anchors the new parameter at the
    left end of the base domain.
    """

    _rate_name = "rate"
    _origin_from_domain = False

    def __init__(self, base, intervals=512, origin=None):
        self.base = base
        self.dimension = base.dimension
        self._metric = PseudoMetric(base.dimension)
        if origin is None:
            origin = base.domain[0] if self._origin_from_domain else 0.0
        self.origin = float(origin)
        a, b = base.domain
        probe = np.linspace(a, b, 2 * intervals + 1)
        vals = np.array([self._rate_square(t) for t in probe])
        if np.any(vals <= 0.0):
            bad = probe[int(np.argmin(vals))]
            raise FamilyError(
                f"{self._rate_name} = {vals.min():.3e} <= 0 near t={bad}: "
                "monotone reparametrization impossible")
        self._table = CumulativeIntegral(
            lambda t: self._rate_square(t) ** self._rate_power, a, b, intervals)
        self.domain = (self.origin, self.origin + self._table.total)

    def _rate_square(self, t):
        raise NotImplementedError

    def _rate_square_jet(self, t, order):
        raise NotImplementedError

    def new_parameter_of(self, t):
        return self.origin + self._table(t)

    def parameter_of(self, s):
        return self._table.solve(float(s) - self.origin)

    def point(self, s):
        return np.asarray(self.base.point(self.parameter_of(s)), dtype=float)

    def vec_jet(self, s, order):
        t = self.parameter_of(s)
        g = self._rate_square_jet(t, order + 1)
        rate = (g.log() * self._rate_power).exp()
        phi = rate.antiderivative(float(s)).truncate(order)
        psi = jet_invert(phi)
        base_jets = as_vec_jet(self.base, t, order)
        comps = [jet_compose(base_jets.component(i), psi)
                 for i in range(self.dimension)]
        return VecJet.from_jets(comps)

    def derivatives(self, s, m):
        vj = self.vec_jet(s, m)
        return [vj.derivative_value(k) for k in range(1, m + 1)]


class ReparametrizedCurve(_MonotoneReparamCurve):
    """Pseudo-arc view: the new parameter integrates <alpha''',alpha'''>^(1/6),
    normalizing the third derivative to unit self-product.

    The origin defaults to the domain start, so a curve that is already
    pseudo-arc parametrized reparametrizes to the identity map.
    """

    _rate_power = 1.0 / 6.0
    _rate_name = "<alpha''', alpha'''>"
    _origin_from_domain = True

    def pseudo_arc_of(self, t):
        return self.new_parameter_of(t)

    def _rate_square(self, t):
        vj = as_vec_jet(self.base, t, 3)
        a3 = VecJet(t, vj.coeffs[3:4] * 6.0)
        return self._metric.inner_jet(a3, a3).value

    def _rate_square_jet(self, t, order):
        vj = as_vec_jet(self.base, t, order + 3)
        a3 = vj.differentiate().differentiate().differentiate()
        return self._metric.inner_jet(a3, a3)


class ArcLengthCurve(_MonotoneReparamCurve):
    """Unit-speed view of a spacelike curve: the new parameter integrates |c'|."""

    _rate_power = 0.5
    _rate_name = "<c', c'>"

    def arc_length_of(self, t):
        return self.new_parameter_of(t)

    def _rate_square(self, t):
        d1 = np.asarray(self.base.derivatives(t, 1)[0], dtype=float)
        return self._metric.inner(d1, d1)

    def _rate_square_jet(self, t, order):
        d1 = as_vec_jet(self.base, t, order + 1).differentiate()
        return self._metric.inner_jet(d1, d1)


class MappedCurve:
    """Exact parameter substitution s -> base(g(s)) for a symbolic map g.

    Unlike the quadrature-backed reparametrizations this composes jets
    directly, so it costs nothing beyond the base curve's own evaluations;
    useful when the wanted parameter change has a closed form.
    """

    def __init__(self, base, mapping, domain, parameter="s"):
        self.base = base
        self.dimension = base.dimension
        self.mapping = parse(mapping, parameter) if isinstance(mapping, str) else mapping
        self.domain = (float(domain[0]), float(domain[1]))
        for s in self.domain:
            _check_in_domain(jet_eval(self.mapping, s, 0).value, base.domain)

    def point(self, s):
        return np.asarray(self.base.point(jet_eval(self.mapping, s, 0).value),
                          dtype=float)

    def vec_jet(self, s, order):
        g = jet_eval(self.mapping, float(s), order)
        base_jets = as_vec_jet(self.base, g.value, order)
        comps = [jet_compose(base_jets.component(i), g)
                 for i in range(self.dimension)]
        return VecJet.from_jets(comps)

    def derivatives(self, s, m):
        vj = self.vec_jet(s, m)
        return [vj.derivative_value(k) for k in range(1, m + 1)]


@dataclass(frozen=True)
class ReparamResult:
    """Monotone table, resampled curve and the exact reparametrized view."""

    table_t: np.ndarray
    table_s: np.ndarray
    sampled: SampledCurve
    curve: ReparametrizedCurve
    unit_speed_defect: float


def pseudo_arc_reparam(curve, grid_density=129, tol=1e-9, classify_grid=None):
    """Resample a family curve at uniform pseudo-arc values.

    Returns the monotone table sbar(t), the resampled curve (points are exact
    evaluations at the inverted parameters; a quintic spline over them is the
    interpolation layer for derivative checks) and the max deviation of
    <d^3 alpha/ds^3, d^3 alpha/ds^3> from 1 measured on that spline.
    """
    require_family(curve, classify_grid, tol)
    rep = ReparametrizedCurve(curve, intervals=max(512, 4 * grid_density))
    table_t = np.linspace(curve.domain[0], curve.domain[1], grid_density)
    table_s = np.array([rep.pseudo_arc_of(t) for t in table_t])
    sbar_grid = np.linspace(rep.domain[0], rep.domain[1], grid_density)
    params = np.array([rep.parameter_of(s) for s in sbar_grid])
    points = np.stack([np.asarray(curve.point(t), dtype=float) for t in params])
    stacks = np.stack([rep.derivatives(float(s), 3) for s in sbar_grid])
    sampled = SampledCurve(sbar_grid, points, stacks)
    metric = PseudoMetric(curve.dimension)
    spline = make_interp_spline(sbar_grid, points, k=5)
    d3 = spline.derivative(3)
    interior = sbar_grid[3:-3]
    defect = max(abs(metric.inner(d3(s), d3(s)) - 1.0) for s in interior)
    return ReparamResult(table_t, table_s, sampled, rep, float(defect))
