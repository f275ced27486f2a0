"""Theorem-level constructions and the Frenet-system curve synthesizer.

Covers the Bertrand-mate construction and its k1 = k2 = 0 gate, the
pseudo-spherical test built on the a_i recursion, the evolute/involute
correspondence in dimension six, and ``synthesize``, which integrates the
full first-order Frenet system (curve plus frame) with classical RK4 from a
frame that satisfies the pairing relations exactly.  Synthesized curves are
pseudo-arc parametrized by construction and expose exact derivatives of any
order through the Frenet chain, which makes them the test oracle for
everything else here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .curve import (
    CumulativeIntegral,
    ReparametrizedCurve,
    SampledCurve,
    SplineCurve,
    _check_in_domain,
    as_vec_jet,
    chebyshev_grid,
    require_family,
)
from .errors import (
    DimensionMismatchError,
    HypothesisError,
    InputError,
    SingularRecursionError,
    StepSizeError,
)
from .expr import Expr, Jet, VecJet, jet_eval, parse
from .frame import frame_jets
from .metric import PseudoMetric

__all__ = [
    "CurvatureProfile",
    "FrameState",
    "standard_initial_frame",
    "FrenetCurve",
    "synthesize",
    "OffsetCurve",
    "BertrandVerdict",
    "PairReport",
    "BertrandMateResult",
    "bertrand_check",
    "bertrand_mate",
    "sphere_coefficients",
    "SphereReport",
    "pseudo_spherical_test",
    "EvoluteCurve",
    "EvoluteResult",
    "evolute",
    "InvoluteCurve",
    "InvoluteResult",
    "involute",
    "InvoluteFrameReport",
    "involute_frame_check",
]

MIN_CURVATURE = 1e-8


# ---------------------------------------------------------------------------
# Curvature profiles and initial frames
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CurvatureProfile:
    """Prescribed curvature functions k1..k_{n-3} in the pseudo-arc parameter."""

    dimension: int
    curvatures: tuple[Expr, ...]
    parameter: str = "t"

    def __post_init__(self):
        if self.dimension < 5:
            raise DimensionMismatchError("curvature profiles need dimension >= 5")
        if len(self.curvatures) != self.dimension - 3:
            raise DimensionMismatchError(
                f"dimension {self.dimension} takes {self.dimension - 3} curvature "
                f"functions, got {len(self.curvatures)}")

    @classmethod
    def from_strings(cls, dimension, texts, parameter="t"):
        return cls(dimension, tuple(parse(t, parameter) for t in texts), parameter)

    def jets(self, t, order):
        return [jet_eval(k, t, order) for k in self.curvatures]

    def values(self, t):
        return np.array([jet_eval(k, t, 0).value for k in self.curvatures])


@dataclass(frozen=True)
class FrameState:
    """Curve point plus full frame, the integration state of the Frenet system."""

    alpha: np.ndarray
    L1: np.ndarray
    L2: np.ndarray
    N1: np.ndarray
    N2: np.ndarray
    W: tuple[np.ndarray, ...]

    def as_matrix(self):
        return np.stack([self.alpha, self.L1, self.L2, self.N1, self.N2, *self.W])

    @classmethod
    def from_matrix(cls, M):
        return cls(M[0], M[1], M[2], M[3], M[4], tuple(M[5:]))

    def gram_defect(self, metric):
        return float(_gram_defect(self.as_matrix(), metric.signs))


def _expected_frame_gram(n):
    E = np.zeros((n, n))
    E[0, 2] = E[2, 0] = 1.0   # <L1, N1>
    E[1, 3] = E[3, 1] = -1.0  # <L2, N2>
    for j in range(n - 4):
        E[4 + j, 4 + j] = 1.0
    return E


def _gram_defect(state_matrix, signs):
    F = state_matrix[1:]
    G = (F * signs) @ F.T
    return np.max(np.abs(G - _expected_frame_gram(len(F))))


def standard_initial_frame(n, alpha=None):
    """Frame satisfying every pairing relation exactly in the standard metric.

    L1 = e1+e3, N1 = (-e1+e3)/2, L2 = e2+e4, N2 = (e2-e4)/2, W = (e5, e6, ...).
    """
    e = np.eye(n)
    return FrameState(
        np.zeros(n) if alpha is None else np.asarray(alpha, dtype=float),
        e[0] + e[2], e[1] + e[3], (-e[0] + e[2]) / 2, (e[1] - e[3]) / 2,
        tuple(e[4 + j] for j in range(n - 4)))


# ---------------------------------------------------------------------------
# Frenet-system synthesis
# ---------------------------------------------------------------------------

class FrenetCurve:
    """Curve produced by integrating the Frenet system with prescribed curvatures.

    Derivatives of any order are exact given the stored frame: the coefficient
    vector of alpha^(k) in the frame basis evolves by the Frenet rules with
    curvature jets, so only the RK4 error of the frame samples enters.
    """

    def __init__(self, profile, interval, step=1e-3, initial=None,
                 defect_limit=1e-4):
        if step <= 0:
            raise InputError("step must be positive")
        a, b = float(interval[0]), float(interval[1])
        if not a < b:
            raise InputError("interval must satisfy a < b")
        n = profile.dimension
        self.profile = profile
        self.dimension = n
        self.domain = (a, b)
        self.step = float(step)
        self._metric = PseudoMetric(n)
        state = (initial or standard_initial_frame(n)).as_matrix().astype(float)
        if state.shape != (n + 1, n):
            raise DimensionMismatchError(
                f"initial state must be ({n + 1}, {n}), got {state.shape}")
        steps = int(math.ceil((b - a) / step - 1e-12))
        ts = [a]
        states = [state.copy()]
        defect = _gram_defect(state, self._metric.signs)
        t = a
        for _ in range(steps):
            h = min(step, b - t)
            state = self._rk4_step(t, state, h)
            t = t + h
            ts.append(t)
            states.append(state.copy())
            defect = max(defect, _gram_defect(state, self._metric.signs))
        self._ts = np.array(ts)
        self._states = np.stack(states)
        self.max_gram_defect = float(defect)
        if defect > defect_limit:
            raise StepSizeError(
                f"frame Gram defect {defect:.3e} exceeds {defect_limit:.1e}; "
                f"halve the step (current {step})")

    # -- integration ---------------------------------------------------------

    def _rhs(self, t, state):
        n = self.dimension
        k = np.concatenate(([0.0], self.profile.values(t)))  # 1-based
        L1, L2, N1, N2 = state[1], state[2], state[3], state[4]
        W = state[5:]
        d = np.zeros_like(state)
        d[0] = L1
        d[1] = L2
        d[2] = W[0]
        d[3] = k[2] * L2 + (k[3] * W[1] if n >= 6 else 0.0)
        d[4] = k[2] * L1 + N1 - k[1] * W[0]
        d[5] = -k[1] * L2 + N2
        for i in range(4, n - 1):  # W_i rows, i = 4..n-2
            j = i - 3
            if i == 4:
                dW = -k[3] * L1
                if n >= 7:
                    dW = dW + k[4] * W[2]
            else:
                dW = -k[i - 1] * W[j - 1]
                if i + 1 <= n - 2:
                    dW = dW + k[i] * W[j + 1]
            d[5 + j] = dW
        return d

    def _rk4_step(self, t, state, h):
        k1 = self._rhs(t, state)
        k2 = self._rhs(t + h / 2, state + h / 2 * k1)
        k3 = self._rhs(t + h / 2, state + h / 2 * k2)
        k4 = self._rhs(t + h, state + h * k3)
        return state + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)

    @lru_cache(maxsize=65536)
    def _state_at(self, t):
        i = int(np.clip(np.searchsorted(self._ts, t, side="right") - 1,
                        0, len(self._ts) - 1))
        t0 = self._ts[i]
        state = self._states[i]
        if t == t0:
            return state
        return self._rk4_step(t0, state, t - t0)

    def frame_state(self, t):
        _check_in_domain(t, self.domain)
        return FrameState.from_matrix(self._state_at(float(t)))

    # -- curve surface --------------------------------------------------------

    def point(self, t):
        _check_in_domain(t, self.domain)
        return self._state_at(float(t))[0].copy()

    def curvature_values(self, t):
        return self.profile.values(t)

    def _derivation_rows(self, kj, order):
        """Frenet derivative of frame row r as {target_row: Jet} couplings."""
        n = self.dimension
        t = kj[0].base
        one = Jet.constant(1.0, t, order)
        k = [None] + list(kj)  # 1-based
        D = [dict() for _ in range(n)]
        D[0] = {1: one}
        D[1] = {4: one}
        D[2] = {1: k[2]} | ({5: k[3]} if n >= 6 else {})
        D[3] = {0: k[2], 2: one, 4: -k[1]}
        D[4] = {1: -k[1], 3: one}
        for row in range(5, n):
            i = row - 1  # row holds W_i
            if i == 4:
                D[row] = {0: -k[3]}
                if n >= 7:
                    D[row][6] = k[4]
            else:
                D[row] = {row - 1: -k[i - 1]}
                if i + 1 <= n - 2:
                    D[row][row + 1] = k[i]
        return D

    def vec_jet(self, t, order):
        _check_in_domain(t, self.domain)
        t = float(t)
        n = self.dimension
        state = self._state_at(t)
        frame_rows = state[1:]
        jet_order = order + 2
        kj = self.profile.jets(t, jet_order)
        D = self._derivation_rows(kj, jet_order)
        zero = Jet.constant(0.0, t, jet_order)
        X = [zero] * n
        X[0] = Jet.constant(1.0, t, jet_order)
        coeffs = np.zeros((order + 1, n))
        coeffs[0] = state[0]
        fact = 1.0
        for m in range(1, order + 1):
            fact *= m
            values = np.array([x.value for x in X])
            coeffs[m] = (values @ frame_rows) / fact
            if m == order:
                break
            Xn = [x.differentiate() for x in X]
            for r in range(n):
                for target, coupling in D[r].items():
                    Xn[target] = Xn[target] + X[r] * coupling
            X = Xn
        return VecJet(t, coeffs)

    def derivatives(self, t, m):
        vj = self.vec_jet(t, m)
        return [vj.derivative_value(k) for k in range(1, m + 1)]

    # -- export ----------------------------------------------------------------

    def to_sampled(self, max_points=257):
        stride = max(1, (len(self._ts) - 1) // (max_points - 1))
        idx = np.arange(0, len(self._ts), stride)
        if idx[-1] != len(self._ts) - 1:
            idx = np.append(idx, len(self._ts) - 1)
        return SampledCurve(self._ts[idx], self._states[idx, 0, :])

    def frame_table(self, grid):
        rows = {"L1": [], "L2": [], "N1": [], "N2": []}
        for j in range(self.dimension - 4):
            rows[f"W{j + 3}"] = []
        curvature_rows = []
        points = []
        for t in grid:
            st = self.frame_state(t)
            points.append(st.alpha)
            rows["L1"].append(st.L1)
            rows["L2"].append(st.L2)
            rows["N1"].append(st.N1)
            rows["N2"].append(st.N2)
            for j, w in enumerate(st.W):
                rows[f"W{j + 3}"].append(w)
            curvature_rows.append(self.curvature_values(t))
        table = {name: np.stack(v) for name, v in rows.items()}
        table["points"] = np.stack(points)
        table["curvatures"] = np.stack(curvature_rows)
        return table


def synthesize(profile, interval, step=1e-3, initial=None, defect_limit=1e-4):
    """Integrate the Frenet system; raises StepSizeError past the defect budget."""
    return FrenetCurve(profile, interval, step, initial, defect_limit)


# ---------------------------------------------------------------------------
# Bertrand mates
# ---------------------------------------------------------------------------

class OffsetCurve:
    """The normal offset alpha + mu * alpha''' of a pseudo-arc family curve."""

    def __init__(self, base, mu):
        self.base = base
        self.mu = float(mu)
        self.dimension = base.dimension
        self.domain = base.domain

    def vec_jet(self, t, order):
        A = as_vec_jet(self.base, t, order + 3)
        a3 = A.differentiate().differentiate().differentiate()
        return A.truncate(order) + a3.scale(self.mu)

    def point(self, t):
        return self.vec_jet(t, 0).value

    def derivatives(self, t, m):
        vj = self.vec_jet(t, m)
        return [vj.derivative_value(k) for k in range(1, m + 1)]


@dataclass(frozen=True)
class BertrandVerdict:
    verdict: bool
    max_k1: float
    max_k2: float
    grid: tuple[float, ...]
    tolerance: float


@dataclass(frozen=True)
class PairReport:
    """Correspondence and W3-line alignment between a curve and its offset."""

    grid: tuple[float, ...]
    sbar: tuple[float, ...]
    correspondence_offset: float | None  # sbar = s + offset when not None
    alignment_defect: float
    verdict: bool
    max_k1: float
    max_k2: float


@dataclass(frozen=True)
class BertrandMateResult:
    mate: OffsetCurve
    sampled: SampledCurve
    report: PairReport


def bertrand_check(curve, grid=None, tol=1e-8):
    """True iff the curvature maxima over the grid stay below ``tol``."""
    if curve.dimension != 5:
        raise HypothesisError("Bertrand theory here lives in dimension 5",
                              condition="dimension == 5")
    report = require_family(curve, grid)
    grid = report.grid
    k1s, k2s = [], []
    for t in grid:
        fj = frame_jets(curve, t)
        k1s.append(abs(fj.curvatures[0].value))
        k2s.append(abs(fj.curvatures[1].value))
    max_k1, max_k2 = max(k1s), max(k2s)
    return BertrandVerdict(max_k1 < tol and max_k2 < tol, max_k1, max_k2,
                           tuple(grid), tol)


def bertrand_mate(curve, mu, grid=None, tol=1e-8, force=False):
    """Offset mate alpha + mu W3 with the W3-alignment report.

    Requires k1 = k2 = 0 within ``tol`` on the grid; the correspondence is
    then the identity (pseudo-arc zero points matched), the mate is framed,
    and |W3bar -/+ W3| is reported.  With ``force`` the curvature gate is
    skipped and the offset's third pseudo-arc derivative is compared instead,
    which quantifies how badly a non-Bertrand curve fails the alignment.
    """
    if mu == 0.0:
        raise InputError("mu must be nonzero (the mate must be distinct)")
    check = bertrand_check(curve, grid, tol)
    grid = check.grid
    if not check.verdict and not force:
        raise HypothesisError(
            f"not a Bertrand curve: max|k1| = {check.max_k1:.3e}, "
            f"max|k2| = {check.max_k2:.3e} exceed tol {tol:.1e}",
            condition="k1 = k2 = 0")
    mate = OffsetCurve(curve, mu)
    defects = []
    sbars = []
    if check.verdict:
        for t in grid:
            w3 = frame_jets(curve, t).W[0].value
            w3bar = frame_jets(mate, t).W[0].value
            defects.append(min(np.linalg.norm(w3bar - w3), np.linalg.norm(w3bar + w3)))
            sbars.append(t)
        offset = 0.0
    else:
        rep = ReparametrizedCurve(mate)
        for t in grid:
            w3 = frame_jets(curve, t).W[0].value
            sbar = rep.pseudo_arc_of(t)
            w3bar = rep.derivatives(sbar, 3)[2]
            defects.append(min(np.linalg.norm(w3bar - w3), np.linalg.norm(w3bar + w3)))
            sbars.append(sbar)
        offset = None
    points = np.stack([mate.point(t) for t in grid])
    sampled = SampledCurve(np.asarray(grid), points)
    report = PairReport(tuple(grid), tuple(sbars), offset, float(max(defects)),
                        check.verdict, check.max_k1, check.max_k2)
    return BertrandMateResult(mate, sampled, report)


# ---------------------------------------------------------------------------
# Pseudo-spherical test
# ---------------------------------------------------------------------------

def _sphere_coefficient_jets(kjets, n, min_curvature=MIN_CURVATURE):
    """Jets of a_1..a_{n-4} from curvature jets k_1..k_{n-3}.

    a_1 = 0, a_2 = 1/k_3 and a_{i-1} = (a_{i-2}' + a_{i-3} k_{i-1}) / k_i for
    4 <= i <= n - 3; every division is guarded.
    """
    if n < 6:
        raise HypothesisError("the sphere recursion needs dimension >= 6",
                              condition="dimension >= 6")
    base = kjets[0].base
    order = kjets[0].order
    zero = Jet.constant(0.0, base, order)
    k3 = kjets[2]
    if abs(k3.value) < min_curvature:
        raise SingularRecursionError(
            f"k3 = {k3.value:.3e} vanishes at t={base}", index=3)
    a = [zero, 1.0 / k3]
    for i in range(4, n - 2):
        ki = kjets[i - 1]
        if abs(ki.value) < min_curvature:
            raise SingularRecursionError(
                f"k{i} = {ki.value:.3e} vanishes at t={base}", index=i)
        a.append((a[i - 3].differentiate() + a[i - 4] * kjets[i - 2]) / ki)
    return a


def sphere_coefficients(profile, t, min_curvature=MIN_CURVATURE):
    """Values a_1..a_{n-4} of the sphere recursion for a curvature profile."""
    n = profile.dimension
    kjets = profile.jets(t, max(n, 4))
    return [a.value for a in _sphere_coefficient_jets(kjets, n, min_curvature)]


@dataclass(frozen=True)
class SphereReport:
    """Per-sample recursion values and the constancy verdict."""

    grid: tuple[float, ...]
    a_values: np.ndarray          # (m, n-4)
    radius_sq: np.ndarray         # (m,)
    centers: np.ndarray           # (m, n)
    is_spherical: bool
    radius: float | None
    center: np.ndarray | None
    last_coefficient_nonzero: bool
    max_radius_spread: float
    max_center_spread: float
    sphere_equation_residual: float
    tolerance: float


def pseudo_spherical_test(curve, grid=None, tol=1e-5, min_curvature=MIN_CURVATURE):
    """Constancy test of sum a_i^2 and of the center alpha + sum a_i W_{i+2}.

    ``is_spherical`` demands both spreads below ``tol``; the sphere equation
    <alpha - center, alpha - center> = r^2 is then verified against the mean
    center and radius.  A vanishing k_{n-3} anywhere on the grid raises
    HypothesisError (the theorem does not apply), which keeps hypothesis
    failures distinct from negative verdicts.
    """
    n = curve.dimension
    if n < 6:
        raise HypothesisError("the pseudo-sphere test needs dimension >= 6",
                              condition="dimension >= 6")
    if grid is None:
        grid = chebyshev_grid(curve.domain[0], curve.domain[1], 17)
    grid = [float(t) for t in grid]
    metric = PseudoMetric(n)
    a_rows, radii, centers, points = [], [], [], []
    for t in grid:
        fj = frame_jets(curve, t, extra_order=n)
        k_last = fj.curvatures[-1].value
        if abs(k_last) < min_curvature:
            raise HypothesisError(
                f"k_{n - 3} = {k_last:.3e} at t={t}: pseudo-sphere theorem "
                "hypothesis fails", condition=f"k_{n - 3} != 0", location=t)
        a_jets = _sphere_coefficient_jets(list(fj.curvatures), n, min_curvature)
        a_vals = np.array([a.value for a in a_jets])
        point = np.asarray(curve.point(t), dtype=float)
        center = point.copy()
        for i in range(2, n - 3):
            center = center + a_vals[i - 1] * fj.W[i - 1].value
        a_rows.append(a_vals)
        radii.append(float(np.sum(a_vals[1:] ** 2)))
        centers.append(center)
        points.append(point)
    a_values = np.stack(a_rows)
    radius_sq = np.array(radii)
    centers = np.stack(centers)
    points = np.stack(points)
    max_radius_spread = float(radius_sq.max() - radius_sq.min())
    center_mean = centers.mean(axis=0)
    max_center_spread = float(np.max(np.abs(centers - center_mean)))
    is_spherical = max_radius_spread <= tol and max_center_spread <= tol
    last_nonzero = bool(np.min(np.abs(a_values[:, -1])) > tol)
    radius = center = None
    residual = float("nan")
    if is_spherical:
        r_sq = float(radius_sq.mean())
        diffs = points - center_mean
        residual = float(np.max(np.abs(
            np.sum(metric.signs * diffs * diffs, axis=1) - r_sq)))
        radius = math.sqrt(max(r_sq, 0.0))
        center = center_mean
    return SphereReport(tuple(grid), a_values, radius_sq, centers, is_spherical,
                        radius, center, last_nonzero, max_radius_spread,
                        max_center_spread, residual, tol)


# ---------------------------------------------------------------------------
# Evolute and involute
# ---------------------------------------------------------------------------

class EvoluteCurve:
    """Centers of osculating spheres, alpha + (1/k3) W4, in dimension six."""

    def __init__(self, base):
        if base.dimension != 6:
            raise HypothesisError("the evolute construction lives in dimension 6",
                                  condition="dimension == 6")
        self.base = base
        self.dimension = 6
        self.domain = base.domain

    @lru_cache(maxsize=4096)
    def vec_jet(self, t, order):
        extra = max(0, order + 6 - (self.dimension + 2)) + 1
        fj = frame_jets(self.base, t, extra_order=extra)
        A = as_vec_jet(self.base, t, order)
        recip = 1.0 / fj.curvatures[2]
        return A.truncate(order) + fj.W[1].scale(recip).truncate(order)

    def point(self, t):
        return self.vec_jet(float(t), 0).value

    def derivatives(self, t, m):
        vj = self.vec_jet(float(t), m)
        return [vj.derivative_value(k) for k in range(1, m + 1)]


@dataclass(frozen=True)
class EvoluteResult:
    curve: EvoluteCurve
    sampled: SampledCurve
    grid: tuple[float, ...]
    speed_defect: float        # max |<E',E'> - ((1/k3)')^2|
    min_abs_slope: float       # min |(1/k3)'| seen on the grid


def evolute(curve, grid=None, min_slope=1e-8, min_curvature=MIN_CURVATURE):
    """Evolute of a family curve in dimension six, certified spacelike.

    Refuses with the grid location when k3 vanishes or (1/k3)' drops below
    ``min_slope`` (a constant k3 has no evolute in this sense).
    """
    if curve.dimension != 6:
        raise HypothesisError("the evolute construction lives in dimension 6",
                              condition="dimension == 6")
    if grid is None:
        grid = np.linspace(curve.domain[0], curve.domain[1], 33)
    grid = [float(t) for t in grid]
    metric = PseudoMetric(6)
    E = EvoluteCurve(curve)
    speed_defect = 0.0
    min_abs_slope = math.inf
    points = []
    for t in grid:
        fj = frame_jets(curve, t, extra_order=2)
        k3 = fj.curvatures[2]
        if abs(k3.value) < min_curvature:
            raise HypothesisError(f"k3 = {k3.value:.3e} at t={t}",
                                  condition="k3 != 0", location=t)
        slope = (1.0 / k3).derivative(1)
        if abs(slope) < min_slope:
            raise HypothesisError(
                f"(1/k3)' = {slope:.3e} at t={t}: evolute not regular there",
                condition="(1/k3)' != 0", location=t)
        min_abs_slope = min(min_abs_slope, abs(slope))
        vj = E.vec_jet(t, 1)
        Ep = vj.derivative_value(1)
        speed_defect = max(speed_defect,
                           abs(metric.inner(Ep, Ep) - slope * slope))
        points.append(vj.value)
    sampled = SampledCurve(np.asarray(grid), np.stack(points))
    return EvoluteResult(E, sampled, tuple(grid), float(speed_defect),
                         float(min_abs_slope))


class InvoluteCurve:
    """Unwinding c(t) - s(t) T(t) of a spacelike curve by its arc length.

    ``s(t) = arc_offset + (arc length from c(t0))``; the offset admits base
    points that lie outside the parametrized piece, as the arc-length-matched
    unwinding of an evolute generally does.
    """

    def __init__(self, base, t0, arc_offset=0.0, intervals=512, unit_speed=False):
        if isinstance(base, SampledCurve):
            base = SplineCurve(base)
        self.base = base
        self.dimension = base.dimension
        self.domain = base.domain
        self.t0 = float(t0)
        self.arc_offset = float(arc_offset)
        _check_in_domain(self.t0, base.domain)
        self._metric = PseudoMetric(base.dimension)
        self._unit_speed = bool(unit_speed)
        if unit_speed:
            # caller certifies |c'| = 1; the arc-length table is then linear
            self._table = None
            self._s0 = 0.0
            return

        def speed(t):
            d1 = np.asarray(base.derivatives(t, 1)[0], dtype=float)
            sq = self._metric.inner(d1, d1)
            if sq <= 0.0:
                raise HypothesisError(
                    f"<c',c'> = {sq:.3e} at t={t}: curve is not spacelike",
                    condition="<c',c'> > 0", location=t)
            return math.sqrt(sq)

        self._table = CumulativeIntegral(speed, base.domain[0], base.domain[1],
                                         intervals)
        self._s0 = self._table(self.t0)

    def arc_length(self, t):
        if self._unit_speed:
            return self.arc_offset + float(t) - self.t0
        return self.arc_offset + self._table(float(t)) - self._s0

    @lru_cache(maxsize=4096)
    def vec_jet(self, t, order):
        cj = as_vec_jet(self.base, t, order + 1)
        cp = cj.differentiate()
        speed = self._metric.inner_jet(cp, cp).sqrt()
        s_jet = speed.antiderivative(self.arc_length(t))
        T = cp.scale(1.0 / speed)
        return cj.truncate(order) - T.scale(s_jet).truncate(order)

    def point(self, t):
        return self.vec_jet(float(t), 0).value

    def derivatives(self, t, m):
        vj = self.vec_jet(float(t), m)
        return [vj.derivative_value(k) for k in range(1, m + 1)]


@dataclass(frozen=True)
class InvoluteResult:
    curve: InvoluteCurve
    sampled: SampledCurve
    grid: tuple[float, ...]


def involute(curve, t0, grid=None, arc_offset=0.0):
    """Involute of a spacelike curve from c(t0), sampled on the grid."""
    inv = InvoluteCurve(curve, t0, arc_offset)
    if grid is None:
        grid = np.linspace(inv.domain[0], inv.domain[1], 33)
    grid = [float(t) for t in grid]
    points = np.stack([inv.point(t) for t in grid])
    return InvoluteResult(inv, SampledCurve(np.asarray(grid), points), tuple(grid))


@dataclass(frozen=True)
class InvoluteFrameReport:
    """Evidence that the involute of a suitable spacelike curve is Cartan.

    ``k3_max_rel_error`` compares the extracted third curvature with the
    reciprocal of the arc-length parameter; ``w4_sign`` records which of the
    (+T, -T) alignments occurred.
    """

    grid: tuple[float, ...]
    k3_max_rel_error: float
    w4_sign: int
    w4_alignment_defect: float
    evolute_match: float
    involute_null_defect: float
    third_norm_defect: float
    hypothesis_evidence: dict[str, float]


def involute_frame_check(curve, grid, k3_floor=MIN_CURVATURE, gate_tol=1e-6):
    """Frame the involute of a unit-speed spacelike curve and verify it.

    The curve parameter must be arc length measured so that s > 0 on the
    grid; hypotheses (unit speed, null second derivative, nonvanishing
    <c'''',c''''>, independent {c'',...,c^(6)}) are checked per grid point and
    reported by condition.  The involute is reframed after pseudo-arc
    reparametrization; the report compares k3 with 1/s, W4 with the unit
    tangent, and the evolute of the involute with the original curve.
    """
    grid = [float(t) for t in grid]
    metric = PseudoMetric(curve.dimension)
    if curve.dimension != 6:
        raise HypothesisError("the correspondence lives in dimension 6",
                              condition="dimension == 6")
    evidence = {"min_s": min(grid), "unit_speed": 0.0, "c2_null": 0.0,
                "min_eta_sq": math.inf, "min_prefix_rank": 5.0}
    if min(grid) <= 0.0:
        raise HypothesisError("grid must lie in s > 0", condition="s > 0")
    for t in grid:
        vj = as_vec_jet(curve, t, 6)
        d = [vj.derivative_value(k) for k in range(1, 7)]
        speed = metric.inner(d[0], d[0])
        evidence["unit_speed"] = max(evidence["unit_speed"], abs(speed - 1.0))
        null2 = metric.inner(d[1], d[1])
        evidence["c2_null"] = max(evidence["c2_null"], abs(null2))
        eta_sq = metric.inner(d[3], d[3])
        evidence["min_eta_sq"] = min(evidence["min_eta_sq"], eta_sq)
        rank = np.linalg.matrix_rank(np.stack(d[1:6]), tol=1e-8)
        evidence["min_prefix_rank"] = min(evidence["min_prefix_rank"], rank)
    if evidence["unit_speed"] > gate_tol:
        raise HypothesisError(
            f"|<c',c'> - 1| up to {evidence['unit_speed']:.3e}: parameter is "
            "not arc length", condition="<c',c'> = 1")
    if evidence["c2_null"] > gate_tol:
        raise HypothesisError(f"|<c'',c''>| up to {evidence['c2_null']:.3e}",
                              condition="<c'',c''> = 0")
    if evidence["min_eta_sq"] <= 0.0:
        raise HypothesisError(
            f"<c'''',c''''> = {evidence['min_eta_sq']:.3e} <= 0 on the grid",
            condition="<c'''',c''''> > 0")
    if evidence["min_prefix_rank"] < 5:
        raise HypothesisError("{c'',...,c^(6)} is linearly dependent",
                              condition="independent derivatives")

    inv = InvoluteCurve(curve, curve.domain[0], arc_offset=curve.domain[0],
                        unit_speed=True)
    null_defect = 0.0
    third_defect = 0.0
    for t in grid:
        ij = inv.vec_jet(t, 3)
        i1 = ij.derivative_value(1)
        i3 = ij.derivative_value(3)
        cj = as_vec_jet(curve, t, 4)
        eta_sq = metric.inner(cj.derivative_value(4), cj.derivative_value(4))
        null_defect = max(null_defect, abs(metric.inner(i1, i1)))
        third_defect = max(third_defect,
                           abs(metric.inner(i3, i3) - t * t * eta_sq))

    rep = ReparametrizedCurve(inv, intervals=192)
    k3_err = 0.0
    align_defect = 0.0
    sign_votes = []
    ev_match = 0.0
    for t in grid:
        nu = rep.pseudo_arc_of(t)
        fj = frame_jets(rep, nu)
        k3 = fj.curvatures[2].value
        k3_err = max(k3_err, abs(k3 - 1.0 / t) * t)
        W4 = fj.W[1].value
        T = np.asarray(curve.derivatives(t, 1)[0], dtype=float)
        plus = np.linalg.norm(W4 - T)
        minus = np.linalg.norm(W4 + T)
        sign_votes.append(1 if plus <= minus else -1)
        align_defect = max(align_defect, min(plus, minus))
        if abs(k3) < k3_floor:
            raise HypothesisError(f"extracted k3 = {k3:.3e} at s={t}",
                                  condition="k3 != 0", location=t)
        E_I = inv.point(t) + W4 / k3
        ev_match = max(ev_match, float(np.max(np.abs(E_I - np.asarray(curve.point(t))))))
    sign = sign_votes[0]
    if any(v != sign for v in sign_votes):
        raise HypothesisError("W4 alignment sign flips across the grid",
                              condition="W4 = +/- T consistently")
    return InvoluteFrameReport(tuple(grid), float(k3_err), sign,
                               float(align_defect), float(ev_match),
                               float(null_defect), float(third_defect),
                               evidence)
