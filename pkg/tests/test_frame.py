"""Frame extraction and residual tests.

``test_extraction_satisfies_frenet_system`` is the formula-validation gate:
the extracted frame is substituted back into the Frenet equations with jet
derivatives at random parameters of synthesized curves of three dimensions.
"""

import numpy as np
import pytest

from nullcartan import (
    CurvatureProfile,
    FamilyError,
    FrameDegeneracyError,
    InputError,
    PseudoMetric,
    cartan_frame_at,
    frame_jets,
    frenet_residuals,
    synthesize,
)

from conftest import golden_L1, golden_L2, golden_N1, golden_N2, golden_W3


def frame_equation_residuals(fj, n, metric):
    """Jet-derivative residuals of every Frenet equation for extracted frames."""
    k = [None] + [c for c in fj.curvatures]
    res = {}

    def norm_at(vecjet_diff, combo):
        return float(np.linalg.norm(vecjet_diff.value - combo))

    res["L1'"] = norm_at(fj.L1.differentiate(), fj.L2.value)
    res["L2'"] = norm_at(fj.L2.differentiate(), fj.W[0].value)
    res["W3'"] = norm_at(fj.W[0].differentiate(),
                         -k[1].value * fj.L2.value + fj.N2.value)
    res["N2'"] = norm_at(fj.N2.differentiate(),
                         k[2].value * fj.L1.value + fj.N1.value
                         - k[1].value * fj.W[0].value)
    if n == 5:
        res["N1'"] = norm_at(fj.N1.differentiate(), k[2].value * fj.L2.value)
    else:
        res["N1'"] = norm_at(fj.N1.differentiate(),
                             k[2].value * fj.L2.value + k[3].value * fj.W[1].value)
        for i in range(4, n - 1):
            lhs = fj.W[i - 3].differentiate()
            if i == 4:
                combo = -k[3].value * fj.L1.value
                if n >= 7:
                    combo = combo + k[4].value * fj.W[2].value
            else:
                combo = -k[i - 1].value * fj.W[i - 4].value
                if i + 1 <= n - 2:
                    combo = combo + k[i].value * fj.W[i - 2].value
            res[f"W{i}'"] = norm_at(lhs, combo)
    return res


# ---------------------------------------------------------------------------
# Golden frame
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("s", [0.0, 0.3, 1.0])
def test_golden_frame_matches_closed_forms(golden, s):
    f = cartan_frame_at(golden, s)
    assert np.max(np.abs(f.L1 - golden_L1(s))) <= 1e-9
    assert np.max(np.abs(f.L2 - golden_L2(s))) <= 1e-9
    assert np.max(np.abs(f.W[0] - golden_W3(s))) <= 1e-9
    assert np.max(np.abs(f.N2 - golden_N2(s))) <= 1e-9
    assert np.max(np.abs(f.N1 - golden_N1(s))) <= 1e-9
    assert abs(f.curvatures[0]) <= 1e-9
    assert abs(f.curvatures[1]) <= 1e-9


def test_golden_frame_orientation_matches_derivatives(golden):
    m = PseudoMetric(5)
    for s in (0.0, 0.5, 1.0):
        f = cartan_frame_at(golden, s)
        derivs = golden.derivatives(s, 5)
        assert f.orientation == m.orientation_sign(derivs)


# ---------------------------------------------------------------------------
# Normalization invariants
# ---------------------------------------------------------------------------

def _normalization_defect(curve, t):
    n = curve.dimension
    m = PseudoMetric(n)
    f = cartan_frame_at(curve, t)
    defect = 0.0
    defect = max(defect, abs(m.inner(f.L1, f.N1) - 1.0))
    defect = max(defect, abs(m.inner(f.L2, f.N2) + 1.0))
    for a in (f.L1, f.L2, f.N1, f.N2):
        defect = max(defect, abs(m.inner(a, a)))
    defect = max(defect, abs(m.inner(f.L1, f.L2)))
    defect = max(defect, abs(m.inner(f.N1, f.N2)))
    defect = max(defect, abs(m.inner(f.L1, f.N2)))
    defect = max(defect, abs(m.inner(f.L2, f.N1)))
    W = np.stack(f.W)
    gram = (W * m.signs) @ W.T
    defect = max(defect, float(np.max(np.abs(gram - np.eye(len(f.W))))))
    for w in f.W:
        for a in (f.L1, f.L2, f.N1, f.N2):
            defect = max(defect, abs(m.inner(w, a)))
    return defect


def test_frame_normalization_on_golden(golden):
    for s in np.linspace(-0.1, 1.1, 9):
        assert _normalization_defect(golden, float(s)) <= 1e-9


def test_frame_normalization_on_synthesized(synth6, synth8):
    for curve in (synth6, synth8):
        for t in np.linspace(0.05, 0.95, 7):
            assert _normalization_defect(curve, float(t)) <= 1e-9


def test_derived_pairing_identities(golden, synth6, synth8):
    # <W3',L2> = -1, <N2',L1> = 1, <N2',W3> = -k1, <N1',N2> = -k2
    for curve in (golden, synth6, synth8):
        m = PseudoMetric(curve.dimension)
        for t in np.linspace(0.1, 0.9, 5):
            fj = frame_jets(curve, float(t))
            w3p = fj.W[0].differentiate()
            n2p = fj.N2.differentiate()
            n1p = fj.N1.differentiate()
            k1, k2 = fj.curvatures[0].value, fj.curvatures[1].value
            assert m.inner_jet(w3p, fj.L2).value == pytest.approx(-1.0, abs=1e-9)
            assert m.inner_jet(n2p, fj.L1).value == pytest.approx(1.0, abs=1e-9)
            assert m.inner_jet(n2p, fj.W[0]).value == pytest.approx(-k1, abs=1e-9)
            assert m.inner_jet(n1p, fj.N2).value == pytest.approx(-k2, abs=1e-9)


def test_k2_cross_validation(golden, synth6, synth8):
    # the extraction value of k2 agrees with the pairing -<N1',N2>
    for curve in (golden, synth6, synth8):
        m = PseudoMetric(curve.dimension)
        for t in np.linspace(0.1, 0.9, 5):
            fj = frame_jets(curve, float(t))
            k2 = fj.curvatures[1].value
            pairing = -m.inner_jet(fj.N1.differentiate(), fj.N2).value
            assert k2 == pytest.approx(pairing, abs=1e-8)


def test_frame_spans_derivative_flag(golden, synth6):
    # span{L1,L2,W3,N2,N1} = span{alpha',...,alpha^(5)}
    for curve in (golden, synth6):
        t = 0.4
        f = cartan_frame_at(curve, t)
        derivs = curve.derivatives(t, 5)
        stacked = np.vstack([f.L1, f.L2, f.W[0], f.N2, f.N1, *derivs])
        assert np.linalg.matrix_rank(stacked, tol=1e-8) == 5


# ---------------------------------------------------------------------------
# Extraction validation against the Frenet system (mandated oracle gate)
# ---------------------------------------------------------------------------

def test_extraction_satisfies_frenet_system(synth_flat5, synth6, synth8):
    rng = np.random.default_rng(404)
    for curve in (synth_flat5, synth6, synth8):
        n = curve.dimension
        m = PseudoMetric(n)
        for t in rng.uniform(0.02, 0.98, size=20):
            fj = frame_jets(curve, float(t), extra_order=1)
            res = frame_equation_residuals(fj, n, m)
            worst = max(res.values())
            assert worst <= 1e-9, (n, t, res)
            assert fj.closure_residual <= 1e-9


def test_recovered_curvatures_match_prescriptions(synth6):
    for t in np.linspace(0.05, 0.95, 7):
        f = cartan_frame_at(synth6, float(t))
        want = np.array([0.2, -0.1, 1.0 + t])
        assert np.max(np.abs(np.array(f.curvatures) - want)) <= 1e-6


def test_recovered_curvatures_n8(synth8):
    for t in (0.2, 0.6, 0.9):
        f = cartan_frame_at(synth8, float(t))
        want = np.array([0.1 + 0.05 * t, -0.2, 1.5 + 0.3 * np.sin(t),
                         1.0 + 0.2 * t, 2.0 - 0.3 * t])
        assert np.max(np.abs(np.array(f.curvatures) - want)) <= 1e-6


# ---------------------------------------------------------------------------
# Degeneracy and gate behavior
# ---------------------------------------------------------------------------

def test_frame_rejects_non_family_curve():
    from nullcartan import Curve
    fake = Curve.from_strings(["s", "s^2/2", "s^3/6", "s^4/24", "s^5/120"],
                              domain=(0.0, 1.0))
    with pytest.raises(FamilyError):
        cartan_frame_at(fake, 0.5)


def test_frame_rejects_constant_curve():
    from nullcartan import Curve
    flat = Curve.from_strings(["1", "2", "3", "4", "5"], domain=(0.0, 1.0))
    with pytest.raises(FamilyError):
        cartan_frame_at(flat, 0.5)


def test_vanishing_k3_aborts_with_partial_frame():
    profile = CurvatureProfile.from_strings(6, ["0.1", "0.0", "t - 0.5"])
    curve = synthesize(profile, (0.0, 1.0))
    with pytest.raises(FrameDegeneracyError) as exc:
        cartan_frame_at(curve, 0.5)
    assert exc.value.index == 3
    partial = exc.value.partial
    assert partial is not None and len(partial.curvatures) == 2
    # away from the zero the frame exists, with the positive-gauge curvature
    f = cartan_frame_at(curve, 0.2)
    assert f.curvatures[2] == pytest.approx(0.3, abs=1e-9)


# ---------------------------------------------------------------------------
# Residual reports
# ---------------------------------------------------------------------------

def test_golden_residuals_on_61_point_grid(golden):
    report = frenet_residuals(golden, np.linspace(0.1, 1.1, 61))
    assert report.overall <= 1e-6
    assert set(report.per_equation) == {
        "alpha' = L1", "L1' = L2", "L2' = W3", "W3' = -k1 L2 + N2",
        "N2' = k2 L1 + N1 - k1 W3", "N1' = k2 L2"}


def test_synth8_residuals(synth8):
    report = frenet_residuals(synth8, np.linspace(0.05, 0.95, 61))
    assert report.overall <= 1e-5


def test_residual_grid_validation(golden):
    with pytest.raises(InputError):
        frenet_residuals(golden, np.linspace(0.1, 1.0, 5))
    with pytest.raises(InputError):
        frenet_residuals(golden, [0.1, 0.2, 0.4, 0.5, 0.7, 0.8, 1.0])
