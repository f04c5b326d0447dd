import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import erf

from inhomspdc.apertures import CircularAperture, DeltaAperture, GaussianAperture
from inhomspdc.dispersion import CrystalSpec, DelayLineSpec, GapSpec, PumpSpec
from inhomspdc.errors import (ConfigurationError, DegenerateAnalyzerError,
                              UnsupportedConfigurationError)
from inhomspdc.interference import (ANALYZER_PRESETS, AnalyzerSpec, TwoCrystalSystem,
                                    VisibilityCurve, baseline_rate, coincidence_rate,
                                    g_function, resolve_center_form, v_pol,
                                    visibility_center, visibility_tau,
                                    visibility_vs_aperture, visibility_vs_delay,
                                    visibility_vs_separation)

from conftest import APERTURE_B, DISPERSION, THICKNESS, make_system

LD = THICKNESS * DISPERSION
APERTURES = [DeltaAperture(), GaussianAperture(0.7e-3), CircularAperture(APERTURE_B)]


def nodisp(d):
    return GapSpec(d, 0.0)


def test_v_pol_examples():
    assert v_pol(AnalyzerSpec(0.3, 0.3)) == 1.0
    assert v_pol(AnalyzerSpec(0.3, -0.3)) == -1.0
    assert v_pol(AnalyzerSpec(0.0, 0.4)) == 0.0
    assert v_pol(ANALYZER_PRESETS["paper-45-45"]) == -1.0
    with pytest.raises(DegenerateAnalyzerError):
        v_pol(AnalyzerSpec(0.0, 0.0))
    with pytest.raises(ConfigurationError):
        AnalyzerSpec(1.5, 0.0)


@given(st.floats(-math.pi, math.pi), st.floats(-math.pi, math.pi))
def test_v_pol_bounded(a, b):
    spec = AnalyzerSpec.from_angles(a, b)
    if spec.mu_AoBe == 0 and spec.mu_BoAe == 0:
        return
    assert -1 - 1e-15 <= v_pol(spec) <= 1 + 1e-15


def test_system_invariants(pump):
    crystal = CrystalSpec(THICKNESS, DISPERSION, (0.07, 0))
    geometry = make_system().geometry
    with pytest.raises(ConfigurationError):
        TwoCrystalSystem(crystal, crystal, nodisp(0), geometry, DeltaAperture(), pump, "antiparallel")
    with pytest.raises(ConfigurationError):
        TwoCrystalSystem(crystal, crystal, nodisp(0), geometry, DeltaAperture(), pump, "sideways")
    other = CrystalSpec(2 * THICKNESS, DISPERSION, (0.07, 0))
    s = TwoCrystalSystem(crystal, other, nodisp(0), geometry, DeltaAperture(), pump)
    with pytest.raises(UnsupportedConfigurationError):
        visibility_tau(LD, s)
    with pytest.raises(UnsupportedConfigurationError):
        TwoCrystalSystem(crystal, crystal, nodisp(0), geometry, DeltaAperture(), pump,
                         delay=DelayLineSpec(1e-3, 1e-11, (0.01, 0)))
    assert make_system(d=0.075).rho == pytest.approx(1.1)


def test_g_functions_zero_walkoff():
    s = make_system(walkoff=0.0, aperture=DeltaAperture())
    for kind in ("G1", "G2", "G12"):
        vals = g_function(kind, np.linspace(0, 1, 7), 0.8, s)
        np.testing.assert_allclose(vals, 1.0, atol=1e-15)


def test_g_functions_zero_walkoff_gaussian():
    # equal-distance terms are 1; the cross term keeps the gamma factor
    s = make_system(walkoff=0.0)
    zeta = np.linspace(0, 1, 7)
    for kind in ("G1", "G2"):
        np.testing.assert_allclose(g_function(kind, zeta, 0.8, s), 1.0, atol=1e-15)
    s1, s2 = s.distances
    gamma = s.pump.k_p * s.aperture.r_squared / 4 * (1 / s2 - 1 / s1)
    expected = np.exp(-1j * math.atan(gamma)) / math.sqrt(1 + gamma ** 2)
    np.testing.assert_allclose(g_function("G12", zeta, 0.8, s), expected, rtol=1e-13)


def test_g12_parallel_phase(pump):
    d1, d = 0.75, 0.02
    s = make_system("parallel", aperture=DeltaAperture(), gap=nodisp(d))
    zeta = np.linspace(0, 1, 11)
    a = pump.k_p * (0.07 * THICKNESS) ** 2 / 8
    expected = np.exp(-1j * a * ((zeta - 1) ** 2 / d1 - (zeta + 1) ** 2 / (d1 + d)))
    np.testing.assert_allclose(g_function("G12", zeta, 1.0, s), expected, rtol=1e-13)


def test_g12_antiparallel_compensates():
    s = make_system("antiparallel", aperture=DeltaAperture(), gap=nodisp(0.0))
    np.testing.assert_allclose(g_function("G12", np.linspace(0, 1, 11), 1.0, s), 1.0, atol=1e-14)


def test_visibility_examples(pump):
    assert visibility_tau(-LD / 2, make_system()) == 0.0
    anti = make_system("antiparallel", aperture=DeltaAperture(), gap=nodisp(0.0))
    assert visibility_tau(LD, anti) == pytest.approx(-1.0, abs=1e-12)
    d1 = 0.75
    par = make_system("parallel", aperture=DeltaAperture(), gap=nodisp(0.0))
    arg = pump.k_p * (0.07 * THICKNESS) ** 2 / (2 * d1)
    assert visibility_tau(LD, par) == pytest.approx(math.sin(arg) / arg, abs=1e-12)


@pytest.mark.parametrize("thickness", [0.5e-3, 1.5e-3, 5e-3])
@pytest.mark.parametrize("r", [0.05e-3, 0.4e-3, 2e-3])
def test_gauss_contact_forms(pump, thickness, r):
    d1 = 1.0
    ap = GaussianAperture(r)
    a = pump.k_p * 0.07 * thickness * r / (4 * d1)
    b = pump.k_p * (0.07 * thickness) ** 2 / (2 * d1)
    par = make_system("parallel", aperture=ap, gap=nodisp(0.0), thickness=thickness, d1=d1)
    anti = make_system("antiparallel", aperture=ap, gap=nodisp(0.0), thickness=thickness, d1=d1)
    expected_p = math.exp(-2 * a * a) * math.sin(b) / b
    x = pump.k_p * 0.07 * thickness * r / d1
    expected_a = -math.sqrt(2 * math.pi) / x * erf(x / (2 * math.sqrt(2)))
    assert visibility_center(par, "gauss_parallel") == pytest.approx(expected_p, rel=1e-6)
    assert visibility_center(anti, "gauss_antiparallel") == pytest.approx(expected_a, rel=1e-6)


def test_gauss_antiparallel_small_radius():
    s = make_system("antiparallel", aperture=GaussianAperture(1e-9), gap=nodisp(0.0), d1=1.0)
    assert visibility_center(s, "gauss_antiparallel") == pytest.approx(-1.0, abs=1e-9)


def test_center_form_resolution():
    assert resolve_center_form(make_system("antiparallel")) == "gauss_antiparallel"
    assert resolve_center_form(make_system(aperture=DeltaAperture())) == "small_parallel"
    with pytest.raises(ConfigurationError):
        resolve_center_form(make_system(), "weird")
    with pytest.raises(ConfigurationError):
        visibility_center(make_system(aperture=DeltaAperture()), "gauss_parallel")


@pytest.mark.parametrize("aperture", APERTURES, ids=lambda a: type(a).__name__)
@pytest.mark.parametrize("axes", ["parallel", "antiparallel"])
@pytest.mark.parametrize("d", [0.0, 2e-3, 17.5e-3, 37.5e-3])
def test_center_matches_general(aperture, axes, d):
    s = make_system(axes, d=d, aperture=aperture)
    assert abs(visibility_center(s) - visibility_tau(LD, s)) < 1e-8


@pytest.mark.parametrize("aperture", APERTURES, ids=lambda a: type(a).__name__)
def test_order_doubling(aperture):
    s = make_system(aperture=aperture)
    for tau in (0.3 * LD, LD, 1.6 * LD):
        assert abs(visibility_tau(tau, s, 64) - visibility_tau(tau, s, 128)) < 1e-9


def test_zero_walkoff_sign_flip():
    for d in (0.0, 5e-3, 17.5e-3):
        p = visibility_center(make_system("parallel", d=d, walkoff=0.0))
        a = visibility_center(make_system("antiparallel", d=d, walkoff=0.0))
        assert p == pytest.approx(-a, abs=1e-14)


def test_zero_walkoff_small_aperture_cosine(pump):
    d = np.linspace(0, 0.1, 41)
    curve = visibility_vs_separation(make_system(aperture=DeltaAperture(), walkoff=0.0), d)
    d1 = 0.75
    pref = 2 * d1 * (d1 + d) / (d1 ** 2 + (d1 + d) ** 2)
    np.testing.assert_allclose(curve.value, pref * np.cos(curve.phi_disp), atol=1e-13)


@settings(max_examples=25, deadline=None)
@given(st.floats(-0.5, 2.5), st.sampled_from(["parallel", "antiparallel"]),
       st.floats(0, 0.1), st.sampled_from(range(3)))
def test_visibility_bounded(x, axes, d, idx):
    assert abs(visibility_tau(x * LD, make_system(axes, d=d, aperture=APERTURES[idx]))) <= 1 + 1e-9


def test_argmax_at_center():
    for axes in ("parallel", "antiparallel"):
        s = make_system(axes, d=0.0)
        taus = np.linspace(0, 2 * LD, 201)
        curve = visibility_vs_delay(s, taus)
        assert taus[np.argmax(np.abs(curve.value))] == pytest.approx(LD)


def test_rates():
    s = make_system("antiparallel", aperture=DeltaAperture(), gap=nodisp(0.0))
    preset = ANALYZER_PRESETS["paper-45-45"]
    assert coincidence_rate(LD, s, preset) == pytest.approx(2.0)
    assert coincidence_rate(LD, s, AnalyzerSpec(0.5, 0.5)) == pytest.approx(0.0, abs=1e-12)
    assert coincidence_rate(2.5 * LD, s, preset) == 1.0
    s1, s2 = s.distances
    expected = (s.pump.k_p / 2) ** 2 * 2 * THICKNESS / (DISPERSION * s1 ** 2)
    assert baseline_rate(s) == pytest.approx(expected)


def test_curves_and_workers():
    s = make_system()
    d = np.linspace(0.002, 0.05, 9)
    one = visibility_vs_separation(s, d)
    many = visibility_vs_separation(s, d, workers=4)
    np.testing.assert_array_equal(one.value, many.value)
    general = visibility_vs_separation(s, d, at_center=False)
    np.testing.assert_allclose(one.value, general.value, atol=1e-8)
    assert np.all(one.phi_gamma <= 0)
    r = visibility_vs_aperture(s, [0.1e-3, 1e-3], "r")
    b = visibility_vs_aperture(s, [2.5e-3], "aperture_b")
    assert r.sweep_variable == "r" and b.value[0] == pytest.approx(visibility_center(s))
    with pytest.raises(ConfigurationError):
        visibility_vs_aperture(s, [1e-3], "z")
    with pytest.raises(ConfigurationError):
        visibility_vs_separation(s, [])


def test_curve_invariants():
    with pytest.raises(ValueError):
        VisibilityCurve("d", np.zeros(2), np.array([0.0, 1.1]), np.zeros(2), np.zeros(2))
    c = VisibilityCurve("d", np.array([0.0, 1.0, 2.0]), np.array([1.0, -1.0, 1.0]),
                        np.zeros(3), np.zeros(3))
    np.testing.assert_allclose(c.zero_crossings(), [0.5, 1.5])
