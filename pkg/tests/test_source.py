import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, optimize

from forerunner.source import (
    ComplexField,
    DegenerateBranchError,
    MediumParams,
    Provenance,
    SourceParams,
    approx_psi,
    derive_wave,
    evaluate_field,
    exact_psi,
    oracle_psi,
    pole_psi,
    saddle_psi,
    u_arguments,
    wavenumber,
)

FIXTURES = [(0.81, 0.01), (0.9, 0.0), (0.99, 0.001), (1.2, 0.1), (0.9, 0.1), (1.2, 0.0)]


def setup(omega0, v1):
    return MediumParams(v1), SourceParams(omega0)


def branch_cut_psi(m, s, x, t):
    """Laplace inversion with the omega contour wrapped around a cut running
    straight down from omega = V: pole residue plus an exponentially
    convergent cut integral (y = s^2 substitution)."""
    v = m.potential
    k0 = derive_wave(m, s, x).k0
    rot = cmath.exp(-0.25j * math.pi)

    def f(sv):
        y = sv * sv
        return 2 * sv * math.exp(-y * t) * cmath.sin(sv * rot * x) / (v - 1j * y - s.omega0)

    upper = math.sqrt(60.0 / t) + x / t  # e^{-y t} beats the sin growth well before this
    val = integrate.quad(f, 0, upper, complex_func=True, epsabs=1e-14, epsrel=1e-12, limit=400)[0]
    return cmath.exp(-1j * s.omega0 * t + 1j * k0 * x) + 1j / math.pi * cmath.exp(-1j * v * t) * val


# -- derived quantities -------------------------------------------------------------

def test_derive_wave_evanescent_lossless():
    # k0 = sqrt(-0.1) = i 0.316227766..., tau = x / (2 |k0|) real
    d = derive_wave(MediumParams(0.0), SourceParams(0.9), 100.0)
    assert d.k0 == pytest.approx(0.31622776601683794j, abs=1e-16)
    assert d.tau == pytest.approx(158.11388300841898, rel=1e-14)
    assert d.tau_c == pytest.approx(158.11388300841898, rel=1e-14)
    assert d.validity_x == pytest.approx(3.1622776601683795, rel=1e-14)


def test_derive_wave_at_cutoff_with_loss():
    # k0 = sqrt(0.01 i) = 0.1 e^{i pi/4}
    d = derive_wave(MediumParams(0.01), SourceParams(1.0), 10.0)
    assert d.k0 == pytest.approx(0.07071067811865475 * (1 + 1j), rel=1e-14)
    assert d.tau_abs == pytest.approx(10 / 0.2, rel=1e-14)
    assert d.tau_c == pytest.approx(10 / (2 * 0.1414213562373095), rel=1e-14)


def test_derive_wave_propagating_lossless():
    d = derive_wave(MediumParams(0.0), SourceParams(1.2), 50.0)
    assert d.k0 == pytest.approx(0.4472135954999579, rel=1e-15)
    assert d.validity_x == math.inf
    assert d.tau == pytest.approx(1j * 50 / (2 * 0.4472135954999579), rel=1e-14)


def test_degenerate_branch():
    with pytest.raises(DegenerateBranchError):
        derive_wave(MediumParams(0.0), SourceParams(1.0), 1.0)


@pytest.mark.parametrize("bad", [dict(v1=-0.1), dict(v1=math.nan), dict(cutoff=math.inf)])
def test_medium_validation(bad):
    with pytest.raises(ValueError):
        MediumParams(**bad)


def test_survival_time():
    assert MediumParams(0.01).survival_time == pytest.approx(50.0)
    assert MediumParams(0.0).survival_time == math.inf


@settings(max_examples=200, deadline=None)
@given(st.floats(0.5, 1.5), st.floats(0.0, 1.0), st.floats(0.1, 1e3))
def test_wave_invariants(omega0, v1, x):
    m, s = setup(omega0, v1)
    if v1 == 0 and abs(omega0 - 1) < 1e-12:
        return
    d = derive_wave(m, s, x)
    assert d.k0.imag >= 0
    assert d.k0 * d.k0 == pytest.approx(omega0 - 1 + 1j * v1, rel=1e-12, abs=1e-15)
    if v1 > 0:
        assert d.k0.real > 0
    assert d.tau_abs == pytest.approx(x / (2 * abs(d.k0)), rel=1e-13)
    assert 0 < d.tau_c < math.inf
    assert d.tau_c <= d.tau_abs * (1 + 1e-12)  # Re k0 + Im k0 >= |k0| in the first quadrant


def test_wavenumber_branch():
    m = MediumParams(0.05)
    for om in (-2.0, 0.3, 1.0, 4.0):
        assert wavenumber(m, om).imag >= 0


# -- exact solution -----------------------------------------------------------------

@settings(max_examples=100, deadline=None)
@given(st.sampled_from(FIXTURES), st.floats(1e-3, 1e4))
def test_boundary_identity(fx, t):
    m, s = setup(*fx)
    assert abs(exact_psi(m, s, 0.0, t) - cmath.exp(-1j * s.omega0 * t)) <= 1e-12


def test_initial_condition():
    m, s = setup(0.9, 0.01)
    assert exact_psi(m, s, 0.0, 0.0) == 1
    assert exact_psi(m, s, 3.0, 0.0) == 0


@pytest.mark.parametrize("x", [10.0, 50.0, 200.0])
def test_causality_at_tiny_time(x):
    for fx in FIXTURES:
        m, s = setup(*fx)
        assert abs(exact_psi(m, s, x, 1e-6)) ** 2 < 1e-4


@pytest.mark.parametrize("bad", [(-1.0, 1.0), (1.0, -1.0), (math.nan, 1.0), (1.0, math.inf)])
def test_domain_errors(bad):
    m, s = setup(0.9, 0.01)
    with pytest.raises(ValueError):
        exact_psi(m, s, *bad)


def test_oracle_spot_checks():
    cases = [(0.9, 0.001, 100.0, 1000.0), (0.81, 0.01, 20.0, 30.0), (1.2, 0.1, 5.0, 2.0), (0.99, 0.0, 1.0, 0.1)]
    for omega0, v1, x, t in cases:
        m, s = setup(omega0, v1)
        ex = exact_psi(m, s, x, t)
        assert abs(oracle_psi(m, s, x, t) - ex) <= 1e-8 * max(1.0, abs(ex))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(FIXTURES), st.floats(0.5, 40), st.floats(0.05, 200))
def test_oracle_agrees_with_exact(fx, x, t):
    m, s = setup(*fx)
    assert abs(oracle_psi(m, s, x, t) - exact_psi(m, s, x, t)) <= 1e-8


def test_oracle_independent_of_contour_offset():
    m, s = setup(0.9, 0.01)
    vals = [oracle_psi(m, s, 30.0, 40.0, contour_offset=c) for c in (-0.7, 0.3, 1.3)]
    assert max(abs(v - vals[0]) for v in vals) <= 1e-9


def test_branch_cut_representation_20_points():
    rng = np.random.default_rng(5)
    for i in range(20):
        fx = FIXTURES[i % len(FIXTURES)]
        m, s = setup(*fx)
        x, t = rng.uniform(0.5, 6), rng.uniform(0.5, 20)
        ex = exact_psi(m, s, x, t)
        assert abs(branch_cut_psi(m, s, x, t) - ex) <= 1e-8 * max(1.0, abs(ex)), (fx, x, t)


def test_long_time_limit_is_plane_wave():
    m, s = setup(0.9, 0.01)
    x = 20.0
    k0 = derive_wave(m, s, x).k0
    psi = exact_psi(m, s, x, 1e5)
    assert abs(psi) == pytest.approx(math.exp(-k0.imag * x), rel=1e-3)


# -- pole arguments -----------------------------------------------------------------

@pytest.mark.parametrize("fx", FIXTURES[:4])
def test_pole_argument_minima(fx):
    m, s = setup(*fx)
    x = 50.0
    d = derive_wave(m, s, x)
    for idx, expect in ((0, x * (abs(d.k0) - d.k0.real)), (1, x * (abs(d.k0) + d.k0.real))):
        res = optimize.minimize_scalar(lambda t: abs(u_arguments(m, s, x, t)[idx]) ** 2,
                                       bounds=(1e-3 * d.tau_abs, 1e3 * d.tau_abs), method="bounded",
                                       options={"xatol": 1e-10 * d.tau_abs})
        assert res.x == pytest.approx(d.tau_abs, rel=1e-4)
        assert res.fun == pytest.approx(expect, rel=1e-6, abs=1e-9)


# -- asymptotic pieces --------------------------------------------------------------

def test_pole_term_switches_on_at_tau_c():
    m, s = setup(1.2, 0.1)
    d = derive_wave(m, s, 40.0)
    assert pole_psi(m, s, 40.0, 0.99 * d.tau_c) == 0
    assert pole_psi(m, s, 40.0, 1.01 * d.tau_c) == cmath.exp(-1j * 1.2 * 1.01 * d.tau_c + 1j * d.k0 * 40.0)


@pytest.mark.parametrize("omega0,v1,x,t", [(0.9, 0.01, 100.0, 20.0), (0.99, 0.001, 100.0, 300.0), (0.81, 0.0, 80.0, 10.0), (1.2, 0.1, 100.0, 20.0)])
def test_saddle_plus_pole_tracks_exact(omega0, v1, x, t):
    m, s = setup(omega0, v1)
    ex = exact_psi(m, s, x, t)
    assert abs(approx_psi(m, s, x, t) - ex) <= 2e-2 * abs(ex)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(FIXTURES), st.floats(0.5, 50), st.floats(0.5, 50), st.floats(0.25, 4))
def test_saddle_scaling_law(fx, x, t, lam):
    # tau scales with x: apart from the loss factor the saddle density is homogeneous of degree -1
    m, s = setup(*fx)
    a = abs(saddle_psi(m, s, lam * x, lam * t)) ** 2 * lam * math.exp(2 * t * m.v1 * (lam - 1))
    b = abs(saddle_psi(m, s, x, t)) ** 2
    assert a == pytest.approx(b, rel=1e-12)


def test_saddle_matches_inverse_pole_arguments():
    m, s = setup(0.9, 0.01)
    x, t = 100.0, 20.0
    u0, u0p = u_arguments(m, s, x, t)
    phase = cmath.exp(-1j * m.potential * t + 1j * x * x / (4 * t))
    ref = phase * (1 / u0 + 1 / u0p) / (2j * math.sqrt(math.pi))
    assert saddle_psi(m, s, x, t) == pytest.approx(ref, rel=1e-13)


def test_saddle_needs_positive_arguments():
    m, s = setup(0.9, 0.0)
    with pytest.raises(ValueError):
        saddle_psi(m, s, 0.0, 1.0)


# -- sampled fields -----------------------------------------------------------------

def test_evaluate_field_shape_and_provenance():
    m, s = setup(0.9, 0.01)
    f = evaluate_field(m, s, [1.0, 2.0, 3.0], [5.0, 6.0], "exact")
    assert f.values.shape == (3, 2)
    assert f.provenance is Provenance.EXACT
    assert f.values[1, 0] == exact_psi(m, s, 2.0, 5.0)
    np.testing.assert_allclose(f.density, np.abs(f.values) ** 2)


def test_complex_field_rejects_bad_input():
    with pytest.raises(ValueError):
        ComplexField([0.0, 1.0], [1.0], np.zeros((3, 1)), "exact")
    with pytest.raises(ValueError):
        ComplexField([0.0], [1.0], np.array([[np.nan]]), "exact")
