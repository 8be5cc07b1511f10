"""Analytic wavefunctions and their closed-form fields.

Reference values are computed independently from the printed formulas; the
reduced figure-parameter forms are typed out here as a second route.
"""
import cmath
import math

import numpy as np
import pytest

import qctrans as qt
from qctrans import systems as qs

RNG = np.random.default_rng(42)


# --- double slit -------------------------------------------------------------

def ds_psi_reference(x, t, rho=0.625, u=-2.0, X=2.5):
    """Two-packet superposition exactly as printed."""
    w = rho * rho * (1 + 1j * t / rho ** 2)
    a = cmath.exp(-((u * t + x - X) ** 2) / (2 * w) - 1j * u * (u * t / 2 + x - X))
    b = cmath.exp(-((-u * t + x + X) ** 2) / (2 * w) + 1j * u * (-u * t / 2 + x + X))
    return (a + b) / cmath.sqrt(rho * (1 + 1j * t / rho ** 2))


def test_double_slit_psi_matches_reference():
    ds = qt.double_slit()
    for x, t in [(0.0, 0.0), (2.5, 0.0), (1.3, 0.7), (-3.1, 1.9), (0.4, 2.0)]:
        assert ds.psi(np.array([x]), t) == pytest.approx(ds_psi_reference(x, t), rel=1e-13)


def test_double_slit_psi_center_value():
    # 2 exp(-X^2 / 2 rho0^2) e^{i u X} / sqrt(rho0)
    ds = qt.double_slit()
    got = ds.psi(np.array([0.0]), 0.0)
    assert got == pytest.approx(0.00024073297135330428 + 0.0008138014221581746j, rel=1e-13)
    assert abs(got) == pytest.approx(2 * math.exp(-2.5 ** 2 / (2 * 0.625 ** 2))
                                     / math.sqrt(0.625), rel=1e-13)


def test_double_slit_psi_slit_value():
    ds = qt.double_slit()
    ref = (1 + cmath.exp(-2 * 2.5 ** 2 / 0.625 ** 2 + 2j * (-2.0) * 2.5)) / math.sqrt(0.625)
    assert ds.psi(np.array([2.5]), 0.0) == pytest.approx(ref, rel=1e-13)


def test_double_slit_mirror_symmetry():
    ds = qt.double_slit()
    for x, t in [(1.3, 0.7), (0.4, 1.9), (3.3, 0.2), (2.5, 1.25)]:
        assert ds.psi(np.array([-x]), t) == ds.psi(np.array([x]), t)


def test_double_slit_rho_closed_matches_psi():
    ds = qt.double_slit()
    for _ in range(50):
        x = float(RNG.uniform(-6, 6))
        t = float(RNG.uniform(0, 2.5))
        rho = ds.rho(np.array([x]), t)
        if rho < 1e-12:
            continue
        assert qs.double_slit_rho_closed(ds.params, x, t) == pytest.approx(rho, rel=1e-9)


def test_double_slit_s_closed_matches_arg_psi():
    # compare on the unit circle; S is defined mod 2 pi
    ds = qt.double_slit()
    for _ in range(50):
        x = float(RNG.uniform(-6, 6))
        t = float(RNG.uniform(0, 2.5))
        if ds.rho(np.array([x]), t) < 1e-12:
            continue
        s = qs.double_slit_s_closed(ds.params, x, t)
        phase = np.angle(ds.psi(np.array([x]), t))
        assert abs(cmath.exp(1j * s) - cmath.exp(1j * phase)) < 1e-9


def test_double_slit_initial_velocity_asymptotes():
    # u_x(x, 0) -> u for x < 0 and -u for x > 0
    ds = qt.double_slit()
    assert qt.velocity_grad_s(ds, np.array([-4.0]), 0.0) == pytest.approx([-2.0], abs=1e-9)
    assert qt.velocity_grad_s(ds, np.array([4.0]), 0.0) == pytest.approx([2.0], abs=1e-9)


def test_double_slit_converging_packets_reach_center():
    # with u = +2 the packets meet near the axis and interfere constructively
    dsp = qt.make_system("double_slit", u=2.0)
    rho0 = dsp.rho(np.array([0.0]), 0.0)
    rho_meet = dsp.rho(np.array([0.0]), 1.25)
    assert rho_meet > 1e5 * rho0


def test_double_slit_rejects_negative_time():
    ds = qt.double_slit()
    with pytest.raises(qt.InvalidParameterError):
        ds.psi(np.array([0.5]), -0.1)


# --- 2D oscillator -----------------------------------------------------------

def osc_psi_reference(x, y, t):
    """(x + i y) e^{-(4 i t + x^2 + y^2)/2} / sqrt(pi), the figure-3 state."""
    return (x + 1j * y) * cmath.exp(-0.5 * (4j * t + x * x + y * y)) / math.sqrt(math.pi)


def test_oscillator_psi_matches_reduced_form():
    osc = qt.oscillator_2d()
    for x, y, t in [(1.0, 0.0, 0.0), (0.3, -0.8, 0.6), (-1.5, 0.2, 3.1)]:
        assert osc.psi(np.array([x, y]), t) == pytest.approx(
            osc_psi_reference(x, y, t), rel=1e-13, abs=1e-15)
    assert osc.psi(np.array([1.0, 0.0]), 0.0) == pytest.approx(
        math.exp(-0.5) / math.sqrt(math.pi), rel=1e-14)


def test_oscillator_density_is_stationary():
    osc = qt.oscillator_2d()
    p = np.array([0.7, -0.4])
    vals = [osc.rho(p, t) for t in (0.0, 1.0, 17.3)]
    assert vals[0] == pytest.approx(vals[1], rel=1e-13)
    assert vals[0] == pytest.approx(vals[2], rel=1e-13)


def test_oscillator_node_at_origin():
    osc = qt.oscillator_2d()
    assert osc.rho(np.zeros(2), 0.0) == 0.0


def test_oscillator_rho_closed():
    # omega^2 (x^2 + y^2 + 2 x y cos alpha) e^{-omega r^2} / pi
    osc = qt.oscillator_2d()
    assert osc.rho(np.array([1.0, 0.0]), 0.0) == pytest.approx(math.exp(-1) / math.pi,
                                                               rel=1e-14)
    gen = qt.make_system("oscillator_2d", k0=2.25, alpha=0.8)
    w = 1.5
    for x, y in [(0.6, 0.2), (-0.9, 0.5)]:
        ref = w ** 2 * (x * x + y * y + 2 * x * y * math.cos(0.8)) \
            * math.exp(-w * (x * x + y * y)) / math.pi
        assert gen.rho(np.array([x, y]), 0.0) == pytest.approx(ref, rel=1e-12)
        assert qs.oscillator_rho_closed(gen.params, x, y) == pytest.approx(ref, rel=1e-12)


def test_oscillator_velocity_closed():
    osc = qt.oscillator_2d()
    assert qs.oscillator_velocity_closed(osc.params, 1.0, 0.0) == pytest.approx((0.0, 1.0))
    assert qs.oscillator_velocity_closed(osc.params, 0.0, 2.0) == pytest.approx((-0.5, 0.0))
    gen = qt.make_system("oscillator_2d", alpha=0.8)
    for x, y in [(0.6, 0.2), (-0.9, 0.5)]:
        g = x * x + y * y + 2 * x * y * math.cos(0.8)
        ref = (-y * math.sin(0.8) / g, x * math.sin(0.8) / g)
        assert qs.oscillator_velocity_closed(gen.params, x, y) == pytest.approx(ref, rel=1e-12)


def test_oscillator_qpot_closed():
    # figure-3 reduction: -(r^4 - 4 r^2 + 1) / (2 r^2)
    osc = qt.oscillator_2d()
    assert qs.oscillator_qpot_closed(osc.params, 1.0, 0.0) == pytest.approx(1.0, rel=1e-12)
    assert qs.oscillator_qpot_closed(osc.params, 2.0, 0.0) == pytest.approx(-1 / 8, rel=1e-12)
    for x, y in [(0.5, 1.1), (-0.7, 0.9)]:
        r2 = x * x + y * y
        ref = -(r2 * r2 - 4 * r2 + 1) / (2 * r2)
        assert qs.oscillator_qpot_closed(osc.params, x, y) == pytest.approx(ref, rel=1e-12)


def test_oscillator_closed_fields_singular_at_node():
    osc = qt.oscillator_2d()
    with pytest.raises(qt.SingularityError):
        qs.oscillator_velocity_closed(osc.params, 0.0, 0.0)
    with pytest.raises(qt.SingularityError):
        qs.oscillator_qpot_closed(osc.params, 0.0, 0.0)


def test_oscillator_potential():
    gen = qt.make_system("oscillator_2d", k0=2.25)
    assert gen.potential(np.array([1.0, 2.0])) == pytest.approx(0.5 * 2.25 * 5.0, rel=1e-14)


# --- hydrogen ----------------------------------------------------------------

def hyd211_psi_reference(x, y, z, t):
    """-(x + i y) e^{-r/2 + i t/8} / (8 sqrt(pi))."""
    r = math.sqrt(x * x + y * y + z * z)
    return -(x + 1j * y) * cmath.exp(-r / 2 + 1j * t / 8) / (8 * math.sqrt(math.pi))


def test_hydrogen_psi_matches_reduced_form():
    hyd = qt.hydrogen()
    for x, y, z, t in [(4.0, 0.0, 0.0, 0.0), (1.0, -2.0, 0.5, 3.0), (-3.0, 2.0, -1.0, 100.0)]:
        assert hyd.psi(np.array([x, y, z]), t) == pytest.approx(
            hyd211_psi_reference(x, y, z, t), rel=1e-12)
    assert hyd.psi(np.array([4.0, 0.0, 0.0]), 0.0) == pytest.approx(
        -4 * math.exp(-2) / (8 * math.sqrt(math.pi)), rel=1e-13)


def test_hydrogen_ground_state_finite_at_origin():
    g = qt.make_system("hydrogen", n=1, l=0, m=0)
    assert g.psi(np.zeros(3), 0.0) == pytest.approx(1 / math.sqrt(math.pi), rel=1e-13)


def test_hydrogen_density_is_stationary():
    hyd = qt.hydrogen()
    p = np.array([2.0, 1.0, -0.5])
    assert hyd.rho(p, 0.0) == pytest.approx(hyd.rho(p, 1234.5), rel=1e-12)


def test_hydrogen_velocity_closed():
    hyd = qt.hydrogen()
    assert qs.hydrogen_velocity_closed(hyd.params, 4.0, 0.0, 0.0) == pytest.approx(
        (0.0, 0.25, 0.0))
    assert qs.hydrogen_velocity_closed(hyd.params, 0.0, 4.0, 1.0) == pytest.approx(
        (-0.25, 0.0, 0.0))
    for x, y, z in [(2.0, 1.0, 3.0), (-1.0, -5.0, 0.2)]:
        s2 = x * x + y * y
        assert qs.hydrogen_velocity_closed(hyd.params, x, y, z) == pytest.approx(
            (-y / s2, x / s2, 0.0), rel=1e-12)


def test_hydrogen_qpot_closed():
    hyd = qt.hydrogen()
    assert qs.hydrogen_qpot_closed(hyd.params, 4.0, 0.0, 0.0) == pytest.approx(3 / 32,
                                                                               rel=1e-12)
    for x, y, z in [(2.0, 1.0, 3.0), (-1.0, -5.0, 0.2)]:
        r = math.sqrt(x * x + y * y + z * z)
        s2 = x * x + y * y
        ref = -(s2 * (1 - 8 / r) + 4) / (8 * s2)
        assert qs.hydrogen_qpot_closed(hyd.params, x, y, z) == pytest.approx(ref, rel=1e-12)


def test_hydrogen_qpot_closed_other_eigenstates():
    # E_n + 1/r - m^2/(2 s^2) holds for any eigenstate; cross-check against
    # the stencil route on a state with different (n, l, m)
    h321 = qt.make_system("hydrogen", n=3, l=2, m=1)
    for p in ([6.0, 2.0, 3.0], [10.0, -4.0, 1.0]):
        closed = qs.hydrogen_qpot_closed(h321.params, *p)
        fd = qt.quantum_potential(h321, np.array(p), 0.0)
        assert closed == pytest.approx(fd, abs=2e-7)


def test_hydrogen_potential_and_axis_singularity():
    hyd = qt.hydrogen()
    assert hyd.potential(np.array([4.0, 0.0, 0.0])) == pytest.approx(-0.25, rel=1e-14)
    with pytest.raises(qt.SingularityError):
        qs.hydrogen_velocity_closed(hyd.params, 0.0, 0.0, 2.0)
    with pytest.raises(qt.SingularityError):
        qs.hydrogen_qpot_closed(hyd.params, 0.0, 0.0, 2.0)


# --- shared properties -------------------------------------------------------

@pytest.mark.parametrize("kind,point", [
    ("double_slit", [1.1]),
    ("oscillator_2d", [0.7, -0.4]),
    ("hydrogen", [2.0, 1.0, -0.5]),
])
def test_rho_equals_psi_squared(kind, point):
    sys = qt.make_system(kind)
    p = np.asarray(point)
    for t in (0.0, 0.8):
        assert sys.rho(p, t) == pytest.approx(abs(sys.psi(p, t)) ** 2, rel=1e-13)


def test_continuity_equation_double_slit():
    # d rho/dt + d(rho u)/dx = 0 along the evolving packet
    ds = qt.double_slit()
    h = 1e-5
    for x, t in [(0.8, 0.5), (-2.0, 1.2), (3.0, 0.9)]:
        xa = np.array([x])
        drho_dt = (ds.rho(xa, t + h) - ds.rho(xa, t - h)) / (2 * h)

        def flux(xx):
            p = np.array([xx])
            return ds.rho(p, t) * qt.velocity_grad_s(ds, p, t)[0]

        dflux = (flux(x + h) - flux(x - h)) / (2 * h)
        assert abs(drho_dt + dflux) < 1e-6


@pytest.mark.parametrize("kind,point", [
    ("oscillator_2d", [0.7, 0.3]),
    ("hydrogen", [3.0, 1.0, -2.0]),
])
def test_stationary_flow_divergence_free(kind, point):
    sys = qt.make_system(kind)
    h = 1e-5
    p0 = np.asarray(point, dtype=float)

    def flux(p):
        return sys.rho(p, 0.0) * qt.velocity_grad_s(sys, p, 0.0)

    div = 0.0
    for i in range(sys.dim):
        e = np.zeros(sys.dim)
        e[i] = h
        div += (flux(p0 + e)[i] - flux(p0 - e)[i]) / (2 * h)
    assert abs(div) < 1e-6


def test_vortex_velocity_shared_form():
    # both vortex states carry u = m_eff (-y, x)/s^2 in the plane
    osc = qt.oscillator_2d()
    hyd = qt.hydrogen()
    for x, y in [(0.8, 0.3), (-1.2, 0.6)]:
        vo = qs.oscillator_velocity_closed(osc.params, x, y)
        vh = qs.hydrogen_velocity_closed(hyd.params, x, y, 0.7)
        assert vo == pytest.approx(vh[:2], rel=1e-12)
        assert vh[2] == 0.0


@pytest.mark.parametrize("call", [
    lambda: qt.make_system("nope"),
    lambda: qt.make_system("hydrogen", n=0),
    lambda: qt.make_system("hydrogen", n=2, l=2),
    lambda: qt.make_system("hydrogen", n=2, l=1, m=2),
    lambda: qt.make_system("oscillator_2d", k0=0.0),
    lambda: qt.make_system("double_slit", rho0=-1.0),
    lambda: qt.make_system("double_slit", bogus=1.0),
])
def test_invalid_system_parameters(call):
    with pytest.raises(qt.InvalidParameterError):
        call()
