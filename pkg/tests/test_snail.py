"""Element potential, minimum, Taylor coefficients and array scaling."""

import math

import numpy as np
import numpy.testing as npt
import pytest

from lambda_forge import snail


def spec(alpha=0.4, n=3, phi=0.0, ej=100e9):
    return snail.SnailSpec(alpha=alpha, n_junctions=n, phi_ext_s=phi, ej=ej)


def test_potential_at_zero():
    assert snail.potential(0.0, spec()) == pytest.approx(-3.4, abs=1e-14)


def test_potential_even_at_zero_flux():
    grid = np.linspace(-3.0, 3.0, 41)
    npt.assert_allclose(snail.potential(grid, spec()),
                        snail.potential(-grid, spec()), atol=1e-14)


def test_potential_quarter_flux_value():
    # -0.4 - 3 cos(pi/6), direct evaluation
    value = snail.potential(0.0, spec(phi=0.25))
    assert value == pytest.approx(-0.4 - 3.0 * math.cos(math.pi / 6.0),
                                  abs=1e-12)
    assert value == pytest.approx(-2.99808, abs=1e-5)


def test_minimum_symmetric():
    assert snail.find_minimum(spec()) == pytest.approx(0.0, abs=1e-10)


def test_minimum_antisymmetric_in_flux():
    for phi in (0.1, 0.2, 0.3):
        plus = snail.find_minimum(spec(phi=phi))
        minus = snail.find_minimum(spec(phi=-phi))
        assert plus == pytest.approx(-minus, abs=1e-10)


def test_minimum_stationarity_half_flux():
    # root-finding oracle on the derivative: 0.4 sin(x) = sin((pi - x)/3)
    phi_min = snail.find_minimum(spec(phi=0.5))
    lhs = 0.4 * math.sin(phi_min)
    rhs = math.sin((math.pi - phi_min) / 3.0)
    assert lhs == pytest.approx(rhs, abs=1e-12)
    u1, u2, _, _ = snail.potential_derivatives(phi_min, spec(phi=0.5))
    assert abs(u1) < 1e-12 and u2 > 0.0


def test_coeffs_symmetric_point():
    co = snail.taylor_coeffs(spec())
    assert co.c2 == pytest.approx((0.4 + 1.0 / 3.0) / 2.0, abs=1e-9)
    assert co.c2 == pytest.approx(0.366667, abs=1e-6)
    assert abs(co.c3) < 1e-10
    assert abs(co.phi_min) < 1e-10


def test_coeff_parity_on_flux_grid():
    for phi in np.linspace(0.02, 0.5, 50):
        plus = snail.taylor_coeffs(spec(phi=phi))
        minus = snail.taylor_coeffs(spec(phi=-phi))
        assert plus.c2 == pytest.approx(minus.c2, abs=1e-10)
        assert plus.c3 == pytest.approx(-minus.c3, abs=1e-10)
        assert plus.phi_min == pytest.approx(-minus.phi_min, abs=1e-10)


def test_flux_periodicity():
    for phi in (0.07, 0.23, 0.41):
        one = snail.taylor_coeffs(spec(phi=phi))
        two = snail.taylor_coeffs(spec(phi=phi + 1.0))
        assert one.c2 == pytest.approx(two.c2, abs=1e-10)
        assert one.c3 == pytest.approx(two.c3, abs=1e-10)
        assert one.c4 == pytest.approx(two.c4, abs=1e-10)


def _central_d3(u, x0, h):
    return (u(x0 + 2 * h) - 2 * u(x0 + h) + 2 * u(x0 - h)
            - u(x0 - 2 * h)) / (2 * h**3)


def _central_d4(u, x0, h):
    return (u(x0 + 2 * h) - 4 * u(x0 + h) + 6 * u(x0)
            - 4 * u(x0 - h) + u(x0 - 2 * h)) / h**4


def test_analytic_derivatives_match_finite_differences():
    # independent central-difference oracle.  The second derivative takes the
    # 1e-5 rad step directly; higher orders need larger steps plus Richardson
    # extrapolation or the O(1) potential values cancel to pure roundoff in
    # double precision.
    for phi in (0.0, 0.11, 0.37):
        s = spec(phi=phi)
        x0 = snail.find_minimum(s)
        co = snail.taylor_coeffs(s)
        u = lambda x: snail.potential(x, s)
        h2 = 1e-5
        d2 = (u(x0 + h2) - 2 * u(x0) + u(x0 - h2)) / h2**2
        assert d2 / 2.0 == pytest.approx(co.c2, rel=1e-5)
        h3 = 4e-3
        d3 = (4.0 * _central_d3(u, x0, h3 / 2) - _central_d3(u, x0, h3)) / 3.0
        assert d3 / 6.0 == pytest.approx(co.c3, rel=1e-5, abs=1e-7)
        h4 = 2e-2
        d4 = (4.0 * _central_d4(u, x0, h4 / 2) - _central_d4(u, x0, h4)) / 3.0
        assert d4 / 24.0 == pytest.approx(co.c4, rel=1e-5, abs=1e-7)


def test_single_well_over_regime():
    # c2 stays positive across the single-well design space
    for alpha in np.linspace(0.05, 0.45, 9):
        for phi in np.linspace(0.0, 0.5, 11):
            co = snail.taylor_coeffs(spec(alpha=alpha, phi=phi))
            assert co.c2 > 0.0


def test_array_identity():
    co = snail.taylor_coeffs(spec(phi=0.2))
    same = snail.array_coeffs(co, 1)
    assert same == co


def test_array_scaling():
    co = snail.taylor_coeffs(spec(phi=0.2))
    tot = snail.array_coeffs(co, 5)
    assert tot.c2 == pytest.approx(co.c2 / 5.0, rel=1e-14)
    assert tot.c3 == pytest.approx(co.c3 / 25.0, rel=1e-14)
    assert tot.c4 == pytest.approx(co.c4 / 125.0, rel=1e-14)
    assert tot.l_s == pytest.approx(5.0 * co.l_s, rel=1e-14)


def test_array_c3_dilution_example():
    from dataclasses import replace

    co = replace(snail.taylor_coeffs(spec(phi=0.2)), c3=0.05)
    assert snail.array_coeffs(co, 5).c3 == pytest.approx(0.002, abs=1e-15)


def test_flux_map():
    assert snail.flux_map(6.5) == pytest.approx(0.108333, abs=1e-6)
    assert snail.flux_map(0.0) == 0.0
    assert snail.flux_map(0.5) == pytest.approx(0.008333, abs=1e-6)


def test_coupling_scale_grows_with_flux():
    # |c3| of the array rises monotonically across the half-quantum bias
    # points of the atom loop (element flux stays in the rising branch)
    mags = []
    for m in range(7):
        phi_s = snail.flux_map(m + 0.5)
        mags.append(abs(snail.taylor_coeffs(spec(phi=phi_s)).c3) / 25.0)
    assert all(b > a for a, b in zip(mags, mags[1:]))
    assert mags[0] > 0.0


def test_alpha_range_enforced():
    with pytest.raises(ValueError):
        snail.SnailSpec(alpha=0.6, n_junctions=3, phi_ext_s=0.0, ej=1e9)
    with pytest.raises(ValueError):
        snail.SnailSpec(alpha=0.0, n_junctions=3, phi_ext_s=0.0, ej=1e9)


def test_inductance_from_c2():
    from lambda_forge.units import H_PLANCK, PHI0_REDUCED

    co = snail.taylor_coeffs(spec())
    expected = PHI0_REDUCED**2 / (2.0 * co.c2 * 100e9 * H_PLANCK)
    assert co.l_s == pytest.approx(expected, rel=1e-14)
