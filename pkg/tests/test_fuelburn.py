import math

import pytest
from hypothesis import given, strategies as st

from skedfit.fuelburn import (CalibrationError, FuelCoeffs, calibrate_coeffs,
                              evaluate_cruise, fuel_burn, fuel_burn_deriv,
                              fuel_burn_deriv2, fuel_emission_cost,
                              mrc_cruise_time, tardiness_penalty,
                              unit_fuel_cost)
from skedfit.instance import CostConfig

coeff_values = st.floats(min_value=1e-6, max_value=1e6,
                         allow_nan=False, allow_infinity=False)


def coeffs_strategy():
    return st.builds(FuelCoeffs, alpha=coeff_values, beta=coeff_values,
                     gamma=coeff_values, nu=coeff_values)


def bisect_root(fun, lo, hi, tol=1e-12, iters=200):
    """Independent oracle: bisection for a sign change of fun."""
    flo = fun(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = fun(mid)
        if fm == 0.0 or hi - lo < tol * max(1.0, mid):
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


class TestFuelBurn:
    def test_single_term(self):
        c = FuelCoeffs(alpha=1e-12, beta=1e-12, gamma=1e-12, nu=1.0)
        assert fuel_burn(c, 2.0) == pytest.approx(4.0, abs=1e-9)

    def test_unit_sum(self):
        c = FuelCoeffs(alpha=1.0, beta=1e-12, gamma=1.0, nu=1e-12)
        assert fuel_burn(c, 1.0) == pytest.approx(2.0, abs=1e-9)

    def test_nonpositive_cruise_rejected(self):
        c = FuelCoeffs(1, 1, 1, 1)
        with pytest.raises(ValueError):
            fuel_burn(c, 0.0)
        with pytest.raises(ValueError):
            fuel_burn(c, -3.0)

    def test_calibrated_rate_hits_target(self):
        # wide-body reference: 87 kg/min at its efficient cruise time
        c = calibrate_coeffs(154.0, 87.0)
        u = mrc_cruise_time(c)
        assert fuel_burn(c, u) / u == pytest.approx(87.0, abs=0.5)

    def test_derivatives_match_finite_differences_on_grid(self):
        # calibrated per-type curves checked across the compression range
        for rate, u in ((87.0, 154.0), (40.0, 152.0), (55.0, 95.0)):
            c = calibrate_coeffs(u, rate)
            for k in range(1000):
                f = 0.85 * u + (0.30 * u) * k / 999.0
                h = 1e-4 * f
                fd1 = (fuel_burn(c, f + h) - fuel_burn(c, f - h)) / (2 * h)
                exact = fuel_burn_deriv(c, f)
                scale = max(1.0, abs(exact), fuel_burn(c, f) / f)
                assert abs(exact - fd1) <= 1e-6 * scale

    @given(coeffs_strategy(), st.floats(min_value=1.0, max_value=500.0))
    def test_derivative_sign_structure(self, c, f):
        u = mrc_cruise_time(c)
        g = fuel_burn_deriv(c, f)
        if f < 0.999 * u:
            assert g < 1e-9
        elif f > 1.001 * u:
            assert g > -1e-9

    @given(coeffs_strategy(), st.floats(min_value=1.0, max_value=500.0))
    def test_strict_convexity(self, c, f):
        assert fuel_burn_deriv2(c, f) > 0.0


class TestEmissionCost:
    def test_combined_price(self):
        cfg = CostConfig(c_fuel=1.2, c_co2=0.2)
        assert unit_fuel_cost(cfg) == pytest.approx(1.83)

    def test_zero_prices(self):
        cfg = CostConfig(c_fuel=0.0, c_co2=0.0)
        c = FuelCoeffs(1, 1, 1, 1)
        assert fuel_emission_cost(c, 50.0, cfg) == 0.0

    def test_product(self):
        cfg = CostConfig(c_fuel=1.2, c_co2=0.2)
        c = calibrate_coeffs(100.0, 1.0)
        burn = fuel_burn(c, 100.0)
        assert fuel_emission_cost(c, 100.0, cfg) == pytest.approx(
            1.83 * burn)

    def test_emission_factor_override(self):
        cfg = CostConfig(c_fuel=1.0, c_co2=1.0, emission_factor=2.0)
        assert unit_fuel_cost(cfg) == pytest.approx(3.0)


class TestMrc:
    def test_closed_form_quartic_root(self):
        # alpha=1, gamma=1 only: F' = -1/f^2 + 3 f^2 = 0 at 3^(-1/4)
        c = FuelCoeffs(alpha=1.0, beta=1e-15, gamma=1.0, nu=1e-15)
        assert mrc_cruise_time(c) == pytest.approx(3.0 ** -0.25, rel=1e-8)

    @given(coeffs_strategy())
    def test_scaling_invariance(self, c):
        assert mrc_cruise_time(c.scaled(10.0)) == pytest.approx(
            mrc_cruise_time(c), rel=1e-8)

    @given(st.floats(min_value=1e-3, max_value=1e3),
           st.floats(min_value=1e-9, max_value=1e3))
    def test_matches_bisection_oracle(self, alpha, gamma):
        c = FuelCoeffs(alpha=alpha, beta=1e-15, gamma=gamma, nu=1e-15)
        root = bisect_root(lambda f: fuel_burn_deriv(c, f), 1e-3, 1e6)
        expected = (alpha / (3.0 * gamma)) ** 0.25
        assert mrc_cruise_time(c) == pytest.approx(root, rel=1e-8)
        assert mrc_cruise_time(c) == pytest.approx(expected, rel=1e-6)

    @given(coeffs_strategy())
    def test_decreasing_then_increasing(self, c):
        u = mrc_cruise_time(c)
        assert fuel_burn(c, u * 0.99) >= fuel_burn(c, u) - 1e-12
        assert fuel_burn(c, u * 1.01) >= fuel_burn(c, u) - 1e-12

    @given(coeffs_strategy())
    def test_first_order_condition(self, c):
        u = mrc_cruise_time(c)
        assert abs(fuel_burn_deriv(c, u)) <= \
            1e-10 * max(1.0, fuel_burn(c, u) / u)


class TestCalibration:
    def test_roundtrip(self):
        c = calibrate_coeffs(124.0, 87.0)
        assert mrc_cruise_time(c) == pytest.approx(124.0, abs=1e-6)
        assert fuel_burn(c, 124.0) == pytest.approx(87.0 * 124.0, rel=1e-9)

    def test_rate_doubling_scales_coefficients(self):
        c1 = calibrate_coeffs(90.0, 40.0)
        c2 = calibrate_coeffs(90.0, 80.0)
        assert c2.alpha == pytest.approx(2 * c1.alpha, rel=1e-9)
        assert c2.nu == pytest.approx(2 * c1.nu, rel=1e-9)
        assert mrc_cruise_time(c2) == pytest.approx(90.0, abs=1e-6)

    def test_zero_shape_rejected(self):
        with pytest.raises(CalibrationError):
            calibrate_coeffs(100.0, 50.0, gamma=0.0, nu=0.0)

    @given(st.floats(min_value=5.0, max_value=500.0),
           st.floats(min_value=1.0, max_value=200.0))
    def test_roundtrip_property(self, u, rate):
        c = calibrate_coeffs(u, rate)
        assert mrc_cruise_time(c) == pytest.approx(u, abs=1e-6)


class TestTardinessPenalty:
    def test_zero(self):
        assert tardiness_penalty(0.0, CostConfig(rho=5.0)) == 0.0

    def test_four_minutes(self):
        assert tardiness_penalty(4.0, CostConfig(rho=5.0)) == \
            pytest.approx(40.0)

    def test_twenty_two_minutes(self):
        # 5 * 22^1.5; the narrative's published figure (552) differs
        assert tardiness_penalty(22.0, CostConfig(rho=5.0)) == \
            pytest.approx(5.0 * 22.0 * math.sqrt(22.0), rel=1e-12)
        assert tardiness_penalty(22.0, CostConfig(rho=5.0)) == \
            pytest.approx(515.9457336, abs=1e-4)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            tardiness_penalty(-1.0, CostConfig())

    @given(st.floats(min_value=0, max_value=1e4),
           st.floats(min_value=0, max_value=1e4))
    def test_convex_and_increasing(self, a, b):
        cfg = CostConfig(rho=3.0)
        mid = tardiness_penalty((a + b) / 2.0, cfg)
        assert mid <= (tardiness_penalty(a, cfg)
                       + tardiness_penalty(b, cfg)) / 2.0 + 1e-7
        if a <= b:
            assert tardiness_penalty(a, cfg) <= \
                tardiness_penalty(b, cfg) + 1e-12


def test_evaluate_cruise_fields():
    cfg = CostConfig(c_fuel=1.2, c_co2=0.2)
    c = calibrate_coeffs(120.0, 60.0)
    ev = evaluate_cruise(c, 110.0, cfg)
    assert ev.fuel_kg > 0
    assert ev.cost == pytest.approx(1.83 * ev.fuel_kg)
    assert ev.second_derivative > 0
