"""Cruise fuel-burn and tardiness cost functions.

Fuel burn over the cruise phase is modeled as

    F(f) = alpha/f + beta/f**2 + gamma*f**3 + nu*f**2   [kg, f in minutes]

which is strictly convex on f > 0 when all four coefficients are positive.
Its unique minimizer is the most fuel-efficient (maximum-range) cruise time.
Dollar cost combines fuel price and a CO2 surcharge proportional to burn.
Arrival tardiness b (minutes past the grace period) costs rho * b**zeta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class CalibrationError(ValueError):
    """Raised when no positive-coefficient fit matches the calibration targets."""


@dataclass(frozen=True)
class FuelCoeffs:
    """Coefficients of the cruise fuel-burn curve; all strictly positive."""

    alpha: float
    beta: float
    gamma: float
    nu: float

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "nu"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"fuel coefficient {name} must be > 0")

    def scaled(self, factor: float) -> "FuelCoeffs":
        return FuelCoeffs(self.alpha * factor, self.beta * factor,
                          self.gamma * factor, self.nu * factor)


@dataclass(frozen=True)
class CruiseEvaluation:
    cruise_time: float
    fuel_kg: float
    cost: float
    first_derivative: float
    second_derivative: float


def fuel_burn(coeffs: FuelCoeffs, f: float) -> float:
    """Fuel burned (kg) over a cruise of f minutes."""
    if f <= 0.0:
        raise ValueError(f"cruise time must be positive, got {f}")
    return (coeffs.alpha / f + coeffs.beta / f**2
            + coeffs.gamma * f**3 + coeffs.nu * f**2)


def fuel_burn_deriv(coeffs: FuelCoeffs, f: float) -> float:
    if f <= 0.0:
        raise ValueError(f"cruise time must be positive, got {f}")
    return (-coeffs.alpha / f**2 - 2.0 * coeffs.beta / f**3
            + 3.0 * coeffs.gamma * f**2 + 2.0 * coeffs.nu * f)


def fuel_burn_deriv2(coeffs: FuelCoeffs, f: float) -> float:
    if f <= 0.0:
        raise ValueError(f"cruise time must be positive, got {f}")
    return (2.0 * coeffs.alpha / f**3 + 6.0 * coeffs.beta / f**4
            + 6.0 * coeffs.gamma * f + 2.0 * coeffs.nu)


def unit_fuel_cost(config) -> float:
    """Dollars per kg of fuel burned, including the CO2 surcharge."""
    return config.c_fuel + config.emission_factor * config.c_co2


def fuel_emission_cost(coeffs: FuelCoeffs, f: float, config) -> float:
    """Combined fuel and emission cost ($) of a cruise of f minutes."""
    return unit_fuel_cost(config) * fuel_burn(coeffs, f)


def evaluate_cruise(coeffs: FuelCoeffs, f: float, config) -> CruiseEvaluation:
    return CruiseEvaluation(
        cruise_time=f,
        fuel_kg=fuel_burn(coeffs, f),
        cost=fuel_emission_cost(coeffs, f, config),
        first_derivative=fuel_burn_deriv(coeffs, f),
        second_derivative=fuel_burn_deriv2(coeffs, f),
    )


# Search bracket for the burn-curve minimizer, in minutes.  Generous on both
# ends so that extreme (e.g. unscaled) coefficient sets stay bracketed.
_MRC_LO = 1e-3
_MRC_HI = 1e6


def mrc_cruise_time(coeffs: FuelCoeffs) -> float:
    """Cruise time minimizing fuel burn (safeguarded Newton on F')."""
    lo, hi = _MRC_LO, _MRC_HI
    # F' is increasing (F strictly convex): negative at lo, positive at hi.
    f = math.sqrt(lo * hi)
    for _ in range(200):
        g = fuel_burn_deriv(coeffs, f)
        if g > 0.0:
            hi = f
        else:
            lo = f
        h = fuel_burn_deriv2(coeffs, f)
        step = g / h
        nxt = f - step
        if not (lo < nxt < hi):
            nxt = 0.5 * (lo + hi)  # bisection fallback
        tol = 1e-10 * max(1.0, fuel_burn(coeffs, f) / f)
        if abs(g) <= tol and abs(nxt - f) <= 1e-12 * f:
            break
        f = nxt
    return f


def calibrate_coeffs(target_mrc: float, target_rate: float,
                     gamma: float = 1e-5, nu: float = 1e-3,
                     beta_fraction: float = 0.01) -> FuelCoeffs:
    """Fit a burn curve with a given minimizer and burn rate at the minimizer.

    The curve is pinned down by forcing F'(target_mrc) = 0 with
    beta = beta_fraction * alpha, then rescaling all four coefficients so
    F(target_mrc) / target_mrc equals target_rate (kg/min).  The shape pair
    (gamma, nu) fixes the remaining degrees of freedom.
    """
    if target_mrc <= 0.0 or target_rate <= 0.0:
        raise CalibrationError("target_mrc and target_rate must be positive")
    if gamma < 0.0 or nu < 0.0 or (gamma == 0.0 and nu == 0.0):
        raise CalibrationError("shape coefficients must be >= 0 and not both 0")
    u = target_mrc
    denom = 1.0 / u**2 + 2.0 * beta_fraction / u**3
    alpha = (3.0 * gamma * u**2 + 2.0 * nu * u) / denom
    if alpha <= 0.0:
        raise CalibrationError("calibration requires a negative alpha")
    base = FuelCoeffs(alpha, beta_fraction * alpha, gamma, nu)
    scale = target_rate * u / fuel_burn(base, u)
    result = base.scaled(scale)
    roundtrip = mrc_cruise_time(result)
    if abs(roundtrip - u) > 1e-6:
        raise CalibrationError(
            f"calibration round-trip failed: minimizer {roundtrip} vs {u}")
    return result


def tardiness_penalty(b: float, config) -> float:
    """Penalty ($) for b minutes of tardiness beyond the grace period."""
    if b < 0.0:
        raise ValueError(f"tardiness must be nonnegative, got {b}")
    return config.rho * b**config.zeta
