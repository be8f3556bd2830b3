"""
Edge intensity curves and their unit-interval (integral mapping) sampling
"""

import math
from typing import Callable, Iterable

import numpy as np
from scipy import integrate, special


def erf_edge(x, location: float, sigma: float, low: float, difference: float):
    """Erf edge model: `low` far below `location`, `low + difference` far above"""
    return difference / 2.0 * (special.erf((np.asarray(x) - location) / (math.sqrt(2.0) * sigma)) + 1.0) + low


def step_edge(x, location: float, low_side: float, high_side: float):
    """Ideal step: `low_side` for x < location, `high_side` above"""
    return np.where(np.asarray(x) < location, low_side, high_side)


def integrate_pixels(
    curve: Callable[[float], float],
    positions: Iterable[float],
    tolerance: float = 1e-6,
    breakpoint: float = None,
) -> np.ndarray:
    """
    Pixel intensities as unit-interval integrals of a subpixel curve

    Pixel at position p integrates the curve over (p - 0.5, p + 0.5).
    """
    values = []
    for p in positions:
        lower, upper = p - 0.5, p + 0.5
        points = [breakpoint] if breakpoint is not None and lower < breakpoint < upper else None
        value, _ = integrate.quad(curve, lower, upper, epsabs=tolerance, points=points)
        values.append(value)
    return np.asarray(values, dtype=np.float64)


def erf_pixels(positions, location: float, sigma: float, low: float, difference: float, tolerance: float = 1e-6) -> np.ndarray:
    """Integral-sampled erf profile at the given pixel positions"""
    return integrate_pixels(
        lambda t: float(erf_edge(t, location, sigma, low, difference)),
        positions,
        tolerance=tolerance,
        breakpoint=location,
    )


def step_pixels(positions, location: float, low_side: float, high_side: float) -> np.ndarray:
    """Exact integral-sampled step profile (closed form coverage)"""
    p = np.asarray(positions, dtype=np.float64)
    coverage = np.clip(location - (p - 0.5), 0.0, 1.0)
    return coverage * low_side + (1.0 - coverage) * high_side


def erf_cdf_integral(lower, upper, location, scale):
    """
    Exact mean of the normalized erf step over (lower, upper)

    Uses the antiderivative of 0.5 * (1 + erf(u)), u = (x - location) / (sqrt(2) * scale).
    """
    s = math.sqrt(2.0) * np.asarray(scale, dtype=np.float64)

    def antiderivative(x):
        u = (x - location) / s
        return 0.5 * (x - location) + 0.5 * s * (u * special.erf(u) + np.exp(-u * u) / math.sqrt(math.pi))

    return (antiderivative(upper) - antiderivative(lower)) / (upper - lower)
