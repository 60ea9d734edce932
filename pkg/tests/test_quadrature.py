"""Radial quadrature and the double interaction integral."""

import math

import numpy as np
import pytest

from epblowup.core import RadialGrid
from epblowup.quadrature import (
    NonFiniteSampleError,
    QuadratureSettings,
    integrate_radial,
    interaction_integral,
    refinement_ratio,
)

# closed forms used below (n = 3 throughout):
#   int of exp(-r^2) over R^3       = pi**1.5
#   uniform ball rho=1, R=1 self-interaction with the 1/|x-y| kernel:
#   32 pi^2 / 15
GAUSS_MASS = math.pi ** 1.5
BALL_SELF = 32.0 * math.pi**2 / 15.0
GAUSS_SELF = math.sqrt(2.0) * math.pi ** 2.5


def test_settings_validate_rule():
    QuadratureSettings(rule="midpoint")
    with pytest.raises(ValueError):
        QuadratureSettings(rule="gauss")


def test_gaussian_mass_both_rules():
    g = RadialGrid(8.0, 1024)
    f = np.exp(-g.centers**2)
    simpson = integrate_radial(f, g, 3, "simpson")
    midpoint = integrate_radial(f, g, 3, "midpoint")
    assert simpson == pytest.approx(GAUSS_MASS, rel=1e-10)
    # midpoint converges at second order; measured 1.02e-5 at 1024 cells
    assert midpoint == pytest.approx(GAUSS_MASS, rel=2e-5)
    assert abs(simpson - GAUSS_MASS) < abs(midpoint - GAUSS_MASS)


def test_midpoint_exact_for_ball():
    # shell-average data model: a uniform ball sampled at cell centers has
    # exact cell masses except in the single cut cell
    g = RadialGrid(8.0, 2000)  # 2000 puts the jump exactly on a cell edge
    f = (g.centers < 1.0).astype(float)
    assert integrate_radial(f, g, 3, "midpoint") == pytest.approx(
        4.0 * math.pi / 3.0, rel=1e-12)


def test_simpson_needs_odd_samples_handled():
    # even cell counts must still work (composite rule with end correction)
    g = RadialGrid(4.0, 64)
    f = np.ones(64)
    out = integrate_radial(f, g, 3, "simpson")
    assert out == pytest.approx(4.0 * math.pi / 3.0 * 64.0, rel=1e-6)


def test_rejects_nonfinite_samples():
    g = RadialGrid(4.0, 32)
    f = np.ones(32)
    f[5] = np.nan
    with pytest.raises(NonFiniteSampleError):
        integrate_radial(f, g, 3)


def test_interaction_ball_closed_form():
    g = RadialGrid(8.0, 1024)
    rho = (g.centers < 1.0).astype(float)
    val = interaction_integral(rho, g, 3)
    assert val == pytest.approx(BALL_SELF, rel=2e-3)


def test_interaction_gaussian_closed_form():
    g = RadialGrid(8.0, 1024)
    rho = np.exp(-g.centers**2)
    val = interaction_integral(rho, g, 3)
    assert val == pytest.approx(GAUSS_SELF, rel=1e-4)


def test_interaction_scaling_law():
    # kernel max(r,s)^(2-n): rho_lambda(x) = rho(x/lambda) scales the
    # integral by lambda**(n + 2)
    g = RadialGrid(8.0, 1024)
    rho = np.exp(-g.centers**2)
    rho2 = np.exp(-(g.centers / 2.0) ** 2)
    v1 = interaction_integral(rho, g, 3)
    v2 = interaction_integral(rho2, g, 3)
    assert v2 / v1 == pytest.approx(2.0**5, rel=1e-3)


def test_refinement_ratio_helper():
    assert refinement_ratio([1.0 + 0.4, 1.0 + 0.1, 1.0 + 0.025], 1.0) == \
        pytest.approx(4.0)
    assert refinement_ratio([2.0, 2.0], 2.0) == float("inf")


def test_gaussian_mass_refinement_is_second_order():
    vals = []
    for cells in (128, 256, 512):
        g = RadialGrid(8.0, cells)
        vals.append(integrate_radial(np.exp(-g.centers**2), g, 3, "midpoint"))
    ratio = refinement_ratio(vals, GAUSS_MASS)
    assert 3.2 < ratio < 4.8
