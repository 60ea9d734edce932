"""Grid, profile construction and config parsing."""

import math

import numpy as np
import pytest

from epblowup.core import (
    ConfigError,
    ModelParams,
    ProfileError,
    ProfileSpec,
    RadialGrid,
    build_profile,
    parse_config,
    parse_config_text,
    validate_state,
)

P3 = ModelParams(n=3, gamma=5.0 / 3.0, delta=-1)


def test_grid_layout():
    g = RadialGrid(8.0, 64)
    assert g.dr == 0.125
    assert g.centers[0] == pytest.approx(0.0625)
    assert g.centers[-1] == pytest.approx(8.0 - 0.0625)
    assert len(g.centers) == 64


def test_shell_weights_tile_the_ball():
    g = RadialGrid(2.0, 512)
    w = g.shell_weights(3)
    # exact radial measure: cells tile [0, r_max], so the weights sum to
    # r_max**n / n and the full integral carries the n * omega_n factor
    assert np.sum(w) == pytest.approx(2.0**3 / 3.0, rel=1e-12)
    ball = 3.0 * (4.0 * math.pi / 3.0) * np.sum(w)
    assert ball == pytest.approx(4.0 * math.pi / 3.0 * 2.0**3, rel=1e-12)


def test_ball_profile_mass_and_support():
    g = RadialGrid(8.0, 1024)
    st = build_profile(ProfileSpec(kind="ball", amplitude=2.0, radius=1.5),
                       g, P3, mode="IEP")
    inside = g.centers < 1.5 - g.dr
    outside = g.centers > 1.5 + g.dr
    assert np.all(st.rho[inside] == 2.0)
    assert np.all(st.rho[outside] == 0.0)
    m = 4.0 * math.pi * np.sum(st.rho * g.shell_weights(3))
    assert m == pytest.approx(2.0 * 4.0 * math.pi / 3.0 * 1.5**3, rel=1e-5)


def test_gaussian_profile_and_linear_velocity():
    g = RadialGrid(8.0, 256)
    spec = ProfileSpec(kind="gaussian", amplitude=0.7, width=1.3,
                       velocity_kind="linear", velocity_alpha=-0.5)
    st = build_profile(spec, g, P3, mode="IEP")
    assert st.rho[0] == pytest.approx(0.7 * math.exp(-(g.centers[0] / 1.3) ** 2))
    assert np.allclose(st.u_r, -0.5 * g.centers)
    # isentropic closure
    assert np.allclose(st.p, st.rho ** P3.gamma)
    assert st.entropy is None


def test_ep_profile_entropy_pressure():
    g = RadialGrid(8.0, 128)
    s0 = 1.5 * math.log(0.5)  # exp(s0 / c_nu) = 0.5 for gamma = 5/3
    st = build_profile(ProfileSpec(kind="ball", amplitude=1.0, radius=1.0, s0=s0),
                       g, P3, mode="EP")
    inside = g.centers < 1.0 - g.dr
    assert np.allclose(st.p[inside], 0.5)
    assert st.entropy is not None
    assert np.allclose(st.entropy, s0)


def test_profile_rejects_bad_kind_and_velocity():
    with pytest.raises(ProfileError):
        ProfileSpec(kind="vortex")
    with pytest.raises(ProfileError):
        ProfileSpec(kind="ball", velocity_kind="spiral")


def test_tabulated_velocity_needs_table():
    g = RadialGrid(8.0, 64)
    spec = ProfileSpec(kind="gaussian", velocity_kind="tabulated")
    with pytest.raises(ProfileError):
        build_profile(spec, g, P3)


def test_model_params_validation():
    with pytest.raises(ValueError):
        ModelParams(n=2, gamma=1.4, delta=-1)
    with pytest.raises(ValueError):
        ModelParams(n=3, gamma=1.0, delta=-1)
    with pytest.raises(ValueError):
        ModelParams(n=3, gamma=1.4, delta=0)


def test_validate_state_flags_problems():
    import dataclasses
    g = RadialGrid(8.0, 64)
    st = build_profile(ProfileSpec(kind="gaussian"), g, P3)
    assert validate_state(st, g, P3) == []
    rho = st.rho.copy()
    rho[3] = -1.0
    bad = dataclasses.replace(st, rho=rho)
    msgs = validate_state(bad, g, P3)
    assert any("density" in m for m in msgs)


CONFIG_TEXT = """
# comment and blank lines are fine

mode = IEP
kind = gaussian
amplitude = 0.25
width = 1.0
velocity.kind = linear
velocity.alpha = 2.0
model.n = 3
model.gamma = 1.5
model.delta = -1
grid.r_max = 8.0
grid.cells = 512
solver.t_end = 0.4
"""


def test_parse_config_text():
    setup = parse_config_text(CONFIG_TEXT)
    assert setup.mode == "IEP"
    assert setup.params.gamma == 1.5
    assert setup.grid.cells == 512
    assert setup.spec.velocity_alpha == 2.0
    assert setup.solver_options["t_end"] == 0.4
    st = setup.build_state()
    assert st.rho[0] == pytest.approx(0.25, rel=1e-3)


def test_parse_config_rejects_unknown_key():
    with pytest.raises(ConfigError):
        parse_config_text(CONFIG_TEXT + "\nsolver.warp = 9\n")
    with pytest.raises(ConfigError):
        parse_config_text("mode = IEP\nkind = gaussian\nmodel.n = three\n")


def test_bundled_configs_parse(pytestconfig):
    root = pytestconfig.rootpath
    for name in ("gaussian_collapse.cfg", "ball_collapse.cfg",
                 "expanding_cloud.cfg"):
        setup = parse_config(root / "configs" / name)
        errs = validate_state(setup.build_state(), setup.grid, setup.params)
        assert errs == [], f"{name}: {errs}"
