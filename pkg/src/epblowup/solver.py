"""Radial finite-volume solver for the self-forced gas equations.

Desk-scale scheme meant to exercise the diagnostics, not a production
hydro code.  Conservative update on the radial metric with exact shell
volumes and r**(n-1) face areas, Rusanov (local Lax-Friedrichs) fluxes,
optional minmod MUSCL reconstruction, two-stage Heun time stepping, and a
fresh potential solve at every stage.

Closures:
  IEP  -- conserved (rho, rho u),       pressure rho**gamma;
  EP   -- conserved (rho, rho u, E),    E = rho u^2 / 2 + p / (gamma - 1),
          energy flux (E + p) u, and (matching the conserved total-energy
          identity of the continuum system) a zero right-hand side in the
          energy equation.  Set work_term=True to add the force work
          delta rho u dPhi/dr for comparison runs.

The momentum source splits into the well-balanced geometric part
p (a_out - a_in) / w -- which cancels the flux of a uniform pressure
exactly -- and the interaction force delta rho dPhi/dr.

Runs stop early on positivity failure, on a CFL collapse of the time
step, or when max |d(u_r)/dr| exceeds gradient_stop_factor times its
initial scale (steepening detector).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .core import ModelParams, RadialGrid, RadialState
from .diagnostics import (FunctionalSet, QuantitySet, compute_functionals,
                          compute_quantities, finite_difference_rates,
                          NonuniformSpacingError)
from .poisson import radial_force, solve_potential

__all__ = ["SolverConfig", "RunResult", "step", "run"]


@dataclass(frozen=True)
class SolverConfig:
    """Run controls.

    fixed_dt pins the step size (refinement studies); otherwise the step
    adapts to cfl * dr / max(|u| + c).  output_stride samples diagnostics
    every so many steps.  density_floor must stay at least ten orders below
    the initial peak density; it is revalidated at run start.
    """

    t_end: float
    cfl: float = 0.4
    density_floor: float = 1e-14
    flux: str = "rusanov"
    reconstruction: str = "muscl"
    output_stride: int = 1
    fixed_dt: Optional[float] = None
    gradient_stop_factor: float = 1e3
    force_on: bool = True
    work_term: bool = False
    quad_rule: str = "midpoint"

    def __post_init__(self):
        if not (self.t_end > 0.0):
            raise ValueError(f"t_end must be positive, got {self.t_end}")
        if not (0.0 < self.cfl < 1.0):
            raise ValueError(f"cfl must lie in (0, 1), got {self.cfl}")
        if not (self.density_floor > 0.0):
            raise ValueError("density_floor must be positive")
        if self.flux != "rusanov":
            raise ValueError(f"unknown flux {self.flux!r}")
        if self.reconstruction not in ("pc", "muscl"):
            raise ValueError(f"unknown reconstruction {self.reconstruction!r}")
        if self.output_stride < 1:
            raise ValueError("output_stride must be >= 1")
        if self.fixed_dt is not None and self.fixed_dt <= 0.0:
            raise ValueError("fixed_dt must be positive when given")


@dataclass
class RunResult:
    """Diagnostics series plus how (and when) the run ended.

    stop_reason is one of 't_end', 'positivity', 'cfl', 'gradient-blowup'.
    extras holds per-sample monitor channels (velocity-gradient norm,
    entropy minimum) keyed by name.
    """

    quantities: list[QuantitySet]
    functionals: list[FunctionalSet]
    stop_reason: str
    final_state: RadialState
    steps_taken: int
    extras: dict = field(default_factory=dict)

    @property
    def times(self) -> np.ndarray:
        return np.array([q.time for q in self.quantities])

    def summary(self, params: ModelParams) -> dict:
        qs = self.quantities
        m0 = qs[0].mass
        out = {
            "stop_reason": self.stop_reason,
            "steps": self.steps_taken,
            "t_final": qs[-1].time,
            "samples": len(qs),
            "mass_drift_rel": max(abs(q.mass - m0) for q in qs) / abs(m0),
            "max_grad_u": max(self.extras.get("max_grad_u", [0.0])),
        }
        # each mode has its own conserved energy; the other one is not a law
        if self.final_state.mode == "IEP":
            out["ie_drift_rel"] = max(
                abs(q.ie_total - qs[0].ie_total) for q in qs
            ) / max(abs(qs[0].ie_total), 1e-300)
            out["ek_ei_drift_rel"] = None
        else:
            out["ie_drift_rel"] = None
            out["ek_ei_drift_rel"] = max(
                abs((q.e_kin + q.e_int) - (qs[0].e_kin + qs[0].e_int)) for q in qs
            ) / max(abs(qs[0].e_kin + qs[0].e_int), 1e-300)
        if "min_entropy" in self.extras:
            out["min_entropy"] = min(self.extras["min_entropy"])
        # identity residuals need uniform sampling; report null otherwise
        try:
            rates = finite_difference_rates(qs, ("mass", "half_inertia",
                                                 "momentum_weight"))
            f_mid = np.array([q.momentum_weight for q in qs[1:-1]])
            virial_field = "ih_delta" if self.final_state.mode == "IEP" else "h_delta"
            virials = np.array([
                getattr(f, virial_field) for f in self.functionals[1:-1]
            ])
            out["residual_dG_dt"] = float(np.max(np.abs(rates["half_inertia"] - f_mid)))
            out["residual_dF_dt"] = float(np.max(np.abs(rates["momentum_weight"] - virials)))
            out["residual_dM_dt"] = float(np.max(np.abs(rates["mass"])))
        except NonuniformSpacingError:
            out["residual_dG_dt"] = None
            out["residual_dF_dt"] = None
            out["residual_dM_dt"] = None
        return out


# --------------------------------------------------------------------------
# Scheme internals
# --------------------------------------------------------------------------

def _pressure(rho: np.ndarray, ene: Optional[np.ndarray], mom: np.ndarray,
              params: ModelParams, entropy0: Optional[np.ndarray],
              mode: str) -> np.ndarray:
    if mode == "IEP":
        return rho ** params.gamma
    kinetic = 0.5 * mom**2 / rho
    return (params.gamma - 1.0) * (ene - kinetic)


def _minmod(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    s = np.sign(a)
    return np.where(s * np.sign(b) > 0.0, s * np.minimum(np.abs(a), np.abs(b)), 0.0)


def _reconstruct(v: np.ndarray, scheme: str) -> tuple[np.ndarray, np.ndarray]:
    """Face states (left, right) at interior faces 1..N-1 plus outflow face N."""
    if scheme == "pc":
        left = v[:-1]
        right = v[1:]
    else:
        dv = np.zeros_like(v)
        dv[1:-1] = _minmod(v[1:-1] - v[:-2], v[2:] - v[1:-1])
        left = v[:-1] + 0.5 * dv[:-1]
        right = v[1:] - 0.5 * dv[1:]
    # outflow face: extrapolate the last cell as-is
    left = np.append(left, v[-1])
    right = np.append(right, v[-1])
    return left, right


def _rhs(rho, mom, ene, grid: RadialGrid, params: ModelParams,
         cfg: SolverConfig, entropy0, mode: str):
    """Flux divergence + sources for the conserved fields; returns max speed."""
    gamma, n = params.gamma, params.n
    floor = cfg.density_floor
    rho = np.maximum(rho, floor)
    u = np.where(rho > 10.0 * floor, mom / rho, 0.0)
    p = _pressure(rho, ene, mom, params, entropy0, mode)
    p = np.maximum(p, 0.0)
    c = np.sqrt(gamma * p / rho)

    rho_l, rho_r = _reconstruct(rho, cfg.reconstruction)
    u_l, u_r = _reconstruct(u, cfg.reconstruction)
    p_l, p_r = _reconstruct(p, cfg.reconstruction)
    p_l = np.maximum(p_l, 0.0)
    p_r = np.maximum(p_r, 0.0)
    rho_l = np.maximum(rho_l, floor)
    rho_r = np.maximum(rho_r, floor)

    c_l = np.sqrt(gamma * p_l / rho_l)
    c_r = np.sqrt(gamma * p_r / rho_r)
    s_face = np.maximum(np.abs(u_l) + c_l, np.abs(u_r) + c_r)

    mom_l, mom_r = rho_l * u_l, rho_r * u_r
    f_rho = 0.5 * (mom_l + mom_r) - 0.5 * s_face * (rho_r - rho_l)
    f_mom = 0.5 * (mom_l * u_l + p_l + mom_r * u_r + p_r) \
        - 0.5 * s_face * (mom_r - mom_l)

    # metric factors: face areas r**(n-1) (zero at the origin) and exact
    # shell volumes; the origin face needs no flux at all
    areas = grid.edges ** (n - 1)
    w = grid.shell_weights(n)
    a_in, a_out = areas[:-1], areas[1:]
    flux_rho = np.concatenate(([0.0], a_in[1:] * f_rho[:-1], [a_out[-1] * f_rho[-1]]))
    flux_mom = np.concatenate(([0.0], a_in[1:] * f_mom[:-1], [a_out[-1] * f_mom[-1]]))

    d_rho = -(flux_rho[1:] - flux_rho[:-1]) / w
    d_mom = -(flux_mom[1:] - flux_mom[:-1]) / w
    # well-balanced geometric source: cancels the area difference of a
    # uniform pressure exactly
    d_mom += p * (a_out - a_in) / w

    d_ene = None
    if mode == "EP":
        e_l = p_l / (gamma - 1.0) + 0.5 * rho_l * u_l**2
        e_r = p_r / (gamma - 1.0) + 0.5 * rho_r * u_r**2
        f_ene = 0.5 * ((e_l + p_l) * u_l + (e_r + p_r) * u_r) \
            - 0.5 * s_face * (e_r - e_l)
        flux_ene = np.concatenate(([0.0], a_in[1:] * f_ene[:-1],
                                   [a_out[-1] * f_ene[-1]]))
        d_ene = -(flux_ene[1:] - flux_ene[:-1]) / w

    if cfg.force_on:
        phi = solve_potential(rho, grid, n, tail_check=False)
        grav = radial_force(phi, grid)
        d_mom = d_mom + params.delta * rho * grav
        if mode == "EP" and cfg.work_term:
            d_ene = d_ene + params.delta * mom * grav

    max_speed = float(np.max(np.abs(u) + c))
    return d_rho, d_mom, d_ene, max_speed


def _clean(rho, mom, ene, cfg: SolverConfig, gamma: float):
    rho = np.maximum(rho, cfg.density_floor)
    mom = np.where(rho > 10.0 * cfg.density_floor, mom, 0.0)
    if ene is not None:
        # keep the recovered pressure positive: in near-vacuum cells the
        # gravity kick can push kinetic energy past the total, so clamp the
        # internal part to a cold adiabat far below any physical state
        e_min = 1e-12 * rho**gamma / (gamma - 1.0)
        ene = np.maximum(ene, 0.5 * mom**2 / rho + e_min)
    return rho, mom, ene


def _conserved(state: RadialState, params: ModelParams):
    rho = state.rho.copy()
    mom = state.rho * state.u_r
    ene = None
    if state.mode == "EP":
        ene = state.p / (params.gamma - 1.0) + 0.5 * state.rho * state.u_r**2
    return rho, mom, ene


def _to_state(rho, mom, ene, params: ModelParams, cfg: SolverConfig,
              mode: str, t: float, entropy0) -> RadialState:
    u = np.where(rho > 10.0 * cfg.density_floor, mom / rho, 0.0)
    p = _pressure(rho, ene, mom, params, entropy0, mode)
    entropy = None
    if mode == "EP":
        # recovered entropy field; only meaningful where there is gas
        safe = rho > 1e3 * cfg.density_floor
        ratio = np.where(safe, np.maximum(p, 1e-300) / rho**params.gamma, 1.0)
        entropy = params.c_nu * np.log(ratio)
    return RadialState(rho=rho, u_r=u, p=p, mode=mode, entropy=entropy, time=t)


def step(state: RadialState, grid: RadialGrid, params: ModelParams,
         cfg: SolverConfig, dt: Optional[float] = None) -> tuple[RadialState, dict]:
    """Advance one Heun step; returns (new state, info).

    info carries the dt actually used, the CFL-limited dt, and positivity
    flags.  The potential is re-solved at both stages.
    """
    mode = state.mode
    entropy0 = state.entropy
    rho0, mom0, ene0 = _conserved(state, params)

    d_rho, d_mom, d_ene, speed = _rhs(rho0, mom0, ene0, grid, params, cfg,
                                      entropy0, mode)
    dt_cfl = cfg.cfl * grid.dr / max(speed, 1e-300)
    if dt is None:
        dt = cfg.fixed_dt if cfg.fixed_dt is not None else dt_cfl

    rho1 = rho0 + dt * d_rho
    mom1 = mom0 + dt * d_mom
    ene1 = ene0 + dt * d_ene if mode == "EP" else None
    rho1, mom1, ene1 = _clean(rho1, mom1, ene1, cfg, params.gamma)

    d_rho2, d_mom2, d_ene2, speed2 = _rhs(rho1, mom1, ene1, grid, params, cfg,
                                          entropy0, mode)
    rho2 = 0.5 * (rho0 + rho1 + dt * d_rho2)
    mom2 = 0.5 * (mom0 + mom1 + dt * d_mom2)
    ene2 = 0.5 * (ene0 + ene1 + dt * d_ene2) if mode == "EP" else None
    rho2, mom2, ene2 = _clean(rho2, mom2, ene2, cfg, params.gamma)

    new = _to_state(rho2, mom2, ene2, params, cfg, mode, state.time + dt, entropy0)
    ok = bool(np.all(np.isfinite(new.rho)) and np.all(np.isfinite(new.u_r))
              and np.all(np.isfinite(new.p)) and np.all(new.p >= 0.0))
    return new, {"dt": dt, "dt_cfl": dt_cfl, "max_speed": max(speed, speed2),
                 "positive": ok}


def _grad_norms(state: RadialState, grid: RadialGrid,
                rho_scale: float) -> tuple[float, float]:
    du = np.gradient(state.u_r, grid.dr)
    # the numerical skin where gas meets floored vacuum carries a velocity
    # jump that sharpens with resolution; it is not a steepening of the
    # solution itself, so only cells with appreciable density count. The
    # cut is relative to the initial peak, not the current one: a collapse
    # spike raises the current peak by orders of magnitude and a cut tied
    # to it would silence the still-perfectly-wet envelope.
    wet = state.rho > 1e-6 * rho_scale
    du = np.where(wet, du, 0.0)
    max_grad = float(np.max(np.abs(du)))
    l2 = float(np.sqrt(np.sum(du**2) * grid.dr))
    return max_grad, l2


def run(state: RadialState, grid: RadialGrid, params: ModelParams,
        cfg: SolverConfig) -> RunResult:
    """March to t_end (or an early stop), sampling diagnostics on the way.

    The step size is the smaller of the CFL step and a base step derived
    from the initial CFL limit with 10% headroom, rounded to divide t_end;
    healthy runs therefore sample at exactly uniform times, and the series
    only turns nonuniform when the flow genuinely accelerates.
    """
    peak0 = float(np.max(state.rho))
    if peak0 <= 0.0:
        raise ValueError("initial density vanishes; nothing to evolve")
    if cfg.density_floor > 1e-10 * peak0:
        raise ValueError(
            f"density_floor {cfg.density_floor:.3e} is too close to the "
            f"initial peak {peak0:.3e}; keep it at or below 1e-10 * peak"
        )

    if state.phi is None:
        state = state.with_phi(solve_potential(state.rho, grid, params.n,
                                               tail_check=False))

    # velocity-gradient scale for the steepening detector; fall back on an
    # acoustic scale when the initial flow is at rest
    du0 = np.gradient(state.u_r, grid.dr)
    c0 = np.sqrt(params.gamma * np.maximum(state.p, 0.0)
                 / np.maximum(state.rho, cfg.density_floor))
    grad_scale = max(float(np.max(np.abs(du0))), float(np.max(c0)) / grid.r_max)
    grad_cap = cfg.gradient_stop_factor * grad_scale

    if cfg.fixed_dt is not None:
        dt_base = cfg.fixed_dt
    else:
        _, _, _, speed0 = _rhs(*_conserved(state, params), grid, params, cfg,
                               state.entropy, state.mode)
        dt_raw = 0.9 * cfg.cfl * grid.dr / max(speed0, 1e-300)
        dt_base = cfg.t_end / max(1, math.ceil(cfg.t_end / dt_raw))

    quantities = [compute_quantities(state, grid, params, cfg.quad_rule)]
    functionals = [compute_functionals(quantities[0], params)]
    max_grad0, l20 = _grad_norms(state, grid, peak0)
    extras = {"max_grad_u": [max_grad0], "grad_u_l2": [l20]}
    if state.mode == "EP":
        extras["min_entropy"] = [float(np.min(state.entropy))]

    stop_reason = "t_end"
    steps = 0
    current = state
    while current.time < cfg.t_end - 1e-12 * cfg.t_end:
        dt = min(dt_base, cfg.t_end - current.time)
        if cfg.fixed_dt is None:
            dt = min(dt, _cfl_cap(current, grid, params, cfg))
        nxt, info = step(current, grid, params, cfg, dt=dt)
        steps += 1
        if not info["positive"]:
            stop_reason = "positivity"
            current = nxt
            break
        if info["dt"] < 1e-13 * cfg.t_end:
            stop_reason = "cfl"
            current = nxt
            break
        current = nxt

        max_grad, l2 = _grad_norms(current, grid, peak0)
        sample_due = (steps % cfg.output_stride == 0) or (
            current.time >= cfg.t_end - 1e-12 * cfg.t_end)
        if sample_due:
            sampled = current.with_phi(solve_potential(
                current.rho, grid, params.n, tail_check=False))
            q = compute_quantities(sampled, grid, params, cfg.quad_rule)
            quantities.append(q)
            functionals.append(compute_functionals(q, params))
            extras["max_grad_u"].append(max_grad)
            extras["grad_u_l2"].append(l2)
            if current.mode == "EP":
                extras["min_entropy"].append(float(np.min(current.entropy)))
        if max_grad > grad_cap:
            stop_reason = "gradient-blowup"
            break

    final = current.with_phi(solve_potential(current.rho, grid, params.n,
                                             tail_check=False))
    if quantities[-1].time < final.time - 1e-15:
        q = compute_quantities(final, grid, params, cfg.quad_rule)
        quantities.append(q)
        functionals.append(compute_functionals(q, params))
        max_grad, l2 = _grad_norms(final, grid, peak0)
        extras["max_grad_u"].append(max_grad)
        extras["grad_u_l2"].append(l2)
        if final.mode == "EP":
            extras["min_entropy"].append(float(np.min(final.entropy)))
    return RunResult(
        quantities=quantities,
        functionals=functionals,
        stop_reason=stop_reason,
        final_state=final,
        steps_taken=steps,
        extras=extras,
    )


def _cfl_cap(state: RadialState, grid: RadialGrid, params: ModelParams,
             cfg: SolverConfig) -> float:
    """Current CFL-limited step for the running state."""
    c = np.sqrt(params.gamma * np.maximum(state.p, 0.0)
                / np.maximum(state.rho, cfg.density_floor))
    speed = float(np.max(np.abs(state.u_r) + c))
    return cfg.cfl * grid.dr / max(speed, 1e-300)
