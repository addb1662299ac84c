"""Time integration of the coupled map / lattice gradient flow.

The map obeys d u / d t = tension(u) and moves by explicit Euler steps
followed by the closest-point projection; the lattice parameters obey

    da/db = (eta^2/4) * 2 b * (I_xy - a I_xx)
    db/dt = (eta^2/4) * (-(b^2 - a^2) I_xx + I_yy - 2 a I_xy)

where I_xx, I_yy, I_xy are the gradient integrals of the *current* map
snapshot, and advance by one explicit midpoint (RK2) step per map step.
Both velocity parameterizations below are evaluated from the same discrete
integrals, so their chain-rule consistency holds to rounding.

Step size: the stability bound is dt <= 0.2 h^2 / lambda_max with
lambda_max = (alpha^2 + beta^2) + 1/beta^2; the default policy tracks that
bound, a fixed dt is available for experiments (the energy guard catches
unstable choices).  Energy must not increase by more than 1e-6 * (1 + E(0))
per step, and b must stay above 1e-6; violations abort the run with a state
dump rather than silently continuing.

A run is single-writer; independent runs may execute in parallel.  All
reported numbers come through the fixed reduction tree in kernels.py, so a
trace is byte-identical across repeats, thread counts, and checkpoint/resume
splits.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import ndimage

from .config import RunConfig, config_to_text
from .domain import MapField, energy_density, gradient_integrals
from .errors import EnergyGuardError, FlowAbort, LatticeFloorError, ProjectionError
from .generators import make_initial_map
from .kernels import KernelWorkspace, StepStats, advance
from .lattice import B_FLOOR, LatticeParams
from .serialize import Checkpoint, TraceRow, TraceWriter, read_checkpoint, write_checkpoint
from .targets import TargetManifold

ENERGY_GUARD_SCALE = 1e-6  # per-step tolerance is this times (1 + E(0))
DEFAULT_CFL_FRACTION = 0.2


# -- lattice velocities ----------------------------------------------------------


def _ab_rate(a: float, b: float, ixx: float, iyy: float, ixy: float,
             eta2: float) -> tuple[float, float]:
    adot = (eta2 / 4.0) * 2.0 * b * (ixy - a * ixx)
    bdot = (eta2 / 4.0) * (-(b * b - a * a) * ixx + iyy - 2.0 * a * ixy)
    return adot, bdot


def _alphabeta_rate(alpha: float, beta: float, ixx: float, iyy: float, ixy: float,
                    eta2: float) -> tuple[float, float]:
    beta_dot = -(eta2 / 4.0) * (beta / 2.0) * (
        (beta * beta - alpha * alpha) * ixx - iyy / (beta * beta)
        + (2.0 * alpha / beta) * ixy
    )
    alpha_dot = (eta2 / 4.0) * (
        (-1.5 * alpha * beta * beta - 0.5 * alpha ** 3) * ixx
        - (alpha / (2.0 * beta * beta)) * iyy
        + (alpha * alpha / beta + 2.0 * beta) * ixy
    )
    return alpha_dot, beta_dot


def lattice_velocity_ab(u: MapField, lat: LatticeParams, eta2: float) -> tuple[float, float]:
    """(da/dt, db/dt) of the lattice flow for the current map; zero iff the
    Hopf coefficient has zero mean."""
    ixx, iyy, ixy = gradient_integrals(u)
    return _ab_rate(lat.a, lat.b, ixx, iyy, ixy, eta2)


def lattice_velocity_alphabeta(u: MapField, lat: LatticeParams,
                               eta2: float) -> tuple[float, float]:
    """(dalpha/dt, dbeta/dt); consistent with lattice_velocity_ab under
    a = alpha beta, b = beta^2 because both are evaluated from the same
    discrete integrals."""
    ixx, iyy, ixy = gradient_integrals(u)
    return _alphabeta_rate(lat.alpha, lat.beta, ixx, iyy, ixy, eta2)


def _rk2_lattice(a: float, b: float, stats: StepStats, eta2: float,
                 dt: float) -> tuple[float, float]:
    """One explicit midpoint step with the map integrals frozen."""
    k1a, k1b = _ab_rate(a, b, stats.ixx, stats.iyy, stats.ixy, eta2)
    bm = b + 0.5 * dt * k1b
    if bm < B_FLOOR:
        raise LatticeFloorError(f"lattice floor reached: b = {bm:.3e} < {B_FLOOR:.0e}")
    am = a + 0.5 * dt * k1a
    k2a, k2b = _ab_rate(am, bm, stats.ixx, stats.iyy, stats.ixy, eta2)
    a2 = a + dt * k2a
    b2 = b + dt * k2b
    if b2 < B_FLOOR:
        raise LatticeFloorError(f"lattice floor reached: b = {b2:.3e} < {B_FLOOR:.0e}")
    return a2, b2


def cfl_dt(grid_shape: tuple[int, int], a: float, b: float,
           fraction: float = DEFAULT_CFL_FRACTION) -> float:
    """fraction * h^2 / lambda_max; fraction 0.2 is the stability bound."""
    h = 1.0 / max(grid_shape)
    lam = (a * a / b + b) + 1.0 / b
    return fraction * h * h / lam


# -- flow state -------------------------------------------------------------------


@dataclass
class FlowState:
    """Full simulator state plus cached scalar diagnostics of this instant."""

    u: MapField
    a: float
    b: float
    t: float
    eta2: float
    dt: float
    step_index: int
    e0: float
    stats: StepStats
    trace: list = field(default_factory=list)

    @property
    def lattice(self) -> LatticeParams:
        return LatticeParams.from_ab(self.a, self.b)

    @property
    def energy(self) -> float:
        return self.stats.energy

    def trace_row(self) -> TraceRow:
        s = self.stats
        return TraceRow(self.t, s.energy, s.tension_l2, s.projhopf_l2,
                        self.a, self.b, s.max_density)


def make_state(u: MapField, a: float, b: float, eta2: float = 2.0,
               dt: Optional[float] = None,
               cfl_fraction: float = DEFAULT_CFL_FRACTION) -> FlowState:
    """Initial state; runs one diagnostic kernel pass."""
    if b < B_FLOOR:
        raise LatticeFloorError(f"initial b = {b} below the floor {B_FLOOR:.0e}")
    if dt is None:
        dt = cfl_dt(u.grid_shape, a, b, cfl_fraction)
    ws = KernelWorkspace(u.grid_shape, u.target.ambient_dim)
    stats = advance(u.values, u.target, a, b, 0.0, ws)
    state = FlowState(u=u, a=a, b=b, t=0.0, eta2=eta2, dt=dt,
                      step_index=0, e0=stats.energy, stats=stats)
    state.trace.append(state.trace_row())
    return state


def energy_decay_rate(state: FlowState) -> float:
    """-( |tension|_L2^2 + (eta/4)^2 |Re(projected Hopf)|_L2^2 ); nonpositive.

    The second term uses |Re(c dz^2)|_L2^2 = 2 |c|^2 for the constant
    projected coefficient c, the exact time derivative of the energy along
    the lattice equations with the map frozen.
    """
    s = state.stats
    c = s.phi_mean
    return -(s.tension_l2 ** 2 + (state.eta2 / 16.0) * 2.0 * (c.real ** 2 + c.imag ** 2))


def step(state: FlowState, dt: Optional[float] = None) -> FlowState:
    """Advance one step: Euler+project for the map, RK2 for the lattice.

    Runs the energy guard against the new state.  For long runs prefer
    ``run``, which amortizes one kernel pass per step.
    """
    dt = state.dt if dt is None else dt
    ws = KernelWorkspace(state.u.grid_shape, state.u.target.ambient_dim)
    advance(state.u.values, state.u.target, state.a, state.b, dt, ws)
    a2, b2 = _rk2_lattice(state.a, state.b, state.stats, state.eta2, dt)
    u2 = MapField(ws.out.copy(), state.u.target)
    stats2 = advance(u2.values, u2.target, a2, b2, 0.0, ws)
    new = FlowState(u=u2, a=a2, b=b2, t=state.t + dt, eta2=state.eta2, dt=dt,
                    step_index=state.step_index + 1, e0=state.e0,
                    stats=stats2, trace=state.trace)
    guard = ENERGY_GUARD_SCALE * (1.0 + state.e0)
    if stats2.energy > state.stats.energy + guard:
        raise EnergyGuardError(
            f"energy increased beyond tolerance at step {new.step_index}: "
            f"{state.stats.energy!r} -> {stats2.energy!r} (guard {guard:.3e})",
            state=new,
        )
    new.trace.append(new.trace_row())
    return new


# -- driver -----------------------------------------------------------------------


def gradient_record(trace) -> list:
    """Rows where |tension|_L2 + |projected Hopf|_L2 attains a new minimum.

    These are the diagnostic times along which both gradient components can
    be driven to zero; the record always starts at the first row and ends at
    the all-time minimum.
    """
    best = float("inf")
    out = []
    for row in trace:
        value = row.tension_l2 + row.projhopf_l2
        if value < best:
            best = value
            out.append(row)
    return out


@dataclass
class RunResult:
    state: FlowState
    trace: list
    stop_reason: str  # "converged" | "t_max"

    @property
    def converged(self) -> bool:
        return self.stop_reason == "converged"

    @property
    def gradient_record(self) -> list:
        return gradient_record(self.trace)


def _policy_dt(cfg: RunConfig, grid_shape, a, b) -> float:
    if cfg.dt_policy == "fixed":
        return float(cfg.dt_fixed)
    return cfl_dt(grid_shape, a, b, cfg.cfl_fraction)


def run(cfg: RunConfig, out_dir: Optional[str] = None,
        resume_from: Optional[Checkpoint] = None) -> RunResult:
    """Drive the flow to convergence, t_max, or an abort.

    Emits a trace row for the initial state, then at every ``cadence`` steps
    and at the final state; writes checkpoints at ``checkpoint_cadence``
    steps and at the end when an output directory is given.  On abort the
    offending state is dumped next to the trace before the exception
    propagates.
    """
    target = TargetManifold.from_name(cfg.target)
    grid_shape = (cfg.grid_h, cfg.grid_w)
    config_text = config_to_text(cfg)

    if resume_from is None:
        u0 = make_initial_map(cfg.init, grid_shape, target,
                              degree_p=cfg.degree_p, degree_q=cfg.degree_q,
                              lat_amplitude=cfg.lat_amplitude,
                              perturb_amplitude=cfg.perturb_amplitude, seed=cfg.seed)
        u_arr = u0.values.copy()
        a, b, t, step_index = cfg.a0, cfg.b0, 0.0, 0
        e0 = e_prev = None
        fresh = True
    else:
        ck = resume_from
        if (ck.u.grid_shape != grid_shape or ck.u.target.name != cfg.target
                or ck.eta2 != cfg.eta2):
            raise ValueError("checkpoint does not match the run configuration")
        u_arr = ck.u.values.copy()
        a, b, t, step_index = ck.a, ck.b, ck.t, ck.step
        e0, e_prev = ck.e0, ck.e_prev
        fresh = False

    if b < B_FLOOR:
        raise LatticeFloorError(f"initial b = {b} below the floor {B_FLOOR:.0e}")

    ws = KernelWorkspace(grid_shape, target.ambient_dim)
    trace: list[TraceRow] = []
    writer = None
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        writer = TraceWriter(os.path.join(out_dir, "trace.csv"), write_header=fresh)

    def emit(row: TraceRow) -> None:
        trace.append(row)
        if writer is not None:
            writer.write(row)

    def dump_checkpoint(name: str) -> None:
        if out_dir is None:
            return
        write_checkpoint(
            os.path.join(out_dir, name),
            u=MapField(u_arr, target), a=a, b=b, t=t, step=step_index,
            eta2=cfg.eta2, e0=0.0 if e0 is None else e0,
            e_prev=0.0 if e_prev is None else e_prev, config_text=config_text,
        )

    guard = None
    try:
        dt = _policy_dt(cfg, grid_shape, a, b)
        stats = advance(u_arr, target, a, b, dt, ws)
        if e0 is None:
            e0 = e_prev = stats.energy
        guard = ENERGY_GUARD_SCALE * (1.0 + e0)
        a_next, b_next = _rk2_lattice(a, b, stats, cfg.eta2, dt)
        row = TraceRow(t, stats.energy, stats.tension_l2, stats.projhopf_l2,
                       a, b, stats.max_density)
        emitted_step = -1
        if fresh:
            emit(row)
            emitted_step = 0

        while True:
            if stats.grad_sum() < cfg.tol_converge:
                stop_reason = "converged"
                break
            if t >= cfg.t_max:
                stop_reason = "t_max"
                break

            # commit the step prepared in the last kernel pass
            u_arr, ws.out = ws.out, u_arr
            a, b = a_next, b_next
            t += dt
            step_index += 1

            dt = _policy_dt(cfg, grid_shape, a, b)
            stats = advance(u_arr, target, a, b, dt, ws)
            a_next, b_next = _rk2_lattice(a, b, stats, cfg.eta2, dt)

            if stats.energy > e_prev + guard:
                raise EnergyGuardError(
                    f"energy increased beyond tolerance at step {step_index}: "
                    f"{e_prev!r} -> {stats.energy!r} (guard {guard:.3e})")
            e_prev = stats.energy

            row = TraceRow(t, stats.energy, stats.tension_l2, stats.projhopf_l2,
                           a, b, stats.max_density)
            if step_index % cfg.cadence == 0:
                emit(row)
                emitted_step = step_index
            if cfg.checkpoint_cadence and step_index % cfg.checkpoint_cadence == 0:
                dump_checkpoint(f"checkpoint_{step_index:09d}.ckpt")

        if emitted_step != step_index:
            emit(row)
        dump_checkpoint("final.ckpt")
    except (FlowAbort, ProjectionError):
        dump_checkpoint("abort.ckpt")
        raise
    finally:
        if writer is not None:
            writer.close()

    final = FlowState(u=MapField(u_arr.copy(), target), a=a, b=b, t=t,
                      eta2=cfg.eta2, dt=dt, step_index=step_index, e0=e0,
                      stats=stats, trace=trace)
    return RunResult(state=final, trace=trace, stop_reason=stop_reason)


def resume(checkpoint_path: str, out_dir: Optional[str] = None) -> RunResult:
    """Continue a checkpointed run under its embedded configuration."""
    from .config import parse_config

    ck = read_checkpoint(checkpoint_path)
    cfg = parse_config(ck.config_text)
    return run(cfg, out_dir=out_dir, resume_from=ck)


# -- diagnostics ------------------------------------------------------------------


def concentration_monitor(u: MapField, lat: LatticeParams,
                          radius: float = 0.1) -> tuple[float, tuple[float, float]]:
    """Largest energy inside any grid-centered disc of the given radius.

    A coarse proxy for energy concentration; returns (energy, (x, y)) of the
    best disc center.  Refining the set of candidate centers can only raise
    the maximum.
    """
    hh, ww = u.grid_shape
    dens = energy_density(u, lat) / (hh * ww)  # cell masses
    mj = int(math.floor(radius * ww))
    mi = int(math.floor(radius * hh))
    dj, di = np.meshgrid(np.arange(-mj, mj + 1), np.arange(-mi, mi + 1))
    footprint = ((dj / ww) ** 2 + (di / hh) ** 2) <= radius * radius
    sums = ndimage.convolve(dens, footprint.astype(np.float64), mode="wrap")
    flat = int(np.argmax(sums))
    i, j = divmod(flat, ww)
    return float(sums[i, j]), (j / ww, i / hh)
