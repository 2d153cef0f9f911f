"""Implicit-midpoint integration of the coupled field/memory system.

One step solves a single bordered tridiagonal complex system: the memory
block is diagonal, so it is eliminated through a Schur complement onto
the boundary value psi(1).  The midpoint rule conserves the quadratic
energy exactly in the undamped case and turns the dissipation identity

    E' = -zeta * int (xi^2 + wp) |theta|^2 dxi

into a per-step algebraic identity, audited to round-off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from .config import BCBranch, ModelConfig, GridConfig
from .diffusive import DiffusiveQuadrature, build_quadrature
from .errors import FitWindowError, NumericalError, ParameterError, ShapeError
from .operator import DegenerateGrid, OperatorMatrix, assemble_operator, build_grid


@dataclass
class State:
    """Complex field on all spatial nodes plus complex memory on the
    xi-nodes.  psi includes the pinned boundary value on the Dirichlet
    branch so exports always cover [0, 1]."""

    psi: np.ndarray
    theta: np.ndarray
    t: float = 0.0

    def copy(self):
        return State(self.psi.copy(), self.theta.copy(), self.t)


@dataclass
class EnergyTrace:
    times: np.ndarray
    energy: np.ndarray
    dissipation: np.ndarray  # E' audit value at each sample (midpoint rate)
    max_identity_residual: float = 0.0  # worst relative per-step energy defect
    max_energy_increase: float = 0.0  # worst E^{n+1} - E^n (should be <= 0)


def energy(state, grid, quad, zeta):
    """E = 1/2 int |psi|^2 dx (trapezoid) + zeta/2 int |theta|^2 dxi."""
    psi = state.psi
    if len(psi) != grid.n_x + 1:
        raise ShapeError("psi length does not match grid")
    field_part = 0.5 * float(np.trapezoid(np.abs(psi) ** 2, dx=grid.h))
    if quad is None or len(state.theta) == 0:
        return field_part
    if len(state.theta) != len(quad):
        raise ShapeError("theta length does not match quadrature")
    mem_part = 0.5 * zeta * float(np.sum(quad.weights * np.abs(state.theta) ** 2))
    return field_part + mem_part


def dissipation_rate(state, quad, zeta, wp):
    """-zeta * sum w_j (xi_j^2 + wp) |theta_j|^2, always <= 0."""
    if len(state.theta) == 0:
        return 0.0
    return -zeta * float(
        np.sum(quad.weights * (quad.nodes**2 + wp) * np.abs(state.theta) ** 2)
    )


def default_initial_data(grid, normalize=True):
    """Smooth initial field in the operator domain, compatible with both
    boundary branches: x^{(1-alpha)/2} sin(pi x^{(2-alpha)/2}), unit energy."""
    a = grid.alpha_deg
    x = grid.x
    psi = np.zeros_like(x, dtype=complex)
    pos = x > 0
    psi[pos] = x[pos] ** ((1.0 - a) / 2.0) * np.sin(np.pi * x[pos] ** ((2.0 - a) / 2.0))
    if a == 0.0:
        psi[0] = 0.0
    if normalize:
        e0 = 0.5 * np.trapezoid(np.abs(psi) ** 2, dx=grid.h)
        psi /= math.sqrt(e0)
    return psi


class Stepper:
    """Precomputed implicit-midpoint stepper for one (cfg, grid, quad)."""

    def __init__(self, cfg: ModelConfig, grid: DegenerateGrid,
                 quad: DiffusiveQuadrature | None, dt: float, rho=None):
        cfg.validate()
        self.cfg = cfg
        self.grid = grid
        self.dt = dt
        self.rho = cfg.rho if rho is None else rho
        self.direct_damping = cfg.alpha_frac == 1.0
        self.quad = None if self.direct_damping else quad
        if not self.direct_damping and quad is None:
            raise ParameterError("quadrature required for alpha_frac < 1")
        self.zeta = 0.0 if self.direct_damping else (
            self.rho * math.sin(cfg.alpha_frac * math.pi) / math.pi)
        self.op = assemble_operator(grid, cfg.bc_branch)
        self._build_matrix()

    def _build_matrix(self):
        op = self.op
        dt = self.dt
        m = op.n_unknowns
        # M = I - (dt/2) i T, banded storage for solve_banded
        ab = np.zeros((3, m), dtype=complex)
        ab[0, 1:] = -0.5j * dt * op.upper[1:]
        ab[1, :] = 1.0 - 0.5j * dt * op.diag
        ab[2, :-1] = -0.5j * dt * op.lower[:-1]
        if self.direct_damping:
            # boundary flux i rho psi(1) treated implicitly:
            # -(dt/2) * i * (i rho) * flux_scale = +(dt/2) rho flux_scale
            ab[1, -1] += 0.5 * dt * self.rho * op.flux_scale
            self._s_denom = None
        else:
            q = self.quad
            d = q.nodes**2 + self.cfg.wp
            self._s_denom = 1.0 + 0.5 * dt * d
            self._d = d
            # Schur complement of the memory block onto psi(1):
            # theta_mid = (theta_n + (dt/2) eta psi_mid(1)) / s_denom
            self._c_b = 0.5 * dt * float(
                np.sum(q.weights * q.eta_nodes**2 / self._s_denom)
            )
            # -(dt/2) i (i zeta c_b) flux_scale = +(dt/2) zeta c_b flux_scale
            ab[1, -1] += 0.5 * dt * self.zeta * self._c_b * op.flux_scale
        self._ab = ab

    def step(self, state):
        """Advance one dt; returns (new_state, midpoint_dissipation_rate)."""
        op = self.op
        dt = self.dt
        first = op.first_node
        psi_n = state.psi[first:]
        rhs = psi_n.astype(complex, copy=True)
        if not self.direct_damping:
            q = self.quad
            theta_half = state.theta / self._s_denom
            s0 = np.sum(q.weights * q.eta_nodes * theta_half)
            # -(dt/2) i (i zeta S0) flux_scale moves to the RHS with sign -
            rhs[-1] -= 0.5 * dt * self.zeta * s0 * op.flux_scale
        psi_mid = solve_banded((1, 1), self._ab, rhs)
        if not np.all(np.isfinite(psi_mid)):
            raise NumericalError(f"non-finite field after solve at t={state.t}")
        psi_new = 2.0 * psi_mid - psi_n

        new = state.copy()
        new.psi[first:] = psi_new
        if first == 1:
            new.psi[0] = 0.0
        if self.direct_damping:
            diss = -self.rho * abs(psi_mid[-1]) ** 2
        else:
            theta_mid = (state.theta + 0.5 * dt * self.quad.eta_nodes * psi_mid[-1]) \
                / self._s_denom
            new.theta = 2.0 * theta_mid - state.theta
            diss = -self.zeta * float(
                np.sum(self.quad.weights * self._d * np.abs(theta_mid) ** 2)
            )
        new.t = state.t + dt
        return new, diss

    def energy(self, state):
        if self.direct_damping:
            return energy(state, self.grid, None, 0.0)
        return energy(state, self.grid, self.quad, self.zeta)


def run_simulation(cfg, grid_cfg, psi0=None, output_every=100, quad=None,
                   collect_states=False):
    """Integrate from psi(.,0)=psi0, theta(.,0)=0 and record the energy
    trace plus the per-step dissipation audit.

    Returns (trace, final_state).
    """
    cfg.validate()
    grid_cfg.validate()
    grid = build_grid(grid_cfg.n_x, cfg.alpha_deg)
    if cfg.alpha_frac < 1.0 and quad is None:
        quad = build_quadrature(
            cfg.alpha_frac, cfg.wp, grid_cfg.n_xi, grid_cfg.xi_min, grid_cfg.xi_max
        )
    stepper = Stepper(cfg, grid, quad, grid_cfg.dt)

    if psi0 is None:
        psi0 = default_initial_data(grid)
    psi0 = np.asarray(psi0, dtype=complex)
    if len(psi0) != grid.n_x + 1:
        raise ShapeError("psi0 length must be n_x + 1")
    if cfg.bc_branch is BCBranch.DIRICHLET_LEFT and psi0[0] != 0:
        raise ParameterError("psi0 must vanish at x=0 on the Dirichlet branch")

    n_theta = 0 if stepper.direct_damping else len(quad)
    state = State(psi0.copy(), np.zeros(n_theta, dtype=complex), 0.0)

    n_steps = int(round(grid_cfg.t_final / grid_cfg.dt))
    times = [0.0]
    energies = [stepper.energy(state)]
    diss = [0.0]
    states = [state.copy()] if collect_states else None
    max_resid = 0.0
    max_incr = 0.0
    e_prev = energies[0]
    for n in range(1, n_steps + 1):
        try:
            state, d_mid = stepper.step(state)
        except NumericalError as exc:
            raise NumericalError(f"step {n}: {exc}") from exc
        e_now = stepper.energy(state)
        defect = abs((e_now - e_prev) - grid_cfg.dt * d_mid)
        scale = max(e_prev, 1e-300)
        max_resid = max(max_resid, defect / scale)
        max_incr = max(max_incr, e_now - e_prev)
        e_prev = e_now
        if n % output_every == 0 or n == n_steps:
            times.append(state.t)
            energies.append(e_now)
            diss.append(d_mid)
            if collect_states:
                states.append(state.copy())
    trace = EnergyTrace(
        times=np.array(times),
        energy=np.array(energies),
        dissipation=np.array(diss),
        max_identity_residual=max_resid,
        max_energy_increase=max_incr,
    )
    if collect_states:
        return trace, state, states
    return trace, state


def fit_decay_exponent(trace, window=None, min_samples=20, curvature_tol=0.5,
                       floor=1e-280):
    """Least-squares slope of log E vs log t.

    Default window is the final decade of log t.  Rejects traces whose
    energy sits at the round-off floor and traces with strong log-log
    curvature (not a power law).
    """
    t = np.asarray(trace.times, dtype=float)
    e = np.asarray(trace.energy, dtype=float)
    if window is None:
        t_hi = t[-1]
        t_lo = t_hi / 10.0
    else:
        t_lo, t_hi = window
    mask = (t >= t_lo) & (t <= t_hi) & (t > 0)
    if np.count_nonzero(mask) < min_samples:
        raise FitWindowError(
            f"fit window [{t_lo:g}, {t_hi:g}] holds fewer than "
            f"{min_samples} samples"
        )
    if np.any(e[mask] <= floor):
        raise FitWindowError("energy reached the round-off floor inside the window")
    lt = np.log(t[mask])
    le = np.log(e[mask])
    # quadratic fit in log-log; the curvature coefficient gauges power-law-ness
    c2, c1, _ = np.polyfit(lt, le, 2)
    if abs(c2) > curvature_tol:
        raise FitWindowError(
            f"trace is not a power law on the window (log-log curvature "
            f"{c2:.3g} exceeds {curvature_tol:g})"
        )
    slope, _ = np.polyfit(lt, le, 1)
    return float(slope)


def export_energy_trace(trace, path):
    """CSV columns: t, E, E_dot_audit (17 significant digits)."""
    with open(path, "w") as fh:
        fh.write("t,E,E_dot_audit\n")
        for t, e, d in zip(trace.times, trace.energy, trace.dissipation):
            fh.write(f"{t:.17g},{e:.17g},{d:.17g}\n")


def export_state(state, grid, path):
    """CSV columns: x, Re psi, Im psi."""
    with open(path, "w") as fh:
        fh.write("x,re_psi,im_psi\n")
        for x, p in zip(grid.x, state.psi):
            fh.write(f"{x:.17g},{p.real:.17g},{p.imag:.17g}\n")
