"""Conservative flux-form discretization of psi -> (tau(x) psi_x)_x on (0,1).

tau is the monomial x**alpha_deg, vanishing at x = 0.  The scheme only
ever evaluates tau at cell midpoints, so it stays well defined at the
degenerate endpoint, and the strong-branch condition (tau psi_x)(0) = 0
is exact by construction.  The x = 1 row carries an explicit flux slot
for the boundary damping, filled by the evolution module.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import jv

from .config import BCBranch
from .errors import ParameterError


@dataclass(frozen=True)
class DegenerateGrid:
    """Uniform nodes on [0,1] with the integrated flux coefficient
    tau_mid[j] = h / int_{x_j}^{x_{j+1}} dx/tau on each cell."""

    x: np.ndarray
    tau_mid: np.ndarray
    h: float
    alpha_deg: float

    @property
    def n_x(self):
        return len(self.x) - 1


def build_grid(n_x, alpha_deg):
    """The harmonic (integrated) cell coefficient keeps second-order
    eigenvalue accuracy despite the x**((1-alpha)/2) endpoint behavior of
    the eigenfunctions; the plain midpoint value of tau loses an order and
    a half there.  On the strong branch the first-cell integral of 1/tau
    diverges, so that coefficient is an exact zero flux."""
    if n_x < 8:
        raise ParameterError(f"n_x must be >= 8, got {n_x}")
    x = np.linspace(0.0, 1.0, n_x + 1)
    h = 1.0 / n_x
    a = alpha_deg
    if a == 0.0:
        tau_mid = np.ones(n_x)
    elif a < 1.0:
        tau_mid = h * (1.0 - a) / (x[1:] ** (1.0 - a) - x[:-1] ** (1.0 - a))
    else:
        tau_mid = np.zeros(n_x)
        if a == 1.0:
            tau_mid[1:] = h / np.log(x[2:] / x[1:-1])
        else:
            tau_mid[1:] = h * (1.0 - a) / (
                x[2:] ** (1.0 - a) - x[1:-1] ** (1.0 - a)
            )
    return DegenerateGrid(x=x, tau_mid=tau_mid, h=h, alpha_deg=alpha_deg)


@dataclass(frozen=True)
class OperatorMatrix:
    """Tridiagonal flux-form operator over the unknown nodes.

    Unknowns run from `first_node` (0 on the strong branch, 1 on the weak
    branch where psi(0) is pinned) through node n_x.  Row i applies
    (F_{i+1/2} - F_{i-1/2}) / (c_i h) with F the midpoint flux; the last
    row leaves the flux at x = 1 open: `flux_scale` = 1/(c_N h) is the
    factor multiplying whatever boundary flux the evolution injects there.
    `cell_h` are the dual-cell lengths c_i h defining the discrete L2
    inner product on the unknowns.
    """

    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray
    cell_h: np.ndarray
    first_node: int
    flux_scale: float
    grid: DegenerateGrid

    @property
    def n_unknowns(self):
        return len(self.diag)

    def apply(self, psi):
        """Operator action with zero boundary flux at x = 1."""
        out = self.diag * psi
        out[1:] += self.lower[:-1] * psi[:-1]
        out[:-1] += self.upper[1:] * psi[1:]
        return out

    def quadratic_form(self, psi):
        """<A psi, psi> in the discrete L2 inner product; equals
        -sum tau_mid |delta psi / h|^2 h for homogeneous BCs."""
        return np.vdot(psi, self.cell_h * self.apply(psi)).real

    def dense(self):
        m = np.diag(self.diag.astype(complex))
        m += np.diag(self.lower[:-1], -1)
        m += np.diag(self.upper[1:], 1)
        return m

    def dirichlet_interior(self):
        """Tridiagonal minor over nodes first_node..n_x-1, i.e. the
        operator with a Dirichlet condition pinned at x = 1 (used for
        reference eigenvalue checks)."""
        return self.lower[:-1], self.diag[:-1], self.upper[:-1]

    def export_coordinate_text(self, path):
        """Write (row, col, value) triplets for external inspection."""
        with open(path, "w") as fh:
            n = self.n_unknowns
            for i in range(n):
                if i > 0:
                    fh.write(f"{i} {i - 1} {self.lower[i - 1]:.17g}\n")
                fh.write(f"{i} {i} {self.diag[i]:.17g}\n")
                if i < n - 1:
                    fh.write(f"{i} {i + 1} {self.upper[i + 1]:.17g}\n")


def assemble_operator(grid, bc_branch):
    """Flux-form tridiagonal matrix for the chosen left boundary branch."""
    h = grid.h
    n = grid.n_x
    tau = grid.tau_mid
    if bc_branch is BCBranch.DIRICHLET_LEFT:
        first = 1
    else:
        first = 0
    nodes = np.arange(first, n + 1)
    m = len(nodes)
    lower = np.zeros(m)  # lower[k-1] couples unknown k to k-1
    diag = np.zeros(m)
    upper = np.zeros(m)  # upper[k] couples unknown k to k+1

    c = np.ones(m)
    c[-1] = 0.5
    if first == 0:
        c[0] = 0.5
    cell_h = c * h

    for k, i in enumerate(nodes):
        # flux below: F_{i-1/2}
        tlo = tau[i - 1] if i > 0 else 0.0  # strong branch: exact zero flux
        # flux above: F_{i+1/2}; open slot at i = n
        thi = tau[i] if i < n else 0.0
        diag[k] = -(tlo + thi) / (h * cell_h[k])
        if k > 0:
            lower[k - 1] = tlo / (h * cell_h[k])
        if k < m - 1:
            upper[k + 1] = thi / (h * cell_h[k])
    # Dirichlet branch, row for node 1: the coupling to the pinned psi_0
    # drops but the flux through tau[0] stays on the diagonal.

    return OperatorMatrix(
        lower=lower,
        diag=diag,
        upper=upper,
        cell_h=cell_h,
        first_node=first,
        flux_scale=1.0 / cell_h[-1],
        grid=grid,
    )


def bessel_first_zeros(nu, n):
    """First n positive zeros of J_nu, by bracketed bisection on scipy's
    evaluator (independent of the package's own Bessel series)."""
    zeros = []
    step = 0.25
    x = max(nu, 0.0) + 1e-6
    f_prev = jv(nu, x)
    while len(zeros) < n:
        x_next = x + step
        f_next = jv(nu, x_next)
        if f_prev == 0.0:
            zeros.append(x)
        elif f_prev * f_next < 0:
            zeros.append(brentq(lambda t: jv(nu, t), x, x_next, xtol=1e-14))
        x, f_prev = x_next, f_next
    return np.array(zeros[:n])


def reference_eigenvalues(alpha_deg, n):
    """Eigenvalues of -(tau psi_x)_x with Dirichlet conditions at both
    ends, weak branch: mu_k = ((2-alpha)/2)^2 * j_{nu_alpha,k}^2."""
    if not 0 <= alpha_deg < 1:
        raise ParameterError(
            "reference spectrum is only available on the weak branch "
            f"(0 <= alpha_deg < 1), got {alpha_deg}"
        )
    nu = (1.0 - alpha_deg) / (2.0 - alpha_deg)
    jz = bessel_first_zeros(nu, n)
    return ((2.0 - alpha_deg) / 2.0) ** 2 * jz**2
