"""Physical parameters, derived constants and configuration validation.

The model is the boundary-damped degenerate evolution on (0,1) with
diffusivity tau(x) = x**alpha_deg and a boundary feedback of fractional
order alpha_frac, memory weight wp and gain rho.  The left boundary
condition switches with the degeneracy strength m_tau: Dirichlet below
m_tau = 1, vanishing flux at and above.
"""

from __future__ import annotations

import enum
import json
import math
import pathlib
from dataclasses import dataclass, asdict

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from .errors import ParameterError


class BCBranch(enum.Enum):
    DIRICHLET_LEFT = "dirichlet-left"
    NEUMANN_FLUX_LEFT = "neumann-flux-left"


def derive_zeta(rho, alpha_frac):
    """Gain of the diffusive output map: zeta = rho * sin(alpha_frac*pi)/pi."""
    if not rho > 0:
        raise ParameterError(f"rho must be > 0, got {rho}")
    if not 0 < alpha_frac <= 1:
        raise ParameterError(f"alpha_frac must be in (0, 1], got {alpha_frac}")
    return rho * math.sin(alpha_frac * math.pi) / math.pi


def compute_m_tau(alpha_deg):
    """Degeneracy strength of tau(x) = x**alpha_deg.

    For the monomial family the supremum of x|tau'|/tau is exactly
    alpha_deg; values >= 2 are outside the admissible class.
    """
    if not 0 <= alpha_deg < 2:
        raise ParameterError(
            f"alpha_deg must be in [0, 2) (m_tau < 2 required), got {alpha_deg}"
        )
    return float(alpha_deg)


def bc_branch_for(m_tau):
    """Boundary-condition branch as a total function of m_tau."""
    if not 0 <= m_tau < 2:
        raise ParameterError(f"m_tau must be in [0, 2), got {m_tau}")
    if m_tau < 1:
        return BCBranch.DIRICHLET_LEFT
    return BCBranch.NEUMANN_FLUX_LEFT


@dataclass(frozen=True)
class ModelConfig:
    """Physical parameters.  Derived quantities are exposed as properties
    so a validated config can never carry an inconsistent zeta or branch."""

    alpha_deg: float = 0.5
    alpha_frac: float = 0.5
    wp: float = 1.0
    rho: float = 1.0

    @property
    def zeta(self):
        # inline so the undamped limit rho = 0 stays usable
        return self.rho * math.sin(self.alpha_frac * math.pi) / math.pi

    @property
    def m_tau(self):
        return compute_m_tau(self.alpha_deg)

    @property
    def bc_branch(self):
        return bc_branch_for(self.m_tau)

    @property
    def nu_alpha(self):
        return (1.0 - self.alpha_deg) / (2.0 - self.alpha_deg)

    def tau(self, x):
        return x ** self.alpha_deg

    def validate(self):
        errors = []
        if not 0 <= self.alpha_deg < 2:
            errors.append(f"alpha_deg: must be in [0, 2), got {self.alpha_deg}")
        if not 0 < self.alpha_frac <= 1:
            errors.append(f"alpha_frac: must be in (0, 1], got {self.alpha_frac}")
        if not self.wp >= 0:
            errors.append(f"wp: must be >= 0, got {self.wp}")
        if not self.rho >= 0:
            # rho = 0 is admitted as the undamped reference case
            errors.append(f"rho: must be >= 0, got {self.rho}")
        if errors:
            raise ParameterError("; ".join(errors))
        return self


@dataclass(frozen=True)
class GridConfig:
    """Discretization parameters: spatial cells, memory-node grid and
    time stepping."""

    n_x: int = 256
    n_xi: int = 200
    xi_min: float = 1e-13
    xi_max: float = 1e14
    dt: float = 1e-3
    t_final: float = 200.0

    def validate(self):
        errors = []
        if self.n_x < 8:
            errors.append(f"n_x: must be >= 8, got {self.n_x}")
        if self.n_xi < 16:
            errors.append(f"n_xi: must be >= 16, got {self.n_xi}")
        if not 0 < self.xi_min < self.xi_max:
            errors.append(
                f"xi_min/xi_max: need 0 < xi_min < xi_max, got "
                f"({self.xi_min}, {self.xi_max})"
            )
        if not self.dt > 0:
            errors.append(f"dt: must be > 0, got {self.dt}")
        if not self.t_final > 0:
            errors.append(f"t_final: must be > 0, got {self.t_final}")
        if errors:
            raise ParameterError("; ".join(errors))
        return self


def validate_config(cfg, grid):
    """Check every invariant of both configs; returns them unchanged."""
    return cfg.validate(), grid.validate()


_MODEL_KEYS = ("alpha_deg", "alpha_frac", "wp", "rho")
_GRID_KEYS = ("n_x", "n_xi", "xi_min", "xi_max", "dt", "t_final")


def _coerce(key, value):
    if key in ("n_x", "n_xi"):
        return int(value)
    return float(value)


def load_config(path, overrides=None):
    """Read a TOML or JSON config file with the flat keys alpha_deg,
    alpha_frac, wp, rho, n_x, n_xi, xi_min, xi_max, dt, t_final.

    `overrides` is a mapping of key -> value applied after the file parse;
    dotted keys ("model.alpha_frac") are accepted for sweep ergonomics.
    """
    path = pathlib.Path(path)
    raw = path.read_bytes()
    if path.suffix.lower() == ".json":
        data = json.loads(raw.decode())
    else:
        data = tomllib.loads(raw.decode())

    # tolerate (and flatten) sectioned files
    flat = {}
    for key, value in data.items():
        if isinstance(value, dict):
            flat.update(value)
        else:
            flat[key] = value

    if overrides:
        for key, value in overrides.items():
            key = key.split(".")[-1]
            flat[key] = value

    unknown = set(flat) - set(_MODEL_KEYS) - set(_GRID_KEYS)
    if unknown:
        raise ParameterError(f"unknown config keys: {sorted(unknown)}")

    model = ModelConfig(**{k: _coerce(k, flat[k]) for k in _MODEL_KEYS if k in flat})
    grid = GridConfig(**{k: _coerce(k, flat[k]) for k in _GRID_KEYS if k in flat})
    return validate_config(model, grid)


def config_dict(cfg, grid):
    """Flat dict of both configs, for manifests."""
    out = asdict(cfg)
    out.update(asdict(grid))
    return out
