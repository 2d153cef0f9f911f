"""Numerical laboratory for a degenerate Schrodinger equation on (0,1)
with fractional boundary damping realized through a diffusive memory
system.

The package cross-validates four views of the same model: the per-step
energy dissipation identity of the implicit-midpoint scheme, the
polynomial decay rate of the energy, the growth of the resolvent norm
along the imaginary axis, and the closed-form large-k eigenvalue
expansion of the Bessel characteristic equation.
"""

from .config import (
    BCBranch,
    GridConfig,
    ModelConfig,
    bc_branch_for,
    compute_m_tau,
    derive_zeta,
    load_config,
    validate_config,
)
from .diffusive import (
    DiffusiveQuadrature,
    build_quadrature,
    diffusive_output,
    eta,
    fractional_integral_oracle,
    kernel_closed_form,
)
from .errors import (
    BranchCutError,
    CertificationError,
    FitWindowError,
    FracdampError,
    NumericalError,
    ParameterError,
    RootLossError,
    ShapeError,
)
from .evolution import (
    EnergyTrace,
    State,
    Stepper,
    default_initial_data,
    dissipation_rate,
    energy,
    fit_decay_exponent,
    run_simulation,
)
from .operator import (
    DegenerateGrid,
    OperatorMatrix,
    assemble_operator,
    build_grid,
    reference_eigenvalues,
)
from .spectral import (
    AsymptoticConstants,
    DiscreteGenerator,
    EigenvalueEstimate,
    assemble_discrete_generator,
    asymptotic_constants,
    asymptotic_eigenvalue,
    asymptotic_root,
    bessel_j,
    char_function,
    compute_spectrum,
    decay_study,
    edge_initial_data,
    modal_decomposition,
    modal_energy_trace,
    predicted_real_part_constant,
    refine_root,
    resolvent_growth_study,
    resolvent_norm,
)

__version__ = "0.1.0"
