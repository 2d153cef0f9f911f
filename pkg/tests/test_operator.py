import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import eigh_tridiagonal

from fracdamp.config import BCBranch
from fracdamp.errors import ParameterError
from fracdamp.operator import (
    assemble_operator,
    bessel_first_zeros,
    build_grid,
    reference_eigenvalues,
)


def test_grid_flux_coefficient_positive_weak():
    grid = build_grid(64, 0.5)
    assert np.all(grid.tau_mid > 0)
    assert grid.h == pytest.approx(1.0 / 64)


def test_grid_strong_branch_first_cell_zero_flux():
    for alpha in (1.0, 1.5):
        grid = build_grid(32, alpha)
        assert grid.tau_mid[0] == 0.0
        assert np.all(grid.tau_mid[1:] > 0)


def test_grid_harmonic_coefficient_value():
    # cell [x0, x1]: h / int dx/sqrt(x) = h / (2(sqrt(x1)-sqrt(x0)))
    grid = build_grid(16, 0.5)
    x = grid.x
    expected = grid.h / (2.0 * (np.sqrt(x[1:]) - np.sqrt(x[:-1])))
    assert np.allclose(grid.tau_mid, expected, rtol=1e-13)


def test_operator_symmetric_in_weighted_inner_product():
    rng = np.random.default_rng(11)
    for alpha, branch in ((0.5, BCBranch.DIRICHLET_LEFT),
                          (1.5, BCBranch.NEUMANN_FLUX_LEFT)):
        grid = build_grid(32, alpha)
        op = assemble_operator(grid, branch)
        m = op.n_unknowns
        u = rng.normal(size=m) + 1j * rng.normal(size=m)
        v = rng.normal(size=m) + 1j * rng.normal(size=m)
        lhs = np.vdot(v, op.cell_h * op.apply(u))
        rhs = np.vdot(op.apply(v), op.cell_h * u)
        assert lhs == pytest.approx(rhs, rel=1e-12)


def test_quadratic_form_equals_flux_sum():
    grid = build_grid(32, 0.5)
    op = assemble_operator(grid, BCBranch.DIRICHLET_LEFT)
    rng = np.random.default_rng(5)
    psi = rng.normal(size=op.n_unknowns) + 1j * rng.normal(size=op.n_unknowns)
    # zero-flux slot at x=1 and pinned psi(0): the form telescopes
    full = np.concatenate([[0.0], psi])
    expected = -np.sum(
        grid.tau_mid * np.abs(np.diff(full) / grid.h) ** 2 * grid.h
    )
    assert op.quadratic_form(psi) == pytest.approx(expected, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(
    alpha=st.floats(0.0, 1.9),
    seed=st.integers(0, 2**31),
)
def test_quadratic_form_nonpositive(alpha, seed):
    grid = build_grid(16, alpha)
    branch = (
        BCBranch.DIRICHLET_LEFT if alpha < 1 else BCBranch.NEUMANN_FLUX_LEFT
    )
    op = assemble_operator(grid, branch)
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=op.n_unknowns) + 1j * rng.normal(size=op.n_unknowns)
    assert op.quadratic_form(psi) <= 1e-10 * np.sum(np.abs(psi) ** 2)


def test_uniform_case_eigenvalues_exact_rate():
    # alpha = 0: eigenvalues (k pi)^2, second-order accurate
    mu_exact = (np.pi * np.arange(1, 4)) ** 2
    errs = []
    for n in (64, 128):
        grid = build_grid(n, 0.0)
        op = assemble_operator(grid, BCBranch.DIRICHLET_LEFT)
        lower, diag, upper = op.dirichlet_interior()
        mu = eigh_tridiagonal(
            -diag, -upper[1 : len(diag)], select="i", select_range=(0, 2)
        )[0]
        errs.append(np.abs(mu - mu_exact) / mu_exact)
    ratio = errs[0] / errs[1]
    assert np.all(errs[1] < 1e-3)
    assert np.all(ratio > 3.4)  # h^2 convergence


def test_degenerate_eigenvalues_match_bessel_reference():
    mu_ref = reference_eigenvalues(0.5, 3)
    grid = build_grid(512, 0.5)
    op = assemble_operator(grid, BCBranch.DIRICHLET_LEFT)
    lower, diag, upper = op.dirichlet_interior()
    mu = eigh_tridiagonal(
        -diag, -upper[1 : len(diag)], select="i", select_range=(0, 2)
    )[0]
    assert np.max(np.abs(mu - mu_ref) / mu_ref) < 2e-4


def test_bessel_zero_finder_against_tables():
    # first zeros of J_0: 2.404825557695773, 5.520078110286311
    zeros = bessel_first_zeros(0.0, 2)
    assert zeros[0] == pytest.approx(2.404825557695773, abs=1e-10)
    assert zeros[1] == pytest.approx(5.520078110286311, abs=1e-10)


def test_reference_eigenvalues_weak_branch_only():
    with pytest.raises(ParameterError):
        reference_eigenvalues(1.2, 3)


def test_build_grid_rejects_small_n():
    with pytest.raises(ParameterError):
        build_grid(4, 0.5)


def test_flux_scale_is_inverse_boundary_cell():
    grid = build_grid(32, 0.5)
    op = assemble_operator(grid, BCBranch.DIRICHLET_LEFT)
    assert op.flux_scale == pytest.approx(2.0 / grid.h)
    assert op.cell_h[-1] == pytest.approx(grid.h / 2.0)
