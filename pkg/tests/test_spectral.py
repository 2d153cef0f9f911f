import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import jv

from fracdamp.config import ModelConfig
from fracdamp.errors import BranchCutError, ParameterError, RootLossError
from fracdamp.spectral import (
    SERIES_RADIUS,
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


def test_bessel_real_axis_matches_scipy():
    for nu in (0.0, 1.0 / 3.0, 1.4):
        for x in (0.1, 1.0, 10.0, 24.0, 30.0, 80.0):
            assert bessel_j(nu, x) == pytest.approx(jv(nu, x), rel=1e-10)


def test_bessel_complex_matches_mpmath():
    rng = np.random.default_rng(2)
    for _ in range(20):
        r = rng.uniform(0.5, 60.0)
        phi = rng.uniform(-0.95 * math.pi, 0.95 * math.pi)
        z = r * cmath.exp(1j * phi)
        nu = rng.choice([1.0 / 3.0, 4.0 / 3.0, 0.5])
        ref = complex(mpmath.besselj(nu, mpmath.mpc(z)))
        assert bessel_j(nu, z) == pytest.approx(ref, rel=1e-8)


def test_bessel_series_asymptotic_agree_at_switch():
    # both evaluators must agree against the oracle just inside and just
    # outside the switch circle
    for phi in np.linspace(-0.95 * math.pi, 0.95 * math.pi, 17):
        z = SERIES_RADIUS * cmath.exp(1j * phi)
        for nu in (1.0 / 3.0, 4.0 / 3.0):
            for zz in (0.999 * z, 1.001 * z):
                ref = complex(mpmath.besselj(nu, mpmath.mpc(zz)))
                assert abs(bessel_j(nu, zz) - ref) / abs(ref) < 1e-8


@settings(max_examples=40, deadline=None)
@given(
    r=st.floats(1.0, 50.0),
    phi=st.floats(-0.9 * math.pi, 0.9 * math.pi),
)
def test_bessel_recurrence_identity(r, phi):
    # J_{nu-1}(z) + J_{nu+1}(z) = (2 nu / z) J_nu(z)
    z = r * cmath.exp(1j * phi)
    nu = 1.0 / 3.0
    lhs = bessel_j(nu - 1.0, z) + bessel_j(nu + 1.0, z)
    rhs = 2.0 * nu / z * bessel_j(nu, z)
    scale = max(abs(lhs), abs(rhs), abs(bessel_j(nu, z)))
    assert abs(lhs - rhs) <= 1e-9 * max(scale, 1e-30)


def test_bessel_branch_guard():
    with pytest.raises(BranchCutError):
        bessel_j(0.5, -1.0)
    with pytest.raises(ParameterError):
        bessel_j(-2.0, 1.0)
    assert bessel_j(0.0, 0.0) == 1.0
    assert bessel_j(0.5, 0.0) == 0.0


def test_char_function_undamped_classical_roots():
    # alpha = 0, rho = 0: the problem is the classical Dirichlet/Neumann
    # half-wave with frequencies (n + 1/2) pi, i.e. gamma = -i (n+1/2) pi
    # and f(gamma) = x sqrt(2/(pi x)) cos(x) at x = (n+1/2) pi
    cfg = ModelConfig(alpha_deg=0.0, alpha_frac=0.5, wp=1.0, rho=0.0)
    for n in (3, 7, 12):
        g = -1j * (n + 0.5) * math.pi
        assert abs(char_function(g, cfg)) < 1e-10
        # and no accidental zero slightly off the root
        assert abs(char_function(1.01 * g, cfg)) > 1e-2


def test_char_function_strong_branch_rejected():
    cfg = ModelConfig(alpha_deg=1.5, alpha_frac=0.5, wp=1.0, rho=1.0)
    with pytest.raises(ParameterError):
        char_function(1.0, cfg)


def test_asymptotic_constants_closed_forms():
    cfg = ModelConfig(0.5, 0.75, 1.0, 1.0)
    c = asymptotic_constants(cfg)
    nu = 1.0 / 3.0
    assert c.C0 == pytest.approx(-0.75)
    assert c.C1 == pytest.approx(-0.75 * (nu / 2.0 + 1.25))
    assert c.C4 == pytest.approx(-((4.0 / 3.0) ** 0.5))
    assert c.damping_constant == c.C4
    with pytest.raises(ParameterError):
        asymptotic_constants(ModelConfig(0.5, 0.5, 1.0, 1.0))


def test_asymptotic_eigenvalue_leading_order():
    cfg = ModelConfig(0.5, 0.75, 1.0, 1.0)
    consts = asymptotic_constants(cfg)
    lam = asymptotic_eigenvalue(50, cfg, consts)
    lead = -1j * (consts.C0 * 50 * math.pi + consts.C1 * math.pi) ** 2
    assert abs(lam - lead) / abs(lam) < 1e-2
    assert lam.real < 0


def test_refine_root_converges_and_residual_small():
    cfg = ModelConfig(0.5, 0.75, 1.0, 1.0)
    est = refine_root(asymptotic_root(12, 0.5), cfg, k=12)
    assert est.residual <= 1e-10
    assert est.lam.real < 0
    assert est.lam == pytest.approx(1j * est.gamma**2)


def test_refine_root_trust_ball():
    cfg = ModelConfig(0.5, 0.75, 1.0, 1.0)
    # displaced seed with a tiny trust ball: the iteration has to travel
    # farther than the ball allows to reach the nearest root
    seed = asymptotic_root(12, 0.5) + 0.4
    with pytest.raises(RootLossError):
        refine_root(seed, cfg, k=10000)


def test_compute_spectrum_sorted_and_consistent():
    cfg = ModelConfig(0.5, 0.75, 1.0, 1.0)
    spec = compute_spectrum(3, 8, cfg)
    ims = [abs(e.lam.imag) for e in spec]
    assert ims == sorted(ims)
    # refined roots approach the closed-form expansion as k grows
    gaps = [abs(e.lam - asymptotic_eigenvalue(e.k, cfg)) for e in spec]
    assert gaps[-1] < gaps[0]


def test_generator_dissipative_and_undamped_imaginary():
    damped = assemble_discrete_generator(ModelConfig(0.5, 0.5, 1.0, 1.0), 64, 64)
    ev = damped.eigenvalues()
    assert ev.real.max() <= 1e-10
    undamped = assemble_discrete_generator(ModelConfig(0.5, 0.5, 1.0, 0.0), 64, 64)
    ev0 = undamped.eigenvalues()
    assert np.max(np.abs(ev0.real) / np.maximum(1.0, np.abs(ev0))) < 1e-10


def test_generator_size_cap():
    with pytest.raises(ParameterError):
        assemble_discrete_generator(ModelConfig(), 8192, 64)


def test_resolvent_norm_peaks_at_eigenfrequency():
    gen = assemble_discrete_generator(ModelConfig(0.5, 0.5, 1.0, 1.0), 64, 64)
    ev = gen.eigenvalues()
    osc = ev[np.abs(ev.imag) > 1.0]
    osc = osc[np.argsort(np.abs(osc.imag))]
    peak = resolvent_norm(osc[2].imag, gen)
    trough = resolvent_norm(0.5 * (osc[2].imag + osc[3].imag), gen)
    assert peak > 5.0 * trough


def test_modal_trace_monotone_and_edge_data_unit_energy():
    gen = assemble_discrete_generator(ModelConfig(0.5, 0.5, 1.0, 1.0), 64, 64)
    dec = modal_decomposition(gen)
    u0 = edge_initial_data(dec)
    e0 = 0.5 * np.sum(dec.weights * np.abs(u0) ** 2)
    assert e0 == pytest.approx(1.0, rel=1e-10)
    times, energies, rates = modal_energy_trace(dec, u0, np.linspace(0, 5, 30))
    assert np.all(np.diff(energies) < 0)
    assert np.all(rates <= 0)
    assert energies[0] == pytest.approx(1.0, rel=1e-10)


def test_decay_study_explicit_window():
    slope, times, energies, _ = decay_study(
        ModelConfig(0.5, 0.5, 1.0, 1.0), n_x=96, n_xi=64, window=(20.0, 200.0)
    )
    assert -5.0 < slope < -2.5
    assert len(times) == len(energies)


def test_resolvent_growth_study_small_case():
    slope, freqs, norms = resolvent_growth_study(
        ModelConfig(0.5, 0.5, 1.0, 1.0), k_min=3, k_max=10, n_x=96, n_xi=64
    )
    assert 0.3 < slope < 0.7
    assert len(freqs) == len(norms) == 8


def test_predicted_constant_positive():
    for at in (0.25, 0.75):
        assert predicted_real_part_constant(ModelConfig(0.5, at, 1.0, 1.0)) > 0
