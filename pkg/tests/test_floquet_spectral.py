import math
import warnings
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given
from hypothesis import strategies as st

from tlfloquet import BoundaryError, DomainError
from tlfloquet.floquet_spectral import (
    DivergentSeriesWarning,
    FloquetParams,
    bch_series_log,
    block_coefficients,
    canonical_transform,
    charge_commutation_residual,
    closed_form_bch_coefficients,
    convergence_diagnostic,
    diagonalize_block,
    dispersion,
    drive_halves,
    evolution_operator,
    exact_bch_coefficients,
    floquet_hamiltonian,
    jordan_structure,
    mode_energy,
    partial_sum_norms,
    principal_log,
    region_spectrum,
    series_error_curve,
    series_root_test,
    single_particle_eigenvalues,
    sl2_bch_closed_form_check,
    sl2_prefactor,
    sl2_series_coefficients,
    t_coefficient,
)

P = FloquetParams.from_tau


def test_params():
    prm = FloquetParams(0.25, 1.0)
    assert prm.tau == pytest.approx(0.5)
    assert prm.tau**2 == pytest.approx(prm.t1 * prm.t2, rel=1e-15)
    assert prm.z == -0.5j and prm.region == "trotter-like"
    assert P(1.5).region == "beyond"
    with pytest.raises(DomainError):
        FloquetParams(-1.0, 1.0)


# evolution operator -----------------------------------------------------------


def test_evolution_identity_at_zero():
    assert np.array_equal(evolution_operator(P(0), 8).single, np.eye(8))


def test_evolution_matches_fock():
    ev = evolution_operator(P(0.3), 8)
    assert ev.oracle_gap() < 1e-12


def test_evolution_matches_expm():
    A, B = drive_halves(12)
    z = P(0.8).z
    U = sla.expm(z * A) @ sla.expm(z * B)
    assert np.abs(evolution_operator(P(0.8), 12).single - U).max() < 1e-12


def test_evolution_invertible():
    U = evolution_operator(P(0.7), 16).single
    assert np.abs(U @ np.linalg.inv(U) - np.eye(16)).max() < 1e-12


# charges ------------------------------------------------------------------------


def test_charge_residual_examples():
    assert charge_commutation_residual(1, P(0.7), 32) < 1e-11
    assert charge_commutation_residual(2, P(0.7), 32) < 1e-12
    prm = P(0.7)
    assert charge_commutation_residual(1, prm, 32, charge_z=-prm.z) > 0.1


@pytest.mark.parametrize("m", range(1, 10))
def test_charges_commute_with_u(m):
    assert charge_commutation_residual(m, P(1.5), 32) < 1e-11


# BCH series --------------------------------------------------------------------


def test_series_trotter_limit():
    n, tau = 16, 1e-6
    A, B = drive_halves(n)
    S = bch_series_log(P(tau), n, 0).to_complex() / P(tau).z
    assert np.abs(S - (A + B)).max() < 1e-5


def test_series_converges_geometrically():
    errs = series_error_curve(P(0.5), 16, 12)
    even = errs[::2]
    ratios = [b / a for a, b in zip(even, even[1:])]
    assert all(r < 0.1 for r in ratios)  # two steps of ~0.25 each
    assert errs[-1] < 1e-9


def test_series_tail_floor():
    """At s_max = 12 the error sits near 7.3e-10, set by the first omitted term."""
    errs = series_error_curve(P(0.5), 16, 14)
    assert 5e-10 < errs[12] < 1e-9
    assert errs[14] < 1e-10


def test_exp_of_series_recovers_u():
    n = 16
    U = evolution_operator(P(0.4), n).single
    gaps = [np.abs(sla.expm(bch_series_log(P(0.4), n, s).to_complex()) - U).max() for s in (2, 5, 8, 11)]
    assert all(b < a / 10 for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-9


def test_divergence_warns_and_grows():
    with pytest.warns(DivergentSeriesWarning):
        bch_series_log(P(1.2), 16, 3)
    norms = partial_sum_norms(P(1.2), 16, 12)
    plateau = partial_sum_norms(P(0.5), 16, 12)[-1]
    assert norms[-1] > 10 * plateau
    assert all(b > a for a, b in zip(norms[2::2], norms[4::2]))


def test_principal_log_roundtrip():
    U = evolution_operator(P(0.5), 8).single
    assert np.abs(sla.expm(principal_log(U)) - U).max() < 1e-12


# sl(2) -----------------------------------------------------------------------------


def test_exact_bch_coefficients():
    want = [Fraction(1), Fraction(1, 2), Fraction(-1, 6), Fraction(-1, 12), Fraction(1, 30), Fraction(1, 60), Fraction(-1, 140)]
    assert exact_bch_coefficients(7) == want
    assert closed_form_bch_coefficients(7) == want


def test_sl2_series_matches_mpmath():
    mp.mp.dps = 40
    f = lambda z: 4 * mp.asinh(z / 2) / mp.sqrt(4 + z * z)
    taylor = mp.taylor(f, 0, 15)
    exact = sl2_series_coefficients(15)
    for k in range(16):
        assert abs(taylor[k] - mp.mpf(exact[k].numerator) / exact[k].denominator) < mp.mpf(10) ** -30
    assert exact[7] == Fraction(-1, 140)


@given(st.floats(0, 0.99), st.floats(0, 2 * math.pi))
def test_sl2_closed_form(r, theta):
    assert sl2_bch_closed_form_check(r * complex(math.cos(theta), math.sin(theta))) < 1e-13


def test_sl2_examples():
    assert sl2_bch_closed_form_check(0.1) < 1e-14
    assert sl2_bch_closed_form_check(0) == 0.0
    z = 1e-8
    assert abs(sl2_prefactor(z) / z - 1) < 1e-15
    with pytest.raises(DomainError):
        sl2_bch_closed_form_check(2.5)


# dispersion ---------------------------------------------------------------------------


@pytest.mark.parametrize("z", [-0.3j, -1j, -2j, 0.7 + 0.1j])
def test_dispersion_trivial_points(z):
    assert dispersion(0.0, z) == 1
    assert dispersion(math.pi, z) == 1


def test_dispersion_trotter_limit():
    p = np.linspace(0, 2 * np.pi, 17)
    for z in (1e-3j, 1e-6j, 1e-9j):
        assert np.abs(dispersion(p, z) - 1).max() < 2 * abs(z)


def test_dispersion_mpmath():
    mp.mp.dps = 40
    z = mp.mpc(0, -0.5)
    x = z * mp.sin(mp.pi / 2)
    ref = mp.sqrt((1 - 1j * x) / (1 + 1j * x)) * mp.asinh(x) / x
    assert abs(abs(dispersion(math.pi / 2, -0.5j)) - float(abs(ref))) < 1e-13


# spectrum -----------------------------------------------------------------------------


def test_piecewise_linear_at_tau_one():
    table = region_spectrum(P(1.0), 64)
    for r in table.rows:
        if r.p <= math.pi / 2 + 1e-12 and r.interval != "zero-mode":
            assert abs(r.eps_plus - r.p) < 1e-12


def test_small_tau_limit():
    for p in (0.3, 1.0, 2.5):
        assert abs(mode_energy(p, 1e-7) - math.sin(p)) < 1e-12


def test_branch_above_one():
    mp.mp.dps = 30
    e = mode_energy(math.pi / 2, 2.0) * 2.0
    assert e.real == pytest.approx(math.pi / 2, abs=1e-14)
    assert e.imag == pytest.approx(-float(mp.acosh(2)), abs=1e-13)
    assert float(mp.acosh(2)) == pytest.approx(1.3169579, abs=1e-7)


def test_region_split():
    table = region_spectrum(P(2.0), 64)
    kinds = {r.interval for r in table.rows}
    assert kinds == {"zero-mode", "I1", "I2"}
    for r in table.rows:
        if r.interval == "I2":
            assert abs(r.eps_plus.imag) > 0


def test_boundary_row():
    n, tau = 8, 1 / math.sin(math.pi / 4)
    with pytest.raises(BoundaryError):
        region_spectrum(P(tau), n, strict=True)
    assert "boundary" in {r.interval for r in region_spectrum(P(tau), n).rows}
    with pytest.raises(BoundaryError):
        t_coefficient(math.pi / 4, tau)


def test_csv_format():
    text = region_spectrum(P(0.5), 8).to_csv()
    lines = text.splitlines()
    assert lines[0] == "p,eps_plus_re,eps_plus_im,eps_minus_re,eps_minus_im,interval,t_p,hf_coeff_re,hf_coeff_im"
    assert len(lines) == 1 + 8 // 2 + 1


@pytest.mark.parametrize("tau", [0.3, 0.9, 2.0])
def test_eigenvalues_match_table(tau):
    n = 32
    ev = single_particle_eigenvalues(P(tau), n)
    want = region_spectrum(P(tau), n).eigenvalues()
    from scipy.optimize import linear_sum_assignment

    cost = np.abs(ev[:, None] - want[None, :])
    r, c = linear_sum_assignment(cost)
    assert cost[r, c].max() < 1e-6  # zero-mode Jordan block limits eig accuracy to sqrt(eps)


def test_spectrum_pm_symmetry():
    table = region_spectrum(P(0.7), 16)
    assert all(r.eps_minus == -r.eps_plus for r in table.rows)


def test_trotter_rate():
    n = 16
    A, B = drive_halves(n)
    gaps = [np.abs(floquet_hamiltonian(P(t), n).site - (A + B)).max() for t in (1e-2, 1e-3)]
    assert gaps[1] < gaps[0] / 5
    assert gaps[0] < 0.1


# Jordan structure ----------------------------------------------------------------------


def test_jordan_report():
    rep = jordan_structure(P(0.5), 16)
    assert rep.ok
    assert rep.zero_block_square_max < 1e-12 and rep.zero_block_rank == 1
    assert rep.nonnormality_spectral > 0.1
    assert rep.eigenvalue_mismatch < 1e-10
    assert rep.leakage < 1e-12


# canonical transform ------------------------------------------------------------------------


def test_t_coefficient_example():
    # the diagonalising ratio is the inverse of sqrt(3)
    assert t_coefficient(math.pi / 2, 0.5) == pytest.approx(1 / math.sqrt(3), rel=1e-15)


@pytest.mark.parametrize("tau,k", [(0.5, 3), (0.9, 5), (2.0, 8), (2.0, 2)])
def test_canonical_map_diagonalises(tau, k):
    n = 32
    hc, want = diagonalize_block(P(tau), n, k)
    assert abs(hc[0, 0] - want) < 1e-10
    assert abs(hc[1, 1] + want) < 1e-10
    assert abs(hc[0, 1]) < 1e-10 and abs(hc[1, 0]) < 1e-10


@pytest.mark.parametrize("tau,p", [(0.5, math.pi / 2), (0.3, 1.0), (2.0, math.pi / 2), (2.0, 0.2)])
def test_canonical_pairing(tau, p):
    cmap = canonical_transform(P(tau), p)
    assert cmap.pairing_residual() < 1e-13
    anti = cmap.anticommutators()
    assert abs(anti[0, 3]) < 1e-13  # {chi, eta^dag}


def test_zero_mode_map():
    cmap = canonical_transform(P(0.5), 0.0)
    assert cmap.zero_mode
    assert cmap.pairing_residual() == 0
    assert cmap.anticommutators()[0, 2] == 1  # {chi_0, chi_0^dag}


def test_block_coefficients_region1():
    HF = floquet_hamiltonian(P(0.5), 16)
    a, b = block_coefficients(HF, 4)
    cmap = canonical_transform(P(0.5), math.pi / 2)
    assert a / b == pytest.approx(cmap.ratio**2, rel=1e-10)


# convergence diagnostics ------------------------------------------------------------------


def test_convergence_diagnostic():
    rep = convergence_diagnostic(64, 20)
    assert rep.rows[0].binom_ratio == rep.rows[0].charge_norm
    r = [row.binom_ratio for row in rep.rows]
    steps = [b / a for a, b in zip(r[5:], r[6:])]
    assert abs(steps[-1] - 1) < 0.05
    assert abs(rep.radius_estimate - 1) < 0.1
    with pytest.raises(DomainError):
        convergence_diagnostic(16, 7)


def test_root_test():
    assert series_root_test(0.99).convergent
    assert not series_root_test(1.01).convergent
