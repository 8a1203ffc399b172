"""Acceptance criteria, each run at its stated tolerance and runtime budget.

Run ``pytest tests/test_acceptance.py -v`` (or this file as a script); the
terminal summary lists one PASS/FAIL line per criterion.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from tlfloquet import Scalar
from tlfloquet.floquet_spectral import (
    FloquetParams,
    charge_commutation_residual,
    closed_form_bch_coefficients,
    dispersion,
    exact_bch_coefficients,
    floquet_hamiltonian,
    jordan_structure,
    partial_sum_norms,
    region_spectrum,
    series_error_curve,
    single_particle_eigenvalues,
    sl2_bch_closed_form_check,
)
from tlfloquet.fock_rep import FockRealization
from tlfloquet.rep_classification import (
    SolutionFamily,
    brute_force_classify,
    constraint_residual,
)
from tlfloquet.suites import (
    bracket_properties,
    centre_and_subalgebras,
    hamiltonian_brackets,
    loop_algebra,
    make_backend,
    tl_relations,
)

P = FloquetParams.from_tau


def test_criterion_01_tl_relations(record):
    t0 = time.perf_counter()
    reports = [tl_relations(make_backend("fock", n), "fock") for n in (4, 6, 8, 10)]
    dt = time.perf_counter() - t0
    checks = sum(len(r.checks) for r in reports)
    failed = [f"N={r.n}:{name}" for r in reports for name in r.failed]
    ok = record(1, not failed and dt < 30, f"{checks} exact Fock identities, N in 4..10, {len(failed)} failed, {dt:.1f}s")
    assert ok, failed[:5]


def test_criterion_02_bracket_properties(record):
    t0 = time.perf_counter()
    reports = []
    for n in (6, 8):
        R = make_backend("fock", n)
        reports += [bracket_properties(R, "fock"), hamiltonian_brackets(R, "fock"), centre_and_subalgebras(R, "fock")]
    dt = time.perf_counter() - t0
    checks = sum(len(r.checks) for r in reports)
    failed = [f"N={r.n}:{name}" for r in reports for name in r.failed]
    ok = record(2, not failed and dt < 120, f"{checks} exact identities at N=6,8, {len(failed)} failed, {dt:.1f}s")
    assert ok, failed[:5]


def test_criterion_03_loop_algebra(record):
    single = loop_algebra(make_backend("single", 32), "single", max_sum=15)
    fock = loop_algebra(make_backend("fock", 8), "fock")
    failed = single.failed + fock.failed
    ok = record(3, not failed, f"{len(single.checks)} single-particle (N=32) + {len(fock.checks)} Fock (N=8) relations, {len(failed)} failed")
    assert ok, failed[:5]


def test_criterion_04_charge_conservation(record):
    worst = 0.0
    for n in (16, 32, 64):
        for tau in (0.3, 0.7, 1.5):
            for m in range(1, 10):
                worst = max(worst, charge_commutation_residual(m, P(tau), n))
    R = FockRealization(10)
    z = Scalar(0, Fraction(-7, 10))
    Q = [R.floquet_charge(m, z) for m in range(1, 8)]
    pairs_ok = all(R.is_zero(R.comm(Q[a], Q[b])) for a in range(7) for b in range(a + 1, 7))
    ok = record(4, worst < 1e-11 and pairs_ok, f"max |[U_F, Q_m]| = {worst:.2e} (< 1e-11); exact [Q_m, Q_m'] = 0 at Fock N=10: {pairs_ok}")
    assert ok


def test_criterion_05_bch_coefficients(record):
    want = [Fraction(1), Fraction(1, 2), Fraction(-1, 6), Fraction(-1, 12), Fraction(1, 30), Fraction(1, 60), Fraction(-1, 140)]
    exact = exact_bch_coefficients(7)
    rng = np.random.default_rng(5)
    r = np.sqrt(rng.uniform(0, 1, 20)) * 0.999
    zs = r * np.exp(2j * np.pi * rng.uniform(0, 1, 20))
    worst = max(sl2_bch_closed_form_check(z) for z in zs)
    ok = record(5, exact == want == closed_form_bch_coefficients(7) and worst < 1e-13, f"Z_1..Z_7 = {[str(c) for c in exact]}; sl(2) closed form max residual {worst:.1e} over 20 z")
    assert ok


def test_criterion_06_series_convergence(record):
    errs = series_error_curve(P(0.5), 16, 12)
    ratios = [b / a for a, b in zip(errs, errs[1:])]
    plateau = partial_sum_norms(P(0.5), 16, 12)[-1]
    grown = partial_sum_norms(P(1.2), 16, 12)[-1]
    err_ok = errs[12] < 1e-10
    ratio_ok = max(ratios) < 0.3
    div_ok = grown > 10 * plateau
    ok = record(
        6,
        err_ok and ratio_ok and div_ok,
        f"error at s_max=12: {errs[12]:.2e} (needs < 1e-10); max ratio {max(ratios):.3f} (< 0.3); tau=1.2 norm / plateau = {grown / plateau:.1f} (> 10)",
    )
    assert ok


def test_criterion_07_dispersion(record):
    grid_ok = True
    for n in (16, 64, 256):
        for z in (-0.3j, -1j, -2j):
            grid_ok &= dispersion(0.0, z) == 1 and dispersion(2 * math.pi * (n // 2) / n, z) == 1
    worst = 0.0
    n = 64
    for tau in (0.3, 0.9):
        ev = single_particle_eigenvalues(P(tau), n)
        ev = ev[np.argsort(np.abs(ev))][2:]  # drop the zero-mode Jordan pair
        p = 2 * np.pi * np.arange(1, n // 2) / n
        e = (2 / tau) * np.arcsin(tau * np.sin(p))
        want = np.concatenate([e, -e])
        for v in ev:
            worst = max(worst, float(np.abs(want - v).min()))
    table = region_spectrum(P(1.0), 64)
    pw = max(abs(r.eps_plus - (r.p if r.p <= math.pi / 2 else math.pi - r.p)) for r in table.rows)
    ok = record(7, grid_ok and worst < 1e-10 and pw < 1e-12, f"phi_0 = phi_pi = 1: {grid_ok}; eigenvalue error {worst:.1e} (< 1e-10); tau=1 piecewise-linear error {pw:.1e} (< 1e-12)")
    assert ok


def test_criterion_08_phase_transition(record):
    n, tau = 64, 2.0
    HF = floquet_hamiltonian(P(tau), n)
    im_min, re_err, count = np.inf, 0.0, 0
    for k in range(1, n // 2):
        p = 2 * np.pi * k / n
        if abs(tau * np.sin(p)) <= 1:
            continue
        blk = HF.d_basis[np.ix_([k, k + n // 2], [k, k + n // 2])]
        for v in np.linalg.eigvals(blk):
            count += 1
            im_min = min(im_min, abs(v.imag))
            re_err = max(re_err, abs(abs(v.real) - (2 / tau) * (math.pi / 2)))
    ev = single_particle_eigenvalues(P(0.9), n)
    ev = ev[np.argsort(np.abs(ev))][2:]
    im_09 = float(np.abs(ev.imag).max())
    ok = record(8, count > 0 and im_min > 0.1 and re_err < 1e-10 and im_09 < 1e-10, f"tau=2: {count} I2 eigenvalues, min |Im| {im_min:.3f}, |Re| error {re_err:.1e}; tau=0.9 max |Im| {im_09:.1e}")
    assert ok


def test_criterion_09_jordan_structure(record):
    rep = jordan_structure(P(0.5), 16)
    ok = record(
        9,
        rep.zero_block_square_max < 1e-12 and rep.zero_block_rank == 1 and rep.nonnormality_spectral > 0.1,
        f"zero block square {rep.zero_block_square_max:.1e}, rank {rep.zero_block_rank}; ||[H_F^dag, H_F]|| = {rep.nonnormality_spectral:.3f}",
    )
    assert ok


def _random_rational(rng):
    while True:
        num, den = int(rng.integers(-9, 10)), int(rng.integers(1, 10))
        if num:
            return Fraction(num, den)


@pytest.mark.slow
def test_criterion_10_representation_classification(record):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    exact_ok = True
    for _ in range(50):
        a, te, to = (Scalar(_random_rational(rng), _random_rational(rng) if rng.random() < 0.5 else 0) for _ in range(3))
        for case in (1, 2):
            res = constraint_residual(SolutionFamily(case, a, te, to), 6)
            exact_ok &= all(v == 0 for v in res.values())
    report = brute_force_classify(4, samples=200, seed=0)
    dt = time.perf_counter() - t0
    classified = report.fraction_classified
    ok = record(
        10,
        exact_ok and report.converged > 0 and classified == 1.0 and report.max_residual < 1e-8 and dt < 300,
        f"families exact for 50 triples: {exact_ok}; {report.converged}/200 converged, family1 {report.family1}, family2 {report.family2}, "
        f"unclassified {report.unclassified}, residual {report.max_residual:.1e}, {dt:.0f}s",
    )
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
