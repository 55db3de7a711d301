"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines and timings.
"""

import math
import time
from fractions import Fraction

import mpmath
import numpy as np
import pytest

import bosegas as bg
from bosegas.oracles import random_trial_profile
from conftest import square_well_length


def _report(number: int, ok: bool, detail: str, elapsed: float, budget: float) -> None:
    status = "PASS" if ok else "FAIL"
    print(f"criterion {number:2d}: {status} ({elapsed:.2f}s of {budget:.0f}s) - {detail}")
    assert ok, f"criterion {number} failed: {detail}"
    assert elapsed < budget, f"criterion {number} exceeded its runtime budget"


def test_criterion_1_scattering_length_exactness():
    start = time.perf_counter()
    ok = True
    worst_hc = 0.0
    for R0 in (0.5, 1.0, 2.5):
        sol = bg.solve_zero_energy(bg.HardCore(R0), mu=1.0)
        worst_hc = max(worst_hc, abs(sol.a - R0))
    ok &= worst_hc < 1e-12
    rng = np.random.default_rng(20260809)
    worst_rel = 0.0
    for _ in range(20):
        V0 = float(rng.uniform(0.05, 10.0))
        R0 = float(rng.uniform(0.2, 3.0))
        mu = float(rng.choice([0.5, 1.0, 2.0]))
        a = bg.solve_zero_energy(bg.SquareWell(V0, R0), mu, n_steps=2000).a
        expected = square_well_length(V0, R0, mu)
        worst_rel = max(worst_rel, abs(a - expected) / expected)
    ok &= worst_rel < 1e-8
    elapsed = time.perf_counter() - start
    _report(
        1,
        ok,
        f"hard-core |a - R0| <= {worst_hc:.1e}; square-well rel err <= {worst_rel:.1e}",
        elapsed,
        1.0,
    )


def test_criterion_2_energy_identity():
    start = time.perf_counter()
    corpus = [
        (bg.HardCore(1.0), 1.0),
        (bg.SquareWell(4.0, 1.0), 0.5),
        (bg.SquareWell(0.3, 2.0), 1.0),
        (bg.Shells((0.0, 0.5, 1.2), (5.0, 1.5)), 1.0),
        (bg.Tabulated((0.0, 0.6, 1.3), (3.0, 1.0, 0.0)), 0.5),
    ]
    worst = 0.0
    for pot, mu in corpus:
        sol = bg.solve_zero_energy(pot, mu)
        for factor in (2.0, 4.0, 8.0):
            worst = max(worst, bg.energy_identity(sol, factor * pot.effective_range).residual)
    ok = worst < 1e-6
    # delta-shell credit for the hard core: (1 - a/R)^2 at a = R0 = 1, mu = 1
    sol = bg.solve_zero_energy(bg.HardCore(1.0), mu=1.0)
    shell_ok = True
    for R in (2.0, 4.0, 8.0):
        got = bg.energy_identity(sol, R).shell_bound / (8 * math.pi)
        shell_ok &= got == pytest.approx((1 - 1 / R) ** 2, rel=1e-14)
    ok &= shell_ok
    elapsed = time.perf_counter() - start
    _report(2, ok, f"worst |lhs-rhs|/rhs = {worst:.2e}; shell values exact: {shell_ok}", elapsed, 1.0)


def test_criterion_3_named_constants():
    start = time.perf_counter()
    mpmath.mp.dps = 30
    dyson_exact = 1 / (10 * mpmath.sqrt(2))
    sqrt_exact = 128 / (15 * mpmath.sqrt(mpmath.pi))
    log_exact = 8 * (4 * mpmath.pi / 3 - mpmath.sqrt(3))
    d_err = abs(bg.dyson_hard_sphere(1e-6)[0].ratio - float(dyson_exact))
    s_err = abs(bg.LHY_SQRT_COEFF - float(sqrt_exact))
    l_err = abs(bg.LHY_LOG_COEFF - float(log_exact))
    ok = d_err < 1e-6 and s_err < 1e-4 and l_err < 1e-4
    elapsed = time.perf_counter() - start
    _report(
        3,
        ok,
        f"hard-sphere lower {d_err:.1e}; expansion coefficients {s_err:.1e}, {l_err:.1e} "
        f"(exact values {float(sqrt_exact):.6f}, {float(log_exact):.6f})",
        elapsed,
        10.0,
    )


def test_criterion_4_exponent_system():
    start = time.perf_counter()
    rep = bg.exponent_conditions(*bg.DEFAULT_ANSATZ_EXPONENTS)
    one_17 = Fraction(1, 17)
    four = ("kinetic", "cell_occupancy", "boundary", "temple")
    exact = all(rep.error_exponents[name] == one_17 for name in four)
    ok = rep.all_pass and exact
    elapsed = time.perf_counter() - start
    _report(
        4,
        ok,
        f"all five conditions pass: {rep.all_pass}; four error exponents == 1/17 exactly: {exact}",
        elapsed,
        10.0,
    )


def test_criterion_5_asymptotic_slope():
    start = time.perf_counter()
    Ys = np.geomspace(1e-14, 1e-6, 9)
    Es = [bg.asymptotic_error(float(Y))[0] for Y in Ys]
    slope, C = bg.fit_error_power_law(Ys, Es)
    slope_ok = abs(slope - 1 / 17) <= 0.02
    c_ok = 4.0 <= C <= 18.0
    ok = slope_ok and c_ok
    elapsed = time.perf_counter() - start
    _report(
        5,
        ok,
        f"slope {slope:.4f} (1/17 = {1/17:.4f} +- 0.02), fitted C = {C:.2f} in [4, 18]",
        elapsed,
        60.0,
    )


def test_criterion_6_certified_sandwich():
    start = time.perf_counter()
    ok = True
    details = []
    for Y in (1e-10, 1e-8, 1e-6, 1e-4):
        cells_ratio = bg.optimize_parameters(Y, a=1.0, mu=1.0, strategy="ansatz").ratio
        dyson_ratio = bg.dyson_hard_sphere(Y)[0].ratio
        lower = max(cells_ratio, dyson_ratio)  # both certified for hard spheres
        upper = bg.upper_bound_thermo(Y).ratio
        here = 0.0 < lower < 1.0 < upper
        if Y <= 1e-6:
            lhy = bg.lhy_expansion(Y).ratio
            here &= lower < lhy < upper
        ok &= here
        details.append(f"Y={Y:.0e}: {lower:.4f} < 1 < {upper:.4f} ({'ok' if here else 'FAIL'})")
    elapsed = time.perf_counter() - start
    _report(6, ok, "; ".join(details), elapsed, 10.0)


def test_criterion_7_substitution_margin_suite():
    start = time.perf_counter()
    rng = np.random.default_rng(424242)
    worst = math.inf
    for _ in range(1000):
        pot = bg.SquareWell(height=float(rng.uniform(0.1, 8.0)), radius=float(rng.uniform(0.4, 1.6)))
        a = bg.solve_zero_energy(pot, mu=0.5, n_steps=800).a
        Ru = float(rng.uniform(pot.radius * 1.05, pot.radius * 4.0))
        R1 = float(rng.uniform(Ru, 3.0 * Ru))
        prof = random_trial_profile(rng, R1)
        margin = bg.dyson_lemma_check(pot, bg.soft_potential(pot.radius, Ru), 0.5, R1, prof, a=a)
        worst = min(worst, margin)
    margins_ok = worst >= -1e-8
    # equality case: scattering profile with a thin shell at R
    pot = bg.SquareWell(0.001, 1.0)
    sol = bg.solve_zero_energy(pot, mu=0.5, r_max=30.0)
    R = 10.0
    idx = int(np.searchsorted(sol.r, R))
    prof = bg.TrialProfile(
        r=np.concatenate([sol.r[:idx], [R]]), u=np.concatenate([sol.u[:idx], [sol.u_at(R)]])
    )
    margin = bg.dyson_lemma_check(
        pot, bg.soft_potential(R * (1 - 1e-6), R), 0.5, R, prof, a=sol.a
    )
    residual = margin / (0.5 * sol.a * (R - sol.a) ** 2 / R**2)
    eq_ok = 0.0 <= residual < 1e-4
    ok = margins_ok and eq_ok
    elapsed = time.perf_counter() - start
    _report(
        7,
        ok,
        f"worst margin {worst:.2e} over 1000 trials; equality residual {residual:.2e}",
        elapsed,
        30.0,
    )


def test_criterion_8_two_moment_toys():
    start = time.perf_counter()
    rep = bg.temple_toy_check(dim=10, trials=1000, seed=314159)
    tight = abs(bg.temple_bound(0.1, 0.1, 1.0)) < 1e-14
    ok = rep.passed and tight
    elapsed = time.perf_counter() - start
    _report(
        8,
        ok,
        f"{rep.violations} violations in {rep.trials} toys "
        f"(worst excess {rep.worst_excess:.1e}); two-level case tight: {tight}",
        elapsed,
        10.0,
    )


def test_criterion_9_first_order_brackets():
    start = time.perf_counter()
    tuples = [
        (8, 10.0, 1.0, 0.0),
        (20, 10.0, 1.0, 0.5),
        (5, 6.0, 1.0, 0.0),
        (12, 8.0, 1.5, 1.0),
        (30, 12.0, 1.0, 0.0),
    ]
    ok = True
    details = []
    for i, (n, ell, R, R0) in enumerate(tuples):
        cfg = bg.McConfig(seed=1000 + i, n_samples=100_000, boundary="free")
        w, w2 = bg.mc_expectation_WR(n, ell, bg.soft_potential(R0, R), cfg)
        low, high = bg.first_order_brackets(n, ell, R, R0)
        inside = low - 3 * w.sigma <= w.mean <= high + 3 * w.sigma
        under = w2.mean <= bg.variance_bound(w.mean * n, n, R, R0) + 3 * w2.sigma
        ok &= inside and under
        details.append(f"n={n}:{'ok' if inside and under else 'FAIL'}")
    elapsed = time.perf_counter() - start
    _report(9, ok, "; ".join(details), elapsed, 60.0)


def test_criterion_10_cell_lp():
    start = time.perf_counter()
    exact_ok = True
    for k in range(1, 11):
        val = bg.brute_force_distribution(float(k), 4 * k)
        exact_ok &= abs(val - k * (k - 1)) < 1e-9
    rng = np.random.default_rng(2718)
    order_ok = True
    for _ in range(100):
        k = float(rng.uniform(1.0, 20.0))
        p = int(rng.integers(2, 100))
        lp = bg.brute_force_distribution(k, p)
        _, closed = bg.closed_form_minimum(k, p)
        order_ok &= lp >= closed - 1e-9
    ok = exact_ok and order_ok
    elapsed = time.perf_counter() - start
    _report(
        10,
        ok,
        f"integer cases exact: {exact_ok}; LP >= closed form on 100 random: {order_ok}",
        elapsed,
        10.0,
    )


def test_criterion_11_trial_energy_mc():
    start = time.perf_counter()
    # two hard spheres in a 50a box
    a = 1.0
    L = 50.0 * a
    pot = bg.HardCore(a)
    sol = bg.solve_zero_energy(pot, mu=1.0)
    cfg = bg.McConfig(seed=11, n_samples=60_000, burn_in=2_000)
    est = bg.trial_energy_mc(2, L, pot, b=0.45 * L, sol=sol, cfg=cfg)
    target = 8 * math.pi * a / L**3
    two_body_ok = abs(est.mean - target) <= 0.10 * target + 3 * est.sigma
    # eight particles in a soft well at Y ~ 1e-3 against the closed-form bound
    mu = 0.5
    well = bg.SquareWell(4.0, 1.0)
    wsol = bg.solve_zero_energy(well, mu=mu, r_max=12.0)
    N, Y = 8, 1e-3
    L8 = (4 * math.pi * (N - 1) * wsol.a**3 / (3 * Y)) ** (1 / 3)
    box = bg.FiniteBox(N=N, L=L8)
    bound = bg.upper_bound_periodic(box, wsol.a, mu)
    cfg8 = bg.McConfig(seed=21, n_samples=20_000, burn_in=2_000)
    est8 = bg.trial_energy_mc(N, L8, well, b=box.b, sol=wsol, cfg=cfg8)
    soft_ok = est8.mean <= N * bound.energy_per_particle + 3 * est8.sigma
    ok = two_body_ok and soft_ok
    elapsed = time.perf_counter() - start
    _report(
        11,
        ok,
        f"two-body {est.mean:.3e}+-{est.sigma:.0e} vs {target:.3e} "
        f"(dev {(est.mean-target)/target:+.1%}); "
        f"N=8 total {est8.mean:.3e} <= bound {N*bound.energy_per_particle:.3e}",
        elapsed,
        300.0,
    )
