"""Acceptance gates, one test per criterion.

Each test prints a single ``[PASS]`` / ``[FAIL]`` line (visible with
``pytest -s`` or in the captured log) before asserting.
"""

import itertools
import math
import random
import time
from fractions import Fraction

import pytest

from betakit.exactnum import HalfInteger, SqrtPiValue, beta_exact, compositions
from betakit.identities import (
    EXACT,
    FLOAT,
    IdentityCase,
    binomial_inversion,
    cor31_rhs,
    mikic_rhs,
    pairwise_cancellation,
    thm24_gamma_terms,
    thm24_terms,
    verify,
    verify_grid,
)
from betakit.montecarlo import DIFFERENCE, SUM, ExperimentConfig, estimate_moments
from betakit.special import beta_num, beta_partial_y, beta_quad, central_difference, digamma

HALVES = [Fraction(k, 2) for k in range(1, 11)]     # 1/2, 1, ..., 5


def _report(capsys, label, ok, detail):
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] {label}: {detail}")


def test_criterion_1_two_parameter_sum_exact(capsys):
    t0 = time.perf_counter()
    cases = [IdentityCase("thm21", (a, b), n) for a in HALVES for b in HALVES for n in range(21)]
    results = verify_grid(cases)
    elapsed = time.perf_counter() - t0
    bad = [r.case.key for r in results if not r.passed or not r.discrepancy.is_zero()]
    pi_rows = [r for r in results if r.case.params == (Fraction(1, 2), Fraction(1, 2))]
    rendered = {str(r.lhs) for r in pi_rows}
    ok = not bad and rendered == {"π"} and len(pi_rows) == 21 and elapsed < 5
    _report(capsys, "1 thm21 exact grid", ok,
            f"{len(results)} cases, {len(bad)} nonzero, lhs(1/2,1/2) renders {sorted(rendered)}, {elapsed:.2f}s")
    assert not bad
    assert rendered == {"π"}
    assert elapsed < 5


def test_criterion_2_rational_alternating_exact(capsys):
    s_values = [Fraction(1, 3), Fraction(1, 2), Fraction(1), Fraction(5, 2), Fraction(7), Fraction(22, 7)]
    t0 = time.perf_counter()
    bad = []
    count = 0
    for ident in ("thm22", "thm23", "eq29"):
        for s in s_values:
            for n in range(16):
                r = verify(IdentityCase(ident, (s,), n))
                count += 1
                if not r.passed or not r.discrepancy.is_zero():
                    bad.append(r.case.key)
                if ident == "eq29" and r.diagnostics["mid"] != r.rhs:
                    bad.append(r.case.key + ("mid",))
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 2
    _report(capsys, "2 thm22/thm23/eq29 exact", ok, f"{count} cases, {len(bad)} nonzero, {elapsed:.2f}s")
    assert not bad
    assert elapsed < 2


def test_criterion_3_symmetric_alternating_exact(capsys):
    t0 = time.perf_counter()
    bad = []
    cancellations = 0
    for p in HALVES:
        for n in range(1, 21):
            for ident in ("thm24", "thm24_gamma"):
                r = verify(IdentityCase(ident, (p,), n))
                if not r.passed:
                    bad.append(r.case.key)
            if n % 2:
                for terms in (thm24_terms(p, n), thm24_gamma_terms(p, n)):
                    pairs = pairwise_cancellation(terms)
                    assert len(pairs) == (n + 1) // 2
                    if not all(SqrtPiValue.coerce(x).is_zero() for x in pairs):
                        bad.append(("cancellation", p, n))
                    cancellations += 1
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 5
    _report(capsys, "3 thm24 exact", ok,
            f"{len(HALVES) * 20 * 2} cases, {cancellations} odd-n cancellation checks, "
            f"{len(bad)} failures, {elapsed:.2f}s")
    assert not bad
    assert elapsed < 5


def test_criterion_4_integer_identities(capsys):
    t0 = time.perf_counter()
    bad = []
    for n in range(1, 101):
        r = verify(IdentityCase("conv11", (), n))
        if not (r.passed and r.lhs == 4 ** n):
            bad.append(("conv11", n))
        r = verify(IdentityCase("cor21", (), n))
        want = 0 if n % 2 else 2 ** n * math.comb(n, n // 2)
        if not (r.passed and r.lhs == want):
            bad.append(("cor21", n))
    for m in range(1, 7):
        for n in range(1, 13):
            if not verify(IdentityCase("cor31", (m,), n)).passed:
                bad.append(("cor31", m, n))
    for m in range(1, 10):
        for n in range(1, 11):
            if mikic_rhs(m, n) != cor31_rhs(m, n) or not verify(IdentityCase("mikic", (m,), n)).passed:
                bad.append(("mikic", m, n))
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 10
    _report(capsys, "4 integer identities", ok, f"{len(bad)} failures, {elapsed:.2f}s")
    assert not bad
    assert elapsed < 10


def _open_unit(rng, hi):
    # uniform on (0, hi]
    return hi * (1.0 - rng.random())


def test_criterion_5_float_suite(capsys):
    rng = random.Random(20240601)
    worst = {"sums": 0.0, "alternating": 0.0, "quad": 0.0, "deriv": 0.0}
    failures = []

    for _ in range(200):
        n = rng.randint(0, 15)
        p1, p2 = _open_unit(rng, 30), _open_unit(rng, 30)
        m = rng.randint(2, 4)
        ps = tuple(_open_unit(rng, 30) for _ in range(m))
        for case in (IdentityCase("thm21", (p1, p2), n, FLOAT), IdentityCase("thm31", ps, n, FLOAT)):
            r = verify(case, tol=1e-9)
            worst["sums"] = max(worst["sums"], r.discrepancy)
            if not r.passed:
                failures.append(case)

    for _ in range(60):
        s = _open_unit(rng, 30)
        for ident in ("thm22", "thm23", "thm24"):
            for n in range(1 if ident == "thm24" else 0, 9):
                r = verify(IdentityCase(ident, (s,), n, FLOAT), tol=1e-6)
                worst["alternating"] = max(worst["alternating"], r.discrepancy)
                if not r.passed:
                    failures.append(r.case)

    pairs = [(0.5, 0.5)] + [(0.3 + 9.7 * (1.0 - rng.random()), 0.3 + 9.7 * (1.0 - rng.random()))
                            for _ in range(49)]
    for x, y in pairs:
        err = abs(beta_quad(x, y) - beta_num(x, y))
        worst["quad"] = max(worst["quad"], err)
        if err > 1e-8:
            failures.append(("quad", x, y))
    pi_err = abs(beta_quad(0.5, 0.5) - math.pi)
    if pi_err > 1e-8:
        failures.append(("quad pi", pi_err))

    for _ in range(100):
        x, y = rng.uniform(0.5, 20), rng.uniform(0.5, 20)
        exact = beta_partial_y(x, y)
        fd = central_difference(lambda t: beta_num(x, t), y)
        rel = abs(exact - fd) / abs(exact)
        worst["deriv"] = max(worst["deriv"], rel)
        if rel > 1e-6:
            failures.append(("deriv", x, y))

    ok = not failures
    detail = ", ".join(f"worst {k} {v:.2e}" for k, v in worst.items()) + f", |B(1/2,1/2)-π| {pi_err:.1e}"
    _report(capsys, "5 float suite", ok, detail)
    assert not failures


MC_SEEDS = (1, 42, 2017)
MC_SUMS = ((0.5, 0.5), (2.0, 3.0), (0.5, 1.0, 1.5))
MC_DIFFERENCES = (0.5, 2.0, 7.3)


def test_criterion_6_monte_carlo_gates(capsys):
    t0 = time.perf_counter()
    worst, count, failures = 0.0, 0, []
    for seed in MC_SEEDS:
        plans = [(ExperimentConfig(SUM, shapes, 1, 10 ** 6, seed), range(1, 5)) for shapes in MC_SUMS]
        plans += [(ExperimentConfig(DIFFERENCE, (p, p), 1, 10 ** 6, seed), range(1, 7)) for p in MC_DIFFERENCES]
        for config, orders in plans:
            for est in estimate_moments(config, list(orders)):
                count += 1
                worst = max(worst, abs(est.z_score))
                if not est.passed(5.0):
                    failures.append((seed, config.combination, config.shapes, est.n, est.z_score))
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 60
    _report(capsys, "6 Monte Carlo gates", ok, f"{count} estimates, worst |z| {worst:.2f}, {elapsed:.1f}s")
    assert not failures
    assert elapsed < 60


def test_criterion_7_property_suites(capsys):
    rng = random.Random(77)
    problems = []

    for _ in range(100):
        length = rng.randint(1, 25)
        a = [Fraction(rng.randint(-50, 50), rng.randint(1, 12)) for _ in range(length)]
        if binomial_inversion(binomial_inversion(a)) != a:
            problems.append(("inversion", a))

    for _ in range(100):
        m = rng.randint(2, 4)
        xs = [HalfInteger(rng.randint(1, 20)) for _ in range(m)]
        reference = beta_exact(xs)
        for perm in itertools.permutations(xs):
            if beta_exact(list(perm)) != reference:
                problems.append(("symmetry", xs))
                break

    for a in range(1, 21):
        for b in range(1, 21):
            x, y = HalfInteger(a), HalfInteger(b)
            if beta_exact([x, y]) != beta_exact([x, y + 1]) + beta_exact([x + 1, y]):
                problems.append(("basic", a, b))

    worst_residual = 0.0
    for i in range(2000):
        x = 10 ** (-2 + 5 * i / 1999)
        worst_residual = max(worst_residual, abs(digamma(x + 1) - digamma(x) - 1 / x))
    if worst_residual > 1e-12:
        problems.append(("digamma", worst_residual))

    for n in range(13):
        for m in range(1, 7):
            if sum(1 for _ in compositions(n, m)) != math.comb(n + m - 1, m - 1):
                problems.append(("compositions", n, m))

    ok = not problems
    _report(capsys, "7 property suites", ok,
            f"{len(problems)} violations, digamma residual {worst_residual:.1e}")
    assert not problems
