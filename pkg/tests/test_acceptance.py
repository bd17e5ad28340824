"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Run on its own with ``pytest tests/test_acceptance.py -s``.
"""

import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from oracles import brute_relaxed_set, normal_cdf
from relaxfrechet.exact1d import median_interval, sigma1_exact, w1
from relaxfrechet.frechet import (
    EmpiricalMeasure,
    FrechetParams,
    covariance_kernel,
    relaxed_mean_set,
    sigma_hat,
)
from relaxfrechet.metric_core import EuclideanPoints, FiniteMatrix
from relaxfrechet.rates import RelaxationSchedule, two_point_strong_rate
from relaxfrechet.simulate import (
    ExperimentConfig,
    arc_weak_error_csv,
    binary_square,
    derived_seed,
    gaussian_sup_estimate,
    run_experiment,
    sample,
    threshold_scan,
    two_point,
)
from relaxfrechet.twostep import two_step_estimate

pytestmark = pytest.mark.acceptance


def verdict(num, title, ok, detail):
    line = f"criterion {num} {'PASS' if ok else 'FAIL'}: {title} | {detail}"
    print("\n" + line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


# ---------------------------------------------------------------- 1


def random_finite_instance(rng):
    k = int(rng.integers(1, 201))
    kind = rng.integers(0, 3)
    if kind == 0:
        pts = rng.normal(size=(k, int(rng.integers(1, 5))))
        d = np.sqrt(((pts[:, None] - pts[None]) ** 2).sum(-1))
    elif kind == 1:
        pts = rng.integers(-3, 4, size=(k, 2)).astype(float)  # many exact ties
        d = np.abs(pts[:, None] - pts[None]).sum(-1)
    else:
        d = 1.0 - np.eye(k)  # discrete metric
    m = int(rng.integers(1, 201))
    support = rng.integers(0, k, m)
    weights = rng.random(m) + 0.05
    weights /= weights.sum()
    weights[-1] = 1.0 - weights[:-1].sum()
    cand = np.unique(rng.integers(0, k, int(rng.integers(1, k + 1))))
    p = float(rng.choice([1, 1.5, 2, 3]))
    eps = float(rng.choice([0.0, rng.random() * 0.1, rng.random() * 2]))
    return d, support, weights, cand, p, eps


def test_criterion_1_oracle_equivalence():
    rng = np.random.default_rng(20240601)
    mismatches, solver_time = 0, 0.0
    for _ in range(500):
        d, support, weights, cand, p, eps = random_finite_instance(rng)
        space = FiniteMatrix(d)
        mu = EmpiricalMeasure(space, support, weights, len(support))
        t0 = time.perf_counter()
        res = relaxed_mean_set(mu, FrechetParams(p, cand.tolist(), eps))
        solver_time += time.perf_counter() - t0
        want, _, _ = brute_relaxed_set(d.tolist(), cand.tolist(), support.tolist(), weights.tolist(), p, eps)
        mismatches += list(res.members) != want
    ok = mismatches == 0 and solver_time < 30
    verdict(1, "oracle equivalence", ok, f"mismatches={mismatches}/500, solver time={solver_time:.2f}s (<30s)")


# ---------------------------------------------------------------- 2


def test_criterion_2_median_interval_vs_grid():
    rng = np.random.default_rng(7)
    h = 1e-3
    worst_end, worst_level = 0.0, 0.0
    t0 = time.perf_counter()
    for _ in range(1000):
        y = rng.random(int(rng.integers(1, 30)))
        eps = float(rng.random() * 0.3)
        iv = median_interval(y, eps)
        # grid of step h plus the sample points, so the grid minimum equals m1
        grid = np.concatenate([np.arange(y.min() - eps - 0.01, y.max() + eps + 0.01, h), y])
        mu = EmpiricalMeasure.from_samples(EuclideanPoints(grid), np.arange(grid.size - y.size, grid.size))
        mem = grid[list(relaxed_mean_set(mu, FrechetParams(1, None, eps)).members)]
        worst_end = max(worst_end, abs(mem.min() - iv.u), abs(mem.max() - iv.v))
        lvl = iv.m1 + eps
        worst_level = max(worst_level, abs(w1(y, iv.u) - lvl), abs(w1(y, iv.v) - lvl))
    elapsed = time.perf_counter() - t0
    ok = worst_end <= h and worst_level <= 1e-10 and elapsed < 10
    verdict(2, "1-D exactness", ok,
            f"max endpoint gap={worst_end:.2e} (<=1e-3), max |W1-level|={worst_level:.1e} (<=1e-10), {elapsed:.1f}s (<10s)")


# ---------------------------------------------------------------- 3, 4, 9


def run3():
    # the event with limit Phi(-c / (2 sqrt(q(1-q)))) is the inclusion of x2, which the
    # full Hausdorff (equivalently extraneous-point) error detects
    cfg = ExperimentConfig(two_point(0.75), RelaxationSchedule(0.5, -1.0, 0.5, 0.0, 0.0), (10**4,),
                           20_000, 31337, error_mode="full_hausdorff")
    return run_experiment(cfg)


def run4():
    return arc_weak_error_csv(2.0, 0.5, 10**4, 10**5, 2024)


@pytest.fixture(scope="module")
def first_runs():
    t0 = time.perf_counter()
    rep3 = run3()
    t3 = time.perf_counter() - t0
    t0 = time.perf_counter()
    csv4 = run4()
    t4 = time.perf_counter() - t0
    return rep3, t3, csv4, t4


def test_criterion_3_two_point_weak_limit(first_runs):
    rep, elapsed, _, _ = first_runs
    f = float(rep.freqs[0])
    oracle = normal_cdf(-1.0 / (2 * math.sqrt(0.75 * 0.25)))
    ok = abs(f - 0.124) <= 0.012 and elapsed < 60
    verdict(3, "two-point weak-error limit", ok,
            f"freq={f:.5f} in 0.124+-0.012 (oracle {oracle:.4f}, ci_half={rep.ci_half()[0]:.4f}), {elapsed:.1f}s")


def test_criterion_4_arc_weak_limit(first_runs):
    _, _, csv4, elapsed = first_runs
    f = float(csv4.splitlines()[1].split(",")[4])
    oracle = 0.5 * math.erfc(0.5 * math.sqrt(2))
    ok = abs(f - 0.1587) <= 0.006 and elapsed < 60
    verdict(4, "arc weak-error limit", ok, f"freq={f:.5f} in 0.1587+-0.006 (oracle {oracle:.4f}), {elapsed:.1f}s")


def test_criterion_9_determinism(first_runs):
    rep3, _, csv4, _ = first_runs
    same3 = run3().to_csv().encode() == rep3.to_csv().encode()
    same4 = run4().encode() == csv4.encode()
    verdict(9, "determinism", same3 and same4, f"run 3 identical={same3}, run 4 identical={same4}")


# ---------------------------------------------------------------- 5, 6


def balanced_binary():
    return EmpiricalMeasure.from_samples(binary_square().space, [0, 1] * 50)


def test_criterion_5_sigma_exactness():
    s = sigma_hat(balanced_binary(), [0, 1], 2)
    s1 = sigma1_exact([0.0, 1.0], 0.0, 1.0)
    err, cross = abs(s - math.sqrt(2)), abs(s1 - s)
    verdict(5, "sigma_p exactness", err < 1e-12 and cross < 1e-12,
            f"|sigma_hat-sqrt2|={err:.1e}, |sigma1_exact-sigma_hat|={cross:.1e} (<1e-12)")


def test_criterion_6_gaussian_sup():
    kern = covariance_kernel(balanced_binary(), [0, 1], 2)
    est, se = gaussian_sup_estimate(kern, [(0, 1), (1, 0)], 10**6, seed=6)
    target = math.sqrt(2 / math.pi)
    verdict(6, "Gaussian-sup sanity", abs(est - target) <= 0.003,
            f"estimate={est:.5f}+-{se:.5f} vs sqrt(2/pi)={target:.5f} (tol 0.003)")


# ---------------------------------------------------------------- 7


def test_criterion_7_threshold_scan():
    q = 0.75
    c_star = 2 * math.sqrt(2 * q * (1 - q))
    factors = [0.5, 0.75, 1.0, 1.25, 1.5, 2.0]
    n_grid = sorted(set(np.unique(np.round(np.logspace(3, 5, 21)).astype(int)).tolist()))
    t0 = time.perf_counter()
    res = threshold_scan(two_point(q), two_point_strong_rate(q, 0.0), [f * c_star for f in factors],
                         n_grid, 200, 11, error_mode="full_hausdorff", sign=-1.0)
    elapsed = time.perf_counter() - t0
    te = res.trajectory_errors()
    mono = all(a >= b for a, b in zip(te, te[1:]))
    ok = mono and te[-1] <= 0.02 and te[0] >= 0.2 and elapsed < 300
    verdict(7, "threshold-scan monotonicity", ok,
            f"proxy={[round(v, 3) for v in te]} monotone={mono}, 2c*: {te[-1]:.3f}<=0.02, 0.5c*: {te[0]:.3f}>=0.2, {elapsed:.1f}s")


# ---------------------------------------------------------------- 8


def test_criterion_8_two_step_coverage():
    model = binary_square()
    full, strict = 0, 0
    t0 = time.perf_counter()
    for t in range(200):
        mu = sample(model, 10**4, derived_seed(8, t))
        rep = two_step_estimate(mu, p=2.0, delta=0.5)
        full += rep.step2_members == (0, 1)
        strict += len(rep.step0_members) < 2
    elapsed = time.perf_counter() - t0
    ok = full / 200 >= 0.98 and strict / 200 >= 0.40 and elapsed < 120
    verdict(8, "two-step coverage", ok,
            f"step2=={{0,1}} in {full / 200:.3f} (>=0.98), unrelaxed strict subset in {strict / 200:.3f} (>=0.40), {elapsed:.1f}s")
