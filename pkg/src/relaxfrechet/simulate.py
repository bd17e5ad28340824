"""Seeded Monte Carlo experiments on the analytically solvable example models.

Randomness comes from counter-based Philox streams keyed by
``(seed, trial, block)``, so every trial is reproducible on its own and trials
can run in any order or thread.  Within a trial, the sample at the j-th size
of ``n_grid`` extends the sample at the (j-1)-th size by fresh draws from
block j, giving one nested trajectory Y_1, Y_2, ... per trial.  Finite
models are sampled as multinomial atom counts, which gives the same
empirical measure as drawing the n points one by one.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import InputError, NumericError, ResourceCapError
from .frechet import (
    CovarianceKernel,
    EmpiricalMeasure,
    _solve,
    hausdorff,
    one_sided_hausdorff,
    relaxed_mean_set,
    FrechetParams,
)
from .metric_core import ArcSpace, FiniteMatrix, MetricSpace, load_matrix_csv
from .rates import RelaxationSchedule, parse_rate

log = logging.getLogger(__name__)

ERROR_MODES = ("full_hausdorff", "miss_true_set", "extraneous_point")
CSV_HEADER = ["n", "c", "a", "alpha", "beta", "gamma", "error_mode", "trials", "freq", "ci_half", "seed"]
SCAN_HEADER = ["c"] + CSV_HEADER + ["trajectory_error", "burn_in"]
MIN_TRIALS_FOR_CI = 400
DEFAULT_WORK_CAP = 1e11
PSD_TOL = 1e-8


def trial_rng(seed: int, *keys: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *map(int, keys)])))


# ---------------------------------------------------------------- models


@dataclass(frozen=True, eq=False)
class FiniteModel:
    """A categorical distribution on a finite metric space."""

    space: MetricSpace
    probs: np.ndarray
    p: float
    name: str = "categorical"
    sigma_p: Optional[float] = None
    strong_threshold: Optional[float] = None
    weak_offset: Optional[float] = None
    true_set: tuple[int, ...] = field(default=())

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.shape != (self.space.size,):
            raise InputError(f"need {self.space.size} probabilities, got {probs.size}")
        if (probs < 0).any() or abs(probs.sum() - 1) > 1e-9:
            raise InputError("probabilities must be non-negative and sum to 1")
        if not self.p >= 1:
            raise InputError(f"p must be >= 1, got {self.p}")
        object.__setattr__(self, "probs", probs)
        atoms = np.flatnonzero(probs > 0)
        object.__setattr__(self, "atoms", atoms)
        if not self.true_set:
            res = relaxed_mean_set(self.population(), FrechetParams(self.p, None, 0.0))
            object.__setattr__(self, "true_set", res.members)

    @property
    def candidates(self) -> np.ndarray:
        return self.space.all_ids()

    def population(self) -> EmpiricalMeasure:
        w = self.probs[self.atoms]
        return EmpiricalMeasure(self.space, self.atoms, w / w.sum(), 1)

    def draw_counts(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.multinomial(n, self.probs[self.atoms])

    def describe(self) -> dict:
        return {"kind": self.name, "p": self.p, "true_set": list(self.true_set)}


def two_point(q: float, p: float = 1.0) -> FiniteModel:
    """Discrete two-point space with mass q on x1 (id 0)."""
    if not 0 < q < 1 or q == 0.5:
        raise InputError("q must lie in (0, 1) and differ from 1/2")
    space = FiniteMatrix(np.array([[0.0, 1.0], [1.0, 0.0]]))
    return FiniteModel(
        space, np.array([q, 1 - q]), p, name="two_point", sigma_p=0.0,
        strong_threshold=2 * math.sqrt(2 * q * (1 - q)), weak_offset=abs(1 - 2 * q),
        true_set=(0,) if q > 0.5 else (1,),
    )


def binary_square() -> FiniteModel:
    """X = {0, 1} with |x - y|, p = 2 and mu = (delta_0 + delta_1) / 2."""
    space = FiniteMatrix(np.array([[0.0, 1.0], [1.0, 0.0]]))
    return FiniteModel(space, np.array([0.5, 0.5]), 2.0, name="binary_square",
                       sigma_p=math.sqrt(2.0), true_set=(0, 1))


def categorical(space: MetricSpace, probs, p: float) -> FiniteModel:
    return FiniteModel(space, np.asarray(probs, dtype=float), p)


@dataclass(frozen=True, eq=False)
class ArcModel:
    """Half-half mass on (0, 1) and (0, -1) in the arc space, p > 1.

    The Frechet functional along the arc is minimised in closed form, so
    experiments need no grid; ``space`` is only used for the grid cross-check.
    """

    p: float = 2.0
    resolution: int = 2048
    name: str = "arc"
    sigma_p: float = 0.0

    def __post_init__(self):
        if not self.p > 1:
            raise InputError(f"arc model needs p > 1, got {self.p}")

    @property
    def strong_threshold(self) -> float:
        return 2 * self.p / (self.p - 1)

    @property
    def space(self) -> ArcSpace:
        return ArcSpace(self.resolution)

    @property
    def atoms(self) -> tuple[int, int]:
        # theta = pi/2 and theta = 3pi/2 are the first and last arc grid points
        return (1, self.resolution - 1)

    @property
    def probs(self) -> np.ndarray:
        return np.array([0.5, 0.5])

    @property
    def true_set(self) -> tuple[int, int]:
        return (0, self.space.nearest_id(math.pi))

    def draw_counts(self, rng: np.random.Generator, n: int) -> np.ndarray:
        k = int(rng.binomial(n, 0.5))
        return np.array([k, n - k])

    def describe(self) -> dict:
        return {"kind": "arc", "p": self.p, "resolution": self.resolution}


Model = FiniteModel | ArcModel


def model_from_dict(d: dict, base_dir: str = ".") -> Model:
    kind = d.get("kind")
    if kind == "two_point":
        return two_point(float(d["q"]), float(d.get("p", 1.0)))
    if kind == "binary_square":
        return binary_square()
    if kind == "arc":
        return ArcModel(float(d.get("p", 2.0)), int(d.get("resolution", 2048)))
    if kind == "categorical":
        space = load_matrix_csv(os.path.join(base_dir, d["space"]))
        return categorical(space, d["probs"], float(d.get("p", 2.0)))
    raise InputError(f"unknown model kind {kind!r}")


# ---------------------------------------------------------------- arc closed form


def arc_eta(p: float, frac_top: float) -> float:
    """Minimiser of W_p along the arc, as eta in [-1, 1].

    The arc point x_eta sits at theta = pi - pi * eta / 2, at distance 1 - eta
    from (0, 1) and 1 + eta from (0, -1); ``frac_top`` is the mass at (0, 1).
    """
    a, b = frac_top, 1.0 - frac_top
    if b <= 0:
        return 1.0
    if a <= 0:
        return -1.0
    # (u - 1) / (u + 1) with u = (a / b)^(1 / (p - 1))
    return math.tanh(math.log(a / b) / (2 * (p - 1)))


def arc_functional(p: float, frac_top: float, eta):
    eta = np.asarray(eta, dtype=float)
    return frac_top * (1 - eta) ** p + (1 - frac_top) * (1 + eta) ** p


def arc_gap(p: float, count_top: int, n: int) -> float:
    """W_p(mu_n, (1, 0)) - m_p(mu_n); W_p at (1, 0) is always 1."""
    a = count_top / n
    m = float(arc_functional(p, a, arc_eta(p, a)))
    return max(0.0, 1.0 - m)


def _arc_level_interval(p: float, a: float, level: float) -> tuple[float, float]:
    eta0 = arc_eta(p, a)
    f = lambda e: float(arc_functional(p, a, e)) - level
    lo = -1.0 if f(-1.0) <= 0 else brentq(f, -1.0, eta0, xtol=1e-14)
    hi = 1.0 if f(1.0) <= 0 else brentq(f, eta0, 1.0, xtol=1e-14)
    return lo, hi


def arc_errors(p: float, count_top: int, n: int, eps: float) -> dict[str, float]:
    """One-sided and full Hausdorff distances between F_p(mu_n, eps) and the true set."""
    a = count_top / n
    m = float(arc_functional(p, a, arc_eta(p, a)))
    level = m + eps
    lo, hi = _arc_level_interval(p, a, level)
    has_east = 1.0 <= level + 1e-12  # W_p at (1, 0) is 1
    reach = max(abs(lo), abs(hi))
    extraneous = reach  # every arc point is |eta| from (-1, 0) and 2 - |eta| >= |eta| from (1, 0)
    to_west = 0.0 if lo <= 0.0 <= hi else min(abs(lo), abs(hi))
    to_east = 0.0 if has_east else 2.0 - reach
    miss = max(to_west, to_east)
    return {"miss_true_set": miss, "extraneous_point": extraneous, "full_hausdorff": max(miss, extraneous)}


def arc_weak_error_trial(p: float, c: float, n: int, seed: int) -> bool:
    """Does the gap at (1, 0) exceed (4p / (p - 1)) c^2 / n for one fresh sample?

    Draws where every sample lands on one atom are redrawn from the next
    derived stream.
    """
    if not p > 1:
        raise InputError("arc model needs p > 1")
    attempt = 0
    while True:
        k = int(trial_rng(seed, attempt).binomial(n, 0.5))
        if 0 < k < n:
            break
        attempt += 1
        log.info("degenerate arc draw (k=%d, n=%d, seed=%d); redrawing", k, n, seed)
    return arc_gap(p, k, n) > (4 * p / (p - 1)) * c * c / n


def arc_weak_error_frequency(p: float, c: float, n: int, trials: int, seed: int) -> float:
    hits = sum(arc_weak_error_trial(p, c, n, derived_seed(seed, t)) for t in range(trials))
    return hits / trials


ARC_CSV_HEADER = ["p", "c", "n", "trials", "freq", "ci_half", "seed"]


def arc_weak_error_csv(p: float, c: float, n: int, trials: int, seed: int) -> str:
    f = arc_weak_error_frequency(p, c, n, trials, seed)
    half = 1.96 * math.sqrt(f * (1 - f) / trials) if trials >= MIN_TRIALS_FOR_CI else math.nan
    return _csv([ARC_CSV_HEADER, [float(p), float(c), int(n), int(trials), f, half, int(seed)]])


def derived_seed(seed: int, trial: int) -> int:
    return int(np.random.SeedSequence([int(seed), int(trial)]).generate_state(1, np.uint64)[0])


# ---------------------------------------------------------------- sampling


def sample(model: Model, n: int, seed: int) -> EmpiricalMeasure:
    """Empirical measure of n IID draws from ``model``."""
    if n < 1:
        raise InputError("n must be >= 1")
    counts = model.draw_counts(trial_rng(seed), n)
    return EmpiricalMeasure.from_counts(model.space, np.asarray(model.atoms), counts)


# ---------------------------------------------------------------- experiments


@dataclass(frozen=True)
class ExperimentConfig:
    model: Model
    schedule: RelaxationSchedule
    n_grid: tuple[int, ...]
    trials: int
    seed: int
    delta_h: float = 0.5
    error_mode: str = "full_hausdorff"
    threads: Optional[int] = None
    work_cap: float = DEFAULT_WORK_CAP

    def __post_init__(self):
        grid = tuple(int(n) for n in self.n_grid)
        object.__setattr__(self, "n_grid", grid)
        if not grid or grid[0] < 1 or any(b <= a for a, b in zip(grid, grid[1:])):
            raise InputError("n_grid must be non-empty, positive and strictly increasing")
        if self.trials < 1:
            raise InputError("trials must be >= 1")
        if not self.delta_h > 0:
            raise InputError("delta_h must be > 0")
        if self.error_mode not in ERROR_MODES:
            raise InputError(f"error_mode must be one of {ERROR_MODES}")


@dataclass(frozen=True, eq=False)
class ExperimentReport:
    config: ExperimentConfig
    errors: np.ndarray  # bool, (trials, len(n_grid))

    @property
    def freqs(self) -> np.ndarray:
        return self.errors.mean(axis=0)

    def ci_half(self) -> np.ndarray:
        f = self.freqs
        if self.config.trials < MIN_TRIALS_FOR_CI:
            return np.full_like(f, np.nan)
        return 1.96 * np.sqrt(f * (1 - f) / self.config.trials)

    def trajectory_error(self, burn_in: int = 0) -> float:
        """Fraction of trials with an error at some n_grid index >= burn_in."""
        return float(self.errors[:, burn_in:].any(axis=1).mean())

    def rows(self) -> list[list]:
        cfg, s = self.config, self.config.schedule
        out = []
        for n, f, h in zip(cfg.n_grid, self.freqs, self.ci_half()):
            out.append([n, s.c, s.a, s.alpha, s.beta, s.gamma, cfg.error_mode,
                        cfg.trials, float(f), float(h), cfg.seed])
        return out

    def to_csv(self) -> str:
        return _csv([CSV_HEADER] + self.rows())


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _finite_trial(model: FiniteModel, cfg: ExperimentConfig, t: int, eps_grid) -> np.ndarray:
    out = np.zeros(len(cfg.n_grid), dtype=bool)
    counts = np.zeros(model.atoms.size, dtype=np.int64)
    prev = 0
    cand = model.candidates
    true = np.asarray(model.true_set)
    for j, n in enumerate(cfg.n_grid):
        counts += model.draw_counts(trial_rng(cfg.seed, t, j), n - prev)
        prev = n
        meas = EmpiricalMeasure.from_counts(model.space, model.atoms, counts)
        est = np.asarray(_solve(meas, cand, model.p, eps_grid[j]).members)
        if cfg.error_mode == "miss_true_set":
            err = one_sided_hausdorff(model.space, true, est)
        elif cfg.error_mode == "extraneous_point":
            err = one_sided_hausdorff(model.space, est, true)
        else:
            err = hausdorff(model.space, est, true)
        out[j] = err >= cfg.delta_h
    return out


def _arc_trial(model: ArcModel, cfg: ExperimentConfig, t: int, eps_grid) -> np.ndarray:
    out = np.zeros(len(cfg.n_grid), dtype=bool)
    top = 0
    prev = 0
    for j, n in enumerate(cfg.n_grid):
        top += int(trial_rng(cfg.seed, t, j).binomial(n - prev, 0.5))
        prev = n
        out[j] = _arc_error(model.p, top, n, eps_grid[j], cfg.error_mode, cfg.delta_h)
    return out


def _arc_error(p, top, n, eps, mode, delta_h) -> bool:
    if mode == "miss_true_set":
        missing_east = arc_gap(p, top, n) > eps + 1e-12
        # a missing (1, 0) is at least 1 away from the rest of the set
        if missing_east and delta_h <= 1.0:
            return True
        # distance from (-1, 0) to the set is at most |eta_n|
        if not missing_east and abs(arc_eta(p, top / n)) < delta_h:
            return False
    return arc_errors(p, top, n, eps)[mode] >= delta_h


def _work(cfg: ExperimentConfig) -> float:
    m = cfg.model
    ncand = 1 if isinstance(m, ArcModel) else m.space.size
    return float(cfg.n_grid[-1]) * cfg.trials * ncand


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    work = _work(cfg)
    if work > cfg.work_cap:
        raise ResourceCapError(
            f"experiment size n*trials*|candidates| = {work:.3g} exceeds cap {cfg.work_cap:.3g}"
        )
    eps_grid = [cfg.schedule(n) for n in cfg.n_grid]
    trial = _arc_trial if isinstance(cfg.model, ArcModel) else _finite_trial

    def chunk(lo_hi):
        lo, hi = lo_hi
        return np.array([trial(cfg.model, cfg, t, eps_grid) for t in range(lo, hi)]).reshape(
            hi - lo, len(cfg.n_grid)
        )

    threads = cfg.threads or os.cpu_count() or 1
    nchunks = max(1, min(cfg.trials, threads * 4))
    bounds = np.linspace(0, cfg.trials, nchunks + 1).astype(int)
    spans = [(int(a), int(b)) for a, b in zip(bounds, bounds[1:]) if b > a]
    if threads == 1:
        parts = [chunk(s) for s in spans]
    else:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(chunk, spans))
    return ExperimentReport(cfg, np.vstack(parts))


@dataclass(frozen=True, eq=False)
class ScanResult:
    c_grid: tuple[float, ...]
    reports: tuple[ExperimentReport, ...]
    burn_in: int

    def trajectory_errors(self) -> list[float]:
        return [r.trajectory_error(self.burn_in) for r in self.reports]

    def to_csv(self) -> str:
        rows = [SCAN_HEADER]
        for c, rep, te in zip(self.c_grid, self.reports, self.trajectory_errors()):
            for r in rep.rows():
                rows.append([float(c)] + r + [te, self.burn_in])
        return _csv(rows)


def threshold_scan(model: Model, family: RelaxationSchedule, c_grid: Sequence[float],
                   n_grid: Sequence[int], trials: int, seed: int,
                   error_mode: str = "full_hausdorff", delta_h: float = 0.5,
                   sign: float = 1.0, burn_in: int = 0, threads: Optional[int] = None) -> ScanResult:
    """Run one experiment per coefficient c, using ``family`` with c replaced by sign * c.

    All c share the seed, so trajectories are common across the grid.  The
    trajectory error (any error at an n_grid index >= burn_in) is a finite
    proxy for failure of almost-sure convergence.
    """
    if not 0 <= burn_in < len(n_grid):
        raise InputError("burn_in must index into n_grid")
    reports = []
    for c in c_grid:
        cfg = ExperimentConfig(model, family.with_c(sign * float(c)), tuple(n_grid), trials, seed,
                               delta_h, error_mode, threads)
        reports.append(run_experiment(cfg))
    return ScanResult(tuple(float(c) for c in c_grid), tuple(reports), burn_in)


# ---------------------------------------------------------------- Gaussian supremum


def gaussian_sup_estimate(kernel: CovarianceKernel | np.ndarray, restrict_pairs=None,
                          draws: int = 100_000, seed: int = 0,
                          chunk: int = 100_000) -> tuple[float, float]:
    """Monte Carlo estimate of E max |G| for the centred Gaussian with the kernel's covariance.

    Returns ``(mean, standard_error)``.  Eigenvalues in [-1e-8, 0) are
    clipped to 0; anything more negative raises :class:`NumericError`.
    """
    if draws < 2:
        raise InputError("need at least 2 draws")
    if isinstance(kernel, CovarianceKernel):
        cov = kernel.matrix if restrict_pairs is None else kernel.restrict(restrict_pairs)
    else:
        cov = np.asarray(kernel, dtype=float)
    cov = 0.5 * (cov + cov.T)
    lam, vec = np.linalg.eigh(cov)
    if lam.size and lam.min() < -PSD_TOL:
        raise NumericError(f"covariance is not PSD: eigenvalue {lam.min()!r} < -{PSD_TOL}")
    lam = np.clip(lam, 0.0, None)
    keep = lam > 0
    if not keep.any():
        return 0.0, 0.0
    factor = vec[:, keep] * np.sqrt(lam[keep])
    rng = trial_rng(seed)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < draws:
        m = min(chunk, draws - done)
        g = rng.standard_normal((m, factor.shape[1])) @ factor.T
        s = np.abs(g).max(axis=1)
        total += s.sum()
        total_sq += (s * s).sum()
        done += m
    mean = total / draws
    var = max(total_sq / draws - mean * mean, 0.0) * draws / (draws - 1)
    return float(mean), float(math.sqrt(var / draws))


# ---------------------------------------------------------------- config files


def config_from_dict(d: dict, base_dir: str = ".") -> ExperimentConfig:
    model = model_from_dict(d["model"], base_dir)
    sched = d.get("schedule")
    if isinstance(sched, str):
        schedule = parse_rate(sched)
    elif isinstance(sched, dict):
        schedule = RelaxationSchedule.from_dict(sched)
    else:
        raise InputError("config needs a 'schedule' (object or rate string)")
    return ExperimentConfig(
        model=model, schedule=schedule, n_grid=tuple(d["n_grid"]), trials=int(d["trials"]),
        seed=int(d["seed"]), delta_h=float(d.get("delta_h", 0.5)),
        error_mode=d.get("error_mode", "full_hausdorff"),
        threads=d.get("threads"), work_cap=float(d.get("work_cap", DEFAULT_WORK_CAP)),
    )


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from None


def gnuplot_script(csv_path: str, title: str = "error frequency") -> str:
    return (
        "set datafile separator ','\n"
        "set key autotitle columnhead\n"
        "set logscale x\n"
        "set xlabel 'n'\n"
        "set ylabel 'error frequency'\n"
        f"set title '{title}'\n"
        f"plot '{csv_path}' using 1:9:10 with yerrorlines\n"
    )
