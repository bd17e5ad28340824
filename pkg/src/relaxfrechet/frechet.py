"""Frechet functionals, relaxed/restricted mean sets, medoids and Hausdorff distances.

Everything works on finite candidate sets.  A continuous space enters through
a grid (see :mod:`relaxfrechet.metric_core`); refine the grid for accuracy.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import InputError, ResourceCapError
from .metric_core import MetricSpace

TIE_SLACK = 1e-12
WEIGHT_TOL = 1e-12
KERNEL_CAP = 64
PSD_TOL = 1e-8
# max entries of a distance block materialised at once
_BLOCK_ENTRIES = 4_000_000


@dataclass(frozen=True, eq=False)
class EmpiricalMeasure:
    """Finitely supported probability measure on ``space``.

    ``support`` may contain duplicates; ``n`` is the number of samples the
    measure was built from (it sets the sample size in relaxation rates).
    """

    space: MetricSpace
    support: np.ndarray
    weights: np.ndarray
    n: int

    def __post_init__(self):
        support = self.space.ids(self.support)
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if support.size == 0:
            raise InputError("empirical measure needs a non-empty support")
        if w.shape != support.shape:
            raise InputError(f"{w.size} weights for {support.size} support points")
        if (w <= 0).any() or not np.all(np.isfinite(w)):
            raise InputError("weights must be positive and finite")
        if abs(w.sum() - 1.0) > WEIGHT_TOL * max(1, support.size):
            raise InputError(f"weights sum to {w.sum()!r}, expected 1")
        if self.n < 1:
            raise InputError("sample count n must be >= 1")
        support.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_samples(cls, space: MetricSpace, samples) -> "EmpiricalMeasure":
        """Uniform measure (1/n) sum delta_{Y_i}."""
        ids = space.ids(samples)
        if ids.size == 0:
            raise InputError("no samples")
        return cls(space, ids, np.full(ids.size, 1.0 / ids.size), ids.size)

    @classmethod
    def from_counts(cls, space: MetricSpace, atoms, counts) -> "EmpiricalMeasure":
        """Empirical measure of a sample given as atom multiplicities."""
        atoms = space.ids(atoms)
        counts = np.asarray(counts, dtype=np.int64)
        keep = counts > 0
        n = int(counts.sum())
        if n < 1:
            raise InputError("counts must sum to at least 1")
        return cls(space, atoms[keep], counts[keep] / n, n)

    def atoms(self) -> tuple[np.ndarray, np.ndarray]:
        """Distinct support points (sorted) and their total weights."""
        uniq, inv = np.unique(self.support, return_inverse=True)
        return uniq, np.bincount(inv, weights=self.weights)

    def scaled(self, space: MetricSpace) -> "EmpiricalMeasure":
        """Same support and weights on another space of equal size."""
        return EmpiricalMeasure(space, self.support, self.weights, self.n)


@dataclass(frozen=True)
class FrechetParams:
    p: float = 2.0
    candidate_set: Optional[Sequence[int]] = None
    epsilon: float = 0.0

    def __post_init__(self):
        if not self.p >= 1:
            raise InputError(f"p must be >= 1, got {self.p}")
        if not self.epsilon >= 0:
            raise InputError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.candidate_set is not None and len(self.candidate_set) == 0:
            raise InputError("candidate set is empty")


@dataclass(frozen=True, eq=False)
class RelaxedMeanResult:
    members: tuple[int, ...]
    m_p: float
    candidates: np.ndarray
    w_values: np.ndarray
    argmin: int
    epsilon: float
    p: float

    def to_dict(self) -> dict:
        return {
            "members": list(self.members),
            "m_p": self.m_p,
            "argmin": self.argmin,
            "epsilon": self.epsilon,
            "p": self.p,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _powered_block(space: MetricSpace, a: np.ndarray, b: np.ndarray, p: float) -> np.ndarray:
    d = space._block(a, b)
    if p == 1:
        return d
    if p == 2:
        return d * d
    return d**p


def _functional(space, candidates, support, weights, p) -> np.ndarray:
    out = np.empty(candidates.size)
    step = max(1, _BLOCK_ENTRIES // max(1, support.size))
    for lo in range(0, candidates.size, step):
        blk = _powered_block(space, candidates[lo : lo + step], support, p)
        out[lo : lo + step] = blk @ weights
    return out


def frechet_functional(measure: EmpiricalMeasure, x: int, p: float) -> float:
    """W_p(mu, x): the weighted mean of d(x, Y)^p."""
    if not p >= 1:
        raise InputError(f"p must be >= 1, got {p}")
    x_id = measure.space.ids([x])
    return float(_functional(measure.space, x_id, measure.support, measure.weights, p)[0])


def _solve(measure: EmpiricalMeasure, candidates: np.ndarray, p: float, epsilon: float) -> RelaxedMeanResult:
    if candidates.size == 0:
        raise InputError("candidate set is empty")
    w = _functional(measure.space, candidates, measure.support, measure.weights, p)
    k = int(np.argmin(w))  # first occurrence: lowest index wins ties
    m = float(w[k])
    mask = w <= m + epsilon + TIE_SLACK
    members = tuple(int(c) for c in candidates[mask])
    candidates = candidates.copy()
    candidates.setflags(write=False)
    w.setflags(write=False)
    return RelaxedMeanResult(members, m, candidates, w, int(candidates[k]), float(epsilon), float(p))


def _candidates(measure: EmpiricalMeasure, candidate_set) -> np.ndarray:
    if candidate_set is None:
        return measure.space.all_ids()
    ids = measure.space.ids(candidate_set)
    if ids.size == 0:
        raise InputError("candidate set is empty")
    return np.unique(ids)


def relaxed_mean_set(measure: EmpiricalMeasure, params: FrechetParams) -> RelaxedMeanResult:
    """All candidates x with W_p(mu, x) <= m_p + epsilon (exhaustive scan)."""
    return _solve(measure, _candidates(measure, params.candidate_set), params.p, params.epsilon)


def medoid_set(measure: EmpiricalMeasure, p: float, epsilon: float = 0.0) -> RelaxedMeanResult:
    """Relaxed mean set restricted to the distinct support points."""
    params = FrechetParams(p=p, candidate_set=tuple(np.unique(measure.support)), epsilon=epsilon)
    return relaxed_mean_set(measure, params)


def _centered_rows(measure: EmpiricalMeasure, base: np.ndarray, p: float):
    atoms, w = measure.atoms()
    a = _powered_block(measure.space, base, atoms, p)
    a = a - (a @ w)[:, None]
    return a, w


def max_pair_variance(measure: EmpiricalMeasure, base_set, p: float) -> tuple[float, tuple[int, int]]:
    """Largest variance of d^p(x, Y) - d^p(x', Y) over pairs in ``base_set``.

    Uses the biased (1/n) normalisation.  Returns the variance and the
    lexicographically smallest maximising pair.
    """
    base = np.unique(measure.space.ids(base_set))
    if base.size == 0:
        raise InputError("base set is empty")
    if base.size == 1:
        return 0.0, (int(base[0]), int(base[0]))
    a, w = _centered_rows(measure, base, p)
    s = (a * w) @ a.T
    s = 0.5 * (s + s.T)
    d = np.diag(s)
    v = d[:, None] + d[None, :] - 2.0 * s
    np.fill_diagonal(v, 0.0)
    np.maximum(v, 0.0, out=v)
    i, j = np.unravel_index(int(np.argmax(v)), v.shape)
    return float(v[i, j]), (int(base[i]), int(base[j]))


def sigma_hat(measure: EmpiricalMeasure, base_set, p: float) -> float:
    """sqrt(2 * max pair variance) over ``base_set``; 0 for a singleton."""
    var, _ = max_pair_variance(measure, base_set, p)
    return float(np.sqrt(2.0 * var))


@dataclass(frozen=True, eq=False)
class CovarianceKernel:
    """Empirical covariance of Z(x, x') = d^p(x,Y) - d^p(x',Y) - mean over pairs.

    Pairs are indexed lexicographically: pair (candidates[i], candidates[j])
    sits at row ``i * k + j``.
    """

    candidates: tuple[int, ...]
    matrix: np.ndarray

    def index(self, x: int, x2: int) -> int:
        pos = {c: i for i, c in enumerate(self.candidates)}
        try:
            return pos[x] * len(self.candidates) + pos[x2]
        except KeyError as exc:
            raise InputError(f"point {exc.args[0]} is not a kernel candidate") from None

    def pairs(self) -> list[tuple[int, int]]:
        return [(a, b) for a in self.candidates for b in self.candidates]

    def entry(self, pair1: tuple[int, int], pair2: tuple[int, int]) -> float:
        return float(self.matrix[self.index(*pair1), self.index(*pair2)])

    def restrict(self, pairs) -> np.ndarray:
        idx = [self.index(a, b) for a, b in pairs]
        return self.matrix[np.ix_(idx, idx)]


def covariance_kernel(measure: EmpiricalMeasure, candidates, p: float, cap: int = KERNEL_CAP) -> CovarianceKernel:
    cand = np.unique(measure.space.ids(candidates))
    if cand.size == 0:
        raise InputError("candidate set is empty")
    if cand.size > cap:
        raise ResourceCapError(
            f"covariance kernel over {cand.size} candidates exceeds cap {cap} "
            f"(kernel would be {cand.size**2} x {cand.size**2})"
        )
    a, w = _centered_rows(measure, cand, p)
    k = cand.size
    z = (a[:, None, :] - a[None, :, :]).reshape(k * k, -1)
    r = (z * w) @ z.T
    r = 0.5 * (r + r.T)
    r.setflags(write=False)
    return CovarianceKernel(tuple(int(c) for c in cand), r)


def one_sided_hausdorff(space: MetricSpace, a, b) -> float:
    """max over x in A of the distance from x to B."""
    ia, ib = space.ids(a), space.ids(b)
    if ia.size == 0 or ib.size == 0:
        raise InputError("Hausdorff distance needs non-empty sets")
    return float(space._block(ia, ib).min(axis=1).max())


def hausdorff(space: MetricSpace, a, b) -> float:
    ia, ib = space.ids(a), space.ids(b)
    if ia.size == 0 or ib.size == 0:
        raise InputError("Hausdorff distance needs non-empty sets")
    d = space._block(ia, ib)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def load_samples_csv(path) -> np.ndarray:
    """One sample per row; returns a 1-D array for single-column files."""
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rows.append([float(t) for t in line.split(",")])
            except ValueError:
                raise InputError(f"{path}: row {lineno}: unparsable sample {line!r}") from None
    if not rows:
        raise InputError(f"{path}: no samples")
    arr = np.array(rows)
    return arr[:, 0] if arr.shape[1] == 1 else arr
