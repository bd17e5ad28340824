"""Finite metric spaces, diameters and covering-number diagnostics.

Three concrete spaces are provided:

* :class:`FiniteMatrix` -- an explicit symmetric distance matrix, validated on
  construction.
* :class:`EuclideanPoints` -- points in R^d with the Euclidean distance.
* :class:`ArcSpace` -- the isolated point theta=0 together with the arc
  theta in [pi/2, 3pi/2] of the unit circle, with geodesic distance rescaled by
  2/pi.  The arc is discretised into a uniform theta-grid for candidate
  enumeration, but distances are always computed analytically.

Points are addressed by integer ids (``PointId``) in ``range(space.size)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from .errors import InputError

EXHAUSTIVE_TRIANGLE_LIMIT = 512
SAMPLED_TRIPLES = 100_000
METRIC_TOL = 1e-12


def _as_ids(ids: Iterable[int] | np.ndarray, size: int) -> np.ndarray:
    arr = np.asarray(list(ids) if not isinstance(ids, np.ndarray) else ids)
    if arr.size == 0:
        return arr.astype(np.intp).reshape(0)
    if not np.issubdtype(arr.dtype, np.integer):
        if np.issubdtype(arr.dtype, np.floating) and np.all(arr == np.round(arr)):
            arr = arr.astype(np.intp)
        else:
            raise InputError(f"point ids must be integers, got dtype {arr.dtype}")
    arr = arr.astype(np.intp).reshape(-1)
    bad = (arr < 0) | (arr >= size)
    if bad.any():
        raise InputError(
            f"point id {int(arr[np.argmax(bad)])} out of range for space of size {size}"
        )
    return arr


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


class MetricSpace:
    """Base class: a finite set of points with a distance oracle."""

    size: int

    def ids(self, ids) -> np.ndarray:
        """Validate ``ids`` and return them as an integer array."""
        return _as_ids(ids, self.size)

    def all_ids(self) -> np.ndarray:
        return np.arange(self.size, dtype=np.intp)

    def block(self, a, b) -> np.ndarray:
        """Distance matrix between the point lists ``a`` and ``b``."""
        return self._block(self.ids(a), self.ids(b))

    def _block(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def distance(self, a: int, b: int) -> float:
        return float(self.block([a], [b])[0, 0])


@dataclass(frozen=True, eq=False)
class FiniteMatrix(MetricSpace):
    """Metric given by an explicit ``n x n`` distance matrix."""

    matrix: np.ndarray
    validate: bool = True
    _seed: int = field(default=0, repr=False)

    def __post_init__(self):
        d = np.asarray(self.matrix, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] == 0:
            raise InputError(f"distance matrix must be square and non-empty, got shape {d.shape}")
        object.__setattr__(self, "matrix", _readonly(d))
        if self.validate:
            check_metric(self.matrix, seed=self._seed)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def _block(self, a, b):
        return self.matrix[np.ix_(a, b)]

    def scaled(self, lam: float) -> "FiniteMatrix":
        return FiniteMatrix(lam * self.matrix, validate=False)


@dataclass(frozen=True, eq=False)
class EuclideanPoints(MetricSpace):
    """Points in R^d with the Euclidean metric.  1-D input is treated as the line."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise InputError(f"points must be a non-empty (n, d) array, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            row = int(np.argmax(~np.all(np.isfinite(pts), axis=1)))
            raise InputError(f"non-finite coordinate in row {row}")
        object.__setattr__(self, "points", _readonly(pts))

    @property
    def size(self) -> int:
        return self.points.shape[0]

    def _block(self, a, b):
        pa, pb = self.points[a], self.points[b]
        if pa.shape[1] == 1:
            return np.abs(pa[:, 0][:, None] - pb[:, 0][None, :])
        return cdist(pa, pb)


def arc_distance(theta1, theta2):
    """Geodesic circle distance rescaled by 2/pi, vectorised over numpy inputs."""
    r = np.mod(np.abs(np.asarray(theta1, float) - np.asarray(theta2, float)), 2 * math.pi)
    return (2.0 / math.pi) * np.minimum(r, 2 * math.pi - r)


@dataclass(frozen=True, eq=False)
class ArcSpace(MetricSpace):
    """{theta = 0} union [pi/2, 3pi/2], discretised with ``resolution`` points.

    Id 0 is theta = 0; ids ``1..resolution-1`` are a uniform grid on the arc,
    including both endpoints.  With an odd number of arc points theta = pi is a
    grid point.
    """

    resolution: int = 2048

    def __post_init__(self):
        if self.resolution < 3:
            raise InputError("ArcSpace resolution must be >= 3")
        thetas = np.concatenate(
            [[0.0], np.linspace(math.pi / 2, 3 * math.pi / 2, self.resolution - 1)]
        )
        object.__setattr__(self, "thetas", _readonly(thetas))

    @property
    def size(self) -> int:
        return self.resolution

    def _block(self, a, b):
        return arc_distance(self.thetas[a][:, None], self.thetas[b][None, :])

    def nearest_id(self, theta: float) -> int:
        return int(np.argmin(arc_distance(self.thetas, theta)))


def check_metric(d: np.ndarray, tol: float = METRIC_TOL, seed: int = 0) -> None:
    """Raise :class:`InputError` naming the offending entry if ``d`` is not a metric.

    The triangle inequality is checked exhaustively for n <= 512 and on
    100000 random triples above that.
    """
    n = d.shape[0]
    if not np.all(np.isfinite(d)):
        i, j = np.argwhere(~np.isfinite(d))[0]
        raise InputError(f"non-finite distance at row {i}, column {j}")
    if (d < 0).any():
        i, j = np.argwhere(d < 0)[0]
        raise InputError(f"negative distance at row {i}, column {j}")
    diag = np.diag(d)
    if (diag != 0).any():
        i = int(np.argmax(diag != 0))
        raise InputError(f"non-zero diagonal at row {i}")
    scale = max(1.0, float(d.max()))
    asym = np.abs(d - d.T) > tol * scale
    if asym.any():
        i, j = np.argwhere(asym)[0]
        raise InputError(f"asymmetric distance at row {i}, column {j}")
    slack = tol * scale
    if n <= EXHAUSTIVE_TRIANGLE_LIMIT:
        for k in range(n):
            viol = d > d[:, k][:, None] + d[k, :][None, :] + slack
            if viol.any():
                i, j = np.argwhere(viol)[0]
                raise InputError(
                    f"triangle inequality fails for triple (x={i}, y={k}, z={j}): "
                    f"d(x,z)={d[i, j]!r} > d(x,y)+d(y,z)={d[i, k] + d[k, j]!r}"
                )
    else:
        rng = np.random.default_rng(seed)
        i, j, k = rng.integers(0, n, size=(3, SAMPLED_TRIPLES))
        viol = d[i, j] > d[i, k] + d[k, j] + slack
        if viol.any():
            t = int(np.argmax(viol))
            raise InputError(
                f"triangle inequality fails for triple (x={i[t]}, y={k[t]}, z={j[t]})"
            )


def distance(space: MetricSpace, a: int, b: int) -> float:
    return space.distance(a, b)


def diameter(space: MetricSpace, candidates) -> float:
    ids = space.ids(candidates)
    if ids.size == 0:
        raise InputError("diameter of an empty candidate set")
    return float(space._block(ids, ids).max())


def farthest_point_radii(space: MetricSpace, candidates) -> tuple[np.ndarray, np.ndarray]:
    """Greedy farthest-point traversal of ``candidates``.

    Returns ``(order, radii)`` where ``order[k]`` is the k-th chosen centre
    (starting from the first candidate) and ``radii[k]`` is the covering
    radius of the first ``k + 1`` centres.  ``radii`` is non-increasing and
    the traversal stops once it reaches 0.
    """
    ids = space.ids(candidates)
    if ids.size == 0:
        raise InputError("empty candidate set")
    order = [0]
    mind = space._block(ids[:1], ids)[0].copy()
    radii = [float(mind.max())]
    while radii[-1] > 0.0:
        nxt = int(np.argmax(mind))
        order.append(nxt)
        np.minimum(mind, space._block(ids[nxt : nxt + 1], ids)[0], out=mind)
        radii.append(float(mind.max()))
    return ids[np.array(order)], np.array(radii)


def covering_number(space: MetricSpace, candidates, epsilon: float) -> int:
    """Size of a greedy epsilon-net with closed balls.

    This is an upper bound on the minimal covering number N(epsilon), and at
    most N(epsilon / 2) by the usual packing argument.
    """
    if not epsilon >= 0:
        raise InputError(f"epsilon must be >= 0, got {epsilon}")
    _, radii = farthest_point_radii(space, candidates)
    return int(np.argmax(radii <= epsilon)) + 1


@dataclass(frozen=True)
class CoveringReport:
    epsilon_grid: tuple[float, ...]
    counts: tuple[int, ...]
    dudley_integral: float

    def to_dict(self) -> dict:
        return {
            "epsilon_grid": list(self.epsilon_grid),
            "counts": list(self.counts),
            "dudley_integral": self.dudley_integral,
        }


def dudley_report(space: MetricSpace, candidates, epsilon_grid: Sequence[float]) -> CoveringReport:
    """Covering numbers on a radius grid and the trapezoid value of
    the integral of sqrt(log N(eps)) over that grid (log N = 0 where N = 1)."""
    grid = np.asarray(epsilon_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise InputError("epsilon_grid must be a non-empty list of radii")
    if not (grid > 0).all():
        raise InputError("epsilon_grid must be positive")
    if grid.size > 1 and not (np.diff(grid) > 0).all():
        raise InputError("epsilon_grid must be strictly increasing")
    _, radii = farthest_point_radii(space, candidates)
    # first k with radii[k] <= eps; radii is non-increasing
    counts = np.array([int(np.argmax(radii <= e)) + 1 for e in grid])
    vals = np.sqrt(np.log(counts))
    integral = float(np.trapezoid(vals, grid)) if grid.size > 1 else 0.0
    return CoveringReport(tuple(grid.tolist()), tuple(int(c) for c in counts), integral)


def load_matrix_csv(path) -> FiniteMatrix:
    return FiniteMatrix(_load_csv(path, what="distance matrix"))


def load_points_csv(path) -> EuclideanPoints:
    return EuclideanPoints(_load_csv(path, what="point"))


def _load_csv(path, what: str) -> np.ndarray:
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rows.append([float(tok) for tok in line.split(",")])
            except ValueError:
                raise InputError(f"{path}: row {lineno}: unparsable {what} row {line!r}") from None
    if not rows:
        raise InputError(f"{path}: no rows")
    width = len(rows[0])
    for i, r in enumerate(rows, start=1):
        if len(r) != width:
            raise InputError(f"{path}: row {i} has {len(r)} columns, expected {width}")
    return np.array(rows, dtype=float)
