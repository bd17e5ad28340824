"""Exact relaxed median sets on the real line.

W_1(x) = (1/n) sum |x - y_i| is convex and piecewise affine with breakpoints at
the order statistics; between y_(k) and y_(k+1) its slope is (2k - n) / n and
outside the sample range it is -1 / +1.  The relaxed median set
{x : W_1(x) <= m_1 + eps} is therefore an interval whose endpoints are found
by inverting one affine piece on each side.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .rates import llog

SIGMA_MODES = ("exact", "diameter")


@dataclass(frozen=True)
class MedianInterval:
    u: float
    v: float
    m1: float
    epsilon: float = 0.0

    def to_dict(self) -> dict:
        return {"u": self.u, "v": self.v, "m1": self.m1, "epsilon": self.epsilon}


def _sorted(samples) -> np.ndarray:
    y = np.sort(np.asarray(samples, dtype=float).reshape(-1))
    if y.size == 0:
        raise InputError("no samples")
    if not np.all(np.isfinite(y)):
        raise InputError("samples must be finite")
    return y


def w1(samples, x) -> np.ndarray:
    """W_1 of the empirical measure, evaluated at the points ``x``."""
    y = np.asarray(samples, dtype=float).reshape(-1)
    x = np.asarray(x, dtype=float)
    return np.abs(x[..., None] - y).mean(axis=-1)


def median_m1(samples) -> float:
    """Minimum of W_1 from the order statistics: (sum of the upper half - sum of the lower half) / n."""
    y = _sorted(samples)
    n = y.size
    i = np.arange(1, n + 1)
    mid = (n + 1) / 2
    return float((y[i > mid].sum() - y[i < mid].sum()) / n)


def _w1_at_order_stats(y: np.ndarray) -> np.ndarray:
    n = y.size
    k = np.arange(1, n + 1)
    csum = np.cumsum(y)
    total = csum[-1]
    return (k * y - csum + (total - csum) - (n - k) * y) / n


def median_interval(samples, epsilon: float = 0.0) -> MedianInterval:
    if not epsilon >= 0:
        raise InputError(f"epsilon must be >= 0, got {epsilon}")
    y = _sorted(samples)
    n = y.size
    m1 = median_m1(y)
    thr = m1 + epsilon
    wk = _w1_at_order_stats(y)
    # the left median always satisfies W <= m1 up to rounding
    med = (n + 1) // 2 - 1
    tol = 1e-12 * max(1.0, abs(thr))
    ok = wk <= thr + tol
    ok[med] = True

    # lower end: first order statistic inside the level set, then invert the piece to its left
    lo = int(np.argmax(ok))
    if lo == 0:
        u = y[0] - max(thr - wk[0], 0.0)
    else:
        slope = (2 * lo - n) / n  # lo points strictly to the left, so slope < 0
        u = max(y[lo] + max(thr - wk[lo], 0.0) / slope, y[lo - 1])
    hi = n - 1 - int(np.argmax(ok[::-1]))
    if hi == n - 1:
        v = y[-1] + max(thr - wk[-1], 0.0)
    else:
        slope = (2 * (hi + 1) - n) / n
        if slope == 0:
            # flat middle piece of an even sample; only reachable through rounding
            v = y[hi + 1]
        else:
            v = min(y[hi] + max(thr - wk[hi], 0.0) / slope, y[hi + 1])
    return MedianInterval(float(u), float(v), m1, float(epsilon))


def sigma1_exact(samples, u: float, v: float) -> float:
    """sqrt(2 * biased variance of |v - Y| - |u - Y|) under the empirical measure."""
    if u > v:
        raise InputError(f"need u <= v, got u={u}, v={v}")
    y = np.asarray(samples, dtype=float).reshape(-1)
    diff = np.abs(v - y) - np.abs(u - y)
    val = 2.0 * np.mean(diff * diff) - 2.0 * np.mean(diff) ** 2
    return float(math.sqrt(max(val, 0.0)))


@dataclass(frozen=True)
class TwoStepMedian:
    interval: MedianInterval
    step0: MedianInterval
    step1: MedianInterval
    eps1: float
    eps2: float
    sigma_exact: float
    sigma_diameter: float
    mode: str
    delta: float
    n: int

    def to_dict(self) -> dict:
        d = self.interval.to_dict()
        d["diagnostics"] = {
            "n": self.n,
            "delta": self.delta,
            "mode": self.mode,
            "step0": self.step0.to_dict(),
            "step1": self.step1.to_dict(),
            "eps1": self.eps1,
            "eps2": self.eps2,
            "sigma_exact": self.sigma_exact,
            "sigma_diameter": self.sigma_diameter,
        }
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def two_step_median_1d(samples, delta: float = 0.5, mode: str = "exact") -> TwoStepMedian:
    """Two-step relaxed median interval.

    ``mode="exact"`` uses the exact pre-factor sigma_1 on the step-1 interval;
    ``mode="diameter"`` uses the bound sqrt(2) * (v1 - u1).
    """
    if mode not in SIGMA_MODES:
        raise InputError(f"mode must be one of {SIGMA_MODES}, got {mode!r}")
    if not delta > 0:
        raise InputError(f"delta must be > 0, got {delta}")
    y = _sorted(samples)
    n = y.size
    if n < 2:
        raise InputError("two-step estimation needs at least 2 samples")
    step0 = median_interval(y, 0.0)
    eps1 = step0.m1 * math.sqrt(math.log(n) / n)
    step1 = median_interval(y, eps1)
    s_exact = sigma1_exact(y, step1.u, step1.v)
    s_diam = math.sqrt(2.0) * (step1.v - step1.u)
    pref = s_exact if mode == "exact" else s_diam
    eps2 = (1 + delta) * pref * math.sqrt(llog(n) / n)
    final = median_interval(y, eps2)
    return TwoStepMedian(final, step0, step1, eps1, eps2, s_exact, s_diam, mode, float(delta), n)
