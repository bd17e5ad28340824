"""Relaxation-rate schedules.

A schedule evaluates to

    eps_n = max(0, a + c * n^-alpha * (log n)^beta * (llog n)^gamma)

with ``llog n = log(log(max(n, 16)))``.  The rates in the theory are
asymptotic statements; the clamp at 16 keeps ``llog`` positive for small n.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, replace

from .errors import InputError

LLOG_FLOOR_N = 16


def llog(n: float) -> float:
    return math.log(math.log(max(n, LLOG_FLOOR_N)))


@dataclass(frozen=True)
class RelaxationSchedule:
    a: float = 0.0
    c: float = 0.0
    alpha: float = 0.5
    beta: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        if not self.a >= 0:
            raise InputError(f"offset a must be >= 0, got {self.a}")
        if not self.beta >= 0:
            # (log 1)^beta is undefined for beta < 0
            raise InputError(f"log exponent beta must be >= 0, got {self.beta}")
        for name in ("a", "c", "alpha", "beta", "gamma"):
            val = float(getattr(self, name))
            if not math.isfinite(val):
                raise InputError(f"{name} must be finite")
            object.__setattr__(self, name, val)

    def __call__(self, n: int) -> float:
        return evaluate(self, n)

    def with_c(self, c: float) -> "RelaxationSchedule":
        return replace(self, c=c)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "RelaxationSchedule":
        return cls(**{k: float(d[k]) for k in ("a", "c", "alpha", "beta", "gamma") if k in d})


def evaluate(schedule: RelaxationSchedule, n: int) -> float:
    if n < 1:
        raise InputError(f"sample size must be >= 1, got {n}")
    s = schedule
    term = s.c * float(n) ** (-s.alpha)
    if s.beta != 0:
        term *= math.log(n) ** s.beta
    if s.gamma != 0:
        term *= llog(n) ** s.gamma
    return max(0.0, s.a + term)


def lil_rate(c: float) -> RelaxationSchedule:
    """c * sqrt(llog n / n): the scale on which strong consistency switches."""
    return RelaxationSchedule(0.0, c, 0.5, 0.0, 0.5)


def suboptimal_rate(c: float) -> RelaxationSchedule:
    """c * sqrt(log n / n): consistent but slower than necessary."""
    return RelaxationSchedule(0.0, c, 0.5, 0.5, 0.0)


def compact_space_rate(diam: float, p: float) -> RelaxationSchedule:
    return lil_rate(1.5 * diam**p)


def median_rate(diam_f1: float, delta: float) -> RelaxationSchedule:
    return lil_rate((1 + delta) * diam_f1 * math.sqrt(2.0))


def mean_rate(diam_f2: float, m2: float, delta: float) -> RelaxationSchedule:
    return lil_rate(4 * (1 + delta) * diam_f2 * math.sqrt(m2))


def constant_rate(a: float) -> RelaxationSchedule:
    return RelaxationSchedule(a, 0.0, 0.0, 0.0, 0.0)


def two_point_strong_rate(q: float, c: float) -> RelaxationSchedule:
    """|1 - 2q| - c * sqrt(llog n / n), the boundary family for the two-point space."""
    return RelaxationSchedule(abs(1 - 2 * q), -c, 0.5, 0.0, 0.5)


def two_point_weak_rate(q: float, c: float) -> RelaxationSchedule:
    """|1 - 2q| - c / sqrt(n)."""
    return RelaxationSchedule(abs(1 - 2 * q), -c, 0.5, 0.0, 0.0)


_NAMED = {
    "lil": (lil_rate, 1),
    "subopt": (suboptimal_rate, 1),
    "compact": (compact_space_rate, 2),
    "median": (median_rate, 2),
    "mean": (mean_rate, 3),
    "const": (constant_rate, 1),
    "twopoint": (two_point_strong_rate, 2),
    "twopoint-weak": (two_point_weak_rate, 2),
}


def parse_rate(text: str) -> RelaxationSchedule:
    """Parse ``a,c,alpha,beta,gamma`` or a named form such as ``lil:1.2``.

    Named forms: lil:c, subopt:c, compact:diam,p, median:diam,delta,
    mean:diam,m2,delta, const:a, twopoint:q,c, twopoint-weak:q,c.
    """
    text = text.strip()
    try:
        if ":" in text:
            name, args = text.split(":", 1)
            if name not in _NAMED:
                raise InputError(f"unknown rate name {name!r}; expected one of {sorted(_NAMED)}")
            fn, arity = _NAMED[name]
            vals = [float(v) for v in args.split(",")]
            if len(vals) != arity:
                raise InputError(f"rate {name!r} takes {arity} argument(s), got {len(vals)}")
            return fn(*vals)
        vals = [float(v) for v in text.split(",")]
    except InputError:
        raise
    except ValueError:
        raise InputError(f"cannot parse rate {text!r}") from None
    if len(vals) != 5:
        raise InputError(f"rate needs 5 comma-separated numbers a,c,alpha,beta,gamma, got {text!r}")
    return RelaxationSchedule(*vals)
