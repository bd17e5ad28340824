"""Two-step adaptive relaxed Frechet mean set estimator.

Step 0 solves the unrelaxed problem to get m_p.  Step 1 relaxes at the
consistent but slow rate m_p * sqrt(log n / n) and estimates the pre-factor
sigma = sqrt(2 * max pair variance) over the step-1 set.  Step 2 relaxes at
(1 + delta) * sigma * sqrt(llog n / n).

The raw maximal variance is kept in the report next to sigma so both
pre-factor conventions can be compared.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .errors import InputError
from .frechet import EmpiricalMeasure, FrechetParams, max_pair_variance, relaxed_mean_set
from .rates import lil_rate, suboptimal_rate

DEFAULT_DELTA = 0.5


@dataclass(frozen=True)
class TwoStepReport:
    n: int
    p: float
    delta: float
    c0: float
    eps1: float
    step1_members: tuple[int, ...]
    raw_variance: float
    sigma1: float
    argmax_pair: tuple[int, int]
    eps2: float
    step2_members: tuple[int, ...]
    step0_members: tuple[int, ...]

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        for k in ("step1_members", "step2_members", "step0_members", "argmax_pair"):
            d[k] = list(d[k])
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def two_step_estimate(measure: EmpiricalMeasure, candidates=None, p: float = 2.0,
                      delta: float = DEFAULT_DELTA) -> TwoStepReport:
    if not delta > 0:
        raise InputError(f"delta must be > 0, got {delta}")
    n = measure.n
    if n < 2:
        raise InputError("two-step estimation needs at least 2 samples")
    if candidates is not None:
        candidates = tuple(int(c) for c in measure.space.ids(candidates))
        if not candidates:
            raise InputError("candidate set is empty")

    step0 = relaxed_mean_set(measure, FrechetParams(p, candidates, 0.0))
    c0 = step0.m_p
    eps1 = suboptimal_rate(c0)(n)
    step1 = relaxed_mean_set(measure, FrechetParams(p, candidates, eps1))

    raw_var, pair = max_pair_variance(measure, step1.members, p)
    sigma1 = math.sqrt(2.0 * raw_var)
    eps2 = lil_rate((1 + delta) * sigma1)(n)
    step2 = relaxed_mean_set(measure, FrechetParams(p, candidates, eps2))

    return TwoStepReport(
        n=n, p=float(p), delta=float(delta), c0=c0, eps1=eps1,
        step1_members=step1.members, raw_variance=raw_var, sigma1=sigma1,
        argmax_pair=pair, eps2=eps2, step2_members=step2.members,
        step0_members=step0.members,
    )
