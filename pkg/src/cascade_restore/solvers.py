"""Budgeted CG and MR smoothers with a residual-threshold stop.

Both solvers terminate at the first of three events: the RMS residual
falls to ``c * delta`` (the noise floor times a constant greater than 1,
which guards against semiconvergent noise amplification), the iteration
budget is exhausted, or the update denominator underflows.
"""

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .exceptions import ConfigurationError, NumericError
from .image import rms_norm
from .validation import check_same_shape

_DENOM_FLOOR = 1e-300


class StopReason(Enum):
    DISCREPANCY = "discrepancy"
    ITERATION_CAP = "iteration_cap"
    STAGNATION = "stagnation"


@dataclass(frozen=True)
class ScheduleParams:
    """Knobs of the per-level iteration budget formula."""

    m0: int = 1
    beta: float = 4.0
    m_star: float = 1.0
    eps0: float = 0.5


@dataclass(frozen=True)
class SolverConfig:
    smoother: str = "cg"  # "cg" | "mr"
    c: float = 1.1  # residual threshold multiplier, must exceed 1
    max_iters_cap: int = 200  # budget for single-level (direct) solves
    schedule: ScheduleParams = field(default_factory=ScheduleParams)

    def __post_init__(self):
        if self.smoother not in ("cg", "mr"):
            raise ConfigurationError(f"unknown smoother {self.smoother!r}")
        if self.c <= 1.0:
            raise ConfigurationError(f"c must be > 1, got {self.c}")
        if self.max_iters_cap < 1:
            raise ConfigurationError(f"max_iters_cap must be >= 1, got {self.max_iters_cap}")


@dataclass
class SolveOutcome:
    solution: np.ndarray
    iterations: int
    residual_history: list  # RMS residuals, length == iterations + 1
    stop_reason: StopReason


def _finish(u, iterations, history, reason):
    return SolveOutcome(u, iterations, history, reason)


def cg_smooth(apply_op, rhs, u0, delta, *, c=1.1, iter_budget):
    """Conjugate gradient iterations on ``H u = rhs`` from ``u0``.

    ``apply_op`` applies the symmetric operator H to an image. Returns as
    soon as the RMS residual is at or below ``c * delta``; a zero-iteration
    outcome means the initial guess already satisfied the threshold.
    """
    check_same_shape(rhs, u0, names=("rhs", "u0"))
    u = np.array(u0, dtype=np.float64)
    r = rhs - apply_op(u)
    history = [rms_norm(r)]
    threshold = c * delta
    if history[0] <= threshold:
        return _finish(u, 0, history, StopReason.DISCREPANCY)
    p = r.copy()
    rr = float(np.vdot(r, r))
    for k in range(1, iter_budget + 1):
        q = apply_op(p)
        curv = float(np.vdot(p, q))
        if curv <= _DENOM_FLOOR:
            return _finish(u, k - 1, history, StopReason.STAGNATION)
        alpha = rr / curv
        u += alpha * p
        r -= alpha * q
        res = rms_norm(r)
        if not math.isfinite(res):
            raise NumericError("non-finite residual in cg_smooth", k)
        history.append(res)
        if res <= threshold:
            return _finish(u, k, history, StopReason.DISCREPANCY)
        if k == iter_budget:
            return _finish(u, k, history, StopReason.ITERATION_CAP)
        rr_new = float(np.vdot(r, r))
        p = r + (rr_new / rr) * p
        rr = rr_new
    raise AssertionError("unreachable")  # pragma: no cover


def mr_smooth(apply_op, rhs, u0, delta, *, c=1.1, iter_budget):
    """One-step minimal residual iterations on ``H u = rhs`` from ``u0``.

    Each step moves along the residual by ``<r, Hr> / <Hr, Hr>``, which
    minimizes the next residual norm, so the history is nonincreasing.
    Termination contract matches :func:`cg_smooth`.
    """
    check_same_shape(rhs, u0, names=("rhs", "u0"))
    u = np.array(u0, dtype=np.float64)
    r = rhs - apply_op(u)
    history = [rms_norm(r)]
    threshold = c * delta
    if history[0] <= threshold:
        return _finish(u, 0, history, StopReason.DISCREPANCY)
    for k in range(1, iter_budget + 1):
        q = apply_op(r)
        qq = float(np.vdot(q, q))
        if qq <= _DENOM_FLOOR:
            return _finish(u, k - 1, history, StopReason.STAGNATION)
        alpha = float(np.vdot(r, q)) / qq
        u += alpha * r
        r -= alpha * q
        res = rms_norm(r)
        if not math.isfinite(res):
            raise NumericError("non-finite residual in mr_smooth", k)
        history.append(res)
        if res <= threshold:
            return _finish(u, k, history, StopReason.DISCREPANCY)
        if k == iter_budget:
            return _finish(u, k, history, StopReason.ITERATION_CAP)
    raise AssertionError("unreachable")  # pragma: no cover


def iteration_schedule(levels: int, level: int, schedule: ScheduleParams = ScheduleParams()) -> int:
    """Iteration budget for one level of a ``levels``-deep cascade.

    Fine levels (above ``ceil(levels / 2)``) get
    ``ceil(m0 * (L - L0)^2 * beta^(L - l))``; coarse levels get
    ``ceil(m_star^(l/2) * (L - (2 - eps0) * l) / h_l^2)`` with
    ``h_l = 2^-(l-1)``. The ceiling returns the smallest positive integer
    not below its argument, so nonpositive values clamp to 1.
    """
    if not 1 <= level <= levels:
        raise ValueError(f"level {level} outside 1..{levels}")
    l0 = math.ceil(levels / 2)
    if level > l0:
        t = schedule.m0 * (levels - l0) ** 2 * schedule.beta ** (levels - level)
    else:
        h = 0.5 ** (level - 1)
        t = schedule.m_star ** (level / 2) * (levels - (2.0 - schedule.eps0) * level) / h**2
    return max(1, math.ceil(t))
