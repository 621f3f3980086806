"""Coarse-to-fine restoration drivers over a nested grid hierarchy.

The hierarchy restricts the degraded data and coarsens the blur kernel
level by level; the drivers solve coarsest-first, carrying each level's
iterate up as the next level's initial guess. Three cascade variants
differ only in how that guess is produced: linear prolongation, quadratic
prolongation, or extrapolation followed by quadratic fill.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .blur import BlurKernel1D, apply_blur, coarsen_kernel
from .exceptions import ConfigurationError, ShapeError
from .image import psnr
from .regularize import DiffusionParams, LsqParams, smooth_then_denoise
from .solvers import (
    ScheduleParams,
    SolverConfig,
    StopReason,
    cg_smooth,
    iteration_schedule,
    mr_smooth,
)
from .transfer import coarse_side, prolong_extrapolated, prolong_linear, prolong_quadratic, restrict
from .validation import check_image

DIRECT_METHODS = ("cg", "mr")
CASCADE_METHODS = ("iecmg-l", "iecmg-p", "eecmg")
METHODS = DIRECT_METHODS + CASCADE_METHODS

# methods whose prolongation needs the strictly odd side chain
_QUADRATIC_METHODS = ("iecmg-p", "eecmg")

_SMOOTHERS = {"cg": cg_smooth, "mr": mr_smooth}


@dataclass(frozen=True)
class GridHierarchy:
    """Nested grid data, coarsest first: ``data[0]`` is level 1.

    Invariants (established by :func:`build_hierarchy`): each level's data
    is the injection restriction of the next finer level's, each level's
    kernel is the coarsening of the next finer level's, and ``deltas``
    holds the residual-threshold magnitude used at each level.
    """

    data: tuple
    kernels: tuple
    deltas: tuple

    @property
    def levels(self) -> int:
        return len(self.data)

    def side(self, level: int) -> int:
        return self.data[level - 1].shape[0]


def max_feasible_levels(side: int, band: int) -> int:
    """Largest level count the side and band chains allow.

    Each extra level halves the side (rounding up) and the band (rounding
    down); sides must stay >= 3, bands >= 1, and the coarsest side must
    cover its kernel (side >= 2 * band + 1).
    """
    levels = 1
    n, b = side, band
    while True:
        n2, b2 = coarse_side(n), b // 2
        if n2 < 3 or b2 < 1 or n2 < 2 * b2 + 1:
            return levels
        n, b, levels = n2, b2, levels + 1


def quadratic_chain_compatible(side: int, levels: int) -> bool:
    """Whether every level of the side chain is odd (needed for the
    quadratic and extrapolated prolongations)."""
    step = 2**levels
    return (side - 1) % step == 0 and (side - 1) // 2 ** (levels - 1) + 1 >= 3


def nearest_quadratic_side(side: int, levels: int) -> int:
    """Closest side with a fully odd chain; ties prefer the smaller side."""
    step = 2**levels
    k = max(1, (side - 1) // step)
    down = k * step + 1
    up = (k + 1) * step + 1
    return down if side - down <= up - side else up


def build_hierarchy(g_delta, kernel: BlurKernel1D, delta, levels: int, per_level_deltas=None) -> GridHierarchy:
    """Restrict the data and coarsen the kernel ``levels - 1`` times.

    ``delta`` is reused as the residual threshold magnitude at every level
    (the RMS norm is size-normalized, so the noise magnitude is comparable
    across levels); pass ``per_level_deltas`` (coarsest first) to override.
    """
    g = check_image(g_delta, square=True)
    if g.shape[0] != kernel.n:
        raise ShapeError(f"data side {g.shape[0]} does not match kernel n={kernel.n}")
    if levels < 1:
        raise ConfigurationError(f"levels must be >= 1, got {levels}")
    feasible = max_feasible_levels(kernel.n, kernel.band)
    if levels > feasible:
        raise ConfigurationError(
            f"levels={levels} is infeasible for side {kernel.n} and band {kernel.band}; "
            f"maximum feasible levels is {feasible}"
        )
    data = [g]
    kernels = [kernel]
    for _ in range(levels - 1):
        data.append(restrict(data[-1]))
        kernels.append(coarsen_kernel(kernels[-1]))
    data.reverse()
    kernels.reverse()
    if per_level_deltas is None:
        deltas = (float(delta),) * levels
    else:
        if len(per_level_deltas) != levels:
            raise ConfigurationError(
                f"per_level_deltas must have {levels} entries, got {len(per_level_deltas)}"
            )
        deltas = tuple(float(d) for d in per_level_deltas)
    return GridHierarchy(tuple(data), tuple(kernels), deltas)


@dataclass(frozen=True)
class CascadeConfig:
    method: str = "eecmg"
    levels: int | None = None  # None: 4 when feasible, else the maximum
    solver: SolverConfig = field(default_factory=SolverConfig)
    lsq: LsqParams = field(default_factory=LsqParams)
    diffusion: DiffusionParams = field(default_factory=DiffusionParams)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigurationError(f"unknown method {self.method!r}; choose from {METHODS}")
        if self.levels is not None:
            if self.method in DIRECT_METHODS:
                raise ConfigurationError("direct methods are single-level; do not set levels")
            if self.levels < 1:
                raise ConfigurationError(f"levels must be >= 1, got {self.levels}")
            if self.method == "eecmg" and self.levels < 2:
                raise ConfigurationError("eecmg needs at least 2 levels")


@dataclass(frozen=True)
class LevelStats:
    level: int
    budget: int
    iterations: int
    final_residual: float
    stop_reason: StopReason


@dataclass
class RestorationReport:
    restored: np.ndarray
    method: str  # display label, e.g. "EECMG (MR)"
    per_level: list
    wall_time_s: float
    psnr_db: float | None = None
    config: dict = field(default_factory=dict)


def method_label(method: str, smoother: str) -> str:
    """Display name: direct methods by smoother, cascades as NAME (SMOOTHER)."""
    if method in DIRECT_METHODS:
        return method.upper()
    return f"{method.upper()} ({smoother.upper()})"


def default_levels(side: int, band: int) -> int:
    """4 when the side and band chains allow it, else the maximum feasible."""
    return min(4, max_feasible_levels(side, band))


def _solve_level(h, level, u0, budget, smoother, c):
    kernel = h.kernels[level - 1]
    out = _SMOOTHERS[smoother](
        lambda img: apply_blur(kernel, img),
        h.data[level - 1],
        u0,
        h.deltas[level - 1],
        c=c,
        iter_budget=budget,
    )
    stats = LevelStats(level, budget, out.iterations, float(out.residual_history[-1]), out.stop_reason)
    return out.solution, stats


def run_direct(h: GridHierarchy, config: CascadeConfig) -> RestorationReport:
    """Single solve at the finest level from a zero initial guess."""
    if config.method not in DIRECT_METHODS:
        raise ConfigurationError(f"run_direct got method {config.method!r}")
    start = time.perf_counter()
    level = h.levels
    u0 = np.zeros_like(h.data[level - 1])
    u, stats = _solve_level(h, level, u0, config.solver.max_iters_cap, config.method, config.solver.c)
    return RestorationReport(
        restored=u,
        method=method_label(config.method, config.method),
        per_level=[stats],
        wall_time_s=time.perf_counter() - start,
    )


def run_iecmg(h: GridHierarchy, config: CascadeConfig) -> RestorationReport:
    """Cascade with single-level prolongation (linear or quadratic).

    Solve level 1 from zero, then for each finer level: prolong the
    previous iterate, locally smooth it, denoise it, and smooth with that
    level's iteration budget.
    """
    if config.method not in ("iecmg-l", "iecmg-p"):
        raise ConfigurationError(f"run_iecmg got method {config.method!r}")
    prolong = prolong_linear if config.method == "iecmg-l" else prolong_quadratic
    smoother, c = config.solver.smoother, config.solver.c
    start = time.perf_counter()
    levels = h.levels
    budgets = [iteration_schedule(levels, l, config.solver.schedule) for l in range(1, levels + 1)]
    u, stats = _solve_level(h, 1, np.zeros_like(h.data[0]), budgets[0], smoother, c)
    per_level = [stats]
    for level in range(2, levels + 1):
        guess = prolong(u, h.side(level))
        guess = smooth_then_denoise(guess, config.lsq, config.diffusion)
        u, stats = _solve_level(h, level, guess, budgets[level - 1], smoother, c)
        per_level.append(stats)
    return RestorationReport(
        restored=u,
        method=method_label(config.method, smoother),
        per_level=per_level,
        wall_time_s=time.perf_counter() - start,
    )


def run_eecmg(h: GridHierarchy, config: CascadeConfig) -> RestorationReport:
    """Cascade with extrapolated initial guesses.

    Levels 1 and 2 are solved independently from zero. Each further
    level's guess extrapolates from the previous two iterates, is locally
    smoothed and denoised, then smoothed with that level's budget.
    """
    if config.method != "eecmg":
        raise ConfigurationError(f"run_eecmg got method {config.method!r}")
    if h.levels < 2:
        raise ConfigurationError("eecmg needs at least 2 levels")
    smoother, c = config.solver.smoother, config.solver.c
    start = time.perf_counter()
    levels = h.levels
    budgets = [iteration_schedule(levels, l, config.solver.schedule) for l in range(1, levels + 1)]
    u_prev, s1 = _solve_level(h, 1, np.zeros_like(h.data[0]), budgets[0], smoother, c)
    u, s2 = _solve_level(h, 2, np.zeros_like(h.data[1]), budgets[1], smoother, c)
    per_level = [s1, s2]
    for level in range(2, levels):
        guess = prolong_extrapolated(u, u_prev)
        guess = smooth_then_denoise(guess, config.lsq, config.diffusion)
        nxt, stats = _solve_level(h, level + 1, guess, budgets[level], smoother, c)
        u_prev, u = u, nxt
        per_level.append(stats)
    return RestorationReport(
        restored=u,
        method=method_label("eecmg", smoother),
        per_level=per_level,
        wall_time_s=time.perf_counter() - start,
    )


def resolve_levels(config: CascadeConfig, side: int, band: int) -> int:
    """Level count a restore run will use for this config and problem size."""
    if config.method in DIRECT_METHODS:
        return 1
    levels = config.levels if config.levels is not None else default_levels(side, band)
    if config.method == "eecmg":
        levels = max(2, levels)
    return levels


def restore(g_delta, kernel: BlurKernel1D, delta, config: CascadeConfig, truth=None) -> RestorationReport:
    """Build the hierarchy for ``config`` and run the requested method.

    ``delta`` is the RMS magnitude of the data noise (the residual
    threshold is ``c * delta``). When ``truth`` is given the report's
    ``psnr_db`` is filled in.
    """
    g = check_image(g_delta, square=True)
    levels = resolve_levels(config, g.shape[0], kernel.band)
    if (
        config.method in _QUADRATIC_METHODS
        and levels >= 2
        and not quadratic_chain_compatible(g.shape[0], levels)
    ):
        raise ConfigurationError(
            f"side {g.shape[0]} is incompatible with {config.method} at {levels} levels; "
            f"nearest compatible side is {nearest_quadratic_side(g.shape[0], levels)}"
        )
    h = build_hierarchy(g, kernel, delta, levels)
    if config.method in DIRECT_METHODS:
        report = run_direct(h, config)
    elif config.method == "eecmg":
        report = run_eecmg(h, config)
    else:
        report = run_iecmg(h, config)
    report.config = {
        "method": config.method,
        "smoother": config.method if config.method in DIRECT_METHODS else config.solver.smoother,
        "levels": levels,
        "c": config.solver.c,
        "max_iters_cap": config.solver.max_iters_cap,
        "k": config.diffusion.k,
        "tau": config.diffusion.tau,
        "steps": config.diffusion.steps,
        "rho": config.lsq.rho,
        "sigma": kernel.sigma,
        "band": kernel.band,
        "delta": float(delta),
        "side": g.shape[0],
    }
    if truth is not None:
        report.psnr_db = psnr(truth, report.restored)
    return report
