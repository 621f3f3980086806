"""Cascadic multigrid restoration of blurred, noisy grayscale images.

Images are square 2-D float64 arrays in the 0..255 intensity scale. The
library degrades images with a separable banded Gaussian blur plus scaled
white noise, and restores them either by direct CG/MR solves with a
residual-threshold stop or by coarse-to-fine cascades whose per-level
initial guesses come from linear, quadratic, or extrapolated quadratic
prolongation, refined by a local plane-fit smoother and edge-preserving
diffusion.
"""

from .blur import (
    BLUR_LEVELS,
    NOISE_LEVELS,
    BlurKernel1D,
    DegradationSpec,
    apply_blur,
    build_kernel,
    coarsen_kernel,
    degrade,
)
from .cascade import (
    CASCADE_METHODS,
    DIRECT_METHODS,
    METHODS,
    CascadeConfig,
    GridHierarchy,
    LevelStats,
    RestorationReport,
    build_hierarchy,
    default_levels,
    max_feasible_levels,
    method_label,
    nearest_quadratic_side,
    quadratic_chain_compatible,
    restore,
    run_direct,
    run_eecmg,
    run_iecmg,
)
from .estimators import CascadeRestorer, GaussianDegrader
from .exceptions import ConfigurationError, NumericError, PgmParseError, ShapeError
from .experiment import (
    CSV_HEADER,
    DIAGONAL_SCENARIOS,
    ScenarioRow,
    ordering_checks,
    ordering_summary,
    rows_to_csv,
    run_grid,
    run_scenario,
    tables_markdown,
    write_csv,
    write_tables_markdown,
)
from .image import PEAK_INTENSITY, PSNR_CAP_DB, psnr, rms_norm
from .pgm import quantize, read_pgm, write_pgm
from .phantom import generate_phantom
from .regularize import (
    DiffusionParams,
    LsqParams,
    diffusion_coefficient,
    local_smooth,
    pm_diffuse,
    smooth_then_denoise,
)
from .solvers import (
    ScheduleParams,
    SolveOutcome,
    SolverConfig,
    StopReason,
    cg_smooth,
    iteration_schedule,
    mr_smooth,
)
from .transfer import (
    coarse_side,
    prolong_extrapolated,
    prolong_linear,
    prolong_quadratic,
    restrict,
    richardson_extrapolate,
)
from .validation import check_image

__version__ = "0.1.0"
