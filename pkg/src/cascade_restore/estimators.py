"""Scikit-learn style wrappers around the degradation and restoration pipelines.

Both estimators operate on a single grayscale image (a square 2-D array in
the 0..255 scale) and follow the fit/transform protocol, so they compose
with pipelines and hyperparameter search via ``get_params``/``set_params``.
"""

from sklearn.base import BaseEstimator, TransformerMixin

from .blur import DegradationSpec, build_kernel, degrade
from .cascade import DIRECT_METHODS, CascadeConfig, default_levels, restore
from .regularize import DiffusionParams, LsqParams
from .solvers import SolverConfig
from .validation import check_image


class GaussianDegrader(BaseEstimator, TransformerMixin):
    """Forward model: separable Gaussian blur plus seeded white noise.

    ``transform`` returns the degraded image; the noise is rescaled so its
    RMS is exactly ``noise_level`` times the input's RMS. After a
    transform, ``blurred_`` holds the noise-free blurred image and
    ``delta_`` the noise RMS magnitude.
    """

    def __init__(self, sigma=1.0, band=7, noise_level=0.05, seed=0):
        self.sigma = sigma
        self.band = band
        self.noise_level = noise_level
        self.seed = seed

    def fit(self, X, y=None):
        check_image(X, square=True)
        return self

    def transform(self, X):
        X = check_image(X, square=True)
        spec = DegradationSpec(self.sigma, self.band, self.noise_level, self.seed)
        g, g_delta, delta = degrade(X, spec)
        self.blurred_ = g
        self.delta_ = delta
        return g_delta


class CascadeRestorer(BaseEstimator, TransformerMixin):
    """Restore a blurred, noisy image by a coarse-to-fine cascade.

    Parameters mirror the CLI flags: ``method`` is one of ``cg``, ``mr``
    (direct single-level solves), ``iecmg-l``, ``iecmg-p`` (cascades with
    linear or quadratic prolongation) or ``eecmg`` (extrapolated
    prolongation). ``delta`` is the RMS noise magnitude used by the
    residual stopping rule; ``sigma``/``band`` describe the blur that
    produced the input. After a transform, ``report_`` holds the full
    per-level statistics.
    """

    def __init__(
        self,
        sigma=1.0,
        band=7,
        delta=0.0,
        method="eecmg",
        smoother="cg",
        levels=None,
        c=1.1,
        max_iters=200,
        k=10.0,
        tau=0.2,
        steps=1,
        rho=0.1,
    ):
        self.sigma = sigma
        self.band = band
        self.delta = delta
        self.method = method
        self.smoother = smoother
        self.levels = levels
        self.c = c
        self.max_iters = max_iters
        self.k = k
        self.tau = tau
        self.steps = steps
        self.rho = rho

    def _config(self):
        return CascadeConfig(
            method=self.method,
            levels=None if self.method in DIRECT_METHODS else self.levels,
            solver=SolverConfig(smoother=self.smoother, c=self.c, max_iters_cap=self.max_iters),
            lsq=LsqParams(rho=self.rho),
            diffusion=DiffusionParams(k=self.k, tau=self.tau, steps=self.steps),
        )

    def fit(self, X, y=None):
        X = check_image(X, square=True)
        self._config()  # validate parameters early
        if self.method in DIRECT_METHODS:
            self.levels_ = 1
        elif self.levels is not None:
            self.levels_ = self.levels
        else:
            self.levels_ = default_levels(X.shape[0], self.band)
        return self

    def transform(self, X):
        X = check_image(X, square=True)
        kernel = build_kernel(self.sigma, self.band, X.shape[0])
        report = restore(X, kernel, self.delta, self._config())
        self.report_ = report
        return report.restored
