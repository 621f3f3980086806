"""Separable Gaussian blur operator on square grids.

The 2-D operator is the tensor product of a banded symmetric Toeplitz
factor with itself, so every application is two banded 1-D passes and the
full matrix is never materialized. Entries beyond the band or outside the
grid contribute zero: no wraparound and no boundary renormalization.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigurationError, ShapeError
from .image import rms_norm
from .validation import check_image

# Named blur levels: id -> (sigma, half bandwidth).
BLUR_LEVELS = {
    "b1": (1.0, 7),
    "b2": (2.0, 9),
    "b3": (3.0, 11),
    "b4": (4.0, 13),
}

# Named relative noise levels: id -> rms(e)/rms(u).
NOISE_LEVELS = {
    "v1": 5e-2,
    "v2": 1e-1,
    "v3": 5e-1,
    "v4": 8e-1,
}


@dataclass(frozen=True, eq=False)
class BlurKernel1D:
    """One grid level's 1-D blur factor.

    ``taps[d]`` is the kernel value at lag ``d``; lags beyond ``band`` are
    implicitly zero. Coarsened kernels keep the sigma they originated from.
    """

    n: int
    sigma: float
    band: int
    taps: np.ndarray

    def __post_init__(self):
        self.taps.setflags(write=False)


def build_kernel(sigma, band, n) -> BlurKernel1D:
    """Gaussian taps ``exp(-d^2/(2 sigma^2)) / (sigma sqrt(2 pi))``, d = 0..band.

    The taps are deliberately not renormalized.
    """
    if sigma <= 0:
        raise ConfigurationError(f"sigma must be positive, got {sigma}")
    if not 1 <= band < n:
        raise ConfigurationError(f"band must satisfy 1 <= band < n, got band={band}, n={n}")
    d = np.arange(band + 1, dtype=np.float64)
    taps = np.exp(-(d**2) / (2.0 * sigma**2)) / (sigma * math.sqrt(2.0 * math.pi))
    return BlurKernel1D(n=int(n), sigma=float(sigma), band=int(band), taps=taps)


def _band_pass(taps, x):
    # symmetric banded Toeplitz matvec along the last axis; zero past the edges
    out = taps[0] * x
    for d in range(1, taps.size):
        t = taps[d]
        out[:, :-d] += t * x[:, d:]
        out[:, d:] += t * x[:, :-d]
    return out


def apply_blur(kernel: BlurKernel1D, image):
    """Apply the separable 2-D blur (one banded pass per axis)."""
    u = check_image(image, square=True)
    if u.shape[0] != kernel.n:
        raise ShapeError(f"image side {u.shape[0]} does not match kernel n={kernel.n}")
    return _band_pass(kernel.taps, _band_pass(kernel.taps, u).T).T


def coarsen_kernel(kernel: BlurKernel1D) -> BlurKernel1D:
    """1-D factor of the coarse operator R H R* for injection at odd nodes.

    Injecting a Toeplitz matrix at every second row and column samples the
    even lags: ``taps'[d] = taps[2 d]``, ``band' = band // 2``,
    ``n' = (n + 1) // 2``.
    """
    if kernel.n < 3:
        raise ConfigurationError(f"cannot coarsen a kernel with n={kernel.n} < 3")
    return BlurKernel1D(
        n=(kernel.n + 1) // 2,
        sigma=kernel.sigma,
        band=kernel.band // 2,
        taps=kernel.taps[::2].copy(),
    )


@dataclass(frozen=True)
class DegradationSpec:
    """Forward-model parameters: blur sigma/band, relative noise level, seed."""

    sigma: float
    band: int
    noise_level: float
    seed: int

    def __post_init__(self):
        if self.sigma <= 0:
            raise ConfigurationError(f"sigma must be positive, got {self.sigma}")
        if self.band < 1:
            raise ConfigurationError(f"band must be >= 1, got {self.band}")
        if self.noise_level < 0:
            raise ConfigurationError(f"noise_level must be >= 0, got {self.noise_level}")


def degrade(u, spec: DegradationSpec):
    """Blur ``u`` and add seeded white noise with ``rms(e)/rms(u) == noise_level``.

    Draws i.i.d. standard normal noise from a PCG64 generator seeded with
    ``spec.seed`` and rescales it so the relative level is met exactly.
    Returns ``(blurred, noisy, noise_rms)``.
    """
    u = check_image(u, square=True)
    kernel = build_kernel(spec.sigma, spec.band, u.shape[0])
    g = apply_blur(kernel, u)
    rng = np.random.default_rng(spec.seed)
    raw = rng.standard_normal(u.shape)
    e = spec.noise_level * (rms_norm(u) / rms_norm(raw)) * raw
    return g, g + e, rms_norm(e)
