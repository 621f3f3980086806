"""Size-normalized RMS norm and PSNR on 0..255 grayscale arrays.

The RMS norm divides by the element count, so magnitudes are directly
comparable across grid levels of different size.
"""

import numpy as np

from .validation import check_image, check_same_shape

PEAK_INTENSITY = 255.0

# Cap returned instead of +inf when the RMS difference is numerically zero;
# keeps CSV/report output finite.
PSNR_CAP_DB = 300.0
_ZERO_RMS = 1e-12


def rms_norm(v) -> float:
    """Root-mean-square magnitude ``sqrt(mean(v**2))``."""
    arr = np.asarray(v, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("rms_norm of empty input")
    return float(np.sqrt(np.mean(np.square(arr))))


def psnr(u, u_hat) -> float:
    """Peak signal-to-noise ratio ``20*log10(255 / rms(u - u_hat))`` in dB.

    Returns the 300 dB cap when the RMS difference falls below 1e-12.
    """
    a = check_image(u, name="u")
    b = check_image(u_hat, name="u_hat")
    check_same_shape(a, b, names=("u", "u_hat"))
    err = rms_norm(a - b)
    if err < _ZERO_RMS:
        return PSNR_CAP_DB
    return float(20.0 * np.log10(PEAK_INTENSITY / err))
