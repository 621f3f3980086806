"""Deterministic synthetic test image: sharp shapes over smooth shading."""

import numpy as np


def generate_phantom(side: int = 129):
    """Grayscale test target in the 0..255 scale.

    Smoothly shaded background with a bright disk, a dark rectangle, a
    mid-gray triangle and two thin lines, so restoration quality reflects
    both smooth regions and sharp edges. Fully deterministic.
    """
    yy, xx = np.mgrid[0:side, 0:side]
    y = yy / (side - 1)
    x = xx / (side - 1)
    img = 70.0 + 55.0 * x + 40.0 * y * y

    disk = (x - 0.32) ** 2 + (y - 0.34) ** 2 <= 0.18**2
    img[disk] = 215.0

    rect = (x >= 0.58) & (x <= 0.88) & (y >= 0.12) & (y <= 0.38)
    img[rect] = 25.0

    tri = (x + y >= 1.28) & (y >= 0.55) & (x <= 0.92)
    img[tri] = 150.0

    col = int(round(0.14 * (side - 1)))
    img[:, col] = 240.0
    row = int(round(0.82 * (side - 1)))
    img[row, : side // 2] = 12.0

    return np.clip(img, 0.0, 255.0)
