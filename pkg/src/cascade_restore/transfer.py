"""Grid transfer operators: injection restriction and three prolongations.

Grids are vertex-nested: coarse node ``k`` sits at fine node ``2k``
(0-based), so a fine side ``n`` restricts to ``(n + 1) // 2``. Every
operator copies coinciding nodes and preserves constants. The 2-D
prolongations are tensor products of 1-D passes.
"""

import numpy as np

from .exceptions import ShapeError
from .validation import check_image


def coarse_side(n: int) -> int:
    """Side length after one injection restriction."""
    return (n + 1) // 2


def restrict(fine):
    """Injection: keep every second pixel starting at the corner."""
    f = check_image(fine, min_side=3, square=True)
    return f[::2, ::2].copy()


def prolong_linear(coarse, fine_side: int):
    """Piecewise-linear prolongation.

    Coinciding nodes are copied; row and column midpoints average their two
    axis neighbours; cell centers average the two diagonal coarse corners
    (upper-left and lower-right). Coarse lookups past the last row or
    column, possible only for even fine sides, clamp to the boundary.
    """
    c = check_image(coarse, square=True)
    nc = c.shape[0]
    if coarse_side(fine_side) != nc:
        raise ShapeError(f"fine side {fine_side} is incompatible with coarse side {nc}")
    lo = np.arange(1, fine_side, 2) // 2
    hi = np.minimum(lo + 1, nc - 1)
    f = np.empty((fine_side, fine_side))
    f[0::2, 0::2] = c
    f[0::2, 1::2] = 0.5 * (c[:, lo] + c[:, hi])
    f[1::2, 0::2] = 0.5 * (c[lo, :] + c[hi, :])
    f[1::2, 1::2] = 0.5 * (c[np.ix_(lo, lo)] + c[np.ix_(hi, hi)])
    return f


def _quadratic_pass(c):
    # 1-D quadratic fill along the last axis: odd length m -> 2m - 1.
    # Nodes group into non-overlapping triplets with stride 2; each midpoint
    # takes 3/8, 3/4, -1/8 of its triplet (exact on quadratics).
    m = c.shape[-1]
    out = np.empty(c.shape[:-1] + (2 * m - 1,), dtype=np.float64)
    out[..., 0::2] = c
    left = c[..., 0:-2:2]
    mid = c[..., 1:-1:2]
    right = c[..., 2::2]
    out[..., 1::4] = 0.375 * left + 0.75 * mid - 0.125 * right
    out[..., 3::4] = -0.125 * left + 0.75 * mid + 0.375 * right
    return out


def prolong_quadratic(coarse, fine_side: int):
    """Quadratic-stencil prolongation (row pass then column pass).

    Requires an odd coarse side of at least 3 so nodes pair into cells;
    the fine side is ``2 * coarse_side - 1``.
    """
    c = check_image(coarse, min_side=3, square=True)
    nc = c.shape[0]
    if nc % 2 == 0:
        raise ShapeError(f"quadratic prolongation needs an odd coarse side, got {nc}")
    if fine_side != 2 * nc - 1:
        raise ShapeError(f"fine side must be {2 * nc - 1} for coarse side {nc}, got {fine_side}")
    return _quadratic_pass(_quadratic_pass(c).T).T


def _bilinear_refine(d):
    # bilinear interpolation of a node field onto the once-refined lattice
    m = d.shape[0]
    out = np.empty((2 * m - 1, 2 * m - 1), dtype=np.float64)
    out[0::2, 0::2] = d
    out[0::2, 1::2] = 0.5 * (d[:, :-1] + d[:, 1:])
    out[1::2, 0::2] = 0.5 * (d[:-1, :] + d[1:, :])
    out[1::2, 1::2] = 0.25 * (d[:-1, :-1] + d[:-1, 1:] + d[1:, :-1] + d[1:, 1:])
    return out


def richardson_extrapolate(u_prev, u_prev2):
    """Predict the next level's values at the current level's nodes.

    ``u_prev`` lives on the current lattice, ``u_prev2`` one level coarser.
    When node errors shrink 4x per level, adding a quarter of the
    bilinearly interpolated correction ``u_prev - u_prev2`` cancels the
    leading error term: at coarse nodes the result is
    ``(5 u_prev - u_prev2) / 4``.
    """
    a = check_image(u_prev, min_side=3, square=True, name="u_prev")
    b = check_image(u_prev2, square=True, name="u_prev2")
    if a.shape[0] % 2 == 0:
        raise ShapeError(f"u_prev side must be odd, got {a.shape[0]}")
    if b.shape[0] != coarse_side(a.shape[0]):
        raise ShapeError(
            f"u_prev2 side {b.shape[0]} does not nest under u_prev side {a.shape[0]}"
        )
    d = a[::2, ::2] - b
    return a + 0.25 * _bilinear_refine(d)


def prolong_extrapolated(u_prev, u_prev2):
    """Two-stage prolongation to the level above ``u_prev``.

    First extrapolate at positions coinciding with ``u_prev`` nodes
    (:func:`richardson_extrapolate`), then fill the remaining quarter
    lattice with the quadratic stencil. Output side is
    ``2 * u_prev.side - 1``.
    """
    seeded = richardson_extrapolate(u_prev, u_prev2)
    return prolong_quadratic(seeded, 2 * seeded.shape[0] - 1)
