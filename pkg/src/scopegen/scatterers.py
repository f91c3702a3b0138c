"""Object-plane rasterizers for synthetic scatterers.

Coordinate convention (shared with the label and analysis modules): pixel
centers sit at integer coordinates, so a (H, W) image covers the
continuous domain [-0.5, H-0.5] x [-0.5, W-0.5]. Positions are (y, x)
with y along rows.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateAxis, NonPositiveSize


def _pixel_grid(shape: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
    yy = np.arange(shape[0], dtype=float)[:, None]
    xx = np.arange(shape[1], dtype=float)[None, :]
    return yy, xx


def ellipse_coverage(
    shape: tuple[int, int],
    center: tuple[float, float],
    semi_axes: tuple[float, float],
    rotation: float = 0.0,
) -> np.ndarray:
    """Anti-aliased filled ellipse, values in [0, 1].

    Coverage comes from the first-order signed distance to the boundary
    (algebraic distance over its gradient norm), which is exact for
    circles, so rotating a circle never changes the rendered pixels.
    """
    a, b = float(semi_axes[0]), float(semi_axes[1])
    if a <= 0 or b <= 0:
        raise DegenerateAxis(f"ellipse semi-axes must be positive, got {semi_axes}")
    cy, cx = center
    yy, xx = _pixel_grid(shape)
    dy = yy - cy
    dx = xx - cx
    cos_t, sin_t = np.cos(rotation), np.sin(rotation)
    u = cos_t * dx + sin_t * dy  # along the first semi-axis
    v = -sin_t * dx + cos_t * dy
    rho = np.sqrt((u / a) ** 2 + (v / b) ** 2)
    gu = u / a**2
    gv = v / b**2
    with np.errstate(invalid="ignore", divide="ignore"):
        grad = np.sqrt(gu**2 + gv**2) / np.where(rho > 0, rho, 1.0)
        signed = np.where(rho > 0, (rho - 1.0) / np.where(grad > 0, grad, 1.0), -min(a, b))
    return np.clip(0.5 - signed, 0.0, 1.0)


def disk_coverage(
    shape: tuple[int, int], center: tuple[float, float], radius: float
) -> np.ndarray:
    """Anti-aliased filled circle (exact signed-distance coverage)."""
    if radius <= 0:
        raise NonPositiveSize(f"disk radius must be positive, got {radius}")
    return ellipse_coverage(shape, center, (radius, radius), 0.0)


def gaussian_blob(
    shape: tuple[int, int],
    center: tuple[float, float],
    sigma: float,
    integral: float = 1.0,
) -> np.ndarray:
    """Isotropic Gaussian sampled at pixel centers.

    The continuous profile integrates to ``integral``; border truncation
    is deliberately not compensated, so off-image tails reduce the pixel
    sum.
    """
    if sigma <= 0:
        raise NonPositiveSize(f"blob sigma must be positive, got {sigma}")
    cy, cx = center
    yy, xx = _pixel_grid(shape)
    r_sq = (yy - cy) ** 2 + (xx - cx) ** 2
    return integral * np.exp(-r_sq / (2.0 * sigma**2)) / (2.0 * np.pi * sigma**2)


def point_splat(
    shape: tuple[int, int], center: tuple[float, float], total: float = 1.0
) -> np.ndarray:
    """Sub-pixel point source as a bilinear splat over a 2x2 neighborhood.

    Bilinear weights preserve the first moment, so the splat's centroid is
    exactly the requested position whenever all four pixels land inside
    the image.
    """
    cy, cx = float(center[0]), float(center[1])
    out = np.zeros(shape)
    y0 = int(np.floor(cy))
    x0 = int(np.floor(cx))
    fy = cy - y0
    fx = cx - x0
    for oy, wy in ((0, 1.0 - fy), (1, fy)):
        for ox, wx in ((0, 1.0 - fx), (1, fx)):
            y, x = y0 + oy, x0 + ox
            if 0 <= y < shape[0] and 0 <= x < shape[1] and wy * wx:
                out[y, x] += total * wy * wx
    return out
