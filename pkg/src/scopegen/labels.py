"""Ground-truth targets computed from resolved scatterer parameters.

All functions take explicit positions (pixel units laterally, see
``scatterers`` for the coordinate convention) so they can be driven either
by the pipeline's property records or directly in tests.
"""

from __future__ import annotations

import warnings

import numpy as np

from .errors import EmptyRange, NonPositiveSize, OutOfRangeZWarning


def disk_mask(
    shape: tuple[int, int],
    centers: list[tuple[float, float]],
    radius: float,
) -> np.ndarray:
    """Binary union of disks: pixel centers within ``radius`` of any center."""
    if radius <= 0:
        raise NonPositiveSize(f"mask radius must be positive, got {radius}")
    yy = np.arange(shape[0], dtype=float)[:, None]
    xx = np.arange(shape[1], dtype=float)[None, :]
    mask = np.zeros(shape, dtype=bool)
    r_sq = radius * radius
    for cy, cx in centers:
        mask |= (yy - cy) ** 2 + (xx - cx) ** 2 <= r_sq
    return mask


def sphere_volume(
    shape: tuple[int, int, int],
    centers: list[tuple[float, float, float]],
    radius_vox: float,
    z_range: tuple[float, float],
) -> np.ndarray:
    """Binary 3-D volume of spheres; centers are (y_px, x_px, z_physical).

    The physical axial interval [z_min, z_max] maps linearly onto slice
    indices 0..depth-1; each center lands on the nearest slice. Centers
    whose z falls outside the interval are clamped to the boundary slice
    with a warning.
    """
    depth, height, width = shape
    z_min, z_max = float(z_range[0]), float(z_range[1])
    if not z_max > z_min:
        raise EmptyRange(f"axial range must have z_max > z_min, got {z_range}")
    if radius_vox <= 0:
        raise NonPositiveSize(f"sphere radius must be positive, got {radius_vox}")

    dd = np.arange(depth, dtype=float)[:, None, None]
    yy = np.arange(height, dtype=float)[None, :, None]
    xx = np.arange(width, dtype=float)[None, None, :]
    volume = np.zeros(shape, dtype=bool)
    r_sq = radius_vox * radius_vox
    for cy, cx, cz in centers:
        frac = (cz - z_min) / (z_max - z_min)
        if frac < 0.0 or frac > 1.0:
            warnings.warn(
                f"axial position {cz} outside range [{z_min}, {z_max}]; clamped",
                OutOfRangeZWarning,
                stacklevel=2,
            )
            frac = min(max(frac, 0.0), 1.0)
        slice_index = float(np.round(frac * (depth - 1)))
        volume |= (dd - slice_index) ** 2 + (yy - cy) ** 2 + (xx - cx) ** 2 <= r_sq
    return volume


def gaussian_density(
    shape: tuple[int, int],
    centers: list[tuple[float, float]],
    sigma: float,
) -> np.ndarray:
    """Sum of unit-integral Gaussians, one per center, at pixel centers.

    No border renormalization: the pixel sum equals the count only up to
    the mass each Gaussian leaves outside the image, which is the property
    count-by-integration relies on.
    """
    if sigma <= 0:
        raise NonPositiveSize(f"density sigma must be positive, got {sigma}")
    yy = np.arange(shape[0], dtype=float)[:, None]
    xx = np.arange(shape[1], dtype=float)[None, :]
    density = np.zeros(shape)
    norm = 1.0 / (2.0 * np.pi * sigma**2)
    inv = 1.0 / (2.0 * sigma**2)
    for cy, cx in centers:
        density += norm * np.exp(-((yy - cy) ** 2 + (xx - cx) ** 2) * inv)
    return density


def semantic_mask(
    shape: tuple[int, int],
    coverages: list[np.ndarray],
    class_indices: list[int],
    threshold: float = 0.5,
) -> np.ndarray:
    """Integer class map from per-scatterer coverage images.

    Background is 0; later scatterers overwrite earlier ones where their
    coverage clears the threshold.
    """
    if len(coverages) != len(class_indices):
        raise NonPositiveSize(
            f"{len(coverages)} coverages but {len(class_indices)} class indices"
        )
    out = np.zeros(shape, dtype=np.int32)
    for coverage, index in zip(coverages, class_indices):
        out[coverage >= threshold] = int(index)
    return out


def centroid_3d(volume: np.ndarray) -> tuple[float, float, float]:
    """Intensity centroid of a volume in (z, y, x) voxel coordinates."""
    total = volume.sum()
    if total == 0:
        raise EmptyRange("cannot take the centroid of an empty volume")
    grids = np.indices(volume.shape, dtype=float)
    return tuple(float((g * volume).sum() / total) for g in grids)
