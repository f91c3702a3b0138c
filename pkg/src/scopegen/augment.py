"""Geometric augmentations with exact companion maps for point labels.

Every image warp here has a forward position map so that scatterer
coordinates recorded before augmentation can be carried through to the
augmented frame.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .errors import NonPositiveSize, SingularTransform, ValidationError

_AXES = {"x": 1, "y": 0}


def mirror_image(image: np.ndarray, axis: str) -> np.ndarray:
    if axis not in _AXES:
        raise ValidationError(f"mirror axis must be 'x' or 'y', got {axis!r}")
    return np.flip(image, axis=_AXES[axis]).copy()


def mirror_positions(
    positions: np.ndarray, axis: str, shape: tuple[int, int]
) -> np.ndarray:
    """Forward map of (y, x) points under the image mirror."""
    positions = np.atleast_2d(np.asarray(positions, dtype=float)).copy()
    if axis == "x":
        positions[:, 1] = (shape[1] - 1) - positions[:, 1]
    elif axis == "y":
        positions[:, 0] = (shape[0] - 1) - positions[:, 0]
    else:
        raise ValidationError(f"mirror axis must be 'x' or 'y', got {axis!r}")
    return positions


def _affine_matrix(rotation: float, shear: float, scale: float) -> np.ndarray:
    """Forward linear map in (y, x) order: rotate after shearing after scaling."""
    if scale <= 0:
        raise NonPositiveSize(f"scale must be positive, got {scale}")
    cos_t, sin_t = np.cos(rotation), np.sin(rotation)
    rot_xy = np.array([[cos_t, -sin_t], [sin_t, cos_t]])
    shear_xy = np.array([[1.0, shear], [0.0, 1.0]])
    a_xy = rot_xy @ shear_xy * scale
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    return swap @ a_xy @ swap


def affine_image(
    image: np.ndarray,
    rotation: float = 0.0,
    shear: float = 0.0,
    scale: float = 1.0,
    shift_y: float = 0.0,
    shift_x: float = 0.0,
    order: int = 1,
) -> np.ndarray:
    """Warp about the image center; background extends edge values."""
    image = np.asarray(image, dtype=float)
    a = _affine_matrix(rotation, shear, scale)
    det = np.linalg.det(a)
    if abs(det) < 1e-12:
        raise SingularTransform(f"affine map is singular (det {det:.3g})")
    inv = np.linalg.inv(a)
    center = (np.asarray(image.shape, dtype=float) - 1.0) / 2.0
    shift = np.array([shift_y, shift_x])
    offset = center - inv @ (center + shift)
    return ndimage.affine_transform(
        image, inv, offset=offset, order=order, mode="nearest"
    )


def affine_positions(
    positions: np.ndarray,
    shape: tuple[int, int],
    rotation: float = 0.0,
    shear: float = 0.0,
    scale: float = 1.0,
    shift_y: float = 0.0,
    shift_x: float = 0.0,
) -> np.ndarray:
    """Forward map of (y, x) points matching ``affine_image``."""
    positions = np.atleast_2d(np.asarray(positions, dtype=float))
    a = _affine_matrix(rotation, shear, scale)
    center = (np.asarray(shape, dtype=float) - 1.0) / 2.0
    shift = np.array([shift_y, shift_x])
    return (positions - center) @ a.T + center + shift


def elastic_displacement(
    shape: tuple[int, int],
    alpha: float,
    sigma: float,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Smooth random displacement fields (dy, dx) in pixels.

    White uniform(-1, 1) fields blurred with a Gaussian of width sigma and
    scaled by alpha, the standard recipe for elastic handwriting-style
    distortion.
    """
    if alpha < 0:
        raise NonPositiveSize(f"alpha must be >= 0, got {alpha}")
    if sigma <= 0:
        raise NonPositiveSize(f"sigma must be positive, got {sigma}")
    dy = ndimage.gaussian_filter(rng.uniform(-1.0, 1.0, shape), sigma) * alpha
    dx = ndimage.gaussian_filter(rng.uniform(-1.0, 1.0, shape), sigma) * alpha
    return dy, dx


def elastic_image(
    image: np.ndarray, dy: np.ndarray, dx: np.ndarray, order: int = 1
) -> np.ndarray:
    """Sample the input at (grid + displacement), bilinear by default."""
    image = np.asarray(image, dtype=float)
    yy, xx = np.meshgrid(
        np.arange(image.shape[0], dtype=float),
        np.arange(image.shape[1], dtype=float),
        indexing="ij",
    )
    coords = np.stack([yy + dy, xx + dx])
    return ndimage.map_coordinates(image, coords, order=order, mode="nearest")


def _sample_field(field: np.ndarray, points: np.ndarray) -> np.ndarray:
    return ndimage.map_coordinates(field, points.T, order=1, mode="nearest")


def elastic_positions(
    positions: np.ndarray,
    dy: np.ndarray,
    dx: np.ndarray,
    iterations: int = 3,
) -> np.ndarray:
    """Forward map of points under the elastic warp.

    The image warp pulls from input position q + d(q); a feature at input
    p therefore lands at the q solving q + d(q) = p, found by fixed-point
    iteration (the fields are smooth and much smaller than their
    wavelength, so this contracts fast).
    """
    positions = np.atleast_2d(np.asarray(positions, dtype=float))
    q = positions.copy()
    for _ in range(iterations):
        disp = np.stack([_sample_field(dy, q), _sample_field(dx, q)], axis=1)
        q = positions - disp
    return q
