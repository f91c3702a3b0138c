"""Camera and shot noise models."""

from __future__ import annotations

import numpy as np

from .errors import NegativeInput, ValidationError


def add_offset(image: np.ndarray, value: float) -> np.ndarray:
    return np.asarray(image, dtype=float) + float(value)


def gaussian_noise(
    image: np.ndarray, sigma: float, rng: np.random.Generator
) -> np.ndarray:
    """Additive white Gaussian noise with standard deviation sigma."""
    if sigma < 0:
        raise NegativeInput(f"noise sigma must be >= 0, got {sigma}")
    image = np.asarray(image, dtype=float)
    if sigma == 0:
        return image.copy()
    return image + rng.normal(0.0, sigma, size=image.shape)


def poisson_scale_from_snr(
    snr: float, peak: float, background: float | None = None
) -> float:
    """Photon-per-unit-intensity scale that realizes a target shot SNR.

    SNR is defined as (peak - background) / sqrt(background) in photon
    units when a positive background exists; without one it degrades to
    peak / sqrt(peak) = sqrt(photons at the peak).
    """
    if snr <= 0:
        raise NegativeInput(f"snr must be positive, got {snr}")
    if background is not None and background > 0:
        signal = peak - background
        if signal <= 0:
            raise ValidationError(
                f"peak {peak} must exceed background {background} for an snr target"
            )
        return snr**2 * background / signal**2
    if peak <= 0:
        raise ValidationError(f"peak must be positive for an snr target, got {peak}")
    return snr**2 / peak


def poisson_noise(
    image: np.ndarray,
    rng: np.random.Generator,
    snr: float | None = None,
    background: float | None = None,
    scale: float | None = None,
) -> np.ndarray:
    """Shot noise: scale to photons, draw Poisson, scale back.

    Exactly one of ``snr`` or ``scale`` selects the photon budget. With
    ``scale`` the image values are multiplied by that many photons per
    intensity unit directly; with ``snr`` the scale is derived from the
    image peak (and ``background`` when given).
    """
    image = np.asarray(image, dtype=float)
    if (snr is None) == (scale is None):
        raise ValidationError("pass exactly one of snr or scale")
    if np.any(image < 0):
        raise NegativeInput("shot noise requires non-negative intensities")
    if scale is None:
        peak = float(image.max())
        scale = poisson_scale_from_snr(snr, peak, background)
    if scale <= 0:
        raise NegativeInput(f"photon scale must be positive, got {scale}")
    return rng.poisson(image * scale).astype(float) / scale
