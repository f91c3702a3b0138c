"""Fourier optics: pupils, point-spread functions, field propagation.

Conventions used throughout:

- Lengths in micrometers. Lateral positions in object-plane pixels
  (converted internally), axial positions in micrometers.
- Spatial-frequency grids follow numpy FFT layout (zero frequency at
  index 0); angular frequencies k = 2*pi*f in rad/um.
- The pupil is defined over transverse frequency k_perp with hard cutoff
  k_c = 2*pi*NA / wavelength (vacuum wavelength).
- Axial phases use the medium wavenumber k_med = 2*pi*n_medium/wavelength.
- Incoherent point-spread functions are normalized to unit sum on the
  padded plane, so convolution preserves total intensity there.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidNA, SamplingWarning, ValidationError
from .mie import scattering_amplitudes, truncation_order


@dataclass(frozen=True)
class OpticalConfig:
    """Geometry of the simulated microscope."""

    wavelength: float = 0.66
    numerical_aperture: float = 0.8
    magnification: float = 1.0
    refractive_index_medium: float = 1.33
    pixel_size: float = 0.1
    output_shape: tuple[int, int] = (128, 128)
    padding: int = 32

    def __post_init__(self):
        if self.numerical_aperture <= 0:
            raise InvalidNA(f"numerical aperture must be positive, got {self.numerical_aperture}")
        if self.numerical_aperture > self.refractive_index_medium:
            raise InvalidNA(
                f"numerical aperture {self.numerical_aperture} exceeds the medium "
                f"index {self.refractive_index_medium}"
            )
        if self.wavelength <= 0:
            raise ValidationError(f"wavelength must be positive, got {self.wavelength}")
        if self.pixel_size <= 0:
            raise ValidationError(f"pixel size must be positive, got {self.pixel_size}")
        if self.magnification <= 0:
            raise ValidationError(f"magnification must be positive, got {self.magnification}")
        if self.padding < 0:
            raise ValidationError(f"padding must be >= 0, got {self.padding}")
        shape = tuple(int(s) for s in self.output_shape)
        if len(shape) != 2 or min(shape) < 4:
            raise ValidationError(f"output shape must be 2-D and at least 4x4, got {shape}")
        object.__setattr__(self, "output_shape", shape)

    @property
    def object_pixel(self) -> float:
        """Sample spacing in the object plane, um per pixel."""
        return self.pixel_size / self.magnification

    @property
    def padded_shape(self) -> tuple[int, int]:
        h, w = self.output_shape
        return (h + 2 * self.padding, w + 2 * self.padding)

    @property
    def medium_wavenumber(self) -> float:
        return 2.0 * np.pi * self.refractive_index_medium / self.wavelength

    @property
    def cutoff_frequency(self) -> float:
        return 2.0 * np.pi * self.numerical_aperture / self.wavelength

    def check_sampling(self) -> None:
        """Warn when the object-plane sampling underreads the diffraction limit."""
        limit = self.wavelength / (4.0 * self.numerical_aperture)
        if self.object_pixel > limit:
            warnings.warn(
                f"object-plane sampling {self.object_pixel:.4g} um exceeds "
                f"wavelength / (4 NA) = {limit:.4g} um; fine structure will alias",
                SamplingWarning,
                stacklevel=2,
            )


@lru_cache(maxsize=64)
def _cached_grid(shape: tuple[int, int], dx: float):
    ky = 2.0 * np.pi * np.fft.fftfreq(shape[0], d=dx)
    kx = 2.0 * np.pi * np.fft.fftfreq(shape[1], d=dx)
    return np.meshgrid(ky, kx, indexing="ij")


def frequency_grid(shape: tuple[int, int], dx: float) -> tuple[np.ndarray, np.ndarray]:
    """(ky, kx) angular-frequency meshes in FFT layout, rad/um."""
    ky, kx = _cached_grid(tuple(shape), float(dx))
    return ky, kx


def pupil_mask(cfg: OpticalConfig, shape: tuple[int, int] | None = None) -> np.ndarray:
    """Binary aperture over transverse frequency, 1 inside the NA cone."""
    shape = shape or cfg.padded_shape
    ky, kx = frequency_grid(shape, cfg.object_pixel)
    return (kx**2 + ky**2 <= cfg.cutoff_frequency**2).astype(float)


def coma_phase(
    cfg: OpticalConfig,
    shape: tuple[int, int] | None = None,
    coma_x: float = 0.0,
    coma_y: float = 0.0,
) -> np.ndarray:
    """Third-order coma wavefront, radians, on the normalized pupil radius.

    Horizontal coma is sqrt(8) (3 rho^3 - 2 rho) cos(phi), vertical the
    same with sin(phi); the coefficients scale these unit-variance modes.
    """
    shape = shape or cfg.padded_shape
    ky, kx = frequency_grid(shape, cfg.object_pixel)
    k_c = cfg.cutoff_frequency
    rho = np.sqrt(kx**2 + ky**2) / k_c
    radial = np.sqrt(8.0) * (3.0 * rho**3 - 2.0 * rho)
    phase = np.zeros(shape)
    if coma_x:
        with np.errstate(invalid="ignore", divide="ignore"):
            cos_phi = np.where(rho > 0, kx / (rho * k_c), 0.0)
        phase = phase + coma_x * radial * cos_phi
    if coma_y:
        with np.errstate(invalid="ignore", divide="ignore"):
            sin_phi = np.where(rho > 0, ky / (rho * k_c), 0.0)
        phase = phase + coma_y * radial * sin_phi
    return phase


def axial_wavenumber(cfg: OpticalConfig, shape: tuple[int, int] | None = None) -> np.ndarray:
    """kz = sqrt(k_med^2 - k_perp^2), complex where evanescent."""
    shape = shape or cfg.padded_shape
    ky, kx = frequency_grid(shape, cfg.object_pixel)
    arg = cfg.medium_wavenumber**2 - kx**2 - ky**2
    return np.sqrt(arg.astype(complex))


def propagation_kernel(
    cfg: OpticalConfig, z: float, shape: tuple[int, int] | None = None
) -> np.ndarray:
    """Angular-spectrum transfer function for axial distance z.

    Propagating components get the exact phase exp(i kz z); evanescent
    components decay as exp(-|Im kz| |z|) for either sign of z, so the
    kernel never amplifies.
    """
    kz = axial_wavenumber(cfg, shape)
    return np.exp(1j * kz.real * z - np.abs(kz.imag) * abs(z))


def propagate(field: np.ndarray, cfg: OpticalConfig, z: float) -> np.ndarray:
    """Propagate a complex field by z along the optical axis."""
    field = np.asarray(field, dtype=complex)
    kernel = propagation_kernel(cfg, z, field.shape)
    return np.fft.ifft2(np.fft.fft2(field) * kernel)


def defocus_phase(
    cfg: OpticalConfig, z: float, shape: tuple[int, int] | None = None
) -> np.ndarray:
    """Carrier-free defocus kernel exp(i (kz - k_med) z), with decay rule.

    Subtracting the on-axis carrier keeps the focal-plane phase reference
    fixed while the envelope defocuses.
    """
    kz = axial_wavenumber(cfg, shape)
    return np.exp(1j * (kz.real - cfg.medium_wavenumber) * z - np.abs(kz.imag) * abs(z))


def position_ramp(
    cfg: OpticalConfig,
    y_px: float,
    x_px: float,
    shape: tuple[int, int] | None = None,
) -> np.ndarray:
    """Fourier phase ramp placing a feature at fractional pixel (y, x).

    Coordinates are measured on the padded grid, where index (0, 0) is the
    origin; callers offset output-plane coordinates by the padding.
    """
    shape = shape or cfg.padded_shape
    dx = cfg.object_pixel
    ky, kx = frequency_grid(shape, dx)
    return np.exp(-1j * (kx * x_px * dx + ky * y_px * dx))


def pupil_function(
    cfg: OpticalConfig,
    shape: tuple[int, int] | None = None,
    coma_x: float = 0.0,
    coma_y: float = 0.0,
    z: float = 0.0,
) -> np.ndarray:
    """Complex pupil: hard NA cutoff, coma phase, optional defocus."""
    shape = shape or cfg.padded_shape
    p = pupil_mask(cfg, shape).astype(complex)
    if coma_x or coma_y:
        p = p * np.exp(1j * coma_phase(cfg, shape, coma_x, coma_y))
    if z:
        p = p * defocus_phase(cfg, z, shape)
    return p


def incoherent_psf(
    cfg: OpticalConfig,
    shape: tuple[int, int] | None = None,
    coma_x: float = 0.0,
    coma_y: float = 0.0,
    z: float = 0.0,
) -> np.ndarray:
    """Intensity point-spread function in FFT layout, unit sum."""
    p = pupil_function(cfg, shape, coma_x=coma_x, coma_y=coma_y, z=z)
    amplitude = np.fft.ifft2(p)
    psf = np.abs(amplitude) ** 2
    total = psf.sum()
    if total == 0:
        raise ValidationError("empty pupil: no frequencies pass the aperture")
    return psf / total


def convolve_incoherent(
    image: np.ndarray,
    cfg: OpticalConfig,
    coma_x: float = 0.0,
    coma_y: float = 0.0,
    z: float = 0.0,
) -> np.ndarray:
    """Blur an object-plane intensity image with the incoherent PSF.

    The image is edge-padded to the padded plane, circularly convolved
    there, and cropped back; with zero padding the circular convolution
    conserves the total intensity exactly.
    """
    image = np.asarray(image, dtype=float)
    if image.shape != cfg.output_shape:
        raise ValidationError(
            f"image shape {image.shape} does not match configured {cfg.output_shape}"
        )
    pad = cfg.padding
    padded = np.pad(image, pad, mode="edge") if pad else image
    psf = incoherent_psf(cfg, padded.shape, coma_x=coma_x, coma_y=coma_y, z=z)
    blurred = np.fft.ifft2(np.fft.fft2(padded) * np.fft.fft2(psf)).real
    if pad:
        h, w = cfg.output_shape
        blurred = blurred[pad : pad + h, pad : pad + w]
    return blurred


def mie_scattered_spectrum(
    cfg: OpticalConfig,
    y_px: float,
    x_px: float,
    z_um: float,
    radius_um: float,
    refractive_index: float,
    shape: tuple[int, int] | None = None,
) -> np.ndarray:
    """Angular spectrum of one sphere's scattered field at the focal plane.

    Evaluates the far-field amplitudes on every passed frequency, converts
    them to plane-wave coefficients of the diverging spherical wave, and
    applies lateral and axial placement. Positions are padded-grid pixels
    laterally and micrometers axially (positive z toward the source, so
    the wave travels +z to reach the focal plane).
    """
    shape = shape or cfg.padded_shape
    if radius_um <= 0:
        raise ValidationError(f"radius must be positive, got {radius_um}")
    n_med = cfg.refractive_index_medium
    k = cfg.medium_wavenumber
    size_parameter = k * radius_um
    m_rel = refractive_index / n_med

    ky, kx = frequency_grid(shape, cfg.object_pixel)
    k_perp_sq = kx**2 + ky**2
    mask = k_perp_sq <= cfg.cutoff_frequency**2
    kz = np.sqrt(np.maximum(k**2 - k_perp_sq[mask], 0.0))
    cos_theta = np.clip(kz / k, -1.0, 1.0)

    s1, s2 = scattering_amplitudes(size_parameter, m_rel, cos_theta)
    s_scalar = 0.5 * (s1 + s2)

    dx = cfg.object_pixel
    coeff = -2j * np.pi * s_scalar / (k * np.where(kz > 0, kz, np.inf)) / dx**2

    spectrum = np.zeros(shape, dtype=complex)
    spectrum[mask] = coeff
    spectrum *= position_ramp(cfg, y_px, x_px, shape)
    if z_um:
        spectrum *= defocus_phase(cfg, z_um, shape)
    return spectrum


def coherent_image_field(
    cfg: OpticalConfig,
    spectra: list[np.ndarray],
    coma_x: float = 0.0,
    coma_y: float = 0.0,
    z: float = 0.0,
    reference_amplitude: float = 1.0,
) -> np.ndarray:
    """Total field at the camera: unit reference plus filtered scattering.

    Sums the scattered spectra, applies the (possibly aberrated, possibly
    defocused) pupil, returns the cropped complex field including the
    reference wave.
    """
    shape = cfg.padded_shape
    total = np.zeros(shape, dtype=complex)
    for spectrum in spectra:
        if spectrum.shape != shape:
            raise ValidationError(
                f"scattered spectrum shape {spectrum.shape} does not match "
                f"padded plane {shape}"
            )
        total += spectrum
    p = pupil_function(cfg, shape, coma_x=coma_x, coma_y=coma_y, z=z)
    scattered = np.fft.ifft2(total * p)
    field = reference_amplitude + scattered
    pad = cfg.padding
    if pad:
        h, w = cfg.output_shape
        field = field[pad : pad + h, pad : pad + w]
    return field


def mirror_even(image: np.ndarray, axis: int) -> np.ndarray:
    """Mirror an FFT-layout image about the origin along one axis.

    On an even grid the frequency map k -> -k is index i -> (N - i) mod N,
    which is a flip followed by a one-step roll.
    """
    return np.roll(np.flip(image, axis=axis), 1, axis=axis)


def truncation_note(cfg: OpticalConfig, radius_um: float) -> int:
    """Partial-wave count used for a sphere of this radius (diagnostics)."""
    return truncation_order(cfg.medium_wavenumber * radius_um)
