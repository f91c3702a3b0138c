"""Independent reference implementations for cross-checking.

Everything here deliberately takes a different route than the package:
scipy special functions instead of recurrences, naive per-pixel loops
instead of vectorized closed forms, supersampling instead of analytic
coverage. A package bug and an oracle bug would have to coincide for a
comparison to pass wrongly.
"""

from __future__ import annotations

import numpy as np
from scipy.special import assoc_legendre_p_all, spherical_jn, spherical_yn


def mie_coefficients_reference(x: float, m: float, n_max: int):
    """(a_n, b_n) straight from the textbook Bessel-function ratios.

    psi_n(z) = z j_n(z), xi_n(z) = z (j_n(z) + i y_n(z)); derivatives via
    d/dz [z f_n(z)] = z f_{n-1}(z) - n f_n(z).
    """
    n = np.arange(1, n_max + 1)
    mx = m * x

    def psi(z, order):
        return z * spherical_jn(order, z)

    def psi_d(z, order):
        return z * spherical_jn(order - 1, z) - order * spherical_jn(order, z)

    def xi(z, order):
        return z * (spherical_jn(order, z) + 1j * spherical_yn(order, z))

    def xi_d(z, order):
        h_prev = spherical_jn(order - 1, z) + 1j * spherical_yn(order - 1, z)
        h_cur = spherical_jn(order, z) + 1j * spherical_yn(order, z)
        return z * h_prev - order * h_cur

    psi_x, psi_dx = psi(x, n), psi_d(x, n)
    psi_mx, psi_dmx = psi(mx, n), psi_d(mx, n)
    xi_x, xi_dx = xi(x, n), xi_d(x, n)

    a = (m * psi_mx * psi_dx - psi_x * psi_dmx) / (m * psi_mx * xi_dx - xi_x * psi_dmx)
    b = (psi_mx * psi_dx - m * psi_x * psi_dmx) / (psi_mx * xi_dx - m * xi_x * psi_dmx)
    return a, b


def efficiencies_reference(x: float, m: float, n_max: int):
    a, b = mie_coefficients_reference(x, m, n_max)
    n = np.arange(1, n_max + 1)
    w = 2 * n + 1
    q_sca = (2.0 / x**2) * np.sum(w * (np.abs(a) ** 2 + np.abs(b) ** 2))
    q_ext = (2.0 / x**2) * np.sum(w * np.real(a + b))
    return float(q_sca), float(q_ext)


def angular_functions_reference(mu: float, n_max: int):
    """pi_n, tau_n from associated Legendre functions (scipy lpmn).

    pi_n = P_n^1(mu) / sin(theta); tau_n = dP_n^1/dtheta
         = -sin(theta) * d/dmu [P_n^1(mu)].
    At |mu| = 1 the limits are pi_n = n(n+1)/2 * mu^(n+1)-pattern; callers
    avoid the poles by testing interior angles.
    """
    theta_sin = np.sqrt(max(0.0, 1.0 - mu * mu))
    values = np.asarray(assoc_legendre_p_all(n_max, 1, mu, diff_n=1))
    p = values[0, 1:, 1]  # P_n^1(mu) with the Condon-Shortley (-1)^m phase
    dp = values[1, 1:, 1]  # d/dmu of the same
    # The scattering-theory pi/tau use P_n^1 without that phase, hence the
    # sign flips relative to the raw table.
    pi_n = -p / theta_sin
    tau_n = theta_sin * dp
    return pi_n, tau_n


def scattering_amplitudes_reference(x: float, m: float, mu: float, n_max: int):
    a, b = mie_coefficients_reference(x, m, n_max)
    pi_n, tau_n = angular_functions_reference(mu, n_max)
    n = np.arange(1, n_max + 1)
    w = (2 * n + 1) / (n * (n + 1))
    s1 = np.sum(w * (a * pi_n + b * tau_n))
    s2 = np.sum(w * (a * tau_n + b * pi_n))
    return complex(s1), complex(s2)


def rayleigh_qsca(x: float, m: complex) -> float:
    """Small-particle limit of the scattering efficiency."""
    polarizability = (m**2 - 1) / (m**2 + 2)
    return float(8.0 / 3.0 * x**4 * abs(polarizability) ** 2)


def ellipse_coverage_brute(shape, center, semi_axes, rotation, subdiv=64):
    """Pixel coverage by counting subpixel samples inside the ellipse."""
    cy, cx = center
    a, b = semi_axes
    cos_t, sin_t = np.cos(rotation), np.sin(rotation)
    out = np.zeros(shape)
    offsets = (np.arange(subdiv) + 0.5) / subdiv - 0.5
    for iy in range(shape[0]):
        for ix in range(shape[1]):
            ys = iy + offsets[:, None] - cy
            xs = ix + offsets[None, :] - cx
            u = cos_t * xs + sin_t * ys
            v = -sin_t * xs + cos_t * ys
            inside = (u / a) ** 2 + (v / b) ** 2 <= 1.0
            out[iy, ix] = inside.mean()
    return out


def disk_mask_brute(shape, centers, radius):
    """Naive per-pixel membership test, scalar loops only."""
    out = np.zeros(shape, dtype=bool)
    for iy in range(shape[0]):
        for ix in range(shape[1]):
            for cy, cx in centers:
                if (iy - cy) ** 2 + (ix - cx) ** 2 <= radius * radius:
                    out[iy, ix] = True
                    break
    return out


def sphere_volume_brute(shape, centers, radius, z_range):
    """Naive per-voxel membership test with the same slice mapping."""
    depth = shape[0]
    z_min, z_max = z_range
    out = np.zeros(shape, dtype=bool)
    slice_centers = []
    for cy, cx, cz in centers:
        frac = (cz - z_min) / (z_max - z_min)
        frac = min(max(frac, 0.0), 1.0)
        slice_centers.append((round(frac * (depth - 1)), cy, cx))
    for iz in range(shape[0]):
        for iy in range(shape[1]):
            for ix in range(shape[2]):
                for sz, cy, cx in slice_centers:
                    if (iz - sz) ** 2 + (iy - cy) ** 2 + (ix - cx) ** 2 <= radius**2:
                        out[iz, iy, ix] = True
                        break
    return out


def gaussian_quadrant_mass() -> float:
    """Mass of a 2-D Gaussian over one quadrant whose corner is the mean."""
    return 0.25
