"""Spherical-particle light scattering coefficients and amplitudes.

Implements the classic partial-wave expansion for a homogeneous sphere of
relative refractive index m and size parameter x = 2*pi*radius/wavelength.
The internal logarithmic derivative uses downward recurrence (stable for
all x, complex m allowed); the Riccati-Bessel functions of the outside
medium use upward recurrence (stable for real argument).
"""

from __future__ import annotations

import numpy as np

from .errors import NegativeInput


def truncation_order(x: float) -> int:
    """Series length after which partial waves stop contributing."""
    if x <= 0:
        raise NegativeInput(f"size parameter must be positive, got {x}")
    return int(np.ceil(x + 4.0 * x ** (1.0 / 3.0) + 2.0))


def log_derivative(mx: complex, n_max: int, extra: int = 15) -> np.ndarray:
    """D_n(mx) for n = 0..n_max by downward recurrence.

    Started extra orders above n_max with D = 0; the recursion contracts
    onto the true values as it descends.
    """
    n_start = n_max + extra
    d = np.zeros(n_start + 1, dtype=complex)
    for n in range(n_start, 0, -1):
        d[n - 1] = n / mx - 1.0 / (d[n] + n / mx)
    return d[: n_max + 1]


def riccati_bessel(x: float, n_max: int) -> tuple[np.ndarray, np.ndarray]:
    """(psi_n, chi_n) for n = -1..n_max by upward recurrence.

    Returned arrays are indexed so that index n+1 holds order n.
    """
    psi = np.zeros(n_max + 2)
    chi = np.zeros(n_max + 2)
    psi[0] = np.cos(x)  # order -1
    psi[1] = np.sin(x)  # order 0
    chi[0] = -np.sin(x)
    chi[1] = np.cos(x)
    for n in range(1, n_max + 1):
        psi[n + 1] = (2 * n - 1) / x * psi[n] - psi[n - 1]
        chi[n + 1] = (2 * n - 1) / x * chi[n] - chi[n - 1]
    return psi, chi


def mie_coefficients(
    x: float, m: complex, n_max: int | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Partial-wave coefficients (a_n, b_n) for n = 1..n_max."""
    if n_max is None:
        n_max = truncation_order(x)
    d = log_derivative(m * x, n_max)
    psi, chi = riccati_bessel(x, n_max)
    xi = psi - 1j * chi

    n = np.arange(1, n_max + 1)
    dn = d[1:]
    psi_n, psi_prev = psi[2:], psi[1:-1]
    xi_n, xi_prev = xi[2:], xi[1:-1]

    fa = dn / m + n / x
    fb = dn * m + n / x
    a = (fa * psi_n - psi_prev) / (fa * xi_n - xi_prev)
    b = (fb * psi_n - psi_prev) / (fb * xi_n - xi_prev)
    return a, b


def efficiencies(x: float, m: complex) -> tuple[float, float]:
    """(Q_sca, Q_ext): scattering and extinction cross sections over pi*r^2."""
    a, b = mie_coefficients(x, m)
    n = np.arange(1, a.size + 1)
    weight = 2 * n + 1
    q_sca = (2.0 / x**2) * float(np.sum(weight * (np.abs(a) ** 2 + np.abs(b) ** 2)))
    q_ext = (2.0 / x**2) * float(np.sum(weight * np.real(a + b)))
    return q_sca, q_ext


def angular_functions(cos_theta: np.ndarray, n_max: int) -> tuple[np.ndarray, np.ndarray]:
    """pi_n and tau_n for n = 1..n_max at each angle, shape (n_max, len(mu))."""
    mu = np.atleast_1d(np.asarray(cos_theta, dtype=float))
    pi = np.zeros((n_max + 1, mu.size))
    tau = np.zeros((n_max + 1, mu.size))
    if n_max >= 1:
        pi[1] = 1.0
        tau[1] = mu
    for n in range(2, n_max + 1):
        pi[n] = ((2 * n - 1) * mu * pi[n - 1] - n * pi[n - 2]) / (n - 1)
        tau[n] = n * mu * pi[n] - (n + 1) * pi[n - 1]
    return pi[1:], tau[1:]


def scattering_amplitudes(
    x: float, m: complex, cos_theta: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Complex far-field amplitudes (S1, S2) at the given angles.

    S1 multiplies the polarization perpendicular to the scattering plane,
    S2 the parallel one. For unpolarized scalar work use (S1 + S2) / 2.
    """
    a, b = mie_coefficients(x, m)
    n_max = a.size
    pi_n, tau_n = angular_functions(cos_theta, n_max)
    n = np.arange(1, n_max + 1)[:, None]
    weight = (2 * n + 1) / (n * (n + 1))
    s1 = np.sum(weight * (a[:, None] * pi_n + b[:, None] * tau_n), axis=0)
    s2 = np.sum(weight * (a[:, None] * tau_n + b[:, None] * pi_n), axis=0)
    scalar = np.isscalar(cos_theta) or np.asarray(cos_theta).ndim == 0
    if scalar:
        return complex(s1[0]), complex(s2[0])
    return s1, s2
