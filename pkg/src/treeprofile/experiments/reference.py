"""Reference constants and limit curves, all in one place.

The scaled profile and distance profile share one mean limit curve built
from the excursion local-time mean density m(u) = 4 u exp(-2 u^2); the
width and Wiener limits are its max/first-moment constants.  Everything
here is unit-tested against independent quadrature.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "local_time_mean_density",
    "profile_mean_reference",
    "width_mean_constant",
    "wiener_mean_constant",
    "fourier_shape_l",
    "fourier_shape_lambda",
    "gamma_hat_sq_leading",
    "interpolation_factor",
]


def local_time_mean_density(u):
    """Mean occupation density of the normalised excursion at level u."""
    u = np.asarray(u, dtype=float)
    return 4.0 * u * np.exp(-2.0 * u * u)


def profile_mean_reference(x, sigma: float):
    """Limit of E[n^{-1/2} L_n(x sqrt n)] and E[n^{-3/2} Lambda_n(x sqrt n)]:
    (sigma/2) m(sigma x / 2)."""
    x = np.asarray(x, dtype=float)
    return 0.5 * sigma * local_time_mean_density(0.5 * sigma * x)


def width_mean_constant(sigma: float) -> float:
    """Limit of n^{-1/2} E[width] = sigma sqrt(pi/2)."""
    return sigma * math.sqrt(math.pi / 2.0)


def wiener_mean_constant(sigma: float) -> float:
    """Limit of n^{-5/2} E[Wiener index] = (1/sigma) * (1/2) sqrt(pi/2),
    the first moment of the local-time mean density divided by sigma."""
    return 0.5 * math.sqrt(math.pi / 2.0) / sigma


def fourier_shape_l(xi):
    """Bound shape for E|L-hat_n(xi n^{-1/2})|^2 / n^2."""
    xi = np.asarray(xi, dtype=float)
    return np.minimum(1.0, xi ** -2.0, where=xi > 0, out=np.ones_like(xi))


def fourier_shape_lambda(xi):
    """Bound shape for E|Lambda-hat_n(xi n^{-1/2})|^2 / n^4."""
    xi = np.asarray(xi, dtype=float)
    return np.minimum(1.0, xi ** -4.0, where=xi > 0, out=np.ones_like(xi))


def gamma_hat_sq_leading(xi_cont):
    """Leading term 48 xi^-4 of E|Gamma-hat(xi)|^2 for the limit distance
    profile (error O(xi^-6))."""
    xi_cont = np.asarray(xi_cont, dtype=float)
    return 48.0 * xi_cont ** -4.0


def interpolation_factor(theta):
    """Fourier transform of the triangular kernel: sin^2(t/2)/(t/2)^2."""
    theta = np.asarray(theta, dtype=float)
    half = theta / 2.0
    out = np.ones_like(half)
    nz = half != 0
    out[nz] = (np.sin(half[nz]) / half[nz]) ** 2
    return out
