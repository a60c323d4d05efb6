"""Closed-form kernels of the hyperviscous Stokes operator.

The fluid model adds a fourth-order term to the Stokes operator, with a
screening length ``ell`` (the effective thickness of the immersed body).
The resulting free-space Green's function and Oseen tensor are smooth and
*bounded at the origin*, which is what allows one-dimensional bodies to
interact with the flow at all.  All quantities are nondimensional.

Every evaluator accepts a single 3-vector or an array of shape (..., 3)
and broadcasts over the leading axes.

The two scalar coefficient functions of the Oseen tensor ("brackets"),

    identity factor  D(s) = 1 - 2 e^{-s} - (2/s) e^{-s} + (2/s^2)(1 - e^{-s})
    dyadic factor    Y(s) = 1 + 2 e^{-s} + (6/s) e^{-s} - (6/s^2)(1 - e^{-s})

with s = |x| / ell, suffer catastrophic cancellation as s -> 0 (the 2/s^2
terms cancel down to O(s)).  Below ``series_threshold`` they are therefore
evaluated by their Taylor series, which also supplies the continuous
extension at s = 0:

    Z(0) = I / (6 pi ell)

i.e. a point force experiences exactly the Stokes drag of a sphere of
radius ell.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial, pi

import numpy as np

from .errors import InvalidArgument, SingularPointError

__all__ = [
    "HyperKernel",
    "green_scalar",
    "green_classical",
    "oseen_tensor",
    "stokeslet_velocity",
    "stokeslet_pressure",
    "classical_oseen",
    "identity_factor",
    "dyadic_factor",
]


@dataclass(frozen=True)
class HyperKernel:
    """Evaluation context for the screened kernels.

    ell              screening length (effective thickness), > 0
    series_threshold cutoff on s = |x|/ell below which Taylor branches
                     are used; both branches agree to ~1e-15 relative
                     at the cutoff
    series_terms     Taylor terms per bracket; >= 10 keeps the truncation
                     error below 1e-16 anywhere on the series branch
    """

    ell: float
    series_threshold: float = 0.1
    series_terms: int = 24

    def __post_init__(self):
        if not (np.isfinite(self.ell) and self.ell > 0.0):
            raise InvalidArgument(f"ell must be positive and finite, got {self.ell}")
        if not (0.0 < self.series_threshold <= 0.5):
            raise InvalidArgument(
                f"series_threshold must lie in (0, 0.5], got {self.series_threshold}"
            )
        if self.series_terms < 10:
            raise InvalidArgument(
                f"series_terms must be >= 10, got {self.series_terms}"
            )


def _as_points(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (3,):
        raise InvalidArgument(f"expected 3-vector(s), got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InvalidArgument("non-finite component in input point(s)")
    return x


@lru_cache(maxsize=None)
def _series_coeffs(terms: int):
    """Taylor coefficients of D(s)/s, Y(s)/s and (1 - e^{-s})/s.

    D(s)/s = sum_{m>=1} d_m s^{m-1},  d_m = 2 (-1)^{m+1} (1/m! - 1/(m+1)! + 1/(m+2)!)
    Y(s)/s = sum_{m>=1} y_m s^{m-1},  y_m = 2 (-1)^m   (1/m! - 3/(m+1)! + 3/(m+2)!)
    (1-e^{-s})/s = sum_{m>=0} (-1)^m s^m / (m+1)!

    Leading orders D ~ (4/3) s and Y ~ s^2/4 give Z(0) = I/(6 pi ell).
    """
    d = np.array(
        [
            2.0 * (-1.0) ** (m + 1)
            * (1.0 / factorial(m) - 1.0 / factorial(m + 1) + 1.0 / factorial(m + 2))
            for m in range(1, terms + 1)
        ]
    )
    y = np.array(
        [
            2.0 * (-1.0) ** m
            * (1.0 / factorial(m) - 3.0 / factorial(m + 1) + 3.0 / factorial(m + 2))
            for m in range(1, terms + 1)
        ]
    )
    e = np.array([(-1.0) ** m / factorial(m + 1) for m in range(terms + 1)])
    return d, y, e


def _horner(coeffs: np.ndarray, s: np.ndarray) -> np.ndarray:
    out = np.full_like(s, coeffs[-1])
    for c in coeffs[-2::-1]:
        out = out * s + c
    return out


def _factors_closed(s: np.ndarray):
    """Bracket factors (D, Y) for s bounded away from 0."""
    e = np.exp(-s)
    one_minus_e = -np.expm1(-s)
    inv = 1.0 / s
    ident = 1.0 - 2.0 * e - 2.0 * inv * e + 2.0 * inv * inv * one_minus_e
    dyad = 1.0 + 2.0 * e + 6.0 * inv * e - 6.0 * inv * inv * one_minus_e
    return ident, dyad


def _factors_over_s_series(s: np.ndarray, terms: int):
    """(D(s)/s, Y(s)/s) by Taylor series; exact limit at s = 0."""
    d, y, _ = _series_coeffs(terms)
    return _horner(d, s), _horner(y, s)


def _factors_over_s(s: np.ndarray, kernel: HyperKernel):
    """(D(s)/s, Y(s)/s) with automatic branch selection."""
    s = np.asarray(s, dtype=float)
    small = s < kernel.series_threshold
    dr = np.empty_like(s)
    yr = np.empty_like(s)
    if np.any(~small):
        sl = s[~small]
        ident, dyad = _factors_closed(sl)
        dr[~small] = ident / sl
        yr[~small] = dyad / sl
    if np.any(small):
        dr[small], yr[small] = _factors_over_s_series(s[small], kernel.series_terms)
    return dr, yr


def identity_factor(s, kernel: HyperKernel) -> np.ndarray:
    """Coefficient of delta_ij / (8 pi |x|) in the Oseen tensor, as a function of s."""
    s = np.asarray(s, dtype=float)
    dr, _ = _factors_over_s(s, kernel)
    return dr * s


def dyadic_factor(s, kernel: HyperKernel) -> np.ndarray:
    """Coefficient of x_i x_j / (8 pi |x|^3) in the Oseen tensor, as a function of s."""
    s = np.asarray(s, dtype=float)
    _, yr = _factors_over_s(s, kernel)
    return yr * s


def green_scalar(x, kernel: HyperKernel) -> np.ndarray:
    """Screened Green's function g(x) = (1 - exp(-|x|/ell)) / (4 pi |x|).

    Defined for every x: g -> 1/(4 pi ell) as x -> 0, and g -> 1/(4 pi |x|)
    (the Laplace fundamental solution) as ell -> 0 at fixed |x|.
    """
    x = _as_points(x)
    r = np.linalg.norm(x, axis=-1)
    s = r / kernel.ell
    small = s < kernel.series_threshold
    out = np.empty_like(s)
    if np.any(~small):
        sl = s[~small]
        out[~small] = -np.expm1(-sl) / sl
    if np.any(small):
        _, _, e = _series_coeffs(kernel.series_terms)
        out[small] = _horner(e, s[small])
    return out / (4.0 * pi * kernel.ell)


def green_classical(x) -> np.ndarray:
    """Fundamental solution 1/(4 pi |x|) of the Laplace operator; singular at 0."""
    x = _as_points(x)
    r = np.linalg.norm(x, axis=-1)
    if np.any(r == 0.0):
        raise SingularPointError("classical Green's function is singular at x = 0")
    return 1.0 / (4.0 * pi * r)


def oseen_tensor(x, kernel: HyperKernel) -> np.ndarray:
    """Screened Oseen tensor Z(x), shape (..., 3, 3).

    Z(x) = [D(s)/s * I + Y(s)/s * xhat xhat^T] / (8 pi ell),  s = |x|/ell.

    Symmetric and even in x; Z(0) = I/(6 pi ell) by continuity.
    """
    x = _as_points(x)
    r = np.linalg.norm(x, axis=-1)
    s = r / kernel.ell
    dr, yr = _factors_over_s(s, kernel)
    safe = np.where(r > 0.0, r, 1.0)
    xhat = x / safe[..., None]
    eye = np.eye(3)
    outer = xhat[..., :, None] * xhat[..., None, :]
    return (dr[..., None, None] * eye + yr[..., None, None] * outer) / (
        8.0 * pi * kernel.ell
    )


def stokeslet_velocity(x, h, kernel: HyperKernel) -> np.ndarray:
    """Velocity zeta(x) = Z(x) h induced by a point force h at the origin."""
    h = _as_points(h)
    return (oseen_tensor(x, kernel) @ h[..., None])[..., 0]


def stokeslet_pressure(x, h) -> np.ndarray:
    """Pressure p(x) = (h . x) / (4 pi |x|^3) of the point-force solution.

    Identical to the classical Stokeslet pressure (the screening term does
    not alter the pressure); harmonic and singular at the origin.
    """
    x = _as_points(x)
    h = _as_points(h)
    r = np.linalg.norm(x, axis=-1)
    if np.any(r == 0.0):
        raise SingularPointError("Stokeslet pressure is singular at x = 0")
    return np.einsum("...i,...i->...", x, np.broadcast_to(h, x.shape)) / (
        4.0 * pi * r**3
    )


def classical_oseen(x) -> np.ndarray:
    """Classical Oseen tensor (I + xhat xhat^T) / (8 pi |x|); the ell -> 0 limit."""
    x = _as_points(x)
    r = np.linalg.norm(x, axis=-1)
    if np.any(r == 0.0):
        raise SingularPointError("classical Oseen tensor is singular at x = 0")
    xhat = x / r[..., None]
    outer = xhat[..., :, None] * xhat[..., None, :]
    return (np.eye(3) + outer) / (8.0 * pi * r[..., None, None])
