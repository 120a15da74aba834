"""Faddeeva function w(z) = exp(-z**2) * erfc(-i z) for complex scalars.

Evaluation is region switched on |z| in the closed upper half-plane:

    |z| < 0.5          Maclaurin series  sum (iz)^n / Gamma(n/2 + 1)
    0.5 <= |z| < 8     Weideman rational approximation, 40 terms
    8 <= |z| < 1e3     Laplace continued fraction, 12 levels
    |z| >= 1e3         asymptotic series, 4 terms

The boundaries come from an accuracy sweep against an arbitrary precision
reference (scripts/faddeeva_regions.py); every region stays below 1e-15
relative error.  The lower half-plane is reached through the reflection
w(z) = 2 exp(-z**2) - w(-z).
"""
from __future__ import annotations

import cmath
import math

import numpy as np

__all__ = [
    "FaddeevaOverflowError",
    "faddeeva_w",
    "faddeeva_w_scaled",
    "faddeeva_w_reflection_check",
    "erfcx",
    "SERIES_RADIUS",
    "RATIONAL_RADIUS",
    "ASYMPTOTIC_RADIUS",
]

SQRT_PI = math.sqrt(math.pi)
INV_SQRT_PI = 1.0 / SQRT_PI

SERIES_RADIUS = 0.5
RATIONAL_RADIUS = 8.0
ASYMPTOTIC_RADIUS = 1.0e3

_CF_LEVELS = 12
_WEIDEMAN_N = 40
# largest argument of exp() that stays finite in double precision
_EXP_MAX = math.log(np.finfo(float).max)


class FaddeevaOverflowError(OverflowError):
    """exp(-z**2) is not representable on the reflected branch."""


def _weideman_coefficients(n: int) -> tuple[float, tuple[float, ...]]:
    m = 2 * n
    big_l = math.sqrt(n / math.sqrt(2.0))
    theta = np.arange(-m + 1, m) * np.pi / m
    t = big_l * np.tan(theta / 2)
    f = np.concatenate(([0.0], np.exp(-t**2) * (big_l**2 + t**2)))
    a = np.real(np.fft.fft(np.fft.fftshift(f))) / (2 * m)
    return big_l, tuple(float(c) for c in np.flipud(a[1 : n + 1]))


_WL, _WA = _weideman_coefficients(_WEIDEMAN_N)
_SERIES_COEFFS = tuple(1.0 / math.gamma(k / 2 + 1) for k in range(40))


def _series(z: complex) -> complex:
    iz = 1j * z
    acc = 0j
    for c in reversed(_SERIES_COEFFS):
        acc = acc * iz + c
    return acc


def _rational(z: complex) -> complex:
    denom = _WL - 1j * z
    zz = (_WL + 1j * z) / denom
    p = 0j
    for c in _WA:
        p = p * zz + c
    return 2.0 * p / (denom * denom) + INV_SQRT_PI / denom


def _continued_fraction(z: complex) -> complex:
    r = 0j
    for k in range(_CF_LEVELS, 0, -1):
        r = (0.5 * k) / (z - r)
    return 1j * INV_SQRT_PI / (z - r)


def _asymptotic(z: complex) -> complex:
    q = 1.0 / (z * z)
    return 1j * INV_SQRT_PI / z * (1.0 + q * (0.5 + q * (0.75 + q * 1.875)))


def _upper(z: complex) -> complex:
    r = abs(z)
    if r < SERIES_RADIUS:
        w = _series(z)
    elif r < RATIONAL_RADIUS:
        w = _rational(z)
    elif r < ASYMPTOTIC_RADIUS:
        w = _continued_fraction(z)
    else:
        w = _asymptotic(z)
    if z.imag == 0.0:
        # Re w(x) = exp(-x^2) exactly on the real axis
        w = complex(math.exp(-z.real * z.real), w.imag)
    return w


def _check(z) -> complex:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"faddeeva_w needs a finite argument, got {z!r}")
    return z


def faddeeva_w(z) -> complex:
    """Return w(z) for finite complex ``z``.

    Relative accuracy is about 1e-15 for Im(z) >= 0.  For Im(z) < 0 the
    reflection formula is used, which loses digits where exp(-z**2) and
    w(-z) cancel; FaddeevaOverflowError is raised where exp(-z**2) overflows.
    """
    z = _check(z)
    if z.imag >= 0.0:
        return _upper(z)
    return faddeeva_w_scaled(z, 0.0)


def faddeeva_w_scaled(z, log_scale: complex) -> complex:
    """Return exp(log_scale) * w(z) without forming exp(-z**2) on its own.

    On the lower half-plane this evaluates
    2 exp(log_scale - z**2) - exp(log_scale) w(-z), so a large exp(-z**2)
    may be compensated by a small prefactor.
    """
    z = _check(z)
    log_scale = complex(log_scale)
    if z.imag >= 0.0:
        return cmath.exp(log_scale) * _upper(z)
    expo = log_scale - z * z
    if expo.real > _EXP_MAX - 1.0:
        raise FaddeevaOverflowError(
            f"exp(-z^2) overflows on the reflected branch at z={z!r}"
        )
    reflected = _upper(-z)
    head = 2.0 * cmath.exp(expo)
    if log_scale == 0:
        return head - reflected
    return head - cmath.exp(log_scale) * reflected


def faddeeva_w_reflection_check(z) -> float:
    """|w(-z) + w(z) - 2 exp(-z**2)|, zero up to rounding."""
    z = _check(z)
    if (-(z * z)).real > _EXP_MAX - 1.0:
        raise FaddeevaOverflowError(f"exp(-z^2) overflows at z={z!r}")
    return abs(faddeeva_w(-z) + faddeeva_w(z) - 2.0 * cmath.exp(-z * z))


def erfcx(z) -> complex:
    """Scaled complementary error function exp(z**2) erfc(z) = w(iz)."""
    return faddeeva_w(1j * _check(z))
