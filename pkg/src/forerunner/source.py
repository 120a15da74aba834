"""Sharp-onset source feeding a medium with complex potential V = cutoff - i*v1.

Solves  i psi_t = -psi_xx + V psi  for x >= 0 with psi(0, t) = exp(-i w0 t) for
t >= 0 and psi = 0 before the onset.  Everything here is dimensionless
(hbar = 2m = 1).
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .faddeeva import faddeeva_w

__all__ = [
    "MediumParams",
    "SourceParams",
    "DerivedWave",
    "Provenance",
    "ComplexField",
    "DegenerateBranchError",
    "OracleConvergenceError",
    "wavenumber",
    "derive_wave",
    "u_arguments",
    "exact_psi",
    "pole_psi",
    "saddle_psi",
    "approx_psi",
    "oracle_psi",
    "evaluate_field",
]

_ROT = (1 + 1j) / math.sqrt(2.0)


class DegenerateBranchError(ValueError):
    """k0 = 0: injection exactly at a lossless cut-off."""


class OracleConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class MediumParams:
    v1: float = 0.0
    cutoff: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.v1) and self.v1 >= 0):
            raise ValueError(f"v1 must be finite and >= 0, got {self.v1}")
        if not math.isfinite(self.cutoff):
            raise ValueError("cutoff must be finite")

    @property
    def potential(self) -> complex:
        return complex(self.cutoff, -self.v1)

    @property
    def survival_time(self) -> float:
        """Plateau time 1/(2 v1); infinite without absorption."""
        return math.inf if self.v1 == 0 else 0.5 / self.v1


@dataclass(frozen=True)
class SourceParams:
    omega0: float

    def __post_init__(self):
        if not math.isfinite(self.omega0):
            raise ValueError("omega0 must be finite")


@dataclass(frozen=True)
class DerivedWave:
    x: float
    k0: complex
    tau: complex
    tau_c: float
    validity_x: float

    @property
    def tau_abs(self) -> float:
        return abs(self.tau)


def wavenumber(m: MediumParams, omega: complex) -> complex:
    """k(omega) = sqrt(omega - cutoff + i v1) on the branch Im k >= 0."""
    k = cmath.sqrt(omega - m.cutoff + 1j * m.v1)
    if k.imag < 0:
        k = -k
    return k


def _k0(m: MediumParams, s: SourceParams) -> complex:
    k0 = wavenumber(m, s.omega0)
    if k0 == 0:
        raise DegenerateBranchError("omega0 at the cut-off with v1 = 0 gives k0 = 0")
    return k0


def derive_wave(m: MediumParams, s: SourceParams, x: float) -> DerivedWave:
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    k0 = _k0(m, s)
    tau = x / (-2j * k0)
    speed = k0.real + k0.imag
    tau_c = x / (2 * speed) if speed > 0 else math.inf
    gap = abs(k0) - k0.real
    validity_x = 1.0 / gap if gap > 0 else math.inf
    return DerivedWave(x=float(x), k0=k0, tau=tau, tau_c=tau_c, validity_x=validity_x)


def _domain(x: float, t: float) -> None:
    if x < 0 or t < 0 or not (math.isfinite(x) and math.isfinite(t)):
        raise ValueError(f"need finite x >= 0 and t >= 0, got x={x}, t={t}")


def u_arguments(m: MediumParams, s: SourceParams, x: float, t: float) -> tuple[complex, complex]:
    """The pole positions (u0, u0') of the Gaussian integral, t > 0."""
    k0 = _k0(m, s)
    a = _ROT * math.sqrt(t)
    h = x / (2 * t)
    return a * (k0 - h), a * (-k0 - h)


def exact_psi(m: MediumParams, s: SourceParams, x: float, t: float) -> complex:
    _domain(x, t)
    if t == 0:
        return 1.0 + 0j if x == 0 else 0j
    k0 = _k0(m, s)
    u0, u0p = u_arguments(m, s, x, t)
    log_pref = -1j * m.potential * t + 1j * x * x / (4 * t)
    pref = cmath.exp(log_pref)
    total = 0j
    pole = 0j
    for u, k in ((u0, k0), (u0p, -k0)):
        z = -u
        if z.imag >= 0:
            total += faddeeva_w(z)
        else:
            # w(z) = 2 exp(-z^2) - w(-z); pref*exp(-u^2) collapses to the plane wave
            pole += cmath.exp(-1j * s.omega0 * t + 1j * k * x)
            total -= faddeeva_w(u)
    return pole + 0.5 * pref * total


def pole_psi(m: MediumParams, s: SourceParams, x: float, t: float) -> complex:
    _domain(x, t)
    d = derive_wave(m, s, x)
    if t < d.tau_c:
        return 0j
    return cmath.exp(-1j * s.omega0 * t + 1j * d.k0 * x)


def saddle_psi(m: MediumParams, s: SourceParams, x: float, t: float) -> complex:
    _domain(x, t)
    if x <= 0 or t <= 0:
        raise ValueError("saddle_psi needs x > 0 and t > 0")
    d = derive_wave(m, s, x)
    denom = (1 + 1j) * d.k0 * (d.tau * d.tau + t * t)
    if denom == 0:
        raise ZeroDivisionError("tau^2 + t^2 = 0")
    phase = cmath.exp(-1j * m.potential * t + 1j * x * x / (4 * t))
    # leading term of w(z) ~ i / (sqrt(pi) z) applied to both w's of exact_psi,
    # i.e. phase (1/u0 + 1/u0') / (2 i sqrt(pi)), rewritten with tau
    return -math.sqrt(2) * phase * d.tau * math.sqrt(t / math.pi) / denom


def approx_psi(m: MediumParams, s: SourceParams, x: float, t: float) -> complex:
    return pole_psi(m, s, x, t) + saddle_psi(m, s, x, t)


def _pick_offset(poles) -> float:
    candidates = (-1.0, -0.5, 0.0, 0.5, 1.0)
    return max(candidates, key=lambda c: min(abs(p.imag - c) for p in poles))


def oracle_psi(
    m: MediumParams,
    s: SourceParams,
    x: float,
    t: float,
    contour_offset: float | None = None,
    atol: float = 1e-10,
) -> complex:
    """Brute-force quadrature of the k-plane integral

        psi = (i e^{-iVt} / pi) * int dk  k e^{ikx - ik^2 t} / (k^2 - k0^2)

    along the straight line k = x/2t + (1 - i)(s + i c)/sqrt(2t), s real,
    i.e. the line through the saddle tilted along the steepest-descent
    direction, shifted by ``contour_offset`` = c.  Poles of the integrand
    lying above the line are added as residues so the result equals the
    integral over a contour passing above all singularities.  With
    ``contour_offset=None`` the offset is chosen away from both poles.
    """
    _domain(x, t)
    if t == 0:
        raise ValueError("oracle_psi needs t > 0")
    k0 = _k0(m, s)
    u0, u0p = u_arguments(m, s, x, t)
    c = _pick_offset((u0, u0p)) if contour_offset is None else float(contour_offset)
    rot = (1 - 1j) / math.sqrt(2 * t)
    h = x / (2 * t)
    k0sq = k0 * k0

    def integrand(sv):
        k = h + rot * (sv + 1j * c)
        return k * cmath.exp(1j * k * x - 1j * k * k * t) / (k * k - k0sq) * rot

    peak = max(abs(integrand(sv)) for sv in np.linspace(-4, 4, 161))
    half = 4.0
    while max(abs(integrand(-half)), abs(integrand(half))) > 1e-16 * peak:
        half *= 1.5
        if half > 64:
            raise OracleConvergenceError("integrand does not decay inside |s| <= 64")
    breaks = sorted({p.real for p in (u0, u0p) if -half < p.real < half})
    value, err = integrate.quad(
        integrand, -half, half, complex_func=True, points=breaks or None,
        limit=400, epsabs=0.1 * atol, epsrel=1e-13, full_output=False,
    )
    err = abs(err)
    if err > atol:
        raise OracleConvergenceError(f"quadrature error estimate {err:.3g} exceeds {atol:.3g}")
    log_v = -1j * m.potential * t
    psi = 1j * cmath.exp(log_v) / math.pi * value
    for p, k in ((u0, k0), (u0p, -k0)):
        if p.imag > c:
            psi += cmath.exp(log_v + 1j * k * x - 1j * k0sq * t)
    return psi


class Provenance(str, enum.Enum):
    EXACT = "exact"
    SADDLE = "saddle"
    POLE = "pole"
    SADDLE_PLUS_POLE = "saddle_plus_pole"
    QUADRATURE_ORACLE = "quadrature_oracle"
    GRID = "grid"


_EVALUATORS = {
    Provenance.EXACT: exact_psi,
    Provenance.SADDLE: saddle_psi,
    Provenance.POLE: pole_psi,
    Provenance.SADDLE_PLUS_POLE: approx_psi,
    Provenance.QUADRATURE_ORACLE: oracle_psi,
}


@dataclass
class ComplexField:
    """psi sampled on an (x, t) product grid; values[i, j] = psi(x[i], t[j])."""

    x_samples: np.ndarray
    t_samples: np.ndarray
    values: np.ndarray
    provenance: Provenance
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.x_samples = np.asarray(self.x_samples, dtype=float)
        self.t_samples = np.asarray(self.t_samples, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        self.provenance = Provenance(self.provenance)
        if self.values.shape != (self.x_samples.size, self.t_samples.size):
            raise ValueError(
                f"values shape {self.values.shape} does not match "
                f"({self.x_samples.size}, {self.t_samples.size})"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field contains non-finite entries")

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2


def evaluate_field(m, s, xs, ts, method: Provenance | str = Provenance.EXACT) -> ComplexField:
    method = Provenance(method)
    fn = _EVALUATORS[method]
    xs = np.asarray(xs, dtype=float)
    ts = np.asarray(ts, dtype=float)
    vals = np.empty((xs.size, ts.size), dtype=complex)
    for i, x in enumerate(xs):
        for j, t in enumerate(ts):
            vals[i, j] = fn(m, s, float(x), float(t))
    return ComplexField(xs, ts, vals, method, {"omega0": s.omega0, "v1": m.v1, "cutoff": m.cutoff})
