"""Characteristic times of the density: temporal and spatial maxima, tau_T(x)
curves with basin detection, and a Gaussian-window short-time spectrum."""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import optimize

from .source import MediumParams, SourceParams, derive_wave, exact_psi, saddle_psi

__all__ = [
    "NoInteriorMaximumError",
    "MultiModalWarning",
    "SpectralResolutionError",
    "Method",
    "CharacteristicTimes",
    "TauTCurve",
    "Spectrogram",
    "golden_max",
    "temporal_peak",
    "spatial_peak",
    "temporal_bracket",
    "tau_T",
    "tau_S",
    "characteristic_times",
    "tau_T_curve",
    "detect_basin",
    "spectrogram",
]

INV_PHI = (math.sqrt(5) - 1) / 2


class NoInteriorMaximumError(ValueError):
    """The density is monotone on the bracket."""


class MultiModalWarning(RuntimeWarning):
    pass


class SpectralResolutionError(ValueError):
    pass


class Method(str, enum.Enum):
    ANALYTIC_SADDLE = "analytic_saddle"
    NUMERIC_EXACT = "numeric_exact"
    NUMERIC_GRID = "numeric_grid"


@dataclass(frozen=True)
class CharacteristicTimes:
    x: float
    tau_c: float
    tau_abs: float
    tau_T: float
    plateau: float
    method: Method


def golden_max(f: Callable[[float], float], a: float, b: float, tol: float) -> float:
    """Golden-section search for the maximum of a unimodal ``f`` on [a, b]."""
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _quadratic_polish(f, x0: float, h: float) -> float:
    y0, y1, y2 = f(x0 - h), f(x0), f(x0 + h)
    curv = y0 - 2 * y1 + y2
    if curv >= 0:
        return x0
    shift = 0.5 * h * (y0 - y2) / curv
    return x0 + shift if abs(shift) <= h else x0


def _refine(density, grid: np.ndarray, i: int, tol: float) -> float:
    lo, hi = grid[i - 1], grid[i + 1]
    best = golden_max(density, lo, hi, tol)
    polished = _quadratic_polish(density, best, tol)
    if abs(polished - grid[i]) > (hi - lo) + 10 * tol:
        warnings.warn(
            f"quadratic fit at {polished:.6g} far from grid argmax {grid[i]:.6g}",
            MultiModalWarning, stacklevel=3,
        )
    return polished


def temporal_peak(
    field_eval: Callable[[float], complex],
    t_bracket: tuple[float, float],
    tol: float | None = None,
    n_scan: int = 240,
) -> float:
    """Time of the global density maximum of ``field_eval`` inside ``t_bracket``.

    Coarse log-spaced scan, golden-section refinement around the best sample,
    then a three-point quadratic polish.  ``tol`` defaults to 1e-4 of the
    coarse estimate.  Raises NoInteriorMaximumError when the best sample sits
    on the bracket edge.
    """
    a, b = t_bracket
    if not 0 < a < b:
        raise ValueError(f"bad bracket {t_bracket}")
    grid = np.geomspace(a, b, n_scan)
    dens = np.array([abs(field_eval(t)) ** 2 for t in grid])
    i = int(np.argmax(dens))
    if i == 0 or i == n_scan - 1:
        raise NoInteriorMaximumError(f"density maximum on bracket edge t={grid[i]:.6g}")
    if tol is None:
        tol = 1e-4 * grid[i]
    return _refine(lambda t: abs(field_eval(t)) ** 2, grid, i, tol)


def spatial_peak(
    field_eval: Callable[[float], complex],
    x_bracket: tuple[float, float],
    tol: float | None = None,
    n_scan: int = 240,
    floor: float = 1e-6,
) -> float:
    """Position of the leading density lobe inside ``x_bracket``.

    The lobe is the outermost local maximum of the scan whose density exceeds
    ``floor`` times the largest sampled density.
    """
    a, b = x_bracket
    if not a < b:
        raise ValueError(f"bad bracket {x_bracket}")
    grid = np.linspace(a, b, n_scan)
    dens = np.array([abs(field_eval(x)) ** 2 for x in grid])
    top = dens.max()
    interior = np.flatnonzero(
        (dens[1:-1] >= dens[:-2]) & (dens[1:-1] > dens[2:]) & (dens[1:-1] > floor * top)
    ) + 1
    if interior.size == 0:
        raise NoInteriorMaximumError("no interior spatial maximum on the bracket")
    i = int(interior[-1])
    if tol is None:
        tol = 1e-6 * max(abs(grid[i]), b - a)
    return _refine(lambda x: abs(field_eval(x)) ** 2, grid, i, tol)


def temporal_bracket(m: MediumParams, s: SourceParams, x: float) -> tuple[float, float]:
    d = derive_wave(m, s, x)
    plateau = m.survival_time
    lo = 1e-2 * min(d.tau_c, plateau)
    hi = 10 * max(d.tau_abs, plateau if math.isfinite(plateau) else 0.0)
    return lo, hi


def _field(m, s, x, method):
    if method is Method.ANALYTIC_SADDLE:
        return lambda t: saddle_psi(m, s, x, t)
    return lambda t: exact_psi(m, s, x, t)


def tau_T(
    m: MediumParams,
    s: SourceParams,
    x: float,
    method: Method | str = Method.NUMERIC_EXACT,
    rtol: float = 1e-4,
    max_widen: int = 4,
) -> float:
    """Temporal-maximum time at fixed ``x``; the bracket widens tenfold on each
    edge hit, up to ``max_widen`` times."""
    method = Method(method)
    lo, hi = temporal_bracket(m, s, x)
    for _ in range(max_widen + 1):
        try:
            t = temporal_peak(_field(m, s, x, method), (lo, hi), tol=None)
        except NoInteriorMaximumError:
            lo, hi = lo / 10, hi * 10
            continue
        # tol=None already means 1e-4 relative; tighten when asked
        if rtol < 1e-4:
            t = golden_max(lambda u: abs(_field(m, s, x, method)(u)) ** 2,
                           t * (1 - 1e-3), t * (1 + 1e-3), rtol * t)
        return t
    raise NoInteriorMaximumError(f"no temporal maximum found at x={x}")


def tau_S(
    m: MediumParams,
    s: SourceParams,
    x: float,
    method: Method | str = Method.NUMERIC_EXACT,
    rtol: float = 1e-6,
) -> float:
    """Arrival time of the spatial maximum at ``x``.

    Inverts x(t), the position of the leading lobe, by root finding in t
    around the prediction |tau|.  The spatial search at each t is restricted
    to [x(t)/2, 2 x(t)] around the predicted lobe x(t) = 2|k0| t so the source-adjacent
    evanescent tail is excluded.
    """
    method = Method(method)
    d = derive_wave(m, s, x)
    speed = 2 * abs(d.k0)

    def lobe(t):
        centre = speed * t
        fe = (lambda y: saddle_psi(m, s, y, t)) if method is Method.ANALYTIC_SADDLE \
            else (lambda y: exact_psi(m, s, y, t))
        return spatial_peak(fe, (centre / 2, 2 * centre)) - x

    t0 = d.tau_abs
    a, b = 0.7 * t0, 1.4 * t0
    fa, fb = lobe(a), lobe(b)
    for _ in range(6):
        if fa < 0 < fb:
            break
        a, b = a * 0.7, b * 1.4
        fa, fb = lobe(a), lobe(b)
    else:
        raise NoInteriorMaximumError(f"cannot bracket the spatial-peak arrival at x={x}")
    return optimize.brentq(lobe, a, b, rtol=rtol)


def characteristic_times(
    m: MediumParams, s: SourceParams, x: float, method: Method | str = Method.NUMERIC_EXACT
) -> CharacteristicTimes:
    method = Method(method)
    d = derive_wave(m, s, x)
    return CharacteristicTimes(
        x=float(x), tau_c=d.tau_c, tau_abs=d.tau_abs,
        tau_T=tau_T(m, s, x, method), plateau=m.survival_time, method=method,
    )


@dataclass
class TauTCurve:
    times: list[CharacteristicTimes | None]
    status: list[str]
    basin: bool
    basin_x: float | None = None
    basin_depth: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def x(self) -> np.ndarray:
        return np.array([ct.x for ct in self.times if ct is not None])

    @property
    def tau_T(self) -> np.ndarray:
        return np.array([ct.tau_T for ct in self.times if ct is not None])


def detect_basin(
    xs: Sequence[float], taus: Sequence[float], rel_depth: float = 0.01
) -> tuple[bool, float | None, float]:
    """Look for an interior local minimum of tau_T(x).

    Depth is measured from the highest value to the left of the minimum and
    must exceed ``rel_depth`` times the minimum itself, so curves that agree
    near the dip get the same verdict whatever their plateau.  Returns
    (found, x_min, depth) for the deepest qualifying minimum.
    """
    taus = np.asarray(taus, dtype=float)
    xs = np.asarray(xs, dtype=float)
    best = (False, None, 0.0)
    for i in range(1, len(taus) - 1):
        if not (taus[i] < taus[i - 1] and taus[i] <= taus[i + 1]):
            continue
        depth = taus[: i + 1].max() - taus[i]
        if depth > rel_depth * taus[i] and depth > best[2]:
            best = (True, float(xs[i]), float(depth))
    return best


def tau_T_curve(
    m: MediumParams,
    s: SourceParams,
    x_list: Sequence[float],
    method: Method | str = Method.NUMERIC_EXACT,
) -> TauTCurve:
    xs = [float(x) for x in x_list]
    if any(x <= 0 for x in xs) or xs != sorted(xs):
        raise ValueError("x_list must be positive and ascending")
    times, status = [], []
    for x in xs:
        try:
            times.append(characteristic_times(m, s, x, method))
            status.append("ok")
        except (NoInteriorMaximumError, ArithmeticError) as exc:
            times.append(None)
            status.append(f"error: {exc}")
    good = [ct for ct in times if ct is not None]
    found, bx, depth = detect_basin([c.x for c in good], [c.tau_T for c in good])
    return TauTCurve(times, status, found, bx, depth,
                     {"omega0": s.omega0, "v1": m.v1, "method": Method(method).value})


@dataclass
class Spectrogram:
    x: float
    window_width: float
    t_centers: np.ndarray
    omega_bins: np.ndarray
    power: np.ndarray  # shape (len(t_centers), len(omega_bins))
    energy: np.ndarray  # windowed |psi|^2 energy per slice

    @property
    def bin_width(self) -> float:
        return float(self.omega_bins[1] - self.omega_bins[0])

    def dominant_frequency(self, t: float) -> float:
        j = int(np.argmin(np.abs(self.t_centers - t)))
        return float(self.omega_bins[np.argmax(self.power[j])])


def spectrogram(
    signal: Callable[[float], complex],
    x: float,
    window_width: float,
    t_range: tuple[float, float],
    n_bins: int,
    n_centers: int = 41,
    support: float = 4.0,
    predicted_offset: float | None = None,
) -> Spectrogram:
    """Gaussian-window short-time power spectrum of t -> psi(x, t).

    The window exp(-(t - tc)^2 / (2 w^2)) is sampled with ``n_bins`` points
    over tc +/- ``support`` * w and transformed with a full DFT.  ``power``
    is |spectrum|^2 d_omega / (2 pi) per bin, so every slice satisfies
    Parseval: sum(power) equals the windowed energy sum |g psi|^2 dt.  Frequencies follow the convention
    psi ~ exp(-i omega t), i.e. positive omega for positive energy.

    ``predicted_offset`` (the expected distance of the dominant frequency from
    the cut-off) triggers SpectralResolutionError when a bin is wider than a
    quarter of it.
    """
    if window_width <= 0 or n_bins < 8:
        raise ValueError("need window_width > 0 and n_bins >= 8")
    span = 2 * support * window_width
    dt = span / n_bins
    d_omega = 2 * np.pi / (n_bins * dt)
    if predicted_offset is not None and d_omega > 0.25 * abs(predicted_offset):
        raise SpectralResolutionError(
            f"bin width {d_omega:.4g} exceeds 25% of predicted offset {predicted_offset:.4g}"
        )
    rel = (np.arange(n_bins) - n_bins // 2) * dt
    window = np.exp(-0.5 * (rel / window_width) ** 2)
    centers = np.linspace(t_range[0], t_range[1], n_centers)
    omegas = np.fft.fftshift(np.fft.fftfreq(n_bins, d=dt)) * 2 * np.pi
    power = np.empty((n_centers, n_bins))
    energy = np.empty(n_centers)
    for j, tc in enumerate(centers):
        seg = np.array([signal(tc + r) if tc + r > 0 else 0j for r in rel]) * window
        # exp(+i omega t) picks out exp(-i omega t) components at +omega
        spec = np.fft.fftshift(np.fft.ifft(seg)) * n_bins * dt
        power[j] = np.abs(spec) ** 2 * d_omega / (2 * np.pi)
        energy[j] = np.sum(np.abs(seg) ** 2) * dt
    return Spectrogram(float(x), float(window_width), centers, omegas, power, energy)
