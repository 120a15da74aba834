"""Acceptance suites.  Each check measures one quantity, compares it with a
fixed tolerance and reports the numbers; nothing here is tuned per run.

Suites and the checks they hold:

* ``special_functions``  w(z) against scipy's wofz and its own identities
* ``source_exact``       boundary identity, oracle equivalence, scaling law
* ``features``           plateau matrix, Hermitian 1/sqrt(3), spatial law,
                         basin flags, spectrogram frequency
* ``grid``               norm bookkeeping, two-channel reduction
* ``cross_validation``   grid shutter plateau against 1/(2 v1)
"""
from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .faddeeva import faddeeva_w
from .features import Method, spectrogram, tau_S, tau_T, tau_T_curve
from .grid import (
    GridConfig,
    TwoChannelParams,
    band_limit,
    default_taper,
    evolve,
    grid_points,
    plan_shutter_grid,
    probe_peak_time,
    reduce_to_effective,
    truncated_plane_wave,
    two_channel_evolve,
)
from .scenarios import DEFAULTS, fig3a_x_list, shutter_run, sweep_rows
from .source import MediumParams, SourceParams, derive_wave, exact_psi, oracle_psi, saddle_psi

FIXTURES = ((0.81, 0.01), (0.9, 0.0), (0.99, 0.001), (1.2, 0.1))


@dataclass
class CheckResult:
    id: str
    name: str
    measured: float
    tolerance: float
    passed: bool
    runtime: float = 0.0
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return (f"{tag} [{self.id}] {self.name}: measured={self.measured:.17g} "
                f"tolerance={self.tolerance:.17g} ({self.runtime:.1f}s)")


def run_check(fn: Callable[[], CheckResult]) -> CheckResult:
    t0 = time.perf_counter()
    r = fn()
    r.runtime = time.perf_counter() - t0
    return r


# -- special functions -----------------------------------------------------------


def check_w_upper() -> CheckResult:
    from scipy.special import wofz

    re = np.concatenate([-np.geomspace(1e4, 1e-6, 40), [0.0], np.geomspace(1e-6, 1e4, 40)])
    im = np.concatenate([[0.0], np.geomspace(1e-6, 1e4, 40)])
    worst = 0.0
    for a in re:
        for b in im:
            z = complex(a, b)
            ref = complex(wofz(z))
            worst = max(worst, abs(faddeeva_w(z) - ref) / abs(ref))
    return CheckResult("SF1", "w(z) relative error vs wofz, Im z >= 0", worst, 1e-13, worst <= 1e-13)


def check_w_lower() -> CheckResult:
    from scipy.special import wofz

    worst = 0.0
    for a in np.linspace(-5, 5, 41):
        for b in -np.linspace(0.05, 5, 20):
            if b * b - a * a > 600:  # exp(-z^2) beyond double range
                continue
            z = complex(a, b)
            ref = complex(wofz(z))
            worst = max(worst, abs(faddeeva_w(z) - ref) / abs(ref))
    return CheckResult("SF2", "w(z) relative error vs wofz, Im z < 0", worst, 1e-10, worst <= 1e-10)


def check_w_symmetry() -> CheckResult:
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(200):
        z = complex(rng.uniform(-20, 20), rng.uniform(0, 20))
        # w(-conj z) = conj w(z)
        worst = max(worst, abs(faddeeva_w(-z.conjugate()) - faddeeva_w(z).conjugate()) / abs(faddeeva_w(z)))
    return CheckResult("SF3", "w(-conj z) = conj w(z)", worst, 1e-15, worst <= 1e-15)


# -- exact source model ------------------------------------------------------------


def check_boundary() -> CheckResult:
    ts = np.geomspace(1e-3, 1e4, 60)
    worst = 0.0
    for w0, v1 in FIXTURES:
        m, s = MediumParams(v1), SourceParams(w0)
        for t in ts:
            worst = max(worst, abs(exact_psi(m, s, 0.0, t) - complex(math.cos(w0 * t), -math.sin(w0 * t))))
    return CheckResult("1", "boundary identity psi(0,t) = exp(-i w0 t)", worst, 1e-12, worst <= 1e-12)


ORACLE_X = np.linspace(0.5, 40.0, 20)
ORACLE_T = np.geomspace(0.05, 200.0, 20)
ORACLE_PAIRS = [(w0, v1) for w0 in (0.81, 0.9, 0.99, 1.2) for v1 in (0.0, 1e-3, 1e-2, 1e-1)]


def check_oracle() -> CheckResult:
    worst, where = 0.0, None
    for w0, v1 in ORACLE_PAIRS:
        m, s = MediumParams(v1), SourceParams(w0)
        for x in ORACLE_X:
            for t in ORACLE_T:
                ex = exact_psi(m, s, x, t)
                err = abs(ex - oracle_psi(m, s, x, t)) / max(1.0, abs(ex))
                if err > worst:
                    worst, where = err, {"omega0": w0, "v1": v1, "x": x, "t": t}
    return CheckResult("2", "exact vs contour quadrature oracle, |diff| / max(1, |psi|)", worst, 1e-8, worst <= 1e-8,
                       details={"worst_at": where})


def check_scaling() -> CheckResult:
    rng = np.random.default_rng(2024)
    worst = 0.0
    for w0, v1 in FIXTURES:
        m, s = MediumParams(v1), SourceParams(w0)
        for eta in (0.5, 2.0, 10.0):
            for x, t in zip(rng.uniform(0.5, 50, 50), rng.uniform(0.5, 50, 50)):
                lhs = abs(saddle_psi(m, s, eta * x, eta * t)) ** 2
                rhs = math.exp(-2 * t * v1 * (eta - 1)) * abs(saddle_psi(m, s, x, t)) ** 2 / eta
                worst = max(worst, abs(lhs - rhs) / rhs)
    return CheckResult("6", "saddle scaling law (relative)", worst, 1e-12, worst <= 1e-12)


# -- features ------------------------------------------------------------------------


def check_plateau_matrix() -> CheckResult:
    rows = sweep_rows(dict(DEFAULTS["sweep"]))
    ratios = np.array([r["tau_T_times_2v1"] for r in rows])
    worst = float(np.nanmax(np.abs(ratios - 1))) if np.all(np.isfinite(ratios)) else math.inf
    bad = [r for r in rows if not abs(r["tau_T_times_2v1"] - 1) <= 0.02]
    return CheckResult("3", "tau_T * 2 v1 within [0.98, 1.02] (max |ratio - 1|)", worst, 0.02, not bad,
                       details={"points": rows, "outside": bad})


def check_hermitian() -> CheckResult:
    m, s = MediumParams(0.0), SourceParams(0.9)
    d = derive_wave(m, s, 1.0)
    x = 10 * d.validity_x
    d = derive_wave(m, s, x)
    ratio = tau_T(m, s, x, rtol=1e-8) / (d.tau_abs / math.sqrt(3))
    return CheckResult("4", "tau_T / (tau / sqrt 3) - 1 at x = 10 validity_x", abs(ratio - 1), 0.01,
                       abs(ratio - 1) <= 0.01, details={"x": x, "ratio": ratio})


SPATIAL_FACTORS = (20.0, 50.0)


def check_spatial() -> CheckResult:
    rows = []
    for v1 in DEFAULTS["sweep"]["v1s"]:
        for w0 in DEFAULTS["sweep"]["omega0s"]:
            m, s = MediumParams(v1), SourceParams(w0)
            k0 = derive_wave(m, s, 1.0).k0
            # above cut-off the stationary pole term swamps the travelling lobe
            method = Method.ANALYTIC_SADDLE if w0 > m.cutoff else Method.NUMERIC_EXACT
            for fct in SPATIAL_FACTORS:
                x = fct * math.sqrt(2) * abs(k0) / v1
                ts = tau_S(m, s, x, method)
                rows.append({"v1": v1, "omega0": w0, "factor": fct, "x": x, "method": method.value,
                             "ratio": ts / (x / (2 * abs(k0)))})
    worst = max(abs(r["ratio"] - 1) for r in rows)
    return CheckResult("5", "tau_S / (x / 2|k0|) - 1, large x", worst, 0.02, worst <= 0.02, details={"points": rows})


def check_basin() -> CheckResult:
    p = dict(DEFAULTS["fig3a_tauT_vs_x"])
    expected = {0.0: True, 0.001: True, 0.1: False}
    flags = {}
    for v1 in expected:
        c = tau_T_curve(MediumParams(v1), SourceParams(p["omega0"]), fig3a_x_list(p, v1))
        flags[v1] = {"basin": c.basin, "basin_x": c.basin_x, "depth": c.basin_depth}
    wrong = sum(flags[v]["basin"] != e for v, e in expected.items())
    return CheckResult("7", "fig3a basin flags (number wrong)", float(wrong), 0.0, wrong == 0,
                       details={"flags": {str(k): v for k, v in flags.items()}, "expected": expected})


SPECTRO_CASES = ({"x": 500.0, "window": 1.0, "n_bins": 512}, {"x": 2000.0, "window": 0.25, "n_bins": 512})


def check_spectrogram() -> CheckResult:
    m, s = MediumParams(0.01), SourceParams(0.99)
    rows, worst = [], 0.0
    for case in SPECTRO_CASES:
        x = case["x"]
        tp = tau_T(m, s, x)
        sp = spectrogram(lambda t: exact_psi(m, s, x, t), x, case["window"], (tp, tp), case["n_bins"], n_centers=1)
        pred = 1 + (x * m.v1) ** 2
        off = abs(sp.dominant_frequency(tp) - pred) / sp.bin_width
        worst = max(worst, off)
        rows.append({**case, "tau_T": tp, "dominant": sp.dominant_frequency(tp), "predicted": pred,
                     "bin_width": sp.bin_width})
    return CheckResult("10", "dominant frequency offset at tau_T (in bins)", worst, 1.0, worst <= 1.0,
                       details={"cases": rows})


# -- grid -------------------------------------------------------------------------------


def check_norms() -> CheckResult:
    worst_u, worst_l = 0.0, 0.0
    runs = {}
    for scheme in ("crank_nicolson", "split_operator"):
        g = GridConfig(-60.0, 60.0, 0.05, 0.002, 2.0, None, scheme)
        x = grid_points(g)
        psi0 = (np.exp(-((x + 3) ** 2) / 8 + 0.9j * x))[None, :]
        for v1 in (0.0, 0.1):
            diag = np.where(x > 0, complex(1.0, -v1), 0.0)[None, :]
            _, _, audit, _ = evolve(g, psi0, diag)
            runs[f"{scheme}_v1={v1}"] = audit
            if v1 == 0:
                worst_u = max(worst_u, audit["max_step_unitarity_drift"])
            else:
                worst_l = max(worst_l, audit["max_loss_mismatch"])
    ok = worst_u <= 1e-10 and worst_l <= 1e-3
    return CheckResult("11", "norm drift per step (Hermitian) / loss mismatch (absorbing)",
                       max(worst_u / 1e-10, worst_l / 1e-3), 1.0, ok,
                       details={"max_unitarity_drift": worst_u, "max_loss_mismatch": worst_l, "audits": runs})


TWO_CHANNEL = TwoChannelParams(omega_rabi=4 * math.sqrt(101), detuning=400.0, gamma=80.0)
TWO_CHANNEL_FACTORS = (5.0, 10.0, 20.0)


def two_channel_comparison(p: TwoChannelParams = TWO_CHANNEL, factors=TWO_CHANNEL_FACTORS,
                           dx: float = 0.1, k_cut: float = 25.0, t_max_factor: float = 2.5) -> dict:
    """Channel 1 of the two-channel run against the one-channel run with the
    effective potential, on the same grid (dimensional units)."""
    m, scale = reduce_to_effective(p)
    k0 = p.k0_dimensional
    k_red = k0 * scale.length
    s = SourceParams(k_red**2)
    onset = math.sqrt(2) * abs(derive_wave(m, s, 1.0).k0) / m.v1
    probes = [f * onset * scale.length for f in factors]
    t_max = t_max_factor / (2 * m.v1) * scale.time
    grid = plan_shutter_grid(k0, probes, t_max, dx, speed=p.hbar * k0 / p.mass)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        f1, _ = two_channel_evolve(p, grid, compare_effective=True, k_cut=k_cut)
        # the one-channel effective-potential problem on the same dimensional grid
        xs = grid_points(grid)
        v_eff = complex(m.cutoff, -m.v1) * scale.energy
        diag = np.where(xs > 0, v_eff, 0.0)[None, :]
        psi0 = band_limit(truncated_plane_wave(xs, k0, default_taper(grid)), grid.dx, k_cut, k0)[None, :]
        _, eff_vals, _, _ = evolve(grid, psi0, diag, hbar=p.hbar, mass=p.mass)
    rows = []
    for i, xp in enumerate(f1.x_samples):
        d1 = np.abs(f1.values[i]) ** 2
        de = np.abs(eff_vals[0, i]) ** 2
        mask = (d1 > 0.01 * d1.max()) & (f1.t_samples > 0.2 / (2 * m.v1) * scale.time)
        rel = float(np.max(np.abs(d1[mask] - de[mask]) / de[mask]))
        tp = probe_peak_time(f1.t_samples, f1.values[i], t_min=0.2 / (2 * m.v1) * scale.time)
        rows.append({"x": float(xp), "density_rel_diff": rel,
                     "tau_T_times_2v1": float(scale.to_reduced_t(tp)) * 2 * m.v1})
    return {"v1_eff": m.v1, "rows": rows, "audit": f1.meta["audit"]}


def check_two_channel() -> CheckResult:
    res = two_channel_comparison()
    dens = max(r["density_rel_diff"] for r in res["rows"])
    tau = max(abs(r["tau_T_times_2v1"] - 1) for r in res["rows"])
    return CheckResult("9", "two-channel vs effective: max(density diff, |tau_T 2 v1 - 1|)", max(dens, tau), 0.05,
                       dens <= 0.05 and tau <= 0.05, details=res)


# -- cross validation -----------------------------------------------------------------


def check_shutter_plateau() -> CheckResult:
    p = dict(DEFAULTS["fig3b_shutter_tauT"])
    runs = [shutter_run(p, v1) for v1 in (0.01, 0.1)]
    worst = max(abs(r["tau_T_times_2v1"] - 1) for run in runs for r in run["probes"])
    return CheckResult("8", "grid shutter tau_T * 2 v1 - 1 at three probes", worst, 0.05, worst <= 0.05,
                       details={"runs": runs})


SUITES: dict[str, tuple[Callable[[], CheckResult], ...]] = {
    "special_functions": (check_w_upper, check_w_lower, check_w_symmetry),
    "source_exact": (check_boundary, check_oracle, check_scaling),
    "features": (check_plateau_matrix, check_hermitian, check_spatial, check_basin, check_spectrogram),
    "grid": (check_norms, check_two_channel),
    "cross_validation": (check_shutter_plateau,),
}


def run_suite(name: str, echo: Callable[[str], None] | None = None) -> dict:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    results = []
    for check in SUITES[name]:
        r = run_check(check)
        results.append(r)
        if echo:
            echo(r.line())
    return {
        "suite": name,
        "passed": all(r.passed for r in results),
        "results": [
            {"id": r.id, "name": r.name, "measured": r.measured, "tolerance": r.tolerance,
             "passed": r.passed, "runtime": r.runtime, "details": r.details}
            for r in results
        ],
    }
