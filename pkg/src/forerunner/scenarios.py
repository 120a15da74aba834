"""Figure-reproduction scenarios.  Each writes CSV data plus ``summary.json``
into ``output_path``; nothing time- or host-dependent goes into the files, so
identical specs give byte-identical outputs."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from . import io
from .features import (
    CharacteristicTimes,
    Method,
    NoInteriorMaximumError,
    spatial_peak,
    spectrogram,
    tau_T,
    tau_T_curve,
)
from .grid import (
    AbsorbingLayer,
    ContaminationWarning,
    plan_shutter_grid,
    probe_peak_time,
    shutter_asymptotic_psi,
    shutter_evolve,
)
from .source import MediumParams, SourceParams, derive_wave, evaluate_field, exact_psi

SpecError = io.SpecError

DEFAULTS: dict[str, dict] = {
    "fig1_density_vs_x": {
        "omega0": 0.99, "v1": 0.001, "times": [250.0, 300.0, 500.0],
        "x_min": 0.5, "x_max": 250.0, "n_x": 500,
    },
    "fig2_density_vs_t": {
        "x": 100.0, "omega0": 0.9, "v1s": [0.0, 0.001, 0.01],
        "t_min": 1.0, "t_max": 400.0, "n_t": 800,
    },
    "fig3a_tauT_vs_x": {
        "omega0": 0.81, "v1s": [0.0, 0.001, 0.01, 0.1],
        "x_min": 0.05, "x_max_floor": 100.0, "x_max_factor": 20.0, "n_x": 60,
    },
    "fig3b_shutter_tauT": {
        "k0": 0.9, "v1s": [0.0, 0.01, 0.1, 0.5],
        "factors": [5.0, 10.0, 20.0], "hermitian_probes": [10.0, 20.0, 40.0],
        "hermitian_t_max": 60.0, "t_max_factor": 2.5,
        "dx": 0.1, "k_cut": 25.0, "edge_width": 100.0, "edge_strength": 300.0,
    },
    "spectrogram": {
        "x": 500.0, "omega0": 0.99, "v1": 0.01, "window": 1.0, "n_bins": 512,
        "n_centers": 41, "span": 20.0,
    },
    "sweep": {
        "v1s": [0.001, 0.01, 0.1], "omega0s": [0.81, 0.9, 1.2], "factors": [10.0, 20.0, 50.0],
        "method": "numeric_exact",
    },
}
SCENARIOS = tuple(DEFAULTS)
LIST_KEYS = {"times", "v1s", "factors", "hermitian_probes", "omega0s"}
INT_KEYS = {"n_x", "n_t", "n_bins", "n_centers"}
STR_KEYS = {"method"}


@dataclass(frozen=True)
class ScenarioSpec:
    scenario: str
    params: dict = field(default_factory=dict)
    output_path: str = ""

    def to_dict(self) -> dict:
        return {"scenario": self.scenario, "params": dict(self.params), "output_path": self.output_path}


def _coerce(key: str, value, problems: list[str]):
    if key in STR_KEYS:
        return str(value)
    if key in LIST_KEYS:
        seq = value if isinstance(value, (list, tuple)) else [value]
        try:
            out = [float(v) for v in seq]
        except (TypeError, ValueError):
            problems.append(f"{key}: expected a list of numbers")
            return value
        if not out or not all(math.isfinite(v) for v in out):
            problems.append(f"{key}: values must be finite and non-empty")
        return out
    if isinstance(value, bool):
        problems.append(f"{key}: expected a number")
        return value
    try:
        v = float(value)
    except (TypeError, ValueError):
        problems.append(f"{key}: expected a number, got {value!r}")
        return value
    if not math.isfinite(v):
        problems.append(f"{key}: must be finite")
    if key in INT_KEYS:
        if v != int(v) or v < 1:
            problems.append(f"{key}: expected a positive integer")
        return int(v)
    return v


def resolve_spec(raw: dict, force_scenario: str | None = None) -> ScenarioSpec:
    """Validate a raw mapping (JSON object or key-value file) and fill defaults.

    Accepted layouts: ``{"scenario", "output_path", "params": {...}}`` or the
    same keys flattened.  Unknown keys, missing required keys and non-finite
    numbers are collected into one SpecError.
    """
    raw = dict(raw)
    problems = []
    name = raw.pop("scenario", force_scenario)
    if force_scenario is not None and name != force_scenario:
        problems.append(f"scenario: expected {force_scenario!r}, got {name!r}")
    if name is None:
        problems.append("scenario: missing")
    elif name not in DEFAULTS:
        problems.append(f"scenario: unknown {name!r} (choose from {', '.join(SCENARIOS)})")
    out = raw.pop("output_path", None)
    if out is None:
        problems.append("output_path: missing")
    params = raw.pop("params", {})
    if not isinstance(params, dict):
        problems.append("params: expected a mapping")
        params = {}
    params = {**raw, **params}
    resolved = {}
    if name in DEFAULTS:
        unknown = sorted(set(params) - set(DEFAULTS[name]))
        if unknown:
            problems.append(f"unknown parameter(s) for {name}: {', '.join(unknown)}")
        for key, default in DEFAULTS[name].items():
            resolved[key] = _coerce(key, params.get(key, default), problems)
        if name == "sweep" and resolved.get("method") not in {m.value for m in Method} - {"numeric_grid"}:
            problems.append("method: choose analytic_saddle or numeric_exact")
    if problems:
        raise SpecError("; ".join(problems))
    return ScenarioSpec(name, resolved, str(out))


def load_spec(path, force_scenario: str | None = None) -> ScenarioSpec:
    return resolve_spec(io.load_mapping(path), force_scenario)


# -- scenarios -------------------------------------------------------------------


def _onset(m: MediumParams, s: SourceParams) -> float:
    """Distance beyond which the plateau 1/(2 v1) sets in: sqrt(2)|k0|/v1."""
    k0 = derive_wave(m, s, 1.0).k0
    return math.sqrt(2) * abs(k0) / m.v1 if m.v1 > 0 else math.inf


def _fig1(p: dict, out: Path) -> tuple[list[str], dict]:
    m, s = MediumParams(p["v1"]), SourceParams(p["omega0"])
    xs = np.linspace(p["x_min"], p["x_max"], p["n_x"])
    f = evaluate_field(m, s, xs, p["times"])
    io.write_field_csv(f, out / "fig1_density_vs_x.csv")
    k0 = derive_wave(m, s, 1.0).k0
    peaks = []
    for j, t in enumerate(p["times"]):
        try:
            xp = spatial_peak(lambda y, t=t: exact_psi(m, s, y, t), (p["x_min"], p["x_max"]))
        except NoInteriorMaximumError:
            xp = math.nan
        peaks.append({"t": t, "peak_x": xp, "predicted_x": 2 * abs(k0) * t,
                      "peak_density": abs(exact_psi(m, s, xp, t)) ** 2 if math.isfinite(xp) else math.nan})
    return ["fig1_density_vs_x.csv"], {"spatial_peaks": peaks}


def _fig2(p: dict, out: Path) -> tuple[list[str], dict]:
    ts = np.linspace(p["t_min"], p["t_max"], p["n_t"])
    files, rows = [], []
    for i, v1 in enumerate(p["v1s"]):
        m, s = MediumParams(v1), SourceParams(p["omega0"])
        f = evaluate_field(m, s, [p["x"]], ts)
        name = f"fig2_density_vs_t_{i}.csv"
        io.write_field_csv(f, out / name)
        files.append(name)
        t_peak = tau_T(m, s, p["x"])
        rows.append({"v1": v1, "tau_T": t_peak, "peak_density": abs(exact_psi(m, s, p["x"], t_peak)) ** 2,
                     "file": name})
    order = np.argsort(p["v1s"])
    taus = [rows[i]["tau_T"] for i in order]
    dens = [rows[i]["peak_density"] for i in order]
    return files, {
        "curves": rows,
        "peak_earlier_with_v1": bool(np.all(np.diff(taus) < 0)),
        "peak_lower_with_v1": bool(np.all(np.diff(dens) < 0)),
    }


def fig3a_x_list(p: dict, v1: float) -> np.ndarray:
    m, s = MediumParams(v1), SourceParams(p["omega0"])
    x_max = max(p["x_max_floor"], p["x_max_factor"] * _onset(m, s)) if v1 > 0 else p["x_max_floor"]
    return np.geomspace(p["x_min"], x_max, p["n_x"])


def _fig3a(p: dict, out: Path) -> tuple[list[str], dict]:
    files, curves = [], []
    for i, v1 in enumerate(p["v1s"]):
        m, s = MediumParams(v1), SourceParams(p["omega0"])
        c = tau_T_curve(m, s, fig3a_x_list(p, v1))
        name = f"fig3a_tauT_vs_x_{i}.csv"
        io.write_times_csv(c.times, out / name)
        files.append(name)
        good = [ct for ct in c.times if ct is not None]
        curves.append({
            "v1": v1, "file": name, "basin": c.basin, "basin_x": c.basin_x, "basin_depth": c.basin_depth,
            "plateau": m.survival_time, "tau_T_last": good[-1].tau_T if good else math.nan,
            "failed_points": sum(st != "ok" for st in c.status),
        })
    return files, {"curves": curves}


def _shutter_probes(p: dict, v1: float) -> tuple[list[float], float]:
    if v1 == 0:
        return list(p["hermitian_probes"]), p["hermitian_t_max"]
    m, s = MediumParams(v1), SourceParams(p["k0"] ** 2)
    on = _onset(m, s)
    return [f * on for f in p["factors"]], p["t_max_factor"] / (2 * v1)


def shutter_run(p: dict, v1: float, out: Path | None = None, tag: str = "") -> dict:
    """One grid shutter run at the scenario's probes; returns per-probe rows
    and optionally writes probe CSV, times CSV, run config and manifest."""
    m = MediumParams(v1)
    s = SourceParams(p["k0"] ** 2)
    probes, t_max = _shutter_probes(p, v1)
    grid = plan_shutter_grid(p["k0"], probes, t_max, p["dx"],
                             edge=AbsorbingLayer(p["edge_width"], p["edge_strength"]))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        f = shutter_evolve(m, p["k0"], grid, k_cut=p["k_cut"])
    notes = sorted({str(w.message) for w in caught if issubclass(w.category, (ContaminationWarning, RuntimeWarning))})
    rows, times = [], []
    t_min = 0.2 * (1 / (2 * v1) if v1 > 0 else t_max)
    for i, x in enumerate(f.x_samples):
        try:
            tp = probe_peak_time(f.t_samples, f.values[i], t_min=t_min)
        except NoInteriorMaximumError:
            tp = math.nan
        d = derive_wave(m, s, float(x))
        times.append(CharacteristicTimes(float(x), d.tau_c, d.tau_abs, tp, m.survival_time, Method.NUMERIC_GRID))
        rows.append({"x": float(x), "tau_T": tp, "tau_T_times_2v1": tp * 2 * v1 if v1 > 0 else math.nan,
                     "asymptotic_tau_T": _asymptotic_peak(m, p["k0"], float(x), t_max)})
    run = {"v1": v1, "probes": rows, "audit": f.meta["audit"], "warnings": notes}
    if out is not None:
        io.write_field_csv(f, out / f"shutter_probes{tag}.csv")
        io.write_times_csv(times, out / f"shutter_times{tag}.csv")
        cfg = {**grid.to_flat(), "k0": p["k0"], "v1": v1, "cutoff": m.cutoff, "k_cut": p["k_cut"]}
        (out / f"shutter_run{tag}.cfg").write_text(io.dump_kv(cfg))
        io.write_json({"parameters": cfg, "scheme": grid.scheme, "scheme_order": f.meta["audit"]["order"],
                       "audit": f.meta["audit"]}, out / f"shutter_manifest{tag}.json")
        run["files"] = [f"shutter_probes{tag}.csv", f"shutter_times{tag}.csv",
                        f"shutter_run{tag}.cfg", f"shutter_manifest{tag}.json"]
    return run


def _asymptotic_peak(m: MediumParams, k0: float, x: float, t_max: float) -> float:
    r = minimize_scalar(lambda t: -abs(shutter_asymptotic_psi(m, k0, x, t)), bounds=(1e-3 * t_max, t_max),
                        method="bounded", options={"xatol": 1e-8 * t_max})
    return float(r.x)


def _fig3b(p: dict, out: Path) -> tuple[list[str], dict]:
    files, runs = [], []
    for i, v1 in enumerate(p["v1s"]):
        run = shutter_run(p, v1, out, tag=f"_{i}")
        files += run.pop("files")
        runs.append(run)
    return files, {"runs": runs}


def _spectrogram(p: dict, out: Path) -> tuple[list[str], dict]:
    m, s = MediumParams(p["v1"]), SourceParams(p["omega0"])
    x = p["x"]
    t_peak = tau_T(m, s, x)
    half = 0.5 * p["span"] * p["window"]
    predicted = 1 + (x * p["v1"]) ** 2
    sp = spectrogram(lambda t: exact_psi(m, s, x, t), x, p["window"], (t_peak - half, t_peak + half),
                     p["n_bins"], p["n_centers"], predicted_offset=predicted - 1)
    io.write_spectrogram_csv(sp, out / "spectrogram.csv")
    dom = sp.dominant_frequency(t_peak)
    return ["spectrogram.csv"], {
        "tau_T": t_peak, "dominant_frequency": dom, "predicted_frequency": predicted,
        "bin_width": sp.bin_width, "within_bin": abs(dom - predicted) <= sp.bin_width,
    }


def sweep_rows(p: dict, progress: Callable[[str], None] | None = None) -> list[dict]:
    rows = []
    for v1 in p["v1s"]:
        for w0 in p["omega0s"]:
            m, s = MediumParams(v1), SourceParams(w0)
            on = _onset(m, s)
            for fct in p["factors"]:
                x = fct * on
                try:
                    t = tau_T(m, s, x, p["method"])
                except (NoInteriorMaximumError, ArithmeticError):
                    t = math.nan
                rows.append({"v1": v1, "omega0": w0, "factor": fct, "x": x, "tau_T": t,
                             "tau_T_times_2v1": 2 * v1 * t})
                if progress:
                    progress(f"v1={v1} omega0={w0} factor={fct} tau_T*2v1={2 * v1 * t:.6f}")
    return rows


def _sweep(p: dict, out: Path) -> tuple[list[str], dict]:
    rows = sweep_rows(p)
    times = []
    for r in rows:
        m, s = MediumParams(r["v1"]), SourceParams(r["omega0"])
        d = derive_wave(m, s, r["x"])
        times.append(CharacteristicTimes(r["x"], d.tau_c, d.tau_abs, r["tau_T"], m.survival_time, Method(p["method"])))
    io.write_times_csv(times, out / "sweep.csv")
    return ["sweep.csv"], {"points": rows}


RUNNERS = {
    "fig1_density_vs_x": _fig1,
    "fig2_density_vs_t": _fig2,
    "fig3a_tauT_vs_x": _fig3a,
    "fig3b_shutter_tauT": _fig3b,
    "spectrogram": _spectrogram,
    "sweep": _sweep,
}


def run_scenario(spec: ScenarioSpec, base: Path | None = None) -> dict:
    """Execute ``spec``; relative output paths resolve against ``base`` (cwd by default)."""
    out = Path(spec.output_path)
    if not out.is_absolute() and base is not None:
        out = Path(base) / out
    out.mkdir(parents=True, exist_ok=True)
    files, features = RUNNERS[spec.scenario](dict(spec.params), out)
    summary = {"spec": spec.to_dict(), "files": files, "features": features}
    io.write_json(summary, out / "summary.json")
    return summary
