"""Plot the CSV output of a scenario run directory (reads summary.json).

    python scripts/plot_scenario.py runs/fig2 --out fig2.png
"""
import argparse
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from forerunner.io import read_field_csv, read_json, read_times_csv


def plot_fields(ax, run: Path, files, along: str):
    for name in files:
        f = read_field_csv(run / name)
        if along == "x":
            for j, t in enumerate(f.t_samples):
                ax.plot(f.x_samples, f.density[:, j], label=f"t = {t:g}")
            ax.set_xlabel("x")
        else:
            ax.plot(f.t_samples, f.density[0], label=name)
            ax.set_xlabel("t")
    ax.set_ylabel("|psi|^2")
    ax.legend()


def plot_times(ax, run: Path, files, labels):
    for name, label in zip(files, labels):
        rows = read_times_csv(run / name)
        xs = [r["x"] for r in rows]
        ax.plot(xs, [r["tau_T"] for r in rows], "o-", ms=3, label=label)
        plateau = rows[0]["plateau"]
        if math.isfinite(plateau):
            ax.axhline(plateau, ls=":", color=ax.lines[-1].get_color())
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("x")
    ax.set_ylabel("tau_T")
    ax.legend()


def plot_spectrogram(ax, run: Path):
    data = np.loadtxt(run / "spectrogram.csv", delimiter=",", skiprows=1)
    tc = np.unique(data[:, 0])
    power = data[:, 2].reshape(tc.size, -1)
    om = data[: power.shape[1], 1]
    ax.pcolormesh(tc, om, power.T, shading="auto")
    ax.set_xlabel("window centre t")
    ax.set_ylabel("omega")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("run_dir", type=Path)
    ap.add_argument("--out", type=Path, default=None)
    args = ap.parse_args()
    summary = read_json(args.run_dir / "summary.json")
    scenario = summary["spec"]["scenario"]
    files = summary["files"]
    fig, ax = plt.subplots(figsize=(6, 4))
    if scenario == "fig1_density_vs_x":
        plot_fields(ax, args.run_dir, files, "x")
    elif scenario == "fig2_density_vs_t":
        plot_fields(ax, args.run_dir, files, "t")
    elif scenario == "fig3a_tauT_vs_x":
        plot_times(ax, args.run_dir, files, [f"v1 = {c['v1']:g}" for c in summary["features"]["curves"]])
    elif scenario == "fig3b_shutter_tauT":
        times = [f for f in files if f.startswith("shutter_times")]
        plot_times(ax, args.run_dir, times, [f"v1 = {r['v1']:g}" for r in summary["features"]["runs"]])
    elif scenario == "spectrogram":
        plot_spectrogram(ax, args.run_dir)
    else:
        plot_times(ax, args.run_dir, files, [scenario])
    ax.set_title(scenario)
    fig.tight_layout()
    out = args.out or args.run_dir / f"{scenario}.png"
    fig.savefig(out, dpi=150)
    print(out)


if __name__ == "__main__":
    main()
