"""How fast the shutter peak time approaches the plateau 1/(2 v1).

Uses the stationary-phase shutter field (validated against the grid runs in
the test suite) to tabulate tau_T * 2 v1 against the probe distance in onset
units F = x / (sqrt(2) |k0| / v1) and finds the distance where the excess
drops to ``--target``, with the carrier wavenumber x / (2 t) ~ x v1 that a grid
has to resolve there.
"""
import argparse
import math

from scipy.optimize import brentq, minimize_scalar

from forerunner.grid import shutter_asymptotic_psi
from forerunner.source import MediumParams, SourceParams, derive_wave


def peak_time(m, k0, x, t_hi):
    r = minimize_scalar(lambda t: -abs(shutter_asymptotic_psi(m, k0, x, t)), bounds=(1e-3 * t_hi, t_hi),
                        method="bounded", options={"xatol": 1e-9 * t_hi})
    return float(r.x)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k0", type=float, default=0.9)
    ap.add_argument("--v1", type=float, nargs="+", default=[0.01, 0.1])
    ap.add_argument("--factors", type=float, nargs="+", default=[5, 10, 20, 50, 100, 200, 500])
    ap.add_argument("--target", type=float, default=0.05)
    args = ap.parse_args()
    for v1 in args.v1:
        m = MediumParams(v1)
        onset = math.sqrt(2) * abs(derive_wave(m, SourceParams(args.k0**2), 1.0).k0) / v1
        ratio = lambda f: peak_time(m, args.k0, f * onset, 3 / (2 * v1)) * 2 * v1
        print(f"v1 = {v1}: onset = {onset:.6g}")
        for f in args.factors:
            print(f"  F = {f:7.1f}  x = {f * onset:12.6g}  tau_T*2v1 = {ratio(f):.6f}")
        need = math.exp(brentq(lambda lf: ratio(math.exp(lf)) - 1 - args.target, math.log(2), math.log(1e4), xtol=1e-6))
        print(f"  excess {args.target:g} reached at F = {need:.1f} (x = {need * onset:.6g}); "
              f"carrier k ~ {need * onset * v1:.4g}, and {4 * need * onset * v1:.4g} at 4x that distance")


if __name__ == "__main__":
    main()
