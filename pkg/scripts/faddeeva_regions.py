"""Accuracy sweep of faddeeva_w against mpmath on a polar grid.

Prints the worst relative error per evaluation region (series, rational,
continued fraction, asymptotic) separately for the two half-planes.
"""
import argparse
import cmath

import mpmath as mp
import numpy as np

from forerunner.faddeeva import (
    ASYMPTOTIC_RADIUS,
    RATIONAL_RADIUS,
    SERIES_RADIUS,
    FaddeevaOverflowError,
    faddeeva_w,
)

REGIONS = (
    ("series", 0.0, SERIES_RADIUS),
    ("rational", SERIES_RADIUS, RATIONAL_RADIUS),
    ("continued fraction", RATIONAL_RADIUS, ASYMPTOTIC_RADIUS),
    ("asymptotic", ASYMPTOTIC_RADIUS, 1e8),
)


def reference(z: complex) -> complex:
    zz = mp.mpc(z.real, z.imag)
    return complex(mp.exp(-zz * zz) * mp.erfc(-1j * zz))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-radii", type=int, default=12)
    ap.add_argument("--n-angles", type=int, default=24)
    ap.add_argument("--dps", type=int, default=40)
    args = ap.parse_args()
    mp.mp.dps = args.dps
    angles = np.linspace(-np.pi, np.pi, args.n_angles, endpoint=False) + 0.01
    print(f"{'region':<20} {'upper max rel':>15} {'lower max rel':>15} {'skipped':>8}")
    for name, lo, hi in REGIONS:
        worst = {True: 0.0, False: 0.0}
        skipped = 0
        for r in np.geomspace(max(lo, 1e-8) * 1.001, hi * 0.999, args.n_radii):
            for a in angles:
                z = cmath.rect(r, a)
                try:
                    w = faddeeva_w(z)
                except FaddeevaOverflowError:
                    skipped += 1
                    continue
                ref = reference(z)
                worst[z.imag >= 0] = max(worst[z.imag >= 0], abs(w - ref) / abs(ref))
        print(f"{name:<20} {worst[True]:>15.3e} {worst[False]:>15.3e} {skipped:>8d}")


if __name__ == "__main__":
    main()
