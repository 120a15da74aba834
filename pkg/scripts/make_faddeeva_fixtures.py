"""Write tests/data/faddeeva_fixtures.txt: w(z) at 50-digit precision (mpmath)
on points covering every evaluation region and both half-planes."""
import argparse
from pathlib import Path

import mpmath as mp
import numpy as np

from forerunner.io import write_fixture_table


def reference_w(z: complex) -> complex:
    zz = mp.mpc(z.real, z.imag)
    return complex(mp.exp(-zz * zz) * mp.erfc(-1j * zz))


def fixture_points() -> list[complex]:
    pts = [0j, 1j, 1 + 0j, 2 + 3j, 10 - 2j, -3.5 + 0.25j]
    for r in (1e-6, 0.3, 0.49, 0.51, 3.0, 7.9, 8.1, 50.0, 999.0, 1001.0, 1e5):
        for ang in np.linspace(-0.45 * np.pi, 1.45 * np.pi, 9):
            z = r * complex(np.cos(ang), np.sin(ang))
            if z.imag < 0 and (z.imag**2 - z.real**2) > 600:
                continue  # exp(-z^2) outside double range
            pts.append(z)
    return pts


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parents[1] / "tests/data/faddeeva_fixtures.txt")
    args = ap.parse_args()
    mp.mp.dps = 50
    zs = fixture_points()
    write_fixture_table(zs, [reference_w(z) for z in zs], args.out)
    print(f"wrote {len(zs)} points to {args.out}")


if __name__ == "__main__":
    main()
