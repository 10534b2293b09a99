"""Regenerate bessel_oracle.npz: 40-digit mpmath values rounded once to double.

    python tests/data/make_bessel_oracle.py
"""
from __future__ import annotations

import math
from multiprocessing import Pool
from pathlib import Path

import mpmath as mp
import numpy as np

OUT = Path(__file__).with_name("bessel_oracle.npz")


def points():
    rng = np.random.default_rng(1)
    unscaled = np.sort(np.exp(rng.uniform(math.log(1e-3), math.log(30.0), 10_000)))
    scaled = np.concatenate([np.linspace(1e-3, 30.0, 400), np.linspace(30.0, 700.0, 1600)])
    return unscaled, scaled


def row(z):
    mp.mp.dps = 40
    x = mp.mpf(float(z))
    i0, i1, k0, k1 = mp.besseli(0, x), mp.besseli(1, x), mp.besselk(0, x), mp.besselk(1, x)
    e = mp.exp(x)
    return [float(v) for v in (i0, i1, k0, k1, i0 / e, i1 / e, k0 * e, k1 * e)]


def main():
    unscaled, scaled = points()
    with Pool() as pool:
        a = np.array(pool.map(row, unscaled, chunksize=200))
        b = np.array(pool.map(row, scaled, chunksize=200))
    np.savez_compressed(OUT, z=unscaled, unscaled=a[:, :4], z_scaled=scaled, scaled=b[:, 4:])


if __name__ == "__main__":
    main()
