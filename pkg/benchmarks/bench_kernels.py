"""Numba versus pure-numpy timings for the accelerated kernels.

    python benchmarks/bench_kernels.py [--repeat 3]

Both variants are called directly, so one process measures both regardless
of MATTERWAVE_NO_NUMBA.  The first numba call (compilation or cache load)
is excluded; the largest relative difference between the two outputs is
printed next to the timings.
"""
import argparse
import time

import numpy as np

from matterwave import greens, specfun
from matterwave.propagators import FieldConfig


def best_of(fn, repeat):
    ts = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        ts.append(time.perf_counter() - t0)
    return min(ts), out


def rel_diff(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300))


def cases():
    x = np.linspace(-40.0, 40.0, 200_000)
    yield ("airy (2e5 points)",
           lambda: specfun._airy_array_nb(x, True),
           lambda: specfun._airy_array_np(x, True))

    rng = np.random.default_rng(0)
    pts = np.column_stack([rng.uniform(-2, 2, 300), rng.uniform(-2, 2, 300), rng.uniform(-4, -1, 300)])
    fz = FieldConfig(force=(0, 0, -0.5), b_field=1.0, mass=1.0)
    geo = [np.ascontiguousarray(g) for g in greens._landau_geometry(pts, (0, 0, 0), fz)]
    args = (2.3, 1e-5, fz.mass, fz.omega_c, fz.force_parallel, 1e-10, 400000, False)
    yield ("landau sum, F || B (300 points)",
           lambda: greens._landau_many_nb(*geo, *args)[0],
           lambda: greens._landau_many_np(*geo, *args)[0])

    f0 = FieldConfig(b_field=1.0, mass=1.0)
    geo0 = [np.ascontiguousarray(g) for g in greens._landau_geometry(pts, (0, 0, 0), f0)]
    args0 = (2.3, 1e-3, f0.mass, f0.omega_c, 0.0, 1e-10, 400000, False)
    yield ("landau sum, B only (300 points)",
           lambda: greens._landau_many_nb(*geo0, *args0)[0],
           lambda: greens._landau_many_np(*geo0, *args0)[0])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    print(f"{'kernel':34s} {'numba [s]':>10s} {'numpy [s]':>10s} {'speedup':>8s} {'max rel diff':>13s}")
    for name, nb, np_ in cases():
        nb()  # compile / load cache
        t_nb, a = best_of(nb, args.repeat)
        t_np, b = best_of(np_, args.repeat)
        print(f"{name:34s} {t_nb:10.4f} {t_np:10.4f} {t_np / t_nb:8.1f} {rel_diff(a, b):13.2e}")


if __name__ == "__main__":
    main()
