"""Compare the compiled and numpy backends of the windowed heat sums.

Run with ``python3 benchmarks/bench_kernels.py``.  The workload mirrors the
nonlinear-term quadrature: a few thousand sorted atoms in several groups,
evaluated on a dense line of points with a finite window.
"""

from __future__ import annotations

import argparse
import math
import timeit

import numpy as np

from capwiener import _kernels


def workload(n_atoms: int, n_points: int, ngroups: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    atoms = np.sort(rng.uniform(-1.0, 1.0, n_atoms))
    weights = rng.uniform(0.0, 1.0, n_atoms) / n_atoms
    groups = rng.integers(0, ngroups, n_atoms)
    y = np.linspace(-3.0, 3.0, n_points)
    return y, atoms, weights, groups


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    backends = ["python"] + (["cython"] if _kernels._ext is not None else [])
    print(f"{'atoms':>7} {'points':>7} {'groups':>6} {'s':>7} " + " ".join(f"{b + ' ms':>10}" for b in backends)
          + f" {'speedup':>8} {'max diff':>9}")
    for n_atoms, n_points, ngroups, s in [(256, 2000, 1, 1e-2), (2048, 4000, 4, 1e-3),
                                          (8192, 8000, 8, 1e-4), (8192, 8000, 8, 1e-2)]:
        y, a, w, g = workload(n_atoms, n_points, ngroups)
        cut = 9.0 * math.sqrt(s)
        times, outs = {}, {}
        for b in backends:
            outs[b] = _kernels.gauss_sums_1d(y, a, w, g, ngroups, s, cut, backend=b)
            times[b] = min(timeit.repeat(lambda: _kernels.gauss_sums_1d(y, a, w, g, ngroups, s, cut, backend=b),
                                         number=1, repeat=args.repeat)) * 1e3
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        diff = (float(np.max(np.abs(outs["python"] - outs["cython"]))) if "cython" in outs else float("nan"))
        print(f"{n_atoms:7d} {n_points:7d} {ngroups:6d} {s:7.0e} "
              + " ".join(f"{times[b]:10.2f}" for b in backends) + f" {speed:8.1f} {diff:9.1e}")
    if "cython" not in backends:
        print("compiled backend not built; only the numpy fallback was timed")


if __name__ == "__main__":
    main()
