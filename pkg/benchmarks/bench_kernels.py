"""Compare the compiled and pure-numpy monomial kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both kernels are imported from the same module; the numpy one is always
available as ``monomial_values_numpy``.  The end-to-end timing of a distance
search is measured in a subprocess per backend, since the backend is chosen
at import time from ``DISCDIST_BACKEND``.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from discdist import _accel
from discdist.algebra import exponent_array

CASES = [(2, 6, 2000), (3, 4, 2000), (3, 6, 2000), (4, 6, 1000), (3, 6, 50)]

E2E = """
import time
from discdist.families import revolution_poly
from discdist.algebra import normalized
from discdist.distance import distance_bombieri
P = normalized(revolution_poly(6))
distance_bombieri(P)
t = time.perf_counter()
for _ in range(3):
    distance_bombieri(P)
print((time.perf_counter() - t) / 3)
"""


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--no-e2e", action="store_true")
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"backend available: {_accel.backend_name()}")
    print(f"{'n':>2} {'d':>2} {'points':>6} {'numpy ms':>9} {'numba ms':>9} {'speedup':>8}")
    for n, d, m in CASES:
        E = exponent_array(n, d)
        X = rng.standard_normal((m, n))
        ref = _accel.monomial_values_numpy(E, X)
        t_np = best_of(lambda: _accel.monomial_values_numpy(E, X), args.repeat)
        if _accel.HAVE_NUMBA:
            out = _accel.monomial_values(E, X)  # compile outside the timing
            assert np.allclose(out, ref, rtol=1e-13, atol=0)
            t_nb = best_of(lambda: _accel.monomial_values(E, X), args.repeat)
            print(f"{n:>2} {d:>2} {m:>6} {1e3 * t_np:9.3f} {1e3 * t_nb:9.3f} {t_np / t_nb:8.2f}")
        else:
            print(f"{n:>2} {d:>2} {m:>6} {1e3 * t_np:9.3f} {'-':>9} {'-':>8}")
    if args.no_e2e:
        return
    print("\nend-to-end distance search, P_6 (s per call):")
    for backend in ("numpy", "numba"):
        env = {**os.environ, "DISCDIST_BACKEND": backend}
        out = subprocess.run([sys.executable, "-c", E2E], env=env, capture_output=True, text=True, check=True)
        print(f"  {backend:6s} {float(out.stdout.strip()):.4f}")


if __name__ == "__main__":
    main()
