"""Time the hot kernels under numba and under the numpy fallback.

Each backend runs in its own interpreter because the choice is fixed at
import time by ``DOIFORGE_DISABLE_NUMBA``.

    python benchmarks/bench_backends.py [--repeat 5]
"""
import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from doiforge import _backend

repeat = int(sys.argv[1])
rng = np.random.default_rng(0)
cases = {}

def timed(name, fn):
    t0 = time.perf_counter()
    fn()  # first call includes JIT compilation under numba
    first = time.perf_counter() - t0
    runs = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        runs.append(time.perf_counter() - t0)
    cases[name] = {"first": first, "median": float(np.median(runs))}

for n in (8, 32):
    x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    A = 0.5 * (x + x.conj().T)
    timed(f"jacobi_eigh n={n}", lambda A=A: _backend.jacobi_eigh(A, 100, 1e-14))

t_w = rng.standard_normal(12001)
s = np.linspace(-40, 40, 2001)
timed("fourier_trapezoid 12001x2001", lambda: _backend.fourier_trapezoid(-60.0, 0.01, t_w, s))

t = np.linspace(-100, 100, 20001)
f = t / np.sqrt(1 + t * t)
timed("holder_max 2000 pts band 64", lambda: _backend.holder_max(t, f, 0.5, 10, 64))

print(json.dumps({"backend": _backend.BACKEND, "cases": cases}))
"""


def run(flag, repeat):
    env = dict(os.environ, DOIFORGE_DISABLE_NUMBA=flag)
    out = subprocess.run([sys.executable, "-c", WORKER, str(repeat)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    fast, slow = run("0", args.repeat), run("1", args.repeat)
    if fast["backend"] != "numba":
        print("numba is not importable; both columns use numpy")
    print(f"{'kernel':32s} {'numba':>11s} {'numpy':>11s} {'speedup':>8s} {'jit':>8s}")
    for name, a in fast["cases"].items():
        b = slow["cases"][name]
        print(f"{name:32s} {a['median'] * 1e3:9.2f}ms {b['median'] * 1e3:9.2f}ms "
              f"{b['median'] / a['median']:7.1f}x {a['first']:7.2f}s")


if __name__ == "__main__":
    main()
