"""Time the numba and pure-numpy backends on the hot kernels.

Each backend runs in its own interpreter because the backend is fixed at
import time by ``PMCLEV_DISABLE_NUMBA``. Results are checked for agreement
and printed as a table.

    python benchmarks/bench_backends.py [--repeat N]
"""
import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from pmclev import BACKEND, kernels, oracle
from pmclev.materials import SIC
from pmclev.specfun import hankel2_logderiv

repeat = int(sys.argv[1])
kind, p = SIC.kernel_params()
prof = oracle.discretize_profile(100.0, 1e-6, 120e-9, n_layers=10000)
k0 = np.linspace(1e6, 1.6e7, 50)
kp = 0.5 * k0
cases = {
    "casimir_integral": lambda: kernels.casimir_integral(kind, p, 6e-7)[0],
    "matsubara_sums_300K": lambda: kernels.matsubara_sums(kind, p, 6e-7, 0.0493)[0],
    "hankel2_logderiv_x100": lambda: sum(hankel2_logderiv(nu, 3.0).real for nu in np.linspace(0.5, 50.0, 100)),
    "tmm_rs_grid_50pts": lambda: complex(kernels.tmm_rs_grid(prof.layer_eps, prof.thicknesses,
                                                             prof.terminal_eps, k0, kp).sum()),
}
out = {"backend": BACKEND, "cases": {}}
for name, fn in cases.items():
    value = fn()  # warm-up (and compilation)
    t = time.perf_counter()
    for _ in range(repeat):
        fn()
    out["cases"][name] = {"seconds": (time.perf_counter() - t) / repeat, "value": [complex(value).real, complex(value).imag]}
print(json.dumps(out))
"""


def run_backend(disable, repeat):
    env = dict(os.environ, PMCLEV_DISABLE_NUMBA="1" if disable else "0")
    res = subprocess.run([sys.executable, "-c", WORKER, str(repeat)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(res.stdout.strip().splitlines()[-1])


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    fast = run_backend(False, args.repeat)
    slow = run_backend(True, args.repeat)
    print(f"{'kernel':<24}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}  agree")
    for name, a in fast["cases"].items():
        b = slow["cases"][name]
        va, vb = complex(*a["value"]), complex(*b["value"])
        agree = abs(va - vb) <= 1e-9 * max(abs(va), abs(vb))
        print(f"{name:<24}{a['seconds']:>12.3e}{b['seconds']:>12.3e}"
              f"{b['seconds'] / a['seconds']:>10.1f}  {agree}")


if __name__ == "__main__":
    main()
