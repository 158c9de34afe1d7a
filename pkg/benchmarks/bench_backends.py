"""Compare the compiled kernels with the numpy fallback.

Times each kernel on the same inputs, reports the largest relative
difference, then times one end-to-end solve per backend in a subprocess
(the backend is fixed at import).

    python benchmarks/bench_backends.py [--size 200000] [--repeat 3] [--csv out.csv]
"""
import argparse
import csv
import os
import subprocess
import sys
import time

import numpy as np

from meshless_helm import _fallback
from meshless_helm._backend import compiled_available

END_TO_END = """
import time
from meshless_helm._backend import BACKEND
from meshless_helm.catalog import Options, run_disk
start = time.perf_counter()
res = run_disk({"rbf": "gaussian", "c": 3.82, "n": 14, "delta": 0.2, "N": 40}, Options())
print(BACKEND, time.perf_counter() - start, res["max"])
"""


def best_of(fun, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        out = fun()
        times.append(time.perf_counter() - start)
    return min(times), out


def rel_diff(a, b):
    a, b = np.asarray(a), np.asarray(b)
    scale = np.maximum(np.abs(b), 1e-300)
    return float(np.max(np.abs(a - b) / scale))


def kernel_cases(size, rng):
    from meshless_helm.geometry import Disk, lattice
    from meshless_helm.particular import ParticularPlan
    from meshless_helm.rbf import Rbf
    from meshless_helm.specialfn import WaveNumber

    x = np.ascontiguousarray(10.0 ** rng.uniform(-3, 2, size))
    plan = ParticularPlan(lattice(Disk(), 14, 0.5, 0.2), Rbf.gaussian(3.82),
                          WaveNumber.modified(1.0))
    tab = plan.table
    rho = np.ascontiguousarray(rng.uniform(0.0, tab.top, size // 4))
    radial = (rho, tab.breaks, tab.inner_cum, tab.tail_cum) + tuple(tab._args())
    # k0e only serves arguments above the series crossover
    large = np.ascontiguousarray(x[x > _fallback.K0_CROSSOVER])
    return {"j0": (x,), "y0": (x,), "i0": (np.minimum(x, 700.0),), "k0": (x,), "k0e": (large,),
            "radial_integrals": radial}


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--size", type=int, default=200_000)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--csv", help="also write results to this CSV file")
    parser.add_argument("--skip-solve", action="store_true", help="kernels only")
    args = parser.parse_args(argv)

    if not compiled_available():
        print("compiled kernels are not built; nothing to compare", file=sys.stderr)
        return 1
    from meshless_helm import _speedups

    rng = np.random.default_rng(12345)
    rows = []
    for name, inputs in kernel_cases(args.size, rng).items():
        t_py, out_py = best_of(lambda: getattr(_fallback, name)(*inputs), args.repeat)
        t_c, out_c = best_of(lambda: getattr(_speedups, name)(*inputs), args.repeat)
        if name == "radial_integrals":
            diff = max(rel_diff(out_c[0], out_py[0]), rel_diff(out_c[1], out_py[1]))
        else:
            diff = rel_diff(out_c, out_py)
        rows.append((name, len(inputs[0]), t_py, t_c, t_py / t_c, diff))

    if not args.skip_solve:
        for pure in ("0", "1"):
            env = dict(os.environ, MESHLESS_HELM_PURE_PYTHON=pure)
            res = subprocess.run([sys.executable, "-c", END_TO_END], env=env, check=True,
                                 capture_output=True, text=True)
            backend, secs, err = res.stdout.split()
            rows.append((f"solve_disk[{backend}]", 1, float(secs), float("nan"), float("nan"),
                         float(err)))

    header = ("case", "size", "python_s", "compiled_s", "speedup", "max_rel_diff_or_error")
    print(f"{header[0]:<24}{header[1]:>9}{header[2]:>12}{header[3]:>12}{header[4]:>9}{header[5]:>24}")
    for r in rows:
        print(f"{r[0]:<24}{r[1]:>9}{r[2]:>12.4f}{r[3]:>12.4f}{r[4]:>9.1f}{r[5]:>24.3e}")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
