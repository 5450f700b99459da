"""Time the compiled and pure-Python kernels on the per-shot hot path.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from rydpeierls import _kernels_py, geometry, model
from rydpeierls.model import MEASURED_PARAMS

try:
    from rydpeierls import _kernels
except ImportError:
    _kernels = None


def best(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = {"python": _kernels_py}
    if _kernels is not None:
        backends["cython"] = _kernels
    else:
        print("compiled kernels not built; timing the pure-Python backend only")

    print(f"{'kernel':<28}{'size':>8}" + "".join(f"{name:>14}" for name in backends) + f"{'speedup':>10}")
    for n in (3, 4, 5, 6):
        layout = geometry.regular_polygon(n, 11.0)
        hop = model.hop_tensor(layout, MEASURED_PARAMS)
        onsite = np.array([-MEASURED_PARAMS.mu / 2, MEASURED_PARAMS.mu / 2])
        number = max(1, 2000 // 3**n)
        times = {name: best(lambda m=m: m.exchange_hamiltonian(n, hop, onsite, 0.0), args.repeat, number) for name, m in backends.items()}
        report("exchange_hamiltonian", f"n={n}", times)

    rng = np.random.default_rng(0)
    for n, T in ((3, 201), (3, 2001), (6, 2001)):
        p = rng.random((T, 2**n))
        p /= p.sum(axis=1, keepdims=True)
        u, uf = rng.random(T), rng.random((T, n))
        times = {name: best(lambda m=m: m.sample_detect(p, u, uf, 0.05, 0.05), args.repeat, 50) for name, m in backends.items()}
        report("sample_detect", f"{n}x{T}", times)


def report(name, size, times):
    cells = "".join(f"{t * 1e6:>11.1f} us" for t in times.values())
    speedup = f"{times['python'] / times['cython']:>9.1f}x" if "cython" in times else ""
    print(f"{name:<28}{size:>8}{cells}{speedup}")


if __name__ == "__main__":
    main()
