"""Compare the compiled kernels against the NumPy fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]

Times three workloads on each available backend and checks that both give
the same answers:

* IPF of the no-three-factor model on a random 6x5x4 table
* IPF of the four-cycle model on a random 4x4x4x4 table
* chi2_sf over a 1000-point (x, df) grid
"""
import argparse
import timeit

import numpy as np

from gllm import _pykernels, kernels
from gllm.fit import _flat_index


def ipf_problem(shape, generators, seed):
    rng = np.random.default_rng(seed)
    counts = rng.integers(1, 40, size=shape).astype(float).ravel()
    maps, observed = [], []
    for axes in generators:
        idx, size = _flat_index(shape, axes)
        maps.append(idx)
        observed.append(np.bincount(idx, weights=counts, minlength=size))
    return counts.size, maps, observed


def run_ipf(impl, problem):
    n, maps, observed = problem
    fitted = np.ones(n)
    cycles, _ = impl.ipf_loop(fitted, maps, observed, 1e-10, 1000)
    return cycles, fitted


def run_gamma(impl, grid):
    return np.array([impl.gammainc_pq(df / 2.0, x / 2.0)[1] for x, df in grid])


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = {"python": _pykernels}
    compiled = kernels.compiled_module()
    if compiled is not None:
        backends["cython"] = compiled
    else:
        print("compiled kernels not built; timing the fallback only")

    workloads = {
        "ipf 6x5x4 [12][13][23]": (run_ipf, ipf_problem((6, 5, 4), [(0, 1), (0, 2), (1, 2)], 1)),
        "ipf 4x4x4x4 [12][23][34][14]": (
            run_ipf, ipf_problem((4, 4, 4, 4), [(0, 1), (1, 2), (2, 3), (0, 3)], 2)),
        "chi2_sf 1000 points": (
            run_gamma, [(x, df) for x in np.linspace(0.1, 100, 50) for df in range(1, 21)]),
    }

    print(f"{'workload':32s} " + " ".join(f"{name:>12s}" for name in backends) + "   speedup")
    for label, (func, data) in workloads.items():
        times, results = {}, {}
        for name, impl in backends.items():
            results[name] = func(impl, data)
            times[name] = min(timeit.repeat(lambda: func(impl, data), number=1, repeat=args.repeat))
        if len(results) == 2:
            a, b = results["python"], results["cython"]
            if isinstance(a, tuple):
                assert a[0] == b[0], "cycle counts differ"
                np.testing.assert_allclose(a[1], b[1], rtol=1e-12)
            else:
                np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-300)
        cols = " ".join(f"{times[n] * 1e3:10.2f}ms" for n in backends)
        speed = f"{times['python'] / times['cython']:8.1f}x" if "cython" in times else ""
        print(f"{label:32s} {cols} {speed}")


if __name__ == "__main__":
    main()
