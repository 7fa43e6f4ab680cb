"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--sizes 64 128 256] [--repeat 3]
"""
import argparse
import time

import numpy as np

from xpjost import _fallback

try:
    from xpjost import _kernels
except ImportError:
    _kernels = None


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def hermitian(n, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (X + X.conj().T)


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[64, 128, 256])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    impls = [("python", _fallback)]
    if _kernels is not None:
        impls.append(("compiled", _kernels))
    else:
        print("compiled extension not available; timing the fallback only")

    print(f"{'kernel':<24}{'backend':<10}{'seconds':>12}")
    for n in args.sizes:
        A = hermitian(n)
        ref = np.linalg.eigvalsh(A)
        for name, mod in impls:
            t = best_of(lambda: mod.jacobi_hermitian(A, 1e-12, 60), args.repeat)
            w = np.sort(mod.jacobi_hermitian(A, 1e-12, 60)[0])
            err = np.max(np.abs(w - ref))
            print(f"{'jacobi n=%d' % n:<24}{name:<10}{t:>12.4f}   max|dw| {err:.1e}")

    s = 0.5 + 1j * np.linspace(10, 500, 2000)
    k = np.arange(1, 4001, dtype=float)
    logs = np.log(k)
    coef = np.where(k % 2 == 0, -1.0, 1.0)
    for name, mod in impls:
        t = best_of(lambda: mod.dirichlet_sum(s, logs, coef), args.repeat)
        print(f"{'dirichlet 2000x4000':<24}{name:<10}{t:>12.4f}")


if __name__ == "__main__":
    main()
