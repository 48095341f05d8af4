"""Compare the compiled and numpy kernels on desk-scale rasters.

    python benchmarks/bench_kernels.py [--size 1024] [--bands 7] [--classes 8] [--repeat 3]
"""
import argparse
import time

import numpy as np

from tmlandcover import kernels


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=1024)
    ap.add_argument("--bands", type=int, default=7)
    ap.add_argument("--classes", type=int, default=8)
    ap.add_argument("--repeat", type=int, default=3)
    a = ap.parse_args()

    rng = np.random.default_rng(0)
    n = a.size * a.size
    pixels = np.ascontiguousarray(rng.uniform(0, 255, (a.bands, n)))
    means = np.ascontiguousarray(rng.uniform(0, 255, (a.classes, a.bands)))
    lows = np.ascontiguousarray(means - 40.0)
    highs = np.ascontiguousarray(means + 40.0)
    valid = np.ones(n, dtype=np.uint8)

    backends = {"python": kernels.get_backend("python")}
    try:
        backends["cython"] = kernels.get_backend("cython")
    except ImportError:
        print("compiled kernels not built; timing numpy fallback only")

    cases = {
        "hash_uniforms": lambda m: m.hash_uniforms(1, 0, n, a.bands),
        "nearest_mean": lambda m: m.nearest_mean(pixels, means, valid),
        "box_classify/nearest": lambda m: m.box_classify(pixels, lows, highs, means, valid, 0),
        "box_classify/first": lambda m: m.box_classify(pixels, lows, highs, means, valid, 1),
    }
    print(f"{a.size}x{a.size} pixels, {a.bands} bands, {a.classes} classes, best of {a.repeat}")
    print(f"{'kernel':<22}" + "".join(f"{name:>12}" for name in backends) + "     speedup")
    for label, fn in cases.items():
        t = {name: best_of(lambda: fn(m), a.repeat) for name, m in backends.items()}
        row = f"{label:<22}" + "".join(f"{t[name]:>11.3f}s" for name in backends)
        if "cython" in t:
            row += f"  {t['python'] / t['cython']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
