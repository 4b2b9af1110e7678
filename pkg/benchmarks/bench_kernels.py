"""Time the compiled and pure-Python kernel backends on the same inputs.

    python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import random
import string
import timeit

import numpy as np

from htk import kernels
from htk.taxonomy import load_default_taxonomy


def _workloads(seed):
    rng = random.Random(seed)
    chars = string.ascii_letters[:8] + "-"
    pairs = [("".join(rng.choices(chars, k=rng.randint(1, 12))), "".join(rng.choices(chars, k=rng.randint(1, 12))))
             for _ in range(5000)]
    nrng = np.random.default_rng(seed)
    depths = []
    for _ in range(5000):
        d = int(nrng.integers(2, 9))
        inner = sorted(set(int(x) for x in nrng.integers(1, 99, size=d - 1)))
        depths.append([x / 100 for x in inner] + [1.0])
    depth_pairs = list(zip(depths[::2], depths[1::2]))
    labels = load_default_taxonomy().labels
    k = 61
    lower = np.tril(nrng.uniform(0.1, 1.0, size=(k, k))) + np.eye(k)
    rhs = nrng.normal(size=k)
    return pairs, depth_pairs, labels, lower, rhs


def run(repeat=5, seed=0):
    pairs, depth_pairs, labels, lower, rhs = _workloads(seed)
    cases = {
        "levenshtein x5000": lambda m: [m.levenshtein(a, b) for a, b in pairs],
        "levenshtein_to_many x200": lambda m: [m.levenshtein_to_many(lab, labels) for lab in labels * 2],
        "iou_1d x2500": lambda m: [m.iou_1d(a, b) for a, b in depth_pairs],
        "forward_substitute 61x61 x200": lambda m: [m.forward_substitute(lower, rhs) for _ in range(200)],
    }
    backends = kernels.available_backends()
    rows = []
    for name, fn in cases.items():
        times = {b: min(timeit.repeat(lambda: fn(mod), number=1, repeat=repeat)) for b, mod in backends.items()}
        rows.append((name, times))
    return rows, sorted(backends)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rows, names = run(args.repeat, args.seed)
    print(f"active backend: {kernels.BACKEND}")
    header = f"{'kernel':32s}" + "".join(f"{n + ' (ms)':>14s}" for n in names)
    if "cython" in names:
        header += f"{'speedup':>10s}"
    print(header)
    for name, times in rows:
        line = f"{name:32s}" + "".join(f"{times[n] * 1e3:14.2f}" for n in names)
        if "cython" in names:
            line += f"{times['python'] / times['cython']:9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
