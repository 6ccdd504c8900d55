"""Time the compiled and pure-Python kernels on the same inputs.

    python benchmarks/bench_kernels.py [--repeat 5]

Each kernel runs on both backends, outputs are checked for equality, and the
best-of-N wall time is printed with the speedup.
"""

import argparse
import timeit

import numpy as np

from binae.binvec import make_rng
from binae.kernels import KWTA, THRESHOLD, backends


def cases(rng):
    rows = rng.integers(0, 2**63, size=(20_000, 4), dtype=np.uint64)
    x = rng.integers(0, 2**63, size=4, dtype=np.uint64)
    n_x, n_y = 20, 30
    masks = np.array([sum(1 << int(i) for i in rng.choice(n_x, 7, replace=False)) for _ in range(n_y)],
                     dtype=np.uint64)
    codes = np.arange(1 << 16, dtype=np.uint64)
    upper = rng.integers(0, 1 << n_x, size=(n_y, n_x), dtype=np.uint64)
    return {
        "and_popcount_rows 20000x256": lambda m: m.and_popcount_rows(rows, x),
        "xor_popcount_rows 20000x256": lambda m: m.xor_popcount_rows(rows, x),
        "project_codes kwta 2^16": lambda m: m.project_codes(masks, codes, KWTA, 10),
        "project_codes threshold 2^16": lambda m: m.project_codes(masks, codes, THRESHOLD, 3),
        "project_codes_pairwise kwta 2^16": lambda m: m.project_codes_pairwise(upper, codes, KWTA, 10),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    found = backends()
    if "cython" not in found:
        print("compiled backend not built; only the fallback is available")
    print(f"{'kernel':36s} " + " ".join(f"{n:>10s}" for n in found) + "   speedup")
    for name, fn in cases(make_rng(0)).items():
        outs = {n: fn(m) for n, m in found.items()}
        first = next(iter(outs.values()))
        assert all(np.array_equal(first, o) for o in outs.values()), name
        times = {n: min(timeit.repeat(lambda m=m: fn(m), number=1, repeat=args.repeat)) for n, m in found.items()}
        speed = f"{times['python'] / times['cython']:8.1f}x" if "cython" in times else ""
        print(f"{name:36s} " + " ".join(f"{t * 1e3:8.2f}ms" for t in times.values()) + f"  {speed}")


if __name__ == "__main__":
    main()
