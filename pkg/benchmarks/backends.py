"""Compare the compiled kernels against the pure numpy fallback.

Run as `python3 benchmarks/backends.py`.  Times the three kernel
entry points on representative workloads and prints a small table.
"""
from __future__ import annotations

import time

import numpy as np

from tagmax import _kernels_py
from tagmax.dataset import SyntheticSpec, generate_synthetic
from tagmax.nbc import Query, SmoothingSpec, TagSelection, query_arrays, train

try:
    from tagmax import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


def best_of(fn, reps: int = 3) -> float:
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> None:
    ds = generate_synthetic(SyntheticSpec(n=1000, m=16, r=8, seed=7))
    model = train(ds, SmoothingSpec())
    sels = tuple(TagSelection(tag=i) for i in range(8))
    Query(selections=sels, k=1).validate(model)
    base, step, w, des = query_arrays(model, sels)
    m = model.m

    rng = np.random.default_rng(0)
    starts = [int(v) for v in rng.integers(0, 1 << m, size=64, dtype=np.uint64)]
    coords = np.clip(rng.random((20000, 2)), 0.01, 0.99)
    order = np.argsort(-coords.sum(axis=1)).astype(np.int64)

    workloads = {
        "enumerate_totals (m=16, z=8)":
            lambda k: k.enumerate_totals(base, step, w, des, m),
        "climb x64 (m=16, z=8)":
            lambda k: [k.climb(base, step, w, des, m, s, 10 * m) for s in starts],
        "compress (20k pts, sigma=0.05)":
            lambda k: k.compress(coords, order, 0.05),
    }

    backends = [("pure", _kernels_py)]
    if _kernels_c is not None:
        backends.append(("compiled", _kernels_c))

    print(f"{'workload':34} " + " ".join(f"{name:>12}" for name, _ in backends)
          + ("      speedup" if _kernels_c is not None else ""))
    for label, fn in workloads.items():
        times = [best_of(lambda k=kern: fn(k)) for _, kern in backends]
        row = f"{label:34} " + " ".join(f"{t * 1000:10.2f}ms" for t in times)
        if len(times) == 2 and times[1] > 0:
            row += f"  {times[0] / times[1]:9.1f}x"
        print(row)
    if _kernels_c is None:
        print("compiled backend not built; showing pure only")


if __name__ == "__main__":
    main()
