"""Time the numba kernels against their fallback paths.

Run:  python benchmarks/bench_kernels.py [--quick]

Representative results (numba 0.66, numpy 2.2, containerized x86):

    kernel         n_calls  numba     fallback    speedup
    scan_keys         2000  0.010     0.145       14.7x
    merge_pass        2000  0.086     6.073       70.3x
    nearest              5  0.041     0.352       8.7x
    markov_fill          3  0.008     0.023       3.0x
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from vbpe import _kernels
from vbpe.grid import TokenGrid
from vbpe.layout import IdLayout
from vbpe.markov import coupled_source
from vbpe.train import TrainerConfig, train


def timed(fn, *args, repeat=1):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_scan(grids, n_ids, n_calls):
    def run(impl):
        t0 = time.perf_counter()
        for tg in grids[:n_calls]:
            impl(tg.tok, tg.anc_r, tg.anc_c, tg.sh_r, tg.sh_c, n_ids)
        return time.perf_counter() - t0

    return run(_kernels.scan_keys_jit), run(_kernels.scan_keys_numpy)


def bench_merge(grids, rules, n_calls):
    def run(impl):
        work = [tg.copy() for tg in grids[:n_calls]]
        t0 = time.perf_counter()
        for tg in work:
            for left, right, horizontal, new_id in rules:
                impl(
                    tg.tok, tg.anc_r, tg.anc_c, tg.sh_r, tg.sh_c,
                    left, right, horizontal, new_id,
                )
        return time.perf_counter() - t0

    return run(_kernels.merge_pass_jit), run(_kernels.merge_pass_python)


def bench_nearest(rng, n_calls):
    pts = rng.normal(size=(4096, 16))
    cb = np.ascontiguousarray(rng.normal(size=(256, 16)))

    def run(impl):
        t0 = time.perf_counter()
        for _ in range(n_calls):
            impl(pts, cb)
        return time.perf_counter() - t0

    return run(_kernels.nearest_jit), run(_kernels.nearest_numpy)


def bench_markov(rng, n_calls):
    src = coupled_source(8, 0.85, seed=0)
    cum = np.cumsum(src.transition_right, axis=1)
    cum[:, -1] = 1.125
    u = rng.random((500, 16, 16))

    def run(impl):
        t0 = time.perf_counter()
        for _ in range(n_calls):
            impl(u, cum, cum)
        return time.perf_counter() - t0

    return run(_kernels.markov_fill_jit), run(_kernels.markov_fill_numpy)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true", help="smaller call counts")
    args = ap.parse_args()

    if _kernels.merge_pass_jit is None:
        raise SystemExit("numba is not importable; nothing to compare")

    rng = np.random.default_rng(0)
    layout = IdLayout(n_text=0, base_k=8, ext_size=64)
    corpus = [rng.integers(0, 8, size=(16, 16)) for _ in range(2000)]
    res = train(corpus[:200], 8, TrainerConfig(48, seed=0), layout=layout)
    grids = [TokenGrid.from_base(g, layout) for g in corpus]
    for tg in grids:
        for rule in res.vocab.merges[:16]:
            _kernels.merge_pass_jit(
                tg.tok, tg.anc_r, tg.anc_c, tg.sh_r, tg.sh_c,
                rule.left, rule.right, rule.orientation == "horizontal", rule.new_id,
            )
    rules = [
        (r.left, r.right, r.orientation == "horizontal", r.new_id)
        for r in res.vocab.merges[16:]
    ]

    n = 200 if args.quick else 2000
    rows = [
        ("scan_keys", n, *bench_scan(grids, layout.total_ids, n)),
        ("merge_pass", n, *bench_merge(grids, rules, n)),
        ("nearest", 2 if args.quick else 5, *bench_nearest(rng, 2 if args.quick else 5)),
        ("markov_fill", 1 if args.quick else 3, *bench_markov(rng, 1 if args.quick else 3)),
    ]

    print(f"{'kernel':<14}{'n_calls':>8}  {'numba':<10}{'fallback':<12}{'speedup'}")
    for name, calls, jit_t, fb_t in rows:
        print(f"{name:<14}{calls:>8}  {jit_t:<10.3f}{fb_t:<12.3f}{fb_t / jit_t:.1f}x")


if __name__ == "__main__":
    main()
