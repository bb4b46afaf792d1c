#!/usr/bin/env python3
"""Micro-benchmark: masked regional attention vs dense attention.

Correctness lives in the test suite; this only reports wall-clock cost of the
mask assembly and the masked softmax at engine-realistic sizes.
"""

import os
import sys
import time

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from wordcraft.attention import (  # noqa: E402
    AttentionTensors,
    TokenLayout,
    assemble_mask,
    dense_attention_reference,
    masked_mma,
    resolve_regions,
)


def bench(fn, repeats=50):
    fn()  # warmup
    start = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - start) / repeats * 1e3


def main():
    rng = np.random.default_rng(0)
    rows = cols = 8
    for n_regions, d_k, heads in ((2, 16, 4), (4, 16, 4), (2, 64, 8)):
        base_len, region_len = 1, 2
        layout = TokenLayout.build((rows, cols), base_len,
                                   [region_len] * n_regions)
        labels = rng.integers(0, n_regions + 1, size=(rows, cols))
        regions = resolve_regions(
            [labels == k for k in range(1, n_regions + 1)], grid=(rows, cols))
        s = layout.total
        tensors = AttentionTensors(*(rng.normal(size=(heads, s, d_k))
                                     for _ in range(3)))
        mask = assemble_mask(layout, regions)

        t_assemble = bench(lambda: assemble_mask(layout, regions))
        t_masked = bench(lambda: masked_mma(tensors, mask))
        t_dense = bench(lambda: dense_attention_reference(
            tensors.q, tensors.k, tensors.v))
        print(f"S={s:4d} N={n_regions} heads={heads} d_k={d_k:3d}  "
              f"assemble {t_assemble:7.3f} ms   masked {t_masked:7.3f} ms   "
              f"dense {t_dense:7.3f} ms")


if __name__ == "__main__":
    main()
