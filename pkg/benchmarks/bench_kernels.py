"""Benchmark: numba kernels vs the pure-python/numpy fallback.

Runs the same workloads twice in subprocesses — once with numba enabled
and once with DNAOTP_DISABLE_NUMBA=1 — and prints a speedup table.
Workload sizes are chosen so the fallback finishes in seconds.

Usage:  python3 benchmarks/bench_kernels.py
"""

from __future__ import annotations

import json
import os
import subprocess
import sys

WORKER = r"""
import json, os, time
import numpy as np

results = {}

def bench(name, fn, repeat=3):
    fn()                                 # warm-up (JIT compile)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    results[name] = min(times)

from dnaotp.backends import backend_name
from dnaotp.entropy import suffix, predictors
from dnaotp.pipeline.align import _banded_nw
from dnaotp.reconcile.bch import BchCode
from dnaotp.molsim.bias import SynthesisBias

rng = np.random.default_rng(42)

bits = rng.integers(0, 2, 100_000).astype(np.uint8)
bench("suffix_array_100k", lambda: suffix.TupleStats(bits))
bench("multi_mmc_100k", lambda: predictors.multi_mmc_predict(bits))
bench("lz78y_100k", lambda: predictors.lz78y_predict(bits))
bench("multi_mcw_100k", lambda: predictors.multi_mcw_predict(bits))

ref = rng.integers(0, 4, 342).astype(np.uint8)
read = ref.copy()
bench("banded_nw_200", lambda: [_banded_nw(ref, read, 12) for _ in range(200)])

code = BchCode(m=10, t=20)
msg = rng.integers(0, 2, code.k).astype(np.uint8)
word = code.encode(msg)
bad = word.copy(); bad[:20] ^= 1
bench("bch_decode_50", lambda: [code.decode(bad) for _ in range(50)])

bias = SynthesisBias.nanopore_like(70)
r2 = np.random.default_rng(1)
bench("bias_sample_20k", lambda: bias.sample(20_000, r2))

print(json.dumps({"backend": backend_name(), "results": results}))
"""


def run(disable: bool) -> dict:
    env = dict(os.environ)
    env["DNAOTP_DISABLE_NUMBA"] = "1" if disable else "0"
    out = subprocess.run([sys.executable, "-c", WORKER], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main():
    fast = run(disable=False)
    slow = run(disable=True)
    print(f"{'kernel':<20} {'numba (s)':>12} {'fallback (s)':>14} {'speedup':>9}")
    print("-" * 58)
    for name, t_fast in fast["results"].items():
        t_slow = slow["results"][name]
        print(f"{name:<20} {t_fast:>12.4f} {t_slow:>14.4f} "
              f"{t_slow / t_fast:>8.1f}x")


if __name__ == "__main__":
    main()
