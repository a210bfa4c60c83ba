"""Time the numba kernels against the pure-numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 20] [--orl /root/data/orl]

With ``--orl`` the full leave-one-out run is also timed under each backend,
each in a fresh interpreter so the DOMWAVE_NO_NUMBA flag takes effect.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from domwave import _kernels_numba as nb
from domwave import _kernels_numpy as npk
from domwave.wavelet import _gather_index, make_wavelet


def best_of(fn, repeat):
    fn()  # warm-up, includes numba compilation
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    rng = np.random.default_rng(0)
    spec = make_wavelet("db4")
    # a band of 5 modules: 80 rows of 16 samples, as in one ORL band pass
    rows = rng.normal(size=(80, 16))
    idx = _gather_index(16, len(spec.dec_lo), spec.boundary)
    a, d = npk.analysis(rows, spec.dec_lo, spec.dec_hi, idx)
    band = rng.integers(0, 256, size=16 * 92).astype(float)
    templates = rng.normal(size=(399, 120))
    offsets = np.arange(0, 400, 10)
    offsets[-1] = 399
    test = rng.normal(size=120)
    return {
        "analysis 80x16 db4": lambda m: m.analysis(rows, spec.dec_lo, spec.dec_hi, idx),
        "synthesis 80x8 db4": lambda m: m.synthesis(a, d, spec.rec_lo, spec.rec_hi, 16),
        "entropy 16x92 band": lambda m: m.histogram_entropy(band, 0.0, 256.0, 256),
        "class distances 40x~10x120": lambda m: m.class_distances(templates, offsets, test),
    }


def end_to_end(root):
    code = (
        "import time; from domwave.imageio import load_dataset; from domwave.config import load_profile;"
        "from domwave.harness import leave_one_out; from domwave import kernels;"
        f"ds = load_dataset({str(root)!r}); t = time.perf_counter();"
        "r = leave_one_out(ds, load_profile('orl'));"
        "print(kernels.BACKEND, round(time.perf_counter() - t, 2), r.correct)"
    )
    for flag in ("0", "1"):
        env = dict(os.environ, DOMWAVE_NO_NUMBA=flag)
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        backend, seconds, correct = out.stdout.split()
        print(f"leave-one-out ORL  {backend:>6}: {float(seconds):8.2f} s  ({correct}/400 correct)")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--orl", help="ORL root for an end-to-end timing")
    args = ap.parse_args()

    print(f"{'kernel':<28}{'numpy us':>12}{'numba us':>12}{'speedup':>10}")
    for name, call in cases().items():
        t_np = best_of(lambda: call(npk), args.repeat)
        t_nb = best_of(lambda: call(nb), args.repeat)
        print(f"{name:<28}{t_np * 1e6:12.1f}{t_nb * 1e6:12.1f}{t_np / t_nb:10.1f}x")
    if args.orl:
        end_to_end(args.orl)


if __name__ == "__main__":
    main()
