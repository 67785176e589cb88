"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Each row runs the same inputs through every available backend and checks
the outputs agree before reporting the timings.
"""

import argparse
import time

import numpy as np

from qcnoise import kernels
from qcnoise.bernoulli import make_rng, sample_bits
from qcnoise.exact import pmf_by_weight
from qcnoise.ring import RingElement, inverse, support


def cases():
    n = 18
    t = RingElement.from_support(n, [0, 1, 3, 5, 11])
    inv = np.array(support(inverse(t)), dtype=np.int64)
    supp = np.array(support(t), dtype=np.int64)
    pmf = pmf_by_weight(n, 2.0)
    yield f"pushforward n={n}", lambda k: k.pushforward(n, inv, pmf)
    yield f"enumerate_image n={n}", lambda k: k.enumerate_image(n, supp, pmf)

    m = 11
    flat = np.array([0, 1, 2, 4, 5, 6], dtype=np.int64)
    offs = np.array([0, 3, 6], dtype=np.int64)
    pmf2 = pmf_by_weight(2 * m, 2.0)
    yield f"enumerate_sum n={m} s=2", lambda k: k.enumerate_sum(m, flat, offs, pmf2)

    vec = np.random.default_rng(0).random(1 << 20)
    yield "fwht 2^20", lambda k: k.fwht(vec.copy())

    R = sample_bits(2.0, (2, 4096, 1024), make_rng(0))
    bflat = np.array([0, 3, 17, 200, 511, 1, 9, 40, 700, 1000], dtype=np.int64)
    boffs = np.array([0, 5, 10], dtype=np.int64)
    yield "noise_bits 4096 x 1024, tau=10", lambda k: k.noise_bits(R, bflat, boffs)


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - start)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    names = kernels.available()
    print(f"backends: {', '.join(names)}")
    print(f"{'kernel':34s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, fn in cases():
        times, outs = [], []
        for name in names:
            sec, out = best_of(lambda: fn(kernels.get(name)), args.repeat)
            times.append(sec)
            outs.append(out)
        for other in outs[1:]:
            assert np.allclose(outs[0], other, rtol=0, atol=1e-12), label
        row = f"{label:34s}" + "".join(f"{t * 1e3:10.1f}ms" for t in times)
        if len(names) > 1:
            row += f"{times[names.index('python')] / times[names.index('cython')]:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
