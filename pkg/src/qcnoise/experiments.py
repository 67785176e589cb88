"""Seeded Monte-Carlo harness for noise weights at any n.

Trials are cut into fixed chunks of ``CHUNK`` draws; chunk k always uses the
Philox stream (seed, k).  Results therefore do not depend on the number of
worker threads, only on (spec, trials, seed).
"""

from __future__ import annotations

import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _jsonio, kernels
from .bernoulli import make_rng, sample_bits, sample_poly
from .bounds import expected_weight
from .exact import DEFAULT_CAP_N, NoiseSpec, ResourceError, dist_sum, DistTable, tv
from .ring import RingElement, mul

CHUNK = 4096
DEFAULT_SEED = 20240601


def sample_noise(spec: NoiseSpec, rng: np.random.Generator) -> RingElement:
    """One draw of t_1 R_1 + ... + t_s R_s."""
    acc = RingElement(spec.n, 0)
    for t in spec.ts:
        acc = acc + mul(t, sample_poly(spec.omega, spec.n, rng))
    return acc


def sample_noise_batch(spec: NoiseSpec, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` draws as a (count, n) uint8 coefficient array.

    Consumes the generator exactly like ``count`` successive
    :func:`sample_noise` calls when count == 1.
    """
    R = sample_bits(spec.omega, (spec.s, count, spec.n), rng)
    flat, offsets = spec.flat_supports()
    return kernels.active().noise_bits(R, flat, offsets)


def _chunks(trials: int):
    return [(k, min(CHUNK, trials - start)) for k, start in enumerate(range(0, trials, CHUNK))]


def _run_chunks(fn, trials: int, threads: int | None):
    jobs = _chunks(trials)
    threads = threads or os.cpu_count() or 1
    if threads == 1 or len(jobs) == 1:
        return [fn(k, size) for k, size in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda job: fn(*job), jobs))


@dataclass(frozen=True)
class WeightStats:
    n: int
    trials: int
    seed: int
    mean: float
    variance: float
    histogram: dict[int, int]
    expected_mean: float
    z_score: float

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "trials": self.trials,
            "seed": self.seed,
            "mean": self.mean,
            "variance": self.variance,
            "expected_mean": self.expected_mean,
            "z_score": self.z_score,
            "histogram": {str(w): c for w, c in sorted(self.histogram.items())},
        }

    def to_json(self) -> str:
        return _jsonio.dumps(self.to_dict())

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key in ("n", "trials", "seed", "mean", "variance", "expected_mean", "z_score"):
            val = getattr(self, key)
            buf.write(f"# {key}={format(val, '.17g') if isinstance(val, float) else val}\n")
        buf.write("weight,count\n")
        for w, c in sorted(self.histogram.items()):
            buf.write(f"{w},{c}\n")
        return buf.getvalue()


def _stats_from_histogram(spec: NoiseSpec, counts: np.ndarray, trials: int, seed: int) -> WeightStats:
    w = np.arange(counts.size)
    # integer moments keep the summary independent of merge order
    s1 = int((w * counts).sum())
    s2 = int((w * w * counts).sum())
    mean = Fraction(s1, trials)
    var = Fraction(trials * s2 - s1 * s1, trials * (trials - 1)) if trials > 1 else Fraction(0)
    expected = expected_weight(spec.n, spec.tau, spec.omega)
    diff = float(mean) - expected
    if var > 0:
        z = diff / math.sqrt(float(var) / trials)
    else:
        z = 0.0 if abs(diff) <= 1e-12 * max(1.0, expected) else math.copysign(math.inf, diff)
    hist = {int(k): int(c) for k, c in enumerate(counts) if c}
    return WeightStats(spec.n, trials, seed, float(mean), float(var), hist, expected, z)


def weight_experiment(spec: NoiseSpec, trials: int, seed: int = DEFAULT_SEED,
                      threads: int | None = None) -> WeightStats:
    """Weight statistics of i.i.d. noise draws against n p(tau w)."""
    if trials < 1:
        raise ValueError("trials must be >= 1")

    def run(k, size):
        bits = sample_noise_batch(spec, size, make_rng(seed, k))
        return np.bincount(bits.sum(axis=1, dtype=np.int64), minlength=spec.n + 1)

    counts = sum(_run_chunks(run, trials, threads))
    return _stats_from_histogram(spec, counts, trials, seed)


def coordinate_frequencies(spec: NoiseSpec, trials: int, seed: int = DEFAULT_SEED,
                           threads: int | None = None) -> np.ndarray:
    """Per-coordinate count of ones over ``trials`` draws (same streams as weight_experiment)."""

    def run(k, size):
        return sample_noise_batch(spec, size, make_rng(seed, k)).sum(axis=0, dtype=np.int64)

    return sum(_run_chunks(run, trials, threads))


def empirical_table(spec: NoiseSpec, trials: int, seed: int = DEFAULT_SEED,
                    threads: int | None = None, cap_n: int = DEFAULT_CAP_N) -> DistTable:
    n = spec.n
    if n > cap_n:
        raise ResourceError(f"n = {n} exceeds the enumeration cap {cap_n}")
    place = (1 << np.arange(n, dtype=np.int64))

    def run(k, size):
        bits = sample_noise_batch(spec, size, make_rng(seed, k))
        return np.bincount(bits.astype(np.int64) @ place, minlength=1 << n)

    counts = sum(_run_chunks(run, trials, threads))
    return DistTable(n, counts / trials)


def empirical_tv(spec: NoiseSpec, trials: int, seed: int = DEFAULT_SEED,
                 threads: int | None = None, cap_n: int = DEFAULT_CAP_N) -> float:
    """TV between sampled frequencies and the exact law (sampler validation)."""
    emp = empirical_table(spec, trials, seed, threads, cap_n)
    return tv(emp, dist_sum(spec, cap_n=cap_n))
