"""Exact laws of quasi-cyclic noise at desk scale.

A :class:`DistTable` is a probability vector over all 2^n elements of P_n,
indexed by the packed integer encoding of :mod:`qcnoise.ring`.
"""

from __future__ import annotations

import io
import math
import struct
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .bernoulli import INF, h_tilde, p
from .ring import (
    RingElement,
    degree,
    inverse,
    is_invertible,
    joint_gcd,
    poly_mul,
    rotate,
    support,
)

DEFAULT_CAP_N = 20
DEFAULT_CAP_DIRECT = 26
MAX_KERNEL_N = 63

_BIN_MAGIC = b"QCDT"
_BIN_VERSION = 1
# magic, version, n, entry count
_BIN_HEADER = struct.Struct("<4sIIQ")


class ResourceError(RuntimeError):
    """Requested table exceeds the configured enumeration cap."""


class PreconditionError(ValueError):
    """A bound was requested outside the hypotheses it is proved under."""


def _check_cap(n: int, cap_n: int) -> None:
    if n > min(cap_n, MAX_KERNEL_N):
        raise ResourceError(f"n = {n} exceeds the enumeration cap {cap_n} (2^n table)")


# -- data types -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DistTable:
    n: int
    probs: np.ndarray

    def __post_init__(self):
        probs = np.ascontiguousarray(self.probs, dtype=np.float64)
        if probs.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} entries, got {probs.shape}")
        probs.flags.writeable = False
        object.__setattr__(self, "probs", probs)

    def __getitem__(self, x) -> float:
        if isinstance(x, RingElement):
            x = x.bits
        return float(self.probs[x])

    def total(self) -> float:
        return math.fsum(self.probs.tolist())

    def marginal(self, k: int) -> tuple[float, float]:
        """(Pr[x_k = 0], Pr[x_k = 1])."""
        idx = np.arange(self.probs.size, dtype=np.int64)
        ones = math.fsum(self.probs[(idx >> k) & 1 == 1].tolist())
        zeros = math.fsum(self.probs[(idx >> k) & 1 == 0].tolist())
        return zeros, ones

    def pair_marginal(self, i: int, j: int) -> np.ndarray:
        """2x2 array of Pr[x_i = a, x_j = b]."""
        idx = np.arange(self.probs.size, dtype=np.int64)
        bi = (idx >> i) & 1
        bj = (idx >> j) & 1
        out = np.empty((2, 2))
        for a in (0, 1):
            for b in (0, 1):
                out[a, b] = math.fsum(self.probs[(bi == a) & (bj == b)].tolist())
        return out

    def mean_weight(self) -> float:
        w = np.bitwise_count(np.arange(self.probs.size, dtype=np.uint64)).astype(np.float64)
        return math.fsum((w * self.probs).tolist())

    def mass_on(self, members: np.ndarray) -> float:
        return math.fsum(self.probs[members].tolist())


@dataclass(frozen=True)
class NoiseSpec:
    n: int
    ts: tuple[RingElement, ...]
    omega: float

    def __post_init__(self):
        ts = tuple(self.ts)
        if not ts:
            raise ValueError("a noise spec needs at least one polynomial")
        for t in ts:
            if t.n != self.n:
                raise ValueError(f"polynomial of length {t.n} in a spec with n = {self.n}")
        if not self.omega >= 0:
            raise ValueError(f"omega must be >= 0, got {self.omega}")
        object.__setattr__(self, "ts", ts)

    @classmethod
    def from_supports(cls, n: int, supports: Sequence[Sequence[int]], omega: float) -> "NoiseSpec":
        return cls(n, tuple(RingElement.from_support(n, s) for s in supports), omega)

    @property
    def s(self) -> int:
        return len(self.ts)

    @property
    def tau(self) -> int:
        return sum(t.weight() for t in self.ts)

    @property
    def marginal_omega(self) -> float:
        """Exponent of every coordinate's marginal, tau * omega."""
        return scaled(self.tau, self.omega)

    def spanning(self) -> bool:
        return joint_gcd(self.ts) == 1

    def flat_supports(self) -> tuple[np.ndarray, np.ndarray]:
        supps = [support(t) for t in self.ts]
        offsets = np.cumsum([0] + [len(s) for s in supps]).astype(np.int64)
        flat = np.array([i for s in supps for i in s], dtype=np.int64)
        return flat, offsets


@dataclass(frozen=True)
class LambdaProfile:
    n: int
    values: tuple[int, ...]

    def __getitem__(self, d: int) -> int:
        return self.values[d % self.n]

    def __len__(self) -> int:
        return self.n


@dataclass(frozen=True, eq=False)
class PairTable:
    i: int
    j: int
    lam: int
    probs: np.ndarray

    def marginals(self) -> tuple[np.ndarray, np.ndarray]:
        return self.probs.sum(axis=1), self.probs.sum(axis=0)

    def entropy(self) -> float:
        return _entropy_of(self.probs.ravel())


@dataclass(frozen=True)
class APEntropyBound:
    value: float
    vacuous: bool
    n_is_prime: bool


def scaled(k: int, omega: float) -> float:
    """k * omega with the convention 0 * inf = 0 (k copies of a bit)."""
    return 0.0 if k == 0 else k * omega


# -- building tables --------------------------------------------------------

def pmf_by_weight(bits: int, omega: float) -> np.ndarray:
    """Pr[R = r] for R ~ Ber(omega)^bits, indexed by |r|."""
    q = p(omega)
    k = np.arange(bits + 1, dtype=np.float64)
    return np.power(q, k) * np.power(1.0 - q, bits - k)


def bernoulli_table(n: int, omega: float, cap_n: int = DEFAULT_CAP_N) -> DistTable:
    _check_cap(n, cap_n)
    w = np.bitwise_count(np.arange(1 << n, dtype=np.uint64))
    return DistTable(n, pmf_by_weight(n, omega)[w])


def ideal_table(n: int, tau: int, omega: float, cap_n: int = DEFAULT_CAP_N) -> DistTable:
    """Product law Ber(tau * omega)^n, the independent-coordinate model."""
    return bernoulli_table(n, scaled(tau, omega), cap_n)


def dist_tR(t: RingElement, omega: float, method: str = "auto",
            cap_n: int = DEFAULT_CAP_N) -> DistTable:
    """Law of t * R for R ~ Ber(omega)^n.

    ``method`` is ``"pushforward"`` (invertible t only: P(x) = Pr[R = t^-1 x]),
    ``"enumerate"`` (sum over all 2^n values of R) or ``"auto"``.
    """
    n = t.n
    _check_cap(n, cap_n)
    k = kernels.active()
    pmf_w = pmf_by_weight(n, omega)
    if method == "auto":
        method = "pushforward" if is_invertible(t) else "enumerate"
    if method == "pushforward":
        u = inverse(t)
        probs = k.pushforward(n, np.array(support(u), dtype=np.int64), pmf_w)
    elif method == "enumerate":
        probs = k.enumerate_image(n, np.array(support(t), dtype=np.int64), pmf_w)
    else:
        raise ValueError(f"unknown method {method!r}")
    return DistTable(n, probs)


def ideal_members(g: int, n: int) -> np.ndarray:
    """Packed encodings of every element of the ideal generated by g | X^n - 1."""
    dim = n - degree(g)
    members = np.zeros(1, dtype=np.int64)
    for k in range(dim):
        members = np.concatenate([members, members ^ poly_mul(g, 1 << k)])
    return members


def xor_convolve(tables: Sequence[DistTable]) -> DistTable:
    """Law of the XOR of independent variables with the given laws."""
    n = tables[0].n
    k = kernels.active()
    acc = None
    for tab in tables:
        if tab.n != n:
            raise ValueError("tables have different lengths")
        spec = k.fwht(np.array(tab.probs, dtype=np.float64))
        acc = spec if acc is None else acc * spec
    k.fwht(acc)
    acc /= float(1 << n)
    np.maximum(acc, 0.0, out=acc)
    return DistTable(n, acc)


def dist_sum(spec: NoiseSpec, method: str = "auto", cap_n: int = DEFAULT_CAP_N,
             cap_direct: int = DEFAULT_CAP_DIRECT) -> DistTable:
    """Law of t_1 R_1 + ... + t_s R_s with independent R_i ~ Ber(omega)^n.

    ``"convolution"`` (the default) XOR-convolves the per-term laws through a
    Walsh-Hadamard transform; ``"direct"`` enumerates all 2^(s n) inputs.
    """
    n = spec.n
    if method == "direct":
        if spec.s * n > cap_direct:
            raise ResourceError(f"s*n = {spec.s * n} exceeds the direct enumeration cap {cap_direct}")
        _check_cap(n, cap_n)
        flat, offsets = spec.flat_supports()
        probs = kernels.active().enumerate_sum(n, flat, offsets, pmf_by_weight(spec.s * n, spec.omega))
        return DistTable(n, probs)
    if method not in ("auto", "convolution"):
        raise ValueError(f"unknown method {method!r}")
    _check_cap(n, cap_n)
    terms = [t for t in spec.ts if t.bits]
    if not terms:
        probs = np.zeros(1 << n)
        probs[0] = 1.0
        return DistTable(n, probs)
    if len(terms) == 1:
        return dist_tR(terms[0], spec.omega, cap_n=cap_n)
    out = xor_convolve([dist_tR(t, spec.omega, cap_n=cap_n) for t in terms])
    g = joint_gcd(terms)
    if g != 1:
        # the transform leaves rounding dust outside the span; the law is exactly 0 there
        keep = np.zeros(1 << n, dtype=bool)
        keep[ideal_members(g, n)] = True
        probs = np.where(keep, out.probs, 0.0)
        out = DistTable(n, probs)
    return out


# -- information measures ---------------------------------------------------

def _entropy_of(probs: np.ndarray) -> float:
    nz = probs[probs > 0]
    return math.fsum((-nz * np.log2(nz)).tolist())


def _same_n(a: DistTable, b: DistTable) -> None:
    if a.n != b.n:
        raise ValueError(f"tables over different rings: n = {a.n} vs {b.n}")


def entropy(P: DistTable) -> float:
    return _entropy_of(P.probs)


def kl(P: DistTable, Q: DistTable) -> float:
    """D(P || Q) in bits; ``inf`` when P puts mass where Q has none."""
    _same_n(P, Q)
    pp, qq = P.probs, Q.probs
    live = pp > 0
    if np.any(qq[live] == 0):
        return INF
    return math.fsum((pp[live] * np.log2(pp[live] / qq[live])).tolist())


def tv(P: DistTable, Q: DistTable) -> float:
    _same_n(P, Q)
    return 0.5 * math.fsum(np.abs(P.probs - Q.probs).tolist())


# -- pairwise structure ------------------------------------------------------

def lambda_profile(spec: NoiseSpec) -> LambdaProfile:
    """lambda[d] = sum_l |supp(t_l) & supp(X^d t_l)|."""
    n = spec.n
    vals = []
    for d in range(n):
        vals.append(sum((t.bits & rotate(t.bits, d, n)).bit_count() for t in spec.ts))
    return LambdaProfile(n, tuple(vals))


def pair_table(spec: NoiseSpec, i: int, j: int, profile: LambdaProfile | None = None) -> PairTable:
    """Closed-form joint law of coefficients (C_i, C_j)."""
    n = spec.n
    if i % n == j % n:
        raise IndexError(f"pair indices must differ mod n, got ({i}, {j})")
    prof = profile or lambda_profile(spec)
    lam = prof[(i - j) % n]
    tau = spec.tau
    marg = p(scaled(tau, spec.omega))
    off = 0.5 * p(scaled(2 * (tau - lam), spec.omega))
    probs = np.array([[1.0 - marg - off, off], [off, marg - off]])
    probs.flags.writeable = False
    return PairTable(i % n, j % n, lam, probs)


def pair_entropy_bound(spec: NoiseSpec, d: int, profile: LambdaProfile | None = None) -> float:
    """h~(tau w) + h~(2 (tau - lambda[d]) w) >= H(C_i, C_{i+d}) (concavity)."""
    prof = profile or lambda_profile(spec)
    tau = spec.tau
    return h_tilde(scaled(tau, spec.omega)) + h_tilde(scaled(2 * (tau - prof[d]), spec.omega))


def pairing_entropy_bound(spec: NoiseSpec, step: int = 1) -> float:
    """Subadditivity bound from disjoint coefficient pairs.

    Pairs (0, a), (2a, 3a), ... for a = ``step`` coprime to n.  For odd n the
    last coefficient is left as a singleton; for even n every coefficient is
    paired.
    """
    n = spec.n
    if math.gcd(step, n) != 1:
        raise PreconditionError(f"step {step} is not coprime to n = {n}")
    prof = lambda_profile(spec)
    order = [(k * step) % n for k in range(n)]
    total = []
    for k in range(0, n - 1, 2):
        total.append(pair_table(spec, order[k], order[k + 1], prof).entropy())
    if n % 2:
        total.append(h_tilde(spec.marginal_omega))
    return math.fsum(total)


def is_arithmetic_progression(t: RingElement, a: int) -> bool:
    """True iff supp(t) = {a x + b mod n : 0 <= x < |t|} for some b."""
    n = t.n
    supp = set(support(t))
    w = len(supp)
    if w <= 1:
        return True
    return any({(b + a * x) % n for x in range(w)} == supp for b in supp)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % k for k in range(2, math.isqrt(n) + 1))


def check_ap_preconditions(spec: NoiseSpec, a: int) -> None:
    n = spec.n
    if n % 2 == 0:
        raise PreconditionError(f"n must be odd, got n = {n}")
    if math.gcd(a, n) != 1:
        raise PreconditionError(f"common difference a = {a} is not coprime to n = {n}")
    for k, t in enumerate(spec.ts):
        if not is_arithmetic_progression(t, a):
            raise PreconditionError(
                f"support of t_{k + 1} = {support(t)} is not an arithmetic progression with difference {a}"
            )


def total_entropy_bound_ap(spec: NoiseSpec, a: int) -> APEntropyBound:
    """(n-1)/2 (h~(tau w) + h~(2 s w)) + h~(tau w) >= H(C_0, ..., C_{n-1}).

    Valid when n is odd, gcd(a, n) = 1 and every support is an arithmetic
    progression with difference a.  It only beats the trivial n h~(tau w)
    when tau > 2 s; otherwise the result is flagged vacuous.
    """
    check_ap_preconditions(spec, a)
    n, s, tau, w = spec.n, spec.s, spec.tau, spec.omega
    ht = h_tilde(scaled(tau, w))
    value = (n - 1) / 2 * (ht + h_tilde(scaled(2 * s, w))) + ht
    return APEntropyBound(value, vacuous=tau <= 2 * s, n_is_prime=_is_prime(n))


# -- export -----------------------------------------------------------------

def to_csv(P: DistTable) -> str:
    buf = io.StringIO()
    buf.write("index,probability\n")
    for i, v in enumerate(P.probs.tolist()):
        buf.write(f"{i},{v:.17g}\n")
    return buf.getvalue()


def from_csv(text: str) -> DistTable:
    lines = text.strip().splitlines()
    if not lines or lines[0].strip() != "index,probability":
        raise ValueError("missing 'index,probability' header")
    rows = [line.split(",") for line in lines[1:]]
    size = len(rows)
    n = size.bit_length() - 1
    if size != 1 << n:
        raise ValueError(f"row count {size} is not a power of two")
    probs = np.empty(size)
    for k, (idx, val) in enumerate(rows):
        if int(idx) != k:
            raise ValueError(f"row {k} has index {idx}")
        probs[k] = float(val)
    return DistTable(n, probs)


def to_bytes(P: DistTable) -> bytes:
    """Header (magic 'QCDT', u32 version, u32 n, u64 count) then count LE f64."""
    head = _BIN_HEADER.pack(_BIN_MAGIC, _BIN_VERSION, P.n, P.probs.size)
    return head + P.probs.astype("<f8").tobytes()


def from_bytes(data: bytes) -> DistTable:
    if len(data) < _BIN_HEADER.size:
        raise ValueError("truncated table header")
    magic, version, n, count = _BIN_HEADER.unpack_from(data)
    if magic != _BIN_MAGIC or version != _BIN_VERSION:
        raise ValueError("not a qcnoise table dump")
    if count != 1 << n or len(data) != _BIN_HEADER.size + 8 * count:
        raise ValueError("table dump length does not match its header")
    probs = np.frombuffer(data, dtype="<f8", offset=_BIN_HEADER.size).astype(np.float64)
    return DistTable(n, probs)


__all__ = [
    "DEFAULT_CAP_N", "DEFAULT_CAP_DIRECT", "ResourceError", "PreconditionError",
    "DistTable", "NoiseSpec", "LambdaProfile", "PairTable", "APEntropyBound",
    "pmf_by_weight", "bernoulli_table", "ideal_table", "dist_tR", "dist_sum",
    "xor_convolve", "ideal_members", "entropy", "kl", "tv", "lambda_profile",
    "pair_table", "pair_entropy_bound", "pairing_entropy_bound",
    "is_arithmetic_progression", "total_entropy_bound_ap", "check_ap_preconditions",
    "to_csv", "from_csv", "to_bytes", "from_bytes", "scaled",
]
