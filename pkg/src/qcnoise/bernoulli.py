"""The bias-exponent Bernoulli family Ber(omega).

A bit drawn from Ber(omega) is 1 with probability (1 - 2^-omega) / 2, so the
XOR of independent bits simply adds exponents.  omega = inf is the fair bit.
All entropies are in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .ring import RingElement

INF = math.inf
LN2 = math.log(2.0)

# below this bias the series for 1 - h~ converges in < 30 terms
_SERIES_MAX_BIAS = 0.5


def _check(omega: float) -> None:
    if not omega >= 0:  # also rejects NaN
        raise ValueError(f"bias exponent must be >= 0, got {omega}")


def parse_omega(text: str) -> float:
    text = text.strip().lower()
    if text in ("inf", "+inf", "infinity"):
        return INF
    omega = float(text)
    _check(omega)
    return omega


def bias(omega: float) -> float:
    """2^-omega, with bias(inf) = 0."""
    _check(omega)
    return 0.0 if omega == INF else 2.0 ** -omega


def p(omega: float) -> float:
    """Pr[1] for Ber(omega)."""
    _check(omega)
    if omega == INF:
        return 0.5
    if omega >= 1.0:
        return 0.5 * (1.0 - 2.0 ** -omega)
    return -0.5 * math.expm1(-omega * LN2)


def pile_up(omegas: Iterable[float]) -> float:
    """Exponent of the XOR of independent Ber(omega_i) bits."""
    total = 0.0
    for w in omegas:
        _check(w)
        total += w
    return total


def binary_entropy(q: float) -> float:
    if q <= 0.0 or q >= 1.0:
        return 0.0
    return -q * math.log2(q) - (1.0 - q) * math.log2(1.0 - q)


def entropy_deficit(omega: float) -> float:
    """1 - h~(omega), evaluated without cancellation.

    For x = 2^-omega <= 1/2 this uses
    1 - h~ = (1 / (2 ln 2)) * sum_{k>=1} x^(2k) / (k (2k - 1)),
    which keeps full relative precision when the deficit is tiny.
    """
    _check(omega)
    x = bias(omega)
    if x == 0.0:
        return 0.0
    if x > _SERIES_MAX_BIAS:
        return 1.0 - binary_entropy(p(omega))
    x2 = x * x
    term = x2
    total = 0.0
    k = 1
    while True:
        inc = term / (k * (2 * k - 1))
        total += inc
        if inc <= total * 1e-18:
            break
        term *= x2
        k += 1
    return total / (2.0 * LN2)


def h_tilde(omega: float) -> float:
    """Entropy in bits of a Ber(omega) bit."""
    return 1.0 - entropy_deficit(omega)


def h_tilde_precise(omega, dps: int = 60):
    """Extended-precision h~(omega) via mpmath (oracle path)."""
    import mpmath

    with mpmath.workdps(dps):
        if omega == INF:
            return mpmath.mpf(1)
        x = mpmath.power(2, -mpmath.mpf(omega))
        q = (1 - x) / 2
        if q == 0:
            return mpmath.mpf(0)
        return -(q * mpmath.log(q, 2) + (1 - q) * mpmath.log(1 - q, 2))


@dataclass(frozen=True)
class EntropyApprox:
    """Second-order expansion of h~ with an explicit Taylor remainder.

    ``error`` is value - first_order computed from the tail of the series,
    so it is accurate even when it is far below double-precision spacing
    near 1.
    """

    omega: float
    value: float
    first_order: float
    error: float
    remainder_bound: float

    @property
    def encloses(self) -> bool:
        return abs(self.error) <= self.remainder_bound


def taylor_remainder_bound(omega: float) -> float:
    """Bound on |h~(omega) - (1 - 4^-omega / (2 ln 2))|.

    Half the sum of the Lagrange remainders of (1 +- x) log2(1 +- x) after
    the cubic term, each maximised over the intermediate point in [0, x]:
    x^4 / (12 ln 2) and x^4 / (12 ln 2 (1 - x)^3).
    """
    x = bias(omega)
    if x >= 1.0:
        return INF
    x4 = x ** 4
    return 0.5 * (x4 / (12 * LN2) + x4 / (12 * LN2 * (1.0 - x) ** 3))


def h_tilde_approx(omega: float) -> EntropyApprox:
    _check(omega)
    if omega == 0:
        raise ValueError("the expansion needs omega > 0")
    x = bias(omega)
    lead = x * x / (2 * LN2)
    deficit = entropy_deficit(omega)
    if x <= _SERIES_MAX_BIAS:
        # tail of the series from k = 2
        x2 = x * x
        term = x2 * x2
        tail = 0.0
        k = 2
        while term > 0.0:
            inc = term / (k * (2 * k - 1))
            tail += inc
            if inc <= tail * 1e-18:
                break
            term *= x2
            k += 1
        error = -tail / (2 * LN2)
    else:
        error = lead - deficit
    return EntropyApprox(
        omega=omega,
        value=1.0 - deficit,
        first_order=1.0 - lead,
        error=error,
        remainder_bound=taylor_remainder_bound(omega),
    )


# -- sampling ---------------------------------------------------------------

def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based (Philox) generator keyed by (seed, stream)."""
    ss = np.random.SeedSequence(seed, spawn_key=(stream,))
    return np.random.Generator(np.random.Philox(ss))


def sample_bits(omega: float, shape, rng: np.random.Generator) -> np.ndarray:
    """Independent Ber(omega) bits as uint8, by thresholding uniforms at p(omega)."""
    return (rng.random(shape) < p(omega)).astype(np.uint8)


def sample_poly(omega: float, n: int, rng: np.random.Generator) -> RingElement:
    if n < 1:
        raise ValueError("n must be >= 1")
    bits = sample_bits(omega, n, rng)
    return RingElement(n, int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little"))
