"""Arithmetic in the cyclic ring P_n = F2[X]/(X^n - 1).

Elements are stored bit-packed in a Python int: bit ``i`` is the coefficient
of ``X^i``.  Plain (non-reduced) F2[X] polynomials used for gcd work share the
same int encoding.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable


class DimensionError(ValueError):
    """Operands live in rings of different length."""


class NotAUnitError(ArithmeticError):
    """Raised by :func:`inverse` for a non-invertible element."""

    def __init__(self, t: "RingElement", gcd: int):
        self.element = t
        self.gcd = gcd
        super().__init__(
            f"element {t.support()} is not a unit in P_{t.n}: "
            f"gcd with X^{t.n}-1 is {format_poly(gcd)}"
        )


@dataclass(frozen=True)
class RingElement:
    n: int
    bits: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"ring length must be positive, got {self.n}")
        if self.bits < 0 or self.bits >> self.n:
            raise ValueError(f"bits 0x{self.bits:x} do not fit in length {self.n}")

    @classmethod
    def from_support(cls, n: int, support: Iterable[int]) -> "RingElement":
        bits = 0
        for i in support:
            if not 0 <= i < n:
                raise ValueError(f"index {i} outside [0, {n - 1}]")
            if bits >> i & 1:
                raise ValueError(f"duplicate index {i}")
            bits |= 1 << i
        return cls(n, bits)

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[int]) -> "RingElement":
        coeffs = list(coeffs)
        bits = 0
        for i, c in enumerate(coeffs):
            if c & 1:
                bits |= 1 << i
        return cls(len(coeffs), bits)

    @classmethod
    def one(cls, n: int) -> "RingElement":
        return cls(n, 1)

    @classmethod
    def monomial(cls, n: int, k: int) -> "RingElement":
        return cls(n, 1 << (k % n))

    @property
    def coeffs(self) -> list[int]:
        return [(self.bits >> i) & 1 for i in range(self.n)]

    def support(self) -> list[int]:
        return support(self)

    def weight(self) -> int:
        return self.bits.bit_count()

    def __add__(self, other: "RingElement") -> "RingElement":
        _check_same(self, other)
        return RingElement(self.n, self.bits ^ other.bits)

    __xor__ = __add__
    __sub__ = __add__

    def __mul__(self, other: "RingElement") -> "RingElement":
        return mul(self, other)

    def __repr__(self) -> str:
        return f"RingElement(n={self.n}, support={self.support()})"


@dataclass(frozen=True)
class IdealDescriptor:
    generator: RingElement
    gcd_with_modulus: int
    ideal_dimension: int

    def contains(self, x: RingElement) -> bool:
        """Membership test: x is in <t> iff gcd(t, X^n - 1) divides x."""
        _check_same(self.generator, x)
        return poly_divmod(x.bits, self.gcd_with_modulus)[1] == 0


def _check_same(a: RingElement, b: RingElement) -> None:
    if a.n != b.n:
        raise DimensionError(f"ring lengths differ: {a.n} vs {b.n}")


def rotate(bits: int, k: int, n: int) -> int:
    """Multiply the packed element ``bits`` by X^k in P_n."""
    k %= n
    if k == 0:
        return bits
    mask = (1 << n) - 1
    return ((bits << k) | (bits >> (n - k))) & mask


def shift(t: RingElement, k: int) -> RingElement:
    return RingElement(t.n, rotate(t.bits, k, t.n))


def support(t: RingElement) -> list[int]:
    out = []
    bits = t.bits
    while bits:
        low = bits & -bits
        out.append(low.bit_length() - 1)
        bits ^= low
    return out


def weight(t: RingElement) -> int:
    return t.bits.bit_count()


def mul(a: RingElement, b: RingElement) -> RingElement:
    """Cyclic convolution of a and b.

    Shift-XOR over the support of the lighter operand, so the cost is
    O(min(|a|, |b|) * n / wordsize).
    """
    _check_same(a, b)
    if a.weight() > b.weight():
        a, b = b, a
    n = a.n
    acc = 0
    for i in support(a):
        acc ^= rotate(b.bits, i, n)
    return RingElement(n, acc)


# -- plain F2[X] polynomials ------------------------------------------------

def modulus(n: int) -> int:
    """X^n - 1 (= X^n + 1 over F2) as a plain polynomial."""
    return (1 << n) | 1


def degree(a: int) -> int:
    return a.bit_length() - 1


def poly_divmod(a: int, b: int) -> tuple[int, int]:
    if b == 0:
        raise ZeroDivisionError("division by the zero polynomial")
    db = degree(b)
    q = 0
    while a and degree(a) >= db:
        s = degree(a) - db
        q ^= 1 << s
        a ^= b << s
    return q, a


def poly_mul(a: int, b: int) -> int:
    acc = 0
    while b:
        if b & 1:
            acc ^= a
        a <<= 1
        b >>= 1
    return acc


def poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, poly_divmod(a, b)[1]
    return a


def poly_xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, u, v) with u*a + v*b = g = gcd(a, b) over F2."""
    r0, r1 = a, b
    u0, u1 = 1, 0
    v0, v1 = 0, 1
    while r1:
        q, r = poly_divmod(r0, r1)
        r0, r1 = r1, r
        u0, u1 = u1, u0 ^ poly_mul(q, u1)
        v0, v1 = v1, v0 ^ poly_mul(q, v1)
    return r0, u0, v0


def format_poly(a: int) -> str:
    if a == 0:
        return "0"
    terms = []
    for i in range(degree(a), -1, -1):
        if a >> i & 1:
            terms.append("1" if i == 0 else "X" if i == 1 else f"X^{i}")
    return "+".join(terms)


# -- ring-level queries ----------------------------------------------------

def gcd_with_modulus(t: RingElement) -> int:
    # gcd(0, X^n - 1) = X^n - 1 by convention
    return poly_gcd(modulus(t.n), t.bits)


def is_invertible(t: RingElement) -> bool:
    return gcd_with_modulus(t) == 1


def inverse(t: RingElement) -> RingElement:
    g, u, _ = poly_xgcd(t.bits, modulus(t.n))
    if g != 1:
        raise NotAUnitError(t, g)
    return RingElement(t.n, poly_divmod(u, modulus(t.n))[1])


def ideal_of(t: RingElement) -> IdealDescriptor:
    g = gcd_with_modulus(t)
    return IdealDescriptor(t, g, t.n - degree(g))


def joint_gcd(ts: Iterable[RingElement]) -> int:
    """gcd(t_1, ..., t_s, X^n - 1); equals 1 iff <t_1, ..., t_s> = P_n."""
    ts = list(ts)
    if not ts:
        raise ValueError("need at least one element")
    g = modulus(ts[0].n)
    for t in ts:
        _check_same(ts[0], t)
        g = poly_gcd(g, t.bits)
    return g


def spans(ts: Iterable[RingElement]) -> bool:
    return joint_gcd(ts) == 1


def parse_support(text: str, n: int) -> RingElement:
    """Parse the comma-separated support format, e.g. ``0,1,2`` -> 1+X+X^2."""
    text = text.strip()
    if not text:
        return RingElement(n, 0)
    try:
        idx = [int(tok) for tok in text.split(",")]
    except ValueError:
        raise ValueError(f"malformed support list {text!r}") from None
    return RingElement.from_support(n, idx)


def parse_dense(text: str, n: int) -> RingElement:
    """Parse a hex coefficient word (bit i = coefficient of X^i)."""
    try:
        bits = int(text, 16)
    except ValueError:
        raise ValueError(f"malformed hex polynomial {text!r}") from None
    return RingElement(n, bits)


def format_support(t: RingElement) -> str:
    return ",".join(str(i) for i in t.support())
