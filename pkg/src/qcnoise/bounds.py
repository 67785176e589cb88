"""Closed-form divergences and the Pinsker / reverse-Pinsker envelope.

Everything here is in bits and works at any n; only
:func:`ratio_bounds_check` and :func:`divergence_report` (when asked for exact
values) touch 2^n tables.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import _jsonio
from .bernoulli import INF, LN2, bias, entropy_deficit, p, taylor_remainder_bound
from .exact import (
    DEFAULT_CAP_N,
    NoiseSpec,
    dist_sum,
    entropy,
    ideal_table,
    kl,
    scaled,
    tv,
)
from .ring import is_invertible


class SpanningError(ValueError):
    """The noise polynomials do not generate the whole ring."""


def kl_closed_form(n: int, tau: int, omega: float) -> float:
    """D(tR || I) = n (h~(tau w) - h~(w)) for invertible t of weight tau."""
    if tau < 1:
        raise ValueError("tau must be >= 1")
    return n * (entropy_deficit(omega) - entropy_deficit(scaled(tau, omega)))


def kl_equal_t(n: int, t_weight: int, s: int, omega: float) -> float:
    """Divergence of t (R_1 + ... + R_s) from Ber(|t| s w)^n."""
    return kl_closed_form(n, t_weight, scaled(s, omega))


def expected_weight(n: int, tau: int, omega: float) -> float:
    return n * p(scaled(tau, omega))


def pinsker_upper(D: float) -> float:
    """Pinsker with D in bits: TV <= sqrt(ln 2 / 2 * D)."""
    if D < 0:
        raise ValueError(f"divergence must be >= 0, got {D}")
    return math.sqrt(LN2 / 2 * D)


def reverse_pinsker_lower(D: float, s: int) -> float:
    """TV >= D / (3 s); the caller vouches for n >= 3, w >= log2 n and spanning."""
    if s < 1:
        raise ValueError("s must be >= 1")
    return D / (3 * s)


@dataclass(frozen=True)
class RatioBounds:
    m: float
    M: float
    ok: bool
    lower: float
    upper: float


def ratio_bounds_check(spec: NoiseSpec, cap_n: int = DEFAULT_CAP_N) -> RatioBounds:
    """Pointwise likelihood-ratio range of the true law against the product law.

    The reverse Pinsker constant 1/(3s) rests on this ratio lying in
    [8^-s, 8^s].
    """
    if not spec.spanning():
        raise SpanningError("noise polynomials do not span P_n; some cells have probability 0")
    P = dist_sum(spec, cap_n=cap_n)
    Q = ideal_table(spec.n, spec.tau, spec.omega, cap_n=cap_n)
    if np.any(Q.probs == 0):
        raise SpanningError("the product law has empty cells (tau * omega = 0)")
    ratio = P.probs / Q.probs
    m, M = float(ratio.min()), float(ratio.max())
    lo, hi = 8.0 ** -spec.s, 8.0 ** spec.s
    return RatioBounds(m, M, lo <= m and M <= hi, lo, hi)


@dataclass(frozen=True)
class Bound:
    value: float
    vacuous: bool


def ap_divergence_lower(n: int, tau: int, s: int, omega: float) -> Bound:
    """(n-1)/2 (h~(tau w) - h~(2 s w)) <= D for same-difference AP supports."""
    value = (n - 1) / 2 * (entropy_deficit(scaled(2 * s, omega)) - entropy_deficit(scaled(tau, omega)))
    return Bound(value, vacuous=tau <= 2 * s)


def envelope_constants(tau_min: int = 2, omega_min: float = 2.0) -> tuple[float, float]:
    """Constants c < C with c n 4^-w <= kl_closed_form <= C n 4^-w.

    Valid for all tau >= tau_min >= 2 and w >= omega_min > 0.  Obtained from
    1/(2 ln 2) <= (1 - h~(w)) / x^2 <= 1/(2 ln 2) + rem(w) / x^2 (x = 2^-w),
    with both the remainder term and x^(2 tau - 2) largest at the smallest
    parameters.
    """
    if tau_min < 2:
        raise ValueError("the envelope needs tau >= 2")
    lead = 1 / (2 * LN2)
    x0 = bias(omega_min)
    upper = lead + taylor_remainder_bound(omega_min) / x0 ** 2
    tail = lead * x0 ** (2 * tau_min - 2) + taylor_remainder_bound(tau_min * omega_min) / x0 ** 2
    return lead - tail, upper


def envelope_ratio(tau: int, omega: float) -> float:
    """kl_closed_form / (n 4^-w)."""
    return kl_closed_form(1, tau, omega) / bias(omega) ** 2


# -- reports ----------------------------------------------------------------

@dataclass
class DivergenceReport:
    n: int
    s: int
    tau: int
    omega: float
    kl_closed_form: Optional[float]
    kl_exact: Optional[float]
    tv_exact: Optional[float]
    pinsker_upper: Optional[float]
    reverse_pinsker_lower: Optional[float]
    preconditions: dict = field(default_factory=dict)
    vacuous_flags: dict = field(default_factory=dict)
    entropy_exact: Optional[float] = None
    entropy_ideal: Optional[float] = None
    ap_divergence_lower: Optional[float] = None

    @property
    def preconditions_met(self) -> bool:
        return all(v is True for v in self.preconditions.values())

    def sandwich_holds(self) -> Optional[bool]:
        """reverse_pinsker_lower <= tv_exact <= pinsker_upper, or None if not checkable."""
        if self.tv_exact is None or self.reverse_pinsker_lower is None or self.pinsker_upper is None:
            return None
        return self.reverse_pinsker_lower <= self.tv_exact <= self.pinsker_upper

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return _jsonio.dumps(self.to_dict())


def precondition_flags(n: int, omega: float, spanning: Optional[bool]) -> dict:
    return {
        "n_ge_3": n >= 3,
        "omega_ge_log2n": omega >= math.log2(n),
        "spanning": spanning,
    }


def closed_form_for(spec: NoiseSpec) -> Optional[float]:
    """Closed-form KL when one applies: a single unit, or s copies of one unit."""
    t0 = spec.ts[0]
    if all(t == t0 for t in spec.ts) and is_invertible(t0):
        return kl_equal_t(spec.n, t0.weight(), spec.s, spec.omega)
    return None


def divergence_report(spec: NoiseSpec, exact: bool = True, cap_n: int = DEFAULT_CAP_N) -> DivergenceReport:
    spanning = spec.spanning()
    pre = precondition_flags(spec.n, spec.omega, spanning)
    closed = closed_form_for(spec)
    kl_ex = tv_ex = h_ex = h_id = None
    if exact:
        P = dist_sum(spec, cap_n=cap_n)
        Q = ideal_table(spec.n, spec.tau, spec.omega, cap_n=cap_n)
        kl_ex, tv_ex = kl(P, Q), tv(P, Q)
        h_ex, h_id = entropy(P), entropy(Q)
    D = kl_ex if kl_ex is not None else closed
    upper = lower = None
    if D is not None:
        # exact KL of nearly-equal laws can land a few ulps below zero
        upper = pinsker_upper(max(D, 0.0)) if D != INF else INF
        lower = reverse_pinsker_lower(D, spec.s)
    return DivergenceReport(
        n=spec.n, s=spec.s, tau=spec.tau, omega=spec.omega,
        kl_closed_form=closed, kl_exact=kl_ex, tv_exact=tv_ex,
        pinsker_upper=upper, reverse_pinsker_lower=lower,
        preconditions=pre,
        vacuous_flags={"reverse_pinsker_lower": not all(v is True for v in pre.values())},
        entropy_exact=h_ex, entropy_ideal=h_id,
    )


def closed_form_report(n: int, tau: int, omega: float, s: int = 1,
                       spanning: Optional[bool] = None, ap: bool = False) -> DivergenceReport:
    """Report for a single invertible t of weight tau, at any n (no tables)."""
    pre = precondition_flags(n, omega, spanning)
    D = kl_closed_form(n, tau, omega) if s == 1 else None
    flags = {"reverse_pinsker_lower": not all(v is True for v in pre.values())}
    rep = DivergenceReport(
        n=n, s=s, tau=tau, omega=omega,
        kl_closed_form=D, kl_exact=None, tv_exact=None,
        pinsker_upper=pinsker_upper(D) if D is not None else None,
        reverse_pinsker_lower=reverse_pinsker_lower(D, s) if D is not None else None,
        preconditions=pre, vacuous_flags=flags,
    )
    if ap:
        b = ap_divergence_lower(n, tau, s, omega)
        rep.ap_divergence_lower = b.value
        flags["ap_divergence_lower"] = b.vacuous
    return rep


__all__ = [
    "SpanningError", "kl_closed_form", "kl_equal_t", "expected_weight",
    "pinsker_upper", "reverse_pinsker_lower", "RatioBounds", "ratio_bounds_check",
    "Bound", "ap_divergence_lower", "envelope_constants", "envelope_ratio",
    "DivergenceReport", "precondition_flags", "closed_form_for",
    "divergence_report", "closed_form_report",
]
