"""Acceptance criteria 1-11, each at its stated tolerance.

Every test prints one ``[criterion k] PASS|FAIL ...`` line (run with ``-s``
to see them inline; they are also shown in the terminal summary).
"""

import math
import random
import time

import mpmath
import numpy as np
import pytest

from qcnoise.bernoulli import h_tilde, h_tilde_approx, h_tilde_precise, p, taylor_remainder_bound
from qcnoise.bounds import (
    ap_divergence_lower,
    divergence_report,
    envelope_constants,
    envelope_ratio,
    kl_closed_form,
    pinsker_upper,
    ratio_bounds_check,
)
from qcnoise.exact import (
    NoiseSpec,
    dist_sum,
    dist_tR,
    entropy,
    ideal_members,
    ideal_table,
    kl,
    pair_table,
    tv,
)
from qcnoise.experiments import weight_experiment
from qcnoise.ring import RingElement, ideal_of, is_invertible

LINES = []


def report(k, ok, detail):
    line = f"[criterion {k:>2}] {'PASS' if ok else 'FAIL'}  {detail}"
    LINES.append(line)
    print(line)
    assert ok, line


def random_spec(rnd, n, s, omega):
    ts = tuple(RingElement.from_support(n, rnd.sample(range(n), rnd.randint(1, n))) for _ in range(s))
    return NoiseSpec(n, ts, omega)


# -- 1 ----------------------------------------------------------------------

def test_criterion_01_kl_identity():
    start = time.perf_counter()
    rnd = random.Random(1)
    worst, count = 0.0, 0
    for n in (3, 5, 7, 11):
        if n <= 7:
            units = [RingElement(n, b) for b in range(1, 1 << n) if is_invertible(RingElement(n, b))]
        else:
            units = []
            while len(units) < 200:
                t = RingElement(n, rnd.randrange(1, 1 << n))
                if is_invertible(t):
                    units.append(t)
        for omega in (1.0, 2.0, 3.0, math.log2(n)):
            for t in units:
                tau = t.weight()
                D = kl(dist_tR(t, omega), ideal_table(n, tau, omega))
                worst = max(worst, abs(D - kl_closed_form(n, tau, omega)))
                count += 1
    elapsed = time.perf_counter() - start
    report(1, worst <= 1e-9 and elapsed < 60,
           f"KL identity: {count} (t, omega) cases, max |kl_exact - closed form| = {worst:.2e} "
           f"(tol 1e-9), {elapsed:.1f}s")


# -- 2 ----------------------------------------------------------------------

def test_criterion_02_marginal_law():
    start = time.perf_counter()
    rnd = random.Random(2)
    worst = 0.0
    for _ in range(100):
        n = rnd.randint(2, 10)
        spec = random_spec(rnd, n, rnd.choice((1, 2, 3)), rnd.choice((0.5, 1.0, 1.5, 2.0, 3.0)))
        P = dist_sum(spec)
        q = p(spec.marginal_omega)
        for k in range(n):
            z, o = P.marginal(k)
            worst = max(worst, abs(o - q), abs(z - (1 - q)))
    elapsed = time.perf_counter() - start
    report(2, worst <= 1e-12 and elapsed < 60,
           f"marginals: 100 specs, max deviation from Ber(tau w) = {worst:.2e} (tol 1e-12), {elapsed:.1f}s")


# -- 3 ----------------------------------------------------------------------

def test_criterion_03_pair_tables():
    start = time.perf_counter()
    rnd = random.Random(3)
    worst, pairs = 0.0, 0
    for _ in range(50):
        n = rnd.randint(2, 10)
        spec = random_spec(rnd, n, rnd.choice((1, 2, 3)), rnd.choice((0.5, 1.0, 2.0, 3.0)))
        P = dist_sum(spec)
        for i in range(n):
            for j in range(n):
                if i != j:
                    worst = max(worst, float(np.abs(pair_table(spec, i, j).probs - P.pair_marginal(i, j)).max()))
                    pairs += 1
    elapsed = time.perf_counter() - start
    report(3, worst <= 1e-12 and elapsed < 60,
           f"pair tables: 50 specs, {pairs} (i,j) pairs, max residual = {worst:.2e} (tol 1e-12), {elapsed:.1f}s")


# -- 4 and 5 -------------------------------------------------------------------

def sandwich_specs():
    """Every spanning spec for n in {3,5,7} (s = 1, 2) and n = 11, s = 1;
    a seeded sample of 400 spanning pairs for n = 11, s = 2."""
    out = []
    for n in (3, 5, 7, 11):
        omega = float(math.ceil(math.log2(n)))
        size = 1 << n
        singles = [(a,) for a in range(size)]
        if n <= 7:
            doubles = [(a, b) for a in range(size) for b in range(a, size)]
        else:
            rnd = random.Random(11)
            doubles = [(rnd.randrange(size), rnd.randrange(size)) for _ in range(400)]
        for ws in singles + doubles:
            spec = NoiseSpec(n, tuple(RingElement(n, w) for w in ws), omega)
            if spec.spanning():
                out.append(spec)
    return out


@pytest.fixture(scope="module")
def sandwich_results():
    start = time.perf_counter()
    rows = []
    for spec in sandwich_specs():
        P = dist_sum(spec)
        Q = ideal_table(spec.n, spec.tau, spec.omega)
        D, T = kl(P, Q), tv(P, Q)
        rows.append((spec, D, T))
    return rows, time.perf_counter() - start


def test_criterion_04_sandwich(sandwich_results):
    rows, elapsed = sandwich_results
    bad = [(spec, D, T) for spec, D, T in rows if not (D / (3 * spec.s) <= T <= pinsker_upper(max(D, 0.0)))]
    by_n = {}
    for spec, _, _ in rows:
        by_n[spec.n] = by_n.get(spec.n, 0) + 1
    # the report path must agree with the direct check
    for spec, _, _ in rows[:: max(1, len(rows) // 50)]:
        assert divergence_report(spec).sandwich_holds()
    report(4, not bad and len(rows) >= 500 and elapsed < 300,
           f"sandwich: {len(rows)} spanning specs {by_n}, {len(bad)} violations, {elapsed:.1f}s")


def test_criterion_05_ratio_bounds(sandwich_results):
    rows, _ = sandwich_results
    start = time.perf_counter()
    bad, lo, hi = [], math.inf, 0.0
    for spec, _, _ in rows:
        rb = ratio_bounds_check(spec)
        lo, hi = min(lo, rb.m * 8.0 ** spec.s), max(hi, rb.M / 8.0 ** spec.s)
        if not rb.ok:
            bad.append(spec)
    elapsed = time.perf_counter() - start
    report(5, not bad,
           f"ratio bounds: {len(rows)} specs, {len(bad)} outside [8^-s, 8^s]; "
           f"min m*8^s = {lo:.3f}, max M/8^s = {hi:.3f}, {elapsed:.1f}s")


# -- 6 ----------------------------------------------------------------------

def test_criterion_06_special_cases():
    tau_one = []
    for n in (3, 5, 7, 11):
        for k in range(n):
            for omega in (0.5, 1.0, 3.0, math.log2(n)):
                spec = NoiseSpec(n, (RingElement.monomial(n, k),), omega)
                tau_one.append(divergence_report(spec).kl_exact)
    zeros = sum(v == 0.0 for v in tau_one)
    zero_ok = zeros == len(tau_one)

    worst_table, worst_kl, count = 0.0, 0.0, 0
    for n in (3, 5, 7):
        for bits in range(1, 1 << n):
            t = RingElement(n, bits)
            if not is_invertible(t):
                continue
            # integer omegas give dyadic probabilities (exact in binary); log2 n does not
            for omega in (1.0, 2.0, 3.0, math.log2(n)):
                P = dist_sum(NoiseSpec(n, (t, t), omega))
                worst_table = max(worst_table, float(np.abs(P.probs - dist_tR(t, 2 * omega).probs).max()))
                D = kl(P, ideal_table(n, 2 * t.weight(), omega))
                ref = n * (h_tilde(2 * t.weight() * omega) - h_tilde(2 * omega))
                worst_kl = max(worst_kl, abs(D - ref))
                count += 1
    report(6, zero_ok and worst_kl <= 1e-9,
           f"special cases: tau=1 gives kl_exact == 0 in {zeros}/{len(tau_one)} cases; "
           f"t1=t2=t over {count} cases: max table gap {worst_table:.1e}, "
           f"max |KL - n(h(2|t|w) - h(2w))| = {worst_kl:.2e} (tol 1e-9)")


# -- 7 ----------------------------------------------------------------------

def test_criterion_07_non_invertible_confinement():
    n = 7
    t = RingElement.from_support(n, [0, 1, 3])
    desc = ideal_of(t)
    members = ideal_members(desc.gcd_with_modulus, n)
    ok_dim = desc.ideal_dimension == 4 and len(set(members.tolist())) == 16
    details = []
    ok = ok_dim
    for omega in (1.0, 2.0, 3.0):
        P = dist_tR(t, omega)
        Q = ideal_table(n, t.weight(), omega)
        mass = P.mass_on(members)
        H = entropy(P)
        backward = kl(Q, P)
        forward = kl(P, Q)
        ok &= abs(mass - 1.0) <= 1e-12 and H <= 4.0 and backward == math.inf
        ok &= math.isfinite(forward) and abs(forward - (entropy(Q) - H)) <= 1e-10
        details.append(f"w={omega:g}: mass {mass:.15f}, H = {H:.4f}")
    report(7, ok,
           "confinement to <1+X+X^3> (2^4 elements): " + "; ".join(details)
           + "; D(ideal || dist_tR) = inf")


# -- 8 ----------------------------------------------------------------------

def test_criterion_08_ap_lower_bound():
    start = time.perf_counter()
    n, s, omega = 11, 2, 2.0
    bound = ap_divergence_lower(n, 6, s, omega)
    ref = (n - 1) / 2 * (h_tilde(12) - h_tilde(8))
    specs = [NoiseSpec.from_supports(n, [[0, 1, 2], [4, 5, 6]], omega)]
    for w1 in range(1, 6):
        for b in range(n):
            specs.append(NoiseSpec.from_supports(n, [list(range(w1)), [(b + x) % n for x in range(6 - w1)]], omega))
    worst = math.inf
    for spec in specs:
        D = kl(dist_sum(spec, method="convolution"), ideal_table(n, spec.tau, omega))
        worst = min(worst, D - bound.value)
    elapsed = time.perf_counter() - start
    report(8, worst >= 0 and not bound.vacuous and abs(bound.value - ref) <= 1e-12 and elapsed < 120,
           f"AP bound {bound.value:.4e} <= kl_exact over {len(specs)} contiguous specs "
           f"(min slack {worst:.4e}), {elapsed:.1f}s")


# -- 9 ----------------------------------------------------------------------

def test_criterion_09_taylor_enclosure():
    grid = [1 + 0.5 * k for k in range(59)]
    ok_half, ok_full, worst = True, 0, 0.0
    with mpmath.workdps(80):
        ln2 = mpmath.log(2)
        for omega in grid:
            x = mpmath.power(2, -mpmath.mpf(omega))
            h = h_tilde_precise(omega, dps=80)
            bound = mpmath.mpf(taylor_remainder_bound(omega))
            err_half = abs(h - (1 - x * x / (2 * ln2)))
            err_full = abs(h - (1 - x * x / ln2))
            ok_half &= err_half <= bound and h_tilde_approx(omega).encloses
            ok_full += err_full <= bound
            worst = max(worst, float(err_half / bound))
    report(9, ok_half and ok_full == 0,
           f"Taylor enclosure on {len(grid)} grid points: 1/(2 ln 2) holds everywhere "
           f"(max error/bound = {worst:.9f}); 1/ln 2 holds at {ok_full}/{len(grid)} points")


# -- 10 ---------------------------------------------------------------------

def test_criterion_10_weight_expectation():
    start = time.perf_counter()
    rnd = random.Random(10)
    n = 101
    supports = rnd.sample(range(n), 10)
    split = rnd.randint(1, 9)
    spec = NoiseSpec.from_supports(n, [supports[:split], supports[split:]], 2.0)
    a = weight_experiment(spec, 10 ** 5, seed=20240601)
    b = weight_experiment(spec, 10 ** 5, seed=20240601)
    same = a.to_json().encode() == b.to_json().encode() and a.to_csv() == b.to_csv()
    elapsed = time.perf_counter() - start
    report(10, abs(a.z_score) <= 4 and same and spec.tau == 10 and elapsed < 30,
           f"weights n=101 s=2 tau=10 w=2, 1e5 trials: mean {a.mean:.4f} vs {a.expected_mean:.4f}, "
           f"z = {a.z_score:+.3f}, identical rerun bytes: {same}, {elapsed:.1f}s")


# -- 11 ---------------------------------------------------------------------

def test_criterion_11_envelope():
    c, C = envelope_constants()
    fit = [envelope_ratio(tau, float(w)) for tau in range(2, 11) for w in range(2, 21)]
    lo, hi = min(fit), max(fit)
    in_fit = c <= lo and hi <= C
    held = [envelope_ratio(tau, w) for tau in range(2, 31) for w in np.arange(2.25, 40.0, 0.5)]
    in_held = all(c <= r <= C for r in held)
    # scale-free: the ratio does not depend on n
    n_free = all(
        math.isclose(kl_closed_form(n, 4, 3.0) / (n * 4.0 ** -3), envelope_ratio(4, 3.0), rel_tol=1e-12)
        for n in (7, 101, 17669)
    )
    report(11, 0 < c < C and in_fit and in_held and n_free,
           f"envelope [c, C] = [{c:.5f}, {C:.5f}] (width {C - c:.5f}); observed on the fit grid "
           f"[{lo:.5f}, {hi:.5f}] (width {hi - lo:.5f}); held-out grid of {len(held)} points inside: {in_held}")
