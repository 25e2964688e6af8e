"""Integer-lattice escalation prover.

For even c >= 6 a square value a_n(c) forces a coprime split c = u*v whose
pair (v, u) nearly solves theta^2 v - u = 2 theta / N with theta = 2^(1/N),
N = 2^(n-1) - 1, up to an error delta / v^2.  Scaling by B0^8 and rounding
gives an integer lattice in which any such (v, u) with |v| just above the
current bound B0 would sit implausibly close to a fixed target vector.  A
certified lower bound sigma on the squared distance from the target to the
lattice turns into a polynomial h with h(|v|) >= 0 for every solution, and
the integer root window of h pushes the lower bound B0 to roughly B0^2.
Iterating reaches astronomically large bounds in about log log B passes.

All roundings are half-up and certified through interval arithmetic; every
pass emits a trace that an independent checker re-verifies from the stored
integers alone.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import rounding
from .primes import primes_to
from .bounds import initial_divisor_bound, stable_iterate_bound
from .sieve import (NumeratorTarget, SieveCertificate, find_sieve_certificate,
                    verify_sieve_certificate)


class TraceError(AssertionError):
    """An escalation trace failed independent re-verification."""


class EscalationStuck(ArithmeticError):
    """The gamma-doubling or pass caps were exhausted."""


# --- certified constants ----------------------------------------------------

def _theta(ctx, N: int):
    return ctx.exp(ctx.log(ctx.mpf(2)) / N)


def _theta2(ctx, N: int):
    return ctx.exp(ctx.log(ctx.mpf(2)) * 2 / N)


def _delta2(ctx, N: int):
    # (4 (3 + 2 sqrt 2)^(1/N) / (theta N))^2
    d = 4 * ctx.exp(ctx.log(3 + 2 * ctx.sqrt(ctx.mpf(2))) / N) / (_theta(ctx, N) * N)
    return d * d


@dataclass(frozen=True)
class FixedPointReal:
    """A dyadic approximation mantissa * 2^-scale_bits with error <= 1 ulp."""
    mantissa: int
    scale_bits: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.mantissa, 1 << self.scale_bits)

    @property
    def error_bound(self) -> Fraction:
        return Fraction(1, 1 << self.scale_bits)


def nth_root_of_two_fixed(N: int, bits: int) -> FixedPointReal:
    """2^(1/N) in fixed point, certified to within one unit in the last place."""
    mant = rounding.nearest_int(lambda ctx: _theta(ctx, N) * (1 << bits),
                                bits + 64)
    return FixedPointReal(mant, bits)


# --- exact 2D closest-vector enumeration ------------------------------------

def lagrange_reduce(b1: tuple[int, int], b2: tuple[int, int]):
    """Greedy reduction of a 2D integer basis, tracking the unimodular map.

    Returns (r1, r2, t1, t2) with r1, r2 the reduced basis and t1, t2 their
    coefficient rows over the original basis.
    """
    t1, t2 = (1, 0), (0, 1)

    def n2(v):
        return v[0] * v[0] + v[1] * v[1]

    if n2(b1) > n2(b2):
        b1, b2, t1, t2 = b2, b1, t2, t1
    while True:
        d = n2(b1)
        mu2 = b1[0] * b2[0] + b1[1] * b2[1]
        m = (2 * mu2 + d) // (2 * d)  # nearest integer of mu2/d
        b2 = (b2[0] - m * b1[0], b2[1] - m * b1[1])
        t2 = (t2[0] - m * t1[0], t2[1] - m * t1[1])
        if n2(b2) >= n2(b1):
            return b1, b2, t1, t2
        b1, b2, t1, t2 = b2, b1, t2, t1


@dataclass(frozen=True)
class LatticePoint:
    point: tuple[int, int]
    coeffs: tuple[int, int]   # over the original basis
    dist2: int


def closest_points(basis: tuple[tuple[int, int], tuple[int, int]],
                   target: tuple[int, int], k: int = 4) -> list[LatticePoint]:
    """The k nearest lattice points to the target, exactly.

    Reduce, then enumerate coefficient boxes around the rational coordinates
    of the target (Fincke-Pohst in dimension 2); ties break by coefficient
    order over the original basis.  Pure integer/rational arithmetic.
    """
    (b1, b2), t = basis, target
    det = b1[0] * b2[1] - b1[1] * b2[0]
    if det == 0:
        raise ValueError("basis is singular")
    r1, r2, t1, t2 = lagrange_reduce(b1, b2)
    n1 = r1[0] * r1[0] + r1[1] * r1[1]
    mu = Fraction(r1[0] * r2[0] + r1[1] * r2[1], n1)
    # squared length of the component of r2 orthogonal to r1
    n2s = Fraction(r2[0] * r2[0] + r2[1] * r2[1]) - mu * mu * n1
    rdet = r1[0] * r2[1] - r1[1] * r2[0]
    a1 = Fraction(t[0] * r2[1] - t[1] * r2[0], rdet)
    a2 = Fraction(r1[0] * t[1] - r1[1] * t[0], rdet)

    found: dict[tuple[int, int], int] = {}

    def consider(i: int, j: int) -> None:
        px = i * r1[0] + j * r2[0]
        py = i * r1[1] + j * r2[1]
        d2 = (px - t[0]) ** 2 + (py - t[1]) ** 2
        vo = i * t1[0] + j * t2[0]
        uo = i * t1[1] + j * t2[1]
        found[(vo, uo)] = d2

    def kth_best() -> int | None:
        if len(found) < k:
            return None
        return sorted(found.values())[k - 1]

    half = Fraction(1, 2)
    j0 = math.floor(a2 + half)
    dj = 0
    while True:
        js = [j0 + dj, j0 - dj] if dj else [j0]
        mins = []
        for j in js:
            jgap2 = (Fraction(j) - a2) ** 2 * n2s
            mins.append(jgap2)
            R = kth_best()
            if R is not None and jgap2 > R:
                continue
            center = a1 - mu * (Fraction(j) - a2)
            i0 = math.floor(center + half)
            di = 0
            while True:
                is_ = [i0 + di, i0 - di] if di else [i0]
                progressed = False
                for i in is_:
                    igap2 = (Fraction(i) - center) ** 2 * n1
                    R = kth_best()
                    if R is not None and igap2 + jgap2 > R:
                        continue
                    consider(i, j)
                    progressed = True
                if not progressed and di > 0:
                    break
                di += 1
        R = kth_best()
        if R is not None and mins and min(mins) > R and dj > 0:
            break
        dj += 1
    ranked = sorted(found.items(), key=lambda kv: (kv[1], kv[0]))
    return [LatticePoint((c0 * b1[0] + c1 * b2[0], c0 * b1[1] + c1 * b2[1]),
                         (c0, c1), d2)
            for (c0, c1), d2 in ranked[:k]]


# --- escalation passes ------------------------------------------------------

@dataclass(frozen=True)
class LatticeAttempt:
    doublings: int
    scale_a: int                       # rounded gamma * B0^4 (first basis entry)
    basis: tuple[tuple[int, int], tuple[int, int]]
    target: tuple[int, int]
    points: tuple[tuple[int, int], ...]   # coefficient pairs (v_j, u_j)
    sigma: int
    h_negative_at_b0: bool


@dataclass(frozen=True)
class EscalationTrace:
    n: int
    N: int
    b0_in: int
    bits: int
    d_const: int                       # ceil(delta^2 B0^16)
    x6_coeff: int                      # certified >= (gamma B0^4)^2
    attempts: tuple[LatticeAttempt, ...]
    b0_out: int

    @property
    def final(self) -> LatticeAttempt:
        return self.attempts[-1]


def _adjusted_sigma(points, scale_a: int, t2: int, b0_8: int, tgt: int) -> int:
    """Lower bound on the scaled real distance from the stored points.

    Each rounding of the basis and target moved a point by at most |v_j| + 1
    per coordinate, so the shrunken terms stay below the true distance.
    """
    best = None
    for v, u in points:
        a = v * scale_a
        b = v * t2 - u * b0_8 - tgt
        term = max(0, abs(a) - abs(v)) ** 2 + max(0, abs(b) - abs(v) - 1) ** 2
        best = term if best is None else min(best, term)
    return best if best is not None else 0


def _h_poly(x6: int, sigma: int, d_const: int):
    def h(x: int) -> int:
        x2 = x * x
        return (x6 * x2 * x2 * x2) - sigma * x2 * x2 + d_const
    return h


def _largest_nonpositive(x6: int, sigma: int, d_const: int, b0: int) -> int:
    """max { x integer > 0 : h(x) <= 0 }, assuming h(b0) < 0.

    h is cubic in t = x^2 with positive leading and constant coefficients;
    integer Newton from above isolates the largest root of the cubic, then
    the answer is the integer square root, verified exactly.
    """
    h = _h_poly(x6, sigma, d_const)
    t = sigma // x6 + 1
    while True:
        g = x6 * t * t * t - sigma * t * t + d_const
        if g <= 0:
            break
        dg = 3 * x6 * t * t - 2 * sigma * t
        if dg <= 0:
            t -= 1
            continue
        step = -(-g // dg)
        t -= max(step, 1)
    while x6 * (t + 1) ** 3 - sigma * (t + 1) ** 2 + d_const <= 0:
        t += 1
    x = math.isqrt(t)
    while h(x + 1) <= 0:
        x += 1
    while x > b0 and h(x) > 0:
        x -= 1
    if h(x) > 0:
        raise TraceError("no nonpositive value at or above the incoming bound")
    return x


def escalation_pass(n: int, b0: int, bits: int | None = None,
                    start_doublings: int = 0, max_doublings: int = 64) -> EscalationTrace:
    """One pass of the escalation loop: bound b0 in, much larger bound out.

    Builds the scaled integer lattice at > 8 log2(b0) bits, finds the four
    closest points to the target, converts them into a certified distance
    lower bound sigma, and extracts the new bound from the nonpositive
    window of h(x) = x6 * x^6 - sigma * x^4 + d.  Doubles the lattice scale
    gamma until h(b0) < 0.
    """
    N = (1 << (n - 1)) - 1
    if N < 15:
        raise ValueError("the escalation needs n >= 5")
    bits = bits or (8 * b0.bit_length() + 64)
    b0_4 = b0 ** 4
    b0_8 = b0_4 * b0_4
    t2 = rounding.nearest_int(lambda ctx: _theta2(ctx, N) * b0_8, bits)
    tgt = rounding.nearest_int(lambda ctx: 2 * _theta(ctx, N) * b0_8 / N, bits)
    d_const = rounding.ceil_int(lambda ctx: _delta2(ctx, N) * b0_8 * b0_8, bits)
    attempts: list[LatticeAttempt] = []
    doublings = start_doublings
    while doublings <= max_doublings:
        mult = 1 << doublings
        scale_a = rounding.nearest_int(
            lambda ctx: _delta2(ctx, N) * mult * b0_4, bits)
        if scale_a <= 0:
            raise rounding.PrecisionExhausted("degenerate lattice scale")
        # x^6 coefficient must dominate (gamma B0^4)^2 for soundness; take the
        # larger of the rounded square and a certified ceiling of the square.
        x6 = max(scale_a * scale_a,
                 rounding.ceil_int(lambda ctx: (_delta2(ctx, N) * mult * b0_4) ** 2,
                                   bits))
        basis = ((scale_a, t2), (0, -b0_8))
        pts = closest_points(basis, (0, tgt), 4)
        coeffs = tuple(p.coeffs for p in pts)
        sigma = _adjusted_sigma(coeffs, scale_a, t2, b0_8, tgt)
        h = _h_poly(x6, sigma, d_const)
        ok = h(b0) < 0
        attempts.append(LatticeAttempt(doublings, scale_a, basis, (0, tgt),
                                       coeffs, sigma, ok))
        if ok:
            b0_out = _largest_nonpositive(x6, sigma, d_const, b0) + 1
            if b0_out <= b0:
                raise EscalationStuck(f"no progress from bound {b0}")
            return EscalationTrace(n, N, b0, bits, d_const, x6,
                                   tuple(attempts), b0_out)
        doublings += 1
    raise EscalationStuck(f"gamma doubled {max_doublings} times without h({b0}) < 0")


@dataclass(frozen=True)
class DivisorBoundCertificate:
    """Chained escalation traces proving |v| >= final_bound for prime index n."""
    n: int
    target_bound: int
    initial_bound: int
    traces: tuple[EscalationTrace, ...]
    final_bound: int
    c_exclusion: int      # certified: any square a_n(c) needs c > this

    @property
    def gamma_doublings(self) -> int:
        return sum(t.final.doublings for t in self.traces)


def c_exclusion_bound(n: int, B: int, bits: int = 256) -> int:
    """Certified floor of theta^2 (3 - 2 sqrt 2)^(1/N) B^2."""
    N = (1 << (n - 1)) - 1

    def build(ctx):
        fac = _theta2(ctx, N) * ctx.exp(ctx.log(3 - 2 * ctx.sqrt(ctx.mpf(2))) / N)
        return fac * B * B

    return rounding.floor_of_lower(build, max(bits, 2 * B.bit_length() + 64))


def required_divisor_bound(n: int, x_bound: int, bits: int = 256) -> int:
    """Smallest B whose exclusion bound certifies c > x_bound."""
    N = (1 << (n - 1)) - 1

    def build(ctx):
        fac = _theta2(ctx, N) * ctx.exp(ctx.log(3 - 2 * ctx.sqrt(ctx.mpf(2))) / N)
        return ctx.sqrt(ctx.mpf(x_bound) / fac)

    work = max(bits, x_bound.bit_length() + 64)
    B = rounding.floor_of_upper(build, work) + 1
    while c_exclusion_bound(n, B, work) < x_bound:
        B += 1
    return B


def prove_divisor_bound(n: int, target_bound: int,
                        max_passes: int = 200) -> DivisorBoundCertificate:
    """Escalate from the initial bound until it exceeds the target."""
    b0 = initial_divisor_bound(n)
    initial = b0
    traces: list[EscalationTrace] = []
    while b0 <= target_bound:
        if len(traces) >= max_passes:
            raise EscalationStuck(f"{max_passes} passes without reaching the target")
        tr = escalation_pass(n, b0)
        traces.append(tr)
        b0 = tr.b0_out
    return DivisorBoundCertificate(n, target_bound, initial, tuple(traces), b0,
                                   c_exclusion_bound(n, b0))


# --- independent trace checking ---------------------------------------------

def check_trace(trace: EscalationTrace) -> None:
    """Re-verify one trace from its stored integers alone.

    Recomputes every rounded constant at doubled precision (half-up and
    ceiling values are precision-independent, so exact equality is the
    test), recomputes sigma from the stored points, and re-derives the
    outgoing bound from the h-window.  Raises TraceError on any mismatch.
    """
    N = (1 << (trace.n - 1)) - 1
    if N != trace.N:
        raise TraceError("inconsistent N")
    b0 = trace.b0_in
    b0_4, b0_8 = b0 ** 4, b0 ** 8
    bits2 = 2 * trace.bits
    fin = trace.final
    (scale_a, t2), (z, neg) = fin.basis
    if z != 0 or neg != -b0_8 or scale_a != fin.scale_a:
        raise TraceError("basis shape mismatch")
    tgt = fin.target[1]
    if t2 != rounding.nearest_int(lambda ctx: _theta2(ctx, N) * b0_8, bits2):
        raise TraceError("theta^2 B0^8 rounding claim fails")
    if tgt != rounding.nearest_int(lambda ctx: 2 * _theta(ctx, N) * b0_8 / N, bits2):
        raise TraceError("target rounding claim fails")
    mult = 1 << fin.doublings
    if scale_a != rounding.nearest_int(lambda ctx: _delta2(ctx, N) * mult * b0_4,
                                       bits2):
        raise TraceError("gamma B0^4 rounding claim fails")
    if trace.d_const != rounding.ceil_int(lambda ctx: _delta2(ctx, N) * b0_8 * b0_8,
                                          bits2):
        raise TraceError("d constant is not the ceiling of delta^2 B0^16")
    x6_need = max(scale_a * scale_a,
                  rounding.ceil_int(lambda ctx: (_delta2(ctx, N) * mult * b0_4) ** 2,
                                    bits2))
    if trace.x6_coeff < x6_need:
        raise TraceError("x^6 coefficient below (gamma B0^4)^2")
    sigma = _adjusted_sigma(fin.points, scale_a, t2, b0_8, tgt)
    if sigma != fin.sigma:
        raise TraceError("sigma does not match its points")
    h = _h_poly(trace.x6_coeff, sigma, trace.d_const)
    if not fin.h_negative_at_b0 or h(b0) >= 0:
        raise TraceError("h(B0) is not negative")
    out = trace.b0_out
    if out <= b0:
        raise TraceError("no progress")
    if h(out - 1) > 0 or h(out) <= 0:
        raise TraceError("outgoing bound is not the h-window edge")


def check_divisor_certificate(cert: DivisorBoundCertificate) -> None:
    if cert.initial_bound != initial_divisor_bound(cert.n):
        raise TraceError("initial bound mismatch")
    b0 = cert.initial_bound
    for tr in cert.traces:
        if tr.n != cert.n or tr.b0_in != b0:
            raise TraceError("broken trace chain")
        check_trace(tr)
        b0 = tr.b0_out
    if b0 != cert.final_bound or b0 <= cert.target_bound:
        raise TraceError("final bound does not clear the target")
    if c_exclusion_bound(cert.n, cert.final_bound) < cert.c_exclusion:
        raise TraceError("c exclusion bound overstated")


# --- the full driver --------------------------------------------------------

@dataclass(frozen=True)
class StabEntry:
    prime: int
    required_bound: int
    initial_bound: int
    certificate: DivisorBoundCertificate | None   # None when initial suffices


@dataclass(frozen=True)
class StabCertificate:
    """a_p(c) is never a square for any even 4 <= c <= x_bound and any prime
    5 <= p <= prime_cap; plus direct sieve facts for c in {1, 2, 3, 4}."""
    x_bound: int
    prime_cap: int
    entries: tuple[StabEntry, ...]
    small_c: tuple[tuple[int, SieveCertificate], ...]
    gamma_doublings: int


SMALL_C_PRIME_CAP = 50


def _small_c_certificates() -> list[tuple[int, SieveCertificate]]:
    out = []
    for c in (1, 2, 3, 4):
        cert = find_sieve_certificate(c, NumeratorTarget(), SMALL_C_PRIME_CAP,
                                      max_values=None)
        if cert is None or cert.start > 3:
            raise EscalationStuck(f"no small-c certificate for c={c}")
        out.append((c, cert))
    return out


def stab_entry_for_prime(p: int, x_bound: int) -> StabEntry:
    """The per-prime unit of work: escalate unless the initial bound suffices."""
    required = required_divisor_bound(p, x_bound)
    b0 = initial_divisor_bound(p)
    if b0 >= required:
        return StabEntry(p, required, b0, None)
    return StabEntry(p, required, b0, prove_divisor_bound(p, required))


def verify_no_squares_up_to(x_bound: int, progress=None,
                            jobs: int = 1) -> StabCertificate:
    """Run the per-prime escalation for every prime that could matter.

    Primes above the cap need no work: their initial bound already exceeds
    what the target requires.  c in {1, 2, 3} (and the even c = 4 below the
    lattice's reach) carry direct modular certificates.  Distinct primes are
    independent; jobs > 1 farms them out, with the aggregate ordered by
    prime regardless of completion order.
    """
    if x_bound < 4:
        raise ValueError("x_bound must be >= 4")
    cap = stable_iterate_bound(x_bound)
    primes = [p for p in primes_to(cap) if p >= 5]
    entries: list[StabEntry] = []
    if jobs > 1:
        import concurrent.futures as cf
        with cf.ProcessPoolExecutor(max_workers=jobs) as ex:
            futs = {ex.submit(stab_entry_for_prime, p, x_bound): p for p in primes}
            done = {}
            for fut in cf.as_completed(futs):
                done[futs[fut]] = fut.result()
                if progress:
                    progress(futs[fut], cap)
        entries = [done[p] for p in primes]
    else:
        for p in primes:
            entries.append(stab_entry_for_prime(p, x_bound))
            if progress:
                progress(p, cap)
    doublings = sum(e.certificate.gamma_doublings
                    for e in entries if e.certificate is not None)
    return StabCertificate(x_bound, cap, tuple(entries),
                           tuple(_small_c_certificates()), doublings)


def check_stab_certificate(cert: StabCertificate) -> None:
    cap = stable_iterate_bound(cert.x_bound)
    if cert.prime_cap < cap:
        raise TraceError("prime cap below the recomputed requirement")
    primes = [p for p in primes_to(cert.prime_cap) if p >= 5]
    if [e.prime for e in cert.entries] != primes:
        raise TraceError("prime coverage incomplete")
    for e in cert.entries:
        if c_exclusion_bound(e.prime, e.required_bound) < cert.x_bound:
            raise TraceError(f"required bound too small at p={e.prime}")
        if e.certificate is None:
            if e.initial_bound < e.required_bound:
                raise TraceError(f"missing escalation at p={e.prime}")
            if initial_divisor_bound(e.prime) != e.initial_bound:
                raise TraceError(f"initial bound mismatch at p={e.prime}")
        else:
            if e.certificate.n != e.prime or \
                    e.certificate.target_bound != e.required_bound:
                raise TraceError(f"certificate mismatch at p={e.prime}")
            check_divisor_certificate(e.certificate)
    for c, sc in cert.small_c:
        verify_sieve_certificate(sc, c, NumeratorTarget())
        if sc.start > 3:
            raise TraceError(f"small-c certificate starts too late for c={c}")
