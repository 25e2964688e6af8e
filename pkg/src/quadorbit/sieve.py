"""Modular engine for the critical-orbit sequences.

Reduces the numerator sequence a_n, or a factor value sequence g(f^n(0)),
modulo small primes, detects the eventual cycle, and extracts certificates
of the form "from index n0 on, every value is a quadratic non-residue mod
p", which prove all but finitely many terms non-square in Q.  Also houses
the congruence table machinery and the fixed congruence rule families.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from .factors import FactorPoly
from .orbit import (DEFAULT_BIT_BUDGET, BitBudgetExceeded, critical_numerators,
                    is_rational_square, isqrt_if_square, orbit_point)
from .primes import primes_to


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd positive n."""
    if n <= 0 or n % 2 == 0:
        raise ValueError("n must be odd and positive")
    a %= n
    result = 1
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


@dataclass(frozen=True)
class ModOrbit:
    """Orbit of 0 under x -> x^2 + c0 mod p: tail then cycle.

    tail[k] = value after k steps (tail[0] = 0); the cycle starts where the
    tail ends.
    """
    p: int
    c0: int
    tail: tuple[int, ...]
    cycle: tuple[int, ...]

    def value(self, k: int) -> int:
        if k < len(self.tail):
            return self.tail[k]
        return self.cycle[(k - len(self.tail)) % len(self.cycle)]


def orbit_mod(c: int, p: int) -> ModOrbit:
    if p % 2 == 0 or p < 3:
        raise ValueError("p must be an odd prime")
    if c % p == 0:
        raise ValueError(f"prime {p} divides c = {c}")
    c0 = pow(c % p, -1, p)
    seen: dict[int, int] = {}
    values: list[int] = []
    x = 0
    while x not in seen:
        seen[x] = len(values)
        values.append(x)
        x = (x * x + c0) % p
    start = seen[x]
    return ModOrbit(p, c0, tuple(values[:start]), tuple(values[start:]))


class NumeratorTarget:
    """The integer sequence a_n itself, reduced by the pair recurrence."""

    label = "a_n"

    def ok_mod(self, c: int, k: int) -> bool:
        return math.gcd(c, k) == 1

    def state0(self, c: int, k: int):
        return (1, 1)  # (a_1, c^(2^0 - 1)) mod k

    def step(self, st, c: int, k: int):
        a, q = st
        q = q * q * c % k
        return ((a * a + q) % k, q)

    def value(self, st, c: int, k: int) -> int:
        return st[0]

    def exact(self, c: int, n: int, bit_budget: int = DEFAULT_BIT_BUDGET) -> Fraction:
        return Fraction(critical_numerators(c, n, bit_budget)[-1])

    def describe(self, c: int) -> str:
        return f"a_n(c={c})"


class FactorTarget:
    """The sequence g(f^n(0)) for a named factor polynomial g."""

    def __init__(self, g: FactorPoly):
        self.g = g
        self.label = g.name

    def ok_mod(self, c: int, k: int) -> bool:
        if math.gcd(c, k) != 1:
            return False
        return all(math.gcd(co.denominator, k) == 1 for co in self.g.coeffs)

    def state0(self, c: int, k: int):
        c0 = pow(c % k, -1, k)
        return (c0, c0)  # (x_1, c0)

    def step(self, st, c: int, k: int):
        x, c0 = st
        return ((x * x + c0) % k, c0)

    def value(self, st, c: int, k: int) -> int:
        x, _ = st
        acc = 0
        for co in reversed(self.g.coeffs):
            num = co.numerator % k
            den = pow(co.denominator % k, -1, k)
            acc = (acc * x + num * den) % k
        return acc

    def exact(self, c: int, n: int, bit_budget: int = DEFAULT_BIT_BUDGET) -> Fraction:
        return self.g(orbit_point(c, n, bit_budget))

    def describe(self, c: int) -> str:
        return f"{self.g.name}(f^n(0)) for c={c}"


Target = NumeratorTarget | FactorTarget


def reduced_sequence(c: int, target: Target, k: int) -> tuple[list[int], int, int]:
    """Values t_1.. with cycle data.

    Returns (values, m, L): the state is periodic with period L from step m
    (1-indexed), and values covers 1 .. m + 2L.
    """
    seen: dict = {}
    states = []
    st = target.state0(c, k)
    n = 1
    while st not in seen:
        seen[st] = n
        states.append(st)
        st = target.step(st, c, k)
        n += 1
    m = seen[st]
    L = n - m
    total = m + 2 * L
    while len(states) < total:
        states.append(target.step(states[-1], c, k))
    values = [target.value(s, c, k) for s in states[:total]]
    return values, m, L


@dataclass(frozen=True)
class SieveCertificate:
    """From index `start` on, the reduced target sequence mod p runs through
    `values` periodically, and every listed value is a non-residue mod p."""
    p: int
    start: int
    kind: str               # "constant" | "two_cycle" | "cycle"
    values: tuple[int, ...]
    target: str

    @property
    def period(self) -> int:
        return len(self.values)


def _certificate_from_cycle(c: int, target: Target, p: int,
                            max_values: int | None) -> SieveCertificate | None:
    values, m, L = reduced_sequence(c, target, p)
    window = values[m - 1: m - 1 + L]
    d = next(cand for cand in range(1, L + 1)
             if L % cand == 0 and all(window[i] == window[i % cand] for i in range(L)))
    pattern = window[:d]
    if max_values is not None and len(set(pattern)) > max_values:
        return None
    if any(jacobi(v, p) != -1 for v in pattern):
        return None
    start = m
    while start > 1 and values[start - 2] == values[start - 2 + d]:
        start -= 1
    kind = "constant" if d == 1 else ("two_cycle" if d == 2 else "cycle")
    return SieveCertificate(p, start, kind, tuple(pattern), target.describe(c))


def find_sieve_certificate(c: int, target: Target, p_max: int = 500,
                           max_values: int | None = 2,
                           skip: tuple[int, ...] = ()) -> SieveCertificate | None:
    """Smallest odd prime p <= p_max certifying the target eventually
    non-residue mod p; None when no prime qualifies."""
    for p in primes_to(p_max):
        if p == 2 or p in skip or not target.ok_mod(c, p):
            continue
        cert = _certificate_from_cycle(c, target, p, max_values)
        if cert is not None:
            return cert
    return None


def certificate_at_prime(c: int, target: Target, p: int) -> SieveCertificate | None:
    """Derive the certificate at a pinned prime (no search)."""
    if not target.ok_mod(c, p):
        return None
    return _certificate_from_cycle(c, target, p, max_values=None)


def verify_sieve_certificate(cert: SieveCertificate, c: int, target: Target) -> None:
    """Independent re-verification by simulating the reduced sequence."""
    p, d = cert.p, cert.period
    if not target.ok_mod(c, p):
        raise AssertionError("target not reducible mod p")
    for v in cert.values:
        if jacobi(v, p) != -1:
            raise AssertionError(f"{v} is not a non-residue mod {p}")
    values, m, L = reduced_sequence(c, target, p)
    if L % d != 0:
        raise AssertionError("claimed period does not divide the state period")
    if cert.start > m:
        raise AssertionError("claimed start lies beyond the verified cycle entry")
    for n in range(cert.start, len(values) + 1):
        if values[n - 1] != cert.values[(n - cert.start) % d]:
            raise AssertionError(f"value mismatch at index {n}")


class TermUnresolved(ArithmeticError):
    """A single-term non-square check ran out of budget."""


@dataclass(frozen=True)
class TermCheck:
    n: int
    nonsquare: bool
    witness_kind: str        # "negative" | "exact" | "jacobi" | "square"
    witness: int | None = None   # prime for jacobi; root for square


def _estimated_term_bits(c: int, n: int) -> int:
    # both target kinds scale like c^(2^(n-1)); saturate to avoid huge shifts
    return ((1 << min(n - 1, 63)) - 1) * max(1, abs(c).bit_length())


def check_term_nonsquare(c: int, target: Target, n: int,
                         prime_budget: int = 100,
                         bit_budget: int = DEFAULT_BIT_BUDGET) -> TermCheck:
    """Prove one term of the target sequence non-square (or expose a square).

    Prefers the exact test when the term fits the bit budget, falling back to
    a Jacobi-witness search over primes up to the budget.
    """
    val = None
    if _estimated_term_bits(c, n) <= bit_budget:
        try:
            val = target.exact(c, n, bit_budget)
        except BitBudgetExceeded:
            val = None
    if val is not None:
        if val < 0:
            return TermCheck(n, True, "negative")
        if is_rational_square(val):
            root = isqrt_if_square(val.numerator)
            return TermCheck(n, False, "square", root)
        return TermCheck(n, True, "exact")
    for p in primes_to(prime_budget):
        if p == 2 or not target.ok_mod(c, p):
            continue
        values, m, L = reduced_sequence(c, target, p)
        idx = n if n <= len(values) else m + (n - m) % L
        if jacobi(values[idx - 1], p) == -1:
            return TermCheck(n, True, "jacobi", p)
    raise TermUnresolved(f"term {n} of {target.describe(c)} unresolved")


# --- congruence table -------------------------------------------------------

SQUARE_VALUES_COMPOSITE = {4: frozenset({0, 1}), 8: frozenset({0, 1, 4})}


def _nonsquare_value_mod(v: int, k: int) -> bool:
    if k in SQUARE_VALUES_COMPOSITE:
        return v % k not in SQUARE_VALUES_COMPOSITE[k]
    return jacobi(v, k) == -1


@dataclass(frozen=True)
class CongruenceTable:
    """Residue classes of c (per modulus) whose numerator sequence is
    certified eventually non-residue, assuming c + 1 is not a square."""
    rows: dict[int, tuple[int, ...]]
    provenance: str

    def moduli(self) -> list[int]:
        return sorted(self.rows)


def _numerator_values_mod(c_class: int, k: int) -> tuple[list[int], int, int]:
    return reduced_sequence(c_class, NumeratorTarget(), k)


def _admission_patterns(c_class: int, k: int) -> dict[str, bool]:
    """The two published admission patterns plus the divisibility closure.

    odd_from_5:   every odd index >= 5 is directly non-residue.
    offsets_7_5:  indices 7, 10, 13, ... and 5, 8, 11, ... are non-residues.
    closure:      every odd index >= 5 coprime to 3 is non-residue (the rest
                  follow from rigid divisibility through indices 2, 3, 4).
    """
    values, m, L = _numerator_values_mod(c_class, k)
    W = m + 6 * L + 12
    if len(values) < W:
        # extend by state periodicity: the value at 1-indexed position i > m
        # equals the one at m + (i - m) mod L
        values = values + [values[m - 1 + (i + 1 - m) % L]
                           for i in range(len(values), W)]
    ns = [False] + [_nonsquare_value_mod(v, k) for v in values[:W]]
    return {
        "odd_from_5": all(ns[n] for n in range(5, W + 1, 2)),
        "offsets_7_5": (all(ns[n] for n in range(7, W + 1, 3))
                        and all(ns[n] for n in range(5, W + 1, 3))),
        "closure": all(ns[n] for n in range(5, W + 1, 2) if n % 3 != 0),
    }


def regenerate_congruence_table(modulus_bound: int = 100) -> CongruenceTable:
    """Recompute the table from the two published admission patterns."""
    moduli = [4, 8] + [p for p in primes_to(modulus_bound - 1) if p % 2 == 1]
    rows: dict[int, tuple[int, ...]] = {}
    for k in sorted(moduli):
        admitted = []
        for r in range(1, k):
            if math.gcd(r, k) != 1:
                continue
            pats = _admission_patterns(r, k)
            if pats["odd_from_5"] or pats["offsets_7_5"]:
                admitted.append(r)
        rows[k] = tuple(admitted)
    return CongruenceTable(rows, "regenerated")


def verify_row_coverage(k: int, residue: int) -> str | None:
    """Sound verification that a table row certifies all indices n >= 2.

    Returns the admitting pattern name, or None when no sound pattern holds.
    Even indices ride on rigid divisibility from index 2 (the c+1 hypothesis),
    multiples of 3 and 4 on the unconditionally non-square indices 3 and 4.
    """
    pats = _admission_patterns(residue, k)
    for name in ("odd_from_5", "offsets_7_5", "closure"):
        if pats[name]:
            return name
    return None


def load_static_congruence_table() -> CongruenceTable:
    text = resources.files("quadorbit.data").joinpath("congruence_table.txt").read_text()
    return parse_congruence_table(text, "static")


def parse_congruence_table(text: str, provenance: str) -> CongruenceTable:
    rows: dict[int, tuple[int, ...]] = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        mod, rest = line.split(":", 1)
        rows[int(mod)] = tuple(sorted(int(t) for t in rest.split()))
    return CongruenceTable(rows, provenance)


def format_congruence_table(table: CongruenceTable) -> str:
    lines = [f"{k}: {' '.join(str(r) for r in table.rows[k])}" for k in table.moduli()]
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class TableDiff:
    modulus: int
    residue: int
    side: str       # "static_only" | "regenerated_only"
    note: str


def compare_congruence_tables(regen: CongruenceTable,
                              static: CongruenceTable) -> list[TableDiff]:
    """Row-for-row diff, classifying each discrepancy instead of guessing.

    static_only rows are re-verified through the divisibility closure; a
    failure there would mean an unsound published row (none is known).
    regenerated_only rows are sound classes absent from the published table.
    """
    diffs: list[TableDiff] = []
    for k in sorted(set(regen.rows) | set(static.rows)):
        rs = set(regen.rows.get(k, ()))
        ss = set(static.rows.get(k, ()))
        for r in sorted(ss - rs):
            covered = verify_row_coverage(k, r)
            note = (f"covered by pattern '{covered}'" if covered
                    else "NOT verifiable by any implemented pattern")
            diffs.append(TableDiff(k, r, "static_only", note))
        for r in sorted(rs - ss):
            diffs.append(TableDiff(k, r, "regenerated_only",
                                   "sound class absent from the published table"))
    return diffs


def match_congruence_rows(c: int, table: CongruenceTable) -> list[tuple[int, int]]:
    """(modulus, residue) pairs of the table matched by this c."""
    out = []
    for k in table.moduli():
        r = c % k
        if r in table.rows[k]:
            out.append((k, r))
    return out


# --- fixed congruence rule families for c = -m^2 ----------------------------
# Residue classes of m (per modulus) under which the g2-value sequence is
# eventually non-residue.  The first family needs only m != 4; the second
# additionally needs m - 1 to be a non-square.

M_RULES_UNCONDITIONAL: dict[int, tuple[int, ...]] = {
    4: (3,),
    5: (3,),
    7: (2, 5, 6),
    11: (4, 6, 7),
    13: (8, 10),
    17: (2, 4, 7, 8, 9, 11, 15),
    19: (3, 5, 11),
    23: (9, 11, 14, 15, 18, 20, 21, 22),
    29: (3, 19, 26),
    31: (2, 12, 30),
    37: (6, 20),
    41: (12, 14, 27, 29),
    43: (15, 21, 30),
    47: (9, 22, 38, 46),
}

M_RULES_NEED_M_MINUS_1: dict[int, tuple[int, ...]] = {
    3: (2,),
    8: (5,),
    11: (10,),
    19: (18,),
    23: (2, 13),
    29: (8, 10, 14),
    31: (9, 26),
    37: (13, 31),
    41: (3, 11, 19, 37, 38),
    43: (22, 36, 39, 42),
    47: (3, 10),
}


@dataclass(frozen=True)
class MRuleMatch:
    modulus: int
    residue: int
    needs_m_minus_1_nonsquare: bool


def match_m_rules(m: int) -> list[MRuleMatch]:
    out = []
    for k, residues in sorted(M_RULES_UNCONDITIONAL.items()):
        if m % k in residues:
            out.append(MRuleMatch(k, m % k, False))
    for k, residues in sorted(M_RULES_NEED_M_MINUS_1.items()):
        if m % k in residues:
            out.append(MRuleMatch(k, m % k, True))
    return out


def verify_m_rule(k: int, residue: int, needs_m_minus_1: bool) -> bool:
    """Check a rule row by simulating the g2-value sequence mod k.

    The value at index n has numerator w_{n+1} in a rigid divisibility
    sequence with w_2 = m - 1 and w_3 = m^3 - m^2 + 1.  Indices with
    3 | n + 1 are always exempt (w_3 is non-square for m != 4); indices
    with 2 | n + 1 are exempt exactly when m - 1 is a non-square.  A row is
    valid when every remaining index shows a non-residue.
    """
    # orbit of 0 under x^2 + c0 with c = -m^2; values g2 = x + 1/m
    m = residue
    if math.gcd(m, k) != 1:
        return False
    c0_den = (-(m * m)) % k
    if math.gcd(c0_den, k) != 1:
        return False
    c0 = pow(c0_den, -1, k)
    inv_m = pow(m % k, -1, k)
    seen: dict[int, int] = {}
    xs: list[int] = []
    x = 0
    n = 1
    while True:
        x = (x * x + c0) % k
        if x in seen:
            pre, L = seen[x], n - seen[x]
            break
        seen[x] = n
        xs.append(x)
        n += 1
    W = pre + 6 * L + 12
    while len(xs) < W:
        xs.append((xs[-1] * xs[-1] + c0) % k)
    vals = [None] + [(xv + inv_m) % k for xv in xs]  # vals[n] = g2-value at n
    def exempt(i: int) -> bool:
        if (i + 1) % 3 == 0:
            return True
        return needs_m_minus_1 and (i + 1) % 2 == 0
    return all(_nonsquare_value_mod(vals[i], k)
               for i in range(2, W + 1) if not exempt(i))


def prime_residue_rule_match(x: int, residue: int, modulus: int,
                             fac: dict[int, int]) -> list[int]:
    """Primes p | x with p = residue (mod modulus), from a factorization."""
    return sorted(p for p in fac if p % modulus == residue)


@dataclass(frozen=True)
class FixedRuleMatch:
    family: str          # "c-neg-one-prime" | "m-neg-one-prime" | "m-list"
    modulus: int
    residue: int
    requires_nonsquare: str | None   # "c+1" | "m-1" | None


def match_fixed_rules(c: int | None = None, m: int | None = None) -> list[FixedRuleMatch]:
    """All fixed congruence rules applying to this c (numerator track) or m
    (g2 track), with the extra non-square hypotheses each relies on.

    The prime families use that -1 (and for the 7 mod 8 family also -2) is a
    non-residue at the matched prime.
    """
    from .primes import factorize

    out: list[FixedRuleMatch] = []
    if c is not None and c > 0:
        for p in factorize(c + 1):
            if p % 4 == 3:
                out.append(FixedRuleMatch("c-neg-one-prime", p, p - 1, "c+1"))
    if m is not None and m > 1:
        for p in factorize(m + 1):
            if p % 8 == 7:
                out.append(FixedRuleMatch("m-neg-one-prime", p, p - 1, None))
            elif p % 8 == 3:
                out.append(FixedRuleMatch("m-neg-one-prime", p, p - 1, "m-1"))
        for rule in match_m_rules(m):
            out.append(FixedRuleMatch(
                "m-list", rule.modulus, rule.residue,
                "m-1" if rule.needs_m_minus_1_nonsquare else None))
    return out
