"""Classification and verified irreducibility reports for x^2 + 1/c.

Every integer c outside {0, -1} lands in exactly one of seven classes with
a predicted profile of irreducible-factor counts k_n for the iterates.  The
verifier assembles, per irreducible factor, a chain of certificates (sign
arguments, exact non-square values, modular sieve certificates, congruence
rules, size bounds, lattice certificates) proving the predicted profile,
and every chain is re-checkable offline without re-running any search.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from typing import Any

from . import lattice as lattice_mod
from .bounds import (square_split_inequality, stable_iterate_bound,
                     valuation_split_inequality)
from .factors import (FactorPoly, SPECIAL_S, build_pattern,
                      negative_square_parameter, obstruction,
                      quartic_form_parameter)
from .orbit import critical_numerators, is_perfect_square, isqrt_if_square
from .primes import FactorizationBudget, factorize
from .sieve import (FactorTarget, NumeratorTarget, TermUnresolved,
                    certificate_at_prime, check_term_nonsquare,
                    find_sieve_certificate, load_static_congruence_table,
                    match_congruence_rows, match_m_rules, verify_m_rule,
                    verify_row_coverage, verify_sieve_certificate)


class CaseId(IntEnum):
    SPLIT_BASE = 1              # c = -m^2, m+1 non-square, m != 4
    SPLIT_DEEP_M4 = 2           # c = -16
    SPLIT_SQUARE_S = 3          # c = -(s^2-1)^2, s outside the special set
    SPLIT_SPECIAL_S = 4         # c = -(s^2-1)^2, s in {3, 5, 56}
    QUARTIC_FORM = 5            # c = 4m^2(m^2-1), m >= 3
    QUARTIC_FORM_M2 = 6         # c = 48
    STABLE = 7                  # f^2 irreducible


@dataclass(frozen=True)
class CaseVerdict:
    c: int
    case_id: CaseId
    m: int | None = None
    s: int | None = None

    @property
    def f_reducible(self) -> bool:
        return self.case_id in (CaseId.SPLIT_BASE, CaseId.SPLIT_DEEP_M4,
                                CaseId.SPLIT_SQUARE_S, CaseId.SPLIT_SPECIAL_S)

    @property
    def f2_reducible(self) -> bool:
        return self.case_id is not CaseId.STABLE


def detect_case(c: int) -> CaseVerdict:
    if c in (0, -1):
        raise ValueError("c must avoid 0 and -1")
    m = negative_square_parameter(c)
    if m is not None:
        s = isqrt_if_square(m + 1)
        if m == 4:
            return CaseVerdict(c, CaseId.SPLIT_DEEP_M4, m=m)
        if s is not None:
            cid = CaseId.SPLIT_SPECIAL_S if s in SPECIAL_S else CaseId.SPLIT_SQUARE_S
            return CaseVerdict(c, cid, m=m, s=s)
        return CaseVerdict(c, CaseId.SPLIT_BASE, m=m)
    m = quartic_form_parameter(c)
    if m is not None:
        cid = CaseId.QUARTIC_FORM_M2 if m == 2 else CaseId.QUARTIC_FORM
        return CaseVerdict(c, cid, m=m)
    return CaseVerdict(c, CaseId.STABLE)


@dataclass(frozen=True)
class FactorCountProfile:
    k1: int
    k2: int
    k3: int
    stable: int
    stable_from: int


_PROFILES = {
    CaseId.SPLIT_BASE: FactorCountProfile(2, 2, 2, 2, 1),
    CaseId.SPLIT_DEEP_M4: FactorCountProfile(2, 2, 3, 3, 3),
    CaseId.SPLIT_SQUARE_S: FactorCountProfile(2, 3, 3, 3, 2),
    CaseId.SPLIT_SPECIAL_S: FactorCountProfile(2, 3, 4, 4, 3),
    CaseId.QUARTIC_FORM: FactorCountProfile(1, 2, 2, 2, 2),
    CaseId.QUARTIC_FORM_M2: FactorCountProfile(1, 2, 3, 3, 3),
    CaseId.STABLE: FactorCountProfile(1, 1, 1, 1, 1),
}


def factor_count_profile(verdict: CaseVerdict) -> FactorCountProfile:
    return _PROFILES[verdict.case_id]


# Published sieve primes for the named special splittings; re-derived and
# verified at use, pinned only so reports match the recorded computations.
PINNED_SIEVE_PRIMES: dict[tuple[int, str], int] = {
    (-16, "g21"): 11,
    (-16, "g22"): 5,
    (48, "q1"): 239,
    (48, "v1"): 239,
    (48, "v2"): 41,
    (-64, "h12"): 29,      # s = 3
    (-576, "h12"): 23,     # s = 5
    (-9828225, "h12"): 31,  # s = 56
}


@dataclass
class Effort:
    p_max_schedule: tuple[int, ...] = (500, 1201)
    exact_bit_budget: int = 1 << 20
    residual_prime_budget: int = 100
    lattice_pool: dict[int, Any] | None = None   # prime -> DivisorBoundCertificate
    extended_small_index: bool = False           # also treat index 5 as settled

    @staticmethod
    def fast() -> "Effort":
        return Effort(p_max_schedule=(500,), exact_bit_budget=1 << 16)


Cert = dict[str, Any]


@dataclass
class TrackReport:
    factor: str
    claim: str
    certificates: list[Cert]
    status: str                 # VERIFIED | CONDITIONAL | FAILED
    detail: str = ""


@dataclass
class VerificationReport:
    c: int
    verdict: CaseVerdict
    profile: FactorCountProfile
    tracks: list[TrackReport]
    status: str

    @property
    def verified(self) -> bool:
        return self.status == "VERIFIED"


def _combine(tracks: list[TrackReport]) -> str:
    if any(t.status == "FAILED" for t in tracks):
        return "FAILED"
    if any(t.status == "CONDITIONAL" for t in tracks):
        return "CONDITIONAL"
    return "VERIFIED"


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _exact_nonsquare_cert(label: str, n: int, value: Fraction) -> Cert | None:
    """Exact non-square certificate, or None when the value is a square."""
    num, den = value.numerator, value.denominator
    if value >= 0 and is_perfect_square(num) and is_perfect_square(den):
        return None
    return {"kind": "exact-nonsquare", "target": label, "index": n,
            "value": _frac(value)}


def _sieve_cert_dict(cert) -> Cert:
    return {"kind": "sieve", "p": cert.p, "start": cert.start,
            "cycle_kind": cert.kind, "values": list(cert.values),
            "target": cert.target}


def _residual_certs(c: int, target, lo: int, hi: int, effort: Effort,
                    label: str) -> tuple[list[Cert], list[int], bool]:
    """Exact/Jacobi checks for indices lo..hi; returns (certs, unresolved, square_found)."""
    certs: list[Cert] = []
    unresolved: list[int] = []
    for n in range(lo, hi + 1):
        try:
            tc = check_term_nonsquare(c, target, n, effort.residual_prime_budget,
                                      effort.exact_bit_budget)
        except TermUnresolved:
            unresolved.append(n)
            continue
        if not tc.nonsquare:
            return certs, unresolved, True
        certs.append({"kind": "residual", "target": label, "index": n,
                      "witness_kind": tc.witness_kind, "witness": tc.witness})
    return certs, unresolved, False


def _sieve_track(c: int, g: FactorPoly, first_index: int, effort: Effort,
                 head_certs: list[Cert]) -> TrackReport:
    """Track proved by a sieve certificate plus residual checks below it.

    first_index is the first sequence index the track must cover (1 when the
    even-degree factor has no sign shortcut, 2 when index 1 is handled by a
    sign argument in head_certs).
    """
    target = FactorTarget(g)
    claim = f"{g.name}(f^n(x)) irreducible for all n"
    cert = None
    pin = PINNED_SIEVE_PRIMES.get((c, g.name))
    if pin is not None:
        cert = certificate_at_prime(c, target, pin)
    if cert is None:
        for p_max in effort.p_max_schedule:
            cert = find_sieve_certificate(c, target, p_max,
                                          max_values=None if g.name == "h12" else 2)
            if cert is not None:
                break
    certs = list(head_certs)
    if cert is None:
        return TrackReport(g.name, claim, certs, "CONDITIONAL",
                           "no sieve certificate within the prime schedule")
    certs.append(_sieve_cert_dict(cert))
    res, unresolved, square = _residual_certs(
        c, target, first_index, cert.start - 1, effort, g.name)
    certs.extend(res)
    if square:
        return TrackReport(g.name, claim, certs, "FAILED",
                           "a composition value is an exact square")
    if unresolved:
        return TrackReport(g.name, claim, certs, "CONDITIONAL",
                           f"indices {unresolved} unresolved within budget")
    return TrackReport(g.name, claim, certs, "VERIFIED")


def _negative_values_cert(g: FactorPoly, from_index: int) -> Cert:
    # linear factor x - a with a >= 0 stays negative on the orbit interval
    return {"kind": "negative-values", "factor": g.name, "from_index": from_index,
            "root": _frac(-g.coeffs[0])}


def _g2_track(c: int, m: int, g2: FactorPoly, effort: Effort) -> TrackReport:
    """The x + 1/m factor: congruence rules first, sieve search as fallback."""
    claim = "g2(f^n(x)) irreducible for all n"
    head: list[Cert] = [{"kind": "negative-obstruction", "target": "g2", "index": 1,
                         "value": _frac(obstruction(g2, c, 1).value)}]
    w3 = obstruction(g2, c, 2).value  # (m^3 - m^2 + 1)/m^4
    w3_cert = _exact_nonsquare_cert("g2", 2, w3)
    m1_cert = _exact_nonsquare_cert("m-1", 0, Fraction(m - 1)) if m > 1 else None
    for rule in match_m_rules(m):
        # published rows sometimes verify only with the conditional
        # exemptions; try the unconditional reading first, then widen
        modes = [True] if rule.needs_m_minus_1_nonsquare else [False, True]
        for needs in modes:
            if w3_cert is None:
                continue  # m = 4 territory, handled by its own case
            if needs and m1_cert is None:
                continue
            if not verify_m_rule(rule.modulus, rule.residue, needs):
                continue
            certs = head + [
                {"kind": "m-congruence", "modulus": rule.modulus,
                 "residue": rule.residue, "needs_m_minus_1": needs},
                w3_cert, {"kind": "rigid-divisibility", "through": "w3"}]
            if needs:
                certs += [m1_cert, {"kind": "rigid-divisibility", "through": "w2"}]
            return TrackReport("g2", claim, certs, "VERIFIED")
    for p_mod8, needs_m1 in ((7, False), (3, True)):
        if needs_m1 and m1_cert is None:
            continue
        fac = factorize(m + 1)
        ps = [p for p in fac if p % 8 == p_mod8]
        if ps:
            certs = head + [{"kind": "m-neg-one-prime", "p": min(ps),
                             "mod8": p_mod8}]
            if needs_m1:
                certs += [m1_cert, {"kind": "rigid-divisibility", "through": "w2"}]
            return TrackReport("g2", claim, certs, "VERIFIED")
    return _sieve_track(c, g2, 2, effort, head)


def _verify_split_negative_square(c: int, verdict: CaseVerdict,
                                  effort: Effort) -> list[TrackReport]:
    m, s = verdict.m, verdict.s
    pattern = {g.name: g for g in build_pattern(c)}
    tracks = [TrackReport("f", "factor pattern product identities", [
        {"kind": "factor-pattern", "names": sorted(pattern)}], "VERIFIED")]
    if verdict.case_id in (CaseId.SPLIT_BASE, CaseId.SPLIT_DEEP_M4):
        g1 = pattern["g1"]
        ob1 = obstruction(g1, c, 1).value  # (m+1)/m^2, non-square since m+1 is
        cert = _exact_nonsquare_cert("g1", 1, ob1)
        assert cert is not None  # m+1 non-square in these cases
        tracks.append(TrackReport(
            "g1", "g1(f^n(x)) irreducible for all n",
            [cert, _negative_values_cert(g1, 1)], "VERIFIED"))
    else:
        h1, h2 = pattern["h1"], pattern["h2"]
        if verdict.case_id is CaseId.SPLIT_SQUARE_S:
            val = obstruction(h1, c, 1).value  # (s^3 - s + 1)/m^2
            cert = _exact_nonsquare_cert("h1", 1, val)
            assert cert is not None  # s outside the special set
            tracks.append(TrackReport(
                "h1", "h1(f^n(x)) irreducible for all n",
                [cert, _negative_values_cert(h1, 1)], "VERIFIED"))
        else:
            h11, h12 = pattern["h11"], pattern["h12"]
            val = obstruction(h11, c, 1).value  # (m t + 1)/m^2
            cert = _exact_nonsquare_cert("h11", 1, val)
            assert cert is not None  # the three numerators factor non-square
            tracks.append(TrackReport(
                "h11", "h11(f^n(x)) irreducible for all n",
                [cert, _negative_values_cert(h11, 2)], "VERIFIED"))
            head = [{"kind": "negative-obstruction", "target": "h12", "index": 1,
                     "value": _frac(obstruction(h12, c, 1).value)}]
            tracks.append(_sieve_track(c, h12, 2, effort, head))
        head = [{"kind": "negative-obstruction", "target": "h2", "index": 1,
                 "value": _frac(obstruction(h2, c, 1).value)}]
        tracks.append(_sieve_track(c, h2, 2, effort, head))
    if verdict.case_id is CaseId.SPLIT_DEEP_M4:
        # g2 composed once stays irreducible by sign; the second composition
        # splits into g21 * g22, which carry their own tracks
        g2 = pattern["g2"]
        tracks.append(TrackReport(
            "g2", "g2(f(x)) irreducible",
            [{"kind": "negative-obstruction", "target": "g2", "index": 1,
              "value": _frac(obstruction(g2, c, 1).value)}], "VERIFIED"))
        for name in ("g21", "g22"):
            g = pattern[name]
            disc = g.coeffs[1] ** 2 - 4 * g.coeffs[0]
            head = [{"kind": "negative-discriminant", "factor": name,
                     "value": _frac(disc)}]
            tracks.append(_sieve_track(c, g, 1, effort, head))
    else:
        tracks.append(_g2_track(c, m, pattern["g2"], effort))
    return tracks


def _verify_quartic_form(c: int, verdict: CaseVerdict,
                         effort: Effort) -> list[TrackReport]:
    pattern = {g.name: g for g in build_pattern(c)}
    tracks = [TrackReport("f^2", "factor pattern product identities", [
        {"kind": "factor-pattern", "names": sorted(pattern)},
        {"kind": "case-detection", "case": int(verdict.case_id)}], "VERIFIED")]
    names = ("q1", "q2") if verdict.case_id is CaseId.QUARTIC_FORM else ("q1", "v1", "v2")
    for name in names:
        g = pattern[name]
        disc = g.coeffs[1] ** 2 - 4 * g.coeffs[0]
        head = [{"kind": "negative-discriminant", "factor": name,
                 "value": _frac(disc)}]
        tracks.append(_sieve_track(c, g, 1, effort, head))
    return tracks


_STATIC_TABLE = None


def _static_table():
    global _STATIC_TABLE
    if _STATIC_TABLE is None:
        _STATIC_TABLE = load_static_congruence_table()
    return _STATIC_TABLE


def _estimated_bits(c: int, n: int) -> int:
    return ((1 << (n - 1)) - 1) * max(1, abs(c).bit_length()) + 8


def _prime_fact_cert(c: int, p: int, effort: Effort) -> Cert | None:
    """Certify a_p(c) non-square: exact when small, lattice otherwise."""
    if _estimated_bits(c, p) <= effort.exact_bit_budget:
        a_p = critical_numerators(c, p, effort.exact_bit_budget * 2)[-1]
        if is_perfect_square(a_p):
            return {"kind": "counterexample", "index": p}
        return {"kind": "prime-exact", "index": p}
    pool = effort.lattice_pool or {}
    cert = pool.get(p)
    if cert is not None and cert.c_exclusion >= c:
        return {"kind": "prime-lattice", "index": p, "certificate": cert}
    required = lattice_mod.required_divisor_bound(p, c)
    cert = lattice_mod.prove_divisor_bound(p, required)
    if effort.lattice_pool is not None:
        effort.lattice_pool[p] = cert
    return {"kind": "prime-lattice", "index": p, "certificate": cert}


def _verify_stable(c: int, effort: Effort) -> list[TrackReport]:
    claim = "f^n(x) irreducible for all n"
    certs: list[Cert] = [{"kind": "case-detection", "case": 7}]
    if c < 0:
        certs.append({"kind": "negative-orbit"})
        return [TrackReport("f", claim, certs, "VERIFIED")]
    if c % 2 == 1:
        certs.append({"kind": "odd-two-adic"})
        return [TrackReport("f", claim, certs, "VERIFIED")]
    c1_cert = _exact_nonsquare_cert("a_n", 2, Fraction(c + 1))
    if c1_cert is not None:
        try:
            fac = factorize(c + 1)
        except FactorizationBudget:
            fac = None
        if fac:
            ps = [p for p in fac if p % 4 == 3]
            if ps:
                certs += [{"kind": "neg-one-prime", "p": min(ps)}, c1_cert,
                          {"kind": "rigid-divisibility", "through": "a2"}]
                return [TrackReport("f", claim, certs, "VERIFIED")]
        for k, r in match_congruence_rows(c, _static_table()):
            coverage = verify_row_coverage(k, r)
            if coverage:
                certs += [{"kind": "table-congruence", "modulus": k, "residue": r,
                           "coverage": coverage}, c1_cert,
                          {"kind": "rigid-divisibility", "through": "a2"}]
                return [TrackReport("f", claim, certs, "VERIFIED")]
    if c >= 4:
        try:
            if valuation_split_inequality(c):
                certs.append({"kind": "split-inequality"})
                return [TrackReport("f", claim, certs, "VERIFIED")]
            if is_perfect_square(c) and square_split_inequality(c):
                certs.append({"kind": "square-split-inequality"})
                return [TrackReport("f", claim, certs, "VERIFIED")]
        except FactorizationBudget:
            pass
        m_bound = stable_iterate_bound(c)
        certs.append({"kind": "iterate-bound", "m": m_bound})
        small = [3, 4] + ([5] if effort.extended_small_index else [])
        seq = critical_numerators(c, max(small))
        for i in small:
            if is_perfect_square(seq[i - 1]):
                certs.append({"kind": "counterexample", "index": i})
                return [TrackReport("f", claim, certs, "FAILED",
                                    f"a_{i}({c}) is a perfect square")]
        certs.append({"kind": "small-index-nonsquare", "indices": small})
        first_prime = 7 if effort.extended_small_index else 5
        for p in range(first_prime, m_bound + 1):
            if not _is_prime_small(p):
                continue
            cert = _prime_fact_cert(c, p, effort)
            if cert is None:
                return [TrackReport("f", claim, certs, "CONDITIONAL",
                                    f"prime index {p} unresolved")]
            if cert["kind"] == "counterexample":
                certs.append(cert)
                return [TrackReport("f", claim, certs, "FAILED",
                                    f"a_{p}({c}) is a perfect square")]
            certs.append(cert)
        certs.append({"kind": "rigid-divisibility", "through": "composite-indices"})
        return [TrackReport("f", claim, certs, "VERIFIED")]
    return [TrackReport("f", claim, certs, "CONDITIONAL",
                        "no stable-case route applied")]


def _is_prime_small(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def verify_classification(c: int, effort: Effort | None = None) -> VerificationReport:
    effort = effort if effort is not None else Effort()
    verdict = detect_case(c)
    if verdict.case_id is CaseId.STABLE:
        tracks = _verify_stable(c, effort)
    elif verdict.case_id in (CaseId.QUARTIC_FORM, CaseId.QUARTIC_FORM_M2):
        tracks = _verify_quartic_form(c, verdict, effort)
    else:
        tracks = _verify_split_negative_square(c, verdict, effort)
    return VerificationReport(c, verdict, factor_count_profile(verdict),
                              tracks, _combine(tracks))


def shared_lattice_pool(x_bound: int) -> dict[int, Any]:
    """Pre-proved divisor-bound certificates covering every |c| <= x_bound."""
    pool: dict[int, Any] = {}
    if x_bound < 4:
        return pool
    cap = stable_iterate_bound(x_bound)
    for p in range(5, cap + 1):
        if _is_prime_small(p):
            required = lattice_mod.required_divisor_bound(p, x_bound)
            pool[p] = lattice_mod.prove_divisor_bound(p, required)
    return pool


def verify_range(c_lo: int, c_hi: int, effort: Effort | None = None,
                 progress=None):
    """Reports for every admissible c in [c_lo, c_hi], ascending."""
    effort = effort if effort is not None else Effort()
    if effort.lattice_pool is None:
        effort.lattice_pool = {}
    for c in range(c_lo, c_hi + 1):
        if c in (0, -1):
            continue
        yield verify_classification(c, effort)
        if progress:
            progress(c)


# --- offline rechecking ------------------------------------------------------

def _parse_frac(s: str) -> Fraction:
    num, den = s.split("/")
    return Fraction(int(num), int(den))


def _factor_by_name(c: int, name: str) -> FactorPoly:
    for g in build_pattern(c):
        if g.name == name:
            return g
    raise AssertionError(f"factor {name} not in the pattern for c={c}")


def _target_by_label(c: int, label: str):
    if label == "a_n" or label.startswith("a_n"):
        return NumeratorTarget()
    return FactorTarget(_factor_by_name(c, label))


def recheck_report(report: VerificationReport) -> None:
    """Re-verify every certificate in the report; raises AssertionError."""
    c = report.c
    verdict = detect_case(c)
    if verdict != report.verdict:
        raise AssertionError("case verdict mismatch")
    for track in report.tracks:
        if track.status != "VERIFIED":
            continue
        for cert in track.certificates:
            _recheck_cert(c, verdict, cert)


def _recheck_cert(c: int, verdict: CaseVerdict, cert: Cert) -> None:
    kind = cert["kind"]
    ok = True
    if kind == "case-detection":
        ok = int(verdict.case_id) == cert["case"] if "case" in cert else True
    elif kind == "factor-pattern":
        ok = sorted(g.name for g in build_pattern(c)) == cert["names"]
    elif kind == "negative-orbit":
        ok = c <= -2
    elif kind == "odd-two-adic":
        ok = c > 0 and c % 2 == 1
    elif kind == "exact-nonsquare":
        v = _parse_frac(cert["value"])
        ok = not (v >= 0 and is_perfect_square(v.numerator)
                  and is_perfect_square(v.denominator))
        if ok and cert["target"] not in ("a_n", "m-1") and cert["index"] >= 1:
            g = _factor_by_name(c, cert["target"])
            ok = obstruction(g, c, cert["index"]).value == v
        elif ok and cert["target"] == "a_n":
            ok = v == c + 1 and cert["index"] == 2
        elif ok and cert["target"] == "m-1":
            ok = verdict.m is not None and v == verdict.m - 1
    elif kind == "negative-obstruction":
        g = _factor_by_name(c, cert["target"])
        val = obstruction(g, c, cert["index"]).value
        ok = val < 0 and val == _parse_frac(cert["value"])
    elif kind == "negative-values":
        # linear factor x - a, a >= 0: negative on the orbit interval
        # (-1/m, 0), which the map preserves for c <= -4
        g = _factor_by_name(c, cert["factor"])
        root = _parse_frac(cert["root"])
        ok = g.degree == 1 and root >= 0 and c <= -4 and -g.coeffs[0] == root
        for n in range(max(2, cert["from_index"]), cert["from_index"] + 3):
            ok = ok and obstruction(g, c, n).value < 0
    elif kind == "negative-discriminant":
        g = _factor_by_name(c, cert["factor"])
        ok = g.coeffs[1] ** 2 - 4 * g.coeffs[0] == _parse_frac(cert["value"]) \
            and _parse_frac(cert["value"]) < 0
    elif kind == "sieve":
        from .sieve import SieveCertificate
        sc = SieveCertificate(cert["p"], cert["start"], cert["cycle_kind"],
                              tuple(cert["values"]), cert["target"])
        label = cert["target"].split("(")[0]
        verify_sieve_certificate(sc, c, _target_by_label(c, label))
    elif kind == "residual":
        target = _target_by_label(c, cert["target"])
        n = cert["index"]
        wk = cert["witness_kind"]
        if wk in ("exact", "negative"):
            tc = check_term_nonsquare(c, target, n, prime_budget=0)
            ok = tc.nonsquare
        else:
            from .sieve import jacobi, reduced_sequence
            p = cert["witness"]
            values, m, L = reduced_sequence(c, target, p)
            idx = n if n <= len(values) else m + (n - m) % L
            ok = jacobi(values[idx - 1], p) == -1
    elif kind == "m-congruence":
        ok = verify_m_rule(cert["modulus"], cert["residue"], cert["needs_m_minus_1"]) \
            and verdict.m is not None and verdict.m % cert["modulus"] == cert["residue"]
    elif kind == "m-neg-one-prime":
        p = cert["p"]
        ok = _is_prime_small(p) and verdict.m is not None \
            and (verdict.m + 1) % p == 0 and p % 8 == cert["mod8"]
    elif kind == "neg-one-prime":
        p = cert["p"]
        ok = _is_prime_small(p) and (c + 1) % p == 0 and p % 4 == 3
    elif kind == "table-congruence":
        k, r = cert["modulus"], cert["residue"]
        ok = c % k == r and r in _static_table().rows.get(k, ()) \
            and verify_row_coverage(k, r) is not None \
            and not is_perfect_square(c + 1)
    elif kind == "rigid-divisibility":
        ok = True  # structural; premises carried by sibling certificates
    elif kind == "split-inequality":
        ok = valuation_split_inequality(c)
    elif kind == "square-split-inequality":
        ok = square_split_inequality(c)
    elif kind == "iterate-bound":
        ok = stable_iterate_bound(c) <= cert["m"]
    elif kind == "small-index-nonsquare":
        seq = critical_numerators(c, max(cert["indices"]))
        ok = all(not is_perfect_square(seq[i - 1]) for i in cert["indices"])
    elif kind == "prime-exact":
        p = cert["index"]
        ok = not is_perfect_square(critical_numerators(c, p)[-1])
    elif kind == "prime-lattice":
        dc = cert["certificate"]
        lattice_mod.check_divisor_certificate(dc)
        ok = dc.n == cert["index"] and dc.c_exclusion >= c
    elif kind == "counterexample":
        ok = False
    else:
        raise AssertionError(f"unknown certificate kind {kind}")
    if not ok:
        raise AssertionError(f"certificate failed recheck: {cert}")


# --- JSON serialization -------------------------------------------------------

def _intstr(x: int) -> str | int:
    return str(x) if abs(x) > (1 << 53) - 1 else x


def _jsonify(obj):
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, float)):
        return obj
    if isinstance(obj, int):
        return _intstr(obj)
    if isinstance(obj, Fraction):
        return _frac(obj)
    if hasattr(obj, "__dataclass_fields__"):
        return {k: _jsonify(getattr(obj, k)) for k in obj.__dataclass_fields__}
    raise TypeError(f"cannot serialize {type(obj)}")


def report_to_json(report: VerificationReport) -> dict:
    return {
        "c": _intstr(report.c),
        "case": int(report.verdict.case_id),
        "params": {"m": report.verdict.m, "s": report.verdict.s},
        "k_profile": {"k1": report.profile.k1, "k2": report.profile.k2,
                      "k3": report.profile.k3, "stable": report.profile.stable,
                      "stable_from": report.profile.stable_from},
        "certificates": [{
            "factor": t.factor, "claim": t.claim, "status": t.status,
            "detail": t.detail, "chain": _jsonify(t.certificates),
        } for t in report.tracks],
        "status": report.status,
    }
