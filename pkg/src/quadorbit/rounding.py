"""Certified rounding of real expressions via interval arithmetic.

Every integer or boolean produced here is exact for the true real value, not
for a floating approximation.  Callers pass a *builder*: a function taking an
interval context and returning an interval enclosure of the quantity of
interest.  If the enclosure is too wide to decide the question, the working
precision is doubled and the expression rebuilt, up to a hard cap.
"""
from __future__ import annotations

import math
import os
from fractions import Fraction
from typing import Callable

from mpmath.ctx_iv import MPIntervalContext

MAX_BITS = 1 << 22
DEFAULT_BITS = max(64, int(os.environ.get("QUADORBIT_PREC_BITS", "128")))

Builder = Callable[[MPIntervalContext], object]


class PrecisionExhausted(ArithmeticError):
    """A certified decision failed even at the precision cap."""


def iv_context(bits: int) -> MPIntervalContext:
    ctx = MPIntervalContext()
    ctx.prec = bits
    return ctx


def _mpf_to_fraction(raw) -> Fraction:
    sign, man, exp, _bc = raw
    if man == 0:
        if exp == 0:
            return Fraction(0)
        raise PrecisionExhausted("non-finite interval endpoint")
    f = Fraction(int(man)) * Fraction(2) ** exp
    return -f if sign else f


def iv_endpoints(x) -> tuple[Fraction, Fraction]:
    """Exact dyadic endpoints of an interval; lo <= true value <= hi."""
    lo, hi = x._mpi_
    return _mpf_to_fraction(lo), _mpf_to_fraction(hi)


def _refine(build: Builder, pick, bits: int | None, max_bits: int):
    bits = bits or DEFAULT_BITS
    while bits <= max_bits:
        lo, hi = iv_endpoints(build(iv_context(bits)))
        res = pick(lo, hi)
        if res is not None:
            return res
        bits *= 2
    raise PrecisionExhausted(f"undecided at {max_bits} bits")


def nearest_int(build: Builder, bits: int | None = None, max_bits: int = MAX_BITS) -> int:
    """Half-up nearest integer of the exact value: floor(x + 1/2)."""
    half = Fraction(1, 2)

    def pick(lo, hi):
        a, b = math.floor(lo + half), math.floor(hi + half)
        return a if a == b else None

    return _refine(build, pick, bits, max_bits)


def ceil_int(build: Builder, bits: int | None = None, max_bits: int = MAX_BITS) -> int:
    def pick(lo, hi):
        a, b = math.ceil(lo), math.ceil(hi)
        return a if a == b else None

    return _refine(build, pick, bits, max_bits)


def floor_int(build: Builder, bits: int | None = None, max_bits: int = MAX_BITS) -> int:
    def pick(lo, hi):
        a, b = math.floor(lo), math.floor(hi)
        return a if a == b else None

    return _refine(build, pick, bits, max_bits)


def floor_of_upper(build: Builder, bits: int | None = None, retries: int = 4) -> int:
    """floor(hi) after a few narrowing attempts.

    Sound whenever an over-estimate is the safe direction; retries only
    sharpen the answer.
    """
    bits = bits or DEFAULT_BITS
    last = None
    for _ in range(retries):
        lo, hi = iv_endpoints(build(iv_context(bits)))
        last = math.floor(hi)
        if math.floor(lo) == last:
            return last
        bits *= 2
    return last


def floor_of_lower(build: Builder, bits: int | None = None, retries: int = 4) -> int:
    """floor(lo); the safe direction when an under-estimate is sound."""
    bits = bits or DEFAULT_BITS
    last = None
    for _ in range(retries):
        lo, hi = iv_endpoints(build(iv_context(bits)))
        last = math.floor(lo)
        if math.floor(hi) == last:
            return last
        bits *= 2
    return last


def certified_less(build: Builder, rhs: Fraction | int,
                   bits: int | None = None, max_bits: int = MAX_BITS) -> bool:
    """Decide expr < rhs with certainty (raises if the value equals rhs)."""
    rhs = Fraction(rhs)

    def pick(lo, hi):
        if hi < rhs:
            return True
        if lo >= rhs:
            return False
        return None

    return _refine(build, pick, bits, max_bits)


def is_certainly_less(build: Builder, rhs: Fraction | int, bits: int | None = None) -> bool:
    """One-sided check: True only when expr < rhs holds at this precision."""
    _lo, hi = iv_endpoints(build(iv_context(bits or DEFAULT_BITS)))
    return hi < Fraction(rhs)


def is_certainly_greater(build: Builder, rhs: Fraction | int, bits: int | None = None) -> bool:
    lo, _hi = iv_endpoints(build(iv_context(bits or DEFAULT_BITS)))
    return lo > Fraction(rhs)


def interval_fractions(build: Builder, bits: int | None = None) -> tuple[Fraction, Fraction]:
    return iv_endpoints(build(iv_context(bits or DEFAULT_BITS)))
