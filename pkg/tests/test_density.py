from fractions import Fraction

import pytest

from quadorbit.density import (ExcludedPrime, density_profile, divides_orbit,
                               profile_rows)
from quadorbit.sieve import jacobi


def test_divides_orbit_examples():
    assert divides_orbit(3, 2, 0)        # numerator of f^2(0) for c=2 is 3
    assert not divides_orbit(5, 2, 0)    # orbit mod 5 never returns to 0
    with pytest.raises(ExcludedPrime):
        divides_orbit(2, 2, 0)
    with pytest.raises(ExcludedPrime):
        divides_orbit(3, 5, Fraction(1, 3))


def test_nonresidue_forces_non_dividing():
    for c in (2, 5, 6, 7, 10):
        for p in range(3, 300, 2):
            if not all(p % d for d in range(2, p)) or (2 * c) % p == 0:
                continue
            if jacobi(-c % p, p) == -1:
                assert not divides_orbit(p, c, 0), (p, c)


def test_exact_zero_exclusion():
    # t = 1/2 maps to 0 under one step of x^2 - 1/4: that visit must not
    # count, but later hits of 0 mod p do
    c = -4
    t = Fraction(1, 2)
    assert divides_orbit(3, c, t) == divides_orbit(3, c, 0)
    # direct numerator hit: t itself divisible by p counts when t != 0
    assert divides_orbit(7, 5, Fraction(7, 2))


def test_profile_counts_and_invariant():
    prof = density_profile(2, 0, 10 ** 4)
    assert prof.hypothesis_met
    assert prof.violations == ()
    assert prof.excluded == (2,)
    last = prof.checkpoints[-1]
    assert last.bound == 10 ** 4
    assert 0 < last.fraction < 0.55
    counts = [cp.dividing for cp in prof.checkpoints]
    assert counts == sorted(counts)


def test_profile_hypothesis_banner():
    prof = density_profile(3, 0, 100)   # c + 1 = 4 is a square
    assert not prof.hypothesis_met


def test_profile_deterministic():
    a = density_profile(6, 0, 2000)
    b = density_profile(6, 0, 2000)
    assert a == b
    assert profile_rows(a) == profile_rows(b)
