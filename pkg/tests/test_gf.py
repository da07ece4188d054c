"""Finite-field tables and univariate root counting."""

import pytest

from artifact.gf import IRREDUCIBLE, count_roots, field, poly_gcd, roots


def brute_force_irreducible(p, coeffs):
    """No roots is not enough beyond degree 3; test by trial division."""
    deg = len(coeffs) - 1

    def poly_mod_int(f, g):
        f = list(f)
        while len(f) >= len(g):
            c = f[-1]
            if c:
                s = len(f) - len(g)
                for j in range(len(g)):
                    f[s + j] = (f[s + j] - c * g[j]) % p
            f.pop()
            while f and f[-1] == 0:
                f.pop()
        return f

    # enumerate monic divisors of degree 1..deg//2
    def monics(d):
        if d == 0:
            yield [1]
            return
        for tail in _tuples(d):
            yield list(tail) + [1]

    def _tuples(d):
        if d == 0:
            yield ()
            return
        for rest in _tuples(d - 1):
            for c in range(p):
                yield rest + (c,)

    for d in range(1, deg // 2 + 1):
        for g in monics(d):
            if not poly_mod_int(coeffs, g):
                return False
    return True


@pytest.mark.parametrize("key", sorted(IRREDUCIBLE))
def test_table_entries_irreducible(key):
    p, k = key
    assert len(IRREDUCIBLE[key]) == k + 1
    assert IRREDUCIBLE[key][-1] == 1
    assert brute_force_irreducible(p, IRREDUCIBLE[key])


@pytest.mark.parametrize("p,k", [(2, 2), (2, 4), (3, 2), (3, 3), (5, 2)])
def test_field_axioms_sampled(p, k):
    F = field(p, k)
    els = list(F.elements())
    assert len(els) == p ** k
    for a in els:
        assert F.add(a, 0) == a
        assert F.mul(a, 1) == a
        assert F.add(a, F.neg(a)) == 0
        if a:
            assert F.mul(a, F.inv(a)) == 1
    # associativity spot checks on a small slice
    for a in els[: min(8, len(els))]:
        for b in els[: min(8, len(els))]:
            assert F.mul(a, b) == F.mul(b, a)
            for c in els[:4]:
                assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
                assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))


def test_frobenius_fixed_field():
    F = field(3, 2)
    fixed = [a for a in F.elements() if F.pow(a, 3) == a]
    assert sorted(fixed) == [0, 1, 2]


def test_root_counting_matches_scan():
    for (p, k) in [(2, 2), (2, 3), (3, 2), (5, 2)]:
        F = field(p, k)
        # f = x^2 + x: roots 0 and -1 in any field of char p
        f = [0, 1, 1]
        assert count_roots(F, f) == len(roots(F, f)) == 2
        # x^q - x vanishes identically on F
        q = F.order
        g = [0] * (q + 1)
        g[1] = F.neg(1)
        g[q] = 1
        assert count_roots(F, g) == q
    # x^2+x+1 has no roots over F_2 but splits over F_4
    f = [1, 1, 1]
    assert count_roots(field(2, 1), f) == 0
    assert count_roots(field(2, 2), f) == 2


def test_gcd_monic():
    F = field(5, 1)
    g = poly_gcd(F, [0, 0, 1], [0, 1])  # gcd(x^2, x) = x
    assert g == [0, 1]
