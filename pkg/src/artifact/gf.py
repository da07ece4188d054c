"""Small finite fields F_{p^k} for completeness scans of zero sets.

Fields are built from a fixed table of irreducible polynomials so that
scan output is reproducible run to run.  Elements are integers in
0..p^k-1, read as base-p digit vectors (little-endian coefficients of
the residue class).  Multiplication goes through discrete logs w.r.t. a
precomputed primitive element.
"""

from __future__ import annotations

# irreducible g(x) over F_p, ascending coefficients including leading 1
IRREDUCIBLE = {
    (2, 2): (1, 1, 1),          # x^2+x+1
    (2, 3): (1, 1, 0, 1),       # x^3+x+1
    (2, 4): (1, 1, 0, 0, 1),    # x^4+x+1
    (3, 2): (1, 0, 1),          # x^2+1
    (3, 3): (1, 2, 0, 1),       # x^3+2x+1
    (3, 4): (2, 1, 0, 0, 1),    # x^4+x+2
    (5, 2): (2, 0, 1),          # x^2+2
    (5, 3): (1, 1, 0, 1),       # x^3+x+1
    (5, 4): (2, 0, 0, 0, 1),    # x^4+2
}

_cache = {}


class GF:
    """F_{p^k} with elements encoded as ints in 0..p^k-1."""

    def __init__(self, p, k):
        if k == 1:
            self.modulus = None
        else:
            try:
                self.modulus = IRREDUCIBLE[(p, k)]
            except KeyError:
                raise ValueError("no irreducible polynomial on file for "
                                 "GF(%d^%d)" % (p, k)) from None
        self.p = p
        self.k = k
        self.order = p ** k
        self._log = None
        self._exp = None
        if k > 1:
            self._build_tables()

    def _build_tables(self):
        p, k, q = self.p, self.k, self.order
        # find a primitive element by trial
        for g in range(2, q):
            if self._is_primitive(g):
                break
        else:
            raise RuntimeError("no primitive element found")  # unreachable
        exp = [1] * (q - 1)
        log = [0] * q
        cur = 1
        for i in range(q - 1):
            exp[i] = cur
            log[cur] = i
            cur = self._mul_slow(cur, g)
        self._exp = exp
        self._log = log

    def _digits(self, a):
        out = []
        for _ in range(self.k):
            out.append(a % self.p)
            a //= self.p
        return out

    def _undigits(self, ds):
        a = 0
        for d in reversed(ds):
            a = a * self.p + d
        return a

    def _mul_slow(self, a, b):
        p, k = self.p, self.k
        da, db = self._digits(a), self._digits(b)
        prod = [0] * (2 * k - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] = (prod[i + j] + x * y) % p
        # reduce by the monic modulus
        mod = self.modulus
        for d in range(2 * k - 2, k - 1, -1):
            c = prod[d]
            if c:
                prod[d] = 0
                for j in range(k):
                    prod[d - k + j] = (prod[d - k + j] - c * mod[j]) % p
        return self._undigits(prod[:k])

    def _is_primitive(self, g):
        q = self.order
        n = q - 1
        cur = 1
        for _ in range(n - 1):
            cur = self._mul_slow(cur, g)
            if cur == 1:
                return False
        return True

    def add(self, a, b):
        if self.k == 1:
            return (a + b) % self.p
        da, db = self._digits(a), self._digits(b)
        return self._undigits([(x + y) % self.p for x, y in zip(da, db)])

    def neg(self, a):
        if self.k == 1:
            return (-a) % self.p
        return self._undigits([(-x) % self.p for x in self._digits(a)])

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self.k == 1:
            return (a * b) % self.p
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % (self.order - 1)]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in GF(%d^%d)" % (self.p, self.k))
        if self.k == 1:
            return pow(a, self.p - 2, self.p)
        return self._exp[(-self._log[a]) % (self.order - 1)]

    def pow(self, a, n):
        if a == 0:
            return 0 if n else 1
        if self.k == 1:
            return pow(a, n, self.p)
        return self._exp[(self._log[a] * n) % (self.order - 1)]

    def from_int(self, c):
        """Embed an integer via the prime subfield."""
        return c % self.p

    def elements(self):
        return range(self.order)


def field(p, k):
    key = (p, k)
    if key not in _cache:
        _cache[key] = GF(p, k)
    return _cache[key]


# ---------------------------------------------------------------------------
# univariate helpers over GF(q), used to count and locate roots cheaply.
# Polynomials are lists of field elements, ascending, no trailing zeros.


def poly_trim(f):
    while f and f[-1] == 0:
        f.pop()
    return f


def poly_mod(F, f, g):
    """f mod g, g nonzero."""
    f = list(f)
    dg = len(g) - 1
    lg_inv = F.inv(g[-1])
    while len(f) - 1 >= dg and f:
        c = F.mul(f[-1], lg_inv)
        shift = len(f) - 1 - dg
        if c:
            for j in range(dg + 1):
                f[shift + j] = F.sub(f[shift + j], F.mul(c, g[j]))
        f.pop()
        poly_trim(f)
    return f


def poly_gcd(F, f, g):
    f, g = list(f), list(g)
    poly_trim(f)
    poly_trim(g)
    while g:
        f, g = g, poly_mod(F, f, g)
    if f:
        inv = F.inv(f[-1])
        f = [F.mul(c, inv) for c in f]
    return f


def poly_powmod_x_q(F, g):
    """x^q mod g by square and multiply, q = field order."""
    n = F.order
    result = [0, 1]  # x
    result = poly_mod(F, result, g)
    base = list(result)
    out = [1]
    e = n
    # compute x^n mod g: exponentiate the polynomial x
    while e:
        if e & 1:
            out = poly_mod(F, poly_mul(F, out, base), g)
        e >>= 1
        if e:
            base = poly_mod(F, poly_mul(F, base, base), g)
    return out


def poly_mul(F, f, g):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] = F.add(out[i + j], F.mul(a, b))
    return poly_trim(out)


def count_roots(F, f):
    """Number of distinct roots of f in F (f nonzero)."""
    f = poly_trim(list(f))
    if not f:
        raise ValueError("zero polynomial")
    if len(f) == 1:
        return 0
    xq = poly_powmod_x_q(F, f)
    # gcd(x^q - x, f)
    xq_minus_x = list(xq)
    while len(xq_minus_x) < 2:
        xq_minus_x.append(0)
    xq_minus_x[1] = F.sub(xq_minus_x[1], 1)
    g = poly_gcd(F, xq_minus_x, f)
    return len(g) - 1 if g else len(f) - 1


def roots(F, f):
    """All roots of f in F by direct scan (fields here are tiny)."""
    f = poly_trim(list(f))
    out = []
    for a in F.elements():
        acc = 0
        for c in reversed(f):
            acc = F.add(F.mul(acc, a), c)
        if acc == 0:
            out.append(a)
    return out
