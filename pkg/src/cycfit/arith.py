"""Exact modular arithmetic: Z/p^N, finite fields F_{q^k}, roots of unity and
p-part discrete logarithms.

Everything here is integer-exact.  Field elements are plain ints for prime
fields and coefficient tuples (constant term first) for extension fields; the
modulus polynomial and the group generator are chosen deterministically so
that every downstream sign and indexing convention is reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .config import DEFAULT_FIELD_BUDGET
from .errors import BudgetExceeded, NotPrime, OrderNotDividing, ZeroElement

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin (valid far beyond 2^64 with these bases)."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _SMALL_PRIMES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    """One nontrivial factor of composite n (deterministic seed sweep)."""
    if n % 2 == 0:
        return 2
    for c in range(1, 50):
        x = y = 2
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d
    raise ArithmeticError(f"rho failed on {n}")  # pragma: no cover


def factorint(n: int) -> dict[int, int]:
    """Full factorization {prime: exponent} by trial division + Pollard rho."""
    if n <= 0:
        raise ValueError("factorint needs a positive integer")
    out: dict[int, int] = {}
    for p in _SMALL_PRIMES:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    stack = [n] if n > 1 else []
    while stack:
        v = stack.pop()
        if v == 1:
            continue
        if is_prime(v):
            out[v] = out.get(v, 0) + 1
            continue
        d = v
        while d == v:
            d = _pollard_rho(v)
        stack.append(d)
        stack.append(v // d)
    return out


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n)."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    sign = 1
    if n < 0:
        n = -n
        if a < 0:
            sign = -1
    t = 0
    while n % 2 == 0:
        n //= 2
        t += 1
    if t:
        if a % 2 == 0:
            return 0
        if t % 2 and a % 8 in (3, 5):
            sign = -sign
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                sign = -sign
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            sign = -sign
        a %= n
    return sign if n == 1 else 0


def sqrt_mod_prime(a: int, p: int) -> int | None:
    """Smallest square root of a mod p, or None (Tonelli-Shanks)."""
    a %= p
    if a == 0:
        return 0
    if p == 2:
        return a
    if kronecker(a, p) != 1:
        return None
    if p % 4 == 3:
        x = pow(a, (p + 1) // 4, p)
        return min(x, p - x)
    s, e = p - 1, 0
    while s % 2 == 0:
        s //= 2
        e += 1
    z = 2
    while kronecker(z, p) != -1:
        z += 1
    g = pow(z, s, p)
    x = pow(a, (s + 1) // 2, p)
    b = pow(a, s, p)
    r = e
    while b != 1:
        t, m = b, 0
        while t != 1:
            t = t * t % p
            m += 1
        gs = pow(g, 1 << (r - m - 1), p)
        g = gs * gs % p
        x = x * gs % p
        b = b * g % p
        r = m
    return min(x, p - x)


def crt(residues: list[int], moduli: list[int]) -> int:
    """Solve x = r_i mod m_i for pairwise coprime moduli."""
    x, m = 0, 1
    for r, mi in zip(residues, moduli):
        t = ((r - x) * pow(m, -1, mi)) % mi
        x += m * t
        m *= mi
    return x % m


def val_p(x: int, p: int, cap: int) -> int:
    """p-adic valuation of x mod p^cap (val of 0 is cap)."""
    x %= p**cap
    if x == 0:
        return cap
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


@dataclass(frozen=True)
class ModRing:
    """The coefficient ring Z/p^N for an odd prime p."""

    p: int
    N: int

    def __post_init__(self):
        if self.p < 3 or not is_prime(self.p):
            raise NotPrime(f"p = {self.p} must be an odd prime")
        if self.N < 1:
            raise ValueError("N must be >= 1")

    @property
    def mod(self) -> int:
        return self.p**self.N

    def val(self, x: int) -> int:
        return val_p(x, self.p, self.N)

    def unit_inverse(self, x: int) -> int:
        return pow(x, -1, self.mod)


# ---------------------------------------------------------------------------
# Finite fields


def _poly_mulmod(a: tuple, b: tuple, modpoly: tuple, q: int) -> tuple:
    k = len(modpoly) - 1
    res = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                res[i + j] = (res[i + j] + ai * bj) % q
    # reduce: modpoly is monic of degree k
    for i in range(len(res) - 1, k - 1, -1):
        c = res[i]
        if c:
            res[i] = 0
            for j in range(k):
                res[i - k + j] = (res[i - k + j] - c * modpoly[j]) % q
    while len(res) > k:
        res.pop()
    while len(res) < k:
        res.append(0)
    return tuple(res)


def _poly_powmod(base: tuple, e: int, modpoly: tuple, q: int) -> tuple:
    k = len(modpoly) - 1
    out = tuple([1] + [0] * (k - 1))
    b = base
    while e:
        if e & 1:
            out = _poly_mulmod(out, b, modpoly, q)
        b = _poly_mulmod(b, b, modpoly, q)
        e >>= 1
    return out


def _poly_gcd(a: list, b: list, q: int) -> list:
    a, b = a[:], b[:]
    while any(b):
        while b and b[-1] == 0:
            b.pop()
        if not b:
            break
        inv = pow(b[-1], -1, q)
        db = len(b) - 1
        while len(a) - 1 >= db and any(a):
            while a and a[-1] == 0:
                a.pop()
            if len(a) - 1 < db or not a:
                break
            c = a[-1] * inv % q
            shift = len(a) - 1 - db
            for i, bi in enumerate(b):
                a[shift + i] = (a[shift + i] - c * bi) % q
            while a and a[-1] == 0:
                a.pop()
        a, b = b, a
    while a and a[-1] == 0:
        a.pop()
    return a


def _is_irreducible(poly: tuple, q: int) -> bool:
    """Monic poly of degree k irreducible over F_q iff x^{q^k} = x and
    gcd(x^{q^{k/r}} - x, poly) = 1 for every prime r | k."""
    k = len(poly) - 1
    x = tuple([0, 1] + [0] * (k - 2)) if k >= 2 else (0,)
    xq = _poly_powmod(x, q**k, poly, q)
    if xq != x:
        return False
    for r in factorint(k):
        xr = _poly_powmod(x, q ** (k // r), poly, q)
        diff = [(a - b) % q for a, b in zip(xr, x)]
        g = _poly_gcd(list(poly), diff, q)
        if len(g) - 1 > 0:
            return False
    return True


@dataclass(frozen=True)
class FieldCtx:
    """An explicit F_{q^k} with a verified generator of the unit group.

    Elements are ints for k = 1 and coefficient tuples (constant first) for
    k > 1.  modulus is the monic modulus polynomial as a coefficient tuple of
    length k+1 (empty marker for k = 1).  order_factors is the verified
    factorization of q^k - 1.
    """

    q: int
    k: int
    modulus: tuple
    g: object
    order_factors: tuple

    @property
    def order(self) -> int:
        return self.q**self.k - 1

    def one(self):
        return 1 if self.k == 1 else tuple([1] + [0] * (self.k - 1))

    def zero(self):
        return 0 if self.k == 1 else tuple([0] * self.k)

    def embed(self, c: int):
        """Image of an integer (prime-subfield element)."""
        c %= self.q
        return c if self.k == 1 else tuple([c] + [0] * (self.k - 1))

    def mul(self, a, b):
        if self.k == 1:
            return a * b % self.q
        return _poly_mulmod(a, b, self.modulus, self.q)

    def pow(self, a, e: int):
        if e < 0:
            a = self.inv(a)
            e = -e
        if self.k == 1:
            return pow(a, e, self.q)
        return _poly_powmod(a, e, self.modulus, self.q)

    def inv(self, a):
        if self.is_zero(a):
            raise ZeroElement("cannot invert 0")
        if self.k == 1:
            return pow(a, -1, self.q)
        return _poly_powmod(a, self.order - 1, self.modulus, self.q)

    def is_zero(self, a) -> bool:
        return a == 0 if self.k == 1 else not any(a)

    def in_prime_field(self, a) -> bool:
        return True if self.k == 1 else not any(a[1:])

    def to_prime_field(self, a) -> int:
        """Constant-term extraction; only valid when in_prime_field(a)."""
        if self.k == 1:
            return a
        if any(a[1:]):
            raise ValueError("element is not in the prime subfield")
        return a[0]

    def element_order_divides(self, a, m: int) -> bool:
        return self.pow(a, m) == self.one()


def _find_irreducible(q: int, k: int) -> tuple:
    """Lexicographically smallest monic irreducible of degree k over F_q
    (candidates ordered by their base-q digit value, high coefficients most
    significant)."""
    for t in range(q**k):
        coeffs = []
        v = t
        for _ in range(k):
            coeffs.append(v % q)
            v //= q
        poly = tuple(coeffs + [1])
        if _is_irreducible(poly, q):
            return poly
    raise ArithmeticError("no irreducible polynomial found")  # pragma: no cover


def _candidate_elements(ctx_q: int, k: int):
    if k == 1:
        a = 2
        while True:
            yield a
            a += 1
    else:
        t = ctx_q  # skip constants: they cannot generate for k > 1
        while True:
            coeffs = []
            v = t
            for _ in range(k):
                coeffs.append(v % ctx_q)
                v //= ctx_q
            yield tuple(coeffs)
            t += 1


@lru_cache(maxsize=None)
def _make_field_cached(q: int, k: int, budget: int) -> FieldCtx:
    if q < 2 or not is_prime(q):
        raise NotPrime(f"q = {q} is not prime")
    if k < 1:
        raise ValueError("k must be >= 1")
    if q**k > budget:
        raise BudgetExceeded(f"q^k = {q}^{k} exceeds budget {budget}")
    order = q**k - 1
    fac = tuple(sorted(factorint(order).items()))
    modulus = () if k == 1 else _find_irreducible(q, k)
    probe = FieldCtx(q=q, k=k, modulus=modulus, g=None, order_factors=fac)
    for cand in _candidate_elements(q, k):
        ok = True
        for r, _ in fac:
            if probe.pow(cand, order // r) == probe.one():
                ok = False
                break
        if ok:
            return FieldCtx(q=q, k=k, modulus=modulus, g=cand, order_factors=fac)
    raise ArithmeticError("no generator found")  # pragma: no cover


def make_field(q: int, k: int = 1, budget: int = DEFAULT_FIELD_BUDGET) -> FieldCtx:
    """Construct F_{q^k} with deterministic modulus and verified generator."""
    return _make_field_cached(q, k, budget)


def root_of_unity(ctx: FieldCtx, M: int):
    """The distinguished primitive M-th root of unity g^{(q^k-1)/M}.

    Compatibility holds by construction: root(M')^{M'/M} = root(M) whenever
    M | M' | q^k - 1, mirroring a single coherent choice of roots.
    """
    if M < 1 or ctx.order % M != 0:
        raise OrderNotDividing(f"M = {M} does not divide q^k - 1 = {ctx.order}")
    return ctx.pow(ctx.g, ctx.order // M)


def dlog_p_part(ctx: FieldCtx, x, p: int, N: int) -> int:
    """Discrete log of x in the p^N-part of F_{q^k}^x, in Z/p^N.

    Returns d with x^{(q^k-1)/p^N} = (g^{(q^k-1)/p^N})^d; kills p^N-th powers
    and is additive in x.  Pohlig-Hellman digit lifting inside the cyclic
    p^N-subgroup (p^N is always small here).
    """
    if ctx.is_zero(x):
        raise ZeroElement("dlog of 0")
    pN = p**N
    if ctx.order % pN != 0:
        raise OrderNotDividing(f"p^N = {pN} does not divide q^k - 1")
    y = ctx.pow(x, ctx.order // pN)
    z = ctx.pow(ctx.g, ctx.order // pN)
    # table of the order-p subgroup generated by z^{p^{N-1}}
    zp = ctx.pow(z, pN // p)
    table = {}
    cur = ctx.one()
    for j in range(p):
        table[cur] = j
        cur = ctx.mul(cur, zp)
    d = 0
    z_inv = ctx.inv(z)
    for i in range(N):
        w = ctx.pow(ctx.mul(y, ctx.pow(z_inv, d)), pN // p ** (i + 1))
        if w not in table:  # pragma: no cover - subgroup membership is forced
            raise ArithmeticError("dlog digit outside subgroup")
        d += table[w] * p**i
    return d % pN
