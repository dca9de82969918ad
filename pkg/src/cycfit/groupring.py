"""Group rings Z/p^N[Delta x Gamma], character projections, and canonical
normal forms for finitely generated ideals in these finite rings.

Ideals are represented as additive lattices over Z/p^N spanned by all
monomial multiples of the generators, reduced to a canonical echelon (Howell)
basis.  Over a chain ring Z/p^N this basis is unique, so ideal equality and
containment are literal comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

from .arith import val_p
from .errors import BadDecomposition, MixedAmbient, NotPrime
from .arith import is_prime


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """Delta x Gamma with Delta given by elementary divisors and Gamma cyclic
    of order p^m.  Elements are exponent tuples, the Gamma coordinate last."""

    delta_divisors: tuple[int, ...]
    gamma_order: int = 1

    def __post_init__(self):
        if any(d < 1 for d in self.delta_divisors) or self.gamma_order < 1:
            raise ValueError("divisors must be positive")

    @property
    def divisors(self) -> tuple[int, ...]:
        return self.delta_divisors + (self.gamma_order,)

    @property
    def delta_order(self) -> int:
        return math.prod(self.delta_divisors) if self.delta_divisors else 1

    @property
    def order(self) -> int:
        return self.delta_order * self.gamma_order

    def identity(self) -> tuple[int, ...]:
        return (0,) * len(self.divisors)

    def elements(self):
        divs = self.divisors
        idx = [0] * len(divs)
        while True:
            yield tuple(idx)
            for i in range(len(divs) - 1, -1, -1):
                idx[i] += 1
                if idx[i] < divs[i]:
                    break
                idx[i] = 0
            else:
                return

    def mul(self, a: tuple, b: tuple) -> tuple:
        return tuple((x + y) % d for x, y, d in zip(a, b, self.divisors))

    def inv(self, a: tuple) -> tuple:
        return tuple((-x) % d for x, d in zip(a, self.divisors))

    def gamma_element(self, j: int) -> tuple:
        return (0,) * len(self.delta_divisors) + (j % self.gamma_order,)


@dataclass(frozen=True)
class GroupRing:
    """Descriptor for Z/p^N[G]."""

    group: FiniteAbelianGroup
    p: int
    N: int

    def __post_init__(self):
        if not is_prime(self.p) or self.p < 3:
            raise NotPrime(f"p = {self.p} must be an odd prime")
        if math.gcd(self.group.delta_order, self.p) != 1:
            raise BadDecomposition("|Delta| must be prime to p")

    @property
    def mod(self) -> int:
        return self.p**self.N

    @cached_property
    def basis(self) -> tuple[tuple, ...]:
        return tuple(sorted(self.group.elements()))

    @cached_property
    def basis_index(self) -> dict:
        return {g: i for i, g in enumerate(self.basis)}

    def zero(self) -> "GroupRingElement":
        return GroupRingElement(self, {})

    def one(self) -> "GroupRingElement":
        return GroupRingElement(self, {self.group.identity(): 1})

    def monomial(self, g: tuple, c: int = 1) -> "GroupRingElement":
        return GroupRingElement(self, {tuple(g): c % self.mod})

    def gamma_minus_one(self) -> "GroupRingElement":
        g = self.group.gamma_element(1)
        return GroupRingElement(self, {g: 1, self.group.identity(): -1})

    def from_vector(self, vec) -> "GroupRingElement":
        return GroupRingElement(self, {g: c for g, c in zip(self.basis, vec) if c % self.mod})

    def element(self, coeffs: dict) -> "GroupRingElement":
        return GroupRingElement(self, coeffs)


class GroupRingElement:
    """Sparse element of Z/p^N[G]; coefficients normalized into [0, p^N)."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: GroupRing, coeffs: dict):
        self.ring = ring
        mod = ring.mod
        self.coeffs = {g: c % mod for g, c in coeffs.items() if c % mod}

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupRingElement) and self.ring == other.ring and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ring, tuple(sorted(self.coeffs.items()))))

    def __repr__(self):
        if not self.coeffs:
            return "GRE(0)"
        terms = ", ".join(f"{g}:{c}" for g, c in sorted(self.coeffs.items()))
        return f"GRE({terms})"

    def _check(self, other: "GroupRingElement"):
        if self.ring != other.ring:
            raise MixedAmbient("elements live in different rings")

    def __add__(self, other: "GroupRingElement") -> "GroupRingElement":
        self._check(other)
        out = dict(self.coeffs)
        for g, c in other.coeffs.items():
            out[g] = out.get(g, 0) + c
        return GroupRingElement(self.ring, out)

    def __sub__(self, other: "GroupRingElement") -> "GroupRingElement":
        self._check(other)
        out = dict(self.coeffs)
        for g, c in other.coeffs.items():
            out[g] = out.get(g, 0) - c
        return GroupRingElement(self.ring, out)

    def __neg__(self) -> "GroupRingElement":
        return GroupRingElement(self.ring, {g: -c for g, c in self.coeffs.items()})

    def __mul__(self, other) -> "GroupRingElement":
        if isinstance(other, int):
            return GroupRingElement(self.ring, {g: c * other for g, c in self.coeffs.items()})
        self._check(other)
        grp = self.ring.group
        out: dict = {}
        for g, c in self.coeffs.items():
            for h, d in other.coeffs.items():
                k = grp.mul(g, h)
                out[k] = out.get(k, 0) + c * d
        return GroupRingElement(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "GroupRingElement":
        if e < 0:
            raise ValueError("negative powers not supported in the group ring")
        out = self.ring.one()
        b = self
        while e:
            if e & 1:
                out = out * b
            b = b * b
            e >>= 1
        return out

    def is_zero(self) -> bool:
        return not self.coeffs

    def vector(self) -> tuple[int, ...]:
        return tuple(self.coeffs.get(g, 0) for g in self.ring.basis)

    def scalar(self) -> int:
        """The coefficient at the identity when the element is scalar."""
        ident = self.ring.group.identity()
        if any(g != ident for g in self.coeffs):
            raise ValueError("element is not scalar")
        return self.coeffs.get(ident, 0)


@dataclass(frozen=True)
class Character:
    """Character of Delta with values in (Z/p^N)^x of order dividing p-1."""

    delta_divisors: tuple[int, ...]
    p: int
    N: int
    values: tuple[int, ...]  # value on each elementary-divisor generator

    def __post_init__(self):
        mod = self.p**self.N
        for d, v in zip(self.delta_divisors, self.values):
            if pow(v, d, mod) != 1 % mod:
                raise ValueError(f"chi(generator)^{d} != 1")
            if pow(v, self.p - 1, mod) != 1 % mod:
                raise ValueError("character order must divide p - 1")

    def __call__(self, delta: tuple) -> int:
        mod = self.p**self.N
        out = 1
        for e, v in zip(delta, self.values):
            out = out * pow(v, e, mod) % mod
        return out

    def is_trivial(self) -> bool:
        mod = self.p**self.N
        return all(v % mod == 1 % mod for v in self.values)


def chi_project(x: GroupRingElement, chi: Character) -> GroupRingElement:
    """Project Z/p^N[Delta x Gamma] onto the chi-quotient Z/p^N[Gamma].

    This is the ring surjection sending delta to chi(delta) and fixing Gamma;
    no 1/|Delta| scaling (that variant fails to preserve 1 and differs only by
    a unit, so ideals agree).
    """
    ring = x.ring
    grp = ring.group
    if math.gcd(grp.delta_order, ring.p) != 1:
        raise BadDecomposition("|Delta| shares a factor with p")
    if chi.delta_divisors != grp.delta_divisors or (chi.p, chi.N) != (ring.p, ring.N):
        raise MixedAmbient("character does not match the ring's Delta")
    t = len(grp.delta_divisors)
    target = GroupRing(FiniteAbelianGroup((), grp.gamma_order), ring.p, ring.N)
    out: dict = {}
    for g, c in x.coeffs.items():
        delta, gamma = g[:t], g[t:]
        key = gamma
        out[key] = out.get(key, 0) + chi(delta) * c
    return GroupRingElement(target, out)


# ---------------------------------------------------------------------------
# Canonical normal forms for ideals (Howell form over Z/p^N)


def howell_form(rows, p: int, N: int) -> tuple[tuple[int, ...], ...]:
    """Canonical echelon basis of the Z/p^N-span of the given rows.

    Pivots are exact powers of p, entries above a pivot p^v are reduced mod
    p^v, and for every pivot the annihilator multiple p^{N-v}*row is folded
    back in, so the row span is closed under the operations membership
    testing needs.  The result is unique for the module it spans.
    """
    mod = p**N
    width = 0
    work = []
    for r in rows:
        rr = [c % mod for c in r]
        width = max(width, len(rr))
        if any(rr):
            work.append(rr)
    for r in work:
        r.extend([0] * (width - len(r)))
    result: list[tuple[int, int, list[int]]] = []  # (col, val, row)
    for col in range(width):
        cand = [r for r in work if r[col]]
        if not cand:
            continue
        piv = min(cand, key=lambda r: val_p(r[col], p, N))
        work.remove(piv)
        v = val_p(piv[col], p, N)
        u_inv = pow(piv[col] // p**v, -1, mod)
        piv = [c * u_inv % mod for c in piv]
        for r in work:
            if r[col]:
                w = r[col] // p**v
                for i in range(width):
                    r[i] = (r[i] - w * piv[i]) % mod
        work = [r for r in work if any(r)]
        if v > 0:
            extra = [c * p ** (N - v) % mod for c in piv]
            if any(extra):
                work.append(extra)
        result.append((col, v, piv))
    # canonical reduction of entries above each pivot
    for i, (col_i, v_i, row_i) in enumerate(result):
        for j in range(i):
            row_j = result[j][2]
            w = row_j[col_i] // p**v_i
            if w:
                for t in range(width):
                    row_j[t] = (row_j[t] - w * row_i[t]) % mod
    return tuple(tuple(r) for _, _, r in result)


def _reduce_vector(vec, pivots, p: int, N: int):
    mod = p**N
    v = [c % mod for c in vec]
    for col, pv, row in pivots:
        if v[col]:
            if val_p(v[col], p, N) < pv:
                return v, False
            w = v[col] // p**pv
            for i in range(len(v)):
                v[i] = (v[i] - w * row[i]) % mod
    return v, not any(v)


@dataclass(frozen=True)
class IdealNF:
    """Canonical normal form of a finitely generated ideal in Z/p^N[G]."""

    ring: GroupRing
    rows: tuple[tuple[int, ...], ...]

    @cached_property
    def _pivots(self):
        out = []
        for r in self.rows:
            for col, c in enumerate(r):
                if c:
                    out.append((col, val_p(c, self.ring.p, self.ring.N), r))
                    break
        return out

    def contains_vector(self, vec) -> bool:
        _, ok = _reduce_vector(vec, self._pivots, self.ring.p, self.ring.N)
        return ok

    def contains(self, x: GroupRingElement) -> bool:
        if x.ring != self.ring:
            raise MixedAmbient("element lives in a different ring")
        return self.contains_vector(x.vector())

    def contains_ideal(self, other: "IdealNF") -> bool:
        if other.ring != self.ring:
            raise MixedAmbient("ideals live in different rings")
        return all(self.contains_vector(r) for r in other.rows)

    def is_unit_ideal(self) -> bool:
        one = [0] * self.ring.group.order
        one[self.ring.basis_index[self.ring.group.identity()]] = 1
        return self.contains_vector(one)

    def is_zero_ideal(self) -> bool:
        return not self.rows

    def generators(self) -> list[GroupRingElement]:
        return [self.ring.from_vector(r) for r in self.rows]

    def principal_valuation(self) -> int:
        """For the chain ring Z/p^N (trivial group): the e with NF = (p^e)."""
        if self.ring.group.order != 1:
            raise ValueError("principal_valuation needs a trivial group")
        if not self.rows:
            return self.ring.N
        return val_p(self.rows[0][0], self.ring.p, self.ring.N)

    def __repr__(self):
        if self.ring.group.order == 1:
            e = self.principal_valuation()
            if e == 0:
                return "Ideal(1)"
            if e == self.ring.N:
                return "Ideal(0)"
            return f"Ideal({self.ring.p}^{e})"
        return f"Ideal[{len(self.rows)} rows]"


def ideal_normal_form(gens, ring: GroupRing | None = None) -> IdealNF:
    """Normal form of the ideal generated by gens in their common ring."""
    gens = list(gens)
    if ring is None:
        if not gens:
            raise ValueError("need a ring or at least one generator")
        ring = gens[0].ring
    rows = []
    for g in gens:
        if isinstance(g, int):
            g = ring.monomial(ring.group.identity(), g)
        if g.ring != ring:
            raise MixedAmbient("generators disagree on ring")
        for mono in ring.group.elements():
            shifted = ring.monomial(mono) * g
            rows.append(shifted.vector())
    return IdealNF(ring, howell_form(rows, ring.p, ring.N))


def ideal_contains(ideal: IdealNF, x: GroupRingElement) -> bool:
    return ideal.contains(x)


def ideal_join(a: IdealNF, b: IdealNF) -> IdealNF:
    if a.ring != b.ring:
        raise MixedAmbient("ideals live in different rings")
    return IdealNF(a.ring, howell_form(list(a.rows) + list(b.rows), a.ring.p, a.ring.N))


def ideal_product(a: IdealNF, b: IdealNF) -> IdealNF:
    """NF of the pairwise products of the two canonical generating sets."""
    if a.ring != b.ring:
        raise MixedAmbient("ideals live in different rings")
    gens = []
    for ga in a.generators():
        for gb in b.generators():
            gens.append(ga * gb)
    if not gens:
        return IdealNF(a.ring, ())
    return ideal_normal_form(gens, a.ring)


def scalar_ring(p: int, N: int) -> GroupRing:
    """Z/p^N viewed as the group ring of the trivial group."""
    return GroupRing(FiniteAbelianGroup((), 1), p, N)


def principal_ideal(p: int, N: int, e: int) -> IdealNF:
    """(p^e) inside Z/p^N, with e >= N meaning the zero ideal."""
    ring = scalar_ring(p, N)
    if e >= N:
        return IdealNF(ring, ())
    return IdealNF(ring, ((pow(p, e),),))
