"""Field metadata for the real abelian base field and its first cyclotomic
layer: conductor data, the Galois group with its quadratic character, prime
splitting by residue classes, auxiliary-prime search and well-ordered chain
enumeration.

All splitting conditions are pure congruence + Kronecker-symbol tests (valid
because the fields are abelian of known conductor); no ideal factorization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

from .arith import is_prime, kronecker, make_field, sqrt_mod_prime, val_p
from .config import DEFAULT_CONVENTIONS, DEFAULT_PRIME_SEARCH_BUDGET, Conventions
from .errors import (
    BudgetExhausted,
    DegreeDivisible,
    Ramified,
    SplitP,
)
from .groupring import Character, FiniteAbelianGroup, GroupRing
from .classgroup import is_fundamental_discriminant


@dataclass(frozen=True)
class AbelianFieldCtx:
    """Context for K real quadratic of fundamental discriminant D > 0.

    F_m is the maximal totally real subfield of K(mu_{p^{m+1}}); for p = 3 and
    m = 0 this is K itself.  Delta = Gal(F_0/Q) is Z/2 for p = 3 and
    Z/2 x Z/((p-1)/2) for p > 3 (the second factor from the real cyclotomic
    subfield); chi is the quadratic character of the K-component in both
    cases, so its order divides p - 1.
    """

    p: int
    D: int
    m: int = 0
    N: int = 0
    conventions: Conventions = DEFAULT_CONVENTIONS

    def __post_init__(self):
        if self.p < 3 or not is_prime(self.p):
            raise ValueError(f"p = {self.p} must be an odd prime")
        if not is_fundamental_discriminant(self.D):
            raise ValueError(f"D = {self.D} is not a positive fundamental discriminant")
        if self.N < max(1, self.m + 1):
            raise ValueError("need N >= max(1, m+1)")
        if self.D % self.p == 0:
            raise Ramified(f"p = {self.p} ramifies in K (p | D = {self.D})")
        if kronecker(self.D, self.p) == 1:
            raise SplitP(f"chi(p) = 1 for p = {self.p}, D = {self.D}")
        if 2 % self.p == 0:  # pragma: no cover - p odd
            raise DegreeDivisible("p divides [K:Q]")

    @property
    def f_K(self) -> int:
        return self.D

    @property
    def delta_divisors(self) -> tuple[int, ...]:
        if self.p == 3:
            return (2,)
        return (2, (self.p - 1) // 2)

    @cached_property
    def group(self) -> FiniteAbelianGroup:
        return FiniteAbelianGroup(self.delta_divisors, self.p**self.m)

    @cached_property
    def ring(self) -> GroupRing:
        """R_{m,N} = Z/p^N[Gal(F_m/Q)]."""
        return GroupRing(self.group, self.p, self.N)

    @cached_property
    def chi(self) -> Character:
        mod = self.p**self.N
        values = (mod - 1,) + (1,) * (len(self.delta_divisors) - 1)
        return Character(self.delta_divisors, self.p, self.N, values)

    @cached_property
    def chi_ring(self) -> GroupRing:
        """R_{m,N,chi}, the chi-quotient: Z/p^N[Gamma]."""
        return GroupRing(FiniteAbelianGroup((), self.p**self.m), self.p, self.N)

    def chi_d(self, t: int) -> int:
        """The quadratic character mod the conductor, chi_D = (D|.)."""
        return kronecker(self.D, t)

    def conductor_F(self) -> int:
        """Conductor of F_m."""
        real_part_degree = (self.p - 1) * self.p**self.m // 2
        if real_part_degree == 1:
            return self.D
        return self.D * self.p ** (self.m + 1)

    def splits_in_K(self, ell: int) -> bool:
        return self.chi_d(ell) == 1

    def in_S_N(self, ell: int, level: int | None = None) -> bool:
        """Membership in the auxiliary prime set: ell = 1 mod p^level and
        split in K, i.e. split completely in K(mu_{p^level})."""
        level = self.N if level is None else level
        return (
            is_prime(ell)
            and ell % self.p**level == 1
            and self.splits_in_K(ell)
        )


@dataclass(frozen=True)
class KolyvaginPrime:
    """An auxiliary prime with its tame data: N_ell = ord_p(ell - 1) and the
    distinguished primitive root s_ell (the canonical generator of F_ell^x,
    flipped to its inverse under the rejected convention)."""

    ell: int
    p: int
    N_ell: int
    s_ell: int

    @staticmethod
    def build(ell: int, p: int, flip_sigma: bool = False) -> "KolyvaginPrime":
        if not is_prime(ell):
            raise ValueError(f"{ell} is not prime")
        n_ell = val_p(ell - 1, p, 64)
        if n_ell < 1:
            raise ValueError(f"{ell} is not 1 mod {p}")
        g = make_field(ell, 1).g
        s = pow(g, -1, ell) if flip_sigma else g
        return KolyvaginPrime(ell=ell, p=p, N_ell=n_ell, s_ell=s)


@dataclass(frozen=True)
class WellOrderedProduct:
    """An ordered square-free product (l_1, ..., l_r) satisfying the chain
    congruences l_{i+1} = 1 mod p^N * prod_{j<=i} l_j."""

    factors: tuple[int, ...]
    p: int
    N: int

    @property
    def n(self) -> int:
        return math.prod(self.factors) if self.factors else 1

    @property
    def epsilon(self) -> int:
        return len(self.factors)


def is_well_ordered(p: int, N: int, factors) -> bool:
    """Pure congruence form of the chain condition (no splitting checks)."""
    factors = tuple(factors)
    if len(set(factors)) != len(factors):
        return False
    modulus = p**N
    for i, ell in enumerate(factors):
        if ell % modulus != 1:
            return False
        modulus *= ell
    return True


def build_field(p: int, d: int, m: int, N: int,
                conventions: Conventions = DEFAULT_CONVENTIONS) -> AbelianFieldCtx:
    """Validated field context (errors: Ramified, SplitP, DegreeDivisible)."""
    return AbelianFieldCtx(p=p, D=d, m=m, N=N, conventions=conventions)


def kolyvagin_primes(ctx: AbelianFieldCtx, extra_modulus: int = 1,
                     budget: int = DEFAULT_PRIME_SEARCH_BUDGET,
                     level: int | None = None):
    """Yield auxiliary primes l = 1 mod p^level*extra_modulus split in K, in
    increasing order, examining at most `budget` candidates.

    Each yielded prime is re-verified by an independent route: a square root
    of D mod l is found and squared back (trial splitting) in addition to the
    Kronecker-symbol test.
    """
    level = ctx.N if level is None else level
    if extra_modulus < 1:
        raise ValueError("extra_modulus must be positive")
    if extra_modulus != 1 and math.gcd(extra_modulus, ctx.p * ctx.f_K) != 1:
        raise ValueError("extra_modulus must be coprime to p*f_K")
    step = ctx.p**level * extra_modulus
    cand = 1 + step
    examined = 0
    while True:
        if examined >= budget:
            raise BudgetExhausted(
                f"no more auxiliary primes within budget {budget} (mod {step})")
        examined += 1
        ell = cand
        cand += step
        if ell <= 2 or not is_prime(ell):
            continue
        if ctx.D % ell == 0:
            continue
        if not ctx.splits_in_K(ell):
            continue
        root = sqrt_mod_prime(ctx.D % ell, ell)
        if root is None or (root * root - ctx.D) % ell != 0:  # pragma: no cover
            raise ArithmeticError(f"splitting re-verification failed at {ell}")
        yield KolyvaginPrime.build(ell, ctx.p, ctx.conventions.flip_sigma)


def well_ordered_chains(ctx: AbelianFieldCtx, r: int,
                        budget: int = DEFAULT_PRIME_SEARCH_BUDGET,
                        per_level: int = 4,
                        level: int | None = None) -> list[WellOrderedProduct]:
    """Depth-first enumeration of well-ordered products of length exactly r.

    Chooses up to `per_level` branches at each level; every returned product
    satisfies the chain invariant and membership in the auxiliary prime set.
    r = 0 returns the empty product (n = 1).
    """
    level = ctx.N if level is None else level
    if r == 0:
        return [WellOrderedProduct((), ctx.p, level)]
    out: list[WellOrderedProduct] = []

    def extend(prefix: tuple[int, ...]):
        if len(prefix) == r:
            wop = WellOrderedProduct(prefix, ctx.p, level)
            assert is_well_ordered(ctx.p, level, prefix)
            out.append(wop)
            return
        extra = math.prod(prefix) if prefix else 1
        found = 0
        gen = kolyvagin_primes(ctx, extra_modulus=extra, budget=budget, level=level)
        while found < per_level:
            try:
                kp = next(gen)
            except BudgetExhausted:
                break
            if kp.ell in prefix:
                continue
            found += 1
            extend(prefix + (kp.ell,))

    extend(())
    if not out:
        raise BudgetExhausted(f"no well-ordered chains of length {r} within budget")
    return out


def frobenius_residue(ctx: AbelianFieldCtx, ell: int, modulus: int) -> int:
    """Residue representing the arithmetic Frobenius at ell on mu_modulus."""
    if math.gcd(ell, modulus) != 1:
        raise ValueError("ell ramifies in the given cyclotomic layer")
    return ell % modulus


def evaluation_primes(ctx: AbelianFieldCtx, n: int = 1, level: int | None = None):
    """Evaluation primes q = 1 mod f_K * p^level * n, ascending.

    Such q split completely in the whole cyclotomic layer containing
    F_m(mu_n), so every root of unity the evaluation engine needs already
    lives in F_q (residue degree one)."""
    level = ctx.N if level is None else level
    step = ctx.f_K * ctx.p**level * n
    q = 1 + step
    while True:
        if is_prime(q):
            yield q
        q += step
