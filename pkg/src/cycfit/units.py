"""Symbolic circular units, Kolyvagin's derivative operator, and the
residue-side evaluation engine.

A symbol is a formal product of basic circular-unit factors with group-ring
exponents; it is never expanded as an algebraic number.  Evaluation reduces
the symbol at the distinguished prime above an evaluation prime q: every
norm is expanded as an explicit product of conjugates (1 - zeta^e) with the
roots of unity taken from the compatible system zeta_M = g^{(q^k-1)/M}, so
the whole computation happens inside F_{q^k}.

The distinguished-prime convention: for each q the deterministic generator
of F_{q^k}^x fixes one arrangement of roots of unity, which plays the role
of a fixed embedding of the cyclotomic tower into the residue world.
Conjugation by a Galois element with residue t multiplies every root index
by t.  Derivative values are accumulated as p-part discrete logarithms, so
the p^N-th power ambiguity of a derivative class never matters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product as iter_product

from .arith import FieldCtx, crt, dlog_p_part, make_field, root_of_unity
from .config import DEFAULT_DERIVATIVE_CAP, DEFAULT_FIELD_BUDGET
from .errors import BudgetExhausted, ConductorClash, NotSplit
from .fields import AbelianFieldCtx, KolyvaginPrime
from .groupring import GroupRing, GroupRingElement


@dataclass(frozen=True)
class CircularUnitSymbol:
    """A formal word in basic circular units at level m with auxiliary
    product n = prod(aux).

    factors entries are (kind, param, exponent): kind "d" with param a
    divisor > 1 of the conductor, kind "a" with param coprime to p; exponent
    is None (meaning 1) or a tuple of (group_element, integer) pairs acting
    through Galois conjugation.
    """

    m: int
    aux: tuple[int, ...]
    factors: tuple[tuple, ...]

    @property
    def n(self) -> int:
        return math.prod(self.aux) if self.aux else 1

    def validate(self, ctx: AbelianFieldCtx):
        if self.m != ctx.m:
            raise ValueError("symbol level does not match the field context")
        if math.gcd(self.n, ctx.p * ctx.f_K) != 1:
            raise ValueError("auxiliary product must be prime to p*f_K")
        for kind, param, _exp in self.factors:
            if kind == "d":
                if param <= 1 or ctx.f_K % param:
                    raise ValueError(f"d = {param} must divide the conductor and exceed 1")
            elif kind == "a":
                if math.gcd(param, ctx.p) != 1:
                    raise ValueError(f"a = {param} must be prime to p")
            else:
                raise ValueError(f"unknown factor kind {kind!r}")


def basic_symbol(ctx: AbelianFieldCtx, kind: str, param: int,
                 aux: tuple[int, ...] = ()) -> CircularUnitSymbol:
    sym = CircularUnitSymbol(m=ctx.m, aux=tuple(aux), factors=((kind, param, None),))
    sym.validate(ctx)
    return sym


@dataclass(frozen=True)
class DerivativeOperator:
    """D_n = prod_ell sum_k k*sigma_ell^k, kept factored (never expanded)."""

    primes: tuple[KolyvaginPrime, ...]

    def expansion_size(self) -> int:
        return math.prod(max(kp.ell - 2, 1) for kp in self.primes) if self.primes else 1

    def multi_index_ranges(self):
        return [range(1, kp.ell - 1) for kp in self.primes]


@dataclass(frozen=True)
class DerivativeClass:
    """kappa(n): the class of eta(n)^{D_n} in F_m^x / p^N."""

    symbol: CircularUnitSymbol
    aux_primes: tuple[KolyvaginPrime, ...]
    N: int

    def __post_init__(self):
        if tuple(kp.ell for kp in self.aux_primes) != self.symbol.aux:
            raise ValueError("auxiliary primes disagree with the symbol")

    @property
    def n(self) -> int:
        return self.symbol.n

    def operator(self) -> DerivativeOperator:
        return DerivativeOperator(self.aux_primes)


def derivative_class(ctx: AbelianFieldCtx, kind: str, param: int,
                     aux_primes: tuple[KolyvaginPrime, ...]) -> DerivativeClass:
    sym = basic_symbol(ctx, kind, param, tuple(kp.ell for kp in aux_primes))
    return DerivativeClass(symbol=sym, aux_primes=aux_primes, N=ctx.N)


class EvalContext:
    """Shared state for evaluating symbols with auxiliary support dividing n
    at one evaluation prime q.

    Conductor components are (f_K, p^{m+1}, l_1, ..., l_r); multipliers are
    residues modulo the master modulus M = f_K * p^{m+1} * n.  The symbol's
    arithmetic happens in F_{q^k} with k the order of q mod M; the final
    discrete logarithms always happen in the prime field F_q with respect to
    its own canonical generator, so values at one q are mutually consistent.
    """

    def __init__(self, ctx: AbelianFieldCtx, aux: tuple[int, ...], q: int,
                 budget: int = DEFAULT_FIELD_BUDGET):
        self.ctx = ctx
        self.aux = tuple(aux)
        self.q = q
        self.p_part = ctx.p ** (ctx.m + 1)
        self.moduli = [ctx.f_K, self.p_part] + list(self.aux)
        self.M = math.prod(self.moduli)
        if math.gcd(q, self.M) != 1:
            raise ConductorClash(f"q = {q} divides the symbol conductor")
        k = 1
        t = q % self.M
        while t != 1:
            t = t * q % self.M
            k += 1
        self.k = k
        self.field: FieldCtx = make_field(q, k, budget)
        self.base: FieldCtx = self.field if k == 1 else make_field(q, 1, budget)
        self.zeta = root_of_unity(self.field, self.M)
        self._s_cache: dict[int, tuple[int, ...]] = {}
        self._chi_kernel: list[int] | None = None

    # -- multiplier (Galois residue) helpers --------------------------------

    def lift(self, components: dict[int, int] | None = None) -> int:
        """CRT lift with given residues per conductor component (default 1)."""
        components = components or {}
        residues = [components.get(mod, 1) % mod for mod in self.moduli]
        return crt(residues, self.moduli)

    def delta_lift(self, g: tuple) -> int:
        """Residue acting on the tower as the group element g of Delta x Gamma."""
        ctx = self.ctx
        comp: dict[int, int] = {}
        e1 = g[0]
        if e1 % 2:
            comp[ctx.f_K] = self._nonresidue()
        if len(g) > 1:
            # remaining Delta coordinates and the Gamma coordinate act through
            # (Z/p^{m+1})^x / {+-1}
            exp = 0
            w0 = _primitive_root_cached(self.p_part)
            if len(ctx.delta_divisors) > 1:
                e2 = g[1]
                exp += e2 * ctx.p**ctx.m
            j = g[-1]
            exp += j * ((ctx.p - 1) // 2)
            if exp:
                comp[self.p_part] = pow(w0, exp, self.p_part)
        return self.lift(comp)

    def _nonresidue(self) -> int:
        x = 2
        while self.ctx.chi_d(x) != -1:
            x += 1
        return x

    def sigma_lift(self, kp: KolyvaginPrime, k: int) -> dict[int, int]:
        return {kp.ell: pow(kp.s_ell, k, kp.ell)}

    # -- norm sets -----------------------------------------------------------

    def _chi_kernel_list(self) -> list[int]:
        if self._chi_kernel is None:
            f = self.ctx.f_K
            self._chi_kernel = [x for x in range(1, f)
                                if math.gcd(x, f) == 1 and self.ctx.chi_d(x) == 1]
        return self._chi_kernel

    def norm_set_d(self, d: int) -> tuple[int, ...]:
        """Multipliers realizing Gal(Q(mu_{d p^{m+1} n'})/intersection with
        F_m(mu_{n'})): chi_D-kernel classes mod d times {+-1 mod p^{m+1}},
        trivial at every auxiliary prime.  Independent of n'."""
        if d not in self._s_cache:
            vals = set()
            for x in self._chi_kernel_list():
                for y in (1, self.p_part - 1):
                    vals.add(crt([x % d, y] + [1] * len(self.aux),
                                 [d, self.p_part] + list(self.aux)))
            self._s_cache[d] = tuple(sorted(vals))
        return self._s_cache[d]

    def norm_set_a(self) -> tuple[int, int]:
        tau = self.lift({self.p_part: self.p_part - 1})
        return (1, tau)

    # -- field helpers -------------------------------------------------------

    def term(self, e: int):
        """1 - zeta^e in F_{q^k}."""
        z = self.field.pow(self.zeta, e % self.M)
        if self.k == 1:
            return (1 - z) % self.q
        one = self.field.one()
        return tuple((a - b) % self.q for a, b in zip(one, z))

    def dlog(self, value, level: int) -> int:
        """p-part dlog of a value that lies in the prime field."""
        v = self.field.to_prime_field(value)
        return dlog_p_part(self.base, v, self.ctx.p, level)

    # -- symbol evaluation ----------------------------------------------------

    def factor_value(self, kind: str, param: int, aux_subset: tuple[int, ...], mult: int):
        """One basic unit, conjugated by the multiplier, as a field element."""
        fld = self.field
        n_sub = math.prod(aux_subset) if aux_subset else 1
        if kind == "d":
            d = param
            u = (self.M // d) * pow(self.ctx.p**self.ctx.m, -1, d) + self.M // (n_sub * self.p_part)
            out = fld.one()
            for t in self.norm_set_d(d):
                out = fld.mul(out, self.term(u * t * mult))
            return out
        # kind == "a"
        if n_sub == 1:
            u_n = 0
        else:
            u_n = (self.M // n_sub) * pow(self.ctx.p**self.ctx.m, -1, n_sub)
        u_p = self.M // self.p_part
        num = fld.one()
        den = fld.one()
        for w in self.norm_set_a():
            num = fld.mul(num, self.term((u_n + u_p * param) * w * mult))
            den = fld.mul(den, self.term((u_n + u_p) * w * mult))
        return fld.mul(num, fld.inv(den))

    def symbol_value(self, sym: CircularUnitSymbol, mult: int):
        """Product over the symbol's factors with their group-ring exponents."""
        fld = self.field
        out = fld.one()
        for kind, param, exponent in sym.factors:
            if exponent is None:
                out = fld.mul(out, self.factor_value(kind, param, sym.aux, mult))
                continue
            for g, c in exponent:
                if c == 0:
                    continue
                shifted = self.delta_lift(g) * mult % self.M
                base = self.factor_value(kind, param, sym.aux, shifted)
                out = fld.mul(out, fld.pow(base, c))
        return out


_PRIM_ROOT_CACHE: dict[int, int] = {}


def _primitive_root_cached(p_power: int) -> int:
    """Smallest primitive root modulo an odd prime power."""
    if p_power not in _PRIM_ROOT_CACHE:
        phi = p_power - p_power // _smallest_prime_factor(p_power)
        fac = {}
        t = phi
        d = 2
        while d * d <= t:
            while t % d == 0:
                fac[d] = 1
                t //= d
            d += 1
        if t > 1:
            fac[t] = 1
        g = 2
        while True:
            if math.gcd(g, p_power) == 1 and all(
                pow(g, phi // r, p_power) != 1 for r in fac
            ):
                _PRIM_ROOT_CACHE[p_power] = g
                break
            g += 1
    return _PRIM_ROOT_CACHE[p_power]


def _smallest_prime_factor(n: int) -> int:
    d = 2
    while d * d <= n:
        if n % d == 0:
            return d
        d += 1
    return n


def splits_completely(ctx: AbelianFieldCtx, q: int, n: int, level: int) -> bool:
    """q splits completely in F_m(mu_n) and q = 1 mod p^level."""
    if q % ctx.p**level != 1:
        return False
    p_part = ctx.p ** (ctx.m + 1)
    if q % p_part not in (1, p_part - 1):
        return False
    if n > 1 and q % n != 1:
        return False
    if ctx.chi_d(q) != 1:
        return False
    return True


def evaluate_symbol(ctx: AbelianFieldCtx, sym: CircularUnitSymbol, q: int,
                    conj: tuple | None = None,
                    h_twist: dict[int, int] | None = None,
                    budget: int = DEFAULT_FIELD_BUDGET,
                    ev: EvalContext | None = None):
    """Reduction of the conj-conjugate of the symbol at the distinguished
    prime above q, as an element of F_{q^k}."""
    sym.validate(ctx)
    ev = ev or EvalContext(ctx, sym.aux, q, budget)
    mult = 1
    if conj is not None:
        mult = ev.delta_lift(conj)
    if h_twist:
        mult = mult * ev.lift({ell: w for ell, w in h_twist.items()}) % ev.M
    return ev.symbol_value(sym, mult)


def evaluate_kappa(ctx: AbelianFieldCtx, cls: DerivativeClass, q: int,
                   level: int | None = None,
                   h_twist: dict[int, int] | None = None,
                   budget: int = DEFAULT_FIELD_BUDGET,
                   cap: int = DEFAULT_DERIVATIVE_CAP,
                   ev: EvalContext | None = None) -> GroupRingElement:
    """The conjugate vector of p-part dlogs of kappa(n) at q.

    Returns sum_g dlog(eval(g^{-1} . eta(n)^{D_n})) * g over Z/p^level[G]; the
    coefficient convention makes the map Galois-equivariant.  Requires q to
    split completely in F_m(mu_n) with q = 1 mod p^level.
    """
    ctx_level = level if level is not None else min(cls.N, ctx.N)
    if not splits_completely(ctx, q, cls.n, ctx_level):
        raise NotSplit(f"q = {q} does not split completely in F_m(mu_{cls.n})"
                       f" with q = 1 mod {ctx.p}^{ctx_level}")
    op = cls.operator()
    if op.expansion_size() > cap:
        raise BudgetExhausted(
            f"derivative expansion of size {op.expansion_size()} exceeds cap {cap}")
    ev = ev or EvalContext(ctx, cls.symbol.aux, q, budget)
    pN = ctx.p**ctx_level
    ring = GroupRing(ctx.group, ctx.p, ctx_level)
    twist = 1
    if h_twist:
        twist = ev.lift({ell: w for ell, w in h_twist.items()})
    coeffs: dict = {}
    for g in ctx.group.elements():
        t_g = ev.delta_lift(ctx.group.inv(g)) * twist % ev.M
        total = 0
        ranges = op.multi_index_ranges()
        if not ranges:
            val = ev.symbol_value(cls.symbol, t_g)
            total = ev.dlog(val, ctx_level)
        else:
            sig_pows = []
            for kp in cls.aux_primes:
                pows = {}
                cur = 1
                for k in range(1, kp.ell - 1):
                    cur = cur * kp.s_ell % kp.ell
                    pows[k] = cur
                sig_pows.append(pows)
            for k_vec in iter_product(*ranges):
                weight = 1
                comp = {}
                for kp, pows, k in zip(cls.aux_primes, sig_pows, k_vec):
                    weight = weight * k % pN
                    comp[kp.ell] = pows[k]
                mult = t_g * ev.lift(comp) % ev.M
                val = ev.symbol_value(cls.symbol, mult)
                total = (total + weight * ev.dlog(val, ctx_level)) % pN
        coeffs[g] = total
    return GroupRingElement(ring, coeffs)


def norm_relation_check(ctx: AbelianFieldCtx, kind: str, param: int,
                        aux_primes: tuple[KolyvaginPrime, ...], ell: int, q: int,
                        budget: int = DEFAULT_FIELD_BUDGET) -> bool:
    """Exact check of the Euler-system norm relation at ell | n:

        N_{F(mu_n)/F(mu_{n/ell})} eta(n)  =  eta(n/ell)^{1 - Frob_ell^{-1}}

    Both sides are expanded in F_{q^k} and compared exactly.
    """
    ells = tuple(kp.ell for kp in aux_primes)
    if ell not in ells:
        raise ValueError(f"ell = {ell} does not divide the auxiliary product")
    sym_n = basic_symbol(ctx, kind, param, ells)
    sub = tuple(e for e in ells if e != ell)
    sym_sub = basic_symbol(ctx, kind, param, sub)
    ev = EvalContext(ctx, ells, q, budget)
    fld = ev.field
    lhs = fld.one()
    for w in range(1, ell):
        lhs = fld.mul(lhs, ev.symbol_value(sym_n, ev.lift({ell: w})))
    frob = ev.lift({ctx.f_K: ell % ctx.f_K, ev.p_part: ell % ev.p_part,
                    **{e: ell % e for e in sub}})
    frob_inv = pow(frob, -1, ev.M)
    rhs = fld.mul(ev.symbol_value(sym_sub, 1),
                  fld.inv(ev.symbol_value(sym_sub, frob_inv)))
    return lhs == rhs
