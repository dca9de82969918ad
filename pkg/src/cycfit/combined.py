"""A small formal algebra of derivative classes.

The three structural facts about divisor/reciprocity coordinates of
derivative classes are encoded as rewrite axioms over a free module:

  (A1)  bracket_s kappa(n) -> 0                     when s does not divide n
  (A2)  bracket_l kappa(n) -> phi_l kappa(n/l)      when l | n
  (A3)  phi_l kappa(n) -> 0                         when l | n, n well-ordered

Coefficients are multilinear integer polynomials in formal weights w_l; the
combined elements x_{nu,q} = sum_{e|nu} w_e kappa(q*nu/e) are built with
their auxiliary-group tensor tags tracked and stripped only after checking
they are uniform, which is what makes permuting the l-labels safe.

Everything here is label-level symbol pushing: it needs no primes, no
fields, and no randomness.  The numeric entry point evaluates the same
combinations through the residue engine.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import MissingWeight, NotWellOrdered, ReductionFailure
from .fields import KolyvaginPrime, is_well_ordered
from .groupring import GroupRingElement

# coefficient = dict {frozenset(weight labels): int}, a multilinear polynomial
Coeff = dict
# formal sum = dict {atom: Coeff}; atoms are ("kappa"|"phi"|"bracket", ..., frozenset)
FormalSum = dict


def _coeff_add(a: Coeff, b: Coeff, sign: int = 1) -> Coeff:
    out = dict(a)
    for mono, c in b.items():
        out[mono] = out.get(mono, 0) + sign * c
        if out[mono] == 0:
            del out[mono]
    return out


def _coeff_scale(a: Coeff, mono: frozenset, c: int = 1) -> Coeff:
    out: Coeff = {}
    for m, v in a.items():
        if m & mono:
            raise ReductionFailure("weight monomials collided (non-multilinear product)")
        out[frozenset(m | mono)] = v * c
    return out


def _sum_add(total: FormalSum, atom, coeff: Coeff, sign: int = 1) -> None:
    cur = total.get(atom, {})
    new = _coeff_add(cur, coeff, sign)
    if new:
        total[atom] = new
    elif atom in total:
        del total[atom]


@dataclass
class CombinedClass:
    """x_{nu,q} = sum over e | nu of w_e kappa(q * nu/e) (tags stripped)."""

    nu: tuple
    q: object
    terms: FormalSum  # kappa atoms only

    def labels(self) -> frozenset:
        return frozenset(self.nu) | {self.q}


def _subsets(labels: tuple):
    n = len(labels)
    for mask in range(1 << n):
        yield frozenset(labels[i] for i in range(n) if mask >> i & 1)


def build_combined(nu: tuple, q, weights: dict | None = None) -> CombinedClass:
    """Expand the divisor-lattice product defining x_{nu,q}.

    weights maps each l in nu to its symbolic presence (None = symbolic
    indeterminate w_l); every l must be covered.  The auxiliary tensor tag of
    each term is e union (nu - e) = nu, checked uniform and then stripped.
    """
    if weights is not None:
        for ell in nu:
            if ell not in weights:
                raise MissingWeight(f"no weight for {ell}")
    if len(set(nu)) != len(nu) or q in nu:
        raise NotWellOrdered("labels of q*nu must be distinct")
    terms: FormalSum = {}
    full = frozenset(nu)
    for e in _subsets(tuple(nu)):
        kappa_arg = frozenset({q} | (full - e))
        tag = e | (full - e)
        if tag != full:  # pragma: no cover - structural invariant
            raise ReductionFailure("tensor tags failed to combine")
        _sum_add(terms, ("kappa", kappa_arg), {frozenset(e): 1})
    return CombinedClass(nu=tuple(nu), q=q, terms=terms)


def apply_bracket(s, fc: CombinedClass) -> FormalSum:
    """[x]^s, reduced by (A1)/(A2)."""
    out: FormalSum = {}
    for atom, coeff in fc.terms.items():
        _kind, arg = atom[0], atom[-1]
        if s not in arg:
            continue  # A1
        _sum_add(out, ("phi", s, frozenset(arg - {s})), coeff)  # A2
    return out


def apply_phi(ell, fc: CombinedClass, well_ordered_context: bool = True) -> FormalSum:
    """phi^ell(x), reduced by (A3) when the argument is divisible by ell.

    Divisors of a well-ordered product are well-ordered (the chain moduli
    only shrink), so in a well-ordered context A3 applies to every kappa
    whose argument contains ell.
    """
    out: FormalSum = {}
    for atom, coeff in fc.terms.items():
        arg = atom[-1]
        if ell in arg and well_ordered_context:
            continue  # A3
        _sum_add(out, ("phi", ell, arg), coeff)
    return out


@dataclass(frozen=True)
class CombinedIdentityReport:
    epsilon: int
    identity1: bool
    identity2: bool
    identity3: bool

    @property
    def passed(self) -> bool:
        return self.identity1 and self.identity2 and self.identity3


def check_combined_identities(epsilon: int, strict: bool = True) -> CombinedIdentityReport:
    """Check the three structural identities of the combined elements for a
    well-ordered shape with epsilon(nu) = epsilon and symbolic weights:

      (1) [x_{nu,q}]^s = 0 for s not dividing q*nu;
      (2) [x_{nu,q}]^l = phi^l(x_{nu/l,q}) for l | nu;
      (3) phi^l(x_{nu,q}) = w_l * phi^l(x_{nu/l,q}) for l | nu.

    Each must reduce to the empty sum in the free module.
    """
    nu = tuple(f"l{i}" for i in range(1, epsilon + 1))
    q = "q"
    x = build_combined(nu, q)
    ok1 = not apply_bracket("s_fresh", x)
    ok2 = True
    ok3 = True
    for ell in nu:
        sub_nu = tuple(l for l in nu if l != ell)
        x_sub = build_combined(sub_nu, q)
        lhs2 = apply_bracket(ell, x)
        rhs2 = apply_phi(ell, x_sub)
        diff2 = dict(lhs2)
        for atom, coeff in rhs2.items():
            _sum_add(diff2, atom, coeff, sign=-1)
        if diff2:
            ok2 = False
        lhs3 = apply_phi(ell, x)
        rhs3_raw = apply_phi(ell, x_sub)
        diff3 = dict(lhs3)
        for atom, coeff in rhs3_raw.items():
            _sum_add(diff3, atom, _coeff_scale(coeff, frozenset({ell})), sign=-1)
        if diff3:
            ok3 = False
    report = CombinedIdentityReport(epsilon=epsilon, identity1=ok1, identity2=ok2, identity3=ok3)
    if strict and not report.passed:
        raise ReductionFailure(f"identity system failed at epsilon = {epsilon}: {report}")
    return report


# ---------------------------------------------------------------------------
# Numeric instantiation


def combined_expansion(nu_kps: tuple[KolyvaginPrime, ...], q_kp: KolyvaginPrime,
                    weights: dict[int, int], p: int, N: int):
    """The (weight, auxiliary-primes) expansion of x_{nu,q} with numeric
    weights; validates the chain condition on (q, l_1, ..., l_r)."""
    chain = (q_kp.ell,) + tuple(kp.ell for kp in nu_kps)
    if not is_well_ordered(p, N, chain):
        raise NotWellOrdered(f"{chain} violates the chain congruences at level {N}")
    for kp in nu_kps:
        if kp.ell not in weights:
            raise MissingWeight(f"no weight for {kp.ell}")
    out = []
    ells = tuple(kp.ell for kp in nu_kps)
    for e in _subsets(ells):
        w = 1
        for ell in e:
            w = w * weights[ell]
        aux = tuple(kp for kp in nu_kps if kp.ell not in e)
        out.append((w % p**N, (q_kp,) + aux))
    return out


def reciprocity_on_combined(ctx, nu_kps: tuple[KolyvaginPrime, ...], q_kp: KolyvaginPrime,
                     weights: dict[int, int], eval_kp: KolyvaginPrime,
                     kind: str = "d", param: int | None = None,
                     budget: int | None = None) -> GroupRingElement:
    """phi_bar at a fresh prime applied linearly to x_{nu,q}."""
    from .config import DEFAULT_FIELD_BUDGET
    from .maps import phi_bar
    from .units import derivative_class

    budget = budget if budget is not None else DEFAULT_FIELD_BUDGET
    param = param if param is not None else ctx.f_K
    if any(eval_kp.ell == kp.ell for kp in nu_kps) or eval_kp.ell == q_kp.ell:
        raise NotWellOrdered("evaluation prime must not divide q*nu")
    total = None
    for w, aux in combined_expansion(nu_kps, q_kp, weights, ctx.p, ctx.N):
        aux_sorted = tuple(sorted(aux, key=lambda kp: kp.ell))
        cls = derivative_class(ctx, kind, param, aux_sorted)
        val = phi_bar(ctx, eval_kp, cls, budget=budget) * w
        total = val if total is None else total + val
    return total
