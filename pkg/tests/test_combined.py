import pytest

from cycfit.errors import MissingWeight, NotWellOrdered
from cycfit.fields import KolyvaginPrime, build_field, evaluation_primes, kolyvagin_primes
from cycfit.combined import (
    apply_bracket,
    apply_phi,
    build_combined,
    check_combined_identities,
    reciprocity_on_combined,
    combined_expansion,
)


def test_build_combined_divisor_lattice():
    x1 = build_combined((), "q")
    assert x1.terms == {("kappa", frozenset({"q"})): {frozenset(): 1}}
    xl = build_combined(("l",), "q")
    assert xl.terms == {
        ("kappa", frozenset({"q", "l"})): {frozenset(): 1},
        ("kappa", frozenset({"q"})): {frozenset({"l"}): 1},
    }
    xll = build_combined(("l1", "l2"), "q")
    assert len(xll.terms) == 4
    assert xll.terms[("kappa", frozenset({"q"}))] == {frozenset({"l1", "l2"}): 1}
    assert xll.terms[("kappa", frozenset({"q", "l1"}))] == {frozenset({"l2"}): 1}


def test_build_combined_label_validation():
    with pytest.raises(NotWellOrdered):
        build_combined(("l", "l"), "q")
    with pytest.raises(MissingWeight):
        build_combined(("l1", "l2"), "q", weights={"l1": 1})


def test_build_combined_respects_divisor_recursion():
    # x at nu splits as (terms of x at nu/l with l folded into the argument)
    # plus w_l times x at nu/l
    full = build_combined(("l1", "l2"), "q")
    sub = build_combined(("l1",), "q")
    reconstructed = {}
    for (kind, arg), coeff in sub.terms.items():
        reconstructed[(kind, frozenset(arg | {"l2"}))] = dict(coeff)
    for (kind, arg), coeff in sub.terms.items():
        key = (kind, arg)
        tgt = reconstructed.setdefault(key, {})
        for mono, c in coeff.items():
            m2 = frozenset(mono | {"l2"})
            tgt[m2] = tgt.get(m2, 0) + c
    assert reconstructed == full.terms


def test_axioms():
    x = build_combined(("l",), "q")
    # A1: a fresh prime coordinate vanishes termwise
    assert apply_bracket("s", x) == {}
    # A2: the l-coordinate turns kappa(ql) into phi_l kappa(q)
    br = apply_bracket("l", x)
    assert br == {("phi", "l", frozenset({"q"})): {frozenset(): 1}}
    # A3: phi_l kills every kappa whose argument contains l
    ph = apply_phi("l", x)
    assert ph == {("phi", "l", frozenset({"q"})): {frozenset({"l"}): 1}}


def test_formal_identities_all_shapes():
    for eps in range(0, 4):
        report = check_combined_identities(eps)
        assert report.passed, report


def test_combined_expansion_validation():
    ctx = build_field(3, 257, 0, 1)
    q_kp = next(kolyvagin_primes(ctx))
    bad = KolyvaginPrime.build(31, 3)  # 31 != 1 mod 3*13
    with pytest.raises(NotWellOrdered):
        combined_expansion((bad,), q_kp, {31: 1}, 3, 1)


def test_numeric_phi_linearity():
    # two independent computation paths agree, including degenerate weights
    ctx = build_field(3, 257, 0, 1)
    q_kp = next(kolyvagin_primes(ctx))
    l_kp = next(kolyvagin_primes(ctx, extra_modulus=q_kp.ell))
    eval_kp = KolyvaginPrime.build(next(evaluation_primes(ctx, q_kp.ell * l_kp.ell, level=1)), 3)
    from cycfit.maps import phi_bar
    from cycfit.units import derivative_class

    w = {l_kp.ell: 5}
    via_formal = reciprocity_on_combined(ctx, (l_kp,), q_kp, w, eval_kp)
    direct = None
    for wt, aux in combined_expansion((l_kp,), q_kp, w, 3, 1):
        cls = derivative_class(ctx, "d", 257, tuple(sorted(aux, key=lambda kp: kp.ell)))
        v = phi_bar(ctx, eval_kp, cls) * wt
        direct = v if direct is None else direct + v
    assert via_formal == direct
    # zero weights: collapses to phi of the full class
    via0 = reciprocity_on_combined(ctx, (l_kp,), q_kp, {l_kp.ell: 0}, eval_kp)
    full = derivative_class(ctx, "d", 257,
                            tuple(sorted((q_kp, l_kp), key=lambda kp: kp.ell)))
    assert via0 == phi_bar(ctx, eval_kp, full)
    with pytest.raises(NotWellOrdered):
        reciprocity_on_combined(ctx, (l_kp,), q_kp, w, q_kp)
