import itertools
import random

import pytest

from cycfit.errors import MixedAmbient
from cycfit.groupring import (
    Character,
    FiniteAbelianGroup,
    GroupRing,
    chi_project,
    howell_form,
    ideal_contains,
    ideal_join,
    ideal_normal_form,
    principal_ideal,
    scalar_ring,
)


def z2_ring(p=3, N=2):
    return GroupRing(FiniteAbelianGroup((2,), 1), p, N)


def quadratic_chi(p=3, N=2):
    mod = p**N
    return Character((2,), p, N, (mod - 1,))


def test_chi_project_identity():
    ring = z2_ring()
    one = ring.one()
    out = chi_project(one, quadratic_chi())
    assert out.coeffs == {(0,): 1}


def test_chi_project_kills_norm_element():
    ring = z2_ring(3, 2)  # Z/9[Z/2]
    sigma = (1, 0)
    x = ring.one() + ring.monomial(sigma)
    assert chi_project(x, quadratic_chi(3, 2)).is_zero()


def test_chi_project_one_minus_sigma_is_two():
    ring = z2_ring(3, 2)
    x = ring.one() - ring.monomial((1, 0))
    out = chi_project(x, quadratic_chi(3, 2))
    assert out.coeffs == {(0,): 2}


def test_chi_project_is_ring_hom():
    ring = z2_ring(3, 3)
    chi = quadratic_chi(3, 3)
    rng = random.Random(11)
    for _ in range(30):
        x = ring.element({g: rng.randrange(27) for g in ring.group.elements()})
        y = ring.element({g: rng.randrange(27) for g in ring.group.elements()})
        assert chi_project(x * y, chi) == chi_project(x, chi) * chi_project(y, chi)
        assert chi_project(x + y, chi) == chi_project(x, chi) + chi_project(y, chi)


def test_trivial_character_is_coefficient_sum():
    ring = z2_ring(3, 2)
    chi0 = Character((2,), 3, 2, (1,))
    rng = random.Random(5)
    x = ring.element({g: rng.randrange(9) for g in ring.group.elements()})
    total = sum(x.coeffs.values()) % 9
    assert chi_project(x, chi0).coeffs.get((0,), 0) == total


def gamma_ring(p=3, N=2, m=1):
    return GroupRing(FiniteAbelianGroup((), p**m), p, N)


def test_ideal_nf_zero_and_gcd():
    ring = scalar_ring(3, 3)  # Z/27
    z = ideal_normal_form([ring.zero()], ring)
    assert z.is_zero_ideal()
    nf = ideal_normal_form([ring.monomial((0,), 6), ring.monomial((0,), 9)], ring)
    assert nf.rows == ((3,),)
    assert nf.principal_valuation() == 1


def brute_ideal_elements(ring, gens):
    """All elements of the ideal generated by gens (tiny rings only)."""
    elems = {ring.zero()}
    # R-multiples of each generator
    coeff_space = list(itertools.product(range(ring.mod), repeat=ring.group.order))
    multiples = set()
    for g in gens:
        for coeffs in coeff_space:
            r = ring.from_vector(coeffs)
            multiples.add(r * g)
    frontier = set(multiples)
    while frontier:
        new = set()
        for a in frontier:
            for b in multiples:
                c = a + b
                if c not in elems:
                    new.add(c)
        elems |= frontier
        frontier = new - elems
    return elems


def test_gamma_minus_one_lattice_index():
    ring = gamma_ring(3, 2, 1)  # Z/9[Z/3]
    g = ring.gamma_minus_one()
    nf = ideal_normal_form([g], ring)
    elems = brute_ideal_elements(ring, [g])
    # rank-2 sublattice of index 9 in the 729-element ambient
    assert len(elems) == 81
    assert len(nf.rows) == 2
    for e in elems:
        assert nf.contains(e)
    count = sum(1 for coeffs in itertools.product(range(9), repeat=3)
                if nf.contains_vector(coeffs))
    assert count == 81


def test_ideal_contains_examples():
    ring27 = scalar_ring(3, 3)
    nf3 = ideal_normal_form([ring27.monomial((0,), 3)], ring27)
    assert ideal_contains(nf3, ring27.monomial((0,), 6))
    assert not ideal_contains(nf3, ring27.one())
    ring = gamma_ring(3, 2, 1)
    nf = ideal_normal_form([ring.gamma_minus_one(), ring.monomial(ring.group.identity(), 3)], ring)
    gamma2 = ring.monomial(ring.group.gamma_element(2))
    assert ideal_contains(nf, gamma2 - ring.one())


def test_nf_idempotent_and_order_independent():
    ring = gamma_ring(3, 2, 1)
    rng = random.Random(23)
    for _ in range(15):
        gens = [ring.from_vector([rng.randrange(9) for _ in range(3)]) for _ in range(3)]
        nf = ideal_normal_form(gens, ring)
        assert ideal_normal_form(nf.generators(), ring) == nf
        perm = gens[::-1]
        assert ideal_normal_form(perm, ring) == nf


def test_nf_monotone():
    ring = gamma_ring(3, 2, 1)
    rng = random.Random(29)
    for _ in range(15):
        gens = [ring.from_vector([rng.randrange(9) for _ in range(3)]) for _ in range(2)]
        extra = ring.from_vector([rng.randrange(9) for _ in range(3)])
        small = ideal_normal_form(gens, ring)
        big = ideal_normal_form(gens + [extra], ring)
        assert big.contains_ideal(small)


def test_bad_decomposition_rejected():
    from cycfit.errors import BadDecomposition

    with pytest.raises(BadDecomposition):
        GroupRing(FiniteAbelianGroup((3,), 1), 3, 2)  # |Delta| shares p


def test_mixed_ambient_rejected():
    r1 = scalar_ring(3, 2)
    r2 = scalar_ring(3, 3)
    with pytest.raises(MixedAmbient):
        ideal_normal_form([r1.one(), r2.one()], r1)


def test_howell_form_is_canonical_under_row_shuffle():
    rng = random.Random(31)
    for _ in range(20):
        rows = [[rng.randrange(27) for _ in range(4)] for _ in range(5)]
        h1 = howell_form(rows, 3, 3)
        shuffled = rows[:]
        rng.shuffle(shuffled)
        assert howell_form(shuffled, 3, 3) == h1


def test_nf_absorbs_linear_combinations():
    ring = gamma_ring(3, 2, 1)
    rng = random.Random(37)
    for _ in range(15):
        gens = [ring.from_vector([rng.randrange(9) for _ in range(3)]) for _ in range(2)]
        combo = gens[0] * ring.from_vector([rng.randrange(9) for _ in range(3)]) + gens[1] * 2
        assert ideal_normal_form(gens + [combo], ring) == ideal_normal_form(gens, ring)


def test_principal_ideal_semantics():
    assert principal_ideal(3, 3, 0).is_unit_ideal()
    assert principal_ideal(3, 3, 3).is_zero_ideal()
    assert principal_ideal(3, 3, 2).rows == ((9,),)


def test_ideal_join():
    ring = scalar_ring(3, 3)
    a = ideal_normal_form([ring.monomial((0,), 9)], ring)
    b = ideal_normal_form([ring.monomial((0,), 3)], ring)
    assert ideal_join(a, b) == b
