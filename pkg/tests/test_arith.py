import random

import pytest

from cycfit.arith import (
    crt,
    dlog_p_part,
    factorint,
    is_prime,
    kronecker,
    make_field,
    root_of_unity,
    sqrt_mod_prime,
    val_p,
)
from cycfit.errors import BudgetExceeded, NotPrime, OrderNotDividing, ZeroElement


def brute_order(ctx, x):
    n, cur = 1, x
    while cur != ctx.one():
        cur = ctx.mul(cur, x)
        n += 1
    return n


def test_make_field_7_generator_is_3():
    # brute-force oracle: smallest residue of full order 6 mod 7
    best = None
    for a in range(2, 7):
        n, cur = 1, a
        while cur != 1:
            cur = cur * a % 7
            n += 1
        if n == 6:
            best = a
            break
    assert best == 3
    assert make_field(7, 1).g == 3


def test_make_field_25_generator_order():
    ctx = make_field(5, 2)
    assert ctx.order == 24
    assert brute_order(ctx, ctx.g) == 24
    # modulus is irreducible: no root in F_5
    c0, c1, _ = ctx.modulus
    assert all((x * x + c1 * x + c0) % 5 for x in range(5))


def test_make_field_rejects_composite():
    with pytest.raises(NotPrime):
        make_field(4, 1)


def test_make_field_budget():
    with pytest.raises(BudgetExceeded):
        make_field(13, 128)


def test_root_of_unity_examples():
    F7 = make_field(7, 1)
    assert root_of_unity(F7, 1) == 1
    z3 = root_of_unity(F7, 3)
    assert z3 == 2 and pow(z3, 3, 7) == 1
    with pytest.raises(OrderNotDividing):
        root_of_unity(F7, 5)


def test_root_of_unity_compatibility():
    ctx = make_field(5, 2)  # order 24
    for M in (1, 2, 3, 4, 6, 8, 12, 24):
        for Mp in (M * k for k in (1, 2, 3) if 24 % (M * k) == 0):
            big = root_of_unity(ctx, Mp)
            assert ctx.pow(big, Mp // M) == root_of_unity(ctx, M)


def test_dlog_examples():
    F7 = make_field(7, 1)
    assert dlog_p_part(F7, 1, 3, 1) == 0
    assert dlog_p_part(F7, 3, 3, 1) == 1
    # 2 = 3^2 in F_7 (brute force over all residues)
    assert pow(3, 2, 7) == 2
    assert dlog_p_part(F7, 2, 3, 1) == 2
    with pytest.raises(ZeroElement):
        dlog_p_part(F7, 0, 3, 1)
    with pytest.raises(OrderNotDividing):
        dlog_p_part(F7, 2, 5, 1)


def test_dlog_homomorphism_and_kills_powers():
    ctx = make_field(19, 1)  # 19 - 1 = 2 * 3^2
    rng = random.Random(7)
    for _ in range(50):
        x = rng.randrange(1, 19)
        y = rng.randrange(1, 19)
        assert (
            dlog_p_part(ctx, x * y % 19, 3, 2)
            == (dlog_p_part(ctx, x, 3, 2) + dlog_p_part(ctx, y, 3, 2)) % 9
        )
        assert dlog_p_part(ctx, pow(x, 9, 19), 3, 2) == 0


def test_dlog_matches_exhaustive_search_small_fields():
    # q^k <= 10^4: exhaustive discrete log must agree with the p-part value
    for q, k, p, N in ((19, 1, 3, 2), (7, 2, 3, 1), (13, 2, 7, 1), (5, 2, 3, 1)):
        ctx = make_field(q, k)
        table = {}
        cur = ctx.one()
        for j in range(ctx.order):
            table[cur] = j
            cur = ctx.mul(cur, ctx.g)
        pN = p**N
        assert ctx.order % pN == 0
        for x, j in list(table.items())[:200]:
            assert dlog_p_part(ctx, x, p, N) == j % pN


def test_extension_field_inverse_and_pow():
    ctx = make_field(5, 2)
    rng = random.Random(3)
    for _ in range(20):
        a = (rng.randrange(5), rng.randrange(5))
        if ctx.is_zero(a):
            continue
        assert ctx.mul(a, ctx.inv(a)) == ctx.one()
        assert ctx.pow(a, -1) == ctx.inv(a)


def test_mod_ring():
    from cycfit.arith import ModRing

    ring = ModRing(3, 4)
    assert ring.mod == 81
    assert ring.val(54) == 3
    assert ring.unit_inverse(2) * 2 % 81 == 1
    rng = random.Random(13)
    for _ in range(30):
        a, b = rng.randrange(81), rng.randrange(81)
        assert (a + b) % 81 == ((a % 81) + (b % 81)) % 81
        assert a * b % 81 == (a % 81) * (b % 81) % 81
    with pytest.raises(NotPrime):
        ModRing(9, 2)
    with pytest.raises(NotPrime):
        ModRing(2, 2)  # p must be odd


def test_utility_functions():
    assert factorint(2**3 * 3 * 257) == {2: 3, 3: 1, 257: 1}
    assert kronecker(257, 3) == -1
    assert kronecker(257, 13) == 1
    assert kronecker(13, 3) == 1
    r = sqrt_mod_prime(257 % 13, 13)
    assert r is not None and r * r % 13 == 257 % 13
    assert sqrt_mod_prime(2, 5) is None
    assert crt([1, 2], [3, 5]) == 7
    assert val_p(18, 3, 5) == 2 and val_p(0, 3, 5) == 5
    assert is_prime(2**61 - 1) and not is_prime(2**67 - 1)
