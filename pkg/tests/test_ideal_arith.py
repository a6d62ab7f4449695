import random

import pytest
from sympy import primerange

from intersective.ideal_arith import (Ideal, ResidueCapError, ZeroIdealError,
                                      factor_rational_prime, format_ideal, ideal_add,
                                      ideal_contains, ideal_from_generators, ideal_mul,
                                      ideal_pow, parse_ideal, prime_ideals_up_to, principal,
                                      residue_system, uniformizer, valuation)
from intersective.largeness import Congruence, Window, density_profile
from intersective.number_field import FieldDesc

from conftest import GAUSS, QQ, SQRT5

FIELDS = [GAUSS, SQRT5, FieldDesc.quadratic(-3), FieldDesc.quadratic(2),
          FieldDesc.quadratic(-5), FieldDesc.quadratic(10)]


def subgroup_index(gens, F):
    """[Z^2 : I] for the ideal generated by ``gens``, by closing the image of
    the Z-spanning set {g, g*w} in (Z/N)^2 with N = |norm(g0)|."""
    t, n = F.min_poly_of_omega
    N = abs(gens[0].norm())
    vecs = []
    for g in gens:
        vecs.append((g.a % N, g.b % N))
        # g*w = (a + b w) w = n b + (a + t b) w
        vecs.append(((n * g.b) % N, (g.a + t * g.b) % N))
    seen = {(0, 0)}
    frontier = [(0, 0)]
    while frontier:
        x, y = frontier.pop()
        for u, v in vecs:
            q = ((x + u) % N, (y + v) % N)
            if q not in seen:
                seen.add(q)
                frontier.append(q)
    return N * N // len(seen)


def test_worked_generators():
    I = ideal_from_generators([GAUSS(5)], GAUSS)
    assert I.basis == [[5, 0], [0, 5]] and I.norm == 25
    assert principal(GAUSS(1, 1)).norm == 2
    w = SQRT5.omega()
    J = ideal_from_generators([SQRT5(3), 1 + 2 * w], SQRT5)
    assert J.norm == subgroup_index([SQRT5(3), 1 + 2 * w], SQRT5)


def test_zero_ideal():
    with pytest.raises(ZeroIdealError):
        ideal_from_generators([GAUSS(0)], GAUSS)
    with pytest.raises(ZeroIdealError):
        ideal_from_generators([QQ(0), QQ(0)], QQ)


def test_norm_matches_index_oracle():
    rng = random.Random(5)
    checked = 0
    for F in FIELDS:
        for _ in range(25):
            g0 = F(rng.randint(-12, 12), rng.randint(-12, 12))
            g1 = F(rng.randint(-30, 30), rng.randint(-30, 30))
            if g0.norm() == 0 or abs(g0.norm()) > 400:
                continue
            I = ideal_from_generators([g0, g1], F)
            assert I.norm == subgroup_index([g0, g1], F), (F, g0, g1)
            checked += 1
    assert checked > 100


def test_kummer_examples():
    five = factor_rational_prime(5, GAUSS)
    w = GAUSS.omega()
    assert [pf.prime_ideal for pf in five] == [
        ideal_from_generators([GAUSS(5), w - 2], GAUSS),
        ideal_from_generators([GAUSS(5), w - 3], GAUSS)]
    assert [pf.norm for pf in five] == [5, 5]
    (three,) = factor_rational_prime(3, GAUSS)
    assert three.residue_degree == 2 and three.norm == 9
    (two,) = factor_rational_prime(2, GAUSS)
    assert two.ramification == 2
    assert two.prime_ideal == principal(1 + w)
    assert ideal_pow(two.prime_ideal, 2) == principal(GAUSS(2))
    with pytest.raises(ValueError):
        factor_rational_prime(9, GAUSS)


@pytest.mark.parametrize("F", FIELDS + [QQ])
def test_factorization_reassembles(F):
    for p in primerange(2, 120):
        factors = factor_rational_prime(p, F)
        prod = None
        total = 1
        for pf in factors:
            part = ideal_pow(pf.prime_ideal, pf.ramification)
            prod = part if prod is None else ideal_mul(prod, part)
            total *= pf.norm ** pf.ramification
            assert pf.norm == p ** pf.residue_degree
        assert prod == ideal_from_generators([F(p)], F)
        assert total == p ** F.degree


def test_products_and_membership():
    w = GAUSS.omega()
    P = principal(1 + w)
    assert ideal_mul(P, P) == principal(2 * w) == principal(GAUSS(2))
    assert GAUSS(5) not in P
    rng = random.Random(1)
    for _ in range(200):
        x = GAUSS(rng.randint(-50, 50), rng.randint(-50, 50))
        if x:
            assert x in principal(x)
            assert x * GAUSS(3, 1) in principal(x)


def test_sum_is_gcd_like():
    w = GAUSS.omega()
    assert ideal_add(principal(GAUSS(2)), principal(GAUSS(5))).norm == 1
    assert ideal_add(principal(GAUSS(2)), principal(1 + w)) == principal(1 + w)


def test_residue_systems():
    assert [x.a for x in residue_system(Ideal(2, 0, 1, QQ))] == [0, 1]
    w = GAUSS.omega()
    P = principal(1 + w)
    assert len(residue_system(P)) == 2
    P5 = ideal_pow(P, 5)
    reps = residue_system(P5)
    assert len(reps) == 32
    # pairwise incongruent
    for i, x in enumerate(reps):
        for y in reps[i + 1:]:
            assert not ideal_contains(P5, x - y)
    with pytest.raises(ResidueCapError):
        residue_system(principal(GAUSS(1000)), cap=10**5)


def test_residue_cap_env(monkeypatch):
    monkeypatch.setenv("INTERSECTIVE_RESIDUE_CAP", "10")
    with pytest.raises(ResidueCapError):
        residue_system(principal(GAUSS(4)))


def test_text_round_trip_and_validation():
    for F in (GAUSS, SQRT5):
        for pf in prime_ideals_up_to(60, F):
            I = pf.prime_ideal
            assert parse_ideal(format_ideal(I), F) == I
    assert format_ideal(Ideal(7, 0, 1, QQ)) == "[[7,0]]"
    assert parse_ideal("[[7,0]]", QQ).a == 7
    with pytest.raises(ValueError):
        parse_ideal("[[3,1],[0,1]]", GAUSS)        # 1+i with 3: not closed under *i


def test_prime_ideal_ordering():
    norms = [pf.norm for pf in prime_ideals_up_to(100, GAUSS)]
    assert norms == sorted(norms)
    assert norms[:4] == [2, 5, 5, 9]


def test_valuation_and_uniformizer():
    w = GAUSS.omega()
    P = principal(1 + w)
    assert valuation(GAUSS(8), P) == 6
    assert valuation(GAUSS(3), P) == 0
    for pf in prime_ideals_up_to(50, SQRT5):
        pi = uniformizer(pf.prime_ideal)
        assert valuation(pi, pf.prime_ideal) == 1


@pytest.mark.parametrize("side", [40, 101, 400])
def test_ideal_density_law(side):
    P = principal(1 + GAUSS.omega())
    W = Window.box([0, 0], [side - 1, side - 1])
    (d,) = density_profile(Congruence(2, ideal=P), [W])
    assert abs(d - 0.5) <= 2 / side
