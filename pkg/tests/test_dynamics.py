import math
import random
from decimal import Decimal, getcontext
from fractions import Fraction

import numpy as np
import pytest

from intersective import _kernels
from intersective.dynamics import (HeisenbergSystem, KroneckerSystem, Observable,
                                   correlation, fixed_frac, ghk_draws, ghk_estimate, ghk_spread,
                                   heisenberg_mul, heisenberg_power, heisenberg_reduce,
                                   parse_system, return_set_scan, to_fixed, torus_overlap)
from intersective.largeness import Window
from intersective.poly_ring import parse_poly

from conftest import GAUSS, QQ

X = parse_poly("x", QQ)
X2 = parse_poly("x^2", QQ)
STAND_IN = 0.6180339887


def circ(a, b):
    d = np.abs(np.asarray(a) - np.asarray(b)) % 1.0
    return np.minimum(d, 1.0 - d)


def golden_norms(us):
    """||u * golden|| from 60-digit decimal arithmetic."""
    getcontext().prec = 60
    g = (Decimal(5).sqrt() - 1) / 2
    out = []
    for u in us:
        v = u * g
        f = v - v.to_integral_value(rounding="ROUND_FLOOR")
        out.append(float(min(f, 1 - f)))
    return out


def test_fixed_point_constants():
    assert abs(fixed_frac(to_fixed("golden")) - (math.sqrt(5) - 1) / 2) < 1e-15
    assert abs(fixed_frac(to_fixed("sqrt2")) - (math.sqrt(2) - 1)) < 1e-15
    assert fixed_frac(to_fixed(0.25)) == 0.25
    # u^2 * alpha mod 1 for u = 10^4 agrees with 60-digit arithmetic
    g = to_fixed("golden")
    assert abs(fixed_frac(10**8 * g) - (1 - golden_norms([10**8])[0]) % 1) < 1e-12 or \
        abs(fixed_frac(10**8 * g) - golden_norms([10**8])[0]) < 1e-12


def test_torus_overlap_examples():
    assert torus_overlap([0.5], [0.0]) == 0.5
    assert torus_overlap([Fraction(1, 2)], [Fraction(3, 10)]) == Fraction(1, 5)
    assert torus_overlap([Fraction(4, 5)], [Fraction(1, 2)]) == Fraction(3, 5)
    assert abs(torus_overlap([0.8], [0.5]) - 0.6) < 1e-12


def test_torus_overlap_against_sampling():
    rng = np.random.default_rng(0)
    x = rng.random((200_000, 2))
    for _ in range(10):
        s = rng.uniform(0.1, 0.9, 2)
        t = rng.uniform(-3, 3, 2)
        inside = np.all(x < s, axis=1) & np.all(((x + t) % 1.0) < s, axis=1)
        assert abs(inside.mean() - torus_overlap(s, t)) < 5 * math.sqrt(0.25 / len(x))


def test_correlation_examples():
    K = KroneckerSystem.make([STAND_IN], [0.5])
    r0 = correlation(K, [X2], 0)
    assert r0.value == 0.5 and r0.method == "EXACT"
    r1 = correlation(K, [X2], 1)
    assert abs(r1.value - (0.5 - (1 - STAND_IN))) < 1e-9
    H = HeisenbergSystem.make(["sqrt2", "golden", 0.3])
    for u in (0, 3, 77):
        assert correlation(H, [X2], u, samples=2000, seed=1).value == 1.0


def test_correlation_at_zero_is_measure():
    K = KroneckerSystem.make([[0.1, 0.7], [0.37, 0.2]], [0.3, 0.6], field=GAUSS)
    Y = parse_poly("x^2+x", GAUSS)
    assert abs(correlation(K, [Y], (0, 0)).value - 0.18) < 1e-15
    r = correlation(K, [Y, parse_poly("x", GAUSS)], (0, 0), samples=20000, seed=5)
    assert abs(r.value - 0.18) <= 3 * r.stderr
    H = HeisenbergSystem.make(["sqrt2", "golden", 0.1], sides=(0.5, 0.5, 0.5))
    r = correlation(H, [X2], 0, samples=20000, seed=3)
    assert abs(r.value - 0.125) <= 3 * r.stderr


def test_exact_and_monte_carlo_agree():
    rng = random.Random(17)
    for trial in range(100):
        D = rng.choice([1, 2])
        alpha = [rng.random() for _ in range(D)]
        sides = [rng.uniform(0.2, 0.9) for _ in range(D)]
        K = KroneckerSystem.make(alpha, sides, [rng.random() for _ in range(D)])
        p = parse_poly(rng.choice(["x", "x^2", "x^3-x", "2*x^2+x"]), QQ)
        u = rng.randint(-50, 50)
        ex = correlation(K, [p], u)
        mc = correlation(K, [p], u, method="mc", samples=4000, seed=trial)
        assert abs(ex.value - mc.value) <= 4 * mc.stderr, (trial, ex, mc)


def test_heisenberg_reduce_examples():
    assert heisenberg_reduce((0.5, 0.5, 0.5)) == (0.5, 0.5, 0.5)
    x, y, z = heisenberg_reduce((1.2, 0.0, 0.0))
    assert abs(x - 0.2) < 1e-12 and y == 0.0 and z == 0.0
    x, y, z = heisenberg_reduce((0.5, 1.5, 0.3))
    assert (x, y) == (0.5, 0.5) and abs(z - 0.8) < 1e-12


def test_heisenberg_reduce_is_right_lattice_multiplication():
    rng = random.Random(2)
    for _ in range(500):
        g = tuple(rng.uniform(-20, 20) for _ in range(3))
        r = heisenberg_reduce(g)
        assert all(0 <= c < 1 for c in r)
        # g^-1 r must be an integer point
        ginv = (-g[0], -g[1], -g[2] + g[0] * g[1])
        q = heisenberg_mul(ginv, r)
        assert all(abs(c - round(c)) < 1e-9 for c in q)


def test_heisenberg_closed_form():
    a = (0.3, -1.7, 0.45)
    ainv = (-a[0], -a[1], -a[2] + a[0] * a[1])
    g = (0.0, 0.0, 0.0)
    for n in range(1, 51):
        g = heisenberg_mul(g, a)
        assert np.allclose(g, heisenberg_power(a, n), atol=1e-9)
    g = (0.0, 0.0, 0.0)
    for n in range(1, 51):
        g = heisenberg_mul(g, ainv)
        assert np.allclose(g, heisenberg_power(a, -n), atol=1e-9)


def test_heisenberg_exact_power_matches_float_path():
    H = HeisenbergSystem.make([0.3, 0.7, 0.45])
    rng = np.random.default_rng(4)
    x = rng.random((50, 3))
    for n in (-40, -3, 0, 1, 7, 50):
        g = heisenberg_power(H.generator, n)
        ref = np.array([heisenberg_reduce(heisenberg_mul(g, tuple(p))) for p in x])
        assert np.all(circ(H.act(n, x), ref) < 1e-9)


def test_action_additivity():
    rng = random.Random(9)
    K = KroneckerSystem.make([["golden", "sqrt2"], [0.123, "sqrt3"]], [0.5, 0.5], field=GAUSS)
    H = HeisenbergSystem.make(["sqrt2", "golden", 0.1])
    for _ in range(1000):
        u = (rng.randint(-10**6, 10**6), rng.randint(-10**6, 10**6))
        v = (rng.randint(-10**6, 10**6), rng.randint(-10**6, 10**6))
        x = np.array([rng.random(), rng.random()])
        lhs = K.act((u[0] + v[0], u[1] + v[1]), x)
        rhs = K.act(u, K.act(v, x))
        assert np.all(circ(lhs, rhs) < 1e-12)
    for _ in range(1000):
        m, n = rng.randint(-1000, 1000), rng.randint(-1000, 1000)
        x = np.array([[rng.random() for _ in range(3)]])
        assert np.all(circ(H.act(m + n, x), H.act(m, H.act(n, x))) < 1e-10)


def test_return_times_follow_continued_fraction():
    K = KroneckerSystem.make(["golden"], [0.5])
    scan = return_set_scan(K, [X], 0.49, Window.box([1], [400]))
    # convergent denominators of the golden ratio are Fibonacci numbers; the
    # first with ||q alpha|| <= 0.01 is the first return time
    fib = [1, 2]
    while fib[-1] < 400:
        fib.append(fib[-1] + fib[-2])
    norms = golden_norms(range(1, 401))
    first = next(q for q in fib if golden_norms([q])[0] <= 0.01)
    assert scan.good[0] == (first,) == (55,)
    assert scan.good == [(u,) for u in range(1, 401) if norms[u - 1] <= 0.01]


def test_return_scan_examples():
    K = KroneckerSystem.make(["golden"], [0.5])
    W = Window.centered(10**4)
    assert return_set_scan(K, [X], 0.49, W).good
    assert return_set_scan(K, [X], 0.51, Window.centered(500)).good == []
    sq = return_set_scan(K, [X2], 0.2, Window.centered(2000))
    assert sq.good and sq.density[0] > 0


def test_return_scan_threads_are_deterministic():
    K = KroneckerSystem.make([["golden", "sqrt2"]], [0.5, 0.5])
    outs = {t: return_set_scan(K, [X, X2], 0.05, Window.centered(60), samples=500, seed=3,
                               threads=t).jsonl() for t in (1, 4, 16)}
    assert outs[1] == outs[4] == outs[16]


def test_seed_and_samples_required():
    K = KroneckerSystem.make(["golden"], [0.5])
    with pytest.raises(ValueError):
        correlation(K, [X, X2], 1)
    with pytest.raises(ValueError):
        correlation(K, [X, X2], 1, samples=0, seed=1)
    with pytest.raises(ValueError):
        return_set_scan(K, [X, X2], 0.1, Window.centered(5))


def test_parse_system():
    K = parse_system({"kronecker": {"dim": 1, "alpha": [["golden"]],
                                    "B": {"corner": [0.1], "sides": [0.5]}}})
    assert K.dim == 1 and K.corner == (0.1,) and K.field == QQ
    K2 = parse_system({"kronecker": {"field": "Q(sqrt -1)", "alpha": [[0.1], [0.2]],
                                     "B": {"sides": [0.5]}}})
    assert K2.field == GAUSS
    H = parse_system({"heisenberg": {"a": [0.1, 0.2, 0.3]}})
    assert H.measure == 1.0
    with pytest.raises(ValueError):
        parse_system({"torus": {}})


# ---------------------------------------------------------------------------
# seminorm estimates

GOLD = KroneckerSystem.make(["golden"], [1.0])
W1 = Window.box([1], [10**4])


def fourier_u2(coefs: dict) -> float:
    """Order-2 seminorm of a trigonometric polynomial on an irrational circle
    rotation: the l^4 norm of its Fourier coefficients."""
    return sum(abs(c) ** 4 for c in coefs.values()) ** 0.25


def test_ghk_constants():
    for k in range(4):
        assert abs(ghk_estimate(GOLD, Observable.constant(1.0), k, W1, 2000, 1) - 1.0) < 1e-12
    vals = [ghk_estimate(GOLD, Observable.constant(-0.5), k, W1, 500, 1) for k in range(4)]
    assert vals[0] == -0.5 and all(abs(v - 0.5) < 1e-12 for v in vals[1:])


def test_ghk_character_and_fourier_oracle():
    f = Observable.cosine([1.0])
    assert ghk_estimate(GOLD, f, 1, W1, 10**4, 3) <= 0.05
    oracle = fourier_u2({1: 0.5, -1: 0.5})
    assert abs(oracle - 0.125 ** 0.25) < 1e-15
    assert abs(ghk_estimate(GOLD, f, 2, W1, 10**4, 3) - oracle) <= 0.05
    g = Observable(_kernels.KIND_TRIG, 1, 0.0, ((1.0,), (2.0,)), (1.0, 0.5), (0.0, 0.3))
    oracle_g = fourier_u2({1: 0.5, -1: 0.5, 2: 0.25, -2: 0.25})
    assert abs(ghk_estimate(GOLD, g, 2, W1, 10**4, 3) - oracle_g) <= 0.05


def test_ghk_bounded_by_sup():
    rng = random.Random(1)
    for _ in range(6):
        f = Observable.cosine([rng.randint(1, 3)], rng.uniform(0.2, 2), rng.random(),
                              rng.uniform(-1, 1))
        for k in (1, 2, 3):
            assert 0 <= ghk_estimate(GOLD, f, k, Window.box([1], [500]), 500, 2) <= f.sup_bound + 1e-12
    box = Observable.box([0.0], [0.5])
    est = ghk_estimate(GOLD, box, 1, Window.box([1], [2000]), 2000, 2)
    assert abs(est - 0.5) < 0.02      # ||1_B||_1 = mu(B)


def test_ghk_budget_and_limits():
    assert ghk_draws(1, 10**4, 10**4) == 10**4
    assert ghk_draws(2, 10**4, 10**4) == 70
    with pytest.raises(ValueError):
        ghk_estimate(GOLD, Observable.constant(1.0), 4, W1, 10, 1)
    with pytest.raises(TypeError):
        ghk_estimate(HeisenbergSystem.make([0.1, 0.2, 0.3]), Observable.constant(1.0, 3), 1,
                     W1, 10, 1)


def test_ghk_spread():
    one = Observable.constant(1.0)
    assert ghk_spread(GOLD, one, 2, W1, 500, 1) == 0.0
    assert ghk_spread(GOLD, one, 2, W1, 500, 1, replicates=1) is None
    se = ghk_spread(GOLD, Observable.cosine([1.0]), 2, W1, 2000, 5)
    assert 0 < se < 0.05
