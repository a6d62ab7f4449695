import itertools
from fractions import Fraction

import pytest

from intersective.experiments import (PartitionError, density_return_scan, gaussian_config_demo,
                                      gaussian_map, partition_scan, recount_density)
from intersective.largeness import (BudgetError, Complement, Congruence, Everything,
                                    Intersection, RandomSet, Union, Window)
from intersective.ideal_arith import parse_ideal
from intersective.poly_ring import decompose, parse_poly

from conftest import GAUSS, QQ

SQ_G = parse_poly("x^2", GAUSS)
ONE_PLUS_I = Congruence(2, ideal=parse_ideal("[[2,1],[0,1]]", GAUSS))


def test_everything_returns_always():
    scan = density_return_scan(Everything(1), [parse_poly("x^3", QQ)], Window.centered(20),
                               Window.centered(10), 0.99)
    assert all(d == 1 for _, d in scan.rows)
    assert scan.good_density == 1 and scan.gap == 0


def test_one_plus_i_parity():
    # (a+bi)^2 = a^2-b^2 + 2abi lies in <1+i> exactly when a+b is even
    W = Window.centered(50, 2)
    scan = density_return_scan(ONE_PLUS_I, [SQ_G], W, Window.centered(3, 2), 0.1)
    for (a, b), d in scan.rows:
        assert d == (Fraction(5101, 10201) if (a + b) % 2 == 0 else 0)
    assert scan.good == [u for u, _ in scan.rows if sum(u) % 2 == 0]


def test_recount_matches_scan():
    E = RandomSet(2, 0.4, 99)
    W = Window.centered(6, 2)
    scan = density_return_scan(E, [SQ_G], W, Window.centered(2, 2), 0.1)
    maps = decompose(SQ_G)
    for u, d in scan.rows:
        assert recount_density(E, [maps.evaluate(u)], W) == d
    for u in scan.good:
        assert recount_density(E, [maps.evaluate(u)], W) >= 0.1


def test_random_set_returns_are_plentiful():
    E = RandomSet(1, 0.3, 42)
    scan = density_return_scan(E, [parse_poly("x^2", QQ)], Window.box([0], [9999]),
                               Window.centered(100), 0.04)
    assert len(scan.good) / len(scan.rows) >= 0.9


def test_shift_of_window_moves_density_little():
    E = RandomSet(2, 0.5, 3)
    W = Window.centered(30, 2)
    shifts = [(1, 0), (3, -2), (7, 7)]
    u = Window.centered(2, 2)
    base = density_return_scan(E, [SQ_G], W, u, 0.2)
    for v in shifts:
        moved = density_return_scan(E, [SQ_G], W.shift(v), u, 0.2)
        lost = W.cardinality - len(set(map(tuple, W.points())) & set(map(tuple, W.shift(v).points())))
        for (_, a), (_, b) in zip(base.rows, moved.rows):
            assert abs(a - b) <= Fraction(lost, W.cardinality)
    assert base.boundary_error == W.perimeter_ratio()


def test_partition_mod_one_plus_i():
    res = partition_scan([ONE_PLUS_I, Complement(ONE_PLUS_I)], [SQ_G], Window.centered(20, 2),
                         Window.centered(3, 2))
    assert res.cell == 0
    assert res.cell_densities[0] + res.cell_densities[1] == 1
    assert abs(res.threshold - (float(res.cell_densities[0]) ** 2 - 0.05)) < 1e-15
    assert res.scan.good == [u for u, _ in res.scan.rows if sum(u) % 2 == 0]


def test_random_three_colouring_has_a_large_cell():
    A = RandomSet(2, 1 / 3, 1)
    B = Intersection((Complement(A), RandomSet(2, 0.5, 2)))
    C = Complement(Union((A, B)))
    W = Window.centered(25, 2)
    res = partition_scan([A, B, C], [SQ_G], W, Window.centered(2, 2))
    assert sum(res.cell_densities) == 1
    assert res.cell_densities[res.cell] == max(res.cell_densities) >= Fraction(1, 3)
    assert res.scan.good


def test_non_partitions_are_rejected():
    W = Window.centered(5, 2)
    with pytest.raises(PartitionError):
        partition_scan([ONE_PLUS_I, Everything(2)], [SQ_G], W, W)
    with pytest.raises(PartitionError):
        partition_scan([ONE_PLUS_I], [SQ_G], W, W)
    with pytest.raises(PartitionError):
        partition_scan([], [SQ_G], W, W)


def test_gaussian_demo_mapping_is_decomposition():
    assert gaussian_map() == decompose(parse_poly("x^2+1", GAUSS))
    assert gaussian_map().formatted() == ["a^2-b^2+1", "2*a*b"]


def test_gaussian_demo_checkerboard():
    # 2Z^2 is hit by (a^2-b^2+1, 2ab) exactly when a+b is odd
    E = Congruence(2, (2, 2))
    demo = gaussian_config_demo(E, Window.centered(30, 2))
    assert demo.scan.good == [u for u, _ in demo.scan.rows if (u[0] + u[1]) % 2 == 1]
    assert demo.scan.density_of((0, 1)) == demo.set_density
    assert demo.summary()["components"] == ["a^2-b^2+1", "2*a*b"]


def test_gaussian_demo_random_set():
    E = RandomSet(2, 0.4, 2024)
    demo = gaussian_config_demo(E, Window.centered(60, 2))
    assert abs(float(demo.set_density) - 0.4) < 0.02
    assert len(demo.scan.good) >= 0.9 * len(demo.scan.rows)


def test_scan_errors():
    with pytest.raises(ValueError):
        density_return_scan(Everything(1), [SQ_G], Window.centered(3), Window.centered(3, 2), 0.1)
    with pytest.raises(ValueError):
        density_return_scan(Everything(2), [SQ_G], Window.centered(3, 2), Window.centered(3), 0.1)
    with pytest.raises(BudgetError):
        density_return_scan(Everything(2), [SQ_G], Window.centered(100, 2),
                            Window.centered(50, 2), 0.1, budget=10**6)


def test_threads_do_not_change_rows():
    E = RandomSet(2, 0.5, 8)
    args = (E, [SQ_G], Window.centered(15, 2), Window.centered(4, 2), 0.2)
    assert density_return_scan(*args).jsonl() == density_return_scan(*args, threads=8).jsonl()
