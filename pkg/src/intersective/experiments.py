"""Return-time experiments on subsets of O_L ≅ Z^m, counted exactly on windows.

For a set ``E`` and polynomials ``p_i`` the quantity scanned is

    density(u) = |{x in W_set : x in E, x + p_i(u) in E for all i}| / |W_set|,

i.e. the window density of ``E ∩ (E - p_1(u)) ∩ ... ∩ (E - p_k(u))``.  Set
specs are global predicates, so shifted points are tested directly and no
clipping happens; ``boundary_error`` records the perimeter/area ratio that
bounds the effect of moving the window instead of the set.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .dynamics import lattice_maps
from .largeness import (BudgetError, Explicit, SetSpec, Window, count_in_window,
                        density_profile, syndeticity_gap)
from .number_field import FieldDesc
from .poly_ring import ZPolyVector, decompose, parse_poly

DEFAULT_EPSILON = 0.05
DEFAULT_BUDGET = 10**9


class PartitionError(ValueError):
    pass


@dataclass
class DensityScan:
    rows: list[tuple[tuple[int, ...], Fraction]]
    threshold: float
    window_set: Window
    window_u: Window
    good: list[tuple[int, ...]]
    good_density: Fraction
    gap: float | int
    boundary_error: float

    def density_of(self, u) -> Fraction:
        u = tuple(u)
        for v, d in self.rows:
            if v == u:
                return d
        raise KeyError(u)

    def summary(self) -> dict:
        return {
            "threshold": self.threshold,
            "good_count": len(self.good),
            "density_of_good": float(self.good_density),
            "syndeticity_gap": self.gap if math.isfinite(self.gap) else "INFINITE_ON_WINDOW",
            "boundary_error": self.boundary_error,
        }

    def jsonl(self) -> str:
        return "".join(
            json.dumps({"u": list(u), "density": float(d), "exact": f"{d.numerator}/{d.denominator}"})
            + "\n" for u, d in self.rows)


def _shift_counts(E: SetSpec, base: np.ndarray, pts: np.ndarray,
                  shifts: list[list[tuple[int, ...]]]) -> list[int]:
    out = []
    for sh in shifts:
        ok = base.copy()
        for s in sh:
            if not ok.any():
                break
            ok &= E.contains(pts + np.array(s, dtype=np.int64))
        out.append(int(ok.sum()))
    return out


def density_return_scan(E: SetSpec, polys: Sequence, W_set: Window, W_u: Window, c: float,
                        *, threads: int = 1, budget: int = DEFAULT_BUDGET) -> DensityScan:
    maps = lattice_maps(polys)
    if W_set.dim != maps[0].m or E.dim != W_set.dim:
        raise ValueError("set window must live in the coordinates of O_L")
    if W_u.dim != maps[0].nvars:
        raise ValueError("u window must match the polynomial variables")
    cost = W_set.cardinality * W_u.cardinality * (len(maps) + 1)
    if cost > budget:
        raise BudgetError(f"scan needs {cost} membership tests, budget {budget}")
    pts = W_set.points()
    base = E.contains(pts)
    us = [tuple(int(v) for v in p) for p in W_u.points()]
    shifts = [[m.evaluate(u) for m in maps] for u in us]
    threads = max(1, int(threads))
    step = max(1, -(-len(us) // (threads * 4)))
    blocks = [shifts[i:i + step] for i in range(0, len(shifts), step)]
    if threads == 1:
        counts = [n for b in blocks for n in _shift_counts(E, base, pts, b)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            counts = [n for part in pool.map(lambda b: _shift_counts(E, base, pts, b), blocks)
                      for n in part]
    card = W_set.cardinality
    rows = [(u, Fraction(n, card)) for u, n in zip(us, counts)]
    good = [u for u, d in rows if d >= c]
    S = Explicit.of(good, W_u.dim)
    return DensityScan(rows, c, W_set, W_u, good, density_profile(S, [W_u])[0],
                       syndeticity_gap(S, W_u), W_set.perimeter_ratio())


def recount_density(E: SetSpec, shifts: Sequence[Sequence[int]], W_set: Window) -> Fraction:
    """Point-by-point recount of one intersection density (no vectorisation)."""
    hits = 0
    ranges = [range(l, h + 1) for l, h in zip(W_set.lo, W_set.hi)]
    import itertools
    for x in itertools.product(*ranges):
        if x in E and all(tuple(a + b for a, b in zip(x, s)) in E for s in shifts):
            hits += 1
    return Fraction(hits, W_set.cardinality)


@dataclass
class PartitionResult:
    cell: int
    cell_densities: list[Fraction]
    scan: DensityScan
    threshold: float


def partition_scan(parts: Sequence[SetSpec], polys: Sequence, W_set: Window, W_u: Window,
                   c: float | None = None, *, epsilon: float = DEFAULT_EPSILON,
                   threads: int = 1) -> PartitionResult:
    """Pick the densest cell of a partition and scan its return densities.

    Without an explicit ``c`` the threshold is ``d^(k+1) - epsilon`` for the
    cell's window density ``d`` and ``k`` polynomials.
    """
    if not parts:
        raise PartitionError("empty partition")
    cover = np.zeros(W_set.cardinality, dtype=np.int64)
    for chunk_start, chunk in _indexed_chunks(W_set):
        for S in parts:
            cover[chunk_start:chunk_start + len(chunk)] += S.contains(chunk)
    if not np.all(cover == 1):
        bad = int(np.count_nonzero(cover != 1))
        raise PartitionError(f"cells overlap or miss {bad} points of the window")
    dens = density_profile_cells(parts, W_set)
    best = max(range(len(parts)), key=lambda i: (dens[i], -i))
    k = len(lattice_maps(polys))
    thr = float(dens[best]) ** (k + 1) - epsilon if c is None else c
    scan = density_return_scan(parts[best], polys, W_set, W_u, thr, threads=threads)
    return PartitionResult(best, dens, scan, thr)


def _indexed_chunks(W: Window):
    start = 0
    for chunk in W.chunks():
        yield start, chunk
        start += len(chunk)


def density_profile_cells(parts: Sequence[SetSpec], W: Window) -> list[Fraction]:
    return [Fraction(count_in_window(S, W), W.cardinality) for S in parts]


def gaussian_map() -> ZPolyVector:
    """Coordinates of ``x^2 + 1`` over Z[i], i.e. ``(a^2 - b^2 + 1, 2ab)``."""
    F = FieldDesc.gaussian()
    return decompose(parse_poly("x^2+1", F))


@dataclass
class GaussianDemo:
    set_density: Fraction
    epsilon: float
    scan: DensityScan

    def summary(self) -> dict:
        return {"set_density": float(self.set_density), "epsilon": self.epsilon,
                "components": gaussian_map().formatted(), **self.scan.summary()}


def gaussian_config_demo(E: SetSpec, W_set: Window, W_u: Window | None = None,
                         *, epsilon: float = DEFAULT_EPSILON, threads: int = 1) -> GaussianDemo:
    """Scan ``(a, b)`` for ``density(E ∩ (E - (a^2-b^2+1, 2ab))) >= d^2 - epsilon``."""
    if E.dim != 2:
        raise ValueError("the Gaussian demo needs a set in Z^2")
    W_u = W_u or Window.centered(5, 2)
    d = Fraction(count_in_window(E, W_set), W_set.cardinality)
    c = float(d) ** 2 - epsilon
    scan = density_return_scan(E, [gaussian_map()], W_set, W_u, c, threads=threads)
    return GaussianDemo(d, epsilon, scan)
