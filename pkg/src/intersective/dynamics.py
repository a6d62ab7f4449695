"""Concrete measure-preserving actions: torus rotations and a Heisenberg nilrotation.

Rotation numbers are stored as fixed-point integers with ``FIX_BITS``
fractional bits, so ``n * alpha mod 1`` stays exact for the huge ``n`` that
polynomial times produce (``u^2`` with ``|u| = 10^4`` already eats eight
decimal digits of a float).  Only sample points are floats.

Conventions: ``T^n x = x + n*alpha`` on the torus, ``T^n x = a^n x`` on the
Heisenberg quotient, and ``T^n B`` means ``{x : T^n x in B}``.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernels
from .largeness import BudgetError, Explicit, Window, density_profile, syndeticity_gap
from .number_field import FieldDesc, parse_field
from .poly_ring import OPoly, ZPolyVector, decompose, parse_poly

FIX_BITS = 128
_SCALE = 1 << FIX_BITS
DEFAULT_SAMPLES = 10_000
DEFAULT_BUDGET = 2 * 10**9
GHK_BUDGET = 2 * 10**8
GHK_MAX_K = 3


def to_fixed(value) -> int:
    """``floor(value * 2^FIX_BITS)`` for a number, decimal string or named constant.

    Names: ``golden`` is (sqrt 5 - 1)/2, ``sqrt N`` / ``sqrtN`` is sqrt N.
    Floats are read through their shortest decimal repr.
    """
    if isinstance(value, str):
        name = value.strip().lower().replace(" ", "")
        if name in ("golden", "phi"):
            return (math.isqrt(5 * _SCALE * _SCALE) - _SCALE) // 2
        if name.startswith("sqrt"):
            return math.isqrt(int(name[4:]) * _SCALE * _SCALE)
        return math.floor(Fraction(value) * _SCALE)
    if isinstance(value, float):
        return math.floor(Fraction(repr(value)) * _SCALE)
    return math.floor(Fraction(value) * _SCALE)


def fixed_frac(x: int) -> float:
    """Fractional part of the fixed-point number ``x``, rounded down to 53 bits."""
    return math.ldexp((x % _SCALE) >> (FIX_BITS - 53), -53)


def _frac(y):
    r = y - np.floor(y)
    return np.where(r >= 1.0, 0.0, r)


def torus_overlap(sides: Sequence, t: Sequence):
    """Lebesgue measure of ``B ∩ (B - t)`` for a box ``B`` with the given sides."""
    total = 1
    for s, tj in zip(sides, t):
        r = tj - math.floor(tj)
        d = min(r, 1 - r)
        total *= max(0, s - d) + max(0, s - (1 - d))
    return total


def _torus_overlap_rows(sides: np.ndarray, shifts: np.ndarray) -> np.ndarray:
    r = shifts - np.floor(shifts)
    d = np.minimum(r, 1.0 - r)
    per = np.maximum(0.0, sides - d) + np.maximum(0.0, sides - (1.0 - d))
    return np.prod(per, axis=-1)


# ---------------------------------------------------------------------------
# systems


@dataclass(frozen=True)
class KroneckerSystem:
    """Rotation of ``[0,1)^D``; basis element ``e_j`` of O_L acts by ``alpha[j]``."""

    field: FieldDesc
    alpha: tuple[tuple[int, ...], ...]
    corner: tuple[float, ...]
    sides: tuple[float, ...]

    def __post_init__(self):
        if len(self.alpha) != self.field.degree:
            raise ValueError("need one rotation vector per basis element of O_L")
        if any(len(a) != self.dim for a in self.alpha) or len(self.corner) != self.dim:
            raise ValueError("rotation vectors and box must share the torus dimension")
        if any(not 0 < s <= 1 for s in self.sides):
            raise ValueError("box sides must lie in (0, 1]")

    @classmethod
    def make(cls, alpha, sides, corner=None, field: FieldDesc | None = None):
        rows = [alpha] if not isinstance(alpha[0], (list, tuple)) else alpha
        F = field or (FieldDesc.rational() if len(rows) == 1 else FieldDesc.gaussian())
        fixed = tuple(tuple(to_fixed(v) for v in row) for row in rows)
        sides = tuple(float(s) for s in sides)
        corner = tuple(float(c) for c in corner) if corner is not None else (0.0,) * len(sides)
        return cls(F, fixed, corner, sides)

    @property
    def dim(self) -> int:
        return len(self.sides)

    @property
    def measure(self) -> float:
        return math.prod(self.sides)

    def translation(self, coords: Sequence[int]) -> np.ndarray:
        """``sum_j coords_j * alpha_j mod 1``, computed in fixed point."""
        return np.array([
            fixed_frac(sum(int(c) * a[i] for c, a in zip(coords, self.alpha)))
            for i in range(self.dim)
        ])

    def act(self, coords: Sequence[int], x) -> np.ndarray:
        return _frac(np.asarray(x, dtype=np.float64) + self.translation(coords))

    def in_box(self, x) -> np.ndarray:
        r = _frac(np.asarray(x, dtype=np.float64) - np.array(self.corner))
        return np.all(r < np.array(self.sides), axis=-1)

    def to_json(self) -> dict:
        return {"kronecker": {
            "field": str(self.field), "dim": self.dim,
            "alpha": [[a / _SCALE for a in row] for row in self.alpha],
            "B": {"corner": list(self.corner), "sides": list(self.sides)}}}


@dataclass(frozen=True)
class HeisenbergSystem:
    """Left translation by ``a = (alpha, beta, gamma)`` on the Heisenberg
    nilmanifold, fundamental domain ``[0,1)^3``; a Z-action only."""

    a: tuple[int, int, int]
    corner: tuple[float, float, float] = (0.0, 0.0, 0.0)
    sides: tuple[float, float, float] = (1.0, 1.0, 1.0)
    field: FieldDesc = field(default_factory=FieldDesc.rational)

    def __post_init__(self):
        if not self.field.is_rational:
            raise ValueError("the Heisenberg system is a Z-action; field must be Q")

    @classmethod
    def make(cls, a, sides=(1.0, 1.0, 1.0), corner=(0.0, 0.0, 0.0)):
        return cls(tuple(to_fixed(v) for v in a), tuple(float(c) for c in corner),
                   tuple(float(s) for s in sides))

    @property
    def dim(self) -> int:
        return 3

    @property
    def measure(self) -> float:
        return math.prod(self.sides)

    @property
    def generator(self) -> tuple[float, float, float]:
        return tuple(v / _SCALE for v in self.a)

    def power_parts(self, n: int) -> tuple[int, float, int, float, float]:
        """``a^n = (g1, g2, g3)`` split as ``(G1, f1, G2, f2, K)`` with
        ``g_i = G_i + f_i`` and ``K = frac(g3 - f1*G2)``, all exact."""
        A, B, C = self.a
        g1, g2 = n * A, n * B
        g3 = n * C * _SCALE + (n * (n - 1) // 2) * A * B       # scale^2
        G1, r1 = divmod(g1, _SCALE)
        G2, r2 = divmod(g2, _SCALE)
        K = (g3 - r1 * G2 * _SCALE) % (_SCALE * _SCALE)
        return (G1, fixed_frac(r1), G2, fixed_frac(r2),
                math.ldexp(K >> (2 * FIX_BITS - 53), -53))

    def act(self, n: int, x) -> np.ndarray:
        """Reduced representative of ``a^n x``; ``x`` is ``(..., 3)`` in ``[0,1)^3``.

        Accuracy is about ``max(|n alpha|, |n beta|) * 2^-53`` in the last
        coordinate, from the two float products below.
        """
        x = np.asarray(x, dtype=np.float64)
        x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
        G1, f1, G2, f2, K = self.power_parts(int(n))
        e = np.floor(f2 + x2)
        y1 = _frac(f1 + x1)
        y2 = _frac(f2 + x2 - e)
        z = K + x3 + _frac(G1 * x2) + f1 * x2 - f1 * e - _frac(G2 * x1) - x1 * e
        return np.stack([y1, y2, _frac(z)], axis=-1)

    def in_box(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        lo = np.array(self.corner)
        return np.all((x >= lo) & (x < lo + np.array(self.sides)), axis=-1)

    def to_json(self) -> dict:
        return {"heisenberg": {"a": list(self.generator),
                               "B": {"corner": list(self.corner), "sides": list(self.sides)}}}


System = KroneckerSystem | HeisenbergSystem


def heisenberg_mul(g, h) -> tuple[float, float, float]:
    return (g[0] + h[0], g[1] + h[1], g[2] + h[2] + g[0] * h[1])


def heisenberg_power(a, n: int) -> tuple[float, float, float]:
    """Closed form of ``a^n``."""
    al, be, ga = a
    return (n * al, n * be, n * ga + n * (n - 1) / 2 * al * be)


def heisenberg_reduce(g) -> tuple[float, float, float]:
    """Representative in ``[0,1)^3`` of ``g * Gamma``."""
    x, y, z = (float(v) for v in g)
    b = -math.floor(y)
    a = -math.floor(x)
    x, y, z = x + a, y + b, z + (x * b)
    z = z - math.floor(z)
    return (x, y, 0.0 if z >= 1.0 else z)


def parse_system(data: dict) -> System:
    if "kronecker" in data:
        body = data["kronecker"]
        F = parse_field(body["field"]) if "field" in body else None
        B = body.get("B", {})
        alpha = body["alpha"]
        sides = B.get("sides", [1.0] * int(body.get("dim", 1)))
        sys = KroneckerSystem.make(alpha, sides, B.get("corner"), F)
        if "dim" in body and int(body["dim"]) != sys.dim:
            raise ValueError("dim disagrees with the box")
        return sys
    if "heisenberg" in data:
        body = data["heisenberg"]
        B = body.get("B", {})
        return HeisenbergSystem.make(body["a"], B.get("sides", (1.0, 1.0, 1.0)),
                                     B.get("corner", (0.0, 0.0, 0.0)))
    raise ValueError("system config needs a 'kronecker' or 'heisenberg' key")


# ---------------------------------------------------------------------------
# correlations


@dataclass(frozen=True)
class CorrelationReport:
    u: tuple[int, ...]
    value: float
    method: str                 # "EXACT" or "MONTE_CARLO"
    samples: int | None = None
    seed: int | None = None
    stderr: float | None = None

    def to_json(self) -> dict:
        out = {"u": list(self.u), "value": self.value, "method": self.method}
        if self.method == "MONTE_CARLO":
            out.update(stderr=self.stderr, samples=self.samples, seed=self.seed)
        return out


def lattice_maps(polys: Sequence[OPoly | ZPolyVector]) -> list[ZPolyVector]:
    maps = [p if isinstance(p, ZPolyVector) else decompose(p) for p in polys]
    if not maps:
        raise ValueError("need at least one polynomial")
    if len({(m.field, m.arity) for m in maps}) != 1:
        raise ValueError("polynomials must share field and arity")
    return maps


def _check_field(sys: System, maps: list[ZPolyVector]):
    if maps[0].field != sys.field:
        raise ValueError(f"polynomials over {maps[0].field}, system over {sys.field}")


def _stderr(p: float, S: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 1.0 / S) / S)


def _exact_values(sys: KroneckerSystem, maps, us) -> np.ndarray:
    shifts = np.array([sys.translation(maps[0].evaluate(u)) for u in us]).reshape(len(us), -1)
    return _torus_overlap_rows(np.array(sys.sides), shifts)


def _mc_hits(sys: System, maps, us, samples: int, seed: int) -> np.ndarray:
    useeds = _kernels.hash_rows(seed, np.array(us, dtype=np.int64).reshape(len(us), -1))
    if isinstance(sys, KroneckerSystem):
        shifts = np.array([[sys.translation(m.evaluate(u)) for m in maps] for u in us])
        shifts = shifts.reshape(len(us), len(maps), sys.dim)
        return _kernels.kronecker_hits(useeds, shifts, sys.corner, sys.sides, samples)
    hits = np.empty(len(us), dtype=np.int64)
    for i, u in enumerate(us):
        x = _kernels.uniform_block(useeds[i:i + 1], samples, 3)[0]
        ok = sys.in_box(x)
        for m in maps:
            ok &= sys.in_box(sys.act(m.evaluate(u)[0], x))
        hits[i] = int(ok.sum())
    return hits


def _method_for(sys: System, maps, method: str) -> str:
    if method == "auto":
        return "EXACT" if isinstance(sys, KroneckerSystem) and len(maps) == 1 else "MONTE_CARLO"
    method = method.upper().replace("-", "_")
    if method in ("MC", "MONTE_CARLO"):
        return "MONTE_CARLO"
    if method == "EXACT":
        if not (isinstance(sys, KroneckerSystem) and len(maps) == 1):
            raise ValueError("exact correlations need a Kronecker system and one polynomial")
        return "EXACT"
    raise ValueError(f"unknown method {method!r}")


def _correlations(sys: System, maps, us: list[tuple[int, ...]], method: str,
                  samples: int, seed: int | None) -> list[CorrelationReport]:
    if method == "EXACT":
        vals = _exact_values(sys, maps, us)
        return [CorrelationReport(u, float(v), "EXACT") for u, v in zip(us, vals)]
    hits = _mc_hits(sys, maps, us, samples, seed)
    out = []
    for u, h in zip(us, hits):
        p = int(h) / samples
        out.append(CorrelationReport(u, p, "MONTE_CARLO", samples, seed, _stderr(p, samples)))
    return out


def _as_point(u, nvars: int) -> tuple[int, ...]:
    if isinstance(u, (int, np.integer)):
        u = (int(u),)
    u = tuple(int(v) for v in u)
    if len(u) != nvars:
        raise ValueError(f"u needs {nvars} integer coordinates")
    return u


def correlation(sys: System, polys: Sequence, u, *, method: str = "auto",
                samples: int = DEFAULT_SAMPLES, seed: int | None = None) -> CorrelationReport:
    """``mu(B ∩ T^{p_1(u)} B ∩ ... ∩ T^{p_k(u)} B)``.

    One polynomial on a torus is exact; everything else is Monte-Carlo with
    a stream keyed by ``(seed, u)``.
    """
    maps = lattice_maps(polys)
    _check_field(sys, maps)
    m = _method_for(sys, maps, method)
    if m == "MONTE_CARLO":
        if samples <= 0:
            raise ValueError("sample count must be positive")
        if seed is None:
            raise ValueError("Monte-Carlo correlations need an explicit seed")
    return _correlations(sys, maps, [_as_point(u, maps[0].nvars)], m, samples, seed)[0]


@dataclass
class ReturnScan:
    reports: list[CorrelationReport]
    threshold: float
    window: Window
    good: list[tuple[int, ...]]
    density: list[Fraction]
    gap: float | int

    def summary(self) -> dict:
        return {
            "threshold": self.threshold,
            "window": self.window.to_json(),
            "good_count": len(self.good),
            "density_of_good": float(self.density[0]),
            "syndeticity_gap": self.gap if math.isfinite(self.gap) else "INFINITE_ON_WINDOW",
        }

    def jsonl(self) -> str:
        return "".join(json.dumps(r.to_json()) + "\n" for r in self.reports)


def return_set_scan(sys: System, polys: Sequence, c: float, W: Window, *,
                    method: str = "auto", samples: int = DEFAULT_SAMPLES,
                    seed: int | None = None, threads: int = 1,
                    budget: int = DEFAULT_BUDGET) -> ReturnScan:
    """All ``u`` in ``W`` with correlation ``>= c``, with density and gap of that set."""
    maps = lattice_maps(polys)
    _check_field(sys, maps)
    if W.dim != maps[0].nvars:
        raise ValueError("window dimension must match the polynomial variables")
    m = _method_for(sys, maps, method)
    if m == "MONTE_CARLO":
        if seed is None:
            raise ValueError("Monte-Carlo scans need an explicit seed")
        if samples <= 0:
            raise ValueError("sample count must be positive")
        cost = W.cardinality * samples * (len(maps) + 1)
    else:
        cost = W.cardinality
    if cost > budget:
        raise BudgetError(f"scan needs {cost} evaluations, budget {budget}")
    us = [tuple(int(v) for v in p) for p in W.points()]
    threads = max(1, int(threads))
    step = max(1, -(-len(us) // (threads * 4)))
    chunks = [us[i:i + step] for i in range(0, len(us), step)]
    if threads == 1:
        parts = [_correlations(sys, maps, ch, m, samples, seed) for ch in chunks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda ch: _correlations(sys, maps, ch, m, samples, seed),
                                  chunks))
    reports = sorted((r for part in parts for r in part), key=lambda r: r.u)
    good = [r.u for r in reports if r.value >= c]
    S = Explicit.of(good, W.dim)
    return ReturnScan(reports, c, W, good, density_profile(S, [W]), syndeticity_gap(S, W))


# ---------------------------------------------------------------------------
# Gowers-Host-Kra seminorms on a torus


@dataclass(frozen=True)
class Observable:
    """``const + sum_m coefs[m] cos(2 pi <freqs[m], x> + phases[m])`` or a box indicator."""

    kind: int
    dim: int
    const: float = 0.0
    freqs: tuple[tuple[float, ...], ...] = ()
    coefs: tuple[float, ...] = ()
    phases: tuple[float, ...] = ()
    corner: tuple[float, ...] = ()
    sides: tuple[float, ...] = ()

    @classmethod
    def constant(cls, c: float, dim: int = 1) -> "Observable":
        return cls(_kernels.KIND_TRIG, dim, float(c))

    @classmethod
    def cosine(cls, freq: Sequence[float], coef: float = 1.0, phase: float = 0.0,
               const: float = 0.0) -> "Observable":
        freq = tuple(float(v) for v in freq)
        return cls(_kernels.KIND_TRIG, len(freq), const, (freq,), (coef,), (phase,))

    @classmethod
    def box(cls, corner: Sequence[float], sides: Sequence[float]) -> "Observable":
        return cls(_kernels.KIND_BOX, len(sides), corner=tuple(map(float, corner)),
                   sides=tuple(map(float, sides)))

    @classmethod
    def from_json(cls, data, dim: int) -> "Observable":
        if isinstance(data, (int, float)):
            return cls.constant(data, dim)
        if "box" in data:
            return cls.box(data["box"]["corner"], data["box"]["sides"])
        body = data["trig"]
        terms = body.get("terms", [])
        return cls(_kernels.KIND_TRIG, dim, float(body.get("const", 0.0)),
                   tuple(tuple(float(v) for v in t["freq"]) for t in terms),
                   tuple(float(t.get("coef", 1.0)) for t in terms),
                   tuple(float(t.get("phase", 0.0)) for t in terms))

    @property
    def sup_bound(self) -> float:
        if self.kind == _kernels.KIND_BOX:
            return 1.0
        return abs(self.const) + sum(abs(c) for c in self.coefs)

    @property
    def packed(self) -> tuple:
        D = self.dim
        return (
            np.int64(self.kind),
            np.float64(self.const),
            np.array(self.freqs, dtype=np.float64).reshape(len(self.freqs), D),
            np.array(self.coefs, dtype=np.float64),
            np.array(self.phases, dtype=np.float64),
            np.array(self.corner or (0.0,) * D, dtype=np.float64),
            np.array(self.sides or (1.0,) * D, dtype=np.float64),
        )

    def __call__(self, y) -> np.ndarray:
        return _kernels.observable_values(y, self.packed)


def ghk_draws(k: int, window_size: int, samples: int, budget: int = GHK_BUDGET) -> int:
    """Window draws per level so that ``samples * 2^k * draws^k`` fits the budget."""
    per = budget / (samples * 2**k)
    return max(1, min(window_size, int(math.floor(per ** (1.0 / k) + 1e-9))))


def ghk_estimate(sys: KroneckerSystem, f: Observable, k: int, W: Window, samples: int,
                 seed: int, *, budget: int = GHK_BUDGET) -> float:
    """Finite-window estimate of the order-``k`` seminorm of ``f``.

    ``P(g, 0)`` is the sample mean of ``g``; ``P(g, j)`` is the average over
    ``u`` of ``P(g * g∘T^u, j-1)``, clamped at 0; the estimate is
    ``P(f, k)^(1/2^k)``.  When the window is too large for the budget each
    level averages over ``ghk_draws`` random elements of ``W`` instead.
    """
    if not isinstance(sys, KroneckerSystem):
        raise TypeError("seminorm estimates are implemented for torus rotations")
    if not 0 <= k <= GHK_MAX_K:
        raise ValueError(f"k must lie in 0..{GHK_MAX_K}")
    if samples <= 0:
        raise ValueError("sample count must be positive")
    if f.dim != sys.dim:
        raise ValueError("observable and torus dimensions differ")
    if W.dim != sys.field.degree:
        raise ValueError("window dimension must equal the rank of O_L")
    x = _kernels.uniform_block(_kernels.hash_rows(seed, [[0]]), samples, sys.dim)[0]
    packed = f.packed
    if k == 0:
        return float(np.mean(f(x)))
    draws = ghk_draws(k, W.cardinality, samples, budget)
    full = draws >= W.cardinality
    if samples * 2**k * draws**k > budget:
        raise BudgetError("sample count alone exceeds the budget")
    pts = W.points()
    counter = [0]

    def shifts_for(level: int) -> np.ndarray:
        if full:
            chosen = pts
        else:
            counter[0] += 1
            keys = np.array([[level, counter[0], r] for r in range(draws)], dtype=np.int64)
            idx = _kernels.hash_rows(seed, keys) % np.uint64(len(pts))
            chosen = pts[idx.astype(np.int64)]
        return np.array([sys.translation(u) for u in chosen]).reshape(len(chosen), sys.dim)

    def level(j: int, offsets: np.ndarray) -> float:
        shifts = shifts_for(j)
        if j == k:
            vals = _kernels.cube_last_level(x, offsets, shifts, packed)
            return max(0.0, float(np.mean(vals)))
        acc = 0.0
        for t in shifts:
            acc += level(j + 1, np.concatenate([offsets, _frac(offsets + t)]))
        return max(0.0, acc / len(shifts))

    P = level(1, np.zeros((1, sys.dim)))
    return P ** (1.0 / 2**k)


def ghk_spread(sys: KroneckerSystem, f: Observable, k: int, W: Window, samples: int,
               seed: int, replicates: int = 4, *, budget: int = GHK_BUDGET) -> float | None:
    """Standard error of ``ghk_estimate`` from independent replicate seeds.

    Seeds ``seed, seed+1, ..., seed+replicates-1`` are run and the sample
    standard deviation of the estimates is divided by ``sqrt(replicates)``.
    No convergence rate is known for the estimator, so this empirical spread
    is the only error bar on offer.  Returns None for fewer than two replicates.
    """
    if replicates < 2:
        return None
    vals = [ghk_estimate(sys, f, k, W, samples, seed + r, budget=budget)
            for r in range(replicates)]
    return float(np.std(vals, ddof=1) / math.sqrt(replicates))
