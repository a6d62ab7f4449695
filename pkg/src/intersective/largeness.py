"""Finite-window notions of size on Z^m: box densities, syndeticity gaps, IP sets.

Sets are membership predicates on integer lattice points (``SetSpec``) so
that they can be queried anywhere, not just inside one window.  Windows are
boxes ``[lo_j, hi_j]``; centred nested boxes stand in for Følner sequences.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy import ndimage

from . import _kernels
from .ideal_arith import Ideal, parse_ideal
from .number_field import parse_field

INFINITE_ON_WINDOW = math.inf
FINITE_SUMS_CAP = 24
DEFAULT_BUDGET = 10**8


class BudgetError(RuntimeError):
    pass


@dataclass(frozen=True)
class Window:
    lo: tuple[int, ...]
    hi: tuple[int, ...]

    def __post_init__(self):
        if len(self.lo) != len(self.hi) or not self.lo:
            raise ValueError("window bounds must have equal positive length")
        if any(h < l for l, h in zip(self.lo, self.hi)):
            raise ValueError("empty window")

    @classmethod
    def centered(cls, radius: int, dim: int = 1) -> "Window":
        return cls((-radius,) * dim, (radius,) * dim)

    @classmethod
    def box(cls, lo: Sequence[int], hi: Sequence[int]) -> "Window":
        return cls(tuple(int(v) for v in lo), tuple(int(v) for v in hi))

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(h - l + 1 for l, h in zip(self.lo, self.hi))

    @property
    def cardinality(self) -> int:
        return math.prod(self.shape)

    def inflate(self, r: int) -> "Window":
        return Window(tuple(v - r for v in self.lo), tuple(v + r for v in self.hi))

    def shift(self, v: Sequence[int]) -> "Window":
        return Window(tuple(a + b for a, b in zip(self.lo, v)),
                      tuple(a + b for a, b in zip(self.hi, v)))

    def points(self) -> np.ndarray:
        """All lattice points, row-major (last coordinate fastest)."""
        axes = [np.arange(l, h + 1, dtype=np.int64) for l, h in zip(self.lo, self.hi)]
        grids = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)

    def chunks(self, max_points: int = 2_000_000) -> Iterable[np.ndarray]:
        """Points in row-major order, split along the first axis."""
        inner = math.prod(self.shape[1:]) if self.dim > 1 else 1
        rows = max(1, max_points // inner)
        for start in range(self.lo[0], self.hi[0] + 1, rows):
            stop = min(start + rows - 1, self.hi[0])
            yield Window((start,) + self.lo[1:], (stop,) + self.hi[1:]).points()

    def contains(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts)
        return np.all((pts >= np.array(self.lo)) & (pts <= np.array(self.hi)), axis=1)

    def perimeter_ratio(self) -> float:
        """Boundary-to-volume ratio, the error scale of box densities."""
        card = self.cardinality
        return sum(2 * card / s for s in self.shape) / card

    def to_json(self) -> dict:
        return {"lo": list(self.lo), "hi": list(self.hi)}

    @classmethod
    def from_json(cls, data) -> "Window":
        if "radius" in data:
            return cls.centered(int(data["radius"]), int(data.get("dim", 1)))
        return cls.box(data["lo"], data["hi"])


def folner_boxes(radii: Iterable[int], dim: int = 1) -> list[Window]:
    return [Window.centered(r, dim) for r in radii]


# ---------------------------------------------------------------------------
# set specifications


class SetSpec:
    dim: int

    def contains(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __contains__(self, point) -> bool:
        return bool(self.contains(np.asarray([point], dtype=np.int64).reshape(1, -1))[0])

    def to_json(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Everything(SetSpec):
    dim: int

    def contains(self, pts):
        return np.ones(len(pts), dtype=bool)

    def to_json(self):
        return "all"


@dataclass(frozen=True)
class Congruence(SetSpec):
    """Coordinatewise congruences ``x_j = r_j (mod m_j)``, or membership in an
    ideal of O_L viewed as a sublattice of Z^2."""

    dim: int
    modulus: tuple[int, ...] | None = None
    residue: tuple[int, ...] | None = None
    ideal: Ideal | None = None

    def contains(self, pts):
        pts = np.asarray(pts, dtype=np.int64)
        if self.ideal is not None:
            I = self.ideal
            if I.field.is_rational:
                return np.mod(pts[:, 0], I.a) == 0
            y = pts[:, 1]
            q = np.floor_divide(y, I.c)
            return (np.mod(y, I.c) == 0) & (np.mod(pts[:, 0] - q * I.b, I.a) == 0)
        res = self.residue or (0,) * self.dim
        m = np.array(self.modulus, dtype=np.int64)
        return np.all(np.mod(pts - np.array(res), m) == 0, axis=1)

    @property
    def index(self) -> int:
        if self.ideal is not None:
            return self.ideal.norm
        return math.prod(self.modulus)

    def to_json(self):
        if self.ideal is not None:
            return {"congruence": {"ideal": str(self.ideal), "field": str(self.ideal.field)}}
        body = {"modulus": list(self.modulus)}
        if self.residue is not None:
            body["residue"] = list(self.residue)
        return {"congruence": body}


@dataclass(frozen=True)
class RandomSet(SetSpec):
    """Each point is a member with probability ``density``, decided by a
    counter-based hash of ``(seed, point)``."""

    dim: int
    density: float
    seed: int

    def contains(self, pts):
        return _kernels.uniform_rows(self.seed, pts) < self.density

    def to_json(self):
        return {"random": {"density": self.density, "seed": self.seed}}


@dataclass(frozen=True)
class Bohr(SetSpec):
    """``{x : ||sum_j x_j alpha_j|| < radius}`` with ``||.||`` the distance to Z."""

    dim: int
    alpha: tuple[float, ...]
    radius: float

    def contains(self, pts):
        s = np.asarray(pts, dtype=np.float64) @ np.array(self.alpha)
        frac = s - np.floor(s)
        return np.minimum(frac, 1.0 - frac) < self.radius

    def to_json(self):
        return {"bohr": {"alpha": list(self.alpha), "radius": self.radius}}


@dataclass(frozen=True)
class Explicit(SetSpec):
    dim: int
    members: frozenset

    @classmethod
    def of(cls, points: Iterable, dim: int | None = None) -> "Explicit":
        pts = [tuple(p) if isinstance(p, (tuple, list)) else (int(p),) for p in points]
        if dim is None:
            dim = len(pts[0]) if pts else 1
        return cls(dim, frozenset(tuple(int(v) for v in p) for p in pts))

    def contains(self, pts):
        pts = np.asarray(pts, dtype=np.int64)
        if not self.members:
            return np.zeros(len(pts), dtype=bool)
        ref = np.array(sorted(self.members), dtype=np.int64).reshape(-1, self.dim)
        if self.dim == 1:
            return np.isin(pts[:, 0], ref[:, 0])
        view = np.dtype((np.void, pts.dtype.itemsize * self.dim))
        a = np.ascontiguousarray(pts).view(view).ravel()
        b = np.ascontiguousarray(ref).view(view).ravel()
        return np.isin(a, b)

    def to_json(self):
        return {"explicit": [list(p) for p in sorted(self.members)]}


@dataclass(frozen=True)
class Union(SetSpec):
    parts: tuple[SetSpec, ...]

    @property
    def dim(self):
        return self.parts[0].dim

    def contains(self, pts):
        out = np.zeros(len(pts), dtype=bool)
        for s in self.parts:
            out |= s.contains(pts)
        return out

    def to_json(self):
        return {"union": [s.to_json() for s in self.parts]}


@dataclass(frozen=True)
class Intersection(SetSpec):
    parts: tuple[SetSpec, ...]

    @property
    def dim(self):
        return self.parts[0].dim

    def contains(self, pts):
        out = np.ones(len(pts), dtype=bool)
        for s in self.parts:
            out &= s.contains(pts)
        return out

    def to_json(self):
        return {"intersect": [s.to_json() for s in self.parts]}


@dataclass(frozen=True)
class Complement(SetSpec):
    base: SetSpec

    @property
    def dim(self):
        return self.base.dim

    def contains(self, pts):
        return ~self.base.contains(pts)

    def to_json(self):
        return {"complement": self.base.to_json()}


@dataclass(frozen=True)
class Shift(SetSpec):
    """``base + by``."""

    base: SetSpec
    by: tuple[int, ...]

    @property
    def dim(self):
        return self.base.dim

    def contains(self, pts):
        return self.base.contains(np.asarray(pts, dtype=np.int64) - np.array(self.by))

    def to_json(self):
        return {"shift": {"set": self.base.to_json(), "by": list(self.by)}}


def parse_setspec(data, dim: int) -> SetSpec:
    """Build a ``SetSpec`` from the JSON mini-language."""
    if data == "all":
        return Everything(dim)
    if not isinstance(data, dict) or len(data) != 1:
        raise ValueError(f"set spec must be a single-key object, got {data!r}")
    (kind, body), = data.items()
    if kind == "congruence":
        if "ideal" in body:
            F = parse_field(body.get("field", "Q(sqrt -1)"))
            I = parse_ideal(body["ideal"], F)
            if F.degree != dim:
                raise ValueError("ideal congruence needs dim equal to the field degree")
            return Congruence(dim, ideal=I)
        mod = tuple(int(v) for v in body["modulus"])
        if len(mod) != dim:
            raise ValueError("modulus length must equal the dimension")
        res = tuple(int(v) for v in body["residue"]) if "residue" in body else None
        return Congruence(dim, mod, res)
    if kind == "random":
        if "seed" not in body:
            raise ValueError("random sets need an explicit seed")
        return RandomSet(dim, float(body["density"]), int(body["seed"]))
    if kind == "bohr":
        alpha = tuple(float(v) for v in body["alpha"])
        if len(alpha) != dim:
            raise ValueError("alpha length must equal the dimension")
        return Bohr(dim, alpha, float(body["radius"]))
    if kind == "explicit":
        return Explicit.of(body, dim)
    if kind == "union":
        return Union(tuple(parse_setspec(b, dim) for b in body))
    if kind == "intersect":
        return Intersection(tuple(parse_setspec(b, dim) for b in body))
    if kind == "complement":
        return Complement(parse_setspec(body, dim))
    if kind == "shift":
        return Shift(parse_setspec(body["set"], dim), tuple(int(v) for v in body["by"]))
    raise ValueError(f"unknown set kind {kind!r}")


# ---------------------------------------------------------------------------
# operations


def finite_sums(xs: Sequence) -> set:
    """``{sum of x_i over i in alpha : alpha nonempty}``."""
    if len(xs) > FINITE_SUMS_CAP:
        raise ValueError(f"at most {FINITE_SUMS_CAP} generators")
    scalar = all(isinstance(x, (int, np.integer)) for x in xs)
    vecs = [np.array([x] if scalar else x, dtype=object) for x in xs]
    sums: set = set()
    partial = [None]
    for v in vecs:
        partial = partial + [v if p is None else p + v for p in partial]
    for s in partial[1:]:
        sums.add(int(s[0]) if scalar else tuple(int(c) for c in s))
    return sums


def count_in_window(S: SetSpec, W: Window, budget: int = DEFAULT_BUDGET) -> int:
    if W.cardinality > budget:
        raise BudgetError(f"window of {W.cardinality} points exceeds budget {budget}")
    return int(sum(int(S.contains(chunk).sum()) for chunk in W.chunks()))


def density_profile(S: SetSpec, windows: Iterable[Window],
                    budget: int = DEFAULT_BUDGET) -> list[Fraction]:
    """Exact ``|S ∩ W| / |W|`` for each window."""
    return [Fraction(count_in_window(S, W, budget), W.cardinality) for W in windows]


def _mask(S: SetSpec, W: Window) -> np.ndarray:
    return np.concatenate([S.contains(c) for c in W.chunks()]).reshape(W.shape)


def syndeticity_gap(S: SetSpec, W: Window, max_doublings: int = 3) -> float | int:
    """Largest l-infinity distance from a point of ``W`` to the nearest point of ``S``.

    ``S`` is searched inside ``W`` inflated by the window diameter (doubled a
    few times if needed); ``INFINITE_ON_WINDOW`` when it is never met.
    """
    R = max(W.shape)
    inner = tuple(slice(None) for _ in range(W.dim))
    for _ in range(max_doublings + 1):
        big = W.inflate(R)
        mask = _mask(S, big)
        if mask.any():
            dist = ndimage.distance_transform_cdt(~mask, metric="chessboard")
            inner = tuple(slice(R, R + s) for s in W.shape)
            gap = int(dist[inner].max())
            if gap <= R:
                return gap
        R *= 2
    return INFINITE_ON_WINDOW


def ip_falsify(S: SetSpec, W: Window, n: int, node_budget: int = 10**6) -> list | None:
    """Search generators whose finite sums all lie in ``W`` but avoid ``S``.

    Depth-first over candidates ordered by size, so exhaustive on small
    windows.  A result shows ``S`` is not IP* at this scale; ``None`` proves
    nothing beyond the window (or the node budget) searched.
    """
    if n > 10:
        raise ValueError("n <= 10")
    pts = W.points()
    pts = pts[np.any(pts != 0, axis=1)]
    order = np.lexsort(tuple(pts[:, j] for j in reversed(range(W.dim))) + (np.abs(pts).sum(axis=1),))
    cands = [tuple(int(v) for v in p) for p in pts[order]]
    good = {c for c, inside in zip(cands, S.contains(np.array(cands, dtype=np.int64)))
            if not inside} if cands else set()
    lo, hi = np.array(W.lo), np.array(W.hi)

    def ok(p: tuple[int, ...]) -> bool:
        return p in good

    nodes = 0

    def extend(gens: list, sums: list) -> list | None:
        nonlocal nodes
        if len(gens) == n:
            return gens
        for c in cands:
            nodes += 1
            if nodes > node_budget:
                return None
            if not ok(c):
                continue
            new = [tuple(a + b for a, b in zip(s, c)) for s in sums]
            if all(ok(q) for q in new):
                found = extend(gens + [c], sums + [c] + new)
                if found is not None:
                    return found
        return None

    found = extend([], [])
    if found is None:
        return None
    return [g[0] for g in found] if W.dim == 1 else found


def aip_shift_diagnostic(S: SetSpec, W: Window, n: int, shifts: Iterable[Sequence[int]],
                         node_budget: int = 10**5) -> dict:
    """For each shift ``v``, whether ``S - v`` admits an avoiding FS-set of size ``n``.

    Shifts with no avoiding set found are the candidates for the ``+`` in
    AIP*+; completeness is not claimed.
    """
    report = {}
    for v in shifts:
        v = tuple(int(c) for c in v)
        gens = ip_falsify(Shift(S, tuple(-c for c in v)), W, n, node_budget)
        report[v] = gens
    return report
