"""Nonzero ideals of O_L held as Hermite normal form lattices.

An ideal is the Z-span of ``a`` and ``b + c*w`` with ``a, c > 0`` and
``0 <= b < a``; this is stored as the matrix ``[[a, b], [0, c]]`` (columns
are coordinates).  Over Q only ``a`` is meaningful and ``b = 0, c = 1``.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass
from typing import Iterable, Iterator

from sympy import isprime
from sympy.ntheory import sqrt_mod

from .number_field import AlgInt, FieldDesc, FieldMismatchError, mul_coords

DEFAULT_RESIDUE_CAP = 10**7


class ZeroIdealError(ValueError):
    pass


class ResidueCapError(RuntimeError):
    pass


def residue_cap() -> int:
    """Residue-system cap; ``INTERSECTIVE_RESIDUE_CAP`` overrides the default."""
    env = os.environ.get("INTERSECTIVE_RESIDUE_CAP")
    return int(env) if env else DEFAULT_RESIDUE_CAP


def _hnf(vectors: Iterable[tuple[int, int]]) -> tuple[int, int, int]:
    """HNF ``(a, b, c)`` of the Z-lattice spanned by integer pairs ``(u, v)``."""
    vecs = [v for v in vectors if v != (0, 0)]
    # eliminate the w-coordinate down to a single vector by Euclid
    with_v = [v for v in vecs if v[1] != 0]
    ints = [v[0] for v in vecs if v[1] == 0]
    while len(with_v) > 1:
        with_v.sort(key=lambda v: abs(v[1]))
        piv = with_v[0]
        rest = []
        for u, v in with_v[1:]:
            q = v // piv[1]
            u2, v2 = u - q * piv[0], v - q * piv[1]
            if v2 == 0:
                ints.append(u2)
            else:
                rest.append((u2, v2))
        with_v = [piv] + rest
    if not with_v:
        raise ZeroIdealError("lattice has rank < 2")
    u0, c = with_v[0]
    if c < 0:
        u0, c = -u0, -c
    a = 0
    for u in ints:
        a = math.gcd(a, u)
    if a == 0:
        raise ZeroIdealError("lattice has rank < 2")
    return a, u0 % a, c


@dataclass(frozen=True, order=False)
class Ideal:
    a: int
    b: int
    c: int
    field: FieldDesc

    def __post_init__(self):
        if self.a <= 0 or self.c <= 0:
            raise ZeroIdealError("HNF diagonal must be positive")
        if not 0 <= self.b < self.a:
            raise ValueError("HNF requires 0 <= b < a")
        if self.field.is_rational and (self.b, self.c) != (0, 1):
            raise ValueError("ideals of Z are a*Z")

    @property
    def norm(self) -> int:
        return self.a * self.c

    @property
    def basis(self) -> list[list[int]]:
        if self.field.is_rational:
            return [[self.a, 0]]
        return [[self.a, self.b], [0, self.c]]

    def sort_key(self) -> tuple[int, int, int, int]:
        return (self.norm, self.a, self.b, self.c)

    def generators(self) -> tuple[AlgInt, ...]:
        """Z-basis elements ``a`` and ``b + c*w``."""
        F = self.field
        if F.is_rational:
            return (AlgInt(self.a, 0, F),)
        return (AlgInt(self.a, 0, F), AlgInt(self.b, self.c, F))

    def reduce_coords(self, x: int, y: int) -> tuple[int, int]:
        """Canonical coset representative of ``x + y*w`` with ``0<=x<a, 0<=y<c``."""
        q, y2 = divmod(y, self.c)
        return ((x - q * self.b) % self.a, y2)

    def reduce(self, x: AlgInt) -> AlgInt:
        if x.field != self.field:
            raise FieldMismatchError(f"{x.field} vs {self.field}")
        u, v = self.reduce_coords(x.a, x.b)
        return AlgInt(u, v, self.field)

    def contains_coords(self, x: int, y: int) -> bool:
        return _lattice_contains(self.a, self.b, self.c, x, y)

    def __contains__(self, x: AlgInt) -> bool:
        return ideal_contains(self, x)

    def __str__(self) -> str:
        return format_ideal(self)

    def __repr__(self) -> str:
        return f"Ideal({format_ideal(self)}, {self.field})"


def format_ideal(I: Ideal) -> str:
    rows = I.basis
    return "[" + ",".join("[" + ",".join(str(v) for v in r) + "]" for r in rows) + "]"


def parse_ideal(text: str, F: FieldDesc) -> Ideal:
    nums = [int(v) for v in re.findall(r"-?\d+", text)]
    if F.is_rational:
        if len(nums) not in (1, 2) or (len(nums) == 2 and nums[1] != 0):
            raise ValueError(f"bad ideal literal {text!r}")
        return Ideal(abs(nums[0]), 0, 1, F)
    if len(nums) != 4 or nums[2] != 0:
        raise ValueError(f"bad ideal literal {text!r}")
    I = Ideal(nums[0], nums[1], nums[3], F)
    if not is_ideal_lattice(nums[0], nums[1], nums[3], F):
        raise ValueError(f"{text} is not closed under multiplication by w")
    return I


def is_ideal_lattice(a: int, b: int, c: int, F: FieldDesc) -> bool:
    """Whether the Z-span of ``a`` and ``b + c*w`` is stable under ``*w``."""
    if F.is_rational:
        return True
    t, n = F.min_poly_of_omega
    return all(
        _lattice_contains(a, b, c, *mul_coords(g, (0, 1), t, n)) for g in ((a, 0), (b, c))
    )


def _lattice_contains(a: int, b: int, c: int, x: int, y: int) -> bool:
    if y % c:
        return False
    return (x - (y // c) * b) % a == 0


def ideal_from_generators(gens: Iterable[AlgInt], F: FieldDesc) -> Ideal:
    gens = list(gens)
    for g in gens:
        if g.field != F:
            raise FieldMismatchError(f"{g.field} vs {F}")
    if not any(gens):
        raise ZeroIdealError("zero ideal has infinite index")
    if F.is_rational:
        a = 0
        for g in gens:
            a = math.gcd(a, g.a)
        return Ideal(a, 0, 1, F)
    t, n = F.min_poly_of_omega
    vecs = []
    for g in gens:
        vecs.append((g.a, g.b))
        vecs.append(mul_coords((g.a, g.b), (0, 1), t, n))
    a, b, c = _hnf(vecs)
    return Ideal(a, b, c, F)


def principal(x: AlgInt) -> Ideal:
    return ideal_from_generators([x], x.field)


def unit_ideal(F: FieldDesc) -> Ideal:
    return Ideal(1, 0, 1, F)


def ideal_contains(I: Ideal, x: AlgInt) -> bool:
    if x.field != I.field:
        raise FieldMismatchError(f"{x.field} vs {I.field}")
    return I.contains_coords(x.a, x.b)


def ideal_mul(I: Ideal, J: Ideal) -> Ideal:
    if I.field != J.field:
        raise FieldMismatchError(f"{I.field} vs {J.field}")
    gens = [x * y for x in I.generators() for y in J.generators()]
    return ideal_from_generators(gens, I.field)


def ideal_pow(I: Ideal, k: int) -> Ideal:
    if k < 0:
        raise ValueError("negative ideal powers are fractional ideals")
    result, base = unit_ideal(I.field), I
    while k:
        if k & 1:
            result = ideal_mul(result, base)
        base = ideal_mul(base, base)
        k >>= 1
    return result


def ideal_add(I: Ideal, J: Ideal) -> Ideal:
    return ideal_from_generators(list(I.generators()) + list(J.generators()), I.field)


def residue_system(I: Ideal, cap: int | None = None) -> list[AlgInt]:
    """One representative ``x + y*w`` (``0<=x<a``, ``0<=y<c``) per coset."""
    cap = residue_cap() if cap is None else cap
    if I.norm > cap:
        raise ResidueCapError(f"residue system of size {I.norm} exceeds cap {cap}")
    F = I.field
    return [AlgInt(x, y, F) for x in range(I.a) for y in range(I.c)]


def valuation(x: AlgInt, P: Ideal) -> int:
    """Exponent of the prime ideal ``P`` in ``(x)``; ``x`` nonzero."""
    if not x:
        raise ZeroIdealError("valuation of zero is infinite")
    k, power = 0, P
    while ideal_contains(power, x):
        k += 1
        power = ideal_mul(power, P)
    return k


@dataclass(frozen=True)
class PrimeFactor:
    p: int
    prime_ideal: Ideal
    residue_degree: int
    ramification: int

    @property
    def norm(self) -> int:
        return self.prime_ideal.norm

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "ideal": format_ideal(self.prime_ideal),
            "degree": self.residue_degree,
            "ramification": self.ramification,
        }


def _roots_of_omega_poly(p: int, t: int, n: int) -> list[int]:
    """Roots of ``x^2 - t x - n`` modulo the prime ``p``."""
    if p == 2:
        return [r for r in range(2) if (r * r - t * r - n) % 2 == 0]
    # complete the square: (2x - t)^2 = t^2 + 4n
    D = (t * t + 4 * n) % p
    inv2 = pow(2, -1, p)
    return sorted({((s + t) * inv2) % p for s in sqrt_mod(D, p, all_roots=True)})


def factor_rational_prime(p: int, F: FieldDesc) -> list[PrimeFactor]:
    """Split ``(p)`` into prime ideals by factoring the minimal polynomial of w."""
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    if F.is_rational:
        return [PrimeFactor(p, Ideal(p, 0, 1, F), 1, 1)]
    t, n = F.min_poly_of_omega
    roots = _roots_of_omega_poly(p, t, n)
    w = F.omega()
    if not roots:
        return [PrimeFactor(p, Ideal(p, 0, p, F), 2, 1)]
    D = (t * t + 4 * n) % p
    if len(roots) == 1 and (D == 0 or p == 2):
        P = ideal_from_generators([F(p), w - roots[0]], F)
        return [PrimeFactor(p, P, 1, 2)]
    return [
        PrimeFactor(p, ideal_from_generators([F(p), w - r], F), 1, 1) for r in roots
    ]


def prime_ideals_up_to(bound: int, F: FieldDesc) -> Iterator[PrimeFactor]:
    """All prime ideals of norm ``<= bound``, ordered by (norm, HNF)."""
    from sympy import primerange

    found = []
    for q in primerange(2, bound + 1):
        for pf in factor_rational_prime(q, F):
            if pf.norm <= bound:
                found.append(pf)
    found.sort(key=lambda pf: pf.prime_ideal.sort_key())
    return iter(found)


def uniformizer(P: Ideal) -> AlgInt:
    """An element of ``P`` outside ``P^2``."""
    P2 = ideal_mul(P, P)
    gens = P.generators()
    for g in gens:
        if not ideal_contains(P2, g):
            return g
    g = gens[0] + gens[1]
    if ideal_contains(P2, g):
        raise ValueError(f"{P} does not look prime")
    return g
