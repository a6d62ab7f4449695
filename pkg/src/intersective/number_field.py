"""Exact arithmetic in the ring of integers of Q or a quadratic field Q(sqrt d).

Elements are stored as coordinates ``a + b*w`` against the integral basis
``{1, w}`` with ``w = sqrt(d)`` when ``d % 4 != 1`` and ``w = (1 + sqrt(d))/2``
otherwise.  In both cases ``w**2 = t*w + n``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from functools import total_ordering

from sympy import factorint


class FieldMismatchError(ValueError):
    pass


class OmegaKind(Enum):
    ONE = "one"              # the rational field, basis {1}
    SQRT_D = "sqrt_d"        # w = sqrt(d)
    HALF_TRACE = "half"      # w = (1 + sqrt(d)) / 2


def _is_squarefree(d: int) -> bool:
    return all(e == 1 for e in factorint(abs(d)).values())


@dataclass(frozen=True)
class FieldDesc:
    """Descriptor for Q (``d is None``) or Q(sqrt d) with d squarefree."""

    d: int | None = None

    def __post_init__(self):
        if self.d is None:
            return
        if not isinstance(self.d, int) or self.d in (0, 1):
            raise ValueError(f"invalid discriminant parameter d={self.d!r}")
        if not _is_squarefree(self.d):
            raise ValueError(f"d={self.d} is not squarefree")

    @classmethod
    def rational(cls) -> "FieldDesc":
        return cls(None)

    @classmethod
    def quadratic(cls, d: int) -> "FieldDesc":
        return cls(int(d))

    @classmethod
    def gaussian(cls) -> "FieldDesc":
        return cls(-1)

    @property
    def is_rational(self) -> bool:
        return self.d is None

    @property
    def degree(self) -> int:
        return 1 if self.d is None else 2

    @property
    def omega_kind(self) -> OmegaKind:
        if self.d is None:
            return OmegaKind.ONE
        return OmegaKind.HALF_TRACE if self.d % 4 == 1 else OmegaKind.SQRT_D

    @property
    def min_poly_of_omega(self) -> tuple[int, int]:
        """``(t, n)`` with ``w**2 = t*w + n``; ``(0, 0)`` for Q."""
        if self.d is None:
            return (0, 0)
        if self.d % 4 == 1:
            return (1, (self.d - 1) // 4)
        return (0, self.d)

    @property
    def disc(self) -> int:
        if self.d is None:
            return 1
        return self.d if self.d % 4 == 1 else 4 * self.d

    @property
    def is_imaginary(self) -> bool:
        return self.d is not None and self.d < 0

    def omega_embeddings(self) -> tuple[float, ...]:
        """Real embeddings of w (two for real fields, none for imaginary)."""
        import math
        if self.d is None or self.d < 0:
            return ()
        r = math.sqrt(self.d)
        if self.d % 4 == 1:
            return ((1 + r) / 2, (1 - r) / 2)
        return (r, -r)

    def omega_complex(self) -> complex:
        """The embedding of w with positive imaginary part (imaginary fields)."""
        import cmath
        r = cmath.sqrt(self.d)
        return (1 + r) / 2 if self.d % 4 == 1 else r

    def __call__(self, a: int = 0, b: int = 0) -> "AlgInt":
        return AlgInt(int(a), int(b), self)

    def one(self) -> "AlgInt":
        return AlgInt(1, 0, self)

    def zero(self) -> "AlgInt":
        return AlgInt(0, 0, self)

    def omega(self) -> "AlgInt":
        if self.d is None:
            raise ValueError("Q has no second basis element")
        return AlgInt(0, 1, self)

    def __str__(self) -> str:
        return "Q" if self.d is None else f"Q(sqrt {self.d})"

    def __repr__(self) -> str:
        return f"FieldDesc({self})"


_FIELD_RE = re.compile(r"^\s*Q\s*(?:\(\s*sqrt\s*\(?\s*([+-]?\d+)\s*\)?\s*\))?\s*$")


def parse_field(text: str) -> FieldDesc:
    """Parse ``"Q"`` or ``"Q(sqrt DD)"``."""
    m = _FIELD_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse field descriptor {text!r}")
    if m.group(1) is None:
        return FieldDesc.rational()
    return FieldDesc.quadratic(int(m.group(1)))


@total_ordering
@dataclass(frozen=True)
class AlgInt:
    """The element ``a + b*w`` of O_L."""

    a: int
    b: int
    field: FieldDesc

    def __post_init__(self):
        if self.field.d is None and self.b != 0:
            raise ValueError("elements of Z have no w-coordinate")

    def _coerce(self, other) -> "AlgInt":
        if isinstance(other, AlgInt):
            if other.field != self.field:
                raise FieldMismatchError(f"{self.field} vs {other.field}")
            return other
        if isinstance(other, int):
            return AlgInt(other, 0, self.field)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return AlgInt(self.a + other.a, self.b + other.b, self.field)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return AlgInt(self.a - other.a, self.b - other.b, self.field)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __neg__(self):
        return AlgInt(-self.a, -self.b, self.field)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return nf_mul(self, other, self.field)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers leave O_L")
        result, base = self.field.one(), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __lt__(self, other: "AlgInt"):
        return (self.a, self.b) < (other.a, other.b)

    def __bool__(self):
        return bool(self.a or self.b)

    def coords(self) -> tuple[int, int]:
        return (self.a, self.b)

    def conjugate(self) -> "AlgInt":
        t, _ = self.field.min_poly_of_omega
        return AlgInt(self.a + self.b * t, -self.b, self.field)

    def norm(self) -> int:
        return nf_norm(self, self.field)

    def trace(self) -> int:
        t, _ = self.field.min_poly_of_omega
        return 2 * self.a + self.b * t

    def __str__(self) -> str:
        return format_element(self)

    def __repr__(self) -> str:
        return f"AlgInt({self.a}, {self.b}, {self.field})"


def mul_coords(x: tuple[int, int], y: tuple[int, int], t: int, n: int) -> tuple[int, int]:
    """Multiply raw coordinate pairs using ``w**2 = t*w + n``."""
    bb = x[1] * y[1]
    return (x[0] * y[0] + n * bb, x[0] * y[1] + x[1] * y[0] + t * bb)


def nf_mul(x: AlgInt, y: AlgInt, F: FieldDesc) -> AlgInt:
    if x.field != F or y.field != F:
        raise FieldMismatchError(f"operands live in {x.field} and {y.field}, expected {F}")
    t, n = F.min_poly_of_omega
    a, b = mul_coords((x.a, x.b), (y.a, y.b), t, n)
    return AlgInt(a, b, F)


def nf_norm(x: AlgInt, F: FieldDesc) -> int:
    if x.field != F:
        raise FieldMismatchError(f"{x.field} vs {F}")
    t, n = F.min_poly_of_omega
    return x.a * x.a + t * x.a * x.b - n * x.b * x.b


def format_element(x: AlgInt) -> str:
    """Serialize as ``"a+b*w"`` (just ``"a"`` over Q)."""
    if x.field.is_rational:
        return str(x.a)
    return f"{x.a}{'+' if x.b >= 0 else '-'}{abs(x.b)}*w"


_ELT_RE = re.compile(r"^\s*([+-]?\d+)?\s*(?:([+-])\s*(\d+)?\s*\*?\s*([wi]))?\s*$")


def parse_element(text: str, F: FieldDesc) -> AlgInt:
    """Parse ``"a+b*w"``, ``"a"``, ``"-3-2*w"`` and the like.

    ``i`` is accepted as an alias for ``w`` in Q(sqrt -1).  Anything more
    elaborate goes through the polynomial parser.
    """
    s = text.strip()
    m = _ELT_RE.match(s)
    if m and (m.group(1) is not None or m.group(4) is not None):
        a = int(m.group(1)) if m.group(1) is not None else 0
        b = 0
        if m.group(4):
            if m.group(4) == "i" and F.d != -1:
                raise ValueError("'i' only denotes w in Q(sqrt -1)")
            b = int(m.group(3)) if m.group(3) else 1
            if m.group(2) == "-":
                b = -b
        return AlgInt(a, b, F)
    from .poly_ring import parse_poly
    p = parse_poly(s, F, variables=())
    return p.constant_term()
