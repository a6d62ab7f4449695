"""Sparse polynomials over O_L and their coordinate decomposition over Z.

Text format: sums of terms ``c*x1^e1*x2^e2`` where ``c`` is an integer or a
parenthesised element ``(a+b*w)``.  Univariate polynomials use ``x``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

from .number_field import AlgInt, FieldDesc, FieldMismatchError, format_element, mul_coords

Exponent = tuple[int, ...]


class OPoly:
    """Polynomial in ``arity`` variables with coefficients in O_L."""

    __slots__ = ("arity", "field", "_terms")

    def __init__(self, terms: Mapping[Exponent, AlgInt | tuple[int, int] | int],
                 arity: int, field: FieldDesc):
        if arity < 0:
            raise ValueError("arity must be non-negative")
        clean: dict[Exponent, tuple[int, int]] = {}
        for e, c in terms.items():
            e = tuple(int(v) for v in e)
            if len(e) != arity or any(v < 0 for v in e):
                raise ValueError(f"bad exponent {e} for arity {arity}")
            if isinstance(c, AlgInt):
                if c.field != field:
                    raise FieldMismatchError(f"{c.field} vs {field}")
                c = (c.a, c.b)
            elif isinstance(c, int):
                c = (c, 0)
            else:
                c = (int(c[0]), int(c[1]))
            if field.is_rational and c[1]:
                raise ValueError("coefficient outside Z")
            if c != (0, 0):
                prev = clean.get(e, (0, 0))
                s = (prev[0] + c[0], prev[1] + c[1])
                if s == (0, 0):
                    clean.pop(e, None)
                else:
                    clean[e] = s
        self.arity = arity
        self.field = field
        self._terms = clean

    # construction helpers ---------------------------------------------------

    @classmethod
    def constant(cls, c: AlgInt | int, arity: int, field: FieldDesc) -> "OPoly":
        return cls({(0,) * arity: c}, arity, field)

    @classmethod
    def variable(cls, j: int, arity: int, field: FieldDesc) -> "OPoly":
        e = [0] * arity
        e[j] = 1
        return cls({tuple(e): 1}, arity, field)

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[AlgInt | int | tuple[int, int]],
                    field: FieldDesc) -> "OPoly":
        """Univariate polynomial from ascending coefficients."""
        return cls({(i,): c for i, c in enumerate(coeffs)}, 1, field)

    # basic queries ----------------------------------------------------------

    @property
    def terms(self) -> dict[Exponent, AlgInt]:
        return {e: AlgInt(a, b, self.field) for e, (a, b) in self._terms.items()}

    def raw_terms(self) -> dict[Exponent, tuple[int, int]]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        if not self._terms:
            return -1
        return max(sum(e) for e in self._terms)

    def is_univariate(self) -> bool:
        return self.arity == 1

    def _require_univariate(self):
        if self.arity != 1:
            raise ValueError("operation needs a univariate polynomial")

    def coeffs(self) -> list[tuple[int, int]]:
        """Ascending dense coefficient pairs (univariate only)."""
        self._require_univariate()
        out = [(0, 0)] * (self.degree() + 1)
        for (k,), c in self._terms.items():
            out[k] = c
        return out

    def leading_coeff(self) -> AlgInt:
        self._require_univariate()
        if not self._terms:
            return self.field.zero()
        return AlgInt(*self._terms[(self.degree(),)], self.field)

    def constant_term(self) -> AlgInt:
        return AlgInt(*self._terms.get((0,) * self.arity, (0, 0)), self.field)

    def is_constant(self) -> bool:
        return self.degree() <= 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, OPoly):
            return NotImplemented
        return (self.arity, self.field, self._terms) == (other.arity, other.field, other._terms)

    def __hash__(self):
        return hash((self.arity, self.field, frozenset(self._terms.items())))

    # ring operations --------------------------------------------------------

    def _check(self, other: "OPoly"):
        if other.field != self.field:
            raise FieldMismatchError(f"{self.field} vs {other.field}")
        if other.arity != self.arity:
            raise ValueError(f"arity {self.arity} vs {other.arity}")

    def _lift(self, other) -> "OPoly":
        if isinstance(other, OPoly):
            self._check(other)
            return other
        if isinstance(other, (int, AlgInt)):
            return OPoly.constant(other, self.arity, self.field)
        raise TypeError(f"cannot combine OPoly with {type(other).__name__}")

    def __add__(self, other) -> "OPoly":
        other = self._lift(other)
        terms = dict(self._terms)
        out = OPoly(terms, self.arity, self.field)
        for e, c in other._terms.items():
            prev = out._terms.get(e, (0, 0))
            s = (prev[0] + c[0], prev[1] + c[1])
            if s == (0, 0):
                out._terms.pop(e, None)
            else:
                out._terms[e] = s
        return out

    __radd__ = __add__

    def __neg__(self) -> "OPoly":
        return OPoly({e: (-a, -b) for e, (a, b) in self._terms.items()}, self.arity, self.field)

    def __sub__(self, other) -> "OPoly":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "OPoly":
        return self._lift(other) - self

    def __mul__(self, other) -> "OPoly":
        other = self._lift(other)
        t, n = self.field.min_poly_of_omega
        acc: dict[Exponent, tuple[int, int]] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                p = mul_coords(c1, c2, t, n)
                prev = acc.get(e, (0, 0))
                acc[e] = (prev[0] + p[0], prev[1] + p[1])
        return OPoly(acc, self.arity, self.field)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "OPoly":
        if k < 0:
            raise ValueError("negative exponent")
        result = OPoly.constant(1, self.arity, self.field)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # evaluation -------------------------------------------------------------

    def evaluate(self, point: Sequence[AlgInt]) -> AlgInt:
        return evaluate(self, point)

    def __call__(self, *point: AlgInt) -> AlgInt:
        return evaluate(self, point)

    def compose(self, subs: Sequence["OPoly"]) -> "OPoly":
        """Substitute polynomial ``subs[j]`` for variable ``j``."""
        if len(subs) != self.arity:
            raise ValueError("need one substitution per variable")
        if not subs:
            return self
        arity = subs[0].arity
        result = OPoly({}, arity, self.field)
        cache: dict[tuple[int, int], OPoly] = {}

        def power(j: int, k: int) -> OPoly:
            if (j, k) not in cache:
                cache[(j, k)] = subs[j] ** k
            return cache[(j, k)]

        for e, c in self._terms.items():
            term = OPoly.constant(AlgInt(*c, self.field), arity, self.field)
            for j, k in enumerate(e):
                if k:
                    term = term * power(j, k)
            result = result + term
        return result

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"OPoly({format_poly(self)!r}, arity={self.arity}, field={self.field})"


def _var_names(arity: int) -> list[str]:
    return ["x"] if arity == 1 else [f"x{j + 1}" for j in range(arity)]


def _is_negative(c: tuple[int, int]) -> bool:
    return c[0] < 0 or (c[0] == 0 and c[1] < 0)


def _format_terms(terms: Mapping[Exponent, tuple[int, int]], names: Sequence[str],
                  field: FieldDesc | None) -> str:
    if not terms:
        return "0"
    order = sorted(terms, key=lambda e: (sum(e), e), reverse=True)
    pieces = []
    for e in order:
        c = terms[e]
        neg = _is_negative(c)
        if neg:
            c = (-c[0], -c[1])
        monomial = "*".join(
            name if k == 1 else f"{name}^{k}" for name, k in zip(names, e) if k
        )
        if c[1] == 0:
            coef = str(c[0])
        else:
            coef = f"({format_element(AlgInt(c[0], c[1], field))})"
        if not monomial:
            body = coef
        elif coef == "1":
            body = monomial
        else:
            body = f"{coef}*{monomial}"
        if pieces:
            pieces.append(("-" if neg else "+") + body)
        else:
            pieces.append(("-" if neg else "") + body)
    return "".join(pieces)


def format_poly(p: OPoly) -> str:
    return _format_terms(p._terms, _var_names(p.arity), p.field)


_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


def parse_poly(text: str, F: FieldDesc, arity: int | None = None,
               variables: Sequence[str] | None = None) -> OPoly:
    """Parse a polynomial expression (products, powers and parentheses allowed).

    ``w`` denotes the second integral basis element; ``i`` is accepted for it in
    Q(sqrt -1).  Variables are ``x`` (univariate) or ``x1, x2, ...``.
    """
    import sympy
    from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

    names = set(_NAME_RE.findall(text))
    if variables is None:
        indexed = sorted(int(m[1:]) for m in names if re.fullmatch(r"x\d+", m))
        if "x" in names and indexed:
            raise ValueError("mixing x with x1, x2, ... is ambiguous")
        if arity is None:
            arity = max(indexed) if indexed else 1
        variables = _var_names(arity) if (indexed or arity != 1) else ["x"]
    else:
        variables = list(variables)
        arity = len(variables)
    symbols = {v: sympy.Symbol(v) for v in variables}
    wsym = sympy.Symbol("w")
    local = dict(symbols)
    local["w"] = wsym
    if F.d == -1:
        local["i"] = wsym
    unknown = names - set(local)
    if unknown:
        raise ValueError(f"unknown names in polynomial: {sorted(unknown)}")
    if F.is_rational and "w" in names:
        raise ValueError("w is not available over Q")
    try:
        expr = parse_expr(text, local_dict=local,
                          transformations=standard_transformations + (convert_xor,),
                          evaluate=True)
        gens = [symbols[v] for v in variables] + [wsym]
        poly = sympy.Poly(sympy.expand(expr), *gens)
    except (SyntaxError, TypeError, sympy.PolynomialError, sympy.SympifyError) as exc:
        raise ValueError(f"cannot parse polynomial {text!r}: {exc}") from None
    t, n = F.min_poly_of_omega
    wpow = [(1, 0)]
    terms: dict[Exponent, tuple[int, int]] = {}
    for monom, coeff in poly.terms():
        coeff = sympy.Rational(coeff)
        if coeff.q != 1:
            raise ValueError(f"coefficient {coeff} is not integral")
        *e, k = monom
        while len(wpow) <= k:
            wpow.append(mul_coords(wpow[-1], (0, 1), t, n))
        c = (int(coeff) * wpow[k][0], int(coeff) * wpow[k][1])
        prev = terms.get(tuple(e), (0, 0))
        terms[tuple(e)] = (prev[0] + c[0], prev[1] + c[1])
    return OPoly(terms, arity, F)


def evaluate(p: OPoly, point: Sequence[AlgInt]) -> AlgInt:
    if len(point) != p.arity:
        raise ValueError(f"expected {p.arity} coordinates, got {len(point)}")
    for x in point:
        if x.field != p.field:
            raise FieldMismatchError(f"{x.field} vs {p.field}")
    t, n = p.field.min_poly_of_omega
    if p.arity == 1:
        v = eval_univariate(p.coeffs(), (point[0].a, point[0].b), t, n) if p._terms else (0, 0)
        return AlgInt(v[0], v[1], p.field)
    acc = (0, 0)
    powers: dict[tuple[int, int], tuple[int, int]] = {}
    for e, c in p._terms.items():
        v = c
        for j, k in enumerate(e):
            if k:
                key = (j, k)
                if key not in powers:
                    powers[key] = _pow_coords((point[j].a, point[j].b), k, t, n)
                v = mul_coords(v, powers[key], t, n)
        acc = (acc[0] + v[0], acc[1] + v[1])
    return AlgInt(acc[0], acc[1], p.field)


def _pow_coords(x: tuple[int, int], k: int, t: int, n: int) -> tuple[int, int]:
    r = (1, 0)
    while k:
        if k & 1:
            r = mul_coords(r, x, t, n)
        x = mul_coords(x, x, t, n)
        k >>= 1
    return r


def eval_univariate(coeffs: Sequence[tuple[int, int]], x: tuple[int, int],
                    t: int, n: int) -> tuple[int, int]:
    """Horner evaluation on raw coordinate pairs (ascending coefficients)."""
    acc = (0, 0)
    xa, xb = x
    for ca, cb in reversed(coeffs):
        bb = acc[1] * xb
        acc = (acc[0] * xa + n * bb + ca, acc[0] * xb + acc[1] * xa + t * bb + cb)
    return acc


def formal_derivative(p: OPoly) -> OPoly:
    p._require_univariate()
    return OPoly({(k - 1,): (k * a, k * b) for (k,), (a, b) in p._terms.items() if k},
                 1, p.field)


# ---------------------------------------------------------------------------
# coordinate decomposition


@dataclass(frozen=True)
class ZPolyVector:
    """Integer polynomials ``components[j]`` with ``p(u) = sum_j components[j](u) e_j``.

    Variables are ordered ``(a1, b1, a2, b2, ...)``; over Q only ``a1, a2, ...``.
    """

    components: tuple[dict[Exponent, int], ...]
    arity: int
    field: FieldDesc

    @property
    def m(self) -> int:
        return self.field.degree

    @property
    def nvars(self) -> int:
        return self.arity * self.m

    def variable_names(self) -> list[str]:
        letters = "ab"[: self.m]
        if self.arity == 1:
            return list(letters)
        return [f"{l}{j + 1}" for j in range(self.arity) for l in letters]

    def evaluate(self, coords: Sequence[int]) -> tuple[int, ...]:
        if len(coords) != self.nvars:
            raise ValueError(f"expected {self.nvars} integer coordinates")
        out = []
        for comp in self.components:
            s = 0
            for e, c in comp.items():
                term = c
                for x, k in zip(coords, e):
                    if k:
                        term *= x ** k
                s += term
            out.append(s)
        return tuple(out)

    def formatted(self) -> list[str]:
        names = self.variable_names()
        return [_format_terms({e: (c, 0) for e, c in comp.items()}, names, None)
                for comp in self.components]


def _split_variables(arity: int, F: FieldDesc) -> list[dict[Exponent, tuple[int, int]]]:
    """``x_j = a_j + b_j w`` as polynomials in the 2d (or d) integer variables."""
    m = F.degree
    nv = arity * m
    subs = []
    for j in range(arity):
        terms = {}
        for i in range(m):
            e = [0] * nv
            e[j * m + i] = 1
            terms[tuple(e)] = (1, 0) if i == 0 else (0, 1)
        subs.append(terms)
    return subs


def _mul_mixed(x: dict, y: dict, t: int, n: int) -> dict:
    acc: dict[Exponent, tuple[int, int]] = {}
    for e1, c1 in x.items():
        for e2, c2 in y.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            p = mul_coords(c1, c2, t, n)
            prev = acc.get(e, (0, 0))
            acc[e] = (prev[0] + p[0], prev[1] + p[1])
    return {e: c for e, c in acc.items() if c != (0, 0)}


def decompose(p: OPoly) -> ZPolyVector:
    """Split ``p(a + b w)`` into its 1- and w-coordinates as integer polynomials."""
    F = p.field
    t, n = F.min_poly_of_omega
    nv = p.arity * F.degree
    subs = _split_variables(p.arity, F)
    one = {(0,) * nv: (1, 0)}
    powers: dict[tuple[int, int], dict] = {}

    def power(j: int, k: int) -> dict:
        key = (j, k)
        if key not in powers:
            powers[key] = one if k == 0 else _mul_mixed(power(j, k - 1), subs[j], t, n)
        return powers[key]

    total: dict[Exponent, tuple[int, int]] = {}
    for e, c in p._terms.items():
        term = {(0,) * nv: c}
        for j, k in enumerate(e):
            if k:
                term = _mul_mixed(term, power(j, k), t, n)
        for ee, cc in term.items():
            prev = total.get(ee, (0, 0))
            total[ee] = (prev[0] + cc[0], prev[1] + cc[1])
    comps = [{e: c[0] for e, c in total.items() if c[0]}]
    if F.degree == 2:
        comps.append({e: c[1] for e, c in total.items() if c[1]})
    return ZPolyVector(tuple(comps), p.arity, F)


def recompose(zv: ZPolyVector) -> OPoly:
    """``sum_j components[j] * e_j`` as an O_L-polynomial in the integer variables."""
    terms: dict[Exponent, tuple[int, int]] = {}
    for j, comp in enumerate(zv.components):
        for e, c in comp.items():
            prev = terms.get(e, (0, 0))
            terms[e] = (prev[0] + c, prev[1]) if j == 0 else (prev[0], prev[1] + c)
    return OPoly(terms, zv.nvars, zv.field)


def split_coefficients(P: OPoly, arity: int) -> ZPolyVector:
    """Inverse of ``recompose``: split an O_L-polynomial in ``arity * m`` integer
    variables by the coordinates of its coefficients."""
    F = P.field
    if P.arity != arity * F.degree:
        raise ValueError("variable count must be arity times the field degree")
    raw = P.raw_terms()
    comps = [{e: c[0] for e, c in raw.items() if c[0]}]
    if F.degree == 2:
        comps.append({e: c[1] for e, c in raw.items() if c[1]})
    return ZPolyVector(tuple(comps), arity, F)


def substitute_coordinates(p: OPoly) -> OPoly:
    """``p(a_1 + b_1 w, ...)`` computed by polynomial composition."""
    F = p.field
    subs = [OPoly(s, p.arity * F.degree, F) for s in _split_variables(p.arity, F)]
    return p.compose(subs)


# ---------------------------------------------------------------------------
# arithmetic over the fraction field L, used for gcds and discriminants

LElt = tuple[Fraction, Fraction]
_ZERO: LElt = (Fraction(0), Fraction(0))
_ONE: LElt = (Fraction(1), Fraction(0))


def _ladd(x: LElt, y: LElt) -> LElt:
    return (x[0] + y[0], x[1] + y[1])


def _lsub(x: LElt, y: LElt) -> LElt:
    return (x[0] - y[0], x[1] - y[1])


def _lmul(x: LElt, y: LElt, t: int, n: int) -> LElt:
    bb = x[1] * y[1]
    return (x[0] * y[0] + n * bb, x[0] * y[1] + x[1] * y[0] + t * bb)


def _linv(x: LElt, t: int, n: int) -> LElt:
    norm = x[0] * x[0] + t * x[0] * x[1] - n * x[1] * x[1]
    if norm == 0:
        raise ZeroDivisionError("inverting zero in L")
    return ((x[0] + t * x[1]) / norm, -x[1] / norm)


class _LPolyOps:
    """Dense univariate polynomials over L (ascending lists of LElt)."""

    def __init__(self, F: FieldDesc):
        self.t, self.n = F.min_poly_of_omega

    @staticmethod
    def trim(p: list[LElt]) -> list[LElt]:
        p = list(p)
        while p and p[-1] == _ZERO:
            p.pop()
        return p

    def add(self, p, q):
        size = max(len(p), len(q))
        p = p + [_ZERO] * (size - len(p))
        q = q + [_ZERO] * (size - len(q))
        return self.trim([_ladd(a, b) for a, b in zip(p, q)])

    def sub(self, p, q):
        return self.add(p, [(-a, -b) for a, b in q])

    def mul(self, p, q):
        if not p or not q:
            return []
        out = [_ZERO] * (len(p) + len(q) - 1)
        for i, a in enumerate(p):
            if a == _ZERO:
                continue
            for j, b in enumerate(q):
                out[i + j] = _ladd(out[i + j], _lmul(a, b, self.t, self.n))
        return self.trim(out)

    def scale(self, p, c: LElt):
        return self.trim([_lmul(a, c, self.t, self.n) for a in p])

    def divmod(self, p, q):
        if not q:
            raise ZeroDivisionError("polynomial division by zero")
        inv = _linv(q[-1], self.t, self.n)
        r = list(p)
        quo = [_ZERO] * max(len(p) - len(q) + 1, 0)
        while len(r) >= len(q) and r:
            k = len(r) - len(q)
            c = _lmul(r[-1], inv, self.t, self.n)
            quo[k] = c
            for j, b in enumerate(q):
                r[k + j] = _lsub(r[k + j], _lmul(c, b, self.t, self.n))
            r = self.trim(r)
        return self.trim(quo), r

    def monic(self, p):
        return self.scale(p, _linv(p[-1], self.t, self.n)) if p else p

    def ext_gcd(self, p, q):
        """``(g, s, u)`` with ``s p + u q = g`` and ``g`` monic (or zero)."""
        r0, r1 = p, q
        s0, s1 = [_ONE], []
        u0, u1 = [], [_ONE]
        while r1:
            quo, rem = self.divmod(r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, self.sub(s0, self.mul(quo, s1))
            u0, u1 = u1, self.sub(u0, self.mul(quo, u1))
        if not r0:
            return [], s0, u0
        inv = _linv(r0[-1], self.t, self.n)
        return self.scale(r0, inv), self.scale(s0, inv), self.scale(u0, inv)

    def derivative(self, p):
        return self.trim([(k * a, k * b) for k, (a, b) in enumerate(p)][1:])


def _to_lpoly(p: OPoly) -> list[LElt]:
    return [(Fraction(a), Fraction(b)) for a, b in p.coeffs()]


def _clear_denominators(p: list[LElt]) -> tuple[list[tuple[int, int]], Fraction]:
    """Scale by a rational so coordinates are coprime integers; returns the scale."""
    den = 1
    for a, b in p:
        den = math.lcm(den, a.denominator, b.denominator)
    ints = [(int(a * den), int(b * den)) for a, b in p]
    content = 0
    for a, b in ints:
        content = math.gcd(content, a, b)
    content = content or 1
    return [(a // content, b // content) for a, b in ints], Fraction(den, content)


def _from_ints(coeffs: Sequence[tuple[int, int]], F: FieldDesc) -> OPoly:
    return OPoly.from_coeffs(list(coeffs), F)


@dataclass(frozen=True)
class GcdResult:
    gcd: OPoly
    cofactors: tuple[OPoly, ...]
    denominator: AlgInt

    def __iter__(self):
        return iter((self.gcd, list(self.cofactors), self.denominator))


def poly_gcd_over_L(ps: Sequence[OPoly]) -> GcdResult:
    """Gcd in L[x] scaled into O_L[x], with cofactors ``f_i`` and ``delta``
    satisfying ``sum f_i p_i = delta * g``."""
    ps = list(ps)
    if not ps:
        raise ValueError("empty polynomial family")
    F = ps[0].field
    for p in ps:
        p._require_univariate()
        if p.field != F:
            raise FieldMismatchError(f"{p.field} vs {F}")
    if all(p.is_zero() for p in ps):
        raise ValueError("all polynomials are zero")
    ops = _LPolyOps(F)
    lps = [_to_lpoly(p) for p in ps]
    g: list[LElt] = []
    coefs: list[list[LElt]] = [[] for _ in ps]
    for i, lp in enumerate(lps):
        if not lp:
            continue
        if not g:
            g = ops.monic(lp)
            coefs[i] = [_linv(lp[-1], ops.t, ops.n)]
            continue
        g_new, s, u = ops.ext_gcd(g, lp)
        coefs = [ops.mul(s, c) for c in coefs]
        coefs[i] = ops.add(coefs[i], u)
        g = g_new
    g_int, lam = _clear_denominators(g)
    scaled = [ops.scale(c, (lam, Fraction(0))) for c in coefs]
    den = 1
    for c in scaled:
        for a, b in c:
            den = math.lcm(den, a.denominator, b.denominator)
    cofactors = tuple(
        _from_ints([(int(a * den), int(b * den)) for a, b in c], F) for c in scaled
    )
    gpoly = _from_ints(g_int, F)
    delta = AlgInt(den, 0, F)
    lhs = OPoly({}, 1, F)
    for f, p in zip(cofactors, ps):
        lhs = lhs + f * p
    if lhs != gpoly * OPoly.constant(delta, 1, F):
        raise AssertionError("Bezout identity failed; arithmetic bug")
    return GcdResult(gpoly, cofactors, delta)


def primitive_part(p: OPoly) -> OPoly:
    """Divide out the rational-integer content of the coordinates."""
    content = 0
    for a, b in p.raw_terms().values():
        content = math.gcd(content, a, b)
    if content <= 1:
        return p
    return OPoly({e: (a // content, b // content) for e, (a, b) in p.raw_terms().items()},
                 p.arity, p.field)


def squarefree_part(p: OPoly) -> OPoly:
    """``p / gcd(p, p')`` over L, rescaled to a primitive O_L-polynomial."""
    p._require_univariate()
    if p.is_zero():
        raise ValueError("zero polynomial")
    if p.degree() == 0:
        return OPoly.constant(1, 1, p.field)
    ops = _LPolyOps(p.field)
    lp = _to_lpoly(p)
    g, _, _ = ops.ext_gcd(lp, ops.derivative(lp))
    quo, rem = ops.divmod(lp, g)
    assert not rem
    ints, _ = _clear_denominators(quo)
    return _from_ints(ints, p.field)


def resultant(p: OPoly, q: OPoly) -> tuple[Fraction, Fraction]:
    """Resultant over L by the Euclidean recursion (exact, coordinates in Q)."""
    ops = _LPolyOps(p.field)
    t, n = ops.t, ops.n
    a, b = _to_lpoly(p), _to_lpoly(q)
    if not a or not b:
        return _ZERO
    res = _ONE
    while True:
        da, db = len(a) - 1, len(b) - 1
        if db == 0:
            c = b[0]
            for _ in range(da):
                res = _lmul(res, c, t, n)
            return res
        _, r = ops.divmod(a, b)
        if not r:
            return _ZERO
        dr = len(r) - 1
        # res(a, b) = (-1)^(da*db) lc(b)^(da - dr) res(b, r)
        lc = b[-1]
        for _ in range(da - dr):
            res = _lmul(res, lc, t, n)
        if (da * db) % 2:
            res = (-res[0], -res[1])
        a, b = b, r


def discriminant(p: OPoly) -> AlgInt:
    """Discriminant of a univariate O_L-polynomial of degree >= 1."""
    p._require_univariate()
    d = p.degree()
    if d < 1:
        raise ValueError("discriminant needs degree >= 1")
    if d == 1:
        return p.field.one()
    ops = _LPolyOps(p.field)
    res = resultant(p, formal_derivative(p))
    lc = p.coeffs()[-1]
    val = _lmul(res, _linv((Fraction(lc[0]), Fraction(lc[1])), ops.t, ops.n), ops.t, ops.n)
    if (d * (d - 1) // 2) % 2:
        val = (-val[0], -val[1])
    if val[0].denominator != 1 or val[1].denominator != 1:
        raise AssertionError("discriminant of an integral polynomial left O_L")
    return AlgInt(int(val[0]), int(val[1]), p.field)
