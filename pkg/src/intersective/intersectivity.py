"""Roots modulo ideals, Hensel lifting, and (semi-)decisions of intersectivity.

Falsification is exact: a ``NOT_INTERSECTIVE`` verdict names an ideal modulo
which there is provably no root.  Positive answers are either
``INTERSECTIVE_UP_TO`` a prime-norm bound or ``CERTIFIED_INTERSECTIVE`` when a
structural certificate (an exact root, or the residue conditions of the
three-quadratics construction over Z[i]) is available.
"""

from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import _kernels
from .ideal_arith import (
    Ideal,
    PrimeFactor,
    ResidueCapError,
    factor_rational_prime,
    format_ideal,
    ideal_from_generators,
    ideal_mul,
    ideal_pow,
    parse_ideal,
    prime_ideals_up_to,
    residue_cap,
    uniformizer,
    valuation,
)
from .number_field import AlgInt, FieldDesc, format_element, mul_coords, parse_element
from .poly_ring import (
    OPoly,
    discriminant,
    eval_univariate,
    formal_derivative,
    poly_gcd_over_L,
    squarefree_part,
)

log = logging.getLogger(__name__)


class Status(str, Enum):
    NOT_INTERSECTIVE = "NOT_INTERSECTIVE"
    INTERSECTIVE_UP_TO = "INTERSECTIVE_UP_TO"
    CERTIFIED_INTERSECTIVE = "CERTIFIED_INTERSECTIVE"


class ConditionsNotMet(ValueError):
    """The hypotheses of a structural certificate fail; nothing is claimed."""

    def __init__(self, message: str, record: dict):
        super().__init__(message)
        self.record = record


@dataclass
class Verdict:
    status: Status
    witness: Ideal | None = None
    bound: int | None = None
    depth_used: int | None = None
    certificate: dict | None = None
    warnings: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.status is Status.NOT_INTERSECTIVE and self.witness is None:
            raise ValueError("NOT_INTERSECTIVE needs a witness ideal")
        if self.status is Status.CERTIFIED_INTERSECTIVE and not self.certificate:
            raise ValueError("CERTIFIED_INTERSECTIVE needs a certificate")

    def to_json(self) -> dict:
        out: dict = {"status": self.status.value}
        if self.witness is not None:
            out["witness"] = format_ideal(self.witness)
        if self.bound is not None:
            out["bound"] = self.bound
        if self.depth_used is not None:
            out["depth_used"] = self.depth_used
        if self.certificate is not None:
            out["certificate"] = self.certificate
        if self.warnings:
            out["warnings"] = list(self.warnings)
        return out

    @classmethod
    def from_json(cls, data: dict, F: FieldDesc) -> "Verdict":
        witness = parse_ideal(data["witness"], F) if "witness" in data else None
        return cls(Status(data["status"]), witness, data.get("bound"), data.get("depth_used"),
                   data.get("certificate"), list(data.get("warnings", [])))


@dataclass(frozen=True)
class DepthRule:
    """How deep to lift at each prime.

    The target depth is ``2*v + 1`` with ``v`` the valuation of the
    discriminant of the squarefree part, raised to ``min_depth`` everywhere and
    to ``ramified_min_depth`` at primes ramified in L (or above 2 over Q).
    Lifting stops early once a nonsingular root appears.
    """

    min_depth: int = 1
    ramified_min_depth: int = 5
    max_depth: int | None = None
    joint_depth: int = 2

    def target(self, v: int, ramified: bool) -> int:
        k = max(2 * v + 1, self.min_depth)
        if ramified:
            k = max(k, self.ramified_min_depth)
        if self.max_depth is not None:
            k = min(k, self.max_depth)
        return k

    def joint_target(self, ramified: bool) -> int:
        k = max(self.joint_depth, self.min_depth)
        if ramified:
            k = max(k, self.ramified_min_depth)
        if self.max_depth is not None:
            k = min(k, self.max_depth)
        return k


def _is_ramified(pf: PrimeFactor) -> bool:
    if pf.prime_ideal.field.is_rational:
        return pf.p == 2
    return pf.ramification > 1


# ---------------------------------------------------------------------------
# roots modulo an ideal


def _reduced_coeffs(p: OPoly, I: Ideal) -> list[tuple[int, int]]:
    return [I.reduce_coords(a, b) for a, b in p.coeffs()]


def roots_mod(p: OPoly, I: Ideal, cap: int | None = None) -> list[AlgInt]:
    """All residues ``r`` (canonical representatives, sorted) with ``p(r) in I``."""
    if p.field != I.field:
        raise ValueError(f"{p.field} vs {I.field}")
    p._require_univariate()
    cap = residue_cap() if cap is None else cap
    if I.norm > cap:
        raise ResidueCapError(f"residue system of size {I.norm} exceeds cap {cap}")
    F = p.field
    t, n = F.min_poly_of_omega
    if p.is_zero():
        return [AlgInt(x, y, F) for x in range(I.a) for y in range(I.c)]
    coeffs = _reduced_coeffs(p, I)
    if _kernels.grid_bound(I.a, I.b, I.c, n, t) < _kernels.INT64_SAFE:
        ca = [c[0] for c in coeffs]
        cb = [c[1] for c in coeffs]
        mask = _kernels.roots_grid(ca, cb, t, n, I.a, I.b, I.c)
        xs, ys = np.nonzero(mask)
        return [AlgInt(int(x), int(y), F) for x, y in zip(xs, ys)]
    out = []
    for x in range(I.a):
        for y in range(I.c):
            if I.contains_coords(*eval_univariate(coeffs, (x, y), t, n)):
                out.append(AlgInt(x, y, F))
    return out


def exact_roots(p: OPoly) -> list[AlgInt]:
    """Roots of ``p`` lying in O_L, located numerically and verified exactly.

    Only candidates passing exact evaluation are returned, so a numerical
    miss can lose a root but never invent one.
    """
    p._require_univariate()
    if p.degree() < 1:
        return []
    F = p.field
    coeffs = p.coeffs()
    cands: set[tuple[int, int]] = set()
    if F.is_rational:
        for z in np.roots([float(a) for a, _ in reversed(coeffs)]):
            if abs(z.imag) < 1e-6 * max(1.0, abs(z)):
                cands.add((round(z.real), 0))
    elif F.is_imaginary:
        w = F.omega_complex()
        poly = [complex(a) + complex(b) * w for a, b in reversed(coeffs)]
        for z in np.roots(poly):
            b = z.imag / w.imag
            cands.add((round(z.real - b * w.real), round(b)))
    else:
        w1, w2 = F.omega_embeddings()
        r1 = [z.real for z in np.roots([a + b * w1 for a, b in reversed(coeffs)])
              if abs(z.imag) < 1e-6 * max(1.0, abs(z))]
        r2 = [z.real for z in np.roots([a + b * w2 for a, b in reversed(coeffs)])
              if abs(z.imag) < 1e-6 * max(1.0, abs(z))]
        for z1 in r1:
            for z2 in r2:
                b = (z1 - z2) / (w1 - w2)
                cands.add((round(z1 - b * w1), round(b)))
    t, n = F.min_poly_of_omega
    found = set()
    for a, b in cands:
        for da in (-1, 0, 1):
            for db in ((-1, 0, 1) if not F.is_rational else (0,)):
                c = (a + da, b + db)
                if eval_univariate(coeffs, c, t, n) == (0, 0):
                    found.add(c)
    return [AlgInt(a, b, F) for a, b in sorted(found)]


# ---------------------------------------------------------------------------
# Hensel lifting


@dataclass(frozen=True)
class LiftNode:
    root: AlgInt
    parent: int | None
    nonsingular: bool


@dataclass
class LiftTree:
    prime: PrimeFactor
    levels: list[list[LiftNode]]
    ideals: list[Ideal]

    @property
    def depth(self) -> int:
        return len(self.levels)

    def roots(self, k: int) -> list[AlgInt]:
        return [node.root for node in self.levels[k - 1]]

    def first_empty_level(self) -> int | None:
        for k, level in enumerate(self.levels, start=1):
            if not level:
                return k
        return None

    def has_nonsingular(self, k: int) -> bool:
        return any(node.nonsingular for node in self.levels[k - 1])


class _Lifter:
    """Level-by-level root sets of ``p`` modulo powers of a prime ideal."""

    def __init__(self, p: OPoly, pf: PrimeFactor, cap: int | None = None, newton: bool = True):
        self.p = p
        self.pf = pf
        self.P = pf.prime_ideal
        self.F = p.field
        self.t, self.n = self.F.min_poly_of_omega
        self.coeffs = p.coeffs()
        self.dcoeffs = formal_derivative(p).coeffs() if p.degree() > 0 else []
        self.cap = residue_cap() if cap is None else cap
        self.newton = newton
        self.pi = uniformizer(self.P)
        self.residues = [(x, y) for x in range(self.P.a) for y in range(self.P.c)]
        self.powers = [self.P]
        self.pi_powers = [(1, 0)]

    def power(self, k: int) -> Ideal:
        while len(self.powers) < k:
            self.powers.append(ideal_mul(self.powers[-1], self.P))
        return self.powers[k - 1]

    def pi_power(self, k: int) -> tuple[int, int]:
        while len(self.pi_powers) <= k:
            self.pi_powers.append(mul_coords(self.pi_powers[-1], (self.pi.a, self.pi.b), self.t, self.n))
        return self.pi_powers[k]

    def value(self, r: tuple[int, int]) -> tuple[int, int]:
        return eval_univariate(self.coeffs, r, self.t, self.n)

    def is_nonsingular(self, r: tuple[int, int]) -> bool:
        if not self.dcoeffs:
            return False
        return not self.P.contains_coords(*eval_univariate(self.dcoeffs, r, self.t, self.n))

    def _inverse_mod_prime(self, x: tuple[int, int]) -> tuple[int, int]:
        # the residue field has N(P) elements, so x^(N-2) inverts x
        e = self.P.norm - 2
        r, base = (1, 0), self.P.reduce_coords(*x)
        while e > 0:
            if e & 1:
                r = self.P.reduce_coords(*mul_coords(r, base, self.t, self.n))
            base = self.P.reduce_coords(*mul_coords(base, base, self.t, self.n))
            e >>= 1
        return r

    def level_one(self) -> list[LiftNode]:
        roots = roots_mod(self.p, self.P, self.cap)
        return [LiftNode(r, None, self.is_nonsingular((r.a, r.b))) for r in roots]

    def next_level(self, k: int, parents: list[LiftNode]) -> list[LiftNode]:
        """Roots modulo ``P^k`` from the roots modulo ``P^(k-1)``."""
        Pk = self.power(k)
        shift = self.pi_power(k - 1)
        singular = sum(1 for node in parents if not (self.newton and node.nonsingular))
        if singular * self.P.norm > self.cap:
            raise ResidueCapError(
                f"lifting {singular} singular roots to level {k} exceeds cap {self.cap}")
        children: dict[tuple[int, int], LiftNode] = {}
        for idx, node in enumerate(parents):
            r = (node.root.a, node.root.b)
            if self.newton and node.nonsingular:
                val = self.value(r)
                s = self._inverse_mod_prime(eval_univariate(self.dcoeffs, r, self.t, self.n))
                corr = mul_coords(val, s, self.t, self.n)
                child = Pk.reduce_coords(r[0] - corr[0], r[1] - corr[1])
                if not Pk.contains_coords(*self.value(child)):
                    raise AssertionError("Newton step failed to lift a nonsingular root")
                children.setdefault(child, LiftNode(AlgInt(*child, self.F), idx, True))
                continue
            for s in self.residues:
                step = mul_coords(shift, s, self.t, self.n)
                cand = Pk.reduce_coords(r[0] + step[0], r[1] + step[1])
                if cand in children:
                    continue
                if Pk.contains_coords(*self.value(cand)):
                    children[cand] = LiftNode(AlgInt(*cand, self.F), idx,
                                              self.is_nonsingular(cand))
        return [children[key] for key in sorted(children)]

    def levels(self) -> Iterator[list[LiftNode]]:
        level = self.level_one()
        yield level
        k = 1
        while True:
            k += 1
            level = self.next_level(k, level)
            yield level


def lift_roots(p: OPoly, pf: PrimeFactor, K: int, cap: int | None = None) -> LiftTree:
    """Complete root sets of ``p`` modulo ``P, P^2, ..., P^K``."""
    if K < 1:
        raise ValueError("depth must be >= 1")
    p._require_univariate()
    lifter = _Lifter(p, pf, cap)
    levels: list[list[LiftNode]] = []
    for k, level in enumerate(lifter.levels(), start=1):
        levels.append(level)
        if k == K:
            break
        if not level:
            levels.extend([] for _ in range(K - k))
            break
    return LiftTree(pf, levels, [lifter.power(k) for k in range(1, K + 1)])


# ---------------------------------------------------------------------------
# scanning prime ideals


@dataclass
class _PrimeScan:
    prime: PrimeFactor
    depth: int
    empty_level: int | None
    reason: str               # "empty", "nonsingular", "stabilized"


def _scan_prime(p: OPoly, pf: PrimeFactor, disc: AlgInt, rule: DepthRule,
                cap: int | None) -> _PrimeScan:
    v = valuation(disc, pf.prime_ideal)
    target = rule.target(v, _is_ramified(pf))
    lifter = _Lifter(p, pf, cap)
    for k, level in enumerate(lifter.levels(), start=1):
        if not level:
            return _PrimeScan(pf, k, k, "empty")
        if any(node.nonsingular for node in level):
            return _PrimeScan(pf, k, None, "nonsingular")
        if k >= target:
            return _PrimeScan(pf, k, None, "stabilized")
    raise AssertionError("unreachable")


def _witness_key(scan: _PrimeScan):
    return (scan.empty_level, scan.prime.prime_ideal.sort_key())


def _verify_witness(p: OPoly, pf: PrimeFactor, k: int, cap: int | None) -> Ideal:
    """Recompute the emptiness of level ``k`` independently of the scan."""
    W = ideal_pow(pf.prime_ideal, k)
    if W.norm <= (residue_cap() if cap is None else cap):
        if roots_mod(p, W, cap):
            raise AssertionError(f"witness {W} has a root; scan bug")
    else:
        # enumerate every level without the Newton shortcut
        lifter = _Lifter(p, pf, cap, newton=False)
        for j, level in enumerate(lifter.levels(), start=1):
            if not level or j >= k:
                break
        if level or j != k:
            raise AssertionError(f"witness {W} not confirmed by re-enumeration")
    return W


def is_intersective_up_to(p: OPoly, norm_bound: int, depth_rule: DepthRule | None = None,
                          threads: int = 1, cap: int | None = None,
                          full_scan: bool = True) -> Verdict:
    """Scan every prime ideal of norm ``<= norm_bound`` for a power without roots."""
    p._require_univariate()
    if p.degree() < 1:
        raise ValueError("need a non-constant polynomial")
    rule = depth_rule or DepthRule()
    F = p.field
    roots = exact_roots(p)
    certificate: dict = {}
    if roots:
        root = max(roots)
        certificate["exact_root"] = format_element(root)
        if not full_scan:
            return Verdict(Status.INTERSECTIVE_UP_TO, bound=norm_bound, depth_used=0,
                           certificate=certificate)
    sqf = squarefree_part(p)
    disc = discriminant(sqf)
    primes = list(prime_ideals_up_to(norm_bound, F))

    def work(pf: PrimeFactor) -> _PrimeScan:
        return _scan_prime(p, pf, disc, rule, cap)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            scans = list(pool.map(work, primes))
    else:
        scans = [work(pf) for pf in primes]

    depth_used = max((s.depth for s in scans), default=0)
    failures = [s for s in scans if s.empty_level is not None]
    if failures:
        best = min(failures, key=_witness_key)
        W = _verify_witness(p, best.prime, best.empty_level, cap)
        return Verdict(Status.NOT_INTERSECTIVE, witness=W, bound=norm_bound,
                       depth_used=depth_used,
                       certificate={"prime": format_ideal(best.prime.prime_ideal),
                                    "level": best.empty_level})
    certificate["primes_scanned"] = len(scans)
    certificate["hensel_primes"] = sum(1 for s in scans if s.reason == "nonsingular")
    certificate["stabilized"] = {format_ideal(s.prime.prime_ideal): s.depth
                                 for s in scans if s.reason == "stabilized" and s.depth > 1}
    return Verdict(Status.INTERSECTIVE_UP_TO, bound=norm_bound, depth_used=depth_used,
                   certificate=certificate)


# ---------------------------------------------------------------------------
# x^2 + c


def _root_search_bound(c: AlgInt) -> int:
    """Bound on the w-coordinate of any r with r^2 = -c, from the embeddings."""
    F = c.field
    if F.is_rational:
        return 0
    if F.is_imaginary:
        w = F.omega_complex()
        modulus = abs(c.norm()) ** 0.25          # |r| = |c|^(1/2) = N(c)^(1/4)
        return int(modulus / abs(w.imag)) + 2
    w1, w2 = F.omega_embeddings()
    s1 = abs(c.a + c.b * w1) ** 0.5
    s2 = abs(c.a + c.b * w2) ** 0.5
    return int((s1 + s2) / abs(w1 - w2)) + 2


def square_roots(x: AlgInt) -> list[AlgInt]:
    """All ``r`` in O_L with ``r^2 = x``, by a search bounded via the embeddings."""
    F = x.field
    t, n = F.min_poly_of_omega
    c = -x
    out = []
    if x.b == 0 and x.a >= 0:
        r = math.isqrt(x.a)
        if r * r == x.a:
            out.extend({(r, 0), (-r, 0)})
    for y in range(1, _root_search_bound(c) + 1):
        for yy in (y, -y):
            num = x.b - t * yy * yy
            if num % (2 * yy):
                continue
            a = num // (2 * yy)
            if a * a + n * yy * yy == x.a:
                out.append((a, yy))
    return [AlgInt(a, b, F) for a, b in sorted(set(out))]


def certify_quadratic_plus_constant(c: AlgInt, F: FieldDesc | None = None,
                                    scan_bound: int = 10_000, cap: int | None = None) -> Verdict:
    """Decide ``x^2 + c``: intersective exactly when ``-c`` is a square in O_L."""
    F = F or c.field
    if c.field != F:
        raise ValueError(f"{c.field} vs {F}")
    roots = square_roots(-c)
    if roots:
        r = max(roots)
        if r * r + c:
            raise AssertionError("square root search returned a non-root")
        return Verdict(Status.CERTIFIED_INTERSECTIVE,
                       certificate={"kind": "exact_root", "root": format_element(r)})
    p = OPoly.from_coeffs([c, 0, 1], F)
    for pf in prime_ideals_up_to(scan_bound, F):
        if not roots_mod(p, pf.prime_ideal, cap):
            W = _verify_witness(p, pf, 1, cap)
            return Verdict(Status.NOT_INTERSECTIVE, witness=W, bound=scan_bound,
                           certificate={"kind": "no_root_mod_prime",
                                        "prime": format_ideal(pf.prime_ideal)})
    return Verdict(Status.INTERSECTIVE_UP_TO, bound=scan_bound,
                   warnings=[f"no root in O_L but no witness prime of norm <= {scan_bound}"])


# ---------------------------------------------------------------------------
# (x^2 - alpha)(x^2 - beta)(x^2 - alpha*beta) over Z[i]

GAUSSIAN = FieldDesc.gaussian()


def is_gaussian_prime(z: AlgInt) -> bool:
    from sympy import isprime

    N = z.norm()
    if isprime(N):
        return True
    if z.a == 0 or z.b == 0:
        q = abs(z.a + z.b)
        return isprime(q) and q % 4 == 3
    return False


def gaussian_associates(z: AlgInt) -> list[AlgInt]:
    i = GAUSSIAN(0, 1)
    return [z, z * i, -z, -(z * i)]


def gaussian_primes(max_norm: int) -> list[AlgInt]:
    """First-quadrant Gaussian primes (``a > 0, b >= 0``) up to a norm, sorted."""
    out = []
    r = math.isqrt(max_norm)
    for a in range(1, r + 1):
        for b in range(0, r + 1):
            z = GAUSSIAN(a, b)
            if z.norm() <= max_norm and is_gaussian_prime(z):
                out.append(z)
    return sorted(out, key=lambda z: (z.norm(), z.a, z.b))


def _is_square_mod(x: AlgInt, I: Ideal) -> AlgInt | None:
    for a in range(I.a):
        for b in range(I.c):
            r = GAUSSIAN(a, b)
            if (r * r - x) in I:
                return r
    return None


def _euler_residue(x: AlgInt, prime: AlgInt) -> bool:
    """Euler's criterion in the residue field Z[i]/(prime) (odd characteristic)."""
    P = ideal_from_generators([prime], GAUSSIAN)
    if x in P:
        return False
    e = (P.norm - 1) // 2
    r, base = (1, 0), P.reduce_coords(x.a, x.b)
    while e:
        if e & 1:
            r = P.reduce_coords(*mul_coords(r, base, 0, -1))
        base = P.reduce_coords(*mul_coords(base, base, 0, -1))
        e >>= 1
    return r == P.reduce_coords(1, 0)


def three_quadratics_conditions(alpha: AlgInt, beta: AlgInt) -> dict:
    """Evaluate the residue conditions; raises on invalid inputs."""
    for z, name in ((alpha, "alpha"), (beta, "beta")):
        if z.field != GAUSSIAN:
            raise ValueError(f"{name} must lie in Z[i]")
        if not is_gaussian_prime(z):
            raise ValueError(f"{name}={z} is not a Gaussian prime")
        if z.norm() == 2:
            raise ValueError(f"{name}={z} is associate to 1+i")
    if beta in gaussian_associates(alpha):
        raise ValueError("alpha and beta are associates")
    two_adic = ideal_pow(ideal_from_generators([GAUSSIAN(1, 1)], GAUSSIAN), 5)
    record = {
        "alpha": format_element(alpha),
        "beta": format_element(beta),
        "alpha_square_mod_beta": _euler_residue(alpha, beta),
        "beta_square_mod_alpha": _euler_residue(beta, alpha),
        "square_mod_(1+i)^5": None,
        "root_mod_(1+i)^5": None,
    }
    for name, val in (("alpha", alpha), ("beta", beta), ("alpha*beta", alpha * beta)):
        r = _is_square_mod(val, two_adic)
        if r is not None:
            record["square_mod_(1+i)^5"] = name
            record["root_mod_(1+i)^5"] = format_element(r)
            break
    record["conditions_met"] = bool(
        record["alpha_square_mod_beta"] and record["beta_square_mod_alpha"]
        and record["square_mod_(1+i)^5"] is not None)
    return record


def three_quadratics_poly(alpha: AlgInt, beta: AlgInt) -> OPoly:
    x2 = OPoly.from_coeffs([0, 0, 1], GAUSSIAN)
    return (x2 - alpha) * (x2 - beta) * (x2 - alpha * beta)


def certify_three_quadratics(alpha: AlgInt, beta: AlgInt) -> Verdict:
    """Certify ``(x^2-alpha)(x^2-beta)(x^2-alpha*beta)`` over Z[i] from residue conditions."""
    record = three_quadratics_conditions(alpha, beta)
    if not record["conditions_met"]:
        raise ConditionsNotMet("residue conditions fail; no claim either way", record)
    record["kind"] = "three_quadratics"
    return Verdict(Status.CERTIFIED_INTERSECTIVE, certificate=record)


def search_three_quadratics(max_norm: int = 200) -> tuple[list[tuple[AlgInt, AlgInt]],
                                                         list[tuple[AlgInt, AlgInt]]]:
    """Pairs of first-quadrant Gaussian primes meeting both conditions, and the
    pairs meeting the mutual-residue condition but failing the (1+i)^5 one."""
    primes = [z for z in gaussian_primes(max_norm) if z.norm() != 2]
    good, rejects = [], []
    for alpha, beta in itertools.combinations(primes, 2):
        if beta in gaussian_associates(alpha):
            continue
        rec = three_quadratics_conditions(alpha, beta)
        if rec["conditions_met"]:
            good.append((alpha, beta))
        elif rec["alpha_square_mod_beta"] and rec["beta_square_mod_alpha"]:
            rejects.append((alpha, beta))
    return good, rejects


def check_certificate(verdict: Verdict, p: OPoly | None = None) -> bool:
    """Re-verify a certificate or witness from scratch."""
    cert = verdict.certificate or {}
    if verdict.status is Status.NOT_INTERSECTIVE:
        if p is None:
            raise ValueError("need the polynomial to re-check a witness")
        return not roots_mod(p, verdict.witness)
    if cert.get("kind") == "three_quadratics":
        a = parse_element(cert["alpha"], GAUSSIAN)
        b = parse_element(cert["beta"], GAUSSIAN)
        return three_quadratics_conditions(a, b)["conditions_met"]
    root_text = cert.get("root") or cert.get("exact_root")
    if root_text is not None and p is not None:
        r = parse_element(root_text, p.field)
        return p(r).coords() == (0, 0)
    return verdict.status is Status.INTERSECTIVE_UP_TO


# ---------------------------------------------------------------------------
# joint intersectivity


def _common_root_depth(ps: Sequence[OPoly], pf: PrimeFactor, K: int, cap: int) -> int:
    """Largest ``k <= K`` admitting a common zero of all ``ps`` modulo ``P^k``."""
    F = ps[0].field
    d = ps[0].arity
    t, n = F.min_poly_of_omega
    P = pf.prime_ideal
    residues = [(x, y) for x in range(P.a) for y in range(P.c)]
    if len(residues) ** d > cap:
        raise ResidueCapError(f"joint search space {len(residues)}^{d} exceeds cap {cap}")
    pi = uniformizer(P)
    powers = [P]
    shifts = [(1, 0)]
    while len(powers) < K:
        powers.append(ideal_mul(powers[-1], P))
        shifts.append(mul_coords(shifts[-1], (pi.a, pi.b), t, n))

    def common(zeta: tuple[tuple[int, int], ...], I: Ideal) -> bool:
        point = [AlgInt(a, b, F) for a, b in zeta]
        return all(I.contains_coords(*q(*point).coords()) for q in ps)

    best = 0
    stack = []
    for zeta in itertools.product(residues, repeat=d):
        if common(zeta, P):
            stack.append((zeta, 1))
    visited = 0
    while stack:
        zeta, k = stack.pop()
        best = max(best, k)
        if best >= K:
            return K
        Ik = powers[k]
        for steps in itertools.product(residues, repeat=d):
            child = tuple(
                Ik.reduce_coords(z[0] + mul_coords(shifts[k], s, t, n)[0],
                                 z[1] + mul_coords(shifts[k], s, t, n)[1])
                for z, s in zip(zeta, steps))
            visited += 1
            if visited > cap:
                raise ResidueCapError(f"joint lifting exceeded cap {cap}")
            if common(child, Ik):
                stack.append((child, k + 1))
    return best


def jointly_intersective_up_to(ps: Sequence[OPoly], norm_bound: int,
                               depth_rule: DepthRule | None = None,
                               cap: int | None = None, threads: int = 1) -> Verdict:
    """Search a common zero modulo every ``P^k`` (prime norm bound, depth per rule)."""
    ps = list(ps)
    if not ps:
        raise ValueError("empty family")
    F, d = ps[0].field, ps[0].arity
    for q in ps:
        if q.field != F or q.arity != d:
            raise ValueError("polynomials must share field and arity")
    rule = depth_rule or DepthRule()
    cap = residue_cap() if cap is None else cap
    primes = list(prime_ideals_up_to(norm_bound, F))

    def work(pf: PrimeFactor) -> tuple[PrimeFactor, int, int]:
        K = rule.joint_target(_is_ramified(pf))
        return pf, K, _common_root_depth(ps, pf, K, cap)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, primes))
    else:
        results = [work(pf) for pf in primes]
    failures = [(reached + 1, pf.prime_ideal.sort_key(), pf) for pf, K, reached in results
                if reached < K]
    depth_used = max((K for _, K, _ in results), default=0)
    if failures:
        k, _, pf = min(failures, key=lambda f: (f[0], f[1]))
        W = ideal_pow(pf.prime_ideal, k)
        if d == 1 and W.norm <= cap:
            sets = [set(roots_mod(q, W, cap)) for q in ps]
            if set.intersection(*sets):
                raise AssertionError(f"joint witness {W} has a common root; search bug")
        return Verdict(Status.NOT_INTERSECTIVE, witness=W, bound=norm_bound,
                       depth_used=depth_used,
                       certificate={"prime": format_ideal(pf.prime_ideal), "level": k})
    return Verdict(Status.INTERSECTIVE_UP_TO, bound=norm_bound, depth_used=depth_used,
                   certificate={"primes_scanned": len(results)})


def gcd_reduction_check(ps: Sequence[OPoly], norm_bound: int,
                        depth_rule: DepthRule | None = None, cap: int | None = None) -> dict:
    """Compare intersectivity of ``gcd(ps)`` with joint intersectivity of ``ps``.

    A common zero modulo an ideal ``I`` makes ``delta * g`` vanish modulo ``I``;
    so a witness for ``g`` at a prime not dividing ``delta`` must also be a
    witness for the family.  That implication is asserted on every call.
    """
    ps = list(ps)
    res = poly_gcd_over_L(ps)
    g, delta = res.gcd, res.denominator
    F = g.field
    joint = jointly_intersective_up_to(ps, norm_bound, depth_rule, cap)
    notes = []
    if g.degree() < 1:
        # a nonzero constant gcd has no root modulo any ideal avoiding it
        pf = next(pf for pf in prime_ideals_up_to(max(norm_bound, 2), F)
                  if g.constant_term() not in pf.prime_ideal)
        g_verdict = Verdict(Status.NOT_INTERSECTIVE, witness=pf.prime_ideal, bound=norm_bound,
                            certificate={"kind": "constant_gcd"})
        notes.append("gcd is a constant")
    else:
        g_verdict = is_intersective_up_to(g, norm_bound, depth_rule, cap=cap)
    consistent = True
    if g_verdict.status is Status.NOT_INTERSECTIVE:
        W = g_verdict.witness
        delta_in = delta in W
        if delta_in:
            notes.append(f"delta={format_element(delta)} lies in the gcd witness {W}; "
                         "the implication gives no information there")
        else:
            family_has_common_zero = _has_common_zero_mod(ps, W, cap)
            if family_has_common_zero:
                consistent = False
                raise AssertionError(f"family has a common zero mod {W} but its gcd has no root")
    return {
        "gcd": str(g),
        "delta": format_element(delta),
        "cofactors": [str(f) for f in res.cofactors],
        "gcd_verdict": g_verdict.to_json(),
        "joint_verdict": joint.to_json(),
        "consistent": consistent,
        "notes": notes,
    }


def _has_common_zero_mod(ps: Sequence[OPoly], I: Ideal, cap: int | None) -> bool:
    if ps[0].arity != 1:
        raise ValueError("univariate families only")
    sets = [set(roots_mod(q, I, cap)) for q in ps]
    return bool(set.intersection(*sets))
