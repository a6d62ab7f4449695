"""Hot loops: residue-grid root search, counter-based hashing, Monte-Carlo hits.

Every kernel exists twice: an explicit-loop version compiled with numba's
``njit`` and a vectorised numpy version.  ``INTERSECTIVE_DISABLE_NUMBA=1``
(or numba being unavailable) selects the numpy path.  Integer and hashing
kernels agree bit for bit across paths; floating-point averages agree to
rounding.  The test-suite runs both side by side.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


def numba_enabled() -> bool:
    flag = os.environ.get("INTERSECTIVE_DISABLE_NUMBA", "").strip().lower()
    return HAVE_NUMBA and flag not in ("1", "true", "yes")


INT64_SAFE = 2**62

_GOLD = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0
TWO_PI = 2.0 * np.pi


# ---------------------------------------------------------------------------
# roots of a polynomial on the residue grid of an ideal


def grid_bound(A: int, B: int, C: int, n: int, t: int) -> int:
    """Largest intermediate magnitude in one reduced Horner step."""
    return A * A + abs(n) * C * C + (2 * A + (abs(t) + 2) * C) * (A + B) + 2 * A + C


@njit(cache=True, nogil=True)
def _roots_grid_loop(ca, cb, t, n, A, B, C):
    out = np.zeros((A, C), dtype=np.bool_)
    deg = ca.shape[0]
    for x in range(A):
        for y in range(C):
            u = 0
            v = 0
            for k in range(deg - 1, -1, -1):
                bb = v * y
                nu = u * x + n * bb + ca[k]
                nv = u * y + v * x + t * bb + cb[k]
                q = nv // C
                v = nv - q * C
                u = (nu - q * B) % A
            out[x, y] = u == 0 and v == 0
    return out


def _roots_grid_numpy(ca, cb, t, n, A, B, C):
    x = np.repeat(np.arange(A, dtype=np.int64), C)
    y = np.tile(np.arange(C, dtype=np.int64), A)
    u = np.zeros(A * C, dtype=np.int64)
    v = np.zeros(A * C, dtype=np.int64)
    for k in range(len(ca) - 1, -1, -1):
        bb = v * y
        nu = u * x + n * bb + ca[k]
        nv = u * y + v * x + t * bb + cb[k]
        q = np.floor_divide(nv, C)
        v = nv - q * C
        u = np.mod(nu - q * B, A)
    return ((u == 0) & (v == 0)).reshape(A, C)


def roots_grid(ca, cb, t: int, n: int, A: int, B: int, C: int) -> np.ndarray:
    """Mask over ``(x, y)`` in ``[0,A) x [0,C)`` of ``p(x + y w) in I``.

    ``ca, cb`` are ascending coefficient coordinates already reduced mod the
    ideal with HNF ``(A, B, C)``; the caller checks ``grid_bound`` first.
    """
    ca = np.asarray(ca, dtype=np.int64)
    cb = np.asarray(cb, dtype=np.int64)
    if numba_enabled():
        return _roots_grid_loop(ca, cb, np.int64(t), np.int64(n), np.int64(A), np.int64(B), np.int64(C))
    return _roots_grid_numpy(ca, cb, t, n, A, B, C)


# ---------------------------------------------------------------------------
# counter-based hashing (splitmix64)


@njit(cache=True, nogil=True)
def _mix(z):
    z = z + np.uint64(0x9E3779B97F4A7C15)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def _mix_np(z):
    z = z + _GOLD
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(cache=True, nogil=True)
def _hash_rows_loop(seed, keys):
    N, D = keys.shape
    out = np.empty(N, dtype=np.uint64)
    for i in range(N):
        h = _mix(seed)
        for j in range(D):
            h = _mix(h ^ _mix(np.uint64(keys[i, j])))
        out[i] = h
    return out


def _hash_rows_numpy(seed, keys):
    with np.errstate(over="ignore"):
        h = np.full(keys.shape[0], _mix_np(np.uint64(seed)), dtype=np.uint64)
        k = keys.astype(np.uint64)
        for j in range(keys.shape[1]):
            h = _mix_np(h ^ _mix_np(k[:, j]))
    return h


def hash_rows(seed: int, keys) -> np.ndarray:
    """One 64-bit hash per row of an int64 key matrix, keyed by ``seed``."""
    keys = np.ascontiguousarray(keys, dtype=np.int64)
    if keys.ndim == 1:
        keys = keys[:, None]
    seed = np.uint64(seed % 2**64)
    if numba_enabled():
        return _hash_rows_loop(seed, keys)
    return _hash_rows_numpy(seed, keys)


def uniform_rows(seed: int, keys) -> np.ndarray:
    """Deterministic uniforms in ``[0, 1)`` per key row."""
    return (hash_rows(seed, keys) >> _S11).astype(np.float64) * _INV53


@njit(cache=True, nogil=True)
def _uniform_block_loop(useeds, S, D):
    U = useeds.shape[0]
    out = np.empty((U, S, D), dtype=np.float64)
    for i in range(U):
        for s in range(S):
            for j in range(D):
                h = _mix(useeds[i] ^ _mix(np.uint64(s * D + j)))
                out[i, s, j] = np.float64(h >> np.uint64(11)) * (1.0 / 9007199254740992.0)
    return out


def _uniform_block_numpy(useeds, S, D):
    with np.errstate(over="ignore"):
        ctr = _mix_np(np.arange(S * D, dtype=np.uint64))
        h = _mix_np(useeds[:, None] ^ ctr[None, :])
    return ((h >> _S11).astype(np.float64) * _INV53).reshape(len(useeds), S, D)


def uniform_block(useeds, S: int, D: int) -> np.ndarray:
    """``(U, S, D)`` uniforms; stream ``i`` depends only on ``useeds[i]``."""
    useeds = np.ascontiguousarray(useeds, dtype=np.uint64)
    if numba_enabled():
        return _uniform_block_loop(useeds, np.int64(S), np.int64(D))
    return _uniform_block_numpy(useeds, S, D)


# ---------------------------------------------------------------------------
# Monte-Carlo multiple-recurrence hits on a torus


@njit(cache=True, nogil=True)
def _kron_hits_loop(useeds, shifts, corner, sides, S):
    U, K, D = shifts.shape
    hits = np.zeros(U, dtype=np.int64)
    for i in range(U):
        count = 0
        for s in range(S):
            ok = True
            for j in range(D):
                h = _mix(useeds[i] ^ _mix(np.uint64(s * D + j)))
                x = np.float64(h >> np.uint64(11)) * (1.0 / 9007199254740992.0)
                r = x - corner[j]
                r = r - np.floor(r)
                if r >= sides[j]:
                    ok = False
                    break
                for k in range(K):
                    y = x + shifts[i, k, j]
                    r = y - corner[j]
                    r = r - np.floor(r)
                    if r >= sides[j]:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                count += 1
        hits[i] = count
    return hits


def _kron_hits_numpy(useeds, shifts, corner, sides, S):
    U, K, D = shifts.shape
    hits = np.zeros(U, dtype=np.int64)
    chunk = max(1, 2_000_000 // max(S * D, 1))
    for lo in range(0, U, chunk):
        x = _uniform_block_numpy(useeds[lo:lo + chunk], S, D)
        r = x - corner
        ok = np.all(r - np.floor(r) < sides, axis=2)
        for k in range(K):
            r = x + shifts[lo:lo + chunk, k, None, :] - corner
            ok &= np.all(r - np.floor(r) < sides, axis=2)
        hits[lo:lo + chunk] = ok.sum(axis=1)
    return hits


def kronecker_hits(useeds, shifts, corner, sides, S: int) -> np.ndarray:
    """Count samples ``x`` with ``x`` and every ``x + shift`` in the box (mod 1)."""
    useeds = np.ascontiguousarray(useeds, dtype=np.uint64)
    shifts = np.ascontiguousarray(shifts, dtype=np.float64)
    corner = np.ascontiguousarray(corner, dtype=np.float64)
    sides = np.ascontiguousarray(sides, dtype=np.float64)
    if numba_enabled():
        return _kron_hits_loop(useeds, shifts, corner, sides, np.int64(S))
    return _kron_hits_numpy(useeds, shifts, corner, sides, S)


# ---------------------------------------------------------------------------
# observables on a torus and the innermost seminorm average

KIND_TRIG = 0
KIND_BOX = 1


@njit(cache=True, nogil=True)
def _observable_at(y, kind, const, freqs, coefs, phases, corner, sides):
    D = y.shape[0]
    if kind == KIND_BOX:
        for j in range(D):
            r = y[j] - corner[j]
            r = r - np.floor(r)
            if r >= sides[j]:
                return 0.0
        return 1.0
    val = const
    for m in range(freqs.shape[0]):
        arg = 0.0
        for j in range(D):
            arg += freqs[m, j] * y[j]
        val += coefs[m] * np.cos(2.0 * np.pi * arg + phases[m])
    return val


@njit(cache=True, nogil=True)
def _trig_tables(x, freqs, phases):
    S, D = x.shape
    M = freqs.shape[0]
    cx = np.empty((M, S), dtype=np.float64)
    sx = np.empty((M, S), dtype=np.float64)
    for m in range(M):
        for s in range(S):
            arg = 0.0
            for j in range(D):
                arg += freqs[m, j] * x[s, j]
            arg = 2.0 * np.pi * arg + phases[m]
            cx[m, s] = np.cos(arg)
            sx[m, s] = np.sin(arg)
    return cx, sx


@njit(cache=True, nogil=True)
def _cube_product_loop(x, offsets, extra, kind, const, freqs, coefs, phases, corner,
                       sides, cx, sx):
    # G(x + extra) with G(y) = prod_o f(y + o); trig observables use the
    # per-sample tables and angle addition, so cos is never called per sample.
    S, D = x.shape
    O = offsets.shape[0]
    M = freqs.shape[0]
    out = np.ones(S, dtype=np.float64)
    if kind == KIND_BOX:
        y = np.empty(D, dtype=np.float64)
        for s in range(S):
            for o in range(O):
                for j in range(D):
                    y[j] = x[s, j] + offsets[o, j] + extra[j]
                if _observable_at(y, kind, const, freqs, coefs, phases, corner, sides) == 0.0:
                    out[s] = 0.0
                    break
        return out
    ct = np.empty(M, dtype=np.float64)
    st = np.empty(M, dtype=np.float64)
    for o in range(O):
        for m in range(M):
            th = 0.0
            for j in range(D):
                th += freqs[m, j] * (offsets[o, j] + extra[j])
            ct[m] = coefs[m] * np.cos(2.0 * np.pi * th)
            st[m] = coefs[m] * np.sin(2.0 * np.pi * th)
        for s in range(S):
            val = const
            for m in range(M):
                val += cx[m, s] * ct[m] - sx[m, s] * st[m]
            out[s] *= val
    return out


@njit(cache=True, nogil=True)
def _cube_last_level_loop(x, offsets, shifts, kind, const, freqs, coefs, phases, corner, sides):
    S, D = x.shape
    cx, sx = _trig_tables(x, freqs, phases)
    zero = np.zeros(D, dtype=np.float64)
    base = _cube_product_loop(x, offsets, zero, kind, const, freqs, coefs, phases, corner,
                              sides, cx, sx)
    V = shifts.shape[0]
    out = np.empty(V, dtype=np.float64)
    for v in range(V):
        moved = _cube_product_loop(x, offsets, shifts[v], kind, const, freqs, coefs, phases,
                                   corner, sides, cx, sx)
        acc = 0.0
        for s in range(S):
            acc += base[s] * moved[s]
        out[v] = acc / S
    return out


def _observable_numpy(y, kind, const, freqs, coefs, phases, corner, sides):
    if kind == KIND_BOX:
        r = y - corner
        return np.all(r - np.floor(r) < sides, axis=-1).astype(np.float64)
    val = np.full(y.shape[:-1], const, dtype=np.float64)
    for m in range(freqs.shape[0]):
        arg = y @ freqs[m]
        val += coefs[m] * np.cos(TWO_PI * arg + phases[m])
    return val


def _cube_last_level_numpy(x, offsets, shifts, kind, const, freqs, coefs, phases, corner, sides):
    S, D = x.shape
    args = (kind, const, freqs, coefs, phases, corner, sides)
    if kind == KIND_TRIG:
        arg = TWO_PI * (x @ freqs.T) + phases            # (S, M)
        cx, sx = np.cos(arg).T, np.sin(arg).T            # (M, S)

        def cube(extra):
            th = TWO_PI * ((offsets[None, :, :] + extra[:, None, :]) @ freqs.T)   # (V, O, M)
            ct, st = coefs * np.cos(th), coefs * np.sin(th)
            vals = const + np.einsum("vom,ms->vos", ct, cx) - np.einsum("vom,ms->vos", st, sx)
            return np.prod(vals, axis=1)
    else:
        def cube(extra):
            prod = np.ones(extra.shape[:-1] + (S,), dtype=np.float64)
            for o in offsets:
                prod *= _observable_numpy(x + o + extra[..., None, :], *args)
            return prod

    base = cube(np.zeros((1, D)))[0]
    out = np.empty(shifts.shape[0], dtype=np.float64)
    chunk = max(1, 4_000_000 // max(S * len(offsets), 1))
    for lo in range(0, shifts.shape[0], chunk):
        moved = cube(shifts[lo:lo + chunk])
        out[lo:lo + chunk] = moved @ base / S
    return out


def cube_last_level(x, offsets, shifts, observable) -> np.ndarray:
    """For each shift ``t``: mean over samples of ``G(x) G(x + t)``,
    ``G(y) = prod_o f(y + o)``; ``observable`` is the packed tuple from
    ``dynamics.Observable.packed``."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    offsets = np.ascontiguousarray(offsets, dtype=np.float64)
    shifts = np.ascontiguousarray(shifts, dtype=np.float64)
    if numba_enabled():
        return _cube_last_level_loop(x, offsets, shifts, *observable)
    return _cube_last_level_numpy(x, offsets, shifts, *observable)


def observable_values(y, observable) -> np.ndarray:
    """Evaluate a packed observable on an ``(..., D)`` array (numpy path only)."""
    return _observable_numpy(np.asarray(y, dtype=np.float64), *observable)
