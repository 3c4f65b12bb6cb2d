"""Hot loops of the brute-force enumerators, in numba and plain numpy.

Two kernels dominate every count: scanning projective space for points
where both quadratic forms vanish, and filtering candidate points that
are orthogonal to a given vector for both forms.  Each has an ``@njit``
implementation working directly on the field's exp/log tables and a
vectorized numpy twin built on :class:`~pencil_lab.gf.GF`.

Set ``PENCIL_LAB_NUMBA=0`` to force the numpy path (also used
automatically when numba cannot be imported).  Both paths must return
identical arrays; the test-suite and ``benchmarks/bench_kernels.py``
check this.
"""

from __future__ import annotations

import os

import numpy as np

from .gf import GF

try:  # pragma: no cover - exercised implicitly depending on environment
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False

# Rows handled per kernel call; bounds the numpy path's temporary arrays.
CHUNK = 1 << 18


def numba_enabled() -> bool:
    """True when the numba kernels are in use (env flag read on every call)."""
    return _HAVE_NUMBA and os.environ.get("PENCIL_LAB_NUMBA", "1") != "0"


def backend_name() -> str:
    return "numba" if numba_enabled() else "numpy"


# -- numba implementations ------------------------------------------------------
#
# The scan fixes every coordinate but the last (a "prefix"); along the
# last coordinate s each form is the quadratic c + b*s + a*s^2, so the
# numba path solves for s instead of walking all q values.  Field tables
# are passed as a tuple-free argument list: exp is doubled in length so
# that log sums need no reduction.

if _HAVE_NUMBA:

    @njit(cache=True, inline="always")
    def _fadd(a, b, p, k, m, exp2, log, zech):
        if k == 1:
            s = a + b
            return s - p if s >= p else s
        if a == 0:
            return b
        if b == 0:
            return a
        d = log[b] - log[a]
        if d < 0:
            d += m
        z = zech[d]
        if z < 0:
            return 0
        return exp2[log[a] + z]

    @njit(cache=True, inline="always")
    def _fmul(a, b, p, k, exp2, log):
        if a == 0 or b == 0:
            return 0
        if k == 1:
            return (a * b) % p
        return exp2[log[a] + log[b]]

    @njit(cache=True, inline="always")
    def _fdiv(a, b, m, exp2, log):
        if a == 0:
            return 0
        d = log[a] - log[b]
        if d < 0:
            d += m
        return exp2[d]

    @njit(cache=True)
    def _quadratic_coeffs(v, lead, N, A, p, k, m, exp2, log, zech):
        """(Q(v), 2 b(v, e_last)) for v with v[N-1] = 0."""
        last = N - 1
        acc = 0
        lin = 0
        for i in range(lead, last):
            if v[i] == 0:
                continue
            row = 0
            for j in range(lead, last):
                if v[j] != 0 and A[i, j] != 0:
                    row = _fadd(row, _fmul(A[i, j], v[j], p, k, exp2, log), p, k, m, exp2, log, zech)
            acc = _fadd(acc, _fmul(v[i], row, p, k, exp2, log), p, k, m, exp2, log, zech)
            lin = _fadd(lin, _fmul(v[i], A[i, last], p, k, exp2, log), p, k, m, exp2, log, zech)
        return acc, _fmul(2, lin, p, k, exp2, log)

    @njit(cache=True)
    def _solve_quadratic(c, b, a, out, p, k, m, exp2, log, zech, neg):
        """Write the roots of c + b s + a s^2 into ``out``; return their count, or -1 if it vanishes."""
        if a == 0:
            if b == 0:
                return -1 if c == 0 else 0
            out[0] = _fdiv(neg[c], b, m, exp2, log)
            return 1
        four_ac = _fmul(_fmul(4 % p, a, p, k, exp2, log), c, p, k, exp2, log)
        disc = _fadd(_fmul(b, b, p, k, exp2, log), neg[four_ac], p, k, m, exp2, log, zech)
        two_a = _fmul(2, a, p, k, exp2, log)
        if disc == 0:
            out[0] = _fdiv(neg[b], two_a, m, exp2, log)
            return 1
        if log[disc] % 2 == 1:
            return 0
        r = exp2[log[disc] // 2]
        out[0] = _fdiv(_fadd(neg[b], r, p, k, m, exp2, log, zech), two_a, m, exp2, log)
        out[1] = _fdiv(_fadd(neg[b], neg[r], p, k, m, exp2, log, zech), two_a, m, exp2, log)
        return 2

    @njit(cache=True)
    def _eval_quadratic(c, b, a, s, p, k, m, exp2, log, zech):
        inner = _fadd(b, _fmul(s, a, p, k, exp2, log), p, k, m, exp2, log, zech)
        return _fadd(c, _fmul(s, inner, p, k, exp2, log), p, k, m, exp2, log, zech)

    @njit(cache=True)
    def _scan_numba(start, count, lead, N, A1, A2, p, k, q, exp2, log, zech, neg):
        """Hit indices (prefix * q + s) among ``count`` prefixes from ``start``."""
        m = q - 1
        hits = np.empty(2 * count + 16, dtype=np.int64)
        nh = 0
        v = np.zeros(N, dtype=np.int64)
        v[lead] = 1
        a1 = A1[N - 1, N - 1]
        a2 = A2[N - 1, N - 1]
        roots = np.empty(2, dtype=np.int64)
        for t in range(count):
            idx = start + t
            for j in range(N - 2, lead, -1):
                v[j] = idx % q
                idx //= q
            c1, b1 = _quadratic_coeffs(v, lead, N, A1, p, k, m, exp2, log, zech)
            nr = _solve_quadratic(c1, b1, a1, roots, p, k, m, exp2, log, zech, neg)
            if nr == 0:
                continue
            c2, b2 = _quadratic_coeffs(v, lead, N, A2, p, k, m, exp2, log, zech)
            if nr < 0:
                nr = _solve_quadratic(c2, b2, a2, roots, p, k, m, exp2, log, zech, neg)
                if nr < 0:
                    # the whole affine line lies on both quadrics
                    if nh + q > hits.size:
                        grown = np.empty(2 * hits.size + q, dtype=np.int64)
                        grown[:nh] = hits[:nh]
                        hits = grown
                    for s in range(q):
                        hits[nh] = (start + t) * q + s
                        nh += 1
                    continue
                ok = nr
            else:
                ok = 0
                for i in range(nr):
                    if _eval_quadratic(c2, b2, a2, roots[i], p, k, m, exp2, log, zech) == 0:
                        roots[ok] = roots[i]
                        ok += 1
            if nh + 2 > hits.size:
                grown = np.empty(2 * hits.size, dtype=np.int64)
                grown[:nh] = hits[:nh]
                hits = grown
            for i in range(ok):
                hits[nh] = (start + t) * q + roots[i]
                nh += 1
        out = np.sort(hits[:nh])
        return out

    @njit(cache=True)
    def _orth_numba(rows1, rows2, w, p, k, q, exp2, log, zech):
        m = q - 1
        n = rows1.shape[0]
        N = rows1.shape[1]
        out = np.zeros(n, dtype=np.bool_)
        for r in range(n):
            s = 0
            for j in range(N):
                if w[j] != 0:
                    s = _fadd(s, _fmul(rows1[r, j], w[j], p, k, exp2, log), p, k, m, exp2, log, zech)
            if s != 0:
                continue
            s = 0
            for j in range(N):
                if w[j] != 0:
                    s = _fadd(s, _fmul(rows2[r, j], w[j], p, k, exp2, log), p, k, m, exp2, log, zech)
            out[r] = s == 0
        return out


def _numba_tables(F: GF) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(doubled exp, log, zech, neg) for the numba kernels."""
    exp2 = np.concatenate([F.exp_table, F.exp_table])
    return exp2, F.log_table, F.zech_table, F.neg_table


# -- numpy implementations ----------------------------------------------------------


def _tail_vectors(F: GF, start: int, count: int, lead: int, N: int) -> np.ndarray:
    """Normalized vectors with leading 1 at ``lead``, tails numbered base q."""
    return _vectors_at(F, np.arange(start, start + count, dtype=np.int64), lead, N)


def _vectors_at(F: GF, idx: np.ndarray, lead: int, N: int) -> np.ndarray:
    idx = idx.copy()
    v = np.zeros((idx.size, N), dtype=np.int64)
    v[:, lead] = 1
    for j in range(N - 1, lead, -1):
        v[:, j] = idx % F.q
        idx //= F.q
    return v


def _scan_numpy(F: GF, start: int, count: int, lead: int, N: int, A1, A2) -> np.ndarray:
    prefixes = _vectors_at(F, np.arange(start, start + count, dtype=np.int64) * F.q, lead, N)
    s = F.elements()
    mask = np.ones((count, F.q), dtype=bool)
    for A in (A1, A2):
        img = F.matmul(prefixes, A)
        c = F.rowdot(img, prefixes)
        b = F.vmul(img[:, N - 1], 2)
        inner = F.vadd(b[:, None], F.vmul(s, int(A[N - 1, N - 1]))[None, :])
        mask &= F.vadd(c[:, None], F.vmul(s[None, :], inner)) == 0
    return np.flatnonzero(mask.ravel()) + start * F.q


def _orth_numpy(F: GF, rows1, rows2, w) -> np.ndarray:
    w = np.asarray(w, dtype=np.int64)[:, None]
    m1 = F.matmul(rows1, w)[:, 0] == 0
    if not m1.any():
        return m1
    m2 = F.matmul(rows2[m1], w)[:, 0] == 0
    m1[np.flatnonzero(m1)] = m2
    return m1


# -- dispatch ---------------------------------------------------------------


def _point_on_both(F: GF, A1, A2, N: int) -> bool:
    return A1[N - 1, N - 1] == 0 and A2[N - 1, N - 1] == 0


def base_locus_scan(F: GF, A1, A2, use_numba: bool | None = None) -> np.ndarray:
    """Normalized vectors v (first nonzero entry 1) with Q1(v) = Q2(v) = 0.

    Rows come out sorted by :func:`pencil_lab.linalg.point_keys`.
    """
    A1 = np.ascontiguousarray(A1, dtype=np.int64)
    A2 = np.ascontiguousarray(A2, dtype=np.int64)
    N = A1.shape[0]
    fast = numba_enabled() if use_numba is None else (use_numba and _HAVE_NUMBA)
    found = [np.eye(1, N, N - 1, dtype=np.int64)] if _point_on_both(F, A1, A2, N) else []
    per_call = max(1, CHUNK // F.q)
    for lead in range(N - 2, -1, -1):
        prefixes = F.q ** (N - 2 - lead)
        for start in range(0, prefixes, per_call):
            count = min(per_call, prefixes - start)
            if fast:
                hits = _scan_numba(start, count, lead, N, A1, A2, F.p, F.k, F.q, *_numba_tables(F))
            else:
                hits = _scan_numpy(F, start, count, lead, N, A1, A2)
            if hits.size:
                found.append(_vectors_at(F, hits, lead, N))
    if not found:
        return np.zeros((0, N), dtype=np.int64)
    return np.concatenate(found)


def orth_mask(F: GF, rows1, rows2, w, use_numba: bool | None = None) -> np.ndarray:
    """Mask of rows r with r.w = 0 in both row sets (rows are pre-multiplied Gram images)."""
    rows1 = np.ascontiguousarray(rows1, dtype=np.int64)
    rows2 = np.ascontiguousarray(rows2, dtype=np.int64)
    w = np.ascontiguousarray(w, dtype=np.int64)
    if rows1.shape[0] == 0:
        return np.zeros(0, dtype=bool)
    fast = numba_enabled() if use_numba is None else (use_numba and _HAVE_NUMBA)
    if fast:
        exp2, log, zech, _ = _numba_tables(F)
        return _orth_numba(rows1, rows2, w, F.p, F.k, F.q, exp2, log, zech)
    return _orth_numpy(F, rows1, rows2, w)
