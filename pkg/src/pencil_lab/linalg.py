"""Dense exact linear algebra over a finite field.

Matrices are 2-D ``numpy.int64`` arrays of field codes, always paired with
the :class:`~pencil_lab.gf.GF` they live over.  Row operations are
vectorized over whole rows, which keeps the Python overhead at O(rank)
per elimination.
"""

from __future__ import annotations

import itertools
from typing import Callable, Iterable, Iterator, Sequence, TypeVar

import numpy as np

from .errors import DivisionByZero, FieldMismatch, NotAnEigenvalue, ShapeError
from .gf import GF, FieldSpec, get_field
from .poly import Poly

R = TypeVar("R")


def as_matrix(rows, cols: int | None = None) -> np.ndarray:
    m = np.asarray(rows, dtype=np.int64)
    if m.ndim == 1 and cols:
        m = m.reshape(-1, cols)
    if m.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got shape {m.shape}")
    return m


def identity(F: GF, n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def scalar_matrix(F: GF, n: int, c: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64) * c


def rref_with_pivots(F: GF, m: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form (zero rows dropped) and its pivot columns."""
    a = np.array(m, dtype=np.int64, copy=True)
    if a.ndim != 2:
        raise ShapeError("rref needs a 2-D array")
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        lead = int(a[r, c])
        if lead != 1:
            a[r] = F.vmul(a[r], F.inv(lead))
        col = a[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            a[hit] = F.vsub(a[hit], F.vmul(col[hit, None], a[r][None, :]))
        pivots.append(c)
        r += 1
    return a[:r], pivots


def rref(F: GF, m) -> np.ndarray:
    return rref_with_pivots(F, as_matrix(m))[0]


def rank(F: GF, m) -> int:
    return len(rref_with_pivots(F, as_matrix(m))[1])


def kernel_basis(F: GF, m) -> np.ndarray:
    """Rows spanning the right null space (not yet in RREF)."""
    m = as_matrix(m)
    cols = m.shape[1]
    red, pivots = rref_with_pivots(F, m)
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for i, fc in enumerate(free):
        basis[i, fc] = 1
        for row, pc in enumerate(pivots):
            basis[i, pc] = F.neg(int(red[row, fc]))
    return basis


def kernel(F: GF, m) -> "Subspace":
    m = as_matrix(m)
    return Subspace.from_rows(F, kernel_basis(F, m), m.shape[1])


def inverse(F: GF, m) -> np.ndarray:
    m = as_matrix(m)
    n = m.shape[0]
    if m.shape != (n, n):
        raise ShapeError("inverse of a non-square matrix")
    aug = np.concatenate([m, identity(F, n)], axis=1)
    red, pivots = rref_with_pivots(F, aug)
    if pivots[:n] != list(range(n)):
        raise DivisionByZero("matrix is singular")
    return red[:, n:]


def solve(F: GF, m, rhs) -> np.ndarray:
    """One solution X of m X = rhs (rhs given as columns)."""
    m = as_matrix(m)
    rhs = as_matrix(rhs)
    rows, cols = m.shape
    red, pivots = rref_with_pivots(F, np.concatenate([m, rhs], axis=1))
    if any(pc >= cols for pc in pivots):
        raise ShapeError("linear system is inconsistent")
    out = np.zeros((cols, rhs.shape[1]), dtype=np.int64)
    for row, pc in enumerate(pivots):
        out[pc] = red[row, cols:]
    return out


def det(F: GF, m) -> int:
    m = as_matrix(m)
    n = m.shape[0]
    if m.shape != (n, n):
        raise ShapeError("determinant of a non-square matrix")
    a = m.copy()
    result = 1
    for c in range(n):
        nz = np.flatnonzero(a[c:, c])
        if nz.size == 0:
            return 0
        piv = c + int(nz[0])
        if piv != c:
            a[[c, piv]] = a[[piv, c]]
            result = F.neg(result)
        lead = int(a[c, c])
        result = F.mul(result, lead)
        inv = F.inv(lead)
        below = a[c + 1 :, c]
        hit = np.flatnonzero(below) + c + 1
        if hit.size:
            factors = F.vmul(a[hit, c], inv)
            a[hit] = F.vsub(a[hit], F.vmul(factors[:, None], a[c][None, :]))
    return result


def matmul(F: GF, *mats) -> np.ndarray:
    out = as_matrix(mats[0])
    for m in mats[1:]:
        out = F.matmul(out, m)
    return out


def matvec(F: GF, m, v) -> np.ndarray:
    return F.matmul(as_matrix(m), np.asarray(v, dtype=np.int64)[:, None])[:, 0]


def transpose(m) -> np.ndarray:
    return np.ascontiguousarray(as_matrix(m).T)


def poly_at_matrix(P: Poly, m) -> np.ndarray:
    """Horner evaluation of a polynomial at a square matrix."""
    F = P.field
    m = as_matrix(m)
    n = m.shape[0]
    acc = np.zeros((n, n), dtype=np.int64)
    for c in reversed(P.coeffs):
        acc = F.vadd(F.matmul(acc, m), scalar_matrix(F, n, c))
    return acc


# -- Berkowitz --------------------------------------------------------------


def berkowitz(
    mat: Sequence[Sequence[R]],
    add: Callable[[R, R], R],
    mul: Callable[[R, R], R],
    neg: Callable[[R], R],
    zero: R,
    one: R,
) -> list[R]:
    """Coefficients of det(xI - mat), highest degree first, over any commutative ring.

    Only ring operations are used, so the routine also works with
    polynomial entries (used for det(x A1 - A2)).
    """
    n = len(mat)
    vect: list[R] = [one]
    for k in range(n - 1, -1, -1):
        m = n - k - 1
        row = list(mat[k][k + 1 :])
        col = [mat[i][k] for i in range(k + 1, n)]
        sub = [list(r[k + 1 :]) for r in mat[k + 1 :]]
        toeplitz = [one, neg(mat[k][k])]
        v = col
        for _ in range(m):
            s = zero
            for a, b in zip(row, v):
                s = add(s, mul(a, b))
            toeplitz.append(neg(s))
            nv = []
            for r in sub:
                t = zero
                for a, b in zip(r, v):
                    t = add(t, mul(a, b))
                nv.append(t)
            v = nv
        new = []
        for i in range(m + 2):
            s = zero
            for j in range(min(i, m) + 1):
                s = add(s, mul(toeplitz[i - j], vect[j]))
            new.append(s)
        vect = new
    return vect


def charpoly(F: GF, m) -> Poly:
    m = as_matrix(m)
    n = m.shape[0]
    if m.shape != (n, n):
        raise ShapeError(f"charpoly needs a square matrix, got {m.shape}")
    rows = m.tolist()
    high = berkowitz(rows, F.add, F.mul, F.neg, 0, 1)
    return Poly(F, list(reversed(high)))


def det_poly_matrix(F: GF, entries: Sequence[Sequence[Poly]]) -> Poly:
    """Determinant of a matrix with polynomial entries, division-free."""
    n = len(entries)
    zero, one = Poly(F), Poly(F, (1,))
    high = berkowitz(entries, lambda a, b: a + b, lambda a, b: a * b, lambda a: -a, zero, one)
    # det(-M) is the constant term of det(xI - M)
    const = high[-1]
    return const if n % 2 == 0 else -const


def minpoly(F: GF, m) -> Poly:
    m = as_matrix(m)
    n = m.shape[0]
    if m.shape != (n, n):
        raise ShapeError(f"minpoly needs a square matrix, got {m.shape}")
    result = Poly(F, (1,))
    for i in range(n):
        vecs = [np.eye(n, dtype=np.int64)[i]]
        while True:
            nxt = matvec(F, m, vecs[-1])
            if rank(F, np.array(vecs + [nxt])) == len(vecs):
                vecs.append(nxt)
                break
            vecs.append(nxt)
        # the columns v_0..v_j have a one-dimensional dependency
        dep = kernel_basis(F, np.array(vecs).T)
        coeffs = dep[0]
        local = Poly(F, coeffs.tolist()).monic()
        result = result.lcm(local)
    return result


def generalized_eigenspace(F: GF, m, alpha: int, mult: int) -> "Subspace":
    m = as_matrix(m)
    n = m.shape[0]
    if charpoly(F, m)(alpha) != 0:
        raise NotAnEigenvalue(f"{alpha} is not an eigenvalue")
    shifted = F.vsub(m, scalar_matrix(F, n, alpha))
    power = identity(F, n)
    for _ in range(mult):
        power = F.matmul(power, shifted)
    return kernel(F, power)


# -- subspaces --------------------------------------------------------------


class Subspace:
    """A linear subspace of F^N stored as its canonical RREF basis."""

    __slots__ = ("field", "ambient_dim", "basis", "pivots", "_key")

    def __init__(self, field: GF, ambient_dim: int, basis: np.ndarray, pivots: list[int]) -> None:
        self.field = field
        self.ambient_dim = ambient_dim
        basis = np.ascontiguousarray(basis, dtype=np.int64).reshape(len(pivots), ambient_dim)
        basis.setflags(write=False)
        self.basis = basis
        self.pivots = tuple(pivots)
        self._key = (field.spec, ambient_dim, basis.shape[0], basis.tobytes())

    @classmethod
    def from_rows(cls, field: GF, rows, ambient_dim: int | None = None) -> "Subspace":
        rows = np.asarray(rows, dtype=np.int64)
        if ambient_dim is None:
            ambient_dim = rows.shape[-1]
        rows = rows.reshape(-1, ambient_dim)
        red, piv = rref_with_pivots(field, rows)
        return cls(field, ambient_dim, red, piv)

    @classmethod
    def zero(cls, field: GF, ambient_dim: int) -> "Subspace":
        return cls(field, ambient_dim, np.zeros((0, ambient_dim), dtype=np.int64), [])

    @classmethod
    def full(cls, field: GF, ambient_dim: int) -> "Subspace":
        return cls(field, ambient_dim, np.eye(ambient_dim, dtype=np.int64), list(range(ambient_dim)))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def key(self) -> tuple:
        """Sortable canonical key (entries of the RREF basis)."""
        return (self.dim, tuple(self.basis.ravel().tolist()))

    def __eq__(self, other) -> bool:
        return isinstance(other, Subspace) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __lt__(self, other: "Subspace") -> bool:
        return self.key < other.key

    def _check(self, other: "Subspace") -> None:
        if other.field.spec != self.field.spec:
            raise FieldMismatch(f"{self.field.spec} vs {other.field.spec}")
        if other.ambient_dim != self.ambient_dim:
            raise ShapeError("subspaces of different ambient spaces")

    def reduce(self, v) -> np.ndarray:
        """Remainder of v against the RREF basis (zero iff v lies in the span)."""
        F = self.field
        v = np.asarray(v, dtype=np.int64)
        if self.dim == 0:
            return v.copy()
        coeffs = v[..., list(self.pivots)]
        if v.ndim == 1:
            return F.vsub(v, F.vsum(F.vmul(coeffs[:, None], self.basis), axis=0))
        return F.vsub(v, F.matmul(coeffs, self.basis))

    def contains(self, v) -> bool:
        return not np.any(self.reduce(v))

    def contains_subspace(self, other: "Subspace") -> bool:
        self._check(other)
        return other.dim == 0 or not np.any(self.reduce(other.basis))

    def annihilator(self) -> np.ndarray:
        """Rows c with c.v = 0 exactly for v in this subspace."""
        if self.dim == 0:
            return np.eye(self.ambient_dim, dtype=np.int64)
        return kernel_basis(self.field, self.basis)

    def __and__(self, other: "Subspace") -> "Subspace":
        self._check(other)
        cons = np.concatenate([self.annihilator(), other.annihilator()])
        return kernel(self.field, cons) if cons.size else Subspace.full(self.field, self.ambient_dim)

    def __add__(self, other: "Subspace") -> "Subspace":
        self._check(other)
        return Subspace.from_rows(self.field, np.concatenate([self.basis, other.basis]), self.ambient_dim)

    def image(self, m) -> "Subspace":
        """Span of m v for v in the subspace (m acts on column vectors)."""
        if self.dim == 0:
            return self
        return Subspace.from_rows(self.field, self.field.matmul(self.basis, transpose(m)), self.ambient_dim)

    def preimage(self, m) -> "Subspace":
        """{v : m v in self}."""
        if self.dim == self.ambient_dim:
            return self
        return kernel(self.field, self.field.matmul(self.annihilator(), as_matrix(m)))

    def coordinates(self, v) -> np.ndarray:
        """Coordinates of v in the RREF basis (v must lie in the span)."""
        return np.asarray(v, dtype=np.int64)[..., list(self.pivots)]

    def to_json(self) -> list[list[int]]:
        return self.basis.tolist()

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, N={self.ambient_dim}, basis={self.basis.tolist()})"


def span(F: GF, vectors, ambient_dim: int | None = None) -> Subspace:
    return Subspace.from_rows(F, vectors, ambient_dim)


def complement_rows(F: GF, sub: Subspace, within: Subspace) -> np.ndarray:
    """Rows of ``within``'s basis that complete ``sub``'s basis to a basis of ``within``."""
    chosen: list[np.ndarray] = []
    current = sub
    for row in within.basis:
        if not current.contains(row):
            chosen.append(row)
            current = Subspace.from_rows(F, np.concatenate([current.basis, row[None, :]]), sub.ambient_dim)
    return np.array(chosen, dtype=np.int64).reshape(-1, sub.ambient_dim)


# -- Grassmannians ---------------------------------------------------------


def gaussian_binomial(n: int, d: int, q: int) -> int:
    if d < 0 or d > n:
        return 0
    num = den = 1
    for i in range(d):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def pivot_patterns(N: int, d: int) -> Iterator[tuple[int, ...]]:
    return itertools.combinations(range(N), d)


def grassmannian_pattern(F: GF, N: int, pivots: tuple[int, ...]) -> Iterator[Subspace]:
    """All RREF bases with the given pivot columns."""
    d = len(pivots)
    pset = set(pivots)
    free = [(r, c) for r, pc in enumerate(pivots) for c in range(pc + 1, N) if c not in pset]
    base = np.zeros((d, N), dtype=np.int64)
    for r, c in enumerate(pivots):
        base[r, c] = 1
    for values in itertools.product(range(F.q), repeat=len(free)):
        b = base.copy()
        for (r, c), val in zip(free, values):
            b[r, c] = val
        yield Subspace(F, N, b, list(pivots))


def grassmannian_iter(N: int, d: int, spec: FieldSpec | GF) -> Iterator[Subspace]:
    """Every d-dimensional subspace of F_q^N exactly once, grouped by pivot pattern."""
    F = spec if isinstance(spec, GF) else get_field(spec)
    if not 0 <= d <= N:
        raise ShapeError(f"need 0 <= d <= N, got d={d}, N={N}")
    for pattern in pivot_patterns(N, d):
        yield from grassmannian_pattern(F, N, pattern)


def projective_points(F: GF, sub: Subspace) -> np.ndarray:
    """All normalized vectors (first nonzero entry 1) of a subspace."""
    d = sub.dim
    if d == 0:
        return np.zeros((0, sub.ambient_dim), dtype=np.int64)
    out = []
    for lead in range(d):
        tail = d - lead - 1
        coeffs = np.zeros((F.q**tail, d), dtype=np.int64)
        coeffs[:, lead] = 1
        if tail:
            grid = np.array(list(itertools.product(range(F.q), repeat=tail)), dtype=np.int64)
            coeffs[:, lead + 1 :] = grid
        out.append(F.matmul(coeffs, sub.basis))
    pts = np.concatenate(out)
    return normalize_rows(F, pts)


def normalize_rows(F: GF, pts: np.ndarray) -> np.ndarray:
    """Scale each nonzero row so its first nonzero entry is 1."""
    pts = np.asarray(pts, dtype=np.int64)
    if pts.size == 0:
        return pts.reshape(-1, pts.shape[-1] if pts.ndim == 2 else 0)
    nz = pts != 0
    first = np.argmax(nz, axis=1)
    lead = pts[np.arange(pts.shape[0]), first]
    lead = np.where(lead == 0, 1, lead)
    return F.vmul(pts, F.vinv(lead)[:, None])


def point_keys(F: GF, pts: np.ndarray) -> np.ndarray:
    """Integer key of each (normalized) row, base q, first coordinate most significant."""
    pts = np.asarray(pts, dtype=np.int64)
    n = pts.shape[1]
    weights = np.array([F.q ** (n - 1 - i) for i in range(n)], dtype=np.int64)
    return pts @ weights
