"""Quadratic forms, pencils, the self-adjoint operator and fixture builders."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from . import linalg as la
from .errors import (
    BadReductionVector,
    FieldMismatch,
    InvalidInput,
    NeedNondegenerateQ1,
    NeedsExtension,
    ShapeError,
)
from .gf import GF, Embedding, FieldSpec, extend_to_split, extension, get_field
from .linalg import Subspace
from .poly import Poly


def _sign_power(N: int) -> int:
    """Parity of N(N-1)/2, the exponent in the discriminant sign."""
    return (N * (N - 1) // 2) % 2


class QuadraticForm:
    """Q(v) = v^T G v with symmetric Gram matrix G."""

    __slots__ = ("field", "gram")

    def __init__(self, field: GF, gram) -> None:
        g = la.as_matrix(gram)
        if g.shape[0] != g.shape[1]:
            raise ShapeError(f"Gram matrix must be square, got {g.shape}")
        if not np.array_equal(g, g.T):
            raise InvalidInput("Gram matrix is not symmetric")
        if np.any((g < 0) | (g >= field.q)):
            raise InvalidInput("Gram entries must be field codes in [0, q)")
        g = np.ascontiguousarray(g)
        g.setflags(write=False)
        self.field = field
        self.gram = g

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    def b(self, v, w) -> int:
        F = self.field
        gw = la.matvec(F, self.gram, w)
        return int(F.rowdot(np.asarray(v, dtype=np.int64)[None, :], gw[None, :])[0])

    def __call__(self, v) -> int:
        return self.b(v, v)

    def pair(self, rows_a, rows_b) -> np.ndarray:
        """Matrix of pairings b(a_i, b_j)."""
        F = self.field
        return F.matmul(F.matmul(la.as_matrix(rows_a, self.dim), self.gram), la.as_matrix(rows_b, self.dim).T)

    def is_isotropic(self, sub: Subspace) -> bool:
        return sub.dim == 0 or not np.any(self.pair(sub.basis, sub.basis))

    def orthogonal(self, sub: Subspace) -> Subspace:
        if sub.dim == 0:
            return Subspace.full(self.field, self.dim)
        return la.kernel(self.field, self.field.matmul(sub.basis, self.gram))

    def det(self) -> int:
        return la.det(self.field, self.gram)

    def disc(self) -> int:
        d = self.det()
        return self.field.neg(d) if _sign_power(self.dim) else d

    def is_nondegenerate(self) -> bool:
        return self.det() != 0

    def radical(self) -> Subspace:
        return la.kernel(self.field, self.gram)

    def restricted(self, rows) -> "QuadraticForm":
        rows = la.as_matrix(rows, self.dim)
        return QuadraticForm(self.field, self.pair(rows, rows))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, QuadraticForm)
            and other.field.spec == self.field.spec
            and np.array_equal(self.gram, other.gram)
        )

    def __hash__(self) -> int:
        return hash((self.field.spec, self.gram.tobytes()))

    def __repr__(self) -> str:
        return f"QuadraticForm({self.gram.tolist()})"


class Pencil:
    """The pencil spanned by two symmetric forms; member(x) is x*A1 - A2."""

    __slots__ = ("field", "a1", "a2", "q1", "q2")

    def __init__(self, field: GF, a1, a2) -> None:
        self.q1 = QuadraticForm(field, a1)
        self.q2 = QuadraticForm(field, a2)
        if self.q1.dim != self.q2.dim:
            raise ShapeError("Gram matrices of different sizes")
        if self.q1.dim < 3:
            raise InvalidInput("a pencil needs N >= 3")
        self.field = field
        self.a1 = self.q1.gram
        self.a2 = self.q2.gram

    @property
    def N(self) -> int:
        return self.q1.dim

    @property
    def n(self) -> int:
        """Dimension of the maximal common isotropic subspaces, (N-1)//2."""
        return (self.N - 1) // 2

    @property
    def is_odd(self) -> bool:
        return self.N % 2 == 1

    def member(self, lam: int | None) -> QuadraticForm:
        """Gram of lam*A1 - A2; ``None`` stands for the point at infinity (A1)."""
        if lam is None:
            return self.q1
        F = self.field
        return QuadraticForm(F, F.vsub(F.vmul(self.a1, lam), self.a2))

    def embed(self, emb: Embedding) -> "Pencil":
        return Pencil(emb.dst, emb(self.a1), emb(self.a2))

    def to_json(self) -> dict:
        return {"field": self.field.spec.to_json(), "A1": self.a1.tolist(), "A2": self.a2.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "Pencil":
        try:
            spec = FieldSpec.from_json(data["field"])
            a1, a2 = data["A1"], data["A2"]
        except (KeyError, TypeError) as exc:
            raise InvalidInput(f"pencil JSON needs field, A1, A2: {exc}") from exc
        F = get_field(spec)
        try:
            m1 = np.array(a1, dtype=np.int64)
            m2 = np.array(a2, dtype=np.int64)
        except (ValueError, TypeError) as exc:
            raise InvalidInput("Gram matrices must be rectangular integer arrays") from exc
        return cls(F, m1, m2)

    def __repr__(self) -> str:
        return f"Pencil(N={self.N}, {self.field.spec})"


def pencil_from_operator(form: QuadraticForm, T) -> Pencil:
    """The pencil (b, b(., T.)) of a self-adjoint operator."""
    F = form.field
    return Pencil(F, form.gram, F.matmul(form.gram, T))


def pencil_poly(p: Pencil) -> Poly:
    """f(x) = (-1)^{N(N-1)/2} det(x A1 - A2), computed division-free."""
    F = p.field
    entries = [
        [Poly(F, (F.neg(int(p.a2[i, j])), int(p.a1[i, j]))) for j in range(p.N)] for i in range(p.N)
    ]
    d = la.det_poly_matrix(F, entries)
    return -d if _sign_power(p.N) else d


def self_adjoint_T(p: Pencil) -> np.ndarray:
    if not p.q1.is_nondegenerate():
        raise NeedNondegenerateQ1("A1 is singular, T = A1^-1 A2 is undefined")
    return la.matmul(p.field, la.inverse(p.field, p.a1), p.a2)


class PencilTag(str, Enum):
    GENERIC = "Generic"
    REGULAR_NON_GENERIC = "RegularNonGeneric"
    NON_REGULAR = "NonRegular"


@dataclass(frozen=True)
class PencilClass:
    tag: PencilTag
    f: Poly
    disc_square: bool

    @property
    def is_regular(self) -> bool:
        return self.tag != PencilTag.NON_REGULAR

    def to_json(self) -> dict:
        return {"tag": self.tag.value, "f": list(self.f.coeffs), "disc_square": self.disc_square}


def classify(p: Pencil) -> PencilClass:
    F = p.field
    T = self_adjoint_T(p)
    f = pencil_poly(p)
    disc_square = F.is_square(p.q1.disc())
    if f.degree >= p.N - 1 and f.is_squarefree():
        tag = PencilTag.GENERIC
    elif la.minpoly(F, T) == la.charpoly(F, T):
        tag = PencilTag.REGULAR_NON_GENERIC
    else:
        tag = PencilTag.NON_REGULAR
    return PencilClass(tag, f, disc_square)


@dataclass(frozen=True)
class EigenData:
    roots: tuple[tuple[int, int], ...]
    spaces: tuple[Subspace, ...]

    @property
    def r_plus_1(self) -> int:
        return len(self.roots)

    @property
    def alphas(self) -> list[int]:
        return [a for a, _ in self.roots]

    @property
    def mults(self) -> list[int]:
        return [m for _, m in self.roots]

    def eigenvector(self, i: int, T) -> np.ndarray:
        """The (unique up to scale, for regular T) eigenvector in U_i."""
        F = self.spaces[i].field
        n = np.asarray(T).shape[0]
        ker = la.kernel(F, F.vsub(T, la.scalar_matrix(F, n, self.roots[i][0])))
        return ker.basis[0]


def eigendata(F: GF, T, f: Poly, form: QuadraticForm | None = None) -> EigenData:
    roots = f.roots()
    if sum(m for _, m in roots) != f.degree:
        raise NeedsExtension("f does not split over the working field")
    spaces = tuple(la.generalized_eigenspace(F, T, a, m) for a, m in roots)
    for (a, m), U in zip(roots, spaces):
        if U.dim != m:
            raise AssertionError(f"generalized eigenspace for {a} has dim {U.dim}, expected {m}")
    if form is not None:
        for i in range(len(spaces)):
            for j in range(i + 1, len(spaces)):
                if np.any(form.pair(spaces[i].basis, spaces[j].basis)):
                    raise AssertionError("generalized eigenspaces are not orthogonal")
    return EigenData(tuple(roots), spaces)


# -- fixtures ---------------------------------------------------------------


def _powers_mod(f: Poly, count: int) -> list[list[int]]:
    """Coefficient vectors (length deg f) of x^0 .. x^(count-1) modulo f."""
    F = f.field
    N = f.degree
    x = Poly.x(F)
    out, cur = [], Poly(F, (1,))
    for _ in range(count):
        c = list(cur.coeffs) + [0] * (N - len(cur.coeffs))
        out.append(c)
        cur = (cur * x) % f
    return out


def trace_form_fixture(f: Poly, disc_target: int = 1) -> tuple[QuadraticForm, np.ndarray, Subspace]:
    """Form <l, m> = (top coefficient of l*m mod f) / disc_target on k[x]/f.

    Returns the form, multiplication by the class of x (the companion
    matrix, self-adjoint for the form) and the isotropic span of
    1, x, ..., x^(n-1) with n = (deg f - 1) // 2.
    """
    F = f.field
    f = f.monic()
    N = f.degree
    if N < 1:
        raise InvalidInput("fixture polynomial must have positive degree")
    if disc_target == 0:
        raise InvalidInput("disc_target must be nonzero")
    scale = F.inv(disc_target)
    pw = _powers_mod(f, 2 * N)
    gram = np.array([[F.mul(pw[i + j][N - 1], scale) for j in range(N)] for i in range(N)], dtype=np.int64)
    T0 = np.array([pw[j + 1] for j in range(N)], dtype=np.int64).T
    n = (N - 1) // 2
    X0 = Subspace.from_rows(F, np.eye(N, dtype=np.int64)[:n], N)
    return QuadraticForm(F, gram), T0, X0


def trace_form_lagrangian(F: GF, N: int) -> Subspace:
    """span{1, x, ..., x^(N/2 - 1)}, maximal isotropic for the even trace form."""
    return Subspace.from_rows(F, np.eye(N, dtype=np.int64)[: N // 2], N)


class Descent(NamedTuple):
    """Form and operator on a concrete model of v^perp / v.

    ``complement`` holds N-2 rows completing v to a basis of v^perp; the
    coordinates of the descended objects refer to those rows.
    """

    form: QuadraticForm
    T: np.ndarray
    complement: np.ndarray
    v: np.ndarray
    alpha: int

    def lift_vectors(self, coords) -> np.ndarray:
        F = self.form.field
        coords = la.as_matrix(coords, self.complement.shape[0])
        if coords.shape[0] == 0:
            return np.zeros((0, self.complement.shape[1]), dtype=np.int64)
        return F.matmul(coords, self.complement)

    def lift(self, sub: Subspace) -> Subspace:
        """Preimage in v^perp of a subspace of the quotient (contains v)."""
        rows = np.concatenate([self.lift_vectors(sub.basis), self.v[None, :]])
        return Subspace.from_rows(self.form.field, rows, self.complement.shape[1])

    def coordinates(self, vectors) -> np.ndarray:
        """Quotient coordinates of vectors lying in v^perp."""
        F = self.form.field
        vectors = la.as_matrix(vectors, self.complement.shape[1])
        basis = np.concatenate([self.complement, self.v[None, :]]).T
        sol = la.solve(F, basis, vectors.T)
        return np.ascontiguousarray(sol[:-1].T)

    def project(self, sub: Subspace) -> Subspace:
        """Image in the quotient of a subspace contained in v^perp."""
        n = self.complement.shape[0]
        if sub.dim == 0:
            return Subspace.zero(self.form.field, n)
        return Subspace.from_rows(self.form.field, self.coordinates(sub.basis), n)


def restrict_and_descend(form: QuadraticForm, T, v) -> Descent:
    F = form.field
    N = form.dim
    v = np.asarray(v, dtype=np.int64)
    if not np.any(v):
        raise BadReductionVector("zero vector")
    Tv = la.matvec(F, T, v)
    nz = int(np.flatnonzero(v)[0])
    alpha = F.div(int(Tv[nz]), int(v[nz]))
    if not np.array_equal(Tv, F.vmul(v, alpha)):
        raise BadReductionVector("v is not an eigenvector of T")
    if form(v) != 0:
        raise BadReductionVector("v is not isotropic")
    line = Subspace.from_rows(F, v[None, :], N)
    perp = form.orthogonal(line)
    comp = la.complement_rows(F, line, perp)
    basis = np.concatenate([comp, v[None, :]]).T
    images = F.matmul(T, comp.T)
    coords = la.solve(F, basis, images)
    T_bar = np.ascontiguousarray(coords[:-1])
    gram_bar = form.pair(comp, comp)
    return Descent(QuadraticForm(F, gram_bar), T_bar, comp, v, alpha)


def diagonal_pencil(F: GF, c, weights=None) -> Pencil:
    """Q1 = sum a_i x_i^2, Q2 = sum a_i c_i x_i^2 (all a_i = 1 by default)."""
    c = np.asarray(c, dtype=np.int64)
    a = np.ones(len(c), dtype=np.int64) if weights is None else np.asarray(weights, dtype=np.int64)
    return Pencil(F, np.diag(a), np.diag(F.vmul(a, c)))


def embed_subspace(sub: Subspace, emb: Embedding) -> Subspace:
    return Subspace.from_rows(emb.dst, emb(sub.basis), sub.ambient_dim)


def working_pencil(p: Pencil, field: FieldSpec | None = None) -> tuple[Pencil, Embedding]:
    """The pencil over ``field`` (default: the splitting field of f) with the embedding used."""
    spec = p.field.spec
    if field is None:
        _, emb = extend_to_split(spec, pencil_poly(p))
    elif field == spec:
        _, emb = extension(spec, 1)
    else:
        if field.p != spec.p or field.k % spec.k:
            raise FieldMismatch(f"{field} does not contain {spec}")
        target, emb = extension(spec, field.k // spec.k)
        if target != field:
            raise FieldMismatch(f"only the standard model {target} of the extension is supported")
    if emb.is_identity:
        return p, emb
    return p.embed(emb), emb


# -- isotropic subspaces of a single form --------------------------------------


def first_isotropic_vector(form: QuadraticForm) -> np.ndarray | None:
    """The nonzero isotropic vector of smallest point key, or None if anisotropic.

    Normalized vectors are scanned by leading position, so a short search
    suffices whenever the form has an isotropic line.
    """
    F = form.field
    N = form.dim
    for lead in range(N - 1, -1, -1):
        tail = N - 1 - lead
        total = F.q**tail
        for start in range(0, total, 1 << 16):
            idx = np.arange(start, min(total, start + (1 << 16)), dtype=np.int64)
            v = np.zeros((idx.size, N), dtype=np.int64)
            v[:, lead] = 1
            for j in range(N - 1, lead, -1):
                v[:, j] = idx % F.q
                idx = idx // F.q
            vals = F.rowdot(F.matmul(v, form.gram), v)
            hit = np.flatnonzero(vals == 0)
            if hit.size:
                return v[hit[0]]
    return None


def maximal_isotropic(form: QuadraticForm) -> Subspace:
    """A deterministic maximal isotropic subspace of a nondegenerate form.

    Repeatedly splits off a hyperbolic plane spanned by the first
    isotropic vector and a partner, then continues inside the orthogonal
    complement of that plane.
    """
    F = form.field
    N = form.dim
    rows = np.eye(N, dtype=np.int64)  # basis of the current complement
    found: list[np.ndarray] = []
    while rows.shape[0] >= 2:
        sub = form.restricted(rows)
        c = first_isotropic_vector(sub)
        if c is None:
            break
        v = F.matmul(c[None, :], rows)[0]
        pair_v = form.pair(v[None, :], rows)[0]
        j = int(np.flatnonzero(pair_v)[0])
        w = rows[j]
        # w' = w - Q(w)/(2 b(v, w)) v is isotropic and pairs nontrivially with v
        coef = F.div(form(w), F.mul(2, form.b(v, w)))
        w = F.vsub(w, F.vmul(v, coef))
        found.append(v)
        plane = Subspace.from_rows(F, np.stack([v, w]), N)
        perp = form.orthogonal(plane)
        span_rows = Subspace.from_rows(F, rows, N)
        rows = (perp & span_rows).basis
    if not found:
        return Subspace.zero(F, N)
    return Subspace.from_rows(F, np.stack(found), N)


def ruling_parity(Y: Subspace, reference: Subspace) -> int:
    """0 when Y and the reference lie in the same ruling (even intersection codimension)."""
    return (Y.dim - (Y & reference).dim) % 2
