"""Maximal common isotropic subspaces of a pencil, found by pruned search.

The base locus is scanned once per pencil (see :mod:`pencil_lab._kernels`);
subspaces are then grown point by point, keeping only base-locus points
orthogonal to everything chosen so far for both forms.  Results are sets
of canonical :class:`~pencil_lab.linalg.Subspace` values, so two
enumerations can be compared with ``==``.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from . import _kernels
from . import linalg as la
from .errors import InvalidInput, NotGeneric, NotRegular, ReducibleCurve, ShapeError
from .gf import FieldSpec, GF, extend_for_sqrts, get_field
from .linalg import Subspace
from .quadrics import (
    EigenData,
    Pencil,
    PencilTag,
    QuadraticForm,
    classify,
    eigendata,
    maximal_isotropic,
    pencil_poly,
    restrict_and_descend,
    ruling_parity,
    self_adjoint_T,
    working_pencil,
)

# -- base locus ----------------------------------------------------------------


class BaseLocus(NamedTuple):
    """Normalized points of Q1 = Q2 = 0 with their images under both Grams."""

    points: np.ndarray
    img1: np.ndarray
    img2: np.ndarray


_LOCUS_CACHE: "OrderedDict[tuple, BaseLocus]" = OrderedDict()
_LOCUS_CACHE_SIZE = 16


def base_locus(p: Pencil) -> BaseLocus:
    """All F_q-points of the base locus, sorted by point key (cached per pencil)."""
    key = (p.field.spec, p.a1.tobytes(), p.a2.tobytes(), p.N)
    hit = _LOCUS_CACHE.get(key)
    if hit is not None:
        _LOCUS_CACHE.move_to_end(key)
        return hit
    F = p.field
    pts = _kernels.base_locus_scan(F, p.a1, p.a2)
    locus = BaseLocus(pts, F.matmul(pts, p.a1), F.matmul(pts, p.a2))
    for arr in locus:
        arr.setflags(write=False)
    _LOCUS_CACHE[key] = locus
    if len(_LOCUS_CACHE) > _LOCUS_CACHE_SIZE:
        _LOCUS_CACHE.popitem(last=False)
    return locus


def _grow(F: GF, locus: BaseLocus, dim: int, seed: Subspace, cand: np.ndarray, out: set) -> None:
    """Add to ``out`` every dim-subspace through ``seed`` spanned by points in ``cand``.

    Each extension X + <w> is explored once per parent: after exploring
    it, the points of X + <w> are dropped from the remaining candidates,
    since any larger space containing one of them also contains X + <w>.
    """
    if seed.dim == dim:
        out.add(seed)
        return
    remaining = cand
    while remaining.size:
        w = int(remaining[0])
        child = Subspace.from_rows(F, np.concatenate([seed.basis, locus.points[w][None, :]]), seed.ambient_dim)
        rest = remaining[1:]
        if child.dim < dim and rest.size:
            keep = _kernels.orth_mask(F, locus.img1[rest], locus.img2[rest], locus.points[w])
            nxt = rest[keep]
            if nxt.size:
                nxt = nxt[np.any(child.reduce(locus.points[nxt]), axis=1)]
        else:
            nxt = rest[:0]
        if child.dim == dim or nxt.size >= dim - child.dim:
            _grow(F, locus, dim, child, nxt, out)
        if rest.size:
            rest = rest[np.any(child.reduce(locus.points[rest]), axis=1)]
        remaining = rest


def enumerate_common_isotropic(p: Pencil, dim: int, field: FieldSpec | None = None) -> set[Subspace]:
    """Every dim-dimensional subspace isotropic for both forms of the pencil.

    ``field`` selects the working field; by default the pencil's own.
    Subspaces live over the working field.
    """
    if field is not None and field != p.field.spec:
        p, _ = working_pencil(p, field)
    F = p.field
    N = p.N
    if dim < 0 or 2 * dim > N:
        raise ShapeError(f"isotropic subspaces of F^{N} have dimension at most {N // 2}")
    if dim == 0:
        return {Subspace.zero(F, N)}
    locus = base_locus(p)
    out: set[Subspace] = set()
    _grow(F, locus, dim, Subspace.zero(F, N), np.arange(locus.points.shape[0]), out)
    return out


def enumerate_common_isotropic_naive(p: Pencil, dim: int) -> set[Subspace]:
    """Reference oracle: filter the whole Grassmannian (tiny cases only)."""
    F = p.field
    out = set()
    for X in la.grassmannian_iter(p.N, dim, F):
        if p.q1.is_isotropic(X) and p.q2.is_isotropic(X):
            out.add(X)
    return out


# -- the explicit construction for diagonal odd pencils --------------------


def elkies_kernel(F: GF, c: Iterable[int]) -> np.ndarray:
    """The vector D spanning the kernel of the power-sum rows sum_i D_i c_i^j, j < N-1."""
    c = [int(x) for x in c]
    N = len(c)
    rows = np.array([[F.pow(ci, j) for ci in c] for j in range(N - 1)], dtype=np.int64)
    ker = la.kernel(F, rows)
    if ker.dim != 1:
        raise NotGeneric("power-sum system does not have a 1-dimensional kernel")
    return ker.basis[0].copy()


def elkies_enumerate(c: Iterable[int], field: FieldSpec, weights: Iterable[int] | None = None) -> set[Subspace]:
    """Maximal common isotropic subspaces of sum a_i x_i^2, sum a_i c_i x_i^2 from square roots.

    With D the power-sum kernel and d_i^2 = D_i / a_i (a_i = 1 by
    default), each sign system gives the subspace {(d_i P(c_i))_i : deg P < n}.
    The result lives over the smallest extension of ``field`` in which
    the ratios D_i / a_i fall into a single square class.
    """
    F = get_field(field)
    c = [int(x) for x in c]
    N = len(c)
    if N % 2 == 0 or N < 3:
        raise ShapeError("the explicit construction needs an odd number of variables")
    if len(set(c)) != N:
        raise NotGeneric("the c_i must be distinct")
    a = [1] * N if weights is None else [int(x) for x in weights]
    if len(a) != N or any(x == 0 for x in a):
        raise ShapeError("weights must be N nonzero entries")
    D = elkies_kernel(F, c)
    if np.any(D == 0):  # pragma: no cover - impossible for distinct c_i
        raise AssertionError("zero entry in the power-sum kernel")
    D = np.array([F.div(int(d), ai) for d, ai in zip(D, a)], dtype=np.int64)
    # rescaling D rescales every d_i alike; normalize so one square class means rational
    D = F.vmul(D, F.inv(int(D[0])))
    spec2, emb = extend_for_sqrts(field, D.tolist())
    E = get_field(spec2)
    Dx, cx = emb(D), emb(np.array(c, dtype=np.int64))
    d = np.array([E.sqrt(int(x)) for x in Dx], dtype=np.int64)
    n = (N - 1) // 2
    powers = np.array([[E.pow(int(ci), j) for ci in cx] for j in range(n)], dtype=np.int64)
    out = set()
    # fixing the first sign loses nothing: -X = X
    for mask in range(1 << (N - 1)):
        signs = np.array([1] + [-1 if (mask >> i) & 1 else 1 for i in range(N - 1)])
        ds = np.where(signs < 0, E.vneg(d), d)
        out.add(Subspace.from_rows(E, E.vmul(powers, ds[None, :]), N))
    return out


# -- T-stable parts and profiles ---------------------------------------------


def t_stable_dim(F: GF, T, W: Subspace) -> int:
    """Dimension of the largest T-stable subspace of W."""
    return t_stable_part(F, T, W).dim


def t_stable_part(F: GF, T, W: Subspace) -> Subspace:
    cur = W
    while cur.dim:
        nxt = cur & cur.preimage(T)
        if nxt.dim == cur.dim:
            return cur
        cur = nxt
    return cur


@dataclass(frozen=True, order=True)
class ProfileKey:
    """Per-root T-stable dimensions together with the root multiplicities."""

    dims: tuple[int, ...]
    mults: tuple[int, ...] = field(compare=False)

    @property
    def a(self) -> int:
        return sum(1 for d, m in zip(self.dims, self.mults) if 2 * d == m)

    @property
    def total(self) -> int:
        return sum(self.dims)

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.dims)) + ")"


@dataclass(frozen=True)
class FanoPoint:
    x: Subspace
    profile: ProfileKey
    span_xtx: Subspace | None = None


@dataclass(frozen=True)
class SignedFano:
    """An element of F (sign +1) or of its inverted copy F' (sign -1)."""

    x: Subspace
    sign: int = 1

    def __post_init__(self) -> None:
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    def __neg__(self) -> "SignedFano":
        return SignedFano(self.x, -self.sign)


def profile(F: GF, T, ed: EigenData, X: Subspace) -> ProfileKey:
    dims = tuple(t_stable_dim(F, T, X & U) for U in ed.spaces)
    return ProfileKey(dims, tuple(ed.mults))


class OddSetup(NamedTuple):
    pencil: Pencil
    T: np.ndarray
    ed: EigenData


def regular_setup(p: Pencil, field: FieldSpec | None = None) -> OddSetup:
    """Pencil over the working field with its operator and eigendata; rejects non-regular pencils."""
    cls = classify(p)
    if cls.tag == PencilTag.NON_REGULAR:
        raise NotRegular("T has a repeated eigenvalue with a 2-dimensional eigenspace")
    wp, _ = working_pencil(p, field)
    T = self_adjoint_T(wp)
    ed = eigendata(wp.field, T, pencil_poly(wp).monic(), wp.q1)
    return OddSetup(wp, T, ed)


def partition_by_profile(p: Pencil, field: FieldSpec | None = None) -> dict[ProfileKey, set[FanoPoint]]:
    """Split the n-dimensional common isotropic subspaces of an odd regular pencil by profile."""
    if not p.is_odd:
        raise ShapeError("profile classes of this kind are defined for odd N")
    setup = regular_setup(p, field)
    F = setup.pencil.field
    out: dict[ProfileKey, set[FanoPoint]] = {}
    for X in enumerate_common_isotropic(setup.pencil, setup.pencil.n):
        key = profile(F, setup.T, setup.ed, X)
        out.setdefault(key, set()).add(FanoPoint(X, key))
    return dict(sorted(out.items()))


def expected_odd_class_size(key: ProfileKey) -> int:
    r = len(key.mults) - 1
    return 2**r // 2**key.a


def expected_even_class_size(key: ProfileKey, signed: bool = False) -> int:
    """Distinct X in a starred class: 2^r / 2^a.  Counting X and -X separately doubles it."""
    r = len(key.mults) - 1
    size = 2**r // 2**key.a
    return 2 * size if signed else size


# -- even dimension ------------------------------------------------------------


def geometric_genus(mults: Iterable[int]) -> int:
    """Genus of the normalized curve: (number of odd multiplicities)/2 - 1."""
    return sum(1 for m in mults if m % 2) // 2 - 1


def singular_points(F: GF, T, ed: EigenData) -> list[np.ndarray]:
    """Eigenvectors of roots with multiplicity >= 2: the singular points of the base locus."""
    return [ed.eigenvector(i, T) for i, m in enumerate(ed.mults) if m >= 2]


class EvenFanoSets(NamedTuple):
    F0: frozenset
    F: frozenset
    Fprime: frozenset
    singular: tuple


def even_fano_sets(p: Pencil, field: FieldSpec | None = None, strict: bool = True) -> EvenFanoSets:
    """F0, the open part F and its signed copy F' for an even regular pencil.

    F keeps X when Span{X, TX} has no nonzero T-stable subspace.  When the
    curve is not reducible the two singular-point descriptions of F are
    checked to agree; ``strict`` makes the reducible case an error.
    """
    if p.is_odd:
        raise ShapeError("even_fano_sets needs even N")
    setup = regular_setup(p, field)
    wp, T, ed = setup
    F = wp.field
    reducible = geometric_genus(ed.mults) < 0
    if reducible and strict:
        raise ReducibleCurve("every root has even multiplicity")
    F0 = enumerate_common_isotropic(wp, wp.n)
    Fset = {X for X in F0 if t_stable_dim(F, T, X + X.image(T)) == 0}
    sing = singular_points(F, T, ed)
    if not reducible:
        by_points = {X for X in F0 if not any(X.contains(v) for v in sing)}
        by_perp = {X for X in F0 if not any(not np.any(wp.q1.pair(X.basis, v[None, :])) for v in sing)}
        if not (Fset == by_points == by_perp):
            raise AssertionError("the descriptions of the open Fano set disagree")
    fprime = frozenset(SignedFano(X, -1) for X in Fset)
    return EvenFanoSets(frozenset(F0), frozenset(Fset), fprime, tuple(sing))


def contains_pn(p: Pencil, field: FieldSpec | None = None) -> Subspace | None:
    """The (n+1)-dimensional common isotropic subspace of an even pencil, if any.

    Follows the reduction argument: while some root is repeated, pass to
    v-perp / v at its eigenvector (the subspace must contain v).  A linear
    space survives only if nothing is left at the end, i.e. every
    multiplicity was even; it is then lifted back.
    """
    if p.is_odd:
        raise ShapeError("contains_pn concerns even N")
    wp, _ = working_pencil(p, field)
    T = self_adjoint_T(wp)
    found = _pn_recursive(wp.q1, T)
    if found is not None:
        if not (wp.q1.is_isotropic(found) and wp.q2.is_isotropic(found)):  # pragma: no cover
            raise AssertionError("lifted subspace is not isotropic")
    return found


def _pn_recursive(form: QuadraticForm, T) -> Subspace | None:
    F = form.field
    N = form.dim
    if N == 0:
        return Subspace.zero(F, 0)
    f = la.charpoly(F, T)
    roots = f.roots()
    for alpha, m in roots:
        if m >= 2:
            v = la.kernel(F, F.vsub(T, la.scalar_matrix(F, N, alpha))).basis[0]
            desc = restrict_and_descend(form, T, v)
            inner = _pn_recursive(desc.form, desc.T)
            if inner is None:
                return None
            return desc.lift(inner)
    return None


def contains_pn_bruteforce(p: Pencil, field: FieldSpec | None = None) -> Subspace | None:
    wp, _ = working_pencil(p, field)
    found = enumerate_common_isotropic(wp, wp.N // 2)
    if len(found) > 1:
        raise AssertionError(f"{len(found)} maximal linear spaces in the base locus")
    return next(iter(found), None)


@dataclass
class EvenProfileSets:
    """Starred classes (both rulings), the same split by ruling, and the excluded T-stable spans.

    ``by_ruling`` is empty when Q1 is not split: its rulings are then
    swapped by Frobenius and carry no rational label.
    """

    starred: dict[ProfileKey, set[FanoPoint]]
    by_ruling: dict[int, dict[ProfileKey, set[FanoPoint]]]
    excluded: dict[ProfileKey, set[FanoPoint]]

    @property
    def rulings_rational(self) -> bool:
        return bool(self.by_ruling)


def even_starred_candidates(wp: Pencil, T) -> list[tuple[Subspace, Subspace]]:
    """Pairs (X, Span{X,TX}) with the span isotropic of dimension n+1."""
    out = []
    for X in enumerate_common_isotropic(wp, wp.n):
        S = X + X.image(T)
        if S.dim == wp.n + 1 and wp.q1.is_isotropic(S):
            out.append((X, S))
    return out


def even_profile_sets(
    p: Pencil,
    field: FieldSpec | None = None,
    reference: Subspace | None = None,
) -> EvenProfileSets:
    """Classes of X with Span{X,TX} isotropic of dimension n+1, by the span's profile.

    Spans are labeled by ruling relative to ``reference`` (a maximal
    isotropic subspace of Q1 over the working field; a deterministic one
    is chosen when omitted, and labels are skipped if Q1 is not split).
    """
    if p.is_odd:
        raise ShapeError("even_profile_sets needs even N")
    wp, T, ed = regular_setup(p, field)
    F = wp.field
    if reference is None:
        reference = maximal_isotropic(wp.q1)
    elif reference.dim != wp.N // 2:
        raise InvalidInput("reference must be a maximal isotropic subspace of Q1")
    split = reference.dim == wp.N // 2
    starred: dict[ProfileKey, set[FanoPoint]] = {}
    by_ruling: dict[int, dict[ProfileKey, set[FanoPoint]]] = {0: {}, 1: {}} if split else {}
    excluded: dict[ProfileKey, set[FanoPoint]] = {}
    for X, S in even_starred_candidates(wp, T):
        key = profile(F, T, ed, S)
        pt = FanoPoint(X, key, S)
        if key.total >= wp.n + 1:
            excluded.setdefault(key, set()).add(pt)
            continue
        starred.setdefault(key, set()).add(pt)
        if split:
            by_ruling[ruling_parity(S, reference)].setdefault(key, set()).add(pt)
    return EvenProfileSets(dict(sorted(starred.items())), by_ruling, dict(sorted(excluded.items())))
