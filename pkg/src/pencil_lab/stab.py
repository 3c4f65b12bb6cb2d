"""The finite stabilizer of T in PO / PSO, built from idempotents of k[T].

For a subset I of the roots, g_I = 1 - 2 sum_{i in I} e_i(T), where e_i is
the idempotent of k[x]/f(x) that is 1 modulo (x - alpha_i)^{m_i} and 0
modulo the other prime-power factors.  When m_i = 1 this is the familiar
h_i(T)/h_i(alpha_i) with h_i = f/(x - alpha_i); for m_i >= 2 the plain
ratio h_i(T)/h_i(alpha_i) is not idempotent, so g_I would fail to square
to the identity (see :func:`naive_reflection`).

Elements are stored projectively: g_I and g_{I^c} = -g_I are one element.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Iterable

import numpy as np

from . import linalg as la
from .errors import ActionNotClosed, ShapeError
from .gf import GF
from .linalg import Subspace
from .poly import Poly
from .quadrics import EigenData, QuadraticForm


class Flavor(str, Enum):
    PO = "PO"
    PSO = "PSO"


def _cofactor(f: Poly, alpha: int, m: int) -> Poly:
    F = f.field
    lin = Poly(F, (F.neg(alpha), 1)) ** m
    h, rem = divmod(f, lin)
    if not rem.is_zero():  # pragma: no cover - alpha is a root of multiplicity m
        raise AssertionError("root multiplicity does not divide f")
    return h


def _inverse_mod(a: Poly, mod: Poly) -> Poly:
    """Inverse of a modulo mod via the extended Euclidean algorithm."""
    F = a.field
    r0, r1 = mod, a % mod
    s0, s1 = Poly(F), Poly(F, (1,))
    while not r1.is_zero():
        quo, rem = divmod(r0, r1)
        r0, r1 = r1, rem
        s0, s1 = s1, s0 - quo * s1
    if r0.degree != 0:
        raise ArithmeticError("polynomial is not invertible modulo the given modulus")
    return (s0 * Poly(F, (F.inv(r0.lead()),))) % mod


def idempotent(f: Poly, alpha: int, m: int) -> Poly:
    """e with e = 1 mod (x-alpha)^m and e = 0 mod f/(x-alpha)^m."""
    F = f.field
    h = _cofactor(f, alpha, m)
    local = Poly(F, (F.neg(alpha), 1)) ** m
    return (h * _inverse_mod(h, local)) % f


def naive_reflection(F: GF, T, f: Poly, alpha: int, m: int) -> np.ndarray:
    """1 - 2 h(T)/h(alpha) with h = f/(x-alpha)^m, the ratio form of the generator."""
    h = _cofactor(f, alpha, m)
    N = np.asarray(T).shape[0]
    hT = la.poly_at_matrix(h, T)
    scaled = F.vmul(hT, F.inv(h(alpha)))
    return F.vsub(la.identity(F, N), F.vmul(scaled, 2))


def _canonical_sign(F: GF, mat: np.ndarray) -> np.ndarray:
    """Choose between mat and -mat: the one whose first nonzero entry has the smaller digits."""
    flat = mat.ravel()
    first = int(flat[np.flatnonzero(flat)[0]])
    if F.lex_key(F.neg(first)) < F.lex_key(first):
        return F.vneg(mat)
    return mat


@dataclass(frozen=True)
class StabElement:
    index_set: frozenset
    mat: np.ndarray
    det_one: bool

    @property
    def parity_ok(self) -> bool:
        return self.det_one

    def key(self) -> bytes:
        return self.mat.tobytes()

    def __repr__(self) -> str:
        return f"StabElement(I={sorted(self.index_set)})"


@dataclass
class StabGroup:
    field: GF
    flavor: Flavor
    elements: list[StabElement]
    roots: int

    def __len__(self) -> int:
        return len(self.elements)

    def element(self, index_set: Iterable[int]) -> StabElement:
        """The element for I (or its complement, which is the same projectively)."""
        I = frozenset(index_set)
        comp = frozenset(range(self.roots)) - I
        for g in self.elements:
            if g.index_set in (I, comp):
                return g
        raise KeyError(f"no element for {sorted(I)} in this group")

    def identity(self) -> StabElement:
        return self.element(())

    def product(self, g: StabElement, h: StabElement) -> StabElement:
        """Matrix product, returned as the stored canonical element."""
        F = self.field
        prod = _canonical_sign(F, F.matmul(g.mat, h.mat))
        for e in self.elements:
            if np.array_equal(e.mat, prod):
                return e
        raise ActionNotClosed("product left the group")


def build_stab(T, ed: EigenData, Q: QuadraticForm, flavor: Flavor | str = Flavor.PO) -> StabGroup:
    """All g_I for subsets I of the roots, up to sign, checked orthogonal and commuting with T."""
    flavor = Flavor(flavor)
    F = Q.field
    N = Q.dim
    f = Poly.from_roots(F, [a for a, m in ed.roots for _ in range(m)])
    if f.degree != N:
        raise ShapeError("eigendata does not account for every dimension")
    idem = [la.poly_at_matrix(idempotent(f, a, m), T) for a, m in ed.roots]
    r1 = len(ed.roots)
    I_N = la.identity(F, N)
    elements: list[StabElement] = []
    seen: set[bytes] = set()
    for size in range(r1 + 1):
        for I in combinations(range(r1), size):
            proj = np.zeros((N, N), dtype=np.int64)
            for i in I:
                proj = F.vadd(proj, idem[i])
            g = F.vsub(I_N, F.vmul(proj, 2))
            det_one = sum(ed.mults[i] for i in I) % 2 == 0
            if flavor is Flavor.PSO and not det_one:
                continue
            _check_element(F, g, T, Q, det_one)
            canon = _canonical_sign(F, g)
            canon.setflags(write=False)
            if canon.tobytes() in seen:
                continue
            seen.add(canon.tobytes())
            elements.append(StabElement(frozenset(I), canon, det_one))
    return StabGroup(F, flavor, elements, r1)


def _check_element(F: GF, g, T, Q: QuadraticForm, det_one: bool) -> None:
    gt = la.transpose(g)
    if not np.array_equal(F.matmul(F.matmul(gt, Q.gram), g), Q.gram):
        raise AssertionError("stabilizer element is not orthogonal")
    if not np.array_equal(F.matmul(g, T), F.matmul(T, g)):
        raise AssertionError("stabilizer element does not commute with T")
    if not np.array_equal(F.matmul(g, g), la.identity(F, Q.dim)):
        raise AssertionError("stabilizer element is not an involution")
    if (la.det(F, g) == 1) != det_one:
        raise AssertionError("determinant does not match the multiplicity parity")


def act(g: StabElement | np.ndarray, X: Subspace) -> Subspace:
    mat = g.mat if isinstance(g, StabElement) else g
    return X.image(mat)


@dataclass
class OrbitReport:
    orbits: list[list[Subspace]]
    stabilizer_orders: dict[Subspace, int]

    @property
    def simply_transitive(self) -> bool:
        return len(self.orbits) <= 1 and all(v == 1 for v in self.stabilizer_orders.values())

    def to_json(self) -> dict:
        return {
            "orbit_sizes": [len(o) for o in self.orbits],
            "stabilizer_orders": sorted(set(self.stabilizer_orders.values())),
        }


def orbit_report(G: StabGroup, S: Iterable[Subspace]) -> OrbitReport:
    S = set(S)
    images: dict[Subspace, list[Subspace]] = {}
    for X in S:
        imgs = [act(g, X) for g in G.elements]
        for Y in imgs:
            if Y not in S:
                raise ActionNotClosed(f"{X} is sent outside the set")
        images[X] = imgs
    orbits: list[list[Subspace]] = []
    done: set[Subspace] = set()
    for X in sorted(S):
        if X in done:
            continue
        orbit = sorted(set(images[X]))
        done.update(orbit)
        orbits.append(orbit)
    stab = {X: sum(1 for Y in images[X] if Y == X) for X in S}
    return OrbitReport(orbits, stab)
