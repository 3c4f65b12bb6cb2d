"""Residual-intersection involutions and the divisor action on F and F'.

A rational point c of the hyperelliptic curve is a member Q_lambda of
the pencil together with one of its two rulings (or, at a simple root of
f, a Weierstrass point with no ruling choice).  For X in the Fano set F
there is a unique maximal isotropic Y of Q_lambda through X in that
ruling, and Y meets the base locus in X and one more n-dimensional space
X'.  The involution tau(c) sends X to X'.  Single points act on the
signed set F u F' by

    X + (c) = -tau(c_bar) X,        -X + (c) = tau(c) X,

and everything else here (divisors, two-torsion lifts, the comparison
with the matrix stabilizer) is built on that rule.

Everything is finite: tau(c) is cached as a permutation of an indexed
copy of F, so divisor actions are compositions of integer arrays.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from . import linalg as la
from .errors import (
    ActionNotClosed,
    ConeOnX,
    DegenerateSpan,
    InvalidInput,
    NoBasePoint,
    ReducibleCurve,
    ShapeError,
)
from .fano import SignedFano, enumerate_common_isotropic, even_fano_sets, geometric_genus, t_stable_dim
from .gf import FieldSpec, GF
from .linalg import Subspace
from .quadrics import (
    EigenData,
    Pencil,
    QuadraticForm,
    eigendata,
    maximal_isotropic,
    pencil_poly,
    ruling_parity,
    self_adjoint_T,
    working_pencil,
)
from .stab import Flavor, StabGroup, build_stab

__all__ = [
    "CurvePoint",
    "Divisor",
    "SignedFano",
    "RulingLabeler",
    "TorsorModel",
    "SAMPLE_CAP",
    "SAMPLE_SEED",
]

# Sets at most this large are checked exhaustively; larger ones are sampled.
SAMPLE_CAP = 64
SAMPLE_SEED = 0
DEFAULT_SAMPLES = 200


@dataclass(frozen=True)
class CurvePoint:
    """A rational point of the curve: lambda (None = infinity) plus a ruling bit, or a Weierstrass point."""

    lam: int | None
    label: int | None = None

    @property
    def is_weierstrass(self) -> bool:
        return self.label is None

    def bar(self) -> "CurvePoint":
        """Hyperelliptic conjugate: flips the ruling, fixes Weierstrass points."""
        if self.label is None:
            return self
        return CurvePoint(self.lam, 1 - self.label)

    def sort_key(self) -> tuple:
        return (-1 if self.lam is None else self.lam, -1 if self.label is None else self.label)

    def __str__(self) -> str:
        where = "inf" if self.lam is None else str(self.lam)
        return f"W({where})" if self.label is None else f"({where},{self.label})"


@dataclass(frozen=True)
class Divisor:
    terms: tuple[tuple[CurvePoint, int], ...] = ()

    @classmethod
    def of(cls, *points: CurvePoint) -> "Divisor":
        return cls(tuple((c, 1) for c in points))

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.terms)

    def __add__(self, other: "Divisor") -> "Divisor":
        return Divisor(self.terms + other.terms)

    def __neg__(self) -> "Divisor":
        return Divisor(tuple((c, -m) for c, m in self.terms))

    def __sub__(self, other: "Divisor") -> "Divisor":
        return self + (-other)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for c, m in self.terms:
            sign = "-" if m < 0 else "+"
            coeff = "" if abs(m) == 1 else str(abs(m))
            parts.append(f"{sign} {coeff}{c}")
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]


@dataclass
class RulingLabeler:
    """Reference maximal isotropics, one per split smooth member; labels are parities against them."""

    pencil: Pencil
    refs: dict = field(default_factory=dict)

    def reference(self, lam: int | None) -> Subspace | None:
        """Y_ref(lam), or None if Q_lam has no rational rulings."""
        if lam not in self.refs:
            form = self.pencil.member(lam)
            Y = maximal_isotropic(form) if form.is_nondegenerate() else None
            self.refs[lam] = Y if Y is not None and 2 * Y.dim == form.dim else None
        return self.refs[lam]

    def label(self, Y: Subspace, lam: int | None) -> int:
        ref = self.reference(lam)
        if ref is None:
            raise InvalidInput(f"member {lam} has no rational rulings")
        return ruling_parity(Y, ref)


def _canonical_lambdas(F: GF) -> list[int | None]:
    return [None] + list(range(F.q))


class TorsorModel:
    """An even regular pencil with p_g >= 0, its Fano set F and the tau involutions.

    ``field`` selects the working field (the splitting field of f when
    omitted).  Curve points are the rational ones over that field.
    """

    def __init__(self, p: Pencil, field: FieldSpec | None = None) -> None:
        if p.is_odd:
            raise ShapeError("the divisor action is defined for even N")
        wp, _ = working_pencil(p, field)
        self.pencil = wp
        self.field: GF = wp.field
        self.N = wp.N
        self.n = wp.n
        self.T = self_adjoint_T(wp)
        self.f = pencil_poly(wp).monic()
        self.ed: EigenData = eigendata(self.field, self.T, self.f, wp.q1)
        if geometric_genus(self.ed.mults) < 0:
            raise ReducibleCurve("every root has even multiplicity; there is no group law to model")
        self.labeler = RulingLabeler(wp)
        if all(m == 1 for m in self.ed.mults):
            fano = sorted(enumerate_common_isotropic(wp, self.n))
        else:
            fano = sorted(even_fano_sets(wp).F)
        self.fano: list[Subspace] = fano
        self.index = {X: i for i, X in enumerate(fano)}
        self._root_of = {a: i for i, (a, _) in enumerate(self.ed.roots)}
        self._aux = self._auxiliary_parameters()
        self._perm: dict[CurvePoint, np.ndarray] = {}

    # -- curve points ----------------------------------------------------

    def _auxiliary_parameters(self) -> list[int | None]:
        """Members used for residual intersection, smooth ones first, in canonical order."""
        lams = _canonical_lambdas(self.field)
        smooth = [lam for lam in lams if lam is None or lam not in self._root_of]
        return smooth + [lam for lam in lams if lam not in smooth]

    def auxiliary_for(self, lam: int | None) -> int | None:
        return next(mu for mu in self._aux if mu != lam)

    def root_multiplicity(self, lam: int | None) -> int:
        if lam is None:
            return 0
        i = self._root_of.get(lam)
        return 0 if i is None else self.ed.mults[i]

    def curve_points(self) -> list[CurvePoint]:
        """Rational smooth points: split smooth members with both labels, then simple-root Weierstrass points."""
        out: list[CurvePoint] = []
        for lam in _canonical_lambdas(self.field):
            m = self.root_multiplicity(lam)
            if m == 0 and self.labeler.reference(lam) is not None:
                out.extend([CurvePoint(lam, 0), CurvePoint(lam, 1)])
            elif m == 1:
                out.append(CurvePoint(lam))
        return out

    def weierstrass_points(self) -> list[CurvePoint]:
        return [CurvePoint(a) for a, m in self.ed.roots if m == 1]

    def cone_vector(self, lam: int) -> np.ndarray:
        if self.root_multiplicity(lam) == 0:
            raise InvalidInput(f"{lam} is not a root of f")
        return self.ed.eigenvector(self._root_of[lam], self.T)

    # -- geometry ----------------------------------------------------------

    def maximal_isotropics_containing(self, X: Subspace, lam: int | None) -> list[Subspace]:
        """Every (n+1)-dimensional isotropic subspace of Q_lam through X."""
        F = self.field
        form = self.pencil.member(lam)
        perp = form.orthogonal(X)
        comp = la.complement_rows(F, X, perp)
        if comp.shape[0] == 0:
            return []
        pts = la.projective_points(F, Subspace.from_rows(F, comp, self.N))
        vals = F.rowdot(F.matmul(pts, form.gram), pts)
        found = {X + Subspace.from_rows(F, u[None, :], self.N) for u in pts[vals == 0]}
        return sorted(found)

    def _span_for(self, c: CurvePoint, X: Subspace) -> Subspace:
        Ys = self.maximal_isotropics_containing(X, c.lam)
        if c.is_weierstrass:
            v = self.cone_vector(c.lam)
            Ys = [Y for Y in Ys if Y.contains(v)]
            if len(Ys) != 1:
                raise DegenerateSpan(f"expected one span through the cone point, found {len(Ys)}")
            return Ys[0]
        chosen = [Y for Y in Ys if self.labeler.label(Y, c.lam) == c.label]
        if len(chosen) != 1:
            raise DegenerateSpan(f"{len(chosen)} spans of label {c.label} through X on member {c.lam}")
        return chosen[0]

    def reflect(self, form: QuadraticForm, p: np.ndarray, X: Subspace) -> Subspace:
        """refl_p(X) with refl_p(v) = v - 2 b(v,p)/b(p,p) p."""
        F = self.field
        scale = F.div(2, form(p))
        coeff = F.vmul(form.pair(X.basis, p[None, :])[:, 0], scale)
        moved = F.vsub(X.basis, F.vmul(coeff[:, None], p[None, :]))
        return Subspace.from_rows(F, moved, self.N)

    def reflection_vector(self, Y: Subspace, X: Subspace, form: QuadraticForm) -> np.ndarray:
        """Some p in Y outside X with b(p,p) != 0 for ``form``."""
        F = self.field
        u = la.complement_rows(F, X, Y)[0]
        if form(u) != 0:
            return u
        for x in X.basis:
            if form.b(u, x) != 0:
                # Q(u + x) = 2 b(u, x) since u and x are isotropic
                return F.vadd(u, x)
        raise DegenerateSpan("the span lies in the base locus")

    def tau(self, c: CurvePoint, X: Subspace, mu: int | None = None) -> Subspace:
        """The residual n-plane of the span through X selected by c."""
        if c.lam is not None and self.root_multiplicity(c.lam) >= 2:
            raise InvalidInput(f"{c} sits over a singular point of the curve")
        Y = self._span_for(c, X)
        aux = self.pencil.member(self.auxiliary_for(c.lam) if mu is None else mu)
        return self.reflect(aux, self.reflection_vector(Y, X, aux), X)

    def tau_all_choices(self, c: CurvePoint, X: Subspace) -> set[Subspace]:
        """tau(c, X) over every auxiliary member and every admissible p (a single element if well defined)."""
        F = self.field
        Y = self._span_for(c, X)
        pts = la.projective_points(F, Y)
        out: set[Subspace] = set()
        for mu in _canonical_lambdas(F):
            if mu == c.lam:
                continue
            aux = self.pencil.member(mu)
            for p in pts:
                if not X.contains(p) and aux(p) != 0:
                    out.add(self.reflect(aux, p, X))
        return out

    def tau_weierstrass(self, root_index: int, X: Subspace) -> Subspace:
        """Image of X under the map fixing H = v-perp and negating the cone vector v."""
        alpha, m = self.ed.roots[root_index]
        if m != 1:
            raise InvalidInput("Weierstrass involutions are attached to simple roots")
        v = self.cone_vector(alpha)
        if X.contains(v):
            raise ConeOnX("the cone point lies on X")
        return self.reflect(self.pencil.q1, v, X)

    def hyperplane(self, root_index: int) -> Subspace:
        v = self.ed.eigenvector(root_index, self.T)
        return self.pencil.q1.orthogonal(Subspace.from_rows(self.field, v[None, :], self.N))

    # -- permutations and the divisor action --------------------------------

    def permutation(self, c: CurvePoint) -> np.ndarray:
        """tau(c) as an index permutation of F."""
        if c not in self._perm:
            perm = np.empty(len(self.fano), dtype=np.int64)
            for i, X in enumerate(self.fano):
                j = self.index.get(self.tau(c, X))
                if j is None:
                    raise ActionNotClosed(f"tau{c} leaves F")
                perm[i] = j
            perm.setflags(write=False)
            self._perm[c] = perm
        return self._perm[c]

    def act_index(self, i: int, sign: int, D: Divisor) -> tuple[int, int]:
        """Left fold of the single-point rule over the terms of D, on indices."""
        for c, mult in D.terms:
            step = 1 if mult > 0 else -1
            for _ in range(abs(mult)):
                if step > 0:
                    # +X + (c) = -tau(c_bar) X,  -X + (c) = tau(c) X
                    use = c.bar() if sign > 0 else c
                else:
                    # +X - (c) = -tau(c) X,  -X - (c) = tau(c_bar) X
                    use = c if sign > 0 else c.bar()
                i = int(self.permutation(use)[i])
                sign = -sign
        return i, sign

    def divisor_act(self, x: SignedFano, D: Divisor) -> SignedFano:
        for c, _ in D.terms:
            if c.lam is not None and self.root_multiplicity(c.lam) >= 2:
                raise InvalidInput(f"{c} is not a smooth point of the curve")
        if x.x not in self.index:
            raise InvalidInput("x is not in the Fano set")
        i, sign = self.act_index(self.index[x.x], x.sign, D)
        return SignedFano(self.fano[i], sign)

    def divisor_permutation(self, D: Divisor, sign: int = 1) -> tuple[np.ndarray, int]:
        """Where D sends each element of sign ``sign``, and the resulting sign."""
        out = np.arange(len(self.fano), dtype=np.int64)
        for c, mult in D.terms:
            step = 1 if mult > 0 else -1
            for _ in range(abs(mult)):
                if step > 0:
                    use = c.bar() if sign > 0 else c
                else:
                    use = c if sign > 0 else c.bar()
                out = self.permutation(use)[out]
                sign = -sign
        return out, sign

    # -- two-torsion lifts ----------------------------------------------------

    def distinguished_point(self, kind: str = "weierstrass", root: int | None = None) -> CurvePoint:
        """The base point: a rational simple root (the first unless ``root`` is given), or infinity with ruling 0."""
        if kind == "weierstrass":
            pts = self.weierstrass_points()
            if root is not None:
                pts = [c for c in pts if c.lam == root]
            if not pts:
                raise NoBasePoint("no rational simple root available as base point")
            return pts[0]
        if kind == "ruling":
            if self.labeler.reference(None) is None:
                raise NoBasePoint("Q1 has no rational ruling")
            return CurvePoint(None, 0)
        raise InvalidInput(f"unknown base point kind {kind!r}")

    def f2_infty(self, base: CurvePoint) -> set[Subspace]:
        """Fixed points of tau(base), checked against the structural description."""
        perm = self.permutation(base)
        fixed = {self.fano[i] for i in np.flatnonzero(perm == np.arange(len(self.fano)))}
        if base.is_weierstrass:
            H = self.hyperplane(self._root_of[base.lam])
            structural = {X for X in self.fano if H.contains_subspace(X)}
        else:
            structural = set()
            for X in self.fano:
                S = X + X.image(self.T)
                if S.dim == self.n + 1 and self.pencil.q1.is_isotropic(S):
                    if base.lam is None and self.labeler.label(S, None) == base.label:
                        structural.add(X)
            if base.lam is not None:
                raise InvalidInput("the structural description is implemented for the member at infinity")
        if fixed != structural:
            raise AssertionError("fixed points of tau and the structural two-torsion set differ")
        return fixed

    def restricted_setup(self, root_index: int) -> tuple[Subspace, np.ndarray, QuadraticForm, EigenData]:
        """(H, T on H, Q1 on H, eigendata on H) for the odd restriction at a simple root.

        Operators on H act on coordinate columns with respect to H's RREF basis.
        """
        F = self.field
        H = self.hyperplane(root_index)
        B = H.basis
        form = self.pencil.q1.restricted(B)
        # T preserves H; express T|H in the basis B via the pivot coordinates
        img = F.matmul(B, la.transpose(self.T))
        T_H = la.transpose(H.coordinates(img))
        f_H = la.charpoly(F, T_H)
        return H, T_H, form, eigendata(F, T_H, f_H, form)

    def stab_group(self, flavor: Flavor | str = Flavor.PSO) -> StabGroup:
        return build_stab(self.T, self.ed, self.pencil.q1, flavor)


# -- verification ---------------------------------------------------------------


def _sample(rng: np.random.Generator, pool: list, count: int) -> list:
    if len(pool) <= SAMPLE_CAP or count >= len(pool):
        return list(pool)
    idx = rng.choice(len(pool), size=count, replace=False)
    return [pool[i] for i in sorted(idx)]


def _sample_tuples(rng: np.random.Generator, pools: list[list], count: int) -> Iterator[tuple]:
    total = 1
    for pool in pools:
        total *= len(pool)
    if total <= SAMPLE_CAP:
        yield from itertools.product(*pools)
        return
    for _ in range(count):
        yield tuple(pool[int(rng.integers(len(pool)))] for pool in pools)


def _check(name: str, failures: list, trials: int, **extra) -> dict:
    rec = {"check": name, "pass": not failures, "trials": trials, "witness": failures[0] if failures else None}
    rec.update(extra)
    return rec


def verify_two_actions(model: TorsorModel, kind: str = "ruling", root: int | None = None) -> list[dict]:
    """Compare the divisor action with the stabilizer's matrix action on F[2] of the base point.

    ``kind="weierstrass"`` uses a rational simple root as base point: the
    generators are (P_i) - (P_0) for the other simple roots and the matrices
    come from the PO stabilizer of T restricted to H.  ``kind="ruling"``
    uses infinity with ruling 0: generators (P_i) - (P_j) against the PSO
    stabilizer of T.
    """
    F = model.field
    base = model.distinguished_point(kind, root)
    f2 = sorted(model.f2_infty(base))
    simple = [i for i, m in enumerate(model.ed.mults) if m == 1]
    reports: list[dict] = []
    if kind == "weierstrass":
        i0 = model._root_of[base.lam]
        H, T_H, form_H, ed_H = model.restricted_setup(i0)
        G = build_stab(T_H, ed_H, form_H, Flavor.PO)
        h_index = {a: j for j, (a, _) in enumerate(ed_H.roots)}
        gens = [(i,) for i in simple if i != i0]
        for (i,) in gens:
            alpha = model.ed.roots[i][0]
            D = Divisor.of(CurvePoint(alpha)) - Divisor.of(base)
            g_H = G.element([h_index[alpha]]).mat
            failures = []
            for X in f2:
                got = model.divisor_act(SignedFano(X, 1), D)
                coords = F.matmul(H.coordinates(X.basis), la.transpose(g_H))
                want = Subspace.from_rows(F, F.matmul(coords, H.basis), model.N)
                if got.sign != 1 or got.x != want:
                    failures.append({"X": X.to_json()})
            reports.append(_check(f"two-actions {D}", failures, len(f2)))
    elif kind == "ruling":
        G = model.stab_group(Flavor.PSO)
        for i, j in itertools.combinations(simple, 2):
            Pi, Pj = CurvePoint(model.ed.roots[i][0]), CurvePoint(model.ed.roots[j][0])
            D = Divisor.of(Pi) - Divisor.of(Pj)
            g = G.element([i, j]).mat
            failures = []
            for X in f2:
                got = model.divisor_act(SignedFano(X, 1), D)
                if got.sign != 1 or got.x != X.image(g):
                    failures.append({"X": X.to_json()})
            reports.append(_check(f"two-actions {D}", failures, len(f2)))
    else:
        raise InvalidInput(f"unknown base point kind {kind!r}")
    return reports


def _effective_divisors(points: list[CurvePoint], degree: int) -> Iterator[Divisor]:
    for combo in itertools.combinations_with_replacement(points, degree):
        yield Divisor.of(*combo)


def codim(X: Subspace, Xp: Subspace) -> int:
    return X.dim - (X & Xp).dim


def verify_group_shadow(model: TorsorModel, samples: int = DEFAULT_SAMPLES, seed: int = SAMPLE_SEED) -> list[dict]:
    """Finite checks of the torsor structure on F u F'.

    With ``samples=0`` only checks whose domain is small enough to be
    exhaustive are run.
    """
    rng = np.random.default_rng(seed)
    pts = [c for c in model.curve_points()]
    idx = list(range(len(model.fano)))
    signs = [1, -1]
    out: list[dict] = []

    def pools_ok(pools: list[list]) -> bool:
        total = 1
        for pool in pools:
            total *= len(pool)
        return samples > 0 or total <= SAMPLE_CAP

    # (i) involutions
    pools = [pts, idx]
    if pools_ok(pools):
        failures, n = [], 0
        for c, i in _sample_tuples(rng, pools, samples):
            n += 1
            perm = model.permutation(c)
            if perm[perm[i]] != i:
                failures.append({"c": str(c), "X": model.fano[i].to_json()})
        out.append(_check("tau involution", failures, n))

    # (ii) commutation (x + (c1)) + (c2) = (x + (c2)) + (c1)
    pools = [pts, pts, idx, signs]
    if pools_ok(pools):
        failures, n = [], 0
        for c1, c2, i, s in _sample_tuples(rng, pools, samples):
            n += 1
            a = model.act_index(i, s, Divisor.of(c1, c2))
            b = model.act_index(i, s, Divisor.of(c2, c1))
            if a != b:
                failures.append({"c1": str(c1), "c2": str(c2), "X": model.fano[i].to_json(), "sign": s})
        out.append(_check("commutation", failures, n))

    # (iii) the hyperelliptic class acts trivially
    pools = [pts, idx, signs]
    if pools_ok(pools):
        failures, n = [], 0
        for c, i, s in _sample_tuples(rng, pools, samples):
            n += 1
            if model.act_index(i, s, Divisor.of(c, c.bar())) != (i, s):
                failures.append({"c": str(c), "X": model.fano[i].to_json(), "sign": s})
        out.append(_check("hyperelliptic class trivial", failures, n))

    # (iv) degree parity decides the component
    pools = [pts, pts, pts, idx, signs]
    if pools_ok(pools):
        failures, n = [], 0
        for c1, c2, c3, i, s in _sample_tuples(rng, pools, samples):
            for D in (Divisor.of(c1), Divisor.of(c1, c2), Divisor.of(c1) - Divisor.of(c2), Divisor.of(c1, c2, c3)):
                n += 1
                _, res = model.act_index(i, s, D)
                if res != s * (-1) ** D.degree:
                    failures.append({"D": str(D), "X": model.fano[i].to_json()})
        out.append(_check("degree parity", failures, n))

    # (v) effective representatives of x +_G x' act identically
    pools = [idx, idx]
    if pools_ok(pools):
        out.append(_class_independence(model, pts, rng, samples))
    return out


def _class_independence(model: TorsorModel, pts: list[CurvePoint], rng, samples: int) -> dict:
    """For pairs x, x' the effective divisors D with x + D = (-1)^r x' (r = codim) number at most one,
    and every effective D of degree <= n+1 sending -x' to x acts the same way on all of F u F'.
    """
    n = model.n
    pairs = list(_sample_tuples(rng, [list(range(len(model.fano)))] * 2, min(samples, 50) or SAMPLE_CAP))
    by_degree = {d: list(_effective_divisors(pts, d)) for d in range(0, n + 2)}
    actions = {}
    for d, divs in by_degree.items():
        for D in divs:
            plus, _ = model.divisor_permutation(D, 1)
            minus, _ = model.divisor_permutation(D, -1)
            actions[D] = (plus, minus)
    failures: list = []
    found_counts: list[int] = []
    for i, j in pairs:
        X, Xp = model.fano[i], model.fano[j]
        r = codim(X, Xp)
        matches = [D for D in by_degree[r] if actions[D][0][i] == j]
        found_counts.append(len(matches))
        if len(matches) > 1:
            failures.append({"reason": "non-unique effective divisor", "X": X.to_json(), "Xp": Xp.to_json(),
                             "divisors": [str(D) for D in matches]})
            continue
        senders = [D for d in range(1, n + 2, 2) for D in by_degree[d] if actions[D][1][j] == i]
        for D in senders[1:]:
            a, b = actions[D], actions[senders[0]]
            if not (np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])):
                failures.append({"reason": "representatives act differently", "X": X.to_json(),
                                 "Xp": Xp.to_json(), "divisors": [str(senders[0]), str(D)]})
                break
    return _check("class independence", failures, len(pairs),
                  unique_found=sum(1 for k in found_counts if k == 1))


def fixed_point_count(model: TorsorModel, base: CurvePoint) -> int:
    return len(model.f2_infty(base))


def t_stable_free(model: TorsorModel, X: Subspace) -> bool:
    return t_stable_dim(model.field, model.T, X + X.image(model.T)) == 0
