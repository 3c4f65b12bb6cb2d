"""Reductions along eigenvectors of T, and the even terminal solver.

Every reduction here passes from U to v^perp / v for an isotropic
eigenvector v of T (:func:`~pencil_lab.quadrics.restrict_and_descend`).

``d_reduce``
    X contains v.  Then X lies in v^perp and X/v is a common isotropic
    subspace one dimension down, with the same profile except for one
    fewer T-stable dimension at the root of v.  Lifting is the preimage.

``f_reduce``
    X misses v, as in the profile-zero classes or on the open even Fano
    set.  Then (X & v^perp)/v drops one dimension.  The fibres are cut
    out by the bilinear form b_alpha(x, y) = b(x, (T - alpha) y): its
    radical is v, and a point w of the fibre is an isotropic line of
    b_alpha orthogonal to the image, off v^perp.  See
    :func:`lifts_through`.

``delta_v_even``
    Same map on the open even Fano set at a repeated root, with the
    fibres being a conic minus a line.

The terminal solver handles N = 4 directly.  A line <x> has Span{x, Tx}
isotropic exactly when b(x, T^j x) = 0 for j = 0, 1, 2.  In a basis of
Jordan chains these are linear in a few quadratic monomials of the
coordinates, and the monomials can then be peeled off one chain at a time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from itertools import product

import numpy as np

from . import linalg as la
from .errors import (
    BadReductionVector,
    FixtureDegenerate,
    NotReducibleHere,
    ReducibleCurve,
    ShapeError,
)
from .fano import enumerate_common_isotropic, even_fano_sets, geometric_genus, regular_setup, t_stable_dim
from .gf import GF
from .linalg import Subspace
from .poly import Poly
from .quadrics import Descent, Pencil, QuadraticForm, pencil_from_operator, restrict_and_descend


def eigenvector_at(F: GF, T, alpha: int) -> np.ndarray:
    N = np.asarray(T).shape[0]
    ker = la.kernel(F, F.vsub(T, la.scalar_matrix(F, N, alpha)))
    if ker.dim == 0:
        raise BadReductionVector(f"{alpha} is not an eigenvalue of T")
    if ker.dim > 1:
        raise BadReductionVector("eigenspace is not a line; T is not regular")
    return ker.basis[0]


def multiplicity(F: GF, T, alpha: int) -> int:
    return la.generalized_eigenspace(F, T, alpha, np.asarray(T).shape[0]).dim


def descended_pencil(desc: Descent) -> Pencil:
    return pencil_from_operator(desc.form, desc.T)


class ReductionKind(str, Enum):
    D = "d"
    F = "f"


@dataclass(frozen=True)
class ReductionStep:
    """One pass to v^perp / v: the data before and the descent after."""

    kind: ReductionKind
    alpha: int
    before_form: QuadraticForm
    before_T: np.ndarray = field(repr=False)
    descent: Descent = field(repr=False)

    @property
    def v(self) -> np.ndarray:
        return self.descent.v

    @property
    def after_form(self) -> QuadraticForm:
        return self.descent.form

    @property
    def after_T(self) -> np.ndarray:
        return self.descent.T

    def check(self) -> bool:
        """charpoly drops by (x - alpha)^2 and the descended form stays nondegenerate."""
        F = self.before_form.field
        before = la.charpoly(F, self.before_T)
        after = la.charpoly(F, self.after_T)
        square = Poly(F, (F.neg(self.alpha), 1)) ** 2
        return after * square == before and self.after_form.is_nondegenerate()


def _step(kind: ReductionKind, form: QuadraticForm, T, v: np.ndarray) -> ReductionStep:
    desc = restrict_and_descend(form, T, v)
    return ReductionStep(kind, desc.alpha, form, np.asarray(T), desc)


def b_alpha_gram(form: QuadraticForm, T, alpha: int) -> np.ndarray:
    """Gram matrix of b_alpha(x, y) = b(x, (T - alpha) y); symmetric because T is self-adjoint."""
    F = form.field
    shifted = F.vsub(T, la.scalar_matrix(F, form.dim, alpha))
    return F.matmul(form.gram, shifted)


# -- d: X contains v ---------------------------------------------------------


def d_reduce(form: QuadraticForm, T, X: Subspace, alpha: int) -> tuple[ReductionStep, Subspace]:
    """Descend X through the eigenvector at alpha, which X must contain."""
    v = eigenvector_at(form.field, T, alpha)
    if not X.contains(v):
        raise NotReducibleHere("X does not contain the eigenvector at this root")
    step = _step(ReductionKind.D, form, T, v)
    return step, step.descent.project(X)


def d_lift(step: ReductionStep, Xbar: Subspace) -> Subspace:
    return step.descent.lift(Xbar)


# -- f: X misses v --------------------------------------------------------------


def f_reduce(form: QuadraticForm, T, X: Subspace, alpha: int) -> tuple[ReductionStep, Subspace]:
    """(X & v^perp)/v for the eigenvector v at alpha; X must not lie in v^perp."""
    F = form.field
    v = eigenvector_at(F, T, alpha)
    if X.contains(v):
        raise NotReducibleHere("X contains the eigenvector; use d_reduce")
    if multiplicity(F, T, alpha) < 2:
        raise NotReducibleHere("f_reduce needs a repeated root")
    perp = form.orthogonal(Subspace.from_rows(F, v[None, :], form.dim))
    if perp.contains_subspace(X):
        raise NotReducibleHere("X is orthogonal to the eigenvector")
    step = _step(ReductionKind.F, form, T, v)
    return step, step.descent.project(X & perp)


def f_reduce_odd(form: QuadraticForm, T, X: Subspace, alpha: int) -> tuple[ReductionStep, Subspace]:
    if form.dim % 2 == 0:
        raise ShapeError("f_reduce_odd needs odd N")
    return f_reduce(form, T, X, alpha)


def f_reduce_even(form: QuadraticForm, T, X: Subspace, alpha: int) -> tuple[ReductionStep, Subspace]:
    """Even variant; N = 4 is the terminal case, handled by :func:`terminal_even_solver`."""
    if form.dim % 2:
        raise ShapeError("f_reduce_even needs even N")
    if form.dim < 6:
        raise NotReducibleHere("N = 4 is terminal; use terminal_even_solver")
    return f_reduce(form, T, X, alpha)


def lifts_through(form: QuadraticForm, T, desc: Descent, Xbar: Subspace, around: Subspace | None = None) -> set[Subspace]:
    """All X^w over Xbar: w runs over b_alpha-isotropic lines orthogonal to ``around`` and off v^perp.

    ``around`` is a subspace of the quotient containing Xbar (default
    Xbar itself).  For w with b(w, v) = 1 and Q(w) = 0 the lift is
    Span{w, u - b(w, u) v : u lifting Xbar}.
    """
    F = form.field
    N = form.dim
    v = desc.v
    around = Xbar if around is None else around
    Xl = desc.lift_vectors(Xbar.basis)
    A = desc.lift(around)
    balpha = b_alpha_gram(form, T, desc.alpha)
    perp = la.kernel(F, F.matmul(A.basis, balpha))
    base = Subspace.from_rows(F, np.concatenate([Xl, v[None, :]]), N)
    if not perp.contains_subspace(base):
        raise AssertionError("the lifted image is not b_alpha-isotropic")
    comp = la.complement_rows(F, base, perp)
    out: set[Subspace] = set()
    if comp.shape[0] == 0:
        return out
    for w in la.projective_points(F, Subspace.from_rows(F, comp, N)):
        if F.rowdot(F.matmul(w[None, :], balpha), w[None, :])[0] != 0:
            continue
        bwv = form.b(w, v)
        if bwv == 0:
            continue
        w = F.vmul(w, F.inv(bwv))
        w = F.vsub(w, F.vmul(v, F.div(form(w), 2)))
        rows = [w]
        for u in Xl:
            rows.append(F.vsub(u, F.vmul(v, form.b(w, u))))
        out.add(Subspace.from_rows(F, np.array(rows, dtype=np.int64), N))
    return out


def f_lifts(step: ReductionStep, Xbar: Subspace) -> set[Subspace]:
    """Fibre of f_reduce over Xbar.

    For odd N the constraint is b_alpha-orthogonality to Xbar; for even N
    it is orthogonality to Span{Xbar, T Xbar}.
    """
    form, T, desc = step.before_form, step.before_T, step.descent
    if form.dim % 2:
        return lifts_through(form, T, desc, Xbar)
    return lifts_through(form, T, desc, Xbar, Xbar + Xbar.image(desc.T))


def expected_f_fiber(m: int) -> int:
    """Two lifts over a double root, one over a root of higher multiplicity."""
    if m < 2:
        raise NotReducibleHere("f_reduce needs a repeated root")
    return 2 if m == 2 else 1


# -- delta on the open even Fano set --------------------------------------------


def _open_fano(p: Pencil, F: GF) -> set[Subspace]:
    """F for an even pencil over its own field (all of F0 when T is semisimple)."""
    if p.n == 0:
        return {Subspace.zero(F, p.N)}
    wp, T, ed = regular_setup(p, F.spec)
    if all(m == 1 for m in ed.mults):
        return set(enumerate_common_isotropic(wp, wp.n))
    return set(even_fano_sets(wp, F.spec).F)


@dataclass
class DeltaReport:
    alpha: int
    multiplicity: int
    kind: str
    fiber_sizes: list[int]
    line_meets_conic: list[int]
    size_F: int
    size_Fbar: int
    parametrized: bool
    dim_bar: int
    pencil_bar: Pencil | None = field(repr=False)

    @property
    def split(self) -> bool:
        """Whether l meets the conic in rational points only (always true at a cusp)."""
        return all(k > 0 for k in self.line_meets_conic)

    @property
    def fiber_size(self) -> int | None:
        """The common fibre size, or None if fibres differ."""
        sizes = set(self.fiber_sizes)
        return sizes.pop() if len(sizes) == 1 else None

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha,
            "multiplicity": self.multiplicity,
            "kind": self.kind,
            "fiber_size": self.fiber_size,
            "split": self.split,
            "size_F": self.size_F,
            "size_Fbar": self.size_Fbar,
            "parametrized": self.parametrized,
        }


def expected_delta_fiber(q: int, m: int, split: bool = True) -> int:
    """Points of a smooth conic (q + 1 of them) off the line l.

    l is tangent when m >= 3, leaving q.  When m = 2 it is a secant: two
    rational points (split node, q - 1 left) or a conjugate pair (q + 1).
    """
    if m >= 3:
        return q
    return q - 1 if split else q + 1


def _line_conic_meet(form: QuadraticForm, T, desc: Descent, Xbar: Subspace) -> int:
    """Rational points of C0 on the line l = those b_alpha-isotropic w that are orthogonal to v."""
    F = form.field
    N = form.dim
    balpha = b_alpha_gram(form, T, desc.alpha)
    A = desc.lift(Xbar)
    perp = la.kernel(F, F.matmul(A.basis, balpha))
    comp = la.complement_rows(F, A, perp)
    count = 0
    for w in la.projective_points(F, Subspace.from_rows(F, comp, N)):
        if F.rowdot(F.matmul(w[None, :], balpha), w[None, :])[0] == 0 and form.b(w, desc.v) == 0:
            count += 1
    return count


def delta_v_even(p: Pencil, alpha: int | None = None, field_spec=None) -> DeltaReport:
    """Map the open Fano set through (X & v^perp)/v and compare every fibre with its conic model."""
    if p.is_odd:
        raise ShapeError("delta_v_even needs even N")
    wp, T, ed = regular_setup(p, field_spec)
    F = wp.field
    if geometric_genus(ed.mults) < 0:
        raise ReducibleCurve("every root has even multiplicity")
    if alpha is None:
        repeated = [a for a, m in ed.roots if m >= 2]
        if not repeated:
            raise NotReducibleHere("T is semisimple; nothing to reduce")
        alpha = repeated[0]
    m = dict(ed.roots).get(alpha)
    if m is None:
        raise BadReductionVector("alpha is not a root of the pencil polynomial")
    if m < 2:
        raise NotReducibleHere("delta_v needs a repeated root")
    v = eigenvector_at(F, T, alpha)
    desc = restrict_and_descend(wp.q1, T, v)
    dim_bar = desc.form.dim
    # a 2-dimensional quotient carries no pencil; its Fano set is the zero subspace
    pbar = descended_pencil(desc) if dim_bar >= 3 else None
    top = set(even_fano_sets(wp, F.spec).F)
    bottom = _open_fano(pbar, F) if pbar is not None else {Subspace.zero(F, dim_bar)}
    perp = wp.q1.orthogonal(Subspace.from_rows(F, v[None, :], wp.N))
    fibers: dict[Subspace, set[Subspace]] = {Xb: set() for Xb in bottom}
    for X in top:
        Xb = desc.project(X & perp)
        if Xb not in fibers:
            raise AssertionError("delta_v left the open Fano set of the quotient")
        fibers[Xb].add(X)
    parametrized = True
    meets = []
    for Xb in sorted(fibers):
        lifts = lifts_through(wp.q1, T, desc, Xb)
        if lifts != fibers[Xb]:
            parametrized = False
        meets.append(_line_conic_meet(wp.q1, T, desc, Xb))
    return DeltaReport(
        alpha=alpha,
        multiplicity=m,
        kind="Gm" if m == 2 else "Ga",
        fiber_sizes=[len(fibers[Xb]) for Xb in sorted(fibers)],
        line_meets_conic=meets,
        size_F=len(top),
        size_Fbar=len(bottom),
        parametrized=parametrized,
        dim_bar=dim_bar,
        pencil_bar=pbar,
    )


@dataclass
class FullDeltaReport:
    steps: list[DeltaReport]
    size_F: int
    size_core: int
    core_dim: int
    genus: int

    @property
    def fiber_product(self) -> int:
        out = 1
        for s in self.steps:
            if s.fiber_size is None:
                return -1
            out *= s.fiber_size
        return out

    @property
    def holds(self) -> bool:
        return (
            self.size_F == self.size_core * self.fiber_product
            and self.core_dim == 2 * self.genus + 2
            and all(s.parametrized for s in self.steps)
        )

    def to_json(self) -> dict:
        return {
            "steps": [s.to_json() for s in self.steps],
            "size_F": self.size_F,
            "size_core": self.size_core,
            "core_dim": self.core_dim,
            "genus": self.genus,
            "fiber_product": self.fiber_product,
            "holds": self.holds,
        }


def full_delta(p: Pencil, field_spec=None) -> FullDeltaReport:
    """Reduce at repeated roots until T is semisimple, tracking fibre sizes."""
    wp, _, ed = regular_setup(p, field_spec)
    F = wp.field
    genus = geometric_genus(ed.mults)
    if genus < 0:
        raise ReducibleCurve("every root has even multiplicity")
    steps: list[DeltaReport] = []
    current: Pencil | None = wp
    core_dim = wp.N
    while current is not None:
        _, _, ced = regular_setup(current, F.spec)
        if all(m == 1 for m in ced.mults):
            break
        step = delta_v_even(current, None, F.spec)
        steps.append(step)
        current = step.pencil_bar
        core_dim = step.dim_bar
    size_core = 1 if current is None else len(_open_fano(current, F))
    size_F = steps[0].size_F if steps else size_core
    return FullDeltaReport(steps, size_F, size_core, core_dim, genus)


# -- even terminal case (N = 4) ---------------------------------------------------


def jordan_chains(F: GF, T, ed) -> list[tuple[int, np.ndarray]]:
    """(alpha, chain) per root with (T - alpha) u_{k+1} = u_k and u_1 an eigenvector."""
    N = np.asarray(T).shape[0]
    out = []
    for (alpha, m), U in zip(ed.roots, ed.spaces):
        shifted = F.vsub(T, la.scalar_matrix(F, N, alpha))
        below = la.kernel(F, la.matmul(F, *([shifted] * (m - 1)))) if m > 1 else Subspace.zero(F, N)
        top = next(u for u in U.basis if not below.contains(u))
        chain = [top]
        for _ in range(m - 1):
            chain.append(la.matvec(F, shifted, chain[-1]))
        out.append((alpha, np.array(chain[::-1], dtype=np.int64)))
    return out


def _chain_monomial(F: GF, c: list[int], s: int) -> int:
    """sum of c_k c_l over 1 <= k, l <= m with k + l = s (1-based)."""
    m = len(c)
    acc = 0
    for k in range(max(1, s - m), min(m, s - 1) + 1):
        acc = F.add(acc, F.mul(c[k - 1], c[s - k - 1]))
    return acc


@dataclass
class TerminalSolution:
    matrix: np.ndarray
    kernel: np.ndarray
    coefficient_tuples: list[tuple[int, ...]]
    subspaces: set[Subspace]
    chains: list[tuple[int, np.ndarray]] = field(repr=False)


def terminal_even_solver(p: Pencil, field_spec=None) -> TerminalSolution:
    """Lines <x> with Span{x, Tx} isotropic and free of T-stable subspaces, for N = 4.

    Columns of the 3 x 4 matrix are the monomials sum_{k+l=s} c_k c_l of
    each chain (s from m+1 to 2m; lower s pair to zero).  Its kernel fixes
    the monomials up to a scalar t, and each chain is solved from its top
    coordinate down: the top monomial is c_m^2, the next 2 c_{m-1} c_m, ...
    """
    wp, T, ed = regular_setup(p, field_spec)
    F = wp.field
    if wp.N != 4:
        raise ShapeError("the terminal solver handles N = 4")
    chains = jordan_chains(F, T, ed)
    Tpow = [la.identity(F, 4), T, F.matmul(T, T)]
    columns: list[tuple[int, int]] = []
    rows: list[list[int]] = [[], [], []]
    for b, (alpha, chain) in enumerate(chains):
        m = chain.shape[0]
        for s in range(m + 1, 2 * m + 1):
            k = s - m
            columns.append((b, s))
            for j in range(3):
                rows[j].append(wp.q1.b(chain[k - 1], la.matvec(F, Tpow[j], chain[m - 1])))
    A = np.array(rows, dtype=np.int64)
    ker = la.kernel_basis(F, A)
    if ker.shape[0] != 1:
        raise FixtureDegenerate("monomial system does not have a one-dimensional kernel")
    kvec = ker[0]
    nonsquare = next((a for a in range(1, F.q) if not F.is_square(a)), None)
    scalars = [1] if nonsquare is None else [1, nonsquare]
    tuples: list[tuple[int, ...]] = []
    subspaces: set[Subspace] = set()
    for t in scalars:
        target = F.vmul(kvec, t)
        per_chain: list[list[list[int]]] = []
        ok = True
        for b, (alpha, chain) in enumerate(chains):
            m = chain.shape[0]
            mu = {s: int(target[i]) for i, (bb, s) in enumerate(columns) if bb == b}
            top = mu[2 * m]
            if top == 0:
                raise FixtureDegenerate("a chain's top monomial vanishes; the span meets a T-stable line")
            if not F.is_square(top):
                ok = False
                break
            r = F.sqrt(top)
            options = []
            for c_top in (r, F.neg(r)):
                c = [0] * m
                c[m - 1] = c_top
                inv2 = F.inv(F.mul(2, c_top))
                for s in range(2 * m - 1, m, -1):
                    k = s - m
                    c[k - 1] = 0
                    rest = _chain_monomial(F, c, s)
                    c[k - 1] = F.mul(F.sub(mu[s], rest), inv2)
                options.append(c)
            per_chain.append(options)
        if not ok:
            continue
        for choice in product(*per_chain):
            x = np.zeros(4, dtype=np.int64)
            coeffs: list[int] = []
            for (alpha, chain), c in zip(chains, choice):
                coeffs.extend(c)
                for k, ck in enumerate(c):
                    x = F.vadd(x, F.vmul(chain[k], ck))
            tuples.append(tuple(coeffs))
            subspaces.add(Subspace.from_rows(F, x[None, :], 4))
    for X in subspaces:
        S = X + X.image(T)
        if not (wp.q1.is_isotropic(X) and wp.q2.is_isotropic(X) and wp.q1.is_isotropic(S)):
            raise AssertionError("terminal solution fails the isotropy conditions")
        if S.dim != 2 or t_stable_dim(F, T, S) != 0:
            raise AssertionError("terminal solution has a T-stable span")
    return TerminalSolution(A, kvec, tuples, subspaces, chains)


def d_target_dims(alphas: list[int], dims: tuple[int, ...], alpha: int, alphas_bar: list[int]) -> tuple[int, ...]:
    """Profile after d_reduce at alpha, listed in the quotient's root order.

    The dimension at alpha drops by one.  A double root disappears from
    the quotient together with its entry.
    """
    by_root = dict(zip(alphas, dims))
    by_root[alpha] -= 1
    return tuple(by_root[a] for a in alphas_bar)
