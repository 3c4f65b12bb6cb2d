from __future__ import annotations

import numpy as np
import pytest

from pencil_lab import linalg as la
from pencil_lab.errors import BadReductionVector, NotReducibleHere, ReducibleCurve, ShapeError
from pencil_lab.fano import even_profile_sets, partition_by_profile, regular_setup
from pencil_lab.fixtures import load_fixture, trace_pencil
from pencil_lab.reduction import (
    ReductionKind,
    b_alpha_gram,
    d_lift,
    d_reduce,
    d_target_dims,
    delta_v_even,
    descended_pencil,
    eigenvector_at,
    expected_delta_fiber,
    expected_f_fiber,
    f_lifts,
    f_reduce,
    f_reduce_even,
    f_reduce_odd,
    full_delta,
    multiplicity,
    terminal_even_solver,
)

ODD_ROOTS = [[1, 1, 2, 3, 4], [1, 1, 2, 2, 3], [1, 1, 1, 2, 3], [1, 1, 1, 2, 2], [1, 1, 1, 1, 2]]


def _classes(p):
    return {k: {fp.x for fp in v} for k, v in partition_by_profile(p).items()}


@pytest.mark.parametrize("roots", ODD_ROOTS, ids=lambda r: "".join(map(str, r)))
def test_d_reduce_is_a_bijection_onto_the_lowered_class(roots):
    wp, T, ed = regular_setup(trace_pencil(roots))
    checked = 0
    for key, Xs in _classes(wp).items():
        for i, alpha in enumerate(ed.alphas):
            if key.dims[i] == 0:
                continue
            images = {}
            for X in Xs:
                step, Xbar = d_reduce(wp.q1, T, X, alpha)
                assert step.kind is ReductionKind.D and step.check()
                assert d_lift(step, Xbar) == X
                images[Xbar] = X
            assert len(images) == len(Xs)
            bar = descended_pencil(step.descent)
            _, _, ed_bar = regular_setup(bar)
            want = d_target_dims(ed.alphas, key.dims, alpha, ed_bar.alphas)
            target = {fp.x for k, v in partition_by_profile(bar).items() if k.dims == want for fp in v}
            assert set(images) == target
            checked += 1
    assert checked


@pytest.mark.parametrize("roots", ODD_ROOTS, ids=lambda r: "".join(map(str, r)))
def test_f_reduce_fibres_over_the_zero_class(roots):
    wp, T, ed = regular_setup(trace_pencil(roots))
    zero = next(Xs for k, Xs in _classes(wp).items() if k.total == 0)
    for alpha, m in ed.roots:
        if m < 2:
            continue
        fibres: dict = {}
        for X in zero:
            step, Xbar = f_reduce_odd(wp.q1, T, X, alpha)
            assert step.kind is ReductionKind.F and step.check()
            fibres.setdefault(Xbar, set()).add(X)
        assert {len(s) for s in fibres.values()} == {expected_f_fiber(m)}
        bar = descended_pencil(step.descent)
        bar_zero = {fp.x for k, v in partition_by_profile(bar).items() if k.total == 0 for fp in v}
        assert set(fibres) == bar_zero
        for Xbar, fibre in fibres.items():
            assert f_lifts(step, Xbar) == fibre


@pytest.mark.parametrize("roots", [[1, 1, 2, 3, 4, 6], [1, 1, 1, 2, 3, 4], [1, 1, 2, 2, 3, 4]])
def test_even_f_reduce_on_starred_zero_classes(roots):
    wp, T, ed = regular_setup(trace_pencil(roots))
    sets = even_profile_sets(wp)
    zero = {fp.x for k, v in sets.starred.items() if k.total == 0 for fp in v}
    for alpha, m in ed.roots:
        if m < 2:
            continue
        fibres: dict = {}
        for X in zero:
            step, Xbar = f_reduce_even(wp.q1, T, X, alpha)
            fibres.setdefault(Xbar, set()).add(X)
        assert {len(s) for s in fibres.values()} == {expected_f_fiber(m)}
        bar_sets = even_profile_sets(descended_pencil(step.descent))
        assert set(fibres) == {fp.x for k, v in bar_sets.starred.items() if k.total == 0 for fp in v}
        assert all(f_lifts(step, Xbar) == s for Xbar, s in fibres.items())


def test_reduction_guards():
    wp, T, ed = regular_setup(trace_pencil([1, 1, 2, 3, 4]))
    classes = _classes(wp)
    zero = next(iter(next(Xs for k, Xs in classes.items() if k.total == 0)))
    with_v = next(iter(next(Xs for k, Xs in classes.items() if k.dims[0] == 1)))
    with pytest.raises(NotReducibleHere):
        d_reduce(wp.q1, T, zero, 1)
    with pytest.raises(NotReducibleHere):
        f_reduce(wp.q1, T, with_v, 1)
    with pytest.raises(NotReducibleHere):
        f_reduce(wp.q1, T, zero, 2)
    with pytest.raises(BadReductionVector):
        eigenvector_at(wp.field, T, 5)
    with pytest.raises(NotReducibleHere):
        expected_f_fiber(1)
    even = load_fixture("even-terminal-112")
    we, Te, _ = regular_setup(even)
    X = next(iter(terminal_even_solver(even).subspaces))
    with pytest.raises(ShapeError):
        f_reduce_odd(we.q1, Te, X, 1)
    with pytest.raises(NotReducibleHere):
        f_reduce_even(we.q1, Te, X, 1)
    with pytest.raises(ShapeError):
        f_reduce_even(wp.q1, T, zero, 1)


@pytest.mark.parametrize("roots", [[1, 1, 2, 3, 4], [1, 1, 1, 2, 3], [1, 1, 1, 1, 2, 3]])
def test_b_alpha_radical_is_the_eigenvector(roots):
    wp, T, ed = regular_setup(trace_pencil(roots))
    F = wp.field
    for alpha, m in ed.roots:
        G = b_alpha_gram(wp.q1, T, alpha)
        assert np.array_equal(G, G.T)
        rad = la.kernel(F, G)
        assert rad.dim == 1 and rad.contains(eigenvector_at(F, T, alpha))
        assert multiplicity(F, T, alpha) == m


def test_expected_delta_fibres():
    assert expected_delta_fiber(7, 2) == 6
    assert expected_delta_fiber(7, 2, split=False) == 8
    assert expected_delta_fiber(7, 3) == 7
    assert expected_delta_fiber(11, 5) == 11


# frozen at q = 7: (fixture, kind, fibre, split, |F|, |F bar|)
DELTA = [
    ("nodal-even-6", "Gm", 6, True, 72, 12),
    ("cusp-even-6", "Ga", 7, True, 56, 8),
    ("even-terminal-112", "Gm", 6, True, 6, 1),
    ("even-terminal-31", "Ga", 7, True, 7, 1),
]


@pytest.mark.parametrize("name,kind,fibre,split,size_f,size_bar", DELTA)
def test_delta_fibres(name, kind, fibre, split, size_f, size_bar):
    rep = delta_v_even(load_fixture(name))
    assert (rep.kind, rep.fiber_size, rep.split, rep.size_F, rep.size_Fbar) == (kind, fibre, split, size_f, size_bar)
    assert rep.fiber_size == expected_delta_fiber(7, rep.multiplicity, rep.split)
    assert rep.parametrized
    assert rep.size_F == rep.fiber_size * rep.size_Fbar


def test_non_split_node_has_q_plus_one_fibres():
    # (x-1)^2 (x-2)(x-3)(x-4)(x-5): the node's tangent directions are conjugate over F_7
    rep = delta_v_even(trace_pencil([1, 1, 2, 3, 4, 5]))
    assert not rep.split
    assert rep.fiber_size == 8 == expected_delta_fiber(7, 2, split=False)


@pytest.mark.parametrize("roots,sizes", [([1, 1, 1, 1, 2, 3], [7, 6]), ([1, 1, 1, 2, 2, 2], [7, 7])])
def test_full_delta_chains_reductions(roots, sizes):
    rep = full_delta(trace_pencil(roots))
    assert [s.fiber_size for s in rep.steps] == sizes
    assert rep.holds
    assert rep.core_dim == 2 * rep.genus + 2


def test_full_delta_on_nodal_fixture():
    rep = full_delta(load_fixture("nodal-even-6"))
    assert rep.holds and rep.size_F == 72 and rep.size_core == 12 and rep.genus == 1
    assert rep.to_json()["fiber_product"] == 6


def test_delta_guards():
    with pytest.raises(ReducibleCurve):
        delta_v_even(load_fixture("even-terminal-22"))
    with pytest.raises(NotReducibleHere):
        delta_v_even(load_fixture("generic-even-4"))
    with pytest.raises(ShapeError):
        delta_v_even(load_fixture("generic-odd-3"))
    with pytest.raises(NotReducibleHere):
        delta_v_even(load_fixture("nodal-even-6"), alpha=2)


# frozen: (solution tuples, distinct lines), equal to the brute-force starred set
TERMINAL = {
    "generic-even-4": (16, 8),
    "even-terminal-112": (8, 4),
    "even-terminal-31": (4, 2),
    "even-terminal-22": (4, 2),
    "even-terminal-400": (2, 1),
}


@pytest.mark.parametrize("name", list(TERMINAL))
def test_terminal_solver_matches_enumeration(name):
    p = load_fixture(name)
    sol = terminal_even_solver(p)
    assert (len(sol.coefficient_tuples), len(sol.subspaces)) == TERMINAL[name]
    starred = {fp.x for v in even_profile_sets(p).starred.values() for fp in v}
    assert sol.subspaces == starred
    assert not np.any(p.field.matmul(sol.matrix, sol.kernel[:, None]))
    with pytest.raises(ShapeError):
        terminal_even_solver(load_fixture("generic-even-6"))
