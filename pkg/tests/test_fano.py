from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pencil_lab.errors import NotGeneric, NotRegular, ReducibleCurve, ShapeError
from pencil_lab.fano import (
    ProfileKey,
    contains_pn,
    contains_pn_bruteforce,
    elkies_enumerate,
    elkies_kernel,
    enumerate_common_isotropic,
    enumerate_common_isotropic_naive,
    even_fano_sets,
    even_profile_sets,
    expected_even_class_size,
    expected_odd_class_size,
    geometric_genus,
    partition_by_profile,
    t_stable_dim,
)
from pencil_lab.fixtures import generic_odd_data, load_fixture, shape_pencil, spec_for_q
from pencil_lab.gf import FieldSpec, get_field
from pencil_lab.linalg import Subspace
from pencil_lab.quadrics import Pencil, diagonal_pencil

F7 = get_field(FieldSpec.standard(7))


@pytest.mark.parametrize(
    "name,q,dim",
    [
        ("generic-odd-3", 7, 1),
        ("generic-even-4", 7, 1),
        ("even-terminal-22", 7, 2),
        ("regular-odd-5-shape-221", 5, 2),
        ("regular-odd-5-shape-41", 5, 2),
        ("generic-odd-5", 5, 2),
    ],
)
def test_enumeration_agrees_with_grassmannian_filter(name, q, dim):
    p = load_fixture(name, q)
    assert enumerate_common_isotropic(p, dim) == enumerate_common_isotropic_naive(p, dim)


@given(st.lists(st.integers(1, 6), min_size=3, max_size=3), st.lists(st.integers(0, 6), min_size=3, max_size=3))
def test_enumeration_agrees_on_random_diagonal_planes(a, c):
    p = Pencil(F7, np.diag(a), np.diag(F7.vmul(np.array(a), np.array(c))))
    assert enumerate_common_isotropic(p, 1) == enumerate_common_isotropic_naive(p, 1)


def test_enumeration_rejects_oversized_dimension():
    with pytest.raises(ShapeError):
        enumerate_common_isotropic(load_fixture("generic-odd-3"), 2)


def test_dimension_zero_is_the_zero_subspace():
    p = load_fixture("generic-odd-3")
    assert enumerate_common_isotropic(p, 0) == {Subspace.zero(F7, 3)}


@pytest.mark.parametrize("N,q", [(3, 7), (3, 11), (5, 7), (5, 11), (5, 13), (3, 9)])
def test_square_root_construction_matches_enumeration(N, q):
    c, a = generic_odd_data(N, q)
    spec = spec_for_q(q)
    p = diagonal_pencil(get_field(spec), c, a)
    found = enumerate_common_isotropic(p, (N - 1) // 2)
    assert len(found) == 2 ** (N - 1)
    assert elkies_enumerate(c, spec, a) == found


def test_kernel_solves_power_sums():
    c = [0, 1, 2, 3, 4]
    D = elkies_kernel(F7, c)
    for j in range(4):
        assert sum(int(d) * pow(ci, j, 7) for d, ci in zip(D, c)) % 7 == 0
    with pytest.raises(NotGeneric):
        elkies_enumerate([1, 1, 2], FieldSpec.standard(7))
    with pytest.raises(ShapeError):
        elkies_enumerate([1, 2, 3, 4], FieldSpec.standard(7))


def test_unweighted_diagonal_needs_an_extension_but_still_counts():
    # D_i for c = 0..4 over F_7 is not a single square class; the construction moves to F_49
    spec = FieldSpec.standard(7)
    out = elkies_enumerate(range(5), spec)
    assert len(out) == 16
    X = next(iter(out))
    assert X.field.q == 49


# frozen from brute force at q = 7: profile -> class size
ODD_CLASSES = {
    (2, 1, 1, 1): {(0, 0, 0, 0): 8, (1, 0, 0, 0): 4},
    (2, 2, 1): {(0, 0, 0): 4, (0, 1, 0): 2, (1, 0, 0): 2, (1, 1, 0): 1},
    (3, 1, 1): {(0, 0, 0): 4, (1, 0, 0): 4},
    (3, 2): {(0, 0): 2, (0, 1): 1, (1, 0): 2, (1, 1): 1},
    (4, 1): {(0, 0): 2, (1, 0): 2, (2, 0): 1},
    (1, 1, 1, 1, 1): {(0, 0, 0, 0, 0): 16},
}


@pytest.mark.parametrize("shape", list(ODD_CLASSES), ids=lambda s: "".join(map(str, s)))
def test_odd_profile_classes(shape):
    parts = partition_by_profile(shape_pencil(shape))
    assert {k.dims: len(v) for k, v in parts.items()} == ODD_CLASSES[shape]
    for k, v in parts.items():
        assert len(v) == expected_odd_class_size(k)


def test_profile_key_bookkeeping():
    k = ProfileKey((1, 1, 0), (2, 2, 1))
    assert k.a == 2 and k.total == 2 and str(k) == "(1,1,0)"
    assert expected_odd_class_size(k) == 1
    assert expected_even_class_size(ProfileKey((0, 0, 0), (1, 1, 2))) == 4
    assert expected_even_class_size(ProfileKey((0, 0, 0), (1, 1, 2)), signed=True) == 8


def test_partition_rejects_even_and_non_regular():
    with pytest.raises(ShapeError):
        partition_by_profile(load_fixture("generic-even-4"))
    p = Pencil(F7, np.eye(3, dtype=np.int64), np.diag([1, 1, 2]))
    with pytest.raises(NotRegular):
        partition_by_profile(p)


# frozen from brute force at q = 7: (starred distinct sizes, excluded sizes, |F0|, |F|)
EVEN_SETS = {
    "even-terminal-112": ({(0, 0, 0): 4}, {}, 7, 6),
    "even-terminal-31": ({(0, 0): 2}, {}, 8, 7),
    "even-terminal-22": ({(0, 0): 2}, {(1, 1): 6}, None, None),
    "even-terminal-400": ({(0,): 1}, {(2,): 7}, None, None),
    "nodal-even-6": ({(0, 0, 0, 0, 0): 16, (1, 0, 0, 0, 0): 8}, {}, 84, 72),
    "cusp-even-6": ({(0, 0, 0, 0): 8, (1, 0, 0, 0): 8}, {}, 64, 56),
    "generic-even-4": ({(0, 0, 0, 0): 8}, {}, 8, 8),
    "generic-even-6": ({(0,) * 6: 32}, {}, 48, 48),
}


@pytest.mark.parametrize("name", list(EVEN_SETS))
def test_even_profile_sets_and_open_fano_sets(name):
    starred, excluded, f0, fopen = EVEN_SETS[name]
    p = load_fixture(name)
    e = even_profile_sets(p)
    assert {k.dims: len(v) for k, v in e.starred.items()} == starred
    assert {k.dims: len(v) for k, v in e.excluded.items()} == excluded
    for k, v in e.starred.items():
        assert len(v) == expected_even_class_size(k)
    assert e.rulings_rational
    for key in e.starred:
        assert sum(len(d.get(key, ())) for d in e.by_ruling.values()) == len(e.starred[key])
    if f0 is None:
        with pytest.raises(ReducibleCurve):
            even_fano_sets(p)
        return
    sets = even_fano_sets(p)
    assert (len(sets.F0), len(sets.F)) == (f0, fopen)
    assert sets.F <= sets.F0
    assert {s.x for s in sets.Fprime} == set(sets.F) and all(s.sign == -1 for s in sets.Fprime)


def test_non_split_q1_has_no_ruling_labels():
    e = even_profile_sets(load_fixture("weierstrass-even-4"))
    assert not e.rulings_rational and e.by_ruling == {}


def test_excluded_spans_are_t_stable():
    from pencil_lab.quadrics import self_adjoint_T

    p = load_fixture("even-terminal-22")
    T = self_adjoint_T(p)
    e = even_profile_sets(p)
    for pts in e.excluded.values():
        for pt in pts:
            assert t_stable_dim(F7, T, pt.span_xtx) == pt.span_xtx.dim


def _partitions(n, largest=None):
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in _partitions(n - k, k):
            yield (k,) + rest


ALL_SHAPES = [s for N in (4, 6) for s in _partitions(N) if len(s) <= 6]


@pytest.mark.parametrize("shape", ALL_SHAPES, ids=lambda s: "".join(map(str, s)))
def test_linear_space_exists_exactly_for_even_shapes(shape):
    p = shape_pencil(shape)
    fast = contains_pn(p)
    assert (fast is not None) == all(m % 2 == 0 for m in shape)
    assert fast == contains_pn_bruteforce(p)
    if fast is not None:
        assert fast.dim == p.N // 2
        assert p.q1.is_isotropic(fast) and p.q2.is_isotropic(fast)


def test_geometric_genus():
    assert geometric_genus((1, 1, 1, 1)) == 1
    assert geometric_genus((1,) * 6) == 2
    assert geometric_genus((2, 1, 1, 1, 1)) == 1
    assert geometric_genus((2, 2)) == -1
