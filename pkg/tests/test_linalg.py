from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pencil_lab import linalg as la
from pencil_lab.errors import PencilLabError
from pencil_lab.gf import FieldSpec, get_field
from pencil_lab.poly import Poly

F7 = get_field(FieldSpec.standard(7))
F9 = get_field(FieldSpec.standard(3, 2))


def matrices(F, n_min=1, n_max=4, square=True):
    @st.composite
    def build(draw):
        n = draw(st.integers(n_min, n_max))
        m = n if square else draw(st.integers(n_min, n_max))
        vals = draw(st.lists(st.integers(0, F.q - 1), min_size=n * m, max_size=n * m))
        return np.array(vals, dtype=np.int64).reshape(n, m)

    return build()


def _perm_sign(perm) -> int:
    inv = sum(1 for i, j in itertools.combinations(range(len(perm)), 2) if perm[i] > perm[j])
    return -1 if inv % 2 else 1


def leibniz_det(F, m) -> int:
    n = m.shape[0]
    total = 0
    for perm in itertools.permutations(range(n)):
        term = 1
        for i in range(n):
            term = F.mul(term, int(m[i, perm[i]]))
        total = F.add(total, term) if _perm_sign(perm) > 0 else F.sub(total, term)
    return total


@pytest.mark.parametrize("F", [F7, F9], ids=["F7", "F9"])
@given(data=st.data())
def test_det_matches_permutation_expansion(F, data):
    m = data.draw(matrices(F))
    assert la.det(F, m) == leibniz_det(F, m)


@given(matrices(F7), matrices(F7))
def test_det_is_multiplicative(a, b):
    if a.shape != b.shape:
        return
    assert la.det(F7, la.matmul(F7, a, b)) == F7.mul(la.det(F7, a), la.det(F7, b))


@given(matrices(F7, square=False))
def test_rank_nullity(m):
    K = la.kernel_basis(F7, m)
    assert la.rank(F7, m) + K.shape[0] == m.shape[1]
    if K.shape[0]:
        assert not np.any(F7.matmul(m, K.T))


@given(matrices(F9))
def test_inverse_when_invertible(m):
    if la.det(F9, m) == 0:
        with pytest.raises(PencilLabError):
            la.inverse(F9, m)
        return
    inv = la.inverse(F9, m)
    assert np.array_equal(la.matmul(F9, m, inv), la.identity(F9, m.shape[0]))
    rhs = np.arange(m.shape[0], dtype=np.int64) % F9.q
    x = la.solve(F9, m, rhs[:, None])
    assert np.array_equal(F9.matmul(m, x)[:, 0], rhs)


@given(matrices(F7, n_max=5))
def test_charpoly_is_det_of_x_minus_m_and_kills_m(m):
    n = m.shape[0]
    entries = [
        [Poly(F7, (F7.neg(int(m[i, j])), 1 if i == j else 0)) for j in range(n)] for i in range(n)
    ]
    chi = la.charpoly(F7, m)
    assert chi == la.det_poly_matrix(F7, entries)
    assert not np.any(la.poly_at_matrix(chi, m))
    mu = la.minpoly(F7, m)
    assert not np.any(la.poly_at_matrix(mu, m))
    assert (chi % mu).is_zero()


def test_minpoly_of_jordan_block_and_scalar():
    J = np.array([[2, 1, 0], [0, 2, 1], [0, 0, 2]])
    assert la.minpoly(F7, J) == Poly.from_roots(F7, [2, 2, 2])
    assert la.minpoly(F7, la.scalar_matrix(F7, 3, 2)) == Poly.from_roots(F7, [2])


def test_generalized_eigenspace_dimension_equals_multiplicity():
    # block diag(J_2(1), 3, 3)
    m = np.array([[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 3, 0], [0, 0, 0, 3]])
    assert la.generalized_eigenspace(F7, m, 1, 2).dim == 2
    assert la.generalized_eigenspace(F7, m, 3, 2).dim == 2


@given(matrices(F7, n_min=1, n_max=4, square=False), matrices(F7, n_min=1, n_max=4, square=False))
def test_subspace_dimension_formula(a, b):
    if a.shape[1] != b.shape[1]:
        return
    N = a.shape[1]
    U = la.Subspace.from_rows(F7, a, N)
    W = la.Subspace.from_rows(F7, b, N)
    assert (U + W).dim + (U & W).dim == U.dim + W.dim
    assert (U + W).contains_subspace(U)
    assert U.contains_subspace(U & W)
    for row in (U & W).basis:
        assert U.contains(row) and W.contains(row)


@given(matrices(F7, n_min=2, n_max=4))
def test_image_and_preimage(m):
    N = m.shape[0]
    U = la.Subspace.from_rows(F7, np.eye(N, dtype=np.int64)[:1], N)
    img = U.image(m)
    assert img.dim <= 1
    assert U.image(m).preimage(m).contains_subspace(U)
    # vectors are rows, images are rows @ m
    pre = la.Subspace.full(F7, N).preimage(m)
    assert pre.dim == N


def test_coordinates_roundtrip():
    U = la.Subspace.from_rows(F7, [[1, 2, 0, 3], [0, 1, 1, 1]], 4)
    v = F7.vadd(F7.vmul(U.basis[0], 5), F7.vmul(U.basis[1], 2))
    c = U.coordinates(v)
    assert np.array_equal(F7.matmul(c[None, :], U.basis)[0], v)


def test_complement_rows_completes_a_basis():
    inner = la.Subspace.from_rows(F7, [[1, 1, 0, 0]], 4)
    outer = la.Subspace.from_rows(F7, [[1, 1, 0, 0], [0, 0, 1, 0], [0, 1, 0, 1]], 4)
    comp = la.complement_rows(F7, inner, outer)
    assert comp.shape[0] == 2
    total = la.Subspace.from_rows(F7, np.concatenate([inner.basis, comp]), 4)
    assert total == outer


@pytest.mark.parametrize("N,d,q", [(3, 1, 3), (4, 2, 3), (4, 2, 5), (5, 2, 3), (3, 2, 7)])
def test_grassmannian_enumeration_matches_gaussian_binomial(N, d, q):
    subs = list(la.grassmannian_iter(N, d, FieldSpec.standard(q)))
    assert len(subs) == la.gaussian_binomial(N, d, q)
    assert len(set(subs)) == len(subs)
    assert all(s.dim == d for s in subs)


def test_gaussian_binomial_small_values():
    assert la.gaussian_binomial(4, 2, 2) == 35
    assert la.gaussian_binomial(4, 2, 7) == 2850
    assert la.gaussian_binomial(5, 0, 7) == 1
    assert la.gaussian_binomial(3, 4, 7) == 0


@pytest.mark.parametrize("F", [F7, F9], ids=["F7", "F9"])
def test_projective_points_of_a_plane(F):
    U = la.Subspace.from_rows(F, [[1, 0, 2, 0], [0, 1, 0, 1], [0, 0, 1, 1]], 4)
    pts = la.projective_points(F, U)
    assert pts.shape[0] == F.q**2 + F.q + 1
    keys = la.point_keys(F, pts)
    assert len(set(keys.tolist())) == pts.shape[0]
    assert all(U.contains(p) for p in pts)
    assert np.array_equal(la.normalize_rows(F, F.vmul(pts, 2)), pts)
