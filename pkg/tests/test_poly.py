from __future__ import annotations

from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pencil_lab.gf import FieldSpec, get_field
from pencil_lab.poly import Poly

F7 = get_field(FieldSpec.standard(7))
coeff_lists = st.lists(st.integers(min_value=0, max_value=6), min_size=0, max_size=7)


def P(cs) -> Poly:
    return Poly(F7, cs)


@given(coeff_lists, coeff_lists.filter(lambda c: any(c)))
def test_divmod_reconstructs_dividend(a, b):
    a, b = P(a), P(b)
    quo, rem = divmod(a, b)
    assert quo * b + rem == a
    assert rem.is_zero() or rem.degree < b.degree


@given(coeff_lists, coeff_lists, coeff_lists)
def test_ring_laws(a, b, c):
    a, b, c = P(a), P(b), P(c)
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert (a * b).derivative() == a.derivative() * b + a * b.derivative()


@given(coeff_lists, st.integers(min_value=0, max_value=6))
def test_evaluation_is_a_homomorphism(a, x):
    a = P(a)
    b = P([3, 1, 4])
    assert (a * b)(x) == F7.mul(a(x), b(x))
    assert (a + b)(x) == F7.add(a(x), b(x))


@given(st.lists(st.integers(min_value=0, max_value=6), min_size=1, max_size=6))
def test_roots_recover_multiset(roots):
    f = Poly.from_roots(F7, roots)
    assert dict(f.roots()) == dict(Counter(roots))
    assert f.splits()


@given(coeff_lists.filter(lambda c: any(c)), coeff_lists.filter(lambda c: any(c)))
def test_gcd_divides_both(a, b):
    a, b = P(a), P(b)
    g = a.gcd(b)
    assert (a % g).is_zero() and (b % g).is_zero()
    assert g.lead() == 1
    assert (a.lcm(b) % a).is_zero()


def test_powmod_matches_power_then_reduce():
    f = P([3, 0, 1, 1])
    g = P([1, 2, 3])
    for e in range(12):
        assert g.powmod(e, f) == (g**e) % f


def _irreducibles(degree: int) -> list[Poly]:
    """Monic polynomials with no factor of degree <= degree // 2, by trial division."""
    import itertools

    small = [Poly(F7, list(c) + [1]) for d in range(1, degree // 2 + 1) for c in itertools.product(range(7), repeat=d)]
    out = []
    for c in itertools.product(range(7), repeat=degree):
        f = Poly(F7, list(c) + [1])
        if all(not (f % g).is_zero() for g in small):
            out.append(f)
    return out


def test_number_of_irreducible_quadratics_and_cubics():
    # Gauss: (q^2 - q)/2 and (q^3 - q)/3
    assert len(_irreducibles(2)) == 21
    assert len(_irreducibles(3)) == 112


@pytest.mark.parametrize(
    "degrees",
    [[1], [2], [3], [1, 2], [2, 2], [1, 1, 3], [2, 3], [1, 1, 1, 1], [2, 2, 2]],
)
def test_factor_degrees_on_known_products(degrees):
    pools = {d: _irreducibles(d) for d in set(degrees)}
    f = Poly(F7, [1])
    for i, d in enumerate(degrees):
        f = f * pools[d][(5 * i + d) % len(pools[d])]
    assert f.factor_degrees() == sorted(degrees)


def test_factor_degrees_in_characteristic_three_with_pth_powers():
    F3 = get_field(FieldSpec.standard(3))
    irreducible_quadratic = Poly(F3, [1, 0, 1])  # x^2 + 1
    f = irreducible_quadratic**3 * Poly(F3, [1, 1])
    assert f.factor_degrees() == [1, 2, 2, 2]


def test_monic_and_scale():
    f = P([2, 4, 3])
    m = f.monic()
    assert m.lead() == 1
    assert m.scale(3) == f


def test_roots_of_zero_polynomial_is_an_error():
    with pytest.raises(ValueError):
        Poly(F7).roots()
