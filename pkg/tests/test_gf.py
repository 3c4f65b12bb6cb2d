from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pencil_lab.errors import FieldMismatch, InvalidInput
from pencil_lab.gf import (
    FieldSpec,
    Fq,
    extend_for_sqrts,
    extension,
    first_irreducible,
    get_field,
    is_prime,
)

SPECS = [FieldSpec.standard(3), FieldSpec.standard(7), FieldSpec.standard(13), FieldSpec.standard(3, 2),
         FieldSpec.standard(5, 2), FieldSpec.standard(3, 3), FieldSpec.standard(7, 2)]


def _naive_mul(spec: FieldSpec, a: int, b: int) -> int:
    """Schoolbook product of digit vectors reduced by the modulus; independent of the log tables."""
    p, k, mod = spec.p, spec.k, spec.modulus
    da = [(a // p**i) % p for i in range(k)]
    db = [(b // p**i) % p for i in range(k)]
    prod = [0] * (2 * k - 1)
    for i, x in enumerate(da):
        for j, y in enumerate(db):
            prod[i + j] = (prod[i + j] + x * y) % p
    for d in range(len(prod) - 1, k - 1, -1):
        c = prod[d]
        if c:
            for i in range(k + 1):
                prod[d - k + i] = (prod[d - k + i] - c * mod[i]) % p
    return sum(prod[i] * p**i for i in range(k))


def _naive_add(spec: FieldSpec, a: int, b: int) -> int:
    p = spec.p
    return sum((((a // p**i) + (b // p**i)) % p) * p**i for i in range(spec.k))


@pytest.mark.parametrize("spec", SPECS, ids=str)
def test_tables_match_schoolbook_arithmetic(spec):
    F = get_field(spec)
    rng = np.random.default_rng(1)
    pairs = rng.integers(0, F.q, size=(300, 2))
    for a, b in pairs:
        a, b = int(a), int(b)
        assert F.mul(a, b) == _naive_mul(spec, a, b)
        assert F.add(a, b) == _naive_add(spec, a, b)


@pytest.mark.parametrize("spec", SPECS, ids=str)
def test_vectorized_ops_agree_with_scalar(spec):
    F = get_field(spec)
    a = F.elements()
    b = (a * 5 + 3) % F.q
    assert list(F.vadd(a, b)) == [F.add(int(x), int(y)) for x, y in zip(a, b)]
    assert list(F.vmul(a, b)) == [F.mul(int(x), int(y)) for x, y in zip(a, b)]
    assert list(F.vsub(a, b)) == [F.sub(int(x), int(y)) for x, y in zip(a, b)]
    nz = a[1:]
    assert list(F.vinv(nz)) == [F.inv(int(x)) for x in nz]


elements = st.integers(min_value=0, max_value=48)


@given(elements, elements, elements)
def test_field_axioms_F49(a, b, c):
    F = get_field(FieldSpec.standard(7, 2))
    assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))
    assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.add(a, F.neg(a)) == 0
    if a:
        assert F.mul(a, F.inv(a)) == 1
        assert F.div(F.mul(b, a), a) == b


@given(st.integers(min_value=0, max_value=80))
def test_sqrt_roundtrip_F81(a):
    F = get_field(FieldSpec.standard(3, 4))
    s = F.sqrt(a)
    squares = {F.mul(x, x) for x in range(F.q)}
    assert (s is not None) == (a in squares) == F.is_square(a)
    if s is not None:
        assert F.mul(s, s) == a
        assert F.lex_key(s) <= F.lex_key(F.neg(s))


@pytest.mark.parametrize("spec", [FieldSpec.standard(13), FieldSpec.standard(3, 3), FieldSpec.standard(5, 2)], ids=str)
def test_tonelli_shanks_on_every_residue(spec):
    F = get_field(spec)
    for a in range(F.q):
        r = F.tonelli_shanks(a)
        if F.is_square(a):
            assert r is not None and F.mul(r, r) == a
        else:
            assert r is None


def test_exactly_half_the_units_are_squares(F49):
    assert sum(F49.is_square(a) for a in range(1, F49.q)) == (F49.q - 1) // 2


def test_fq_wrapper_operators(F9):
    a, b = Fq(F9, 4), Fq(F9, 7)
    assert (a + b) - b == a
    assert (a * b) / b == a
    assert a ** (F9.q - 1) == Fq(F9, 1)
    assert -a + a == Fq(F9, 0)
    assert a.frobenius() == a**3
    assert Fq(F9, [1, 1]).code == 4


def test_fq_rejects_out_of_range(F7):
    with pytest.raises(InvalidInput):
        Fq(F7, 7)


@pytest.mark.parametrize("p,k", [(3, 2), (5, 3), (7, 2), (11, 2)])
def test_first_irreducible_is_irreducible_and_monic(p, k):
    mod = first_irreducible(p, k)
    assert len(mod) == k + 1 and mod[-1] == 1
    # no roots in F_p is enough for k <= 3
    for x in range(p):
        assert sum(c * x**i for i, c in enumerate(mod)) % p != 0


def test_fieldspec_validation():
    with pytest.raises(InvalidInput):
        FieldSpec.standard(2)
    with pytest.raises(InvalidInput):
        FieldSpec.standard(9)
    with pytest.raises(InvalidInput):
        FieldSpec(7, 2, (1, 0, 0, 1))
    spec = FieldSpec.standard(5, 2)
    assert FieldSpec.from_json(spec.to_json()) == spec


def test_fieldspec_rejects_reducible_modulus():
    with pytest.raises(InvalidInput):
        FieldSpec(5, 2, (1, 0, 1))  # x^2 + 1 = (x - 2)(x + 2) over F_5


@pytest.mark.parametrize("spec,degree", [(FieldSpec.standard(7), 2), (FieldSpec.standard(3), 4), (FieldSpec.standard(3, 2), 2)], ids=str)
def test_extension_is_a_ring_homomorphism(spec, degree):
    big_spec, emb = extension(spec, degree)
    assert big_spec.q == spec.q**degree
    F, E = get_field(spec), get_field(big_spec)
    table = emb.table
    assert len(set(table.tolist())) == F.q
    for a in range(F.q):
        for b in range(F.q):
            assert table[F.add(a, b)] == E.add(int(table[a]), int(table[b]))
            assert table[F.mul(a, b)] == E.mul(int(table[a]), int(table[b]))


def test_extend_for_sqrts_makes_values_squares(F7):
    spec, emb = extend_for_sqrts(F7.spec, [3, 5])
    E = get_field(spec)
    assert spec.q == 49
    assert E.is_square(emb(3)) and E.is_square(emb(5))
    same, emb1 = extend_for_sqrts(F7.spec, [1, 2, 4])
    assert same == F7.spec and emb1.is_identity


def test_embedding_checks_source_field(F7, F9):
    _, emb = extension(F7.spec, 2)
    with pytest.raises(FieldMismatch):
        emb(Fq(F9, 1))


@given(st.integers(min_value=-10**6, max_value=10**6))
def test_is_prime_agrees_with_trial_division(n):
    expected = n >= 2 and all(n % d for d in range(2, int(abs(n) ** 0.5) + 1))
    assert is_prime(n) == expected
