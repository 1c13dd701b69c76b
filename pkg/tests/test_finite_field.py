import itertools

import pytest
from hypothesis import given, strategies as st

from ramify.errors import DivisionByZero, NoSuchRoot, NotPrime, ReducibleModulus
from ramify.finite_field import FqField, is_irreducible

FIELDS = [FqField(3), FqField(5), FqField(3, 2), FqField(5, 2), FqField(3, 3), FqField(2, 3)]


def elems(F):
    return st.tuples(*[st.integers(0, F.p - 1)] * F.n).map(lambda c: F(list(c)))


def _has_root(coeffs, p):
    return any(sum(c * x**k for k, c in enumerate(coeffs)) % p == 0 for x in range(p))


def test_prime_field():
    F = FqField(3)
    assert F.q == 3 and F.n == 1


def test_f9_modulus_is_smallest_irreducible():
    # oracle: a monic quadratic is irreducible iff it has no root in F_3
    first = next(
        [c0, c1, 1] for c1, c0 in itertools.product(range(3), repeat=2) if not _has_root([c0, c1, 1], 3)
    )
    assert list(FqField(3, 2).modulus) == first == [1, 0, 1]


def test_not_prime():
    with pytest.raises(NotPrime):
        FqField(4)


def test_reducible_modulus():
    with pytest.raises(ReducibleModulus):
        FqField(3, 2, [2, 0, 1])  # w^2 - 1


def test_irreducibility_against_root_count():
    for c in itertools.product(range(5), repeat=2):
        assert is_irreducible(list(c) + [1], 5) == (not _has_root(list(c) + [1], 5))


def test_basic_ops():
    F3 = FqField(3)
    assert F3(2).inverse() == F3(2)
    assert F3(2) ** -1 == F3(2)
    F9 = FqField(3, 2)
    w = F9.gen
    assert w * w == F9(2)
    with pytest.raises(DivisionByZero):
        F3(0).inverse()


def test_pth_root_examples():
    F3, F9 = FqField(3), FqField(3, 2)
    assert F3(2).pth_root() == F3(2)
    assert F9.gen.pth_root() == F9.gen * 2
    assert F9.zero.pth_root() == F9.zero


def test_root_of_unity_examples():
    assert FqField(3).root_of_unity(2) == FqField(3)(2)
    with pytest.raises(NoSuchRoot):
        FqField(3).root_of_unity(4)
    F9 = FqField(3, 2)
    assert F9.root_of_unity(4) == F9.gen
    assert F9.root_of_unity(1) == F9.one


def test_wp_image_examples():
    F3, F9 = FqField(3), FqField(3, 2)
    assert F3.wp_image_test(F3(0))
    assert not F3.wp_image_test(F3(1))
    assert sum(F9.wp_image_test(x) for x in F9.elements()) == 3


@pytest.mark.parametrize("F", FIELDS, ids=repr)
def test_wp_image_is_index_p_subgroup(F):
    img = [x for x in F.elements() if F.wp_image_test(x)]
    assert len(img) * F.p == F.q
    assert all(F.wp_image_test(x + y) for x in img for y in img)


@pytest.mark.parametrize("F", FIELDS, ids=repr)
def test_roots_of_unity_have_exact_order(F):
    for m in range(1, F.q):
        if (F.q - 1) % m:
            with pytest.raises(NoSuchRoot):
                F.root_of_unity(m)
            continue
        z = F.root_of_unity(m)
        assert z**m == F.one
        assert all(z**d != F.one for d in range(1, m))


@pytest.mark.parametrize("F", FIELDS, ids=repr)
def test_element_count(F):
    assert len(set(F.elements())) == F.q


@pytest.mark.parametrize("F", FIELDS, ids=repr)
@given(data=st.data())
def test_field_axioms(F, data):
    x, y, z = (data.draw(elems(F)) for _ in range(3))
    assert (x + y) * z == x * z + y * z
    assert (x * y) * z == x * (y * z)
    assert x - x == F.zero
    if x:
        assert x * x.inverse() == F.one
        assert x ** -3 == (x**3).inverse()


@pytest.mark.parametrize("F", FIELDS, ids=repr)
@given(data=st.data())
def test_pth_root_is_frobenius_inverse(F, data):
    x, y = data.draw(elems(F)), data.draw(elems(F))
    r = x.pth_root()
    assert r**F.p == x
    assert (x + y).pth_root() == r + y.pth_root()
    assert (x * y).pth_root() == r * y.pth_root()


def test_serialization_roundtrip():
    F = FqField(5, 2)
    assert FqField.from_json(F.to_json()) == F
