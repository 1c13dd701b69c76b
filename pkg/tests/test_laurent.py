import pytest
from hypothesis import assume, given, strategies as st

from ramify.errors import (
    CompositionDomain,
    NoNthRoot,
    NotAPthPower,
    NotAUniformizerSeries,
    PrecisionExhausted,
    ValuationIndeterminate,
)
from ramify.finite_field import FqField
from ramify.laurent import LaurentSeries as LS

F3, F5, F9 = FqField(3), FqField(5), FqField(3, 2)


def ser(F, coeffs, val=0, prec=None):
    return LS.from_coeffs(F, coeffs, val, prec)


def coeff_list(f, lo, hi):
    return [int(f.coefficient(e)) for e in range(lo, hi)]


# naive list oracles over F_p
def naive_mul(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    return out


def naive_compose(f, g, p, n):
    """f(g) mod s^n for power series lists f and g with g[0] = 0."""
    out = [0] * n
    power = [1] + [0] * (n - 1)
    for c in f:
        out = [(o + c * x) % p for o, x in zip(out, power)]
        power = naive_mul(power, g, p)[:n]
    return out


def series_st(F, min_val=-3, max_val=3, max_len=12):
    @st.composite
    def make(draw):
        v = draw(st.integers(min_val, max_val))
        n = draw(st.integers(1, max_len))
        rows = [draw(st.tuples(*[st.integers(0, F.p - 1)] * F.n)) for _ in range(n)]
        rows[0] = draw(st.tuples(*[st.integers(0, F.p - 1)] * F.n).filter(any))
        return LS.from_coeffs(F, [list(r) for r in rows], v)

    return make()


# ---------------------------------------------------------------- examples

def test_examples_arith():
    t = LS.gen(F3, 10)
    f = t.invert() + 1
    assert (f * t).agrees_with(ser(F3, [1, 1], 0, 9))
    inv = ser(F3, [1, 1], 0, 8).invert()
    assert coeff_list(inv, 0, 8) == [1, 2, 1, 2, 1, 2, 1, 2]
    assert (t.invert() ** -2).agrees_with(LS.monomial(F3, 1, 2, 11))


def test_examples_valuation():
    assert ser(F3, [1, 1, 1], -1).valuation() == -1
    with pytest.raises(ValuationIndeterminate):
        LS.zero(F3, 10).valuation()
    one = LS.constant(F3, 1, 10)
    assert ((one + LS.gen(F3, 10)) - one).valuation() == 1


def test_examples_compose():
    s = LS.gen(F3, 20)
    f = LS.monomial(F3, 1, -1, 10)
    assert f.compose(s**3).agrees_with(LS.monomial(F3, 1, -3, 40))
    g = ser(F3, [0, 1, 1], 0, 10)
    f2 = ser(F3, [0, 1, 1], 0, 10)
    assert coeff_list(f2.compose(g), 0, 6) == [0, 1, 2, 2, 1, 0]
    assert LS.gen(F3, 30).compose(g) == g.truncate(min(30, g.prec))
    with pytest.raises(CompositionDomain):
        f2.compose(LS.constant(F3, 1, 5))


def test_examples_reverse():
    assert LS.gen(F3, 10).reverse().agrees_with(LS.gen(F3, 10))
    r = ser(F3, [0, 1, 1], 0, 4).reverse()
    assert coeff_list(r, 0, 4) == [0, 1, 2, 2]
    with pytest.raises(NotAUniformizerSeries):
        LS.monomial(F3, 1, 2, 10).reverse()


def test_examples_roots():
    f = ser(F3, [0, 0, 0, 1, 0, 0, 1], 0, 9)
    assert coeff_list(f.pth_root(), 0, 3) == [0, 1, 1]
    r = ser(F3, [1, 1], 0, 2).nth_root(2)
    assert coeff_list(r, 0, 2) == [1, 2]
    with pytest.raises(NotAPthPower):
        LS.gen(F3, 10).pth_root()
    with pytest.raises(NoNthRoot):
        LS.constant(F3, 2, 5).nth_root(2)  # 2 is not a square in F_3


def test_text_form():
    f = ser(F3, [2, 1, 0, 1], -1, 12)
    assert f.to_str() == "2*t^-1 + 1 + t^2 + O(t^12)"


def test_coefficient_beyond_precision():
    with pytest.raises(PrecisionExhausted):
        LS.gen(F3, 5).coefficient(5)


# ---------------------------------------------------------------- oracles

@given(series_st(F5, 0, 0), series_st(F5, 0, 0))
def test_mul_matches_naive(f, g):
    n = min(f.relprec, g.relprec)
    want = naive_mul(coeff_list(f, 0, n), coeff_list(g, 0, n), 5)[:n]
    assert coeff_list(f * g, 0, n) == want


@given(series_st(F3, 0, 0, 10), series_st(F3, 1, 1, 10))
def test_compose_matches_naive(f, g):
    h = f.compose(g)
    n = h.prec
    gl = coeff_list(g, 0, min(n, g.prec))
    want = naive_compose(coeff_list(f, 0, f.prec), gl + [0] * (n - len(gl)), 3, n)
    assert coeff_list(h, 0, n) == want


# ---------------------------------------------------------------- properties

@pytest.mark.parametrize("F", [F3, F9], ids=repr)
@given(data=st.data())
def test_reverse_is_compositional_inverse(F, data):
    f = data.draw(series_st(F, 1, 1, 15))
    g = f.reverse()
    ident = f.compose(g)
    assert ident.agrees_with(LS.gen(F, ident.prec))
    assert ident.prec >= f.prec


@pytest.mark.parametrize("F", [F3, F5, F9], ids=repr)
@given(data=st.data())
def test_frobenius_additive(F, data):
    f, g = data.draw(series_st(F)), data.draw(series_st(F))
    lhs = (f + g) ** F.p
    rhs = f**F.p + g**F.p
    assert lhs.agrees_with(rhs)
    assert lhs.prec == rhs.prec


@pytest.mark.parametrize("F", [F3, F9], ids=repr)
@given(data=st.data())
def test_ring_laws(F, data):
    f, g, h = (data.draw(series_st(F)) for _ in range(3))
    assert (f * g).agrees_with(g * f)
    assert ((f * g) * h).agrees_with(f * (g * h))
    assert (f * (g + h)).agrees_with(f * g + f * h)
    assert (f * f.invert()).agrees_with(LS.constant(F, 1, 1000))
    assert (f * g).valuation() == f.valuation() + g.valuation()
    assert (f * g).prec == min(f.prec + g.val, g.prec + f.val)


@given(series_st(F5, -2, 2))
def test_pth_root_inverts_frobenius(f):
    assert f.frobenius().pth_root() == f


@given(series_st(F3, -4, 4), st.sampled_from([2]))
def test_nth_root(f, m):
    assume(f.valuation() % m == 0)
    assume(F3.nth_root(f.leading_coefficient(), m) is not None)
    r = f.nth_root(m)
    assert (r**m).agrees_with(f)


@given(series_st(F9, -4, 4), st.sampled_from([2, 4, 8]))
def test_nth_root_f9(f, m):
    f = f.shift(-f.valuation())  # valuation 0
    assume(F9.nth_root(f.leading_coefficient(), m) is not None)
    r = f.nth_root(m)
    assert (r**m).agrees_with(f)
    assert (r**m).prec >= f.prec


@given(series_st(F3, -3, 3), st.integers(2, 4))
def test_inflate_is_compose_with_monomial(f, m):
    g = LS.monomial(F3, 1, m, 1000)
    assert f.inflate(m).agrees_with(f.compose(g))


@given(series_st(F3, -3, 3), series_st(F3, 1, 2))
def test_compose_is_ring_hom(f, g):
    two = f * f
    assert two.compose(g).agrees_with(f.compose(g) * f.compose(g))
