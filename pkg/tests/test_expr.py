from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ramify import expr as ex
from ramify.errors import ExprSyntaxError, UnknownSymbol


def test_negative_exponent_power():
    assert ex.parse_expr("t^-1") == ex.Pow(ex.Sym("t", 0), -1)


def test_h11_third_rhs_is_sum_of_two_monomials():
    e = ex.parse_expr("g1*t^-4 + 2*t^-5")
    assert isinstance(e, ex.BinOp) and e.op == "+"
    assert e.left == ex.BinOp("*", ex.Sym("g1", 1), ex.Pow(ex.Sym("t", 0), -4))
    assert e.right == ex.BinOp("*", ex.Num(2), ex.Pow(ex.Sym("t", 0), -5))


@pytest.mark.parametrize(
    "text,offset",
    [("t^^2", 2), ("t +", 3), ("(t", 2), ("t^x", 2), ("t^2^3", 3), ("2 $ t", 2), (")", 0)],
)
def test_syntax_errors_report_offsets(text, offset):
    with pytest.raises(ExprSyntaxError) as err:
        ex.parse_expr(text)
    assert err.value.offset == offset


def test_unknown_symbols():
    with pytest.raises(UnknownSymbol):
        ex.parse_expr("x + t")
    with pytest.raises(UnknownSymbol):
        ex.parse_expr("g3*t", max_generator=2)
    assert ex.symbols(ex.parse_expr("g2*t + w", max_generator=2)) == {0, 2}


def test_unary_minus_binds_looser_than_power():
    assert ex.parse_expr("-t^2") == ex.Neg(ex.Pow(ex.Sym("t", 0), 2))


# ---------------------------------------------------------------- random trees

leaf = st.one_of(
    st.integers(0, 9).map(ex.Num),
    st.just(ex.Sym("t", 0)),
    st.integers(1, 3).map(lambda k: ex.Sym(f"g{k}", k)),
)


def extend(children):
    return st.one_of(
        children.map(ex.Neg),
        st.tuples(children, st.integers(-3, 3)).map(lambda a: ex.Pow(*a)),
        st.tuples(st.sampled_from("+-*"), children, children).map(lambda a: ex.BinOp(*a)),
    )


trees = st.recursive(leaf, extend, max_leaves=10)


@given(trees)
def test_to_text_roundtrip(e):
    assert ex.parse_expr(ex.to_text(e)) == e


VALUES = {0: Fraction(3, 7), 1: Fraction(-2, 5), 2: Fraction(5, 3), 3: Fraction(7, 2)}


def _ours(e):
    return ex.evaluate(e, lambda s: VALUES[s.index], Fraction)


def _python(text):
    env = {"t": VALUES[0], **{f"g{k}": VALUES[k] for k in (1, 2, 3)}}
    return eval(text.replace("^", "**"), {"__builtins__": {}}, env)


@given(trees)
def test_precedence_matches_python(e):
    text = ex.to_text(e)
    try:
        want = _python(text)
    except ZeroDivisionError:
        with pytest.raises(ZeroDivisionError):
            _ours(e)
        return
    assert _ours(e) == want


@given(trees, st.integers(1, 4))
def test_rename_shifts_generators(e, off):
    moved = ex.rename(e, lambda s: ex.Sym(f"g{s.index + off}", s.index + off) if s.index > 0 else s)
    assert ex.symbols(moved) == {k + off if k else 0 for k in ex.symbols(e)}
