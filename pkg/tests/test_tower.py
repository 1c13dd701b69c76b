import json

import pytest
from hypothesis import given, settings, strategies as st

from ramify.errors import (
    ExprSyntaxError,
    NoSuchRoot,
    NotCoprime,
    NotWildTotallyRamified,
    SpecError,
    TrivialStep,
    UnknownSymbol,
)
from ramify.expr import parse_expr
from ramify.finite_field import FqField
from ramify.laurent import LaurentSeries as LS
from ramify.tower import GUARD, TowerSpec, as_reduce, bezout, build, eval_expr, extend_as, extend_tame, base_model

F3 = FqField(3)


def spec(steps, p=3, n=1, precision=None):
    d = {"field": {"p": p, "n": n}, "steps": steps}
    if precision:
        d["precision"] = precision
    return TowerSpec.from_json(d)


def AS(rhs):
    return {"type": "artin_schreier", "rhs": rhs}


def TAME(m):
    return {"type": "tame", "m": m}


H11 = [AS("t^-1"), AS("t^-4"), AS("g1*t^-4 + 2*t^-5")]


def check_invariants(model):
    N, g = model.precision, model.guard
    assert model.registry[0].valuation() == model.e == model.degree
    for k, (st_, res) in enumerate(zip(model.steps, model.residuals()), 1):
        assert res.is_zero(), f"step {k} residual"
        if st_.kind == "artin_schreier":
            rhs = eval_expr(model, st_.expr)
            assert res.prec - rhs.valuation() >= N - g
        else:
            assert res.prec >= N - g
    for k in range(len(model.steps) + 1):
        assert model.uniformizer_at_top(k).valuation() == model.degree // model.level_degree(k)
    for k, st_ in enumerate(model.steps, 1):
        if st_.kind == "artin_schreier":
            lvl = model.levels[k]
            mono = lvl.S**st_.i * lvl.X**st_.j
            assert mono.valuation() == 1 and mono.agrees_with(LS.gen(model.field, mono.prec))


# ---------------------------------------------------------------- reduction

def test_reduce_examples():
    t = LS.gen(F3, 20)
    red = as_reduce(t**-3)
    assert red.b == 1
    assert red.reduced.agrees_with(t**-1) and red.reduced.valuation() == -1
    assert red.shift == {-1: F3.one}
    f = t**-2 + t**-1
    red = as_reduce(f)
    assert red.b == 2 and red.shift == {} and red.reduced == f
    with pytest.raises(NotWildTotallyRamified):
        as_reduce(LS.constant(F3, 1, 10))


def test_reduce_trivial():
    t = LS.gen(F3, 20)
    with pytest.raises(TrivialStep):
        as_reduce(t**-3 - t**-1)
    F9 = FqField(3, 2)
    w = F9.gen
    with pytest.raises(TrivialStep):
        as_reduce(LS.constant(F9, w**3 - w, 10))


def _oracle_break(terms: dict, p: int) -> int | None:
    """Reduced break of a Laurent polynomial over F_p by repeated c t^-pk -> c t^-k."""
    terms = {e: c % p for e, c in terms.items() if c % p}
    while True:
        neg = [e for e, c in terms.items() if e < 0 and c]
        if not neg:
            return None
        v = min(neg)
        if v % p:
            return -v
        c = terms.pop(v)
        terms[v // p] = (terms.get(v // p, 0) + c) % p
        terms = {e: c for e, c in terms.items() if c}


@settings(max_examples=40)
@given(st.dictionaries(st.integers(-12, 2), st.integers(1, 2), min_size=1, max_size=5))
def test_reduce_matches_oracle(terms):
    F = F3
    f = LS.zero(F, 40)
    for e, c in terms.items():
        f = f + LS.monomial(F, c, e, 40)
    want = _oracle_break(terms, 3)
    if want is None:
        with pytest.raises((TrivialStep, NotWildTotallyRamified)):
            as_reduce(f)
    else:
        assert as_reduce(f).b == want


def test_bezout():
    for p in (3, 5, 7):
        for b in range(1, 30):
            if b % p:
                i, j = bezout(p, b)
                assert p * i - b * j == 1 and 0 <= j < p


# ---------------------------------------------------------------- building

def test_cp_model():
    m = build(spec([AS("t^-1")]))
    assert m.degree == 3
    T, Y = m.registry[0], m.registry[1]
    assert T.valuation() == 3 and T.leading_coefficient() == F3.one
    assert Y.valuation() == -1 and Y.leading_coefficient() == F3.one
    check_invariants(m)
    rel = eval_expr(m, parse_expr("g1^3 - g1"))
    assert rel.agrees_with(T.invert())


def test_s3_model():
    m = build(spec([TAME(2), AS("g1^-1")]))
    assert m.degree == 6
    check_invariants(m)


def test_tame_models():
    m = build(spec([TAME(2)]))
    assert m.registry[0] == LS.monomial(F3, 1, 2, m.registry[0].prec)
    with pytest.raises(NoSuchRoot):
        build(spec([TAME(4)]))
    with pytest.raises(NotCoprime):
        build(spec([TAME(3)]))
    m9 = build(spec([TAME(4)], n=2))
    assert m9.degree == 4


def test_h11_model_and_eval():
    m2 = build(spec(H11[:2]))
    m3 = build(spec(H11))
    assert m3.degree == 27
    check_invariants(m3)
    e = parse_expr("t^-4*g1 + 2*t^-5")
    assert eval_expr(m2, e).valuation() == -45
    assert eval_expr(m3, e).valuation() == -135
    assert eval_expr(m3, parse_expr("t")).valuation() == 27


def test_extend_matches_build():
    m = extend_as(extend_as(base_model(F3), "t^-1"), "t^-4")
    ref = build(spec(H11[:2]))
    assert all(m.registry[k].agrees_with(ref.registry[k]) for k in ref.registry)
    m2 = extend_tame(base_model(F3), 2)
    assert m2.degree == 2


def test_step_errors_carry_index():
    with pytest.raises(NotWildTotallyRamified) as err:
        build(spec([AS("t^-1"), AS("1")]))
    assert err.value.step == 2
    with pytest.raises(UnknownSymbol) as err:
        build(spec([AS("t^-1"), AS("t^-4"), AS("g3*t^-4")]))
    assert err.value.step == 3
    with pytest.raises(ExprSyntaxError):
        build(spec([AS("t^^2")]))
    with pytest.raises(UnknownSymbol):
        build(spec([AS("w*t^-1")]))


def test_dependent_step_splits():
    # t^-9 + t^-1 = wp(t^-3 + t^-1) + 2 t^-1 and 2 t^-1 = wp(2 g1)
    with pytest.raises(TrivialStep) as err:
        build(spec([AS("t^-1"), AS("t^-9 + t^-1")]))
    assert err.value.step == 2


def test_generator_power_zero_is_valid():
    # g2*g1^0*t^0 only references built generators; it is an ordinary step
    m = build(spec([AS("t^-1"), AS("t^-4"), AS("g2*g1^0*t^0")]))
    assert m.degree == 27
    m = build(spec([AS("t^-1"), AS("t^-4"), AS("g2*g1^0*t^0 + t^-5")]))
    assert m.degree == 27


@pytest.mark.parametrize(
    "bad",
    [
        "{}",
        "not json",
        '{"field": {"p": 3}, "steps": [{"type": "weird"}]}',
        '{"field": {"p": 3}, "steps": [{"type": "tame"}]}',
        '{"field": {"p": 3}, "steps": [{"type": "artin_schreier"}]}',
        '{"field": {}, "steps": []}',
        '{"field": {"p": 3}, "steps": [], "precision": 2}',
    ],
)
def test_spec_errors(bad):
    with pytest.raises(SpecError):
        TowerSpec.from_json(bad)


def test_spec_roundtrip():
    s = spec(H11, precision=80)
    again = TowerSpec.from_json(s.dumps())
    assert again.to_json() == s.to_json()
    assert json.loads(s.dumps())["precision"] == 80


@pytest.mark.parametrize(
    "steps",
    [[AS("t^-1")], [AS("t^-2"), AS("t^-1")], H11, [TAME(2), AS("g1^-1")], [TAME(2), AS("t^-1 + t^-2")]],
)
def test_prefix_stability(steps):
    a = build(spec(steps))
    b = build(spec(steps), precision=2 * a.precision)
    assert b.precision >= 2 * a.precision
    for k in a.registry:
        assert a.registry[k].agrees_with(b.registry[k])
        assert a.registry[k].valuation() == b.registry[k].valuation()


def test_deterministic():
    a, b = build(spec(H11)), build(spec(H11))
    assert all(a.registry[k] == b.registry[k] for k in a.registry)


def test_default_precision_and_guard():
    m = build(spec([AS("t^-1")]))
    assert m.precision >= 64 and m.guard == GUARD


@settings(max_examples=15)
@given(st.lists(st.sampled_from(["t^-1", "t^-2", "t^-4", "t^-5", "2*t^-7 + t^-3", "t^-9 + t^-2"]), min_size=1, max_size=2, unique=True))
def test_random_wild_towers_hold_invariants(rhss):
    m = build(spec([AS(r) for r in rhss]))
    check_invariants(m)
