import itertools

import pytest

from ramify.errors import ExtensionNotGalois
from ramify.galois import enumerate_automorphisms, group_table, lower_number, solve_mod_p, verify_compositions
from ramify.laurent import LaurentSeries as LS
from ramify.pgroups import h11_generators, identify_h11, symmetric3
from ramify.tower import TowerSpec, build
from ramify.witness import cp_spec, h11_spec, s3_spec, split_product_spec

import numpy as np


@pytest.fixture(scope="module")
def h11():
    m = build(h11_spec(3, 1, 4))
    autos = enumerate_automorphisms(m)
    return m, autos, group_table(m, autos)


@pytest.fixture(scope="module")
def s3():
    m = build(s3_spec())
    autos = enumerate_automorphisms(m)
    return m, autos, group_table(m, autos)


@pytest.mark.parametrize("p,b", [(3, 1), (3, 2), (3, 4), (3, 5), (5, 1), (5, 3), (7, 2)])
def test_cp_lower_number_is_b_plus_1(p, b):
    m = build(cp_spec(p, 1, b))
    autos = enumerate_automorphisms(m)
    assert len(autos) == p
    assert sorted(a.shifts[0][0] for a in autos) == list(range(p))
    # oracle: an Artin-Schreier C_p with break b has i(sigma) = b + 1 for sigma != 1
    assert sorted(a.i for a in autos if a.i is not None) == [b + 1] * (p - 1)
    assert [a.i for a in autos if a.is_identity] == [None]


def test_h11_corrections_follow_the_root_pattern(h11):
    m, autos, _ = h11
    assert len(autos) == 27
    for a in autos:
        c0, c1, c2 = a.shifts[2]
        # z -> z + n x + c with n the shift of y (x = g2, y = g1)
        assert c1 == 0 and c2 == a.shifts[0][0]
        assert a.shifts[1][1] == 0
        assert a.scales == [1, 1, 1]


def test_s3_automorphisms(s3):
    m, autos, _ = s3
    assert len(autos) == 6
    for a in autos:
        if a.tame == [1]:
            assert a.scales == [2] and a.i == 1
        elif not a.is_identity:
            assert a.i == 2


def test_non_galois_is_detected():
    spec = TowerSpec.from_json({"field": {"p": 3}, "steps": [{"type": "tame", "m": 2}, {"type": "artin_schreier", "rhs": "g1^-1 + g1^-2"}]})
    with pytest.raises(ExtensionNotGalois):
        enumerate_automorphisms(build(spec))


@pytest.mark.parametrize("fixture", ["h11", "s3"])
def test_automorphisms_fix_the_base(fixture, request):
    m, autos, _ = request.getfixturevalue(fixture)
    t = m.registry[0]
    for a in autos:
        assert a.A.valuation() == 1
        img = t.compose(a.A)
        assert img.agrees_with(t)
        assert img.prec - t.valuation() >= m.precision - m.guard


@pytest.mark.parametrize("fixture", ["h11", "s3"])
def test_generator_residuals_under_sigma(fixture, request):
    """sigma(g_k) = lambda g_k + c + sum c_l g_l satisfies wp(sigma g_k) = sigma(rhs_k)."""
    from ramify.tower import eval_expr

    m, autos, _ = request.getfixturevalue(fixture)
    reg = m.registry
    for a in autos:
        for t_idx, k in enumerate(m.wild):
            lam, sh = a.scales[t_idx], a.shifts[t_idx]
            img = reg[k].scale(lam) + sh[0]
            for c, l in zip(sh[1:], m.wild):
                if c:
                    img = img + reg[l].scale(c)
            # sigma acts on series by substitution: sigma(g_k)(s) = g_k(sigma s)
            assert reg[k].compose(a.A).agrees_with(img)
            rhs = eval_expr(m, m.steps[k - 1].expr).compose(a.A)
            assert img.wp().agrees_with(rhs)


def test_lower_number_identity_is_none(h11):
    m, autos, _ = h11
    ident = [a for a in autos if a.is_identity]
    assert len(ident) == 1 and lower_number(m, ident[0]) is None


@pytest.mark.parametrize("fixture", ["h11", "s3"])
def test_ultrametric(fixture, request):
    _, autos, G = request.getfixturevalue(fixture)
    big = 10**9
    iv = [a.i if a.i is not None else big for a in autos]
    for x, y in itertools.product(range(G.order), repeat=2):
        assert iv[G.mul[x, y]] >= min(iv[x], iv[y])


def test_tables(h11, s3):
    m = build(cp_spec(3, 1, 1))
    G = group_table(m, enumerate_automorphisms(m))
    assert G.order == 3 and G.is_abelian()
    _, _, H = h11
    assert not H.is_abelian() and identify_h11(H, 3)
    x, y, z = h11_generators(H, 3)
    assert H.m(x, z) == H.m(z, x) and H.m(y, z) == H.m(z, y) and H.commutator(x, y) == z
    _, autos, S = s3
    sigma = next(k for k, a in enumerate(autos) if a.tame == [1])
    tau = next(k for k, a in enumerate(autos) if a.tame == [0] and not a.is_identity)
    assert S.m(S.m(sigma, tau), S.inv[sigma]) == S.inv[tau]
    assert sorted(S.orders) == sorted(symmetric3().orders)


def test_full_series_verification_of_h11_table(h11):
    m, autos, G = h11
    verify_compositions(m, autos, G.mul, list(itertools.product(range(27), repeat=2)))


def test_split_product_table():
    m = build(split_product_spec(3, 1, 2, h11_spec(3, 1, 4)))
    autos = enumerate_automorphisms(m)
    G = group_table(m, autos)
    assert G.order == 54 and len(G.center()) == 6


def test_solve_mod_p():
    M = np.array([[1, 2], [0, 1], [1, 1]])
    y = (M @ np.array([2, 1])) % 3
    sol, rank = solve_mod_p(M, y, 3)
    assert rank == 2 and list(sol) == [2, 1]
    sol, _ = solve_mod_p(M, np.array([1, 0, 0]), 3)
    assert sol is None
