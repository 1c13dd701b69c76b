"""End-to-end drivers for the witness extensions.

Each constructor builds a tower spec, runs the full analysis and returns a
``WitnessReport`` carrying the group, the break data and the verdicts.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from . import expr as ex
from .errors import BreaksNotDisjoint, ConstraintViolation, InvalidBreak, NotCoprime, SpecError
from .finite_field import FqField, is_prime
from .pgroups import cyclic, direct_product, group_name, same_invariants
from .ramification import (
    Analysis,
    analyze,
    hasse_arf_check,
    multiset_union_check,
    quotient_breaks,
    theorem_check,
)
from .tower import StepSpec, TowerSpec


@dataclass
class WitnessReport:
    spec: TowerSpec
    analysis: Analysis
    checks: dict = dc_field(default_factory=dict)

    @property
    def breaks(self):
        return self.analysis.breaks

    @property
    def table(self):
        return self.analysis.table

    @property
    def group(self) -> str:
        return group_name(self.table)

    @property
    def converse(self) -> bool:
        return any(u.denominator != 1 for u in self.breaks.nonlog)

    @property
    def hasse_arf(self) -> dict:
        return hasse_arf_check(self.breaks, self.table)

    @property
    def theorem_imperfect(self) -> dict:
        return theorem_check(self.breaks, self.table)

    def ok(self) -> bool:
        return all(v for v in self.checks.values() if isinstance(v, bool))

    def to_json(self) -> dict:
        out = self.breaks.to_json()
        out.update(
            spec=self.spec.to_json(),
            group=self.group,
            automorphisms=len(self.analysis.autos),
            hasse_arf=self.hasse_arf["verdict"],
            theorem_imperfect=self.theorem_imperfect["verdict"],
            converse=self.converse,
        )
        if self.checks:
            out["checks"] = {k: _jsonable(v) for k, v in self.checks.items()}
        return out


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def report(spec: TowerSpec, precision: int | None = None, seed: int = 0, checks: dict | None = None) -> WitnessReport:
    return WitnessReport(spec, analyze(spec, precision=precision, seed=seed), dict(checks or {}))


def _field(p: int, residue_n: int = 1) -> FqField:
    return FqField(p, residue_n)


def _need_odd_prime(p: int, exc=ConstraintViolation):
    if not is_prime(p) or p == 2:
        raise exc(f"p = {p} must be an odd prime")


# ---------------------------------------------------------------- C_p

def cp_spec(p: int, residue_n: int, b: int) -> TowerSpec:
    _need_odd_prime(p, InvalidBreak)
    if b < 1 or b % p == 0:
        raise InvalidBreak(f"break b = {b} must be positive and prime to p = {p}")
    return TowerSpec(_field(p, residue_n), [StepSpec("artin_schreier", rhs=f"t^-{b}")])


def construct_cp(p: int, residue_n: int, b: int, precision: int | None = None) -> WitnessReport:
    """Artin-Schreier C_p extension y^p - y = t^-b with upper break b."""
    spec = cp_spec(p, residue_n, b)
    rep = report(spec, precision)
    rep.checks["break_is_b"] = rep.breaks.upper_breaks == [Fraction(b)]
    return rep


# ---------------------------------------------------------------- H(1,1)

def h11_violations(p: int, b: int, a: int) -> list[str]:
    out = []
    if not is_prime(p) or p == 2:
        out.append(f"p = {p} is not an odd prime")
        return out
    if b < 1:
        out.append(f"b = {b} < 1")
    if b % p == 0:
        out.append(f"p divides b = {b}")
    if a <= b:
        out.append(f"a = {a} <= b = {b}")
    if a % p == 0:
        out.append(f"a = {a} = 0 mod {p}")
    if (a + b) % p == 0:
        out.append(f"a = {a} = -b mod {p}")
    return out


def h11_parameters(p: int, b: int, a: int) -> tuple[int, int, int]:
    """(t, s, gamma) with a = b t + p s, 0 <= t < p and gamma = (t + 1)^-1 in F_p."""
    tt = a * pow(b, -1, p) % p
    s = (a - b * tt) // p
    gamma = pow(tt + 1, -1, p)
    return tt, s, gamma


def h11_spec(p: int, b: int, a: int, residue_n: int = 1, beta_coeff: int = 1) -> TowerSpec:
    bad = h11_violations(p, b, a)
    if bad:
        raise ConstraintViolation("; ".join(bad))
    if beta_coeff % p == 0:
        raise ConstraintViolation("beta coefficient must be a unit")
    tt, s, gamma = h11_parameters(p, b, a)
    c = beta_coeff % p
    # beta = c t^-b, alpha = t^-ps beta^tt
    ca = pow(c, tt, p)
    beta = _term(c, f"t^-{b}")
    alpha = _term(ca, f"t^-{a}")
    third = f"{_term(ca, f'g1*t^-{a}')} + {_term(gamma * ca * c % p, f't^-{a + b}')}"
    steps = [StepSpec("artin_schreier", rhs=r) for r in (beta, alpha, third)]
    return TowerSpec(_field(p, residue_n), steps)


def _term(c: int, body: str) -> str:
    return body if c == 1 else f"{c}*{body}"


def h11_closed_form(p: int, b: int, a: int) -> list[Fraction]:
    return [Fraction(b), Fraction(a), Fraction(a) + Fraction(b, p)]


def construct_h11(p: int, b: int, a: int, residue_n: int = 1, beta_coeff: int = 1,
                  precision: int | None = None) -> WitnessReport:
    """The H(1,1) tower with classical upper breaks b, a and a + b/p."""
    spec = h11_spec(p, b, a, residue_n, beta_coeff)
    rep = report(spec, precision)
    got = sorted(rep.breaks.classical_multiset)
    want = h11_closed_form(p, b, a)
    rep.checks.update(
        is_h11=rep.group == "H(1,1)",
        closed_form=got == want,
        expected=want,
        computed=got,
    )
    return rep


# ---------------------------------------------------------------- tame x wild

def _renumber(text: str, offset: int) -> str:
    """Shift every generator index in ``text`` by ``offset``."""
    e = ex.parse_expr(text)
    return ex.to_text(ex.rename(e, lambda s: ex.Sym(f"g{s.index + offset}", s.index + offset) if s.index > 0 else s))


def _as_spec(wild_spec) -> TowerSpec:
    return wild_spec if isinstance(wild_spec, TowerSpec) else TowerSpec.from_json(wild_spec)


def split_product_spec(p: int, residue_n: int, m: int, wild_spec) -> TowerSpec:
    wild = _as_spec(wild_spec)
    F = _field(p, residue_n)
    if wild.field.p != p:
        raise SpecError("wild spec lives over a different characteristic")
    if any(st.kind != "artin_schreier" for st in wild.steps):
        raise SpecError("wild spec must consist of Artin-Schreier steps")
    if m % p == 0:
        raise NotCoprime(f"tame degree {m} is divisible by p = {p}")
    F.root_of_unity(m)
    steps = [StepSpec("tame", m=m)]
    steps += [StepSpec("artin_schreier", rhs=_renumber(st.rhs, 1)) for st in wild.steps]
    return TowerSpec(F, steps)


def construct_split_product(p: int, residue_n: int, m: int, wild_spec, precision: int | None = None) -> WitnessReport:
    """Tame C_m step u^m = t followed by a wild tower defined over K = F_q((t)).

    Both layers are Galois over K, so the group is P x C_m with the tame jump
    at upper break 0 and the wild breaks of P unchanged.
    """
    spec = split_product_spec(p, residue_n, m, wild_spec)
    wild = _as_spec(wild_spec)
    alone = report(TowerSpec(_field(p, residue_n), wild.steps), precision)
    rep = report(spec, precision)
    want = direct_product(alone.table, cyclic(m))
    wild_got = sorted(rep.breaks.wild_multiset)
    wild_alone = sorted(alone.breaks.wild_multiset)
    rep.checks.update(
        order=rep.table.order == alone.table.order * m,
        product=same_invariants(rep.table, want),
        wild_breaks_match=wild_got == wild_alone,
        wild_breaks=wild_got,
        tame_jump=[(u, i) for u, i in rep.breaks.upper if u == 0] == [(Fraction(0), m)] if m > 1 else True,
    )
    return rep


def s3_spec(p: int = 3, m: int = 2) -> TowerSpec:
    _need_odd_prime(p, SpecError)
    return TowerSpec(_field(p), [StepSpec("tame", m=m), StepSpec("artin_schreier", rhs="g1^-1")])


def construct_s3(p: int = 3, m: int = 2, precision: int | None = None) -> WitnessReport:
    """Tame u^m = t then y^p - y = u^-1; for (3, 2) the group is S_3."""
    rep = report(s3_spec(p, m), precision)
    rep.checks.update(
        nonabelian=not rep.table.is_abelian(),
        theorem_confirmed=rep.theorem_imperfect["verdict"] == "CONFIRMED",
    )
    return rep


# ---------------------------------------------------------------- composites

def concatenate(spec1: TowerSpec, spec2: TowerSpec) -> TowerSpec:
    if spec1.field != spec2.field:
        raise SpecError("composite factors must share the residue field")
    off = len(spec1.steps)
    steps = list(spec1.steps)
    for st in spec2.steps:
        if st.kind == "tame":
            raise SpecError("composite factors must be wild towers")
        steps.append(StepSpec("artin_schreier", rhs=_renumber(st.rhs, off)))
    return TowerSpec(spec1.field, steps)


def disjoint_composite(spec1, spec2, precision: int | None = None, seed: int = 0) -> WitnessReport:
    """Compositum of two wild towers with disjoint break multisets."""
    spec1, spec2 = _as_spec(spec1), _as_spec(spec2)
    r1 = report(spec1, precision, seed)
    r2 = report(spec2, precision, seed)
    b1, b2 = r1.breaks.wild_multiset, r2.breaks.wild_multiset
    common = Counter(b1) & Counter(b2)
    if common:
        shared = ", ".join(str(u) for u in sorted(common))
        raise BreaksNotDisjoint(f"factors share upper breaks {{{shared}}}")
    spec = concatenate(spec1, spec2)
    rep = report(spec, precision, seed)
    rep.checks.update(
        order=rep.table.order == r1.table.order * r2.table.order,
        product=same_invariants(rep.table, direct_product(r1.table, r2.table)),
        union=multiset_union_check(b1, b2, rep.breaks.wild_multiset),
        factor_breaks=[sorted(b1), sorted(b2)],
    )
    return rep


def center_quotient(rep: WitnessReport):
    """Break data of the fixed field of the center."""
    return quotient_breaks(rep.breaks, rep.table, rep.table.center())


def base_change(spec: TowerSpec, n: int) -> TowerSpec:
    """The same spec over the degree-n extension of the residue field."""
    F = spec.field
    if F.n != 1:
        raise SpecError("base change is implemented from a prime residue field")
    return TowerSpec(FqField(F.p, n), list(spec.steps), spec.precision)


def admissible_h11(primes=(3, 5), bmax: int = 4, amax: int = 12):
    for p in primes:
        for b in range(1, bmax + 1):
            for a in range(b + 1, amax + 1):
                if not h11_violations(p, b, a):
                    yield p, b, a


# ---------------------------------------------------------------- catalog

def catalog() -> dict[str, TowerSpec]:
    """Named specs for the standard witnesses."""
    h = h11_spec(3, 1, 4)
    return {
        "c3_b1": cp_spec(3, 1, 1),
        "c3_b2": cp_spec(3, 1, 2),
        "c3xc3": concatenate(cp_spec(3, 1, 1), cp_spec(3, 1, 2)),
        "h11_p3_b1_a4": h,
        "h11_p3_b1_a7": h11_spec(3, 1, 7),
        "h11_p5_b1_a3": h11_spec(5, 1, 3),
        "s3": s3_spec(3, 2),
        "split_h11_c2": split_product_spec(3, 1, 2, h),
        "split_c3_c4_f9": split_product_spec(3, 2, 4, cp_spec(3, 2, 1)),
        "h11xh11": concatenate(h, h11_spec(3, 2, 5)),
    }
