"""Totally ramified towers over K = F_q((t)) realized in a single series field.

Each level k has a uniformizer s_k.  The registry of level k expresses t and
every generator g_1..g_k as a Laurent series in s_k.  An Artin-Schreier step
solves for the image S of the old uniformizer and the reduced generator X in
the new uniformizer s' = S^i X^j; a tame step takes s' with s'^m = s_{k-1}.

Precision is planned per level.  Level k keeps every registry series to a
relative precision r_k, and r_{k-1} is derived backwards from r_k plus the
cancellation measured while evaluating the step's right-hand side.  When a
measurement shows a lower level was built too coarsely the plan is raised
and the tower rebuilt.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import expr as ex
from .errors import (
    NotCoprime,
    NotWildTotallyRamified,
    PrecisionExhausted,
    RamifyError,
    SpecError,
    TrivialStep,
    UnknownSymbol,
)
from .finite_field import FqElem, FqField
from .laurent import LaurentSeries, _relift

GUARD = 16
DEFAULT_PRECISION = 64
SLACK = 4
MAX_REPLANS = 64
_DEBUG = False


# ---------------------------------------------------------------- spec

@dataclass
class StepSpec:
    kind: str  # "artin_schreier" or "tame"
    rhs: str | None = None
    m: int | None = None

    def to_json(self) -> dict:
        if self.kind == "tame":
            return {"type": "tame", "m": self.m}
        return {"type": "artin_schreier", "rhs": self.rhs}


@dataclass
class TowerSpec:
    field: FqField
    steps: list[StepSpec]
    precision: int | None = None

    @property
    def degree(self) -> int:
        d = 1
        for st in self.steps:
            d *= self.field.p if st.kind == "artin_schreier" else st.m
        return d

    def to_json(self) -> dict:
        out = {"field": self.field.to_json(), "steps": [s.to_json() for s in self.steps]}
        if self.precision is not None:
            out["precision"] = self.precision
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, data) -> "TowerSpec":
        if isinstance(data, str):
            try:
                data = json.loads(data)
            except json.JSONDecodeError as err:
                raise SpecError(f"spec is not valid JSON: {err}") from None
        if not isinstance(data, dict) or "field" not in data or "steps" not in data:
            raise SpecError("spec needs 'field' and 'steps'")
        fd = data["field"]
        if not isinstance(fd, dict) or "p" not in fd:
            raise SpecError("field needs at least 'p'")
        F = FqField.from_json(fd)
        steps = []
        for k, st in enumerate(data["steps"], 1):
            if not isinstance(st, dict):
                raise SpecError("each step must be an object", step=k)
            kind = st.get("type")
            if kind in ("artin_schreier", "as"):
                if not isinstance(st.get("rhs"), str):
                    raise SpecError("artin_schreier step needs a string 'rhs'", step=k)
                steps.append(StepSpec("artin_schreier", rhs=st["rhs"]))
            elif kind == "tame":
                m = st.get("m")
                if not isinstance(m, int) or m < 1:
                    raise SpecError("tame step needs a positive integer 'm'", step=k)
                steps.append(StepSpec("tame", m=m))
            else:
                raise SpecError(f"unknown step type {kind!r}", step=k)
        prec = data.get("precision")
        if prec is not None and (not isinstance(prec, int) or prec < 8):
            raise SpecError("precision must be an integer >= 8")
        return cls(F, steps, prec)

    @classmethod
    def load(cls, path) -> "TowerSpec":
        with open(path) as fh:
            return cls.from_json(fh.read())


# ---------------------------------------------------------------- model

@dataclass
class StepRecord:
    kind: str
    rhs: str | None
    expr: ex.Expr | None
    m: int | None = None
    b: int | None = None  # reduced break
    i: int | None = None  # Bezout exponents: p*i - b*j = 1
    j: int | None = None
    shift: dict = dc_field(default_factory=dict)  # exponent -> FqElem, in s_{k-1}
    u0: FqElem | None = None
    deficit: int = 0


@dataclass
class Level:
    relprec: int
    registry: dict  # 0 -> t, k -> g_k
    S: LaurentSeries | None = None  # previous uniformizer in s_k
    X: LaurentSeries | None = None  # reduced Artin-Schreier generator
    auto_prec: int = 0  # relative precision wanted for automorphism images


@dataclass
class TowerModel:
    field: FqField
    steps: list[StepRecord]
    levels: list[Level]
    guard: int = GUARD

    @property
    def degree(self) -> int:
        d = 1
        for st in self.steps:
            d *= self.field.p if st.kind == "artin_schreier" else st.m
        return d

    @property
    def e(self) -> int:
        return self.degree

    @property
    def registry(self) -> dict:
        return self.levels[-1].registry

    @property
    def precision(self) -> int:
        return self.levels[-1].relprec

    @property
    def wild(self) -> list[int]:
        return [k for k, st in enumerate(self.steps, 1) if st.kind == "artin_schreier"]

    def level_degree(self, k: int) -> int:
        d = 1
        for st in self.steps[:k]:
            d *= self.field.p if st.kind == "artin_schreier" else st.m
        return d

    def shift_series(self, k: int, prec: int) -> LaurentSeries:
        """The reduction shift of step k as a series in s_{k-1} known below s^prec."""
        return _poly_series(self.field, self.steps[k - 1].shift, prec)

    def residuals(self) -> list[LaurentSeries]:
        """wp(g_k) - rhs_k at the top level, one per step (g^m - s_prev for tame)."""
        out = []
        top = self.registry
        for k, st in enumerate(self.steps, 1):
            if st.kind == "artin_schreier":
                out.append(top[k].wp() - eval_expr(self, st.expr))
            else:
                prev = top[k - 1] if k > 1 and self.steps[k - 2].kind == "tame" else None
                prev = self.uniformizer_at_top(k - 1) if prev is None else prev
                out.append(top[k] ** st.m - prev)
        return out

    def uniformizer_at_top(self, k: int) -> LaurentSeries:
        """s_k expressed in the top uniformizer."""
        f = LaurentSeries.gen(self.field, 1 + self.levels[k].relprec)
        for lvl in self.levels[k + 1 :]:
            f = f.compose(lvl.S).with_relprec(lvl.relprec)
        return f

    def summary(self) -> dict:
        steps = []
        for k, st in enumerate(self.steps, 1):
            if st.kind == "tame":
                steps.append({"type": "tame", "m": st.m})
            else:
                steps.append({"type": "artin_schreier", "rhs": st.rhs, "break": st.b, "i": st.i, "j": st.j})
        return {
            "field": self.field.to_json(),
            "degree": self.degree,
            "e": self.e,
            "precision": self.precision,
            "guard": self.guard,
            "steps": steps,
            "t_valuation": self.registry[0].valuation(),
        }


def _poly_series(F: FqField, terms: dict, prec: int) -> LaurentSeries:
    if not terms:
        return LaurentSeries.zero(F, prec)
    lo = min(terms)
    if prec <= lo:
        return LaurentSeries.zero(F, prec)
    arr = np.zeros((prec - lo, F.n), dtype=np.int64)
    for e, c in terms.items():
        if e < prec:
            arr[e - lo] = c.coeffs
    return LaurentSeries(F, lo, arr, prec)


# ---------------------------------------------------------------- evaluation

def _evaluate(F: FqField, e: ex.Expr, registry: dict, lookup=None, relprec: int | None = None):
    def sym(s: ex.Sym):
        if s.index == -1:
            if F.n == 1:
                raise UnknownSymbol("'w' names the residue generator and needs residue degree > 1")
            return F.gen
        if s.index not in registry:
            raise UnknownSymbol(f"generator {s.name} is not available here")
        return lookup(s.index) if lookup is not None else registry[s.index]

    val = ex.evaluate(e, sym, F)
    if isinstance(val, FqElem):
        return LaurentSeries.constant(F, val, relprec if relprec else 1) if val else LaurentSeries.zero(F, relprec or 1)
    return val


def eval_expr(model: TowerModel, e, level: int | None = None) -> LaurentSeries:
    """Evaluate an expression (text or AST) on the registry of ``level`` (default: top)."""
    if isinstance(e, str):
        e = ex.parse_expr(e)
    lvl = model.levels[-1 if level is None else level]
    return _evaluate(model.field, e, lvl.registry, relprec=lvl.relprec)


# ---------------------------------------------------------------- Artin-Schreier reduction

@dataclass
class Reduction:
    reduced: LaurentSeries
    shift: dict  # exponent -> FqElem
    b: int

    def shift_series(self, prec: int) -> LaurentSeries:
        return _poly_series(self.reduced.field, self.shift, prec)


def as_reduce(f: LaurentSeries) -> Reduction:
    """Subtract wp of monomials until the valuation is negative and prime to p."""
    F = f.field
    p = F.p
    if f.is_zero():
        if f.prec > 0:
            raise TrivialStep("right-hand side vanishes")
        raise PrecisionExhausted("right-hand side is zero to its known precision", need=-f.prec + 1)
    val, prec = f.val, f.prec
    arr = f.coeffs.copy()
    shift: dict = {}
    idx = 0
    inv_frob = F.inverse_frobenius_matrix if F.n > 1 else None
    while True:
        nz = np.flatnonzero(arr[idx:].any(axis=1))
        if len(nz) == 0:
            if prec > 0:
                raise TrivialStep("right-hand side reduces to an element of wp(E)")
            raise PrecisionExhausted("reduction ran past the known precision", need=-prec + 1)
        idx += int(nz[0])
        v = val + idx
        if v >= 0:
            c0 = F.from_row(arr[-val]) if val <= 0 and prec > 0 else None
            if c0 is None:
                if prec <= 0:
                    raise PrecisionExhausted("constant term of the reduced right-hand side unknown", need=-prec + 1)
                c0 = F.zero
            if F.wp_image_test(c0):
                raise TrivialStep("reduced right-hand side lies in wp(E)")
            raise NotWildTotallyRamified(f"reduced constant term {c0} is not in wp(F_{F.q})")
        if v % p:
            reduced = LaurentSeries(F, val, arr, prec)
            return Reduction(reduced, shift, -v)
        row = arr[idx]
        root = row @ inv_frob % p if inv_frob is not None else row.copy()
        arr[idx] = 0
        e = v // p
        # wp(r s^e) = r^p s^v - r s^e
        if e < prec:
            arr[e - val] = (arr[e - val] + root) % p
        c = F.from_row(root)
        shift[e] = shift.get(e, F.zero) + c
        if not shift[e]:
            del shift[e]


# ---------------------------------------------------------------- steps

def bezout(p: int, b: int) -> tuple[int, int]:
    """(i, j) with p*i - b*j = 1 and 0 <= j < p."""
    j = (-pow(b, -1, p)) % p
    i = (1 + b * j) // p
    return i, j


def _solve_w(U: LaurentSeries, p: int, b: int, i: int, j: int, N: int) -> LaurentSeries:
    """Unit W with W - s^{b(p-1)} W^{i-bj} = U(s^p W^{-j}), to N terms (Newton)."""
    F = U.field
    c = i - b * j
    B = b * (p - 1)
    dU = U.derivative()
    W = LaurentSeries.constant(F, U.coefficient(0), 1)
    cur = 1
    while cur < N:
        cur = min(2 * cur, N)
        W = _relift(W, cur)
        Winv = W.invert()
        S = (Winv**j).shift(p)
        Fw = W - (W**c).shift(B) - U.compose(S)
        dF = 1 - ((W ** (c - 1)).shift(B)) * c + (Winv ** (j + 1)).shift(p) * dU.compose(S) * j
        W = (W - Fw / dF).truncate(cur)
    return W


def _rebase(registry: dict, S: LaurentSeries, rel: int) -> dict:
    return {key: f.compose(S).with_relprec(rel) for key, f in registry.items()}


class _Replan(Exception):
    pass


def build(spec: TowerSpec, precision: int | None = None, guard: int = GUARD, plan: list | None = None) -> TowerModel:
    """Build the tower of ``spec``; ``precision`` is the relative precision at the top."""
    F = spec.field
    p = F.p
    K = len(spec.steps)
    records = []
    for k, st in enumerate(spec.steps, 1):
        if st.kind == "tame":
            if math.gcd(st.m, p) != 1:
                raise NotCoprime(f"tame degree {st.m} is divisible by p = {p}", step=k)
            try:
                F.root_of_unity(st.m)
            except RamifyError as err:
                raise err.at_step(k)
            records.append(StepRecord("tame", None, None, m=st.m))
        else:
            try:
                e = ex.parse_expr(st.rhs, max_generator=k - 1)
                _check_w(F, e)
            except RamifyError as err:
                raise err.at_step(k)
            records.append(StepRecord("artin_schreier", st.rhs, e))

    top = precision or spec.precision or DEFAULT_PRECISION
    deficits = list(plan) if plan is not None else [0] * (K + 1)
    deficits += [0] * (K + 1 - len(deficits))
    for _ in range(MAX_REPLANS):
        rel, aut = _plan(records, p, top, deficits)
        try:
            levels = _build_levels(F, records, rel, aut, deficits, guard)
        except _Replan as rp:
            top = max(top, rp.args[0])
            if _DEBUG:
                print("replan", rel, aut, deficits)
            continue
        model = TowerModel(F, records, levels, guard)
        model.deficits = deficits
        return model
    raise PrecisionExhausted("precision plan did not converge")


def _check_w(F, e):
    def walk(node):
        if isinstance(node, ex.Sym) and node.index == -1 and F.n == 1:
            raise UnknownSymbol("'w' names the residue generator and needs residue degree > 1")
        for child in getattr(node, "__dict__", {}).values():
            if isinstance(child, (ex.Num, ex.Sym, ex.Neg, ex.BinOp, ex.Pow)):
                walk(child)

    walk(e)


def _plan(records, p, top, deficits):
    """Backward per-level relative precisions for the registry and automorphisms."""
    K = len(records)
    rel = [0] * (K + 1)
    aut = [0] * (K + 1)
    rel[K] = aut[K] = top
    for k in range(K, 0, -1):
        st = records[k - 1]
        if st.kind == "tame":
            rel[k - 1] = -(-rel[k] // st.m) + 1
            aut[k - 1] = -(-aut[k] // st.m) + 1
        else:
            rel[k - 1] = -(-rel[k] // p) + deficits[k] + SLACK
            shift_loss = -min(st.shift) if st.shift else 0
            aut[k - 1] = min(rel[k - 1], -(-aut[k] // p) + shift_loss + SLACK)
    return rel, aut


def _build_levels(F, records, rel, aut, deficits, guard=GUARD):
    p = F.p
    base = {0: LaurentSeries.gen(F, 1 + rel[0])}
    levels = [Level(rel[0], base, auto_prec=aut[0])]
    for k, st in enumerate(records, 1):
        prev = levels[-1]
        r = rel[k]
        if st.kind == "tame":
            m = st.m
            reg = {key: f.inflate(m).with_relprec(r) for key, f in prev.registry.items()}
            reg[k] = LaurentSeries.gen(F, 1 + r)
            S = LaurentSeries.monomial(F, 1, m, m + r)
            levels.append(Level(r, reg, S=S, auto_prec=aut[k]))
            continue
        try:
            rhs = _evaluate(F, st.expr, prev.registry, relprec=prev.relprec)
            red = as_reduce(rhs)
        except PrecisionExhausted:
            deficits[k] = max(2 * deficits[k], prev.relprec)
            raise _Replan(0)
        except RamifyError as err:
            raise err.at_step(k)
        b = red.b
        if k == len(records) and r <= b + 2 * guard:
            # the top break b + 1 must be certifiable with room for the guard band
            raise _Replan(b + 2 * guard + 1)
        i, j = bezout(p, b)
        st.b, st.i, st.j, st.shift = b, i, j, red.shift
        U = red.reduced.shift(b)
        st.u0 = U.coefficient(0)
        # loss = relative precision consumed between the registry and U
        loss = prev.relprec - U.relprec
        gen_loss = max((-prev.registry[l].valuation() for l in prev.registry if l > 0 and records[l - 1].kind != "tame"), default=0)
        shift_loss = -min(red.shift) if red.shift else 0
        # the automorphism solve needs every earlier wp(g_l) and the rhs inside one known window
        wvals = [p * prev.registry[l].valuation() for l in prev.registry if l > 0 and records[l - 1].kind != "tame"]
        spread = max(wvals) - min(wvals + [rhs.valuation()]) + loss if wvals else 0
        need = max(loss, gen_loss, shift_loss, spread, 0)
        st.deficit = need
        want_aut = min(prev.relprec, -(-aut[k] // p) + shift_loss + SLACK)
        if need > deficits[k] or prev.auto_prec < want_aut:
            deficits[k] = need
            raise _Replan(0)
        W = _solve_w(U, p, b, i, j, r)
        Winv = W.invert()
        S = (Winv**j).shift(p)
        X = (W**i).shift(-b)
        reg = _rebase(prev.registry, S, r)
        h = red.shift_series(b + prev.relprec)
        reg[k] = (X + h.compose(S)).with_relprec(r) if red.shift else X
        levels.append(Level(r, reg, S=S, X=X, auto_prec=aut[k]))
    return levels


def extend_as(model: TowerModel, rhs: str) -> TowerModel:
    """The model extended by one Artin-Schreier step (rebuilt with a fresh plan)."""
    spec = model_spec(model)
    spec.steps.append(StepSpec("artin_schreier", rhs=rhs))
    return build(spec, precision=model.precision, guard=model.guard)


def extend_tame(model: TowerModel, m: int) -> TowerModel:
    spec = model_spec(model)
    spec.steps.append(StepSpec("tame", m=m))
    return build(spec, precision=model.precision, guard=model.guard)


def base_model(F: FqField, precision: int = 64) -> TowerModel:
    return build(TowerSpec(F, []), precision=precision)


def model_spec(model: TowerModel) -> TowerSpec:
    steps = [StepSpec(st.kind, rhs=st.rhs, m=st.m) for st in model.steps]
    return TowerSpec(model.field, steps)
