"""K-automorphisms of a built tower as substitutions s -> sigma(s).

Automorphisms are grown level by level.  Over an Artin-Schreier step k an
automorphism sigma of level k-1 extends by

    sigma(g_k) = lam * g_k + c_0 + sum_l c_l g_l      (lam in F_p^*, c in F_p)

whenever sigma(rhs_k) - lam * rhs_k = sum_l c_l rhs_l, the sum running over
earlier wild generators.  Over a tame step it extends by
sigma(s_k) = zeta^e s_k (sigma(s_{k-1}) / s_{k-1})^(1/m).

The correction data of the whole tower acts affinely on the vector
(1, wild generators); composing automorphisms multiplies these matrices, so
the group table comes from correction data and is spot-checked against
series composition.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import AmbiguousCorrection, ClosureFailure, ExtensionNotGalois, NoNthRoot, PrecisionExhausted
from .finite_field import FqElem
from .laurent import LaurentSeries
from .pgroups import FiniteGroupTable
from .tower import TowerModel, _evaluate, _poly_series


@dataclass
class Automorphism:
    tame: list  # exponent e per tame step
    scales: list  # lambda per Artin-Schreier step
    shifts: list  # per Artin-Schreier step: [c_0, c_l for earlier wild l]
    A: LaurentSeries  # sigma(s) in the top uniformizer
    leads: list = dc_field(default_factory=list)  # leading coefficient of sigma(s_k)/s_k per level
    i: int | None = None  # lower ramification number; None for the identity

    @property
    def is_identity(self) -> bool:
        return (
            all(e == 0 for e in self.tame)
            and all(x == 1 for x in self.scales)
            and all(not any(c) for c in self.shifts)
        )

    def to_json(self) -> dict:
        return {"tame": list(self.tame), "scales": list(self.scales), "shifts": [list(c) for c in self.shifts], "i": self.i}

    def key(self) -> tuple:
        return (tuple(self.tame), tuple(self.scales), tuple(tuple(c) for c in self.shifts))


@dataclass
class _Partial:
    tame: list
    scales: list
    shifts: list
    A: LaurentSeries
    leads: list
    mono: bool  # A is exactly lead * s


def _wild_image(model: TowerModel, part: _Partial, l: int, reg: dict) -> LaurentSeries:
    """sigma(g_l) on the registry ``reg`` for a wild generator l."""
    t = model.wild.index(l)
    coeffs = part.shifts[t]
    out = reg[l].scale(part.scales[t])
    for c, lw in zip(coeffs[1:], model.wild):
        if c:
            out = out + reg[lw].scale(c)
    if coeffs[0]:
        out = out + model.field(coeffs[0])
    return out


def _image_lookup(model: TowerModel, part: _Partial, reg: dict, level: int):
    cache = {}

    def look(idx):
        if idx not in cache:
            if idx == 0:
                cache[idx] = reg[0]
            elif model.steps[idx - 1].kind == "artin_schreier":
                cache[idx] = _wild_image(model, part, idx, reg)
            elif part.mono:
                cache[idx] = reg[idx].scale(part.leads[idx - 1])
            else:
                cache[idx] = reg[idx].compose(part.A)
        return cache[idx]

    return look


def solve_mod_p(M: np.ndarray, y: np.ndarray, p: int):
    """Solve M c = y over F_p.  Returns (c or None, rank of M)."""
    rows, cols = M.shape
    aug = np.concatenate([M % p, (y % p)[:, None]], axis=1).astype(np.int64)
    piv_cols = []
    r = 0
    for c in range(cols):
        nz = np.flatnonzero(aug[r:, c])
        if len(nz) == 0:
            continue
        pr = r + int(nz[0])
        aug[[r, pr]] = aug[[pr, r]]
        aug[r] = aug[r] * pow(int(aug[r, c]), -1, p) % p
        others = np.flatnonzero(aug[:, c])
        others = others[others != r]
        if len(others):
            aug[others] = (aug[others] - np.outer(aug[others, c], aug[r])) % p
        piv_cols.append(c)
        r += 1
        if r == rows:
            break
    if r < rows and aug[r:, cols].any():
        return None, r
    sol = np.zeros(cols, dtype=np.int64)
    for k, c in enumerate(piv_cols):
        sol[c] = aug[k, cols]
    return sol, r


def _solve_corrections(D: LaurentSeries, basis: list, p: int):
    """c with D = sum c_l basis_l over F_p on the commonly known window."""
    if not basis:
        if D.is_zero():
            return np.zeros(0, dtype=np.int64)
        return None
    hi = min([D.prec] + [b.prec for b in basis])
    lo = min([D.val] + [b.val for b in basis])
    if hi <= lo:
        raise PrecisionExhausted("no known coefficients to determine the correction")
    M = np.stack([b.dense(lo, hi).ravel() for b in basis], axis=1)
    y = D.dense(lo, hi).ravel() if D.val < hi else np.zeros(M.shape[0], dtype=np.int64)
    sol, rank = solve_mod_p(M, y, p)
    if rank < len(basis):
        raise AmbiguousCorrection("earlier right-hand sides are dependent to working precision")
    return sol


def enumerate_automorphisms(model: TowerModel) -> list[Automorphism]:
    F = model.field
    p = F.p
    lv0 = model.levels[0]
    parts = [_Partial([], [], [], LaurentSeries.gen(F, 1 + lv0.auto_prec), [], True)]
    wild_seen = []
    for k, st in enumerate(model.steps, 1):
        prev, lvl = model.levels[k - 1], model.levels[k]
        a = lvl.auto_prec
        new = []
        if st.kind == "tame":
            m = st.m
            zeta = F.root_of_unity(m)
            for part in parts:
                u = part.A.inflate(m).shift(-m)
                try:
                    root = u.nth_root(m).shift(1)
                except NoNthRoot:
                    continue
                for e in range(m):
                    Ak = root.scale(zeta**e).with_relprec(a)
                    new.append(
                        _Partial(part.tame + [e], part.scales, part.shifts, Ak, part.leads + [Ak.leading_coefficient()], part.mono)
                    )
            parts = new
            continue

        reg = prev.registry
        rhs = _evaluate(F, st.expr, reg, relprec=prev.relprec)
        basis = [reg[l].wp() for l in wild_seen]
        Sk = lvl.S.with_relprec(a)
        Xk = lvl.X.with_relprec(a)
        hterms = st.shift
        vh = min(hterms) if hterms else 0
        lams = [1] if all(s.kind == "artin_schreier" for s in model.steps[: k - 1]) else list(range(1, p))
        for part in parts:
            look = _image_lookup(model, part, reg, k - 1)
            srhs = _evaluate(F, st.expr, reg, lookup=look, relprec=prev.relprec)
            AS_ = part.A.with_relprec(-(-a // p) + 1).compose(Sk)
            hA = None
            for lam in lams:
                D = srhs - rhs.scale(lam)
                sol = _solve_corrections(D, basis, p)
                if sol is None:
                    continue
                if hterms:
                    hs = _poly_series(F, hterms, vh + part.A.relprec + 2)
                    if hA is None:
                        hA = hs.compose(part.A)
                    base_eps = hs.scale(lam) - hA
                else:
                    base_eps = None
                delta = None
                for c, l in zip(sol, wild_seen):
                    if c:
                        term = reg[l].scale(int(c))
                        delta = term if delta is None else delta + term
                for c0 in range(p):
                    eps = base_eps
                    if delta is not None:
                        eps = delta if eps is None else eps + delta
                    if c0:
                        eps = LaurentSeries.constant(F, c0, max(1, prev.relprec)) if eps is None else eps + c0
                    sX = Xk.scale(lam)
                    if eps is not None:
                        sX = sX + eps.compose(Sk)
                    Ak = (AS_**st.i * sX**st.j).with_relprec(a)
                    shifts = part.shifts + [[c0] + [int(c) for c in sol]]
                    mono = part.mono and lam == 1 and c0 == 0 and not sol.any()
                    new.append(
                        _Partial(part.tame, part.scales + [lam], shifts, Ak, part.leads + [Ak.leading_coefficient()], mono)
                    )
        wild_seen.append(k)
        parts = new

    if len(parts) != model.degree:
        raise ExtensionNotGalois(f"found {len(parts)} automorphisms, degree is {model.degree}")
    autos = []
    seen = {}
    for part in parts:
        aut = Automorphism(part.tame, part.scales, part.shifts, part.A, part.leads)
        aut.i = lower_number(model, aut)
        fp = part.A.coeffs.tobytes()
        if fp in seen:
            raise AmbiguousCorrection("two automorphisms have identical images of s to working precision")
        seen[fp] = True
        autos.append(aut)
    return autos


def lower_number(model: TowerModel, sigma: Automorphism) -> int | None:
    """i(sigma) = v(sigma(s) - s); None for the identity."""
    A = sigma.A
    diff = A - LaurentSeries.gen(model.field, A.prec)
    if sigma.is_identity:
        return None
    if diff.is_zero():
        raise PrecisionExhausted("sigma(s) - s vanishes to working precision", need=2 * model.precision)
    i = diff.valuation()
    if i + model.guard >= diff.prec:
        raise PrecisionExhausted(f"lower number {i} is within the guard band", need=2 * (i + model.guard))
    return i


def _affine(model: TowerModel, aut) -> np.ndarray:
    r = len(model.wild)
    M = np.zeros((r + 1, r + 1), dtype=np.int64)
    M[0, 0] = 1
    for t, (lam, sh) in enumerate(zip(aut.scales, aut.shifts)):
        M[t + 1, 0] = sh[0]
        M[t + 1, 1 : t + 1] = sh[1:]
        M[t + 1, t + 1] = lam
    return M


def group_table(model: TowerModel, autos: list[Automorphism], samples: int = 200, seed: int = 0) -> FiniteGroupTable:
    """mul[a][b] = index of a o b (apply b first)."""
    F = model.field
    p = F.p
    n = len(autos)
    mats = [_affine(model, a) for a in autos]
    tame_levels = [k for k, st in enumerate(model.steps, 1) if st.kind == "tame"]
    zetas = {}
    for k in tame_levels:
        m = model.steps[k - 1].m
        z = F.root_of_unity(m)
        zetas[k] = {(z**e).coeffs: e for e in range(m)}

    def key_of(M, leads):
        M = np.ascontiguousarray(M, dtype=np.int64)
        tame = []
        for k in tame_levels:
            m = model.steps[k - 1].m
            prev_lead = leads[k - 2] if k > 1 else F.one
            r0 = F.nth_root(prev_lead, m)
            if r0 is None:
                return None
            tame.append(zetas[k].get((leads[k - 1] / r0).coeffs))
        return (tuple(tame), M.tobytes())

    index = {}
    for idx, a in enumerate(autos):
        index[key_of(mats[idx], a.leads)] = idx
    if len(index) != n:
        raise ClosureFailure("correction data does not separate the automorphisms")

    d = mats[0].shape[0]
    stack = np.stack(mats)
    # prod[x, y] = M_y M_x: the matrix of x o y
    prod = np.einsum("yij,xjk->xyik", stack, stack) % p
    flat = prod.reshape(n * n, d * d)
    mul = np.zeros(n * n, dtype=np.int64)
    for pos in range(n * n):
        M = flat[pos].reshape(d, d)
        if tame_levels:
            x, y = divmod(pos, n)
            leads = [lx * ly for lx, ly in zip(autos[x].leads, autos[y].leads)]
        else:
            leads = None
        k = key_of(M, leads)
        if k not in index:
            x, y = divmod(pos, n)
            raise ClosureFailure(f"composition of automorphisms {x} and {y} is not in the list")
        mul[pos] = index[k]
    mul = mul.reshape(n, n)

    pairs = [(x, y) for x in range(n) for y in range(n)]
    if n > 64:
        rng = random.Random(seed)
        pairs = rng.sample(pairs, min(samples, len(pairs)))
    verify_compositions(model, autos, mul, pairs)
    labels = [str(a.key()) for a in autos]
    return FiniteGroupTable(mul, labels=labels)


def verify_compositions(model: TowerModel, autos, mul, pairs) -> None:
    imax = max((a.i for a in autos if a.i is not None), default=1)
    T = min(imax + model.guard, model.precision)
    cut = [a.A.with_relprec(T) for a in autos]
    for x, y in pairs:
        comp = cut[y].compose(cut[x])
        if not comp.agrees_with(cut[int(mul[x, y])]):
            raise ClosureFailure(f"series composition disagrees with correction data for pair ({x}, {y})")
