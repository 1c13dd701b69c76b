"""Lower and upper ramification filtrations from lower numbers i(sigma).

sigma lies in G_u iff i(sigma) >= u + 1.  The Herbrand function
phi(u) = int_0^u |G_w| / |G_0| dw converts lower breaks to classical upper
breaks; non-log breaks are the classical ones shifted by one.  All break
arithmetic uses ``fractions.Fraction``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .errors import AmbiguousCorrection, NonFiltration, NotNormal, PrecisionExhausted
from .pgroups import FiniteGroupTable, quotient


def frac_str(x: Fraction) -> str:
    return str(Fraction(x))


def _p_log(n: int, p: int) -> int | None:
    d = 0
    while n > 1 and n % p == 0:
        n //= p
        d += 1
    return d if n == 1 else None


# ---------------------------------------------------------------- lower filtration

@dataclass
class Filtration:
    """Lower breaks beta_1 < ... < beta_r and |G_w| on each segment.

    ``orders[0]`` is |G_0| (valid on [0, beta_1]); ``orders[k]`` is |G_w| for
    w in (beta_k, beta_{k+1}], and the last entry is 1.
    """

    breaks: list[int]
    orders: list[int]

    def order_at(self, u) -> int:
        """|G_u| for real u >= 0."""
        for k, b in enumerate(self.breaks):
            if u <= b:
                return self.orders[k]
        return self.orders[-1]

    def segments(self) -> list[tuple]:
        out = []
        lo = 0
        for k, b in enumerate(self.breaks):
            out.append((lo, b, self.orders[k]))
            lo = b
        out.append((lo, None, self.orders[-1]))
        return out


def lower_filtration(i_values, group_order: int, table: FiniteGroupTable | None = None) -> Filtration:
    """Filtration from the lower numbers of the non-identity elements.

    ``i_values`` is either a sequence aligned with the table (None for the
    identity) or an iterable of the non-identity values.
    """
    vals = [i for i in i_values if i is not None]
    if len(vals) != group_order - 1:
        raise NonFiltration(f"{len(vals)} lower numbers for a group of order {group_order}")
    if any(i < 1 for i in vals):
        raise NonFiltration("lower numbers must be positive")
    breaks = sorted({i - 1 for i in vals})
    orders = [group_order]
    for b in breaks:
        orders.append(1 + sum(1 for i in vals if i - 1 > b))
    if table is not None:
        seq = list(i_values)
        if len(seq) != table.order:
            raise NonFiltration("lower numbers must be aligned with the table")
        for b in [-1] + breaks:
            members = [k for k, i in enumerate(seq) if i is None or i - 1 > b]
            if not table.is_subgroup(members):
                raise NonFiltration(f"G_u for u just above {b} is not a subgroup")
    return Filtration(breaks, orders)


# ---------------------------------------------------------------- Herbrand

@dataclass
class Herbrand:
    """Piecewise-linear phi with rational breakpoints [(u, phi(u))] and final slope."""

    points: list[tuple[Fraction, Fraction]]
    slopes: list[Fraction]  # slope on [points[k], points[k+1]] and after the last point

    def phi(self, u) -> Fraction:
        u = Fraction(u)
        if u < 0:
            return u
        for k in range(len(self.points) - 1, -1, -1):
            x0, y0 = self.points[k]
            if u >= x0:
                return y0 + self.slopes[k] * (u - x0)
        return u  # unreachable

    def psi(self, v) -> Fraction:
        v = Fraction(v)
        if v < 0:
            return v
        for k in range(len(self.points) - 1, -1, -1):
            x0, y0 = self.points[k]
            if v >= y0:
                return x0 + (v - y0) / self.slopes[k]
        return v  # unreachable


def herbrand_phi(filt: Filtration) -> Herbrand:
    g0 = filt.orders[0]
    points = [(Fraction(0), Fraction(0))]
    slopes = []
    lo = Fraction(0)
    val = Fraction(0)
    for k, b in enumerate(filt.breaks):
        slope = Fraction(filt.orders[k], g0)
        if b > lo:
            val += slope * (b - lo)
            slopes.append(slope)
            points.append((Fraction(b), val))
            lo = Fraction(b)
    slopes.append(Fraction(filt.orders[-1], g0))
    return Herbrand(points, slopes)


def herbrand_psi(filt: Filtration):
    return herbrand_phi(filt).psi


# ---------------------------------------------------------------- break data

@dataclass
class BreakData:
    group_order: int
    p: int
    filtration: Filtration | None
    herbrand: Herbrand | None
    upper: list  # [(Fraction, index)]
    i_values: list | None = None  # aligned with the group table; None = identity
    lower: list = dc_field(default_factory=list)  # [(int, index)]

    @property
    def upper_breaks(self) -> list[Fraction]:
        return [u for u, _ in self.upper]

    @property
    def nonlog(self) -> list[Fraction]:
        """Non-log breaks: wild breaks repeated by multiplicity, the tame break once."""
        out = []
        for u, idx in self.upper:
            d = _p_log(idx, self.p)
            out += [u + 1] * (d if d else 1)
        return out

    @property
    def classical_multiset(self) -> list[Fraction]:
        out = []
        for u, idx in self.upper:
            d = _p_log(idx, self.p)
            out += [u] * (d if d else 1)
        return out

    @property
    def wild_multiset(self) -> list[Fraction]:
        """Wild upper breaks with multiplicity (the p-power index jumps only)."""
        out = []
        for u, idx in self.upper:
            d = _p_log(idx, self.p)
            if d:
                out += [u] * d
        return out

    def different(self) -> int | None:
        if self.i_values is None:
            return None
        return sum(i for i in self.i_values if i is not None)

    def all_integral(self) -> bool:
        return all(u.denominator == 1 for u in self.upper_breaks)

    def to_json(self) -> dict:
        out = {
            "upper": [{"break": frac_str(u), "index": idx} for u, idx in self.upper],
            "nonlog": [frac_str(u) for u in self.nonlog],
            "order": self.group_order,
        }
        if self.lower:
            out["lower"] = [{"break": b, "index": idx} for b, idx in self.lower]
        if self.i_values is not None:
            out["different"] = self.different()
        return out


def breaks_from_i(i_values: list, p: int, table: FiniteGroupTable | None = None) -> BreakData:
    n = len(i_values)
    filt = lower_filtration(i_values, n, table)
    her = herbrand_phi(filt)
    upper, lower = [], []
    for k, b in enumerate(filt.breaks):
        idx = filt.orders[k] // filt.orders[k + 1]
        upper.append((her.phi(b), idx))
        lower.append((b, idx))
    return BreakData(n, p, filt, her, upper, list(i_values), lower)


def upper_breaks(model, autos=None, table=None) -> BreakData:
    """BreakData of a built tower (enumerating automorphisms if not supplied)."""
    from .galois import enumerate_automorphisms

    if autos is None:
        autos = enumerate_automorphisms(model)
    return breaks_from_i([a.i for a in autos], model.field.p, table)


def different_exponent(i_values) -> int:
    return sum(i for i in i_values if i is not None)


def different_from_filtration(filt: Filtration) -> int:
    """sum_{u >= 0} (|G_u| - 1) over integer u."""
    total = 0
    lo = -1
    for k, b in enumerate(filt.breaks):
        total += (b - lo) * (filt.orders[k] - 1)
        lo = b
    return total


def multiset_union_check(b1, b2, b12) -> bool:
    return Counter(map(Fraction, b1)) + Counter(map(Fraction, b2)) == Counter(map(Fraction, b12))


# ---------------------------------------------------------------- quotients

def quotient_breaks(bd: BreakData, table: FiniteGroupTable, N) -> BreakData:
    """Upper breaks of G/N: the jumps of the image filtration G^v N / N."""
    if bd.i_values is None or bd.herbrand is None:
        raise ValueError("quotient breaks need element-level lower numbers")
    N = tuple(sorted(N))
    if not table.is_normal(N):
        raise NotNormal("subgroup is not normal")
    Q, coset = quotient(table, N)
    her = bd.herbrand
    iv = bd.i_values

    def image_order(v, just_after: bool) -> int:
        # G^v = G_{psi(v)}; just after v take u slightly above psi(v)
        u = her.psi(v)
        members = [k for k, i in enumerate(iv) if i is None or (i - 1 > u if just_after else i - 1 >= u)]
        return len({int(coset[k]) for k in members})

    upper = []
    for v in sorted(set(bd.upper_breaks)):
        before, after = image_order(v, False), image_order(v, True)
        if before != after:
            upper.append((v, before // after))
    return BreakData(Q.order, bd.p, None, None, upper, None, [])


# ---------------------------------------------------------------- verdicts

def hasse_arf_check(bd: BreakData, table: FiniteGroupTable) -> dict:
    abelian = table.is_abelian()
    integral = bd.all_integral()
    if abelian:
        verdict = "PASS" if integral else "FAIL"
    else:
        verdict = "N/A"
    return {"verdict": verdict, "abelian": abelian, "integral": integral}


def wild_subgroup(bd: BreakData) -> tuple:
    return tuple(k for k, i in enumerate(bd.i_values) if i is None or i >= 2)


def theorem_check(bd: BreakData, table: FiniteGroupTable, wild=None) -> dict:
    """Abelian wild part and integral non-log breaks must force an abelian group."""
    wild = wild_subgroup(bd) if wild is None else tuple(wild)
    wild_abelian = table.subgroup_table(wild).is_abelian()
    integral = all(u.denominator == 1 for u in bd.nonlog)
    abelian = table.is_abelian()
    if not wild_abelian:
        verdict = "VACUOUS"
    elif integral and not abelian:
        verdict = "VIOLATION"
    else:
        verdict = "CONFIRMED"
    return {"verdict": verdict, "wild_abelian": wild_abelian, "nonlog_integral": integral, "abelian": abelian}


# ---------------------------------------------------------------- driver

@dataclass
class Analysis:
    model: object
    autos: list
    table: FiniteGroupTable
    breaks: BreakData


def analyze(spec, precision: int | None = None, max_doublings: int = 5, seed: int = 0) -> Analysis:
    """Build, enumerate and compute breaks, raising precision until certified."""
    from .galois import enumerate_automorphisms, group_table
    from .tower import DEFAULT_PRECISION, build

    prec = precision or spec.precision
    last = None
    for _ in range(max_doublings + 1):
        try:
            model = build(spec, precision=prec)
            autos = enumerate_automorphisms(model)
            table = group_table(model, autos, seed=seed)
            bd = breaks_from_i([a.i for a in autos], spec.field.p, table)
            return Analysis(model, autos, table, bd)
        except (PrecisionExhausted, AmbiguousCorrection) as err:
            last = err
            cur = prec or DEFAULT_PRECISION
            prec = max(2 * cur, getattr(err, "need", None) or 0)
    raise last
