"""Truncated Laurent series over F_q with absolute precision.

A ``LaurentSeries`` is ``sum_{k=val}^{prec-1} c_k s^k + O(s^prec)`` with dense
coefficients and ``c_val != 0``.  A series whose known terms all vanish is
kept as the empty array with ``val == prec`` and has no valuation.  Every
operation propagates the exact precision it can certify; nothing is padded
silently.
"""

from __future__ import annotations

import math

import numpy as np

from . import _kernels
from .errors import (
    CompositionDomain,
    FieldMismatch,
    NoNthRoot,
    NotAPthPower,
    NotAUniformizerSeries,
    PrecisionExhausted,
    ValuationIndeterminate,
)
from .finite_field import FqElem, FqField

# precision of exact zero
INF = 1 << 60


def _cap(prec: int) -> int:
    return INF if prec >= INF // 2 else prec


class LaurentSeries:
    __slots__ = ("field", "val", "prec", "coeffs")

    def __init__(self, field: FqField, val: int, coeffs: np.ndarray, prec: int):
        prec = _cap(prec)
        coeffs = np.asarray(coeffs, dtype=np.int64).reshape(-1, field.n)
        if prec < INF and len(coeffs) != prec - val:
            raise ValueError(f"dense coefficients must span [{val}, {prec}), got {len(coeffs)}")
        nz = np.flatnonzero(coeffs.any(axis=1))
        if len(nz) == 0:
            val, coeffs = prec, coeffs[:0]
        elif nz[0]:
            val += int(nz[0])
            coeffs = coeffs[nz[0]:]
        self.field = field
        self.val = val
        self.prec = prec
        self.coeffs = coeffs

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, field: FqField, prec: int = INF) -> "LaurentSeries":
        return cls(field, prec, np.zeros((0, field.n), dtype=np.int64), prec)

    @classmethod
    def monomial(cls, field: FqField, c, exp: int, prec: int) -> "LaurentSeries":
        c = field(c)
        if not c:
            return cls.zero(field, prec)
        if prec <= exp:
            return cls.zero(field, prec)
        arr = np.zeros((prec - exp, field.n), dtype=np.int64)
        arr[0] = c.coeffs
        return cls(field, exp, arr, prec)

    @classmethod
    def constant(cls, field: FqField, c, prec: int) -> "LaurentSeries":
        return cls.monomial(field, c, 0, prec)

    @classmethod
    def gen(cls, field: FqField, prec: int) -> "LaurentSeries":
        return cls.monomial(field, 1, 1, prec)

    @classmethod
    def from_coeffs(cls, field: FqField, coeffs, val: int = 0, prec: int | None = None) -> "LaurentSeries":
        """Build from a list of scalars (ints, tuples or FqElem) starting at ``val``."""
        rows = [field(c).coeffs for c in coeffs]
        if prec is None:
            prec = val + len(rows)
        rows = rows[: max(prec - val, 0)]
        rows += [(0,) * field.n] * (prec - val - len(rows))
        return cls(field, val, np.array(rows, dtype=np.int64).reshape(-1, field.n), prec)

    def _new(self, val, coeffs, prec) -> "LaurentSeries":
        return LaurentSeries(self.field, val, coeffs, prec)

    # -- basic queries -----------------------------------------------------
    @property
    def p(self) -> int:
        return self.field.p

    @property
    def relprec(self) -> int:
        return self.prec - self.val

    def is_zero(self) -> bool:
        """True when no known coefficient is nonzero (valuation indeterminate)."""
        return len(self.coeffs) == 0

    def valuation(self) -> int:
        if self.is_zero():
            raise ValuationIndeterminate(f"series is O(s^{self.prec})")
        return self.val

    def coefficient(self, e: int) -> FqElem:
        if e >= self.prec:
            raise PrecisionExhausted(f"coefficient of s^{e} unknown (precision {self.prec})")
        if e < self.val:
            return self.field.zero
        return self.field.from_row(self.coeffs[e - self.val])

    def leading_coefficient(self) -> FqElem:
        return self.coefficient(self.valuation())

    def is_monomial(self) -> bool:
        return not self.is_zero() and not self.coeffs[1:].any()

    def dense(self, start: int, stop: int) -> np.ndarray:
        """Coefficient rows for exponents start..stop-1 (must be known)."""
        if stop > self.prec:
            raise PrecisionExhausted(f"need terms below s^{stop}, known below s^{self.prec}")
        out = np.zeros((max(stop - start, 0), self.field.n), dtype=np.int64)
        lo = max(start, self.val)
        if lo < stop:
            out[lo - start : stop - start] = self.coeffs[lo - self.val : stop - self.val]
        return out

    def truncate(self, prec: int) -> "LaurentSeries":
        if prec >= self.prec:
            return self
        if prec <= self.val:
            return LaurentSeries.zero(self.field, prec)
        return self._new(self.val, self.coeffs[: prec - self.val], prec)

    def with_relprec(self, rel: int) -> "LaurentSeries":
        if self.is_zero():
            return self
        return self.truncate(self.val + rel)

    def _check(self, other: "LaurentSeries"):
        if other.field != self.field:
            raise FieldMismatch("series over different residue fields")

    def _lift(self, other) -> "LaurentSeries":
        if isinstance(other, LaurentSeries):
            self._check(other)
            return other
        if isinstance(other, (int, FqElem)):
            if self.prec >= INF:
                raise ValueError("cannot add a constant to an exact zero series")
            return LaurentSeries.constant(self.field, other, max(self.prec, 1))
        return NotImplemented

    # -- ring operations ---------------------------------------------------
    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        prec = min(self.prec, other.prec)
        if self.is_zero() and other.is_zero():
            return LaurentSeries.zero(self.field, prec)
        val = min(self.val, other.val)
        if val >= prec:
            return LaurentSeries.zero(self.field, prec)
        arr = np.zeros((prec - val, self.field.n), dtype=np.int64)
        for f in (self, other):
            if f.val < prec and not f.is_zero():
                k = prec - f.val
                arr[f.val - val : prec - val] += f.coeffs[:k]
        return self._new(val, arr % self.p, prec)

    __radd__ = __add__

    def __neg__(self):
        return self._new(self.val, (-self.coeffs) % self.p, self.prec)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "LaurentSeries":
        c = self.field(c)
        if not c:
            return LaurentSeries.zero(self.field, self.prec)
        if self.field.n == 1:
            return self._new(self.val, self.coeffs * c.coeffs[0] % self.p, self.prec)
        return self._new(self.val, self.coeffs @ self.field.mult_matrix(c) % self.p, self.prec)

    def __mul__(self, other):
        if isinstance(other, (int, FqElem)):
            return self.scale(other)
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        self._check(other)
        prec = min(self.prec + other.val, other.prec + self.val)
        if self.is_zero() or other.is_zero():
            return LaurentSeries.zero(self.field, prec)
        length = min(self.relprec, other.relprec)
        arr = _kernels.mul_trunc(self.coeffs, other.coeffs, length, self.p, self.field.reduction_matrix)
        val = self.val + other.val
        return self._new(val, arr, val + length)

    __rmul__ = __mul__

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by s^k (exact)."""
        if self.prec >= INF:
            return self
        return self._new(self.val + k, self.coeffs, self.prec + k)

    def unit_part(self) -> np.ndarray:
        self.valuation()
        return self.coeffs

    def invert(self) -> "LaurentSeries":
        v = self.valuation()
        inv = _unit_inverse(self.field, self.coeffs, self.relprec)
        return self._new(-v, inv, -v + self.relprec)

    def __truediv__(self, other):
        if isinstance(other, (int, FqElem)):
            return self.scale(self.field(other).inverse())
        return self * other.invert()

    def __rtruediv__(self, other):
        return self.invert() * other

    def frobenius(self) -> "LaurentSeries":
        """f^p, computed coefficient-wise (exact in characteristic p)."""
        p = self.p
        if self.is_zero():
            return LaurentSeries.zero(self.field, self.prec * p if self.prec < INF else INF)
        rows = self.coeffs
        if self.field.n > 1:
            rows = rows @ self.field.frobenius_matrix % p
        arr = np.zeros((p * len(rows), self.field.n), dtype=np.int64)
        arr[::p] = rows
        return self._new(p * self.val, arr, p * self.prec)

    def __pow__(self, k: int) -> "LaurentSeries":
        if k < 0:
            return self.invert() ** (-k)
        if k == 0:
            self.valuation()
            return LaurentSeries.constant(self.field, 1, self.relprec)
        e = 0
        while k % self.p == 0:
            k //= self.p
            e += 1
        result = None
        base = self
        while k:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if k:
                base = base * base
        for _ in range(e):
            result = result.frobenius()
        return result

    def wp(self) -> "LaurentSeries":
        """Artin-Schreier map f^p - f."""
        return self.frobenius() - self

    def derivative(self) -> "LaurentSeries":
        if self.is_zero():
            return LaurentSeries.zero(self.field, self.prec - 1)
        exps = np.arange(self.val, self.prec) % self.p
        arr = self.coeffs * exps[:, None] % self.p
        return self._new(self.val - 1, arr, self.prec - 1)

    def inflate(self, m: int) -> "LaurentSeries":
        """f(s^m), exact."""
        if self.is_zero():
            return LaurentSeries.zero(self.field, self.prec * m if self.prec < INF else INF)
        arr = np.zeros((m * len(self.coeffs), self.field.n), dtype=np.int64)
        arr[::m] = self.coeffs
        return self._new(m * self.val, arr, m * self.prec)

    # -- composition -------------------------------------------------------
    def compose(self, g: "LaurentSeries") -> "LaurentSeries":
        """f(g) for val(g) >= 1, with the propagated precision."""
        self._check(g)
        if g.is_zero():
            raise ValuationIndeterminate("cannot substitute a series of unknown valuation")
        w = g.val
        if w <= 0:
            raise CompositionDomain(f"substituted series has valuation {w} <= 0")
        if self.is_zero():
            return LaurentSeries.zero(self.field, self.prec * w if self.prec < INF else INF)
        v = self.val
        # abs precision of the power-series part f~(g)
        P = min(self.relprec * w, w + g.relprec)
        body = compose_power_series(self.field, self.coeffs, g, P)
        result = LaurentSeries(self.field, 0, body, P)
        if v:
            result = result * g**v
        return result

    def reverse(self) -> "LaurentSeries":
        """Compositional inverse of a series of valuation exactly 1."""
        if self.is_zero() or self.val != 1:
            raise NotAUniformizerSeries(f"valuation {self.val if not self.is_zero() else '?'} != 1")
        P = self.prec
        F = self.field
        deriv = self.derivative()
        g = LaurentSeries.monomial(F, self.leading_coefficient().inverse(), 1, min(2, P))
        cur = min(2, P)
        while cur < P:
            cur = min(2 * cur, P)
            g = _relift(g, cur)
            err = self.truncate(cur).compose(g) - LaurentSeries.gen(F, cur)
            corr = err * deriv.truncate(cur).compose(g).invert()
            g = (g - corr).truncate(cur)
        return g

    # -- roots -------------------------------------------------------------
    def pth_root(self) -> "LaurentSeries":
        p = self.p
        prec = -((-self.prec) // p) if self.prec < INF else INF
        if self.is_zero():
            return LaurentSeries.zero(self.field, prec)
        exps = self.val + np.flatnonzero(self.coeffs.any(axis=1))
        if np.any(exps % p):
            raise NotAPthPower(f"nonzero term at exponent {int(exps[exps % p != 0][0])}")
        start = self.val // p
        rows = self.coeffs[::p]
        if self.field.n > 1:
            rows = rows @ self.field.inverse_frobenius_matrix % p
        rows = rows[: prec - start]
        return self._new(start, rows, prec)

    def nth_root(self, m: int) -> "LaurentSeries":
        """m-th root for m prime to p, choosing the smallest root of the leading coefficient."""
        if math.gcd(m, self.p) != 1:
            raise NoNthRoot(f"{m} is not prime to p = {self.p}")
        v = self.valuation()
        if v % m:
            raise NoNthRoot(f"valuation {v} not divisible by {m}")
        c = self.leading_coefficient()
        r0 = self.field.nth_root(c, m)
        if r0 is None:
            raise NoNthRoot(f"leading coefficient {c} is not an {m}-th power in F_{self.field.q}")
        L = self.relprec
        F = self.field
        u = LaurentSeries(F, 0, self.coeffs, L)
        r = LaurentSeries.constant(F, r0, 1)
        inv_m = F(m).inverse()
        cur = 1
        while cur < L:
            cur = min(2 * cur, L)
            r = _relift(r, cur)
            err = r**m - u.truncate(cur)
            r = (r - (err * (r ** (m - 1)).invert()).scale(inv_m)).truncate(cur)
        return r.shift(v // m)

    # -- comparison / display ----------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return (
            self.field == other.field
            and self.val == other.val
            and self.prec == other.prec
            and np.array_equal(self.coeffs, other.coeffs)
        )

    __hash__ = None

    def agrees_with(self, other: "LaurentSeries") -> bool:
        """Equal on every exponent known for both."""
        P = min(self.prec, other.prec)
        lo = min(self.val, other.val)
        if lo >= P:
            return True
        return np.array_equal(self.dense(lo, P), other.dense(lo, P))

    def to_str(self, var: str = "t", max_terms: int | None = None) -> str:
        terms = []
        shown = 0
        for k, row in enumerate(self.coeffs):
            if not row.any():
                continue
            if max_terms is not None and shown >= max_terms:
                terms.append("...")
                break
            e = self.val + k
            c = str(self.field.from_row(row))
            if self.field.n > 1 and "+" in c:
                c = f"({c})"
            mono = "" if e == 0 else (var if e == 1 else f"{var}^{e}")
            if not mono:
                terms.append(c)
            elif c == "1":
                terms.append(mono)
            else:
                terms.append(f"{c}*{mono}")
            shown += 1
        if self.prec < INF:
            terms.append(f"O({var}^{self.prec})")
        return " + ".join(terms) if terms else "0"

    def __repr__(self):
        return self.to_str(max_terms=12)


def _relift(f: LaurentSeries, prec: int) -> LaurentSeries:
    """Pad with zero terms up to ``prec`` (Newton-iteration internal use only)."""
    if prec <= f.prec:
        return f.truncate(prec)
    if f.is_zero():
        return LaurentSeries.zero(f.field, prec)
    arr = np.zeros((prec - f.val, f.field.n), dtype=np.int64)
    arr[: len(f.coeffs)] = f.coeffs
    return LaurentSeries(f.field, f.val, arr, prec)


def _unit_inverse(field: FqField, u: np.ndarray, length: int) -> np.ndarray:
    """Inverse of a unit power series (u[0] != 0) to ``length`` terms, by Newton."""
    p, red = field.p, field.reduction_matrix
    u0 = field.from_row(u[0]).inverse()
    g = np.array([u0.coeffs], dtype=np.int64)
    cur = 1
    while cur < length:
        cur = min(2 * cur, length)
        ug = _kernels.mul_trunc(u, g, cur, p, red)
        # g <- g * (2 - u g)
        ug = (-ug) % p
        ug[0] = (ug[0] + _two(field)) % p
        g = _kernels.mul_trunc(g, ug, cur, p, red)
    return g[:length]


def _two(field):
    out = np.zeros(field.n, dtype=np.int64)
    out[0] = 2 % field.p
    return out


def _mul_offset(field, a_off, a, b_off, b, P):
    """Product of power series given as (offset, rows) truncated below s^P."""
    off = a_off + b_off
    if off >= P or len(a) == 0 or len(b) == 0:
        return off, np.zeros((0, field.n), dtype=np.int64)
    length = P - off
    return off, _kernels.mul_trunc(a, b, length, field.p, field.reduction_matrix)


def compose_power_series(field: FqField, f: np.ndarray, g: LaurentSeries, P: int) -> np.ndarray:
    """Dense rows of sum_k f[k] g^k below s^P (Paterson-Stockmeyer).

    ``g`` must have valuation w >= 1 and be known at least below s^P.
    """
    n, p, red = field.n, field.p, field.reduction_matrix
    w = g.val
    if P <= 0:
        return np.zeros((0, n), dtype=np.int64)
    K = min(len(f), -(-P // w))
    f = f[:K]
    # trailing zero coefficients contribute nothing
    nz = np.flatnonzero(f.any(axis=1))
    K = int(nz[-1]) + 1 if len(nz) else 1
    f = f[:K]
    if K == 1:
        out = np.zeros((P, n), dtype=np.int64)
        out[0] = f[0]
        return out
    g_rows = g.coeffs[: max(P - w, 0)]
    m = max(1, math.isqrt(K))
    powers = np.zeros((m, P, n), dtype=np.int64)
    powers[0, 0, 0] = 1
    off, cur = 0, np.zeros((1, n), dtype=np.int64)
    cur[0, 0] = 1
    for r in range(1, m):
        off, cur = _mul_offset(field, off, cur, w, g_rows, P)
        powers[r, off : off + len(cur)] = cur
    g_off, gm = _mul_offset(field, off, cur, w, g_rows, P)
    J = -(-K // m)
    coef = np.zeros((J * m, n), dtype=np.int64)
    coef[:K] = f
    blocks = _kernels.lincomb(coef.reshape(J, m, n), powers, p, red)
    res = blocks[J - 1]
    for j in range(J - 2, -1, -1):
        if g_off < P and len(gm):
            _, prod = _mul_offset(field, 0, res, g_off, gm, P)
            res = blocks[j].copy()
            res[g_off : g_off + len(prod)] = (res[g_off : g_off + len(prod)] + prod) % p
        else:
            res = blocks[j]
    return res
