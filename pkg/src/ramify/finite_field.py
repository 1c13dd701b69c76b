"""Residue fields F_{p^n} with dense coefficient-vector elements.

Elements are stored little-endian in the root ``w`` of the modulus.  Besides
scalar arithmetic the field exposes the F_p-linear matrices (multiplication by
a constant, Frobenius and its inverse, reduction of high powers of ``w``) that
the series kernels use to act on whole coefficient arrays at once.
"""

from __future__ import annotations

import itertools
from functools import cached_property

import numpy as np

from .errors import DivisionByZero, FieldMismatch, NoSuchRoot, NotPrime, ReducibleModulus


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# --- polynomials over F_p as little-endian int lists -------------------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _polymod(a: list[int], m: list[int], p: int) -> list[int]:
    a = _trim([x % p for x in a])
    inv_lead = pow(m[-1], -1, p)
    while len(a) >= len(m):
        c = a[-1] * inv_lead % p
        shift = len(a) - len(m)
        for k, mk in enumerate(m):
            a[shift + k] = (a[shift + k] - c * mk) % p
        _trim(a)
    return a


def is_irreducible(modulus: list[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    n = len(modulus) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    for d in range(1, n // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if not _polymod(modulus, list(low) + [1], p):
                return False
    return True


class FqField:
    """The finite field F_{p^n} = F_p[w]/(modulus).

    ``modulus`` is a little-endian monic coefficient list of length n + 1.
    When omitted, the lexicographically smallest monic irreducible polynomial
    (comparing the little-endian list of lower coefficients) is used.
    """

    def __init__(self, p: int, n: int = 1, modulus: list[int] | None = None):
        if not is_prime(p):
            raise NotPrime(f"{p} is not prime")
        if n < 1:
            raise ValueError("residue degree must be positive")
        self.p = p
        self.n = n
        self.q = p**n
        if modulus is None:
            modulus = self._search_modulus()
        else:
            modulus = [int(c) % p for c in modulus]
            if len(modulus) != n + 1 or modulus[-1] != 1:
                raise ReducibleModulus(f"modulus must be monic of degree {n}")
            if not is_irreducible(modulus, p):
                raise ReducibleModulus(f"modulus {modulus} is reducible over F_{p}")
        self.modulus = tuple(modulus)

    def _search_modulus(self) -> list[int]:
        if self.n == 1:
            return [0, 1]
        for low in itertools.product(range(self.p), repeat=self.n):
            cand = list(low) + [1]
            if low[0] != 0 and is_irreducible(cand, self.p):
                return cand
        raise ReducibleModulus("no irreducible polynomial found")  # unreachable

    # -- identity ---------------------------------------------------------
    def __eq__(self, other):
        return isinstance(other, FqField) and (self.p, self.modulus) == (other.p, other.modulus)

    def __hash__(self):
        return hash((self.p, self.modulus))

    def __repr__(self):
        if self.n == 1:
            return f"F_{self.p}"
        return f"F_{self.q}[w]/({self._poly_str(self.modulus)})"

    def to_json(self) -> dict:
        return {"p": self.p, "n": self.n, "modulus": list(self.modulus)}

    @classmethod
    def from_json(cls, data: dict) -> "FqField":
        return cls(int(data["p"]), int(data.get("n", 1)), data.get("modulus"))

    # -- elements ---------------------------------------------------------
    def __call__(self, value) -> "FqElem":
        if isinstance(value, FqElem):
            if value.field != self:
                raise FieldMismatch("element of another field")
            return value
        if isinstance(value, int):
            return FqElem(self, (value % self.p,) + (0,) * (self.n - 1))
        coeffs = [int(c) % self.p for c in value]
        if len(coeffs) > self.n:
            coeffs = _polymod(coeffs, list(self.modulus), self.p)
        coeffs = coeffs + [0] * (self.n - len(coeffs))
        return FqElem(self, tuple(coeffs))

    @cached_property
    def zero(self) -> "FqElem":
        return self(0)

    @cached_property
    def one(self) -> "FqElem":
        return self(1)

    @cached_property
    def gen(self) -> "FqElem":
        """The root ``w`` of the modulus (equals the integer root for n = 1)."""
        if self.n == 1:
            return self(-self.modulus[0])
        return self([0, 1])

    def elements(self):
        """All elements, ordered by the integer sum_i c_i p^i of their coefficients.

        This puts 1 before every other root of unity, so the canonical m-th
        root of 1 is 1 itself.
        """
        for coeffs in itertools.product(range(self.p), repeat=self.n):
            yield FqElem(self, coeffs[::-1])

    def from_row(self, row) -> "FqElem":
        return FqElem(self, tuple(int(c) for c in row))

    # -- scalar helpers ---------------------------------------------------
    def _mul_coeffs(self, a: tuple, b: tuple) -> tuple:
        if self.n == 1:
            return ((a[0] * b[0]) % self.p,)
        full = [0] * (2 * self.n - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    full[i + j] += x * y
        red = _polymod(full, list(self.modulus), self.p)
        return tuple(red + [0] * (self.n - len(red)))

    def pth_root(self, x: "FqElem") -> "FqElem":
        """Inverse Frobenius: x^(p^(n-1))."""
        return x ** (self.p ** (self.n - 1))

    def root_of_unity(self, m: int) -> "FqElem":
        """Smallest element (in ``elements`` order) of multiplicative order exactly m."""
        if m < 1 or m % self.p == 0 or (self.q - 1) % m:
            raise NoSuchRoot(f"no primitive {m}-th root of unity in F_{self.q}")
        divisors = [m // r for r in prime_factors(m)]
        for x in self.elements():
            if not x:
                continue
            if x**m == self.one and all(x**d != self.one for d in divisors):
                return x
        raise NoSuchRoot(f"no primitive {m}-th root of unity in F_{self.q}")  # unreachable

    def nth_root(self, x: "FqElem", m: int) -> "FqElem | None":
        """Smallest m-th root of x, or None."""
        for r in self.elements():
            if r**m == x:
                return r
        return None

    @cached_property
    def wp_image(self) -> frozenset:
        """{d^p - d : d in F_q} as a set of coefficient tuples."""
        return frozenset((d**self.p - d).coeffs for d in self.elements())

    def wp_image_test(self, c: "FqElem") -> bool:
        return c.coeffs in self.wp_image

    # -- linear-algebra views used by the series kernels -----------------
    def mult_matrix(self, c: "FqElem") -> np.ndarray:
        """Matrix M with row(a) @ M = row(a*c)."""
        rows = [self._mul_coeffs(tuple(int(k == i) for k in range(self.n)), c.coeffs) for i in range(self.n)]
        return np.array(rows, dtype=np.int64)

    @cached_property
    def frobenius_matrix(self) -> np.ndarray:
        rows = [(self.from_row([int(k == i) for k in range(self.n)]) ** self.p).coeffs for i in range(self.n)]
        return np.array(rows, dtype=np.int64)

    @cached_property
    def inverse_frobenius_matrix(self) -> np.ndarray:
        rows = [self.pth_root(self.from_row([int(k == i) for k in range(self.n)])).coeffs for i in range(self.n)]
        return np.array(rows, dtype=np.int64)

    @cached_property
    def reduction_matrix(self) -> np.ndarray:
        """Rows: w^d expressed in the basis 1..w^(n-1), for d = n .. 2n-2."""
        rows = []
        for d in range(self.n, 2 * self.n - 1):
            red = _polymod([0] * d + [1], list(self.modulus), self.p)
            rows.append(red + [0] * (self.n - len(red)))
        return np.array(rows, dtype=np.int64).reshape(max(self.n - 1, 0), self.n)

    @staticmethod
    def _poly_str(coeffs, var="w") -> str:
        terms = []
        for k in range(len(coeffs) - 1, -1, -1):
            c = coeffs[k]
            if not c:
                continue
            mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
            if not mono:
                terms.append(str(c))
            else:
                terms.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(terms) if terms else "0"


class FqElem:
    __slots__ = ("field", "coeffs")

    def __init__(self, field: FqField, coeffs: tuple):
        self.field = field
        self.coeffs = coeffs

    def _coerce(self, other) -> "FqElem":
        if isinstance(other, FqElem):
            if other.field is not self.field and other.field != self.field:
                raise FieldMismatch("elements of different fields")
            return other
        if isinstance(other, int):
            return self.field(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.field.p
        return FqElem(self.field, tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return FqElem(self.field, tuple((-a) % p for a in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FqElem(self.field, self.field._mul_coeffs(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def inverse(self) -> "FqElem":
        if not self:
            raise DivisionByZero("inverse of zero")
        return self ** (self.field.q - 2)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.field.one
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __bool__(self):
        return any(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.field(other)
        if not isinstance(other, FqElem):
            return NotImplemented
        return self.coeffs == other.coeffs and self.field == other.field

    def __hash__(self):
        return hash(self.coeffs)

    def __lt__(self, other):
        return self.coeffs[::-1] < other.coeffs[::-1]

    def __int__(self):
        if any(self.coeffs[1:]):
            raise ValueError("element is not in the prime field")
        return self.coeffs[0]

    def in_prime_field(self) -> bool:
        return not any(self.coeffs[1:])

    def pth_root(self) -> "FqElem":
        return self.field.pth_root(self)

    def row(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=np.int64)

    def __repr__(self):
        return FqField._poly_str(self.coeffs)

    __str__ = __repr__
