"""Finite groups as explicit multiplication tables.

Elements are the indices 0..n-1 and ``mul[a, b]`` is the product ab.
Subgroups are returned as sorted tuples of indices.
"""

from __future__ import annotations

import itertools
import math
from functools import cached_property

import numpy as np

from .errors import NotAnAutomorphism, NotNormal, NotPGroup, RamifyError
from .finite_field import is_prime, prime_factors

LATTICE_LIMIT = 81


class FiniteGroupTable:
    def __init__(self, mul, labels=None, check: bool = True, seed: int = 0):
        mul = np.asarray(mul, dtype=np.int64)
        n = mul.shape[0]
        if mul.shape != (n, n):
            raise RamifyError("multiplication table must be square")
        self.mul = mul
        self.order = n
        self.labels = list(labels) if labels is not None else [str(k) for k in range(n)]
        ident = [e for e in range(n) if np.array_equal(mul[e], np.arange(n)) and np.array_equal(mul[:, e], np.arange(n))]
        if not ident:
            raise RamifyError("table has no identity")
        self.identity = ident[0]
        inv = np.full(n, -1, dtype=np.int64)
        rows, cols = np.nonzero(mul == self.identity)
        inv[rows] = cols
        if (inv < 0).any() or not np.array_equal(mul[np.arange(n), inv], np.full(n, self.identity)):
            raise RamifyError("table lacks inverses")
        self.inv = inv
        if check:
            self._check_associative(seed)

    def _check_associative(self, seed):
        n, mul = self.order, self.mul
        if n <= 64:
            idx = np.arange(n)
            ok = np.array_equal(mul[mul], mul[idx[:, None, None], mul[None, :, :]])
        else:
            rng = np.random.default_rng(seed)
            x, y, z = rng.integers(0, n, size=(3, 20000))
            ok = np.array_equal(mul[mul[x, y], z], mul[x, mul[y, z]])
        if not ok:
            raise RamifyError("table is not associative")

    # -- basics ------------------------------------------------------------
    def __len__(self):
        return self.order

    def m(self, a: int, b: int) -> int:
        return int(self.mul[a, b])

    def commutator(self, a: int, b: int) -> int:
        """a b a^-1 b^-1."""
        return self.m(self.m(a, b), self.m(int(self.inv[a]), int(self.inv[b])))

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.m(x, a)
            k += 1
        return k

    @cached_property
    def orders(self) -> list[int]:
        return [self.element_order(a) for a in range(self.order)]

    @cached_property
    def exponent(self) -> int:
        return math.lcm(*self.orders)

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mul, self.mul.T))

    @property
    def prime(self) -> int | None:
        ps = prime_factors(self.order)
        return ps[0] if len(ps) == 1 else None

    def is_pgroup(self) -> bool:
        return self.order == 1 or self.prime is not None

    def _need_p(self) -> int:
        if self.order == 1:
            return 0
        if self.prime is None:
            raise NotPGroup(f"order {self.order} is not a prime power")
        return self.prime

    # -- subgroups ---------------------------------------------------------
    def generate(self, gens) -> tuple:
        elems = {self.identity}
        frontier = [self.identity]
        gens = [int(g) for g in gens]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = int(self.mul[x, g])
                    if y not in elems:
                        elems.add(y)
                        nxt.append(y)
            frontier = nxt
        return tuple(sorted(elems))

    def is_subgroup(self, H) -> bool:
        H = list(H)
        if self.identity not in H:
            return False
        sub = self.mul[np.ix_(H, H)]
        return bool(np.isin(sub, H).all())

    def is_normal(self, N) -> bool:
        N = np.array(sorted(N))
        if not self.is_subgroup(N):
            return False
        g = np.arange(self.order)
        conj = self.mul[self.mul[g[:, None], N[None, :]], self.inv[g][:, None]]
        return bool(np.isin(conj, N).all())

    def center(self) -> tuple:
        return tuple(int(a) for a in np.flatnonzero((self.mul == self.mul.T).all(axis=1)))

    def derived_subgroup(self) -> tuple:
        comms = {self.commutator(a, b) for a in range(self.order) for b in range(self.order)}
        return self.generate(comms)

    def normal_closure(self, gens) -> tuple:
        conj = set()
        for g in gens:
            for x in range(self.order):
                conj.add(self.m(self.m(x, int(g)), int(self.inv[x])))
        return self.generate(conj)

    def pth_powers(self) -> tuple:
        p = self._need_p()
        return self.generate({self.power_k(a, p) for a in range(self.order)})

    def power_k(self, a: int, k: int) -> int:
        r = self.identity
        for _ in range(k):
            r = self.m(r, a)
        return r

    def subgroup_lattice(self) -> list[tuple]:
        """All subgroups, by joining cyclic subgroups until closed."""
        if self.order > LATTICE_LIMIT:
            raise RamifyError(f"subgroup lattice enumeration limited to order <= {LATTICE_LIMIT}")
        cyclic = {self.generate([a]) for a in range(self.order)}
        subs = set(cyclic)
        frontier = set(cyclic)
        while frontier:
            nxt = set()
            for H in frontier:
                for C in cyclic:
                    if not set(C) <= set(H):
                        J = self.generate(set(H) | set(C))
                        if J not in subs:
                            subs.add(J)
                            nxt.add(J)
            frontier = nxt
        return sorted(subs, key=lambda H: (len(H), H))

    def maximal_subgroups(self) -> list[tuple]:
        subs = [set(H) for H in self.subgroup_lattice() if len(H) < self.order]
        out = []
        for H in subs:
            if not any(H < J for J in subs):
                out.append(tuple(sorted(H)))
        return out

    def frattini(self) -> tuple:
        """Intersection of the maximal subgroups (lattice for small orders, G^p[G,G] otherwise)."""
        self._need_p()
        if self.order == 1:
            return (self.identity,)
        if self.order <= LATTICE_LIMIT:
            inter = set(range(self.order))
            for H in self.maximal_subgroups():
                inter &= set(H)
            return tuple(sorted(inter))
        return self.frattini_burnside()

    def frattini_burnside(self) -> tuple:
        """Phi(G) = G^p [G, G] for a p-group."""
        p = self._need_p()
        if self.order == 1:
            return (self.identity,)
        return self.generate(set(self.derived_subgroup()) | {self.power_k(a, p) for a in range(self.order)})

    def rank(self) -> int:
        p = self._need_p()
        if self.order == 1:
            return 0
        idx = self.order // len(self.frattini())
        return round(math.log(idx, p))

    def rank_bruteforce(self) -> int:
        if self.order == 1:
            return 0
        elems = range(self.order)
        for k in range(1, self.order + 1):
            for gens in itertools.combinations(elems, k):
                if len(self.generate(gens)) == self.order:
                    return k
        return self.order  # unreachable

    def normal_subgroups(self) -> list[tuple]:
        """All normal subgroups as joins of normal closures of single elements."""
        closures = {self.normal_closure([a]) for a in range(self.order)}
        subs = set(closures)
        frontier = set(closures)
        while frontier:
            nxt = set()
            for H in frontier:
                for C in closures:
                    if not set(C) <= set(H):
                        J = self.generate(set(H) | set(C))
                        if J not in subs:
                            subs.add(J)
                            nxt.add(J)
            frontier = nxt
        return sorted(subs, key=lambda H: (len(H), H))

    def is_minimal_nonabelian(self) -> bool:
        """Non-abelian with every proper quotient abelian."""
        self._need_p()
        if self.is_abelian():
            return False
        derived = set(self.derived_subgroup())
        for a in range(self.order):
            if a == self.identity:
                continue
            if not derived <= set(self.normal_closure([a])):
                return False
        return True

    def subgroup_table(self, H) -> "FiniteGroupTable":
        H = list(H)
        pos = {h: k for k, h in enumerate(H)}
        sub = self.mul[np.ix_(H, H)]
        return FiniteGroupTable(np.vectorize(pos.get)(sub), labels=[self.labels[h] for h in H], check=False)

    # -- invariants --------------------------------------------------------
    def abelian_invariants(self) -> list[int]:
        """Elementary divisors (prime powers) of an abelian group."""
        if not self.is_abelian():
            raise RamifyError("group is not abelian")
        out = []
        for p in prime_factors(self.order) if self.order > 1 else []:
            # log_p #{a : a^(p^k) = 1} = sum_i min(k, a_i)
            logs = [0]
            k = 0
            while True:
                k += 1
                c = sum(1 for o in self.orders if (p**k) % o == 0)
                logs.append(round(math.log(c, p)))
                if logs[-1] == logs[-2]:
                    break
            ge = [logs[k] - logs[k - 1] for k in range(1, len(logs))]  # #{i : a_i >= k}
            for k in range(1, len(ge)):
                out += [p**k] * (ge[k - 1] - ge[k])
        return sorted(out)

    def invariants(self) -> dict:
        out = {
            "order": self.order,
            "abelian": self.is_abelian(),
            "exponent": self.exponent,
            "center": len(self.center()),
            "derived": len(self.derived_subgroup()),
        }
        if self.is_pgroup() and self.order > 1:
            out["rank"] = self.rank()
        return out

    def to_json(self, labels: bool = False) -> dict:
        out = {"order": self.order, "mul": self.mul.tolist()}
        if labels:
            out["labels"] = self.labels
        return out

    @classmethod
    def from_json(cls, data: dict) -> "FiniteGroupTable":
        return cls(data["mul"], labels=data.get("labels"))


# ---------------------------------------------------------------- constructions

def cyclic(n: int) -> FiniteGroupTable:
    a = np.arange(n)
    return FiniteGroupTable((a[:, None] + a[None, :]) % n, labels=[str(k) for k in range(n)], check=False)


def heisenberg(p: int) -> FiniteGroupTable:
    """Upper unitriangular 3x3 matrices over F_p: (x, y, z) . (x', y', z') = (x+x', y+y', z+z'+x y')."""
    elems = list(itertools.product(range(p), repeat=3))
    pos = {e: k for k, e in enumerate(elems)}
    n = len(elems)
    mul = np.zeros((n, n), dtype=np.int64)
    for a, (x, y, z) in enumerate(elems):
        for b, (u, v, w) in enumerate(elems):
            mul[a, b] = pos[((x + u) % p, (y + v) % p, (z + w + x * v) % p)]
    return FiniteGroupTable(mul, labels=[str(e) for e in elems])


def symmetric3() -> FiniteGroupTable:
    perms = list(itertools.permutations(range(3)))
    pos = {q: k for k, q in enumerate(perms)}
    mul = np.array([[pos[tuple(a[b[i]] for i in range(3))] for b in perms] for a in perms])
    return FiniteGroupTable(mul, labels=[str(q) for q in perms])


def direct_product(G: FiniteGroupTable, H: FiniteGroupTable) -> FiniteGroupTable:
    """Element (g, h) has index g * |H| + h."""
    n, m = G.order, H.order
    mul = (G.mul[:, None, :, None] * m + H.mul[None, :, None, :]).reshape(n * m, n * m)
    labels = [f"({a},{b})" for a in G.labels for b in H.labels]
    return FiniteGroupTable(mul, labels=labels, check=False)


def quotient(G: FiniteGroupTable, N) -> tuple[FiniteGroupTable, np.ndarray]:
    """G/N and the map element -> coset index."""
    N = tuple(sorted(N))
    if not G.is_normal(N):
        raise NotNormal("subgroup is not normal")
    coset = np.full(G.order, -1, dtype=np.int64)
    reps = []
    for g in range(G.order):
        if coset[g] >= 0:
            continue
        coset[G.mul[g, list(N)]] = len(reps)
        reps.append(g)
    k = len(reps)
    mul = np.array([[coset[G.mul[a, b]] for b in reps] for a in reps], dtype=np.int64)
    return FiniteGroupTable(mul, labels=[G.labels[r] for r in reps], check=False), coset


def semidirect_product(P: FiniteGroupTable, m: int, action) -> FiniteGroupTable:
    """P x| C_m with the generator of C_m acting by the permutation ``action``.

    (x, k)(y, l) = (x psi^k(y), k + l).  Element (x, k) has index x * m + k.
    """
    act = np.asarray(action, dtype=np.int64)
    n = P.order
    if sorted(act.tolist()) != list(range(n)):
        raise NotAnAutomorphism("action is not a permutation")
    if not np.array_equal(act[P.mul], P.mul[act[:, None], act[None, :]]):
        raise NotAnAutomorphism("action is not a homomorphism")
    powers = [np.arange(n)]
    for _ in range(m):
        powers.append(act[powers[-1]])
    if not np.array_equal(powers[m], np.arange(n)):
        raise NotAnAutomorphism(f"action has order not dividing {m}")
    mul = np.zeros((n * m, n * m), dtype=np.int64)
    y = np.arange(n)
    for x in range(n):
        for k in range(m):
            prod = P.mul[x, powers[k][y]]  # x psi^k(y)
            for l in range(m):
                mul[x * m + k, y * m + l] = prod * m + (k + l) % m
    labels = [f"({a},{k})" for a in P.labels for k in range(m)]
    return FiniteGroupTable(mul, labels=labels)


def inversion(P: FiniteGroupTable) -> np.ndarray:
    return P.inv.copy()


# ---------------------------------------------------------------- identification

def identify_h11(G: FiniteGroupTable, p: int) -> bool:
    """True iff G is extraspecial of order p^3 and exponent p (p odd).

    Constructively: find x, y of order p with z = [x, y] != 1 central of order
    p and <x, y> = G.
    """
    if not is_prime(p) or G.order != p**3 or G.is_abelian() or G.exponent != p:
        return False
    center = set(G.center())
    for x in range(G.order):
        if G.orders[x] != p:
            continue
        for y in range(G.order):
            if G.orders[y] != p:
                continue
            z = G.commutator(x, y)
            if z == G.identity or z not in center or G.orders[z] != p:
                continue
            if len(G.generate([x, y])) == G.order:
                return True
    return False


def h11_generators(G: FiniteGroupTable, p: int):
    """(x, y, z) realizing the presentation, or None."""
    if not identify_h11(G, p):
        return None
    center = set(G.center())
    for x in range(G.order):
        for y in range(G.order):
            if G.orders[x] == p and G.orders[y] == p:
                z = G.commutator(x, y)
                if z != G.identity and z in center and len(G.generate([x, y])) == G.order:
                    return x, y, z
    return None


def group_name(G: FiniteGroupTable) -> str:
    if G.order == 1:
        return "1"
    if G.is_abelian():
        inv = G.abelian_invariants()
        return " x ".join(f"C_{d}" for d in inv)
    p = G.prime
    if p is not None and p > 2 and identify_h11(G, p):
        return "H(1,1)"
    if G.order == 6:
        return "S_3"
    split = central_cyclic_factor(G)
    if split is not None:
        P, m = split
        inner = group_name(P)
        if not inner.startswith("non-abelian"):
            return f"{inner} x C_{m}"
    return f"non-abelian of order {G.order}"


def central_cyclic_factor(G: FiniteGroupTable):
    """(P, m) when G = P x C_m with P its normal Sylow subgroup and C_m central cyclic."""
    factors = prime_factors(G.order)
    if len(factors) < 2:
        return None
    for p in factors:
        pk = p ** _vp(G.order, p)
        P = tuple(k for k, o in enumerate(G.orders) if pk % o == 0)
        if len(P) != pk or not G.is_subgroup(P):
            continue
        m = G.order // pk
        center = G.center()
        gens = [z for z in center if G.orders[z] == m]
        if gens:
            C = G.generate([gens[0]])
            if len(set(G.mul[np.ix_(P, C)].ravel())) == G.order:
                return G.subgroup_table(P), m
    return None


def _vp(n: int, p: int) -> int:
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def same_invariants(G: FiniteGroupTable, H: FiniteGroupTable) -> bool:
    return G.invariants() == H.invariants() and sorted(G.orders) == sorted(H.orders)
