"""Concrete flows (G, X): action oracles, return times, orbit-closure windows,
and the catalog of example systems."""
from __future__ import annotations

import itertools
import random
import threading
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from .cantor import (ClopenSet, FiniteSpace, OdometerSpace, ProductSpace, Space, SubshiftPoint,
                     SubshiftSpace)
from .errors import RelationError
from .groups import FinitelyGeneratedGroup, free_abelian, free_group, integers


@dataclass(frozen=True)
class Capabilities:
    exact_language: bool = False
    exact_return_sets: bool = False
    level_equivariant: bool = False
    finite: bool = False


@dataclass(frozen=True)
class ExactReturns:
    """Closed-form description of N(x, U) = {t : tx ∈ U} for U = cell_k(x).

    kinds: ``subgroup`` (Z only: exactly ``modulus``·Z), ``finite`` (exactly
    ``members``), ``cofinite`` (all of Z except ``members``), ``stabilizer``
    (a union of cosets of a subgroup of finite ``index``; ``member`` decides
    membership).
    """

    kind: str
    modulus: int | None = None
    members: frozenset = frozenset()
    index: int | None = None
    member: Callable | None = field(default=None, compare=False, repr=False)

    def contains(self, t) -> bool:
        if self.kind == "subgroup":
            return t % self.modulus == 0
        if self.kind == "finite":
            return t in self.members
        if self.kind == "cofinite":
            return t not in self.members
        return bool(self.member(t))

    @property
    def syndetic(self) -> bool:
        return self.kind != "finite"

    def unbounded(self, sign: int) -> bool:
        """Whether returns occur at arbitrarily large times of the given sign (Z)."""
        return self.kind != "finite"

    def subgroup_witness(self):
        """Description of a finite-index subgroup contained in the set, or None."""
        if self.kind == "subgroup":
            return {"subgroup": f"{self.modulus}Z", "modulus": self.modulus}
        if self.kind == "cofinite":
            if 0 in self.members:
                return None
            m = max((abs(t) for t in self.members), default=0) + 1
            return {"subgroup": f"{m}Z", "modulus": m}
        if self.kind == "stabilizer":
            return {"subgroup": "stabilizer", "index": self.index}
        return None

    def describe(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.modulus is not None:
            d["modulus"] = self.modulus
        if self.members:
            d["members"] = sorted(self.members)
        if self.index is not None:
            d["index"] = self.index
        return d


@dataclass(frozen=True)
class AsymptoticPair:
    """Two base sequences u, v with u[i] = v[i] for all i ≥ start (side +1)
    or all i ≤ start (side -1); ``difference`` is an index where they differ."""

    u: SubshiftPoint
    v: SubshiftPoint
    side: int
    start: int
    difference: int


class FlowSystem:
    """A group acting on an addressable space.

    Subclasses implement ``act`` and whichever exact oracles their
    construction justifies; the defaults return ``None`` (no oracle).
    """

    def __init__(self, name: str, group: FinitelyGeneratedGroup, space: Space,
                 capabilities: Capabilities, base_points: Sequence):
        self.name = name
        self.group = group
        self.space = space
        self.capabilities = capabilities
        self.base_points = tuple(base_points)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"

    def act(self, g, x):
        raise NotImplementedError

    def cell(self, x, k: int):
        return self.space.cell_id(x, k)

    @property
    def is_z_system(self) -> bool:
        return self.group.kind == "Z" and self.group.is_standard

    def sample_points(self, rng: random.Random, count: int) -> list:
        return list(self.base_points)[: max(count, 1)]

    def exact_returns(self, x, k: int) -> ExactReturns | None:
        return None

    def closure_cells(self, x, k: int) -> frozenset | None:
        """Exact set of level-k cells met by the orbit closure of x."""
        return None

    def in_closure(self, x, z) -> bool | None:
        """Exact answer to z ∈ cl(Gx)."""
        return None

    def minimal(self) -> bool | None:
        return None

    def class_representatives(self) -> tuple | None:
        """One point per distinct orbit closure (None when not known exactly)."""
        return None

    def class_of(self, x):
        return None

    def points_near(self, x, k: int, radius: int) -> list:
        """Points other than x sharing x's level-k cell (a finite search)."""
        return []

    def approach(self, x, z) -> Callable[[int], object] | None:
        """Closed-form rule j ↦ g with cell_j(gx) = cell_j(z), when z ∈ cl(Gx)."""
        return None

    def asymptotic_pairs(self) -> tuple:
        return ()

    def designated_clopens(self, k: int) -> list:
        return []

    def cell_image(self, cid, level: int, g, k: int):
        """Level-k cell of g·y for every y in level-``level`` cell ``cid``, or None
        when that cell does not determine it."""
        return None


def _window_image(cid: str, level: int, g: int, k: int):
    # shifting by g reads coordinates g-k..g+k of the window centred at `level`
    if abs(g) + k > level:
        return None
    if k == 0:
        return ""
    return cid[level + g - k: level + g + k + 1]


# ---------------------------------------------------------------- operations
@dataclass(frozen=True)
class ReturnSet:
    point: object
    target: ClopenSet
    radius: int
    elements: tuple
    exact: bool

    def __contains__(self, t) -> bool:
        return t in self.elements


@dataclass(frozen=True)
class OrbitClosureApprox:
    point: object
    level: int
    radius: int
    cells: frozenset
    exact: bool


def act(system: FlowSystem, g, x):
    return system.act(g, x)


def return_times(system: FlowSystem, x, U: ClopenSet, R: int) -> ReturnSet:
    """{t in the closed R-ball : tx ∈ U}."""
    if U.space is not system.space:
        raise ValueError("target set lives in another space")
    elements = tuple(t for t in system.group.closed_ball(R) if system.act(t, x) in U)
    exact = False
    if system.capabilities.exact_return_sets and U.level >= 1:
        exact = U.normal_form() == system.space.cylinder(x, U.level).normal_form() \
            and system.exact_returns(x, U.level) is not None
    return ReturnSet(x, U, R, elements, exact)


def orbit_closure_cells(system: FlowSystem, x, k: int, R: int) -> OrbitClosureApprox:
    """Level-k cells met by the orbit of x under the closed R-ball."""
    cells = frozenset(system.cell(system.act(g, x), k) for g in system.group.closed_ball(R))
    oracle = system.closure_cells(x, k)
    return OrbitClosureApprox(x, k, R, cells, oracle is not None and oracle == cells)


def export_sequence(system: FlowSystem, x, lo: int, hi: int) -> str:
    """Plain-text dump of coordinates lo..hi of a subshift point."""
    if not isinstance(system.space, SubshiftSpace):
        raise ValueError("only subshift points are sequences")
    return system.space.window(x, lo, hi)


# ------------------------------------------------------------------- odometer
class OdometerSystem(FlowSystem):
    """x ↦ x + 1 on the b-adic integers (points are ordinary ints)."""

    def __init__(self, base: int, max_depth: int = 16):
        super().__init__(f"odometer-{base}", integers(), OdometerSpace(base, max_depth),
                         Capabilities(True, True, True, False), (0,))
        self.base = base

    def act(self, g, x):
        return x + g

    def sample_points(self, rng, count):
        return [0] + [rng.randrange(-10 ** 6, 10 ** 6) for _ in range(max(count - 1, 0))]

    def exact_returns(self, x, k):
        return ExactReturns("subgroup", modulus=self.base ** k)

    def closure_cells(self, x, k):
        return frozenset(self.space.cell_ids(k))

    def in_closure(self, x, z):
        return True

    def minimal(self):
        return True

    def class_representatives(self):
        return (0,)

    def class_of(self, x):
        return 0

    def points_near(self, x, k, radius):
        m = self.base ** k
        return [x + j * m for j in (1, -1, 2)]

    def approach(self, x, z):
        # x + (z - x) = z exactly
        return lambda j: z - x

    def cell_image(self, cid, level, g, k):
        if k > level:
            return None
        v = sum(d * self.base ** i for i, d in enumerate(cid))
        return self.space.cell_id(v + g, k)


def build_odometer(base: int = 2, max_depth: int = 16) -> OdometerSystem:
    if base < 2:
        raise ValueError("base must be at least 2")
    return OdometerSystem(base, max_depth)


# -------------------------------------------------------------- substitutions
class Substitution:
    """A substitution rule symbol ↦ word with its exact language."""

    def __init__(self, rules: Mapping[str, str]):
        rules = {str(a): str(w) for a, w in rules.items()}
        if not rules:
            raise ValueError("empty substitution")
        self.alphabet = tuple(sorted(rules))
        for a, w in rules.items():
            if len(a) != 1 or not w or any(c not in rules for c in w):
                raise ValueError(f"bad rule {a!r} -> {w!r}")
        self.rules = rules

    def apply(self, word: str, times: int = 1) -> str:
        for _ in range(times):
            word = "".join(self.rules[c] for c in word)
        return word

    def incidence(self) -> np.ndarray:
        idx = {a: i for i, a in enumerate(self.alphabet)}
        M = np.zeros((len(self.alphabet), len(self.alphabet)), dtype=np.int64)
        for j, a in enumerate(self.alphabet):
            for c in self.rules[a]:
                M[idx[c], j] += 1
        return M

    def primitivity_power(self) -> tuple[int | None, np.ndarray]:
        """Least p with M^p > 0 (searched up to Wielandt's bound), and the last power tried."""
        M = (self.incidence() > 0).astype(np.int64)
        n = len(self.alphabet)
        bound = (n - 1) ** 2 + 1
        P = M.copy()
        for p in range(1, bound + 1):
            if (P > 0).all():
                return p, P
            P = ((P @ M) > 0).astype(np.int64)
        return None, P

    @cached_property
    def legal_pairs(self) -> frozenset:
        pairs = {w[i:i + 2] for a in self.alphabet for w in [self.rules[a]] for i in range(len(w) - 1)}
        while True:
            new = set(pairs)
            for p in pairs:
                w = self.apply(p)
                new.update(w[i:i + 2] for i in range(len(w) - 1))
            if new == pairs:
                return frozenset(pairs)
            pairs = new

    @lru_cache(maxsize=64)
    def language(self, length: int) -> frozenset:
        """Exact set of factors of the given length."""
        if length == 0:
            return frozenset([""])
        if length == 1:
            return frozenset(self.alphabet)
        m = 0
        while min(len(self.apply(a, m)) for a in self.alphabet) < length:
            m += 1
        out = set()
        for p in self.legal_pairs:
            w = self.apply(p, m)
            out.update(w[i:i + length] for i in range(len(w) - length + 1))
        return frozenset(out)

    def seeds(self, max_period: int = 24) -> tuple[int, tuple]:
        """Period p and legal seeds a.b with σ^p(a) ending in a, σ^p(b) starting with b."""
        for p in range(1, max_period + 1):
            found = tuple(
                (a, b) for a, b in itertools.product(self.alphabet, repeat=2)
                if a + b in self.legal_pairs and self.apply(a, p).endswith(a) and self.apply(b, p).startswith(b))
            if found:
                return p, found
        raise ValueError("no two-sided periodic point found")


class _FixedPoint:
    """Lazily generated two-sided σ^p-fixed point grown from seed a.b."""

    def __init__(self, sub: Substitution, period: int, a: str, b: str):
        self.sub, self.period = sub, period
        self._right, self._left = b, a   # left half stored in natural order, ending at index -1
        self._lock = threading.Lock()

    def __call__(self, i: int) -> str:
        if i >= 0:
            if i >= len(self._right):
                self._grow(i + 1, right=True)
            return self._right[i]
        if -i > len(self._left):
            self._grow(-i, right=False)
        return self._left[i]

    def _grow(self, need: int, right: bool) -> None:
        with self._lock:
            while True:
                cur = self._right if right else self._left
                if len(cur) >= need:
                    return
                grown = self.sub.apply(cur, self.period)
                if right:
                    self._right = grown
                else:
                    self._left = grown


class SubstitutionSystem(FlowSystem):
    """Shift on the orbit closure of a substitutive point (minimal when primitive)."""

    def __init__(self, name: str, sub: Substitution, primitive_power: int, max_depth: int = 16):
        self.substitution = sub
        self.primitive_power = primitive_power
        period, seeds = sub.seeds()
        self.period = period
        self.seed_names = tuple(f"{a}.{b}" for a, b in seeds)
        sequences = {f"{a}.{b}": _FixedPoint(sub, period, a, b) for a, b in seeds}
        space = SubshiftSpace(name, sub.alphabet, sequences, sub.language, max_depth)
        base = tuple(SubshiftPoint(s, 0) for s in self.seed_names)
        super().__init__(name, integers(), space, Capabilities(True, False, False, False), base)

    def act(self, g, x):
        return SubshiftPoint(x.seq, x.offset + g)

    def cell_image(self, cid, level, g, k):
        return _window_image(cid, level, g, k)

    def sample_points(self, rng, count):
        pts = list(self.base_points)
        while len(pts) < count:
            pts.append(SubshiftPoint(rng.choice(self.seed_names), rng.randrange(-5000, 5000)))
        return pts[: max(count, len(self.base_points))]

    def closure_cells(self, x, k):
        return frozenset(self.space.cell_ids(k))

    def in_closure(self, x, z):
        return True

    def minimal(self):
        return True

    def class_representatives(self):
        return (self.base_points[0],)

    def class_of(self, x):
        return self.base_points[0]

    def points_near(self, x, k, radius):
        target = self.cell(x, k)
        out = []
        for s in self.seed_names:
            for off in range(-radius, radius + 1):
                p = SubshiftPoint(s, x.offset + off)
                if p != x and self.cell(p, k) == target:
                    out.append(p)
                    if len(out) >= 8:
                        return out
        return out

    def asymptotic_pairs(self):
        pairs = []
        seqs = self.space.sequences
        for s, t in itertools.combinations(self.seed_names, 2):
            a1, b1 = s.split(".")
            a2, b2 = t.split(".")
            u, v = SubshiftPoint(s, 0), SubshiftPoint(t, 0)
            if b1 == b2:
                # identical right halves by construction; left halves differ at -1 or further left
                d = next(i for i in itertools.count(-1, -1) if seqs[s](i) != seqs[t](i))
                pairs.append(AsymptoticPair(u, v, +1, 0, d))
            elif a1 == a2:
                d = next(i for i in itertools.count(0) if seqs[s](i) != seqs[t](i))
                pairs.append(AsymptoticPair(u, v, -1, -1, d))
        return tuple(pairs)


def build_substitution_subshift(rules: Mapping[str, str], name: str | None = None,
                                max_depth: int = 16) -> SubstitutionSystem:
    sub = Substitution(rules)
    p, P = sub.primitivity_power()
    if p is None:
        raise ValueError(f"substitution is not primitive; incidence power {P.tolist()} still has zeros")
    if all(len(w) == 1 for w in sub.rules.values()):
        raise ValueError("substitution does not grow")
    if name is None:
        name = "subst(" + ",".join(f"{a}->{sub.rules[a]}" for a in sub.alphabet) + ")"
    return SubstitutionSystem(name, sub, p, max_depth)


THUE_MORSE = {"0": "01", "1": "10"}
FIBONACCI = {"0": "01", "1": "0"}


# -------------------------------------------------------------------- one-dot
def _mark(i: int) -> str:
    return "1" if i == 0 else "0"


def _zero(i: int) -> str:
    return "0"


@lru_cache(maxsize=64)
def _one_dot_language(length: int) -> frozenset:
    words = {"0" * length}
    words.update("0" * i + "1" + "0" * (length - i - 1) for i in range(length))
    return frozenset(words)


class OneDotSystem(FlowSystem):
    """Shift on the closure of the orbit of the indicator of {0}:
    the shifts of ``mark`` together with the fixed point ``zero``.

    All oracles here are closed-form: a shift of ``mark`` has its 1 at
    position -offset.
    """

    MARK = SubshiftPoint("mark", 0)
    ZERO = SubshiftPoint("zero", 0)

    def __init__(self, max_depth: int = 16):
        space = SubshiftSpace("one-dot", "01", {"mark": _mark, "zero": _zero}, _one_dot_language, max_depth)
        super().__init__("one-dot", integers(), space, Capabilities(True, True, False, False),
                         (self.MARK, self.ZERO))

    def act(self, g, x):
        if x.seq == "zero":
            return self.ZERO
        return SubshiftPoint("mark", x.offset + g)

    def cell_image(self, cid, level, g, k):
        return _window_image(cid, level, g, k)

    def sample_points(self, rng, count):
        pts = [self.MARK, self.ZERO]
        while len(pts) < count:
            pts.append(SubshiftPoint("mark", rng.randrange(-20, 21)))
        return pts

    @staticmethod
    def mark_position(x: SubshiftPoint) -> int | None:
        return None if x.seq == "zero" else -x.offset

    def exact_returns(self, x, k):
        p = self.mark_position(x)
        if p is None or k == 0:
            return ExactReturns("subgroup", modulus=1)
        if abs(p) <= k:
            return ExactReturns("finite", members=frozenset([0]))
        # the mark must stay outside [-k, k]
        return ExactReturns("cofinite", members=frozenset(range(p - k, p + k + 1)))

    def closure_cells(self, x, k):
        if x.seq == "zero":
            return frozenset([self.cell(self.ZERO, k)])
        return frozenset(self.space.cell_ids(k))

    def in_closure(self, x, z):
        return z.seq == "zero" or x.seq == "mark"

    def minimal(self):
        return False

    def class_representatives(self):
        return (self.MARK, self.ZERO)

    def class_of(self, x):
        return self.ZERO if x.seq == "zero" else self.MARK

    def points_near(self, x, k, radius):
        p = self.mark_position(x)
        if p is not None and abs(p) <= k:
            return []  # the window pins the mark: the cell is a single point
        return [SubshiftPoint("mark", o) for o in (-(k + 1), k + 1, -(k + 2))
                if SubshiftPoint("mark", o) != x]

    def approach(self, x, z):
        if z.seq == "zero" and x.seq == "mark":
            p = self.mark_position(x)
            return lambda j: p + j + 1   # moves the mark to -(j+1)
        if z.seq == x.seq == "mark":
            return lambda j: z.offset - x.offset
        if z.seq == x.seq == "zero":
            return lambda j: 0
        return None

    def asymptotic_pairs(self):
        return (AsymptoticPair(self.MARK, self.ZERO, +1, 1, 0), AsymptoticPair(self.MARK, self.ZERO, -1, -1, 0))

    def designated_clopens(self, k):
        return [self.space.cylinder(self.ZERO, j) for j in range(1, k + 1)]


def build_one_dot_subshift(max_depth: int = 16) -> OneDotSystem:
    return OneDotSystem(max_depth)


# ------------------------------------------------------------- finite actions
def _check_perm(p, m: int) -> tuple:
    p = tuple(int(v) for v in p)
    if sorted(p) != list(range(m)):
        raise ValueError(f"{p} is not a permutation of 0..{m - 1}")
    return p


def _compose(p: tuple, q: tuple) -> tuple:
    """(p∘q)[x] = p[q[x]]."""
    return tuple(p[v] for v in q)


def _inverse(p: tuple) -> tuple:
    out = [0] * len(p)
    for i, v in enumerate(p):
        out[v] = i
    return tuple(out)


class FiniteActionSystem(FlowSystem):
    """A group acting on {0..m-1} by permutations of the user generators."""

    def __init__(self, group: FinitelyGeneratedGroup, perms: Sequence[tuple], m: int, name: str | None = None):
        self.m = m
        self.perms = tuple(perms)
        super().__init__(name or f"finite-{group.describe()}-{m}", group, FiniteSpace(m),
                         Capabilities(True, True, True, True), tuple(range(m)))
        self._gen_perm = {}
        for s, p in zip(group.generators, self.perms):
            self._gen_perm[s] = p
            self._gen_perm[group.inv(s)] = _inverse(p)
        self._gen_perm[group.identity] = tuple(range(m))
        if group.kind == "table":
            self._element_perms = self._table_perms()
        elif group.kind == "product":
            self._factor_systems = self._split_factors()

    def _table_perms(self) -> dict:
        g = self.group
        perms = {g.identity: tuple(range(self.m))}
        for layer in g._layers(len(g.table))[1:]:
            for h in layer:
                for s in g.gamma:
                    prev = g.mul(h, g.inv(s))
                    if prev in perms and s in self._gen_perm:
                        perms[h] = _compose(perms[prev], self._gen_perm[s])
                        break
        return perms

    def _split_factors(self) -> list:
        systems = []
        i = 0
        for j, f in enumerate(self.group.factors):
            n = len(f.generators)
            systems.append(FiniteActionSystem(f, self.perms[i:i + n], self.m))
            i += n
        return systems

    def act(self, g, x):
        k = self.group.kind
        if k == "Z":
            return self._cycle_power(x, g)
        if k == "Zd":
            for i, c in reversed(list(enumerate(g))):
                x = self._power(self.perms[i], c, x)
            return x
        if k == "free":
            for c in reversed(g):
                x = self._gen_perm[(c,)][x]
            return x
        if k == "table":
            return self._element_perms[g][x]
        for sub, comp in zip(reversed(self._factor_systems), reversed(g)):
            x = sub.act(comp, x)
        return x

    @cached_property
    def _cycles(self) -> tuple:
        p = self.perms[0]
        where = {}
        cycles = []
        for x in range(self.m):
            if x in where:
                continue
            cyc = [x]
            while p[cyc[-1]] != x:
                cyc.append(p[cyc[-1]])
            for i, y in enumerate(cyc):
                where[y] = (len(cycles), i)
            cycles.append(tuple(cyc))
        return tuple(cycles), where

    def _cycle_power(self, x, n):
        cycles, where = self._cycles
        c, i = where[x]
        cyc = cycles[c]
        return cyc[(i + n) % len(cyc)]

    def _power(self, p, n, x):
        if n < 0:
            p, n = _inverse(p), -n
        for _ in range(n):
            x = p[x]
        return x

    @cached_property
    def orbits(self) -> tuple:
        seen, out = set(), []
        for x in range(self.m):
            if x in seen:
                continue
            orb, stack = {x}, [x]
            while stack:
                y = stack.pop()
                for p in self._gen_perm.values():
                    if p[y] not in orb:
                        orb.add(p[y])
                        stack.append(p[y])
            seen |= orb
            out.append(tuple(sorted(orb)))
        return tuple(out)

    def orbit_of(self, x) -> tuple:
        return next(o for o in self.orbits if x in o)

    def transport_map(self, x) -> dict:
        """For every z in the orbit of x, a shortest g with g·x = z (breadth-first over Γ)."""
        cache = self.__dict__.setdefault("_transport_cache", {})
        if x in cache:
            return cache[x]
        g = self.group
        found = {x: g.identity}
        frontier = [x]
        while frontier:
            nxt = []
            for y in frontier:
                for s in g.gamma:
                    w = self._gen_perm[s][y]
                    if w not in found:
                        found[w] = g.mul(s, found[y])
                        nxt.append(w)
            frontier = nxt
        cache[x] = found
        return found

    def transport(self, x, z):
        found = self.transport_map(x)
        if z not in found:
            raise ValueError(f"{z} is not in the orbit of {x}")
        return found[z]

    def cell_image(self, cid, level, g, k):
        if level == 0:
            return None if k > 0 else ""
        return "" if k == 0 else self.act(g, cid)

    def sample_points(self, rng, count):
        return list(range(self.m))

    def exact_returns(self, x, k):
        if self.group.kind == "Z":
            if k == 0:
                return ExactReturns("subgroup", modulus=1)
            return ExactReturns("subgroup", modulus=len(self.orbit_of(x)))
        if k == 0:
            return ExactReturns("stabilizer", index=1, member=lambda t: True)
        return ExactReturns("stabilizer", index=len(self.orbit_of(x)), member=lambda t, x=x: self.act(t, x) == x)

    def closure_cells(self, x, k):
        if k == 0:
            return frozenset([""])
        return frozenset(self.orbit_of(x))

    def in_closure(self, x, z):
        return z in self.orbit_of(x)

    def minimal(self):
        return len(self.orbits) == 1

    def class_representatives(self):
        return tuple(o[0] for o in self.orbits)

    def class_of(self, x):
        return self.orbit_of(x)[0]

    def points_near(self, x, k, radius):
        return [y for y in range(self.m) if y != x] if k == 0 else []

    def approach(self, x, z):
        if z not in self.orbit_of(x):
            return None
        g = self.transport(x, z)
        return lambda j: g


def _check_relations(group: FinitelyGeneratedGroup, perms: list, m: int) -> None:
    k = group.kind
    if k == "Z":
        if tuple(group.generators) != (1,):
            raise ValueError("finite Z-actions are specified by the image of the generator 1")
    elif k == "Zd":
        if not group.is_standard or any(sum(s) != 1 for s in group.generators):
            raise ValueError("finite Z^d-actions are specified on the standard basis")
        for i, j in itertools.combinations(range(len(perms)), 2):
            if _compose(perms[i], perms[j]) != _compose(perms[j], perms[i]):
                raise RelationError(f"generators {i} and {j} do not commute", relator=(i, j))
    elif k == "table":
        sys = FiniteActionSystem(group, perms, m)
        P = sys._element_perms
        if len(P) != len(group.table):
            raise RelationError("could not realize every table element", relator=None)
        for a, b in itertools.product(range(len(group.table)), repeat=2):
            if P[group.table[a][b]] != _compose(P[a], P[b]):
                raise RelationError(f"relation {a}*{b}={group.table[a][b]} violated", relator=(a, b))
    elif k == "product":
        i = 0
        blocks = []
        for f in group.factors:
            n = len(f.generators)
            _check_relations(f, perms[i:i + n], m)
            blocks.append(perms[i:i + n])
            i += n
        for A, B in itertools.combinations(blocks, 2):
            for p, q in itertools.product(A, B):
                if _compose(p, q) != _compose(q, p):
                    raise RelationError("generators from different factors do not commute", relator=(p, q))


def build_finite_action(group: FinitelyGeneratedGroup, assignment, m: int | None = None,
                        name: str | None = None) -> FiniteActionSystem:
    """Action on {0..m-1}; ``assignment`` lists one permutation per user generator
    (or maps generators to permutations)."""
    if isinstance(assignment, Mapping):
        perms = [assignment[s] for s in group.generators]
    else:
        perms = list(assignment)
    if len(perms) != len(group.generators):
        raise ValueError("need one permutation per generator")
    if m is None:
        m = len(perms[0])
    perms = [_check_perm(p, m) for p in perms]
    _check_relations(group, perms, m)
    return FiniteActionSystem(group, perms, m, name)


def random_finite_action(group: FinitelyGeneratedGroup, m: int, rng: random.Random,
                         name: str | None = None) -> FiniteActionSystem:
    """Random action respecting the relations (commuting powers of one
    permutation for Z^d, free choice otherwise)."""
    def perm():
        p = list(range(m))
        rng.shuffle(p)
        return tuple(p)

    if group.kind == "Zd":
        base = perm()
        perms = []
        for _ in range(group.rank):
            q = tuple(range(m))
            for _ in range(rng.randrange(0, 4)):
                q = _compose(base, q)
            perms.append(q)
    elif group.kind in ("Z", "free"):
        perms = [perm() for _ in group.generators]
    else:
        raise ValueError("random actions are drawn only for Z, Z^d and free groups")
    return build_finite_action(group, perms, m, name)


# ------------------------------------------------------------------- products
class ProductSystem(FlowSystem):
    """Diagonal action g(x, y) = (gx, gy) on X × X."""

    def __init__(self, base: FlowSystem):
        caps = Capabilities(False, False, base.capabilities.level_equivariant, base.capabilities.finite)
        pts = tuple(itertools.product(base.base_points, repeat=2))
        super().__init__(f"{base.name}^2", base.group, ProductSpace(base.space, base.space), caps, pts)
        self.base = base

    def act(self, g, x):
        return (self.base.act(g, x[0]), self.base.act(g, x[1]))

    def sample_points(self, rng, count):
        pts = self.base.sample_points(rng, count)
        return list(itertools.product(pts, repeat=2))

    def diagonal(self, k: int) -> ClopenSet:
        return self.space.diagonal(k)


def product(system: FlowSystem) -> ProductSystem:
    return ProductSystem(system)


# -------------------------------------------------------------------- catalog
def catalog(seed: int = 0) -> dict[str, Callable[[], FlowSystem]]:
    """Named example systems (random ones are seeded)."""
    return {
        "odometer-2": lambda: build_odometer(2),
        "odometer-3": lambda: build_odometer(3),
        "thue-morse": lambda: build_substitution_subshift(THUE_MORSE, "thue-morse"),
        "fibonacci": lambda: build_substitution_subshift(FIBONACCI, "fibonacci"),
        "one-dot": build_one_dot_subshift,
        "finite-F2": lambda: random_finite_action(free_group(2), 6, random.Random(seed), "finite-F2"),
        "finite-Z2": lambda: random_finite_action(free_abelian(2), 6, random.Random(seed + 1), "finite-Z2"),
        "finite-Z": lambda: random_finite_action(integers(), 7, random.Random(seed + 2), "finite-Z"),
    }
