"""Finitely generated groups and their word geometry.

Elements are plain canonical values so that enumeration stays cheap:

* ``Z``       -- an ``int``
* ``Zd``      -- a tuple of ``d`` ints
* ``free``    -- a freely reduced tuple of nonzero ints; ``i`` is the i-th
  generator and ``-i`` its inverse
* ``table``   -- an index into the multiplication table
* ``product`` -- a tuple holding one element per factor

The symmetric generating set is always derived as ``S ∪ S⁻¹ ∪ {e}`` from the
user generators ``S``.
"""
from __future__ import annotations

import itertools
import math
import re
import threading
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any

from .errors import BudgetError, ResourceError
from .verdict import Verdict

DEFAULT_BALL_CAP = 2_000_000

KINDS = ("Z", "Zd", "free", "table", "product")


def _int_key(a: int) -> tuple:
    # 0, 1, -1, 2, -2, ...
    return (abs(a), a < 0)


@dataclass(frozen=True)
class FinitelyGeneratedGroup:
    kind: str
    rank: int = 1
    generators: tuple = ()
    table: tuple | None = None
    factors: tuple = ()
    ball_cap: int = DEFAULT_BALL_CAP
    _memo: dict = field(default_factory=dict, compare=False, repr=False, hash=False)
    _lock: Any = field(default_factory=threading.RLock, compare=False, repr=False, hash=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown group kind {self.kind!r}")
        if not self.generators:
            raise ValueError("a generating set needs at least one generator")
        for s in self.generators:
            self._check(s)

    # ------------------------------------------------------------------ basics
    @cached_property
    def identity(self):
        if self.kind == "Z":
            return 0
        if self.kind == "Zd":
            return (0,) * self.rank
        if self.kind == "free":
            return ()
        if self.kind == "table":
            return self._table_identity
        return tuple(f.identity for f in self.factors)

    @cached_property
    def _table_identity(self) -> int:
        n = len(self.table)
        for e in range(n):
            if all(self.table[e][j] == j and self.table[j][e] == j for j in range(n)):
                return e
        raise ValueError("multiplication table has no identity")

    @cached_property
    def _table_inverse(self) -> tuple:
        e = self._table_identity
        inv = []
        for a, row in enumerate(self.table):
            try:
                inv.append(row.index(e))
            except ValueError:
                raise ValueError(f"table element {a} has no inverse") from None
        return tuple(inv)

    @property
    def order(self) -> int | None:
        if self.kind == "table":
            return len(self.table)
        if self.kind == "product":
            orders = [f.order for f in self.factors]
            return None if None in orders else math.prod(orders)
        return None

    @property
    def is_finite(self) -> bool:
        return self.order is not None

    def _check(self, a) -> None:
        k = self.kind
        if k == "Z":
            ok = isinstance(a, int) and not isinstance(a, bool)
        elif k == "Zd":
            ok = isinstance(a, tuple) and len(a) == self.rank and all(isinstance(c, int) for c in a)
        elif k == "free":
            ok = (isinstance(a, tuple) and all(isinstance(c, int) and 0 < abs(c) <= self.rank for c in a)
                  and all(a[i] != -a[i + 1] for i in range(len(a) - 1)))
        elif k == "table":
            ok = isinstance(a, int) and 0 <= a < len(self.table)
        else:
            ok = isinstance(a, tuple) and len(a) == len(self.factors)
            if ok:
                for f, c in zip(self.factors, a):
                    f._check(c)
        if not ok:
            raise ValueError(f"{a!r} is not an element of {self.describe()}")

    def element(self, obj):
        """Canonicalize ``obj`` (raw value, list, or text) into an element of this group."""
        if isinstance(obj, str):
            return self.parse(obj)
        k = self.kind
        if k == "Zd" and isinstance(obj, list):
            obj = tuple(obj)
        elif k == "free" and isinstance(obj, (list, tuple)):
            obj = _free_reduce(tuple(obj))
        elif k == "product" and isinstance(obj, (list, tuple)):
            if len(obj) != len(self.factors):
                raise ValueError(f"{obj!r} is not an element of {self.describe()}")
            obj = tuple(f.element(c) for f, c in zip(self.factors, obj))
        self._check(obj)
        return obj

    def mul(self, a, b):
        k = self.kind
        if k == "Z":
            return a + b
        if k == "Zd":
            return tuple(x + y for x, y in zip(a, b))
        if k == "free":
            i = 0
            n = min(len(a), len(b))
            while i < n and a[len(a) - 1 - i] == -b[i]:
                i += 1
            return a[: len(a) - i] + b[i:]
        if k == "table":
            return self.table[a][b]
        return tuple(f.mul(x, y) for f, x, y in zip(self.factors, a, b))

    def inv(self, a):
        k = self.kind
        if k == "Z":
            return -a
        if k == "Zd":
            return tuple(-x for x in a)
        if k == "free":
            return tuple(-c for c in reversed(a))
        if k == "table":
            return self._table_inverse[a]
        return tuple(f.inv(x) for f, x in zip(self.factors, a))

    def compose(self, a, b):
        """Product ``ab``; operands from another group are rejected."""
        self._check(a)
        self._check(b)
        return self.mul(a, b)

    def invert(self, a):
        self._check(a)
        return self.inv(a)

    def order_key(self, a) -> tuple:
        k = self.kind
        if k == "Z":
            return _int_key(a)
        if k in ("Zd", "free"):
            return tuple(_int_key(c) for c in a)
        if k == "table":
            return (a,)
        return tuple(f.order_key(x) for f, x in zip(self.factors, a))

    def sort_key(self, a) -> tuple:
        """Canonical enumeration order: word length, then canonical form."""
        return (self.word_length(a), self.order_key(a))

    @cached_property
    def gamma(self) -> tuple:
        """The symmetric generating set S ∪ S⁻¹ ∪ {e}."""
        gs = {self.identity}
        for s in self.generators:
            gs.add(s)
            gs.add(self.inv(s))
        return tuple(sorted(gs, key=self.order_key))

    @cached_property
    def is_standard(self) -> bool:
        """Whether the generators are the standard ones (closed-form lengths apply)."""
        k = self.kind
        if k == "Z":
            return set(self.generators) in ({1}, {-1}, {1, -1})
        if k == "Zd":
            units = {tuple(int(i == j) for j in range(self.rank)) for i in range(self.rank)}
            gens = {s if sum(s) > 0 else tuple(-c for c in s) for s in self.generators}
            return gens == units and len(self.generators) == self.rank
        if k == "free":
            return {abs(s[0]) for s in self.generators if len(s) == 1} == set(range(1, self.rank + 1)) \
                and all(len(s) == 1 for s in self.generators)
        if k == "product":
            return all(f.is_standard for f in self.factors)
        return False

    # -------------------------------------------------------------- word length
    def word_length(self, a) -> int:
        """Smallest r with ``a`` a product of r members of Γ; 0 for the identity."""
        k = self.kind
        if self.is_standard:
            if k == "Z":
                return abs(a)
            if k == "Zd":
                return sum(abs(c) for c in a)
            if k == "free":
                return len(a)
        if k == "product":
            return sum(f.word_length(x) for f, x in zip(self.factors, a))
        dist = self._memo.get("dist")
        if dist is not None and a in dist:
            return dist[a]
        r = 0
        while True:
            layers = self._layers(r)
            if a in self._memo["dist"]:
                return self._memo["dist"][a]
            if self.is_finite and len(layers[-1]) == 0:
                raise ValueError(f"{a!r} is not reachable from the generators")
            r += 1

    def _layers(self, r: int) -> list:
        """Spheres 0..r of the Cayley graph, each sorted canonically."""
        with self._lock:
            layers = self._memo.setdefault("layers", [(self.identity,)])
            dist = self._memo.setdefault("dist", {self.identity: 0})
            while len(layers) <= r:
                last = layers[-1]
                new = set()
                for g in last:
                    for s in self.gamma:
                        h = self.mul(g, s)
                        if h not in dist:
                            new.add(h)
                if len(dist) + len(new) > self.ball_cap:
                    raise ResourceError(
                        f"ball of radius {len(layers)} in {self.describe()} exceeds cap {self.ball_cap}")
                n = len(layers)
                for h in new:
                    dist[h] = n
                layers.append(tuple(sorted(new, key=self.order_key)))
            return layers[: r + 1]

    def ball_size(self, r: int) -> int | None:
        """Closed-form size of the closed ball of radius r, when known."""
        if not self.is_standard:
            return None
        k = self.kind
        if k == "Z":
            return 2 * r + 1
        if k == "Zd":
            d = self.rank
            return sum(2 ** i * math.comb(d, i) * math.comb(r, i) for i in range(d + 1))
        if k == "free":
            q = 2 * self.rank - 1
            return 1 + sum(2 * self.rank * q ** (j - 1) for j in range(1, r + 1))
        if k == "product":
            return None
        return None

    def sphere(self, r: int) -> tuple:
        """Elements of length exactly r, canonically ordered."""
        if r < 0:
            raise ValueError("radius must be nonnegative")
        self._guard(r)
        return self._layers(r)[r]

    def ball(self, r: int, punctured: bool = True) -> "Ball":
        if r < 0:
            raise ValueError("radius must be nonnegative")
        self._guard(r)
        layers = self._layers(r)
        elems = tuple(itertools.chain.from_iterable(layers[1:] if punctured else layers))
        return Ball(r, punctured, elems)

    def closed_ball(self, r: int) -> "Ball":
        return self.ball(r, punctured=False)

    def _guard(self, r: int) -> None:
        size = self.ball_size(r)
        if size is not None and size > self.ball_cap:
            raise ResourceError(f"ball of radius {r} in {self.describe()} has {size} elements (cap {self.ball_cap})")

    def max_radius(self, limit: int, max_elements: int = 20_000) -> int:
        """Largest r ≤ limit whose closed ball has at most ``max_elements`` members."""
        r = 0
        while r < limit:
            size = self.ball_size(r + 1)
            if size is None:
                layers = self._layers(min(r + 1, limit))
                if self.is_finite and len(layers) > r + 1 and not layers[r + 1]:
                    return limit  # ball saturated: the whole group
                size = sum(len(layer) for layer in layers[: r + 2])
            if size > max_elements:
                break
            r += 1
        return r

    # -------------------------------------------------------------- text forms
    def format(self, a) -> str:
        k = self.kind
        if k in ("Z", "table"):
            return str(a)
        if k == "Zd":
            return "(" + ",".join(str(c) for c in a) + ")"
        if k == "free":
            if not a:
                return "e"
            return "".join(_LETTERS[c - 1] if c > 0 else _LETTERS[-c - 1].upper() for c in a)
        return "(" + ",".join(f.format(x) for f, x in zip(self.factors, a)) + ")"

    def parse(self, text: str):
        text = text.strip()
        k = self.kind
        if k in ("Z", "table"):
            return self.element(int(text))
        if k == "Zd":
            parts = [p for p in re.split(r"[(),\s]+", text) if p]
            return self.element(tuple(int(p) for p in parts))
        if k == "free":
            if text in ("", "e"):
                return ()
            word = []
            for ch in text:
                idx = _LETTERS.find(ch.lower())
                if idx < 0 or idx >= self.rank:
                    raise ValueError(f"bad letter {ch!r} for a free group of rank {self.rank}")
                word.append(idx + 1 if ch.islower() else -(idx + 1))
            return _free_reduce(tuple(word))
        raise ValueError("product elements are parsed from lists, not text")

    def describe(self) -> str:
        k = self.kind
        if k == "Z":
            return "Z" if self.is_standard else f"Z<{','.join(map(str, self.generators))}>"
        if k == "Zd":
            return f"Z^{self.rank}"
        if k == "free":
            return f"F_{self.rank}"
        if k == "table":
            return f"finite group of order {len(self.table)}"
        return " x ".join(f.describe() for f in self.factors)


_LETTERS = "abcdefghijklmnopqrstuvwxyz"


def _free_reduce(word: tuple) -> tuple:
    out: list = []
    for c in word:
        if c == 0:
            raise ValueError("0 is not a free-group letter")
        if out and out[-1] == -c:
            out.pop()
        else:
            out.append(c)
    return tuple(out)


# ---------------------------------------------------------------- constructors
def integers(generators: Sequence[int] = (1,)) -> FinitelyGeneratedGroup:
    return FinitelyGeneratedGroup("Z", 1, tuple(int(g) for g in generators))


def free_abelian(d: int, generators: Sequence | None = None) -> FinitelyGeneratedGroup:
    if d < 1:
        raise ValueError("rank must be positive")
    if generators is None:
        generators = [tuple(int(i == j) for j in range(d)) for i in range(d)]
    return FinitelyGeneratedGroup("Zd", d, tuple(tuple(g) for g in generators))


def free_group(k: int) -> FinitelyGeneratedGroup:
    if k < 1:
        raise ValueError("rank must be positive")
    return FinitelyGeneratedGroup("free", k, tuple((i,) for i in range(1, k + 1)))


def finite_group(table: Sequence[Sequence[int]], generators: Sequence[int]) -> FinitelyGeneratedGroup:
    tab = tuple(tuple(int(v) for v in row) for row in table)
    n = len(tab)
    if n == 0 or any(len(row) != n for row in tab) or any(not 0 <= v < n for row in tab for v in row):
        raise ValueError("multiplication table must be square with entries in range")
    if n <= 128:
        for a, b, c in itertools.product(range(n), repeat=3):
            if tab[tab[a][b]][c] != tab[a][tab[b][c]]:
                raise ValueError(f"table is not associative at ({a},{b},{c})")
    group = FinitelyGeneratedGroup("table", 1, tuple(int(g) for g in generators), table=tab)
    group._table_inverse  # validates inverses
    reached = sum(len(layer) for layer in group._layers(n))
    if reached != n:
        raise ValueError("generators do not generate the whole table group")
    return group


def cyclic_group(n: int) -> FinitelyGeneratedGroup:
    return finite_group([[(i + j) % n for j in range(n)] for i in range(n)], [1 % n])


def direct_product(*factors: FinitelyGeneratedGroup) -> FinitelyGeneratedGroup:
    if len(factors) < 2:
        raise ValueError("a direct product needs at least two factors")
    gens = []
    for i, f in enumerate(factors):
        for s in f.generators:
            gens.append(tuple(s if j == i else g.identity for j, g in enumerate(factors)))
    return FinitelyGeneratedGroup("product", len(factors), tuple(gens), factors=tuple(factors))


def group_from_descriptor(desc: dict) -> FinitelyGeneratedGroup:
    """Build a group from a configuration mapping such as ``{"kind": "free", "rank": 2}``."""
    kind = desc.get("kind")
    if kind == "Z":
        return integers(desc.get("generators", (1,)))
    if kind == "Zd":
        return free_abelian(int(desc.get("rank", 2)), desc.get("generators"))
    if kind == "free":
        return free_group(int(desc.get("rank", 2)))
    if kind == "table":
        return finite_group(desc["table"], desc["generators"])
    if kind == "cyclic":
        return cyclic_group(int(desc["order"]))
    if kind == "product":
        return direct_product(*(group_from_descriptor(f) for f in desc["factors"]))
    raise ValueError(f"unknown group kind {kind!r}")


# ------------------------------------------------------------------ ball, K-set
@dataclass(frozen=True)
class Ball:
    radius: int
    punctured: bool
    elements: tuple

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, g) -> bool:
        return g in self.members

    @cached_property
    def members(self) -> frozenset:
        return frozenset(self.elements)


@dataclass(frozen=True)
class KSet:
    base: Any
    punctured: bool
    elements: tuple

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, g) -> bool:
        return g in frozenset(self.elements)


def k_set(group: FinitelyGeneratedGroup, g, punctured: bool = True) -> KSet:
    """Left translates of ``g`` by strictly shorter words.

    The punctured variant uses nonidentity words of length ≤ |g|-1; the closed
    variant also allows the identity, so it contains ``g`` itself.
    """
    g = group.element(g)
    if g == group.identity:
        raise ValueError("K(e) is undefined")
    n = group.word_length(g)
    members = {group.mul(b, g) for b in group.ball(n - 1, punctured)}
    return KSet(g, punctured, tuple(sorted(members, key=group.sort_key)))


def in_k_set(group: FinitelyGeneratedGroup, m, g, punctured: bool = True) -> bool:
    """Membership ``m ∈ K(g)`` without enumerating K(g)."""
    if punctured and m == g:
        return False
    return group.word_length(group.mul(m, group.inv(g))) <= group.word_length(g) - 1


# ------------------------------------------------------------------------ cones
@dataclass(frozen=True)
class ConeApprox:
    """Window of radius R onto the cone of a length-divergent sequence.

    ``lower`` holds ball elements lying in every K-set of the tail, ``upper``
    those lying in at least one.  The true cone meets the ball in a set
    bracketed by the two.
    """

    radius: int
    lower: frozenset
    upper: frozenset
    tail: tuple
    punctured: bool = True

    @property
    def stabilized(self) -> bool:
        return self.lower == self.upper


def cone_approx(group: FinitelyGeneratedGroup, seq: Sequence, R: int, punctured: bool = True) -> ConeApprox:
    seq = [group.element(g) for g in seq]
    lengths = [group.word_length(g) for g in seq]
    if any(b < a for a, b in zip(lengths, lengths[1:])):
        raise ValueError("sequence lengths must be nondecreasing")
    tail = tuple(i for i, n in enumerate(lengths) if n > 2 * R)
    if not tail:
        raise BudgetError(f"no sequence element is longer than 2R = {2 * R}")
    window = group.closed_ball(R).elements
    lower, upper = set(), set()
    for m in window:
        hits = sum(in_k_set(group, m, seq[i], punctured) for i in tail)
        if hits:
            upper.add(m)
        if hits == len(tail):
            lower.add(m)
    return ConeApprox(R, frozenset(lower), frozenset(upper), tail, punctured)


def _infinite_generator(group: FinitelyGeneratedGroup):
    """First user generator of infinite order (for products: from an infinite factor)."""
    if group.kind != "product":
        return group.generators[0]
    i = 0
    for f in group.factors:
        if not f.is_finite:
            return group.generators[i]
        i += len(f.generators)
    return group.generators[0]


def battery_sequence(group: FinitelyGeneratedGroup, name: str, start: int, count: int, seed: int = 0) -> list:
    """A length-divergent sequence from the standard battery.

    Lengths run through ``start, start+1, ...`` (``count`` terms).  Names:
    ``forward`` (powers of the first generator), ``backward`` (its inverse
    powers), ``alternating`` (sign flips every step), ``random`` (a seeded
    random geodesic ray, so lengths are nondecreasing).
    """
    import random

    if start < 1 or count < 1:
        raise ValueError("start and count must be positive")
    s = _infinite_generator(group)
    s_inv = group.inv(s)

    def power(base, n):
        out = group.identity
        for _ in range(n):
            out = group.mul(out, base)
        return out

    if name in ("forward", "backward", "alternating"):
        if group.is_finite:
            raise ValueError("finite groups have no length-divergent sequences")
        out = []
        for i, n in enumerate(range(start, start + count)):
            base = s if name == "forward" or (name == "alternating" and i % 2 == 0) else s_inv
            g = power(base, n)
            while group.word_length(g) < n:  # non-standard generators: extend until length n
                g = group.mul(g, base)
            out.append(g)
        return out
    if name == "random":
        if group.is_finite:
            raise ValueError("finite groups have no length-divergent sequences")
        rng = random.Random(seed)
        g = group.identity
        out = []
        moves = [t for t in group.gamma if t != group.identity]
        while len(out) < count:
            extended = [group.mul(g, t) for t in moves]
            longer = [h for h in extended if group.word_length(h) > group.word_length(g)]
            g = rng.choice(longer)
            if group.word_length(g) >= start:
                out.append(g)
        return out
    raise ValueError(f"unknown test sequence {name!r}")


DEFAULT_BATTERY = ("forward", "backward", "alternating", "random")


# --------------------------------------------------------- thick and syndetic
def _as_predicate(A) -> Callable[[Any], bool]:
    if callable(A):
        return A
    members = frozenset(A)
    return members.__contains__


def is_thick_window(group: FinitelyGeneratedGroup, A, n: int, R: int) -> Verdict:
    """Look for t in the closed R-ball with ball(n)·t ⊆ A.

    Thickness is a tail property, so a failed search gives Unknown, never False.
    """
    if n > R:
        raise ValueError("need n <= R")
    pred = _as_predicate(A)
    small = group.closed_ball(n).elements
    for t in group.closed_ball(R).elements:
        if all(pred(group.mul(b, t)) for b in small):
            return Verdict.true({"t": t, "n": n}, budget={"n": n, "radius": R})
    return Verdict.unknown({"searched": R}, budget={"n": n, "radius": R})


def is_syndetic_window(group: FinitelyGeneratedGroup, A, n: int, R: int,
                       complement_thick: Callable[[int], Any] | None = None) -> Verdict:
    """Find F ⊆ ball(n) with ball(R) ⊆ F·(A ∩ ball(R+n)).

    ``complement_thick`` is an exact oracle for a set known in closed form:
    given m it returns t with ball(m)·t disjoint from A.  Only with it can a
    failed cover become False (a syndetic set meets every thick set).
    """
    if n > R:
        raise ValueError("need n <= R")
    pred = _as_predicate(A)
    memo: dict = {}

    def inA(a):
        v = memo.get(a)
        if v is None:
            v = memo[a] = bool(pred(a))
        return v

    F_all = group.closed_ball(n).elements
    inverses = [group.inv(f) for f in F_all]
    budget = {"n": n, "radius": R}
    covers: dict = {f: set() for f in F_all}
    for g in group.closed_ball(R).elements:
        hit = False
        for f, fi in zip(F_all, inverses):
            if inA(group.mul(fi, g)):
                covers[f].add(g)
                hit = True
        if not hit:
            if complement_thick is not None:
                t = complement_thick(n)
                return Verdict.false({"uncovered": g, "thick_complement_translate": t, "n": n},
                                     exact=True, budget=budget)
            return Verdict.unknown({"uncovered": g}, budget=budget)
    # greedy cover, ties broken canonically
    remaining = set().union(*covers.values())
    chosen = []
    while remaining:
        best = max(F_all, key=lambda f: len(covers[f] & remaining))
        chosen.append(best)
        remaining -= covers[best]
    chosen.sort(key=group.sort_key)
    return Verdict.true({"F": tuple(chosen), "n": n}, budget=budget)


# ------------------------------------------------------- common translates
@dataclass(frozen=True)
class TranslateReport:
    """Result of searching for a common length n with F·t ⊆ K(g)."""

    n: int | None
    witnesses: dict
    failures: dict

    @property
    def found(self) -> bool:
        return self.n is not None


def lemma1d_witness(group: FinitelyGeneratedGroup, F: Iterable, length_range: tuple[int, int],
                    samples: Iterable, punctured: bool = False) -> TranslateReport:
    """Least n in range such that every sample g with |g| ≥ n has some t,
    |t| = n, with F·t ⊆ K(g).

    Uses the closed K-set by default (translates by Γ^{|g|-1}, identity
    included); with the punctured variant the statement can fail in Z.
    """
    F = [group.element(f) for f in F]
    samples = [group.element(g) for g in samples]
    if not samples:
        raise ValueError("empty sample set")
    n_lo, n_hi = length_range
    failures: dict = {}
    for n in range(n_lo, n_hi + 1):
        sphere = group.sphere(n)
        witnesses = {}
        failed = None
        for g in samples:
            if group.word_length(g) < n:
                continue
            for t in sphere:
                if all(in_k_set(group, group.mul(f, t), g, punctured) for f in F):
                    witnesses[g] = t
                    break
            else:
                failed = g
                break
        if failed is None and witnesses:
            return TranslateReport(n, witnesses, failures)
        failures[n] = failed
    return TranslateReport(None, {}, failures)
