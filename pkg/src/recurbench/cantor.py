"""Zero-dimensional compact spaces as refining chains of finite clopen partitions.

Level 0 is always the one-cell partition.  A point is anything the space can
address: ``space.cell_id(x, k)`` names the level-k cell containing it.
"""
from __future__ import annotations

import itertools
from collections.abc import Callable, Hashable, Iterable
from dataclasses import dataclass
from functools import lru_cache

from .errors import BudgetError

DEFAULT_DEPTH = 16


@dataclass(frozen=True)
class Cell:
    level: int
    id: Hashable


class Space:
    """Base class; subclasses supply ``cell_id``, ``parent_id`` and ``cell_ids``."""

    name = "space"

    def __init__(self, max_depth: int = DEFAULT_DEPTH):
        self.max_depth = max_depth

    def cell_id(self, x, k: int) -> Hashable:
        raise NotImplementedError

    def parent_id(self, cid: Hashable, k: int) -> Hashable:
        """Id of the level-(k-1) cell containing level-k cell ``cid``."""
        raise NotImplementedError

    def cell_ids(self, k: int) -> tuple:
        """All nonempty level-k cells, in a fixed order."""
        raise NotImplementedError

    def label(self, cid: Hashable) -> str:
        return str(cid)

    def _depth(self, k: int) -> None:
        if k < 0:
            raise ValueError("levels are nonnegative")
        if k > self.max_depth:
            raise BudgetError(f"level {k} beyond supported depth {self.max_depth}")

    def cell_of(self, x, k: int) -> Cell:
        self._depth(k)
        return Cell(k, self.cell_id(x, k))

    def parent(self, cell: Cell) -> Cell:
        if cell.level == 0:
            raise ValueError("the root cell has no parent")
        return Cell(cell.level - 1, self.parent_id(cell.id, cell.level))

    def cells(self, k: int) -> tuple:
        self._depth(k)
        return tuple(Cell(k, c) for c in self.cell_ids(k))

    def children_ids(self, cid: Hashable, k: int) -> tuple:
        """Ids of the level-(k+1) cells inside level-k cell ``cid``."""
        return _children_table(self, k + 1).get(cid, ())

    def children(self, cell: Cell) -> tuple:
        return tuple(Cell(cell.level + 1, c) for c in self.children_ids(cell.id, cell.level))

    def full(self) -> "ClopenSet":
        return ClopenSet(self, 0, frozenset(self.cell_ids(0)))

    def empty(self) -> "ClopenSet":
        return ClopenSet(self, 0, frozenset())

    def cylinder(self, x, k: int) -> "ClopenSet":
        return ClopenSet(self, k, frozenset([self.cell_id(x, k)]))


@lru_cache(maxsize=256)
def _children_table(space: Space, k: int) -> dict:
    table: dict = {}
    for c in space.cell_ids(k):
        table.setdefault(space.parent_id(c, k), []).append(c)
    return {p: tuple(v) for p, v in table.items()}


class OdometerSpace(Space):
    """b-adic integers; points are Python ints, cells are the first k digits
    (least significant first)."""

    def __init__(self, base: int, max_depth: int = DEFAULT_DEPTH):
        if base < 2:
            raise ValueError("base must be at least 2")
        super().__init__(max_depth)
        self.base = base
        self.name = f"{base}-adic integers"

    def cell_id(self, x: int, k: int) -> tuple:
        b = self.base
        return tuple((x // b ** i) % b for i in range(k))

    def parent_id(self, cid, k):
        return cid[:-1]

    def cell_ids(self, k):
        return tuple(tuple(reversed(t)) for t in itertools.product(range(self.base), repeat=k))

    def label(self, cid) -> str:
        sep = "" if self.base <= 10 else "."
        return sep.join(str(d) for d in cid)


@dataclass(frozen=True)
class SubshiftPoint:
    """The two-sided sequence ``i ↦ seq(i + offset)``."""

    seq: str
    offset: int = 0

    def __str__(self) -> str:
        return f"{self.seq}@{self.offset}"


class SubshiftSpace(Space):
    """Two-sided subshift; level k ≥ 1 cells are central windows on [-k, k].

    ``sequences`` maps names to symbol functions; ``language(L)`` returns the
    exact set of allowed words of length L.
    """

    def __init__(self, name: str, alphabet: Iterable[str], sequences: dict[str, Callable[[int], str]],
                 language: Callable[[int], frozenset], max_depth: int = DEFAULT_DEPTH):
        super().__init__(max_depth)
        self.name = name
        self.alphabet = tuple(alphabet)
        self.sequences = dict(sequences)
        self.language = language

    def symbol(self, x: SubshiftPoint, i: int) -> str:
        return self.sequences[x.seq](i + x.offset)

    def window(self, x: SubshiftPoint, lo: int, hi: int) -> str:
        f = self.sequences[x.seq]
        return "".join(f(i + x.offset) for i in range(lo, hi + 1))

    def cell_id(self, x, k):
        if k == 0:
            return ""
        return self.window(x, -k, k)

    def parent_id(self, cid, k):
        return "" if k == 1 else cid[1:-1]

    def cell_ids(self, k):
        if k == 0:
            return ("",)
        return tuple(sorted(self.language(2 * k + 1)))


class FiniteSpace(Space):
    """Points 0..m-1; every level k ≥ 1 is the discrete partition."""

    def __init__(self, m: int, max_depth: int = DEFAULT_DEPTH):
        if m < 1:
            raise ValueError("need at least one point")
        super().__init__(max_depth)
        self.m = m
        self.name = f"{m} points"

    def cell_id(self, x, k):
        return "" if k == 0 else x

    def parent_id(self, cid, k):
        return "" if k == 1 else cid

    def cell_ids(self, k):
        return ("",) if k == 0 else tuple(range(self.m))


class ProductSpace(Space):
    """X × X with the product partitions (a cell is an ordered pair of cells)."""

    def __init__(self, left: Space, right: Space):
        super().__init__(min(left.max_depth, right.max_depth))
        self.left, self.right = left, right
        self.name = f"{left.name} x {right.name}"

    def cell_id(self, x, k):
        return (self.left.cell_id(x[0], k), self.right.cell_id(x[1], k))

    def parent_id(self, cid, k):
        return (self.left.parent_id(cid[0], k), self.right.parent_id(cid[1], k))

    def cell_ids(self, k):
        return tuple(itertools.product(self.left.cell_ids(k), self.right.cell_ids(k)))

    def label(self, cid) -> str:
        return f"({self.left.label(cid[0])},{self.right.label(cid[1])})"

    def diagonal(self, k: int) -> "ClopenSet":
        """The level-k entourage: pairs lying in a common level-k cell."""
        return ClopenSet(self, k, frozenset((c, c) for c in self.left.cell_ids(k)))


# --------------------------------------------------------------------- clopens
class ClopenSet:
    """Finite union of level-k cells.

    Equality compares normal forms (the coarsest level at which the set is a
    union of cells), so it does not depend on the representation level.
    """

    __slots__ = ("space", "level", "cells", "_normal")

    def __init__(self, space: Space, level: int, cells: Iterable):
        space._depth(level)
        self.space = space
        self.level = level
        self.cells = frozenset(cells)
        self._normal = None

    def __repr__(self) -> str:
        labels = sorted(self.space.label(c) for c in self.cells)
        return f"ClopenSet(level={self.level}, cells={labels})"

    def __contains__(self, x) -> bool:
        return self.space.cell_id(x, self.level) in self.cells

    def contains(self, x) -> bool:
        return x in self

    def refine(self, k: int) -> "ClopenSet":
        if k < self.level:
            raise ValueError("refine cannot coarsen a clopen set")
        ids = self.cells
        for j in range(self.level, k):
            ids = frozenset(c for p in ids for c in self.space.children_ids(p, j))
        return ClopenSet(self.space, k, ids)

    def normal_form(self) -> "ClopenSet":
        if self._normal is not None:
            return self._normal
        level, ids = self.level, self.cells
        if not ids:
            level, ids = 0, frozenset()
        while level > 0:
            parents = {self.space.parent_id(c, level) for c in ids}
            if all(set(self.space.children_ids(p, level - 1)) <= ids for p in parents):
                level, ids = level - 1, frozenset(parents)
            else:
                break
        out = ClopenSet(self.space, level, ids)
        out._normal = out
        self._normal = out
        return out

    def _align(self, other: "ClopenSet"):
        if other.space is not self.space:
            raise ValueError("clopen sets live in different spaces")
        k = max(self.level, other.level)
        return self.refine(k), other.refine(k), k

    def union(self, other):
        a, b, k = self._align(other)
        return ClopenSet(self.space, k, a.cells | b.cells)

    def intersect(self, other):
        a, b, k = self._align(other)
        return ClopenSet(self.space, k, a.cells & b.cells)

    def complement(self):
        return ClopenSet(self.space, self.level, frozenset(self.space.cell_ids(self.level)) - self.cells)

    def is_subset(self, other) -> bool:
        a, b, _ = self._align(other)
        return a.cells <= b.cells

    __or__ = union
    __and__ = intersect
    __invert__ = complement
    __le__ = is_subset

    def is_empty(self) -> bool:
        return not self.cells

    def is_full(self) -> bool:
        return self.cells == frozenset(self.space.cell_ids(self.level))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ClopenSet) or other.space is not self.space:
            return NotImplemented
        a, b = self.normal_form(), other.normal_form()
        return a.level == b.level and a.cells == b.cells

    def __hash__(self) -> int:
        n = self.normal_form()
        return hash((n.level, n.cells))


# ------------------------------------------------------------------ separation
def cell_of(space: Space, x, k: int) -> Cell:
    return space.cell_of(x, k)


def separation_level(space: Space, x, y, depth: int) -> int | None:
    """Least k ≤ depth with x and y in different level-k cells.

    ``None`` means they share a cell at every level up to ``depth``.
    """
    for k in range(1, depth + 1):
        if space.cell_id(x, k) != space.cell_id(y, k):
            return k
    return None


def agreement_depth(space: Space, x, y, depth: int) -> int:
    """Largest k ≤ depth with x and y in the same level-k cell."""
    s = separation_level(space, x, y, depth)
    return depth if s is None else s - 1
