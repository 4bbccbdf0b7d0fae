"""
Planar rooted trees with bivalent and trivalent internal vertices.

Leaves are ordered left to right as ``a_d … a_1``; a trivalent vertex has a left and a right child.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Literal

NodeKind = Literal["leaf", "bi", "tri"]


@dataclass(frozen=True)
class RibbonTree:
    kind: NodeKind
    children: tuple[RibbonTree, ...] = ()

    def __post_init__(self) -> None:
        arity = {"leaf": 0, "bi": 1, "tri": 2}[self.kind]
        if len(self.children) != arity:
            raise ValueError(f"{self.kind} vertex takes {arity} children, got {len(self.children)}")

    @classmethod
    def leaf(cls) -> RibbonTree:
        return cls("leaf")

    @classmethod
    def bivalent(cls, child: RibbonTree) -> RibbonTree:
        return cls("bi", (child,))

    @classmethod
    def trivalent(cls, left: RibbonTree, right: RibbonTree) -> RibbonTree:
        return cls("tri", (left, right))

    @property
    def leaves(self) -> int:
        if self.kind == "leaf":
            return 1
        return sum(child.leaves for child in self.children)

    @property
    def bivalent_count(self) -> int:
        own = 1 if self.kind == "bi" else 0
        return own + sum(child.bivalent_count for child in self.children)

    @property
    def trivalent_count(self) -> int:
        own = 1 if self.kind == "tri" else 0
        return own + sum(child.trivalent_count for child in self.children)

    @property
    def internal_edges(self) -> int:
        """Edges between two internal vertices; each carries one homotopy."""
        return sum((child.kind != "leaf") + child.internal_edges for child in self.children)

    def __str__(self) -> str:
        if self.kind == "leaf":
            return "L"
        if self.kind == "bi":
            return f"B({self.children[0]})"
        return f"T({self.children[0]},{self.children[1]})"


@lru_cache(maxsize=None)
def _subtrees(leaves: int, bivalent: int) -> tuple[RibbonTree, ...]:
    """All trees with the given shape counts whose root may also be a bare leaf."""
    out: list[RibbonTree] = []
    if leaves == 1 and bivalent == 0:
        out.append(RibbonTree.leaf())
    if bivalent >= 1:
        out.extend(RibbonTree.bivalent(child) for child in _subtrees(leaves, bivalent - 1))
    for split in range(1, leaves):
        for b_left in range(bivalent + 1):
            lefts = _subtrees(split, b_left)
            if not lefts:
                continue
            rights = _subtrees(leaves - split, bivalent - b_left)
            out.extend(RibbonTree.trivalent(left, right) for left in lefts for right in rights)
    return tuple(out)


def enumerate_trees(d: int, b: int) -> list[RibbonTree]:
    """Planar trees with ``d`` leaves and ``b`` bivalent vertices; the bare leaf is not a tree here."""
    if d < 1 or b < 0:
        return []
    return [tree for tree in _subtrees(d, b) if tree.kind != "leaf"]


@lru_cache(maxsize=None)
def _count(leaves: int, bivalent: int) -> int:
    total = 1 if (leaves == 1 and bivalent == 0) else 0
    if bivalent >= 1:
        total += _count(leaves, bivalent - 1)
    for split in range(1, leaves):
        for b_left in range(bivalent + 1):
            total += _count(split, b_left) * _count(leaves - split, bivalent - b_left)
    return total


def count_trees(d: int, b: int) -> int:
    if d < 1 or b < 0:
        return 0
    if d == 1:
        return 1 if b >= 1 else 0
    return _count(d, b)


def catalan(k: int) -> int:
    return comb(2 * k, k) // (k + 1)


def closed_form_count(d: int, b: int) -> int:
    """Catalan(d−1) · C(b + 2d − 2, b): bivalent vertices distributed over the 2d − 1 edges of a binary tree."""
    if d < 1 or b < 0:
        return 0
    if d == 1:
        return 1 if b >= 1 else 0
    return catalan(d - 1) * comb(b + 2 * d - 2, b)
