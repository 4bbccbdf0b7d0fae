"""
Diagonal abelian groups acting on V through (ℤ/5)ⁿ weights.

A group is given by generator covectors g; an element acts on a weight-w vector by ζ^{⟨g, w⟩}.
"""

from __future__ import annotations

import itertools
from collections.abc import Sequence
from dataclasses import dataclass
from functools import cached_property

from algebra.scalars import WEIGHT_MODULUS, Cyc5, Weight, pairing
from utils.errors import ConfigError

DEFAULT_G_GENERATORS = ((1, 4, 0), (0, 1, 4))
DEFAULT_Z_GENERATOR = (1, 1, 3)


@dataclass(frozen=True)
class GroupSpec:
    n: int
    generators: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        diagonal = (1,) * self.n
        for g in self.generators:
            if len(g) != self.n:
                raise ConfigError(f"generator {g} does not have {self.n} entries")
            if pairing(g, diagonal) != 0:
                raise ConfigError(f"generator {g} is not in SL(V): its entries do not sum to 0 mod 5")

    @classmethod
    def of(cls, n: int, generators: Sequence[Sequence[int]]) -> GroupSpec:
        return cls(n, tuple(tuple(int(x) % WEIGHT_MODULUS for x in g) for g in generators))

    @classmethod
    def default_g(cls) -> GroupSpec:
        return cls.of(3, DEFAULT_G_GENERATORS)

    @classmethod
    def default_z(cls) -> GroupSpec:
        return cls.of(3, (DEFAULT_Z_GENERATOR,))

    @classmethod
    def trivial(cls, n: int) -> GroupSpec:
        return cls(n, ())

    @cached_property
    def elements(self) -> tuple[tuple[int, ...], ...]:
        """All group elements as covectors mod 5, identity first, in a fixed order."""
        seen: dict[tuple[int, ...], None] = {(0,) * self.n: None}
        for powers in itertools.product(range(WEIGHT_MODULUS), repeat=len(self.generators)):
            element = tuple(
                sum(p * g[i] for p, g in zip(powers, self.generators)) % WEIGHT_MODULUS for i in range(self.n)
            )
            seen.setdefault(element, None)
        return tuple(seen)

    @property
    def order(self) -> int:
        return len(self.elements)

    def index_of(self, element: Sequence[int]) -> int:
        return self.elements.index(tuple(x % WEIGHT_MODULUS for x in element))

    def multiply(self, i: int, j: int) -> int:
        a, b = self.elements[i], self.elements[j]
        return self.index_of(tuple(x + y for x, y in zip(a, b)))

    def is_invariant(self, weight: Weight) -> bool:
        return all(pairing(g, weight) == 0 for g in self.generators)

    def character(self, element: Sequence[int], weight: Weight) -> Cyc5:
        return Cyc5.zeta(pairing(element, weight))
