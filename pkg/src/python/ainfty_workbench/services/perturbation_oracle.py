"""
Brute-force perturbation series in tensor form, used to cross-check :mod:`services.transfer`.

No trees and no matrices: the perturbed inclusion Σ (E∘B)^m i, the vertex closure Σ (B∘E)^m and
the binary recursion over splits are evaluated directly on Ω(V)⊗Λ(V) with the pairing product.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from typing import Optional

from algebra.exterior import AElem
from algebra.koszul import BTensor, OneForm, deformation_tensor_formula, tensor_product
from services.contraction import homotopy_h, include_i, project_p_split

logger = logging.getLogger(__name__)


class PerturbationOracle:
    def __init__(self, gamma: OneForm, d_max: int, max_terms: Optional[int] = None) -> None:
        self.gamma = gamma
        self.n = gamma.n
        self.d_max = d_max
        self.max_terms = max_terms if max_terms is not None else d_max
        self._incoming: dict[tuple[int, ...], BTensor] = {}

    def _signed(self, x: BTensor, op, odd_sign: int) -> BTensor:
        out = BTensor.zero(self.n)
        for parity, part in x.parity_parts().items():
            value = op(part)
            out = out + (value.scale(odd_sign) if parity == 1 else value.scale(-odd_sign))
        return out

    def b(self, x: BTensor) -> BTensor:
        return self._signed(x, lambda part: deformation_tensor_formula(self.gamma, part), -1)

    def e(self, x: BTensor) -> BTensor:
        return self._signed(x, homotopy_h, 1)

    def t(self, x2: BTensor, x1: BTensor) -> BTensor:
        out = BTensor.zero(self.n)
        for parity, part in x1.parity_parts().items():
            value = tensor_product(x2, part)
            out = out + (value if parity == 0 else -value)
        return out

    def _cap(self, x: BTensor) -> BTensor:
        # Terms above Sym-degree d_max can never be brought back to Sym-degree 0.
        return x.prune_sym(self.d_max)

    def incoming(self, inputs: tuple[int, ...]) -> BTensor:
        cached = self._incoming.get(inputs)
        if cached is not None:
            return cached
        if len(inputs) == 1:
            x = include_i(AElem.basis(self.n, inputs[0]))
            total = x
            for _ in range(self.max_terms):
                x = self._cap(self.e(self.b(x)))
                if not x:
                    break
                total = total + x
        else:
            total = self._cap(self.e(self.top(inputs)))
        self._incoming[inputs] = total
        return total

    def top(self, inputs: tuple[int, ...]) -> BTensor:
        """Everything arriving at the outgoing edge of the vertex nearest the root, before h or p."""
        if len(inputs) == 1:
            return self._cap(self.b(self.incoming(inputs)))
        seed = BTensor.zero(self.n)
        for split in range(1, len(inputs)):
            seed = seed + self.t(self.incoming(inputs[:split]), self.incoming(inputs[split:]))
        seed = self._cap(seed)
        total, x = seed, seed
        for _ in range(self.max_terms):
            x = self._cap(self.b(self.e(x)))
            if not x:
                break
            total = total + x
        return total

    def mu(self, inputs: tuple[int, ...]) -> dict[tuple[int, int], Fraction]:
        out: dict[tuple[int, int], Fraction] = {}
        for h, part in project_p_split(self.top(inputs)).items():
            for mask, c in part.terms.items():
                out[(mask, h)] = Fraction(c)
        return {key: c for key, c in out.items() if c}
