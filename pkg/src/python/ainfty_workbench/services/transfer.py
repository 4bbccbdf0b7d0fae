"""
Transfer of the deformed Koszul dga to an A∞-structure on Λ(V) by the ribbon-tree sum.

Tree rules: a leaf carries i(a); a bivalent vertex sends b to (−1)^{|b|}(∂̃−∂)b; a trivalent
vertex sends (b₂, b₁) to (−1)^{|b₁|} b₂b₁; a finite edge applies (−1)^{|b|−1} h(b); the root
applies p. The sum over all trees is aggregated by dynamic programming over (input interval,
bivalent count) so that each subtree value is computed once.
"""

from __future__ import annotations

import itertools
import logging
import os
from collections.abc import Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from algebra.exterior import AElem
from algebra.koszul import BEndo, BTensor, KoszulDifferentials, OneForm, deformation_tensor_formula, mult_B, to_endo
from algebra.scalars import add_weights, all_masks, is_diagonal, popcount, sub_weights, xi_weight
from services.contraction import ContractionData, homotopy_h, include_i, project_p_split
from services.ribbon_trees import RibbonTree
from utils.errors import ConfigError
from utils.serialization import content_hash, dump_constant_table, load_constant_table

logger = logging.getLogger(__name__)

CKey = tuple[tuple[int, ...], int, int]

CACHE_VERSION = 1


@dataclass
class TransferResult:
    """Structure constants μ^d_k of the transferred structure, keyed by (inputs, output, k)."""

    n: int
    gamma: OneForm
    d_max: int
    basis: tuple[int, ...]
    entries: dict[CKey, Fraction] = field(default_factory=dict)

    def table(self, d: int, k: int) -> dict[tuple[tuple[int, ...], int], Fraction]:
        return {(inputs, out): c for (inputs, out, h), c in self.entries.items() if len(inputs) == d and h == k}

    def arities(self) -> list[tuple[int, int]]:
        return sorted({(len(inputs), h) for inputs, _out, h in self.entries})

    def constant_table(self, metadata: Optional[dict] = None) -> str:
        meta = {"gamma": self.gamma.strings(), "d_max": self.d_max, "basis": list(self.basis)}
        meta.update(metadata or {})
        return dump_constant_table(self.entries, self.n, meta)


def admissible_outputs(inputs: Sequence[int], n: int, weighted: bool) -> list[int]:
    """Output masks allowed by parity, and by weight balance when γ is equivariant."""
    d = len(inputs)
    parity = (sum(popcount(m) for m in inputs) + d) & 1
    total = add_weights(*(xi_weight(m, n) for m in inputs)) if inputs else (0,) * n
    out = []
    for mask in all_masks(n):
        if popcount(mask) & 1 != parity:
            continue
        if weighted and not is_diagonal(sub_weights(total, xi_weight(mask, n))):
            continue
        out.append(mask)
    return out


class TransferEngine:
    """
    Evaluates the tree sum with memoized subtree values.

    Subtree values with L leaves are pruned to Sym-degree ≤ d_max − L: only homotopies lower the
    Sym-degree, one per edge, and a subtree sits below at most d_max − L trivalent vertices.
    """

    def __init__(self, gamma: OneForm, d_max: int, extra_bivalent: int = 0, prune: bool = True) -> None:
        if d_max < 1:
            raise ConfigError(f"d_max must be positive, got {d_max}")
        self.gamma = gamma
        self.n = gamma.n
        self.d_max = d_max
        self.extra_bivalent = extra_bivalent
        self.prune = prune
        self.contraction = ContractionData(self.n)
        self.differentials = KoszulDifferentials(gamma)
        self.min_sym = gamma.min_sym_degree()
        if self.min_sym is not None and self.min_sym < 2:
            raise ConfigError(f"the one-form must have Sym-degree >= 2 in every term, found {self.min_sym}")
        self.weighted = gamma.is_weight_homogeneous()
        self._memo: dict[tuple[tuple[int, ...], int], BEndo] = {}

    # -- tree rules -------------------------------------------------------------------------

    def leaf(self, mask: int) -> BEndo:
        return self.contraction.include_endo(mask)

    def bivalent(self, b: BEndo) -> BEndo:
        out = BEndo.zero(self.n)
        for parity, part in b.parity_parts().items():
            value = self.differentials.deformation(part)
            out = out + (value if parity == 0 else -value)
        return out

    def trivalent(self, b2: BEndo, b1: BEndo, projected: bool = False) -> BEndo:
        out = BEndo.zero(self.n)
        for parity, part in b1.parity_parts().items():
            value = mult_B(b2, part, projected=projected)
            out = out + (value if parity == 0 else -value)
        return out

    def edge(self, b: BEndo) -> BEndo:
        out = BEndo.zero(self.n)
        for parity, part in b.parity_parts().items():
            value = self.contraction.homotopy_endo(part)
            out = out + (value if parity == 1 else -value)
        return out

    # -- bounds -----------------------------------------------------------------------------

    def bivalent_bound(self, d: int) -> int:
        """Most bivalent vertices a contributing tree with ``d`` leaves can carry."""
        if self.min_sym is None:
            return 0
        if d == 1:
            return self.d_max + self.extra_bivalent
        r = self.min_sym + 1
        return (d - 2) // (r - 2) + self.extra_bivalent

    def _prune(self, b: BEndo, leaves: int) -> BEndo:
        if not self.prune:
            return b
        return b.prune_sym(self.d_max - leaves)

    # -- aggregated tree sum ----------------------------------------------------------------

    def incoming(self, inputs: tuple[int, ...], bivalent: int) -> BEndo:
        """Sum over subtrees on ``inputs`` with ``bivalent`` bivalent vertices, as seen by the parent edge."""
        if len(inputs) == 1 and bivalent == 0:
            return self.leaf(inputs[0])
        key = (inputs, bivalent)
        cached = self._memo.get(key)
        if cached is None:
            cached = self._prune(self.edge(self.vertex(inputs, bivalent)), len(inputs))
            self._memo[key] = cached
        return cached

    def vertex(self, inputs: tuple[int, ...], bivalent: int, projected: bool = False) -> BEndo:
        """Sum over subtrees whose root vertex is internal, before the outgoing edge is applied."""
        total = BEndo.zero(self.n)
        if bivalent >= 1:
            value = self.bivalent(self.incoming(inputs, bivalent - 1))
            total = total + value
        for split in range(1, len(inputs)):
            left, right = inputs[:split], inputs[split:]
            for b_left in range(bivalent + 1):
                b2 = self.incoming(left, b_left)
                if not b2:
                    continue
                b1 = self.incoming(right, bivalent - b_left)
                if not b1:
                    continue
                total = total + self.trivalent(b2, b1, projected=projected)
        return self._prune(total, len(inputs))

    def mu(self, inputs: tuple[int, ...]) -> dict[tuple[int, int], Fraction]:
        """μ(inputs) as {(output mask, k): coefficient}."""
        out: dict[tuple[int, int], Fraction] = {}
        for bivalent in range(self.bivalent_bound(len(inputs)) + 1):
            if len(inputs) == 1 and bivalent == 0:
                continue
            root = self.vertex(inputs, bivalent, projected=True)
            for h, part in ContractionData.project_endo_split(root).items():
                for mask, c in part.items():
                    out[(mask, h)] = out.get((mask, h), 0) + c
        return {key: c for key, c in out.items() if c}

    # -- single trees -----------------------------------------------------------------------

    def evaluate_tree(self, tree: RibbonTree, inputs: Sequence[AElem]) -> dict[int, AElem]:
        """Value of one tree on arbitrary (ℤ/2-homogeneous) inputs, split by ħ-power."""
        if len(inputs) != tree.leaves:
            raise ValueError(f"tree has {tree.leaves} leaves but {len(inputs)} inputs were given")
        if tree.kind == "leaf":
            raise ValueError("a bare leaf is not a tree")
        feed = iter(inputs)

        def value(node: RibbonTree, root: bool) -> BEndo:
            if node.kind == "leaf":
                return to_endo(include_i(next(feed)))
            if node.kind == "bi":
                result = self.bivalent(value(node.children[0], False))
            else:
                left = value(node.children[0], False)
                right = value(node.children[1], False)
                result = self.trivalent(left, right)
            return result if root else self.edge(result)

        top = value(tree, True)
        return {h: AElem(self.n, dict(t)) for h, t in ContractionData.project_endo_split(top).items() if t}


# ---------------------------------------------------------------------------------------------
# full tables


def _cache_file(cache_dir: Path, gamma: OneForm, d_max: int, basis: Sequence[int], conventions: str) -> Path:
    digest = content_hash(
        {
            "version": CACHE_VERSION,
            "gamma": gamma.strings(),
            "d_max": d_max,
            "basis": list(basis),
            "conventions": conventions,
        }
    )
    return cache_dir / f"transfer-{digest}.json"


def transfer(
    gamma: OneForm,
    d_max: int,
    basis: Optional[Iterable[int]] = None,
    threads: int = 1,
    cache_dir: Optional[Path] = None,
    conventions: str = "",
    extra_bivalent: int = 0,
    min_arity: int = 1,
) -> TransferResult:
    """
    Compute μ^d_k for ``min_arity ≤ d ≤ d_max`` on all tuples drawn from ``basis`` (default: all masks).

    Args:
        gamma: the deforming one-form, every term of Sym-degree ≥ 2.
        d_max: largest arity.
        basis: restrict inputs to these masks.
        threads: worker threads; results do not depend on it.
        cache_dir: directory for cached tables, defaults to ``AINFTY_CACHE_DIR`` when set.
        conventions: text folded into the cache key (hash of the conventions file).
        extra_bivalent: allow this many bivalent vertices beyond the bound.

    Returns:
        TransferResult with every nonzero constant.
    """
    n = gamma.n
    basis_masks = tuple(sorted(basis)) if basis is not None else tuple(all_masks(n))
    if cache_dir is None and os.getenv("AINFTY_CACHE_DIR"):
        cache_dir = Path(os.environ["AINFTY_CACHE_DIR"])
    cache_path = None
    if cache_dir is not None and extra_bivalent == 0 and min_arity == 1:
        cache_path = _cache_file(Path(cache_dir), gamma, d_max, basis_masks, conventions)
        if cache_path.exists():
            _n, _meta, entries = load_constant_table(cache_path.read_text(encoding="utf-8"))
            logger.info(f"[Transfer] loaded {len(entries)} constants from cache {cache_path.name}")
            return TransferResult(n, gamma, d_max, basis_masks, {k: Fraction(v) for k, v in entries.items()})

    engine = TransferEngine(gamma, d_max, extra_bivalent=extra_bivalent)
    result = TransferResult(n, gamma, d_max, basis_masks)
    for d in range(min_arity, d_max + 1):
        tuples = [t for t in itertools.product(basis_masks, repeat=d) if admissible_outputs(t, n, engine.weighted)]
        logger.info(f"[Transfer] arity {d}: {len(tuples)} input tuples, bivalent bound {engine.bivalent_bound(d)}")
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                values = list(pool.map(engine.mu, tuples))
        else:
            values = [engine.mu(t) for t in tuples]
        found = 0
        for inputs, value in zip(tuples, values):
            allowed = set(admissible_outputs(inputs, n, engine.weighted))
            for (mask, h), c in value.items():
                if mask not in allowed:
                    logger.warning(f"[Transfer] constant outside the admissible outputs: {inputs} -> {mask} (k={h})")
                result.entries[(inputs, mask, h)] = c
                found += 1
        logger.info(f"[Transfer] arity {d}: {found} nonzero constants")

    if cache_path is not None:
        cache_path.parent.mkdir(parents=True, exist_ok=True)
        cache_path.write_text(result.constant_table(), encoding="utf-8")
        logger.info(f"[Transfer] cached table at {cache_path}")
    return result


def mu1_series(gamma: OneForm, basis: Optional[Iterable[int]] = None, max_terms: int = 8) -> dict[CKey, Fraction]:
    """
    μ¹(a) = Σ_m (−1)^{|a|} p (∂̃−∂)(h(∂̃−∂))^{m−1} i(a), evaluated in tensor form.
    """
    n = gamma.n
    out: dict[CKey, Fraction] = {}
    for mask in basis if basis is not None else all_masks(n):
        sign = -1 if popcount(mask) & 1 else 1
        x: BTensor = include_i(AElem.basis(n, mask))
        for _ in range(max_terms):
            y = deformation_tensor_formula(gamma, x)
            if not y:
                break
            for h, part in project_p_split(y).items():
                for target, c in part.terms.items():
                    key = ((mask,), target, h)
                    out[key] = out.get(key, 0) + sign * c
            x = homotopy_h(y)
            if not x:
                break
    return {k: c for k, c in out.items() if c}
