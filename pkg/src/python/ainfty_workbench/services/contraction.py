"""
Contraction data (i, p, h) between Λ(V) and the Koszul dga B, with exhaustive verification.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial

from algebra.exterior import AElem, wedge_A
from algebra.koszul import (
    BEndo,
    BKey,
    BTensor,
    KoszulDifferentials,
    OneForm,
    delta_deformed,
    mult_B,
    to_endo,
    to_tensor,
)
from algebra.polynomials import Poly
from algebra.scalars import (
    MultiIndex,
    all_masks,
    bit,
    contraction_sign,
    merge_sign,
    monomials_up_to,
    popcount,
    reversal_sign,
)
from utils.errors import MatrixFactorizationError

logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def homotopy_coefficient(w: int, p: int) -> Fraction:
    """p! / (w (w+1) ⋯ (w+p))."""
    denominator = 1
    for t in range(w, w + p + 1):
        denominator *= t
    return Fraction(factorial(p), denominator)


def include_i(a: AElem) -> BTensor:
    """i(θ) = Σ_J dv_{j₁}∧…∧dv_{j_p} ⊗ ξ_{j_p}∧…∧ξ_{j₁}∧θ."""
    n = a.n
    zero = (0,) * n
    out: dict[BKey, Fraction] = {}
    for theta, c in a.terms.items():
        for j in all_masks(n):
            s = merge_sign(j, theta)
            if s:
                key = (zero, j, j | theta, 0)
                out[key] = out.get(key, 0) + reversal_sign(popcount(j)) * s * c
    return BTensor(n, out)


def project_p_split(b: BTensor) -> dict[int, AElem]:
    """p by ħ-power: keep the terms with Sym-degree 0 and empty covector part."""
    parts: dict[int, dict[int, Fraction]] = {}
    for (m, beta, theta, h), c in b.terms.items():
        if beta or any(m):
            continue
        bucket = parts.setdefault(h, {})
        bucket[theta] = bucket.get(theta, 0) + c
    return {h: AElem(b.n, t) for h, t in parts.items() if any(t.values())}


def project_p(b: BTensor) -> AElem:
    total = AElem(b.n)
    for part in project_p_split(b).values():
        total = total + part
    return total


def homotopy_h(b: BTensor) -> BTensor:
    """Σ_p p!/(w⋯(w+p)) df∧β∧dv_J ⊗ ξ_J^rev∧θ with w = deg f + |β|; zero when w = 0."""
    n = b.n
    out: dict[BKey, Fraction] = {}
    for (m, beta, theta, h), c in b.terms.items():
        w = sum(m) + popcount(beta)
        if w == 0:
            continue
        for k in range(1, n + 1):
            a = m[k - 1]
            if not a:
                continue
            s0 = merge_sign(bit(k), beta)
            if not s0:
                continue
            df_mono: MultiIndex = m[: k - 1] + (a - 1,) + m[k:]
            left = beta | bit(k)
            for j in all_masks(n):
                s1 = merge_sign(left, j)
                if not s1:
                    continue
                s2 = merge_sign(j, theta)
                if not s2:
                    continue
                p = popcount(j)
                coeff = c * a * s0 * s1 * s2 * reversal_sign(p) * homotopy_coefficient(w, p)
                key = (df_mono, left | j, theta | j, h)
                out[key] = out.get(key, 0) + coeff
    return BTensor(n, out)


def contraction_operator(theta: int, n: int) -> BEndo:
    """ι_θ on Λ(V^∨) built from successive single contractions, ι_{ξ_a∧ξ_b} = ι_{ξ_a}∘ι_{ξ_b}."""
    zero = (0,) * n
    out: dict[BKey, Fraction] = {}
    indices = [k for k in range(1, n + 1) if theta & bit(k)]
    for col in all_masks(n):
        current, sign = col, 1
        for k in reversed(indices):
            s = contraction_sign(k, current)
            if not s:
                sign = 0
                break
            sign *= s
            current &= ~bit(k)
        if sign:
            out[(zero, current, col, 0)] = Fraction(sign)
    return BEndo(n, out)


class ContractionData:
    """i, p, h with the matrix-side variants the transfer engine consumes."""

    def __init__(self, n: int) -> None:
        self.n = n
        self._include_cache: dict[int, BEndo] = {}

    def include(self, a: AElem) -> BTensor:
        return include_i(a)

    def project(self, b: BTensor) -> AElem:
        return project_p(b)

    def homotopy(self, b: BTensor) -> BTensor:
        return homotopy_h(b)

    def include_endo(self, mask: int) -> BEndo:
        cached = self._include_cache.get(mask)
        if cached is None:
            cached = to_endo(include_i(AElem.basis(self.n, mask)))
            self._include_cache[mask] = cached
        return cached

    def homotopy_endo(self, b: BEndo) -> BEndo:
        return to_endo(homotopy_h(to_tensor(b)))

    @staticmethod
    def project_endo_split(b: BEndo) -> dict[int, dict[int, Fraction]]:
        """p on a matrix: entries (Sym 0, row ∅, col θ) carry ⟨ξ_θ, dv_θ⟩ back to tensor form."""
        parts: dict[int, dict[int, Fraction]] = {}
        for (m, r, c, h), coeff in b.terms.items():
            if r or any(m):
                continue
            bucket = parts.setdefault(h, {})
            bucket[c] = bucket.get(c, 0) + coeff * reversal_sign(popcount(c))
        return {h: {c: v for c, v in t.items() if v} for h, t in parts.items()}


# ---------------------------------------------------------------------------------------------
# verification


@dataclass
class ContractionReport:
    n: int
    max_sym: int
    epsilon: int = 0
    checked_terms: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures and self.epsilon != 0

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status}: n={self.n}, Sym-degree <= {self.max_sym}, {self.checked_terms} terms, "
            f"homotopy sign {self.epsilon:+d}, {len(self.failures)} failures"
        )


def _monomial_terms(n: int, max_sym: int) -> list[BTensor]:
    terms = []
    for m in monomials_up_to(n, max_sym):
        for beta in all_masks(n):
            for theta in all_masks(n):
                terms.append(BTensor.term(n, m, beta, theta))
    return terms


def verify_contraction(n: int, max_sym: int) -> ContractionReport:
    """
    Check p i = id, h² = 0, p h = 0, h i = 0, the chain-map properties of i and p, multiplicativity
    of i, and ∂h + h∂ = ε (id − i p) on every monomial term of Sym-degree ≤ ``max_sym``.

    ε is read off from the first term where id − i p is nonzero and then enforced everywhere.
    """
    report = ContractionReport(n=n, max_sym=max_sym)
    diffs = KoszulDifferentials(OneForm.zero(n))

    def partial(x: BTensor) -> BTensor:
        return to_tensor(diffs.partial(to_endo(x)))

    for mask in all_masks(n):
        a = AElem.basis(n, mask)
        ia = include_i(a)
        if project_p(ia) != a:
            report.failures.append(f"p i != id on {a}")
        if homotopy_h(ia):
            report.failures.append(f"h i != 0 on {a}")
        if partial(ia):
            report.failures.append(f"d i != 0 on {a}")
        if to_endo(ia) != contraction_operator(mask, n):
            report.failures.append(f"i({a}) is not the contraction operator")
        for other in all_masks(n):
            b = AElem.basis(n, other)
            lhs = to_endo(include_i(wedge_A(a, b)))
            rhs = mult_B(to_endo(ia), to_endo(include_i(b)))
            if lhs != rhs:
                report.failures.append(f"i is not multiplicative on ({a}, {b})")

    for x in _monomial_terms(n, max_sym):
        report.checked_terms += 1
        hx = homotopy_h(x)
        if homotopy_h(hx):
            report.failures.append(f"h^2 != 0 on {x}")
        if project_p(hx):
            report.failures.append(f"p h != 0 on {x}")
        if project_p(partial(x)):
            report.failures.append(f"p d != 0 on {x}")
        lhs = partial(hx) + homotopy_h(partial(x))
        rhs = x - include_i(project_p(x))
        if report.epsilon == 0 and rhs:
            if lhs == rhs:
                report.epsilon = 1
            elif lhs == -rhs:
                report.epsilon = -1
            else:
                report.failures.append(f"homotopy identity has no sign on {x}")
                continue
            logger.info(f"[Contraction] homotopy sign fixed to {report.epsilon:+d} by {x}")
        if report.epsilon and lhs != rhs.scale(report.epsilon):
            report.failures.append(f"dh + hd != eps (id - i p) on {x}")

    logger.info(f"[Contraction] {report.summary()}")
    return report


def matrix_factorization_check(gamma: OneForm) -> Poly:
    """Return W_eff = −γ(η) after checking δ̃² = W_eff · id exactly (ħ-tags included)."""
    n = gamma.n
    delta = delta_deformed(gamma)
    square = mult_B(delta, delta)
    w_eff = gamma.w_eff()
    expected: dict[BKey, Fraction] = {}
    for c in all_masks(n):
        for (m, h), coeff in w_eff.terms.items():
            expected[(m, c, c, h)] = coeff
    if square != BEndo(n, expected):
        raise MatrixFactorizationError(f"delta~^2 is not W_eff * id for gamma = {gamma}")
    logger.info(f"[Contraction] matrix factorization holds with W_eff = {w_eff}")
    return w_eff.forget_hbar()
