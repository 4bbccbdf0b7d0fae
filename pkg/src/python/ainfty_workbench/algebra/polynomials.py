"""
Sparse exact polynomials in v_1..v_n, plus the ħ-tagged variant used for one-form components.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping, Sequence
from fractions import Fraction
from typing import Optional, Union

import sympy

from algebra.scalars import MultiIndex, add_index, format_monomial, format_rat, monomial_key, unit_index

Number = Union[int, Fraction]


class Poly:
    """Finite-support polynomial: a map MultiIndex -> Fraction with no zero coefficients."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Optional[Mapping[MultiIndex, Number]] = None) -> None:
        self.n = n
        self.terms: dict[MultiIndex, Fraction] = {}
        for m, c in (terms or {}).items():
            if c:
                self.terms[tuple(m)] = Fraction(c)

    # construction ---------------------------------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> Poly:
        return cls(n)

    @classmethod
    def constant(cls, n: int, c: Number) -> Poly:
        return cls(n, {(0,) * n: c})

    @classmethod
    def variable(cls, n: int, k: int) -> Poly:
        return cls(n, {unit_index(n, k): 1})

    @classmethod
    def monomial(cls, exponents: Sequence[int], c: Number = 1) -> Poly:
        return cls(len(exponents), {tuple(exponents): c})

    @classmethod
    def from_sympy(cls, expr: Union[str, sympy.Expr], n: int) -> Poly:
        """Parse an expression in v1..vn (``"-v1*v2*v3 + v1**5"``) exactly."""
        symbols = sympy.symbols(f"v1:{n + 1}")
        p = sympy.Poly(sympy.sympify(expr), *symbols)
        terms = {}
        for exps, coeff in p.terms():
            terms[tuple(int(a) for a in exps)] = Fraction(int(coeff.p), int(coeff.q))
        return cls(n, terms)

    def to_sympy(self) -> sympy.Expr:
        symbols = sympy.symbols(f"v1:{self.n + 1}")
        expr = sympy.Integer(0)
        for m, c in self.terms.items():
            term = sympy.Rational(c.numerator, c.denominator)
            for s, a in zip(symbols, m):
                term *= s**a
            expr += term
        return expr

    # arithmetic -----------------------------------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.constant(self.n, other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.terms == other.terms

    __hash__ = None  # type: ignore[assignment]

    def __add__(self, other: Union[Poly, Number]) -> Poly:
        if isinstance(other, (int, Fraction)):
            other = Poly.constant(self.n, other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Poly(self.n, out)

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly(self.n, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: Union[Poly, Number]) -> Poly:
        if isinstance(other, (int, Fraction)):
            other = Poly.constant(self.n, other)
        return self + (-other)

    def __rsub__(self, other: Number) -> Poly:
        return Poly.constant(self.n, other) - self

    def __mul__(self, other: Union[Poly, Number]) -> Poly:
        if isinstance(other, (int, Fraction)):
            return Poly(self.n, {m: c * other for m, c in self.terms.items()})
        return self.mul_truncated(other, None)

    __rmul__ = __mul__

    def mul_truncated(self, other: Poly, order: Optional[int]) -> Poly:
        """Product with every term of total degree >= ``order`` discarded."""
        out: dict[MultiIndex, Fraction] = {}
        for m1, c1 in self.terms.items():
            d1 = sum(m1)
            for m2, c2 in other.terms.items():
                if order is not None and d1 + sum(m2) >= order:
                    continue
                m = add_index(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(self.n, out)

    def __pow__(self, exponent: int) -> Poly:
        result = Poly.constant(self.n, 1)
        for _ in range(exponent):
            result = result * self
        return result

    # structure ------------------------------------------------------------------------------

    def derivative(self, k: int) -> Poly:
        """∂/∂v_k."""
        out = {}
        for m, c in self.terms.items():
            a = m[k - 1]
            if a:
                out[m[: k - 1] + (a - 1,) + m[k:]] = c * a
        return Poly(self.n, out)

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def order(self) -> Optional[int]:
        """Lowest total degree present, ``None`` for the zero polynomial."""
        return min((sum(m) for m in self.terms), default=None)

    def homogeneous_part(self, degree: int) -> Poly:
        return Poly(self.n, {m: c for m, c in self.terms.items() if sum(m) == degree})

    def truncate(self, order: int) -> Poly:
        """Drop every term of total degree >= ``order`` (i.e. reduce modulo F_order)."""
        return Poly(self.n, {m: c for m, c in self.terms.items() if sum(m) < order})

    def coefficient(self, m: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(m), Fraction(0))

    def items(self) -> list[tuple[MultiIndex, Fraction]]:
        return sorted(self.terms.items(), key=lambda item: monomial_key(item[0]))

    def is_odd(self) -> bool:
        return all(sum(m) % 2 == 1 for m in self.terms)

    def substitute(self, images: Sequence[Poly], order: Optional[int] = None) -> Poly:
        """Replace v_k by ``images[k-1]``; with ``order`` every product is reduced mod F_order."""
        powers: list[list[Poly]] = [[Poly.constant(self.n, 1)] for _ in images]
        result = Poly.zero(images[0].n if images else self.n)
        for m, c in self.terms.items():
            term = Poly.constant(result.n, c)
            for k, a in enumerate(m):
                cache = powers[k]
                while len(cache) <= a:
                    cache.append(cache[-1].mul_truncated(images[k], order))
                if a:
                    term = term.mul_truncated(cache[a], order)
            result = result + term
        return result if order is None else result.truncate(order)

    def __repr__(self) -> str:
        return f"Poly({self})"

    def __str__(self) -> str:
        return format_terms(((m, c) for m, c in self.items()), format_monomial)


def format_terms(items: Iterable[tuple], render: object) -> str:
    """Render ``[(key, coeff), ...]`` as ``c1*key1 + c2*key2 - ...`` with unit coefficients elided."""
    chunks: list[str] = []
    for key, c in items:
        body = render(key)  # type: ignore[operator]
        magnitude = abs(c)
        if body == "1":
            text = format_rat(magnitude)
        elif magnitude == 1:
            text = body
        else:
            text = f"{format_rat(magnitude)}*{body}"
        sign = "-" if c < 0 else "+"
        if not chunks:
            chunks.append(f"-{text}" if sign == "-" else text)
        else:
            chunks.append(f" {sign} {text}")
    return "".join(chunks) if chunks else "0"


# ---------------------------------------------------------------------------------------------
# ħ-tagged polynomials


HKey = tuple[MultiIndex, int]


class HPoly:
    """Polynomial whose terms carry an explicit non-negative ħ-power tag."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Optional[Mapping[HKey, Number]] = None) -> None:
        self.n = n
        self.terms: dict[HKey, Fraction] = {}
        for (m, h), c in (terms or {}).items():
            if c:
                key = (tuple(m), int(h))
                self.terms[key] = self.terms.get(key, Fraction(0)) + Fraction(c)
        self.terms = {k: c for k, c in self.terms.items() if c}

    @classmethod
    def from_sympy(cls, expr: Union[str, sympy.Expr], n: int) -> HPoly:
        """Parse an expression in v1..vn and ``hbar``; the hbar exponent becomes the tag."""
        symbols = sympy.symbols(f"v1:{n + 1}")
        hbar = sympy.Symbol("hbar")
        p = sympy.Poly(sympy.sympify(expr, locals={"hbar": hbar}), *symbols, hbar)
        terms = {}
        for exps, coeff in p.terms():
            terms[(tuple(int(a) for a in exps[:n]), int(exps[n]))] = Fraction(int(coeff.p), int(coeff.q))
        return cls(n, terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HPoly):
            return NotImplemented
        return self.terms == other.terms

    __hash__ = None  # type: ignore[assignment]

    def __neg__(self) -> HPoly:
        return HPoly(self.n, {k: -c for k, c in self.terms.items()})

    def __mul__(self, scalar: Number) -> HPoly:
        return HPoly(self.n, {k: c * scalar for k, c in self.terms.items()})

    __rmul__ = __mul__

    def forget_hbar(self) -> Poly:
        out: dict[MultiIndex, Fraction] = {}
        for (m, _h), c in self.terms.items():
            out[m] = out.get(m, 0) + c
        return Poly(self.n, out)

    def min_degree(self) -> Optional[int]:
        return min((sum(m) for m, _h in self.terms), default=None)

    def items(self) -> list[tuple[HKey, Fraction]]:
        return sorted(self.terms.items(), key=lambda item: (item[0][1], monomial_key(item[0][0])))

    def __str__(self) -> str:
        def render(key: HKey) -> str:
            m, h = key
            body = format_monomial(m)
            if not h:
                return body
            tag = "hbar" if h == 1 else f"hbar^{h}"
            return tag if body == "1" else f"{tag}*{body}"

        return format_terms(self.items(), render)


def iter_variables(n: int) -> Iterator[Poly]:
    for k in range(1, n + 1):
        yield Poly.variable(n, k)
