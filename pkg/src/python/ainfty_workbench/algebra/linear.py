"""
Exact linear algebra over ℚ on sparse row systems, backed by sympy's DomainMatrix.

Rows are ``{column_key: coefficient}`` dicts; the caller fixes the column order, which is also
the pivot preference order. Free variables are set to zero, so solutions are reproducible.
"""

from __future__ import annotations

import logging
from collections.abc import Hashable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

logger = logging.getLogger(__name__)


def _to_qq(value: Fraction) -> object:
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


def _from_sympy(value: object) -> Fraction:
    return Fraction(int(value.p), int(value.q))  # type: ignore[attr-defined]


def _dense(
    rows: Sequence[Mapping[Hashable, Fraction]], columns: Sequence[Hashable], rhs: Optional[Sequence[Fraction]]
) -> DomainMatrix:
    position = {key: j for j, key in enumerate(columns)}
    width = len(columns) + (1 if rhs is not None else 0)
    zero = QQ(0)
    data = []
    for i, row in enumerate(rows):
        dense = [zero] * width
        for key, c in row.items():
            if c:
                dense[position[key]] = _to_qq(c)
        if rhs is not None:
            dense[-1] = _to_qq(rhs[i])
        data.append(dense)
    return DomainMatrix(data, (len(rows), width), QQ)


@dataclass
class LinearSolution:
    values: dict[Hashable, Fraction]
    rank: int
    pivots: tuple[int, ...]


def solve_exact(
    rows: Sequence[Mapping[Hashable, Fraction]],
    rhs: Sequence[Fraction],
    columns: Sequence[Hashable],
) -> Optional[LinearSolution]:
    """Solve ``rows · x = rhs`` exactly; ``None`` when the system is inconsistent."""
    if not columns:
        return LinearSolution({}, 0, ()) if not any(rhs) else None
    if not rows:
        return LinearSolution({key: Fraction(0) for key in columns}, 0, ())
    matrix = _dense(rows, columns, rhs)
    reduced, pivots = matrix.rref()
    width = len(columns)
    if width in pivots:
        logger.debug(f"[Linear] inconsistent system with {len(rows)} rows and {width} unknowns")
        return None
    dense = reduced.to_Matrix()
    values = {key: Fraction(0) for key in columns}
    for i, j in enumerate(pivots):
        values[columns[j]] = _from_sympy(dense[i, width])
    return LinearSolution(values, len(pivots), tuple(pivots))


def rank(rows: Sequence[Mapping[Hashable, Fraction]], columns: Sequence[Hashable]) -> int:
    if not rows or not columns:
        return 0
    return _dense(rows, columns, None).rank()
