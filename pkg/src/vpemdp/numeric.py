"""Exact rational arithmetic helpers and a dense Gaussian elimination solver.

Rationals are plain :class:`fractions.Fraction` values; they are always kept
in lowest terms with a positive denominator.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Sequence

from .errors import ParseError, SingularMatrix, ZeroDenominator

Rational = Fraction

_TOKEN = re.compile(r"^([+-]?\d+)(?:/(\d+))?$")


def rational_parse(text: str) -> Fraction:
    """Parse ``p`` or ``p/q`` into an exact Fraction.

    >>> rational_parse("4/6")
    Fraction(2, 3)
    """
    m = _TOKEN.match(text.strip())
    if m is None:
        raise ParseError(f"malformed rational {text!r}")
    num = int(m.group(1))
    if m.group(2) is None:
        return Fraction(num)
    den = int(m.group(2))
    if den == 0:
        raise ZeroDenominator(f"zero denominator in {text!r}")
    return Fraction(num, den)


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def decimal_approx(x: Fraction, digits: int = 15) -> str:
    """15-significant-digit decimal rendering, display only."""
    x = Fraction(x)
    with localcontext() as ctx:
        ctx.prec = digits
        d = Decimal(x.numerator) / Decimal(x.denominator)
    return str(d)


def render(x: Fraction) -> str:
    return f"{format_rational(x)} (~{decimal_approx(x)})"


@dataclass(frozen=True)
class LinearSystem:
    coefficients: tuple[tuple[Fraction, ...], ...]
    rhs: tuple[Fraction, ...]

    def __post_init__(self):
        n = len(self.rhs)
        if len(self.coefficients) != n or any(len(row) != n for row in self.coefficients):
            raise ValueError("coefficient matrix must be square and match rhs length")

    @property
    def dimension(self) -> int:
        return len(self.rhs)

    @classmethod
    def of(cls, a: Sequence[Sequence], b: Sequence) -> "LinearSystem":
        return cls(
            tuple(tuple(Fraction(v) for v in row) for row in a),
            tuple(Fraction(v) for v in b),
        )


def solve_linear_system(sys: LinearSystem) -> list[Fraction]:
    """Solve ``A x = b`` exactly.

    Plain Gauss-Jordan elimination; a pivot is any nonzero entry since no
    rounding ever happens. The result is checked against the original system
    before it is returned.
    """
    n = sys.dimension
    # augmented working copy; rows are mutated in place
    rows = [list(sys.coefficients[i]) + [sys.rhs[i]] for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if pivot is None:
            raise SingularMatrix(f"no pivot in column {col}")
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
        prow = rows[col]
        inv = 1 / prow[col]
        if inv != 1:
            for k in range(col, n + 1):
                prow[k] *= inv
        for r in range(n):
            if r == col:
                continue
            factor = rows[r][col]
            if factor == 0:
                continue
            row = rows[r]
            for k in range(col, n + 1):
                if prow[k]:
                    row[k] -= factor * prow[k]
    x = [rows[i][n] for i in range(n)]
    for i in range(n):
        lhs = sum((a * xi for a, xi in zip(sys.coefficients[i], x) if a), Fraction(0))
        if lhs != sys.rhs[i]:
            raise AssertionError("back-substitution check failed")
    return x


def solve(a: Sequence[Sequence], b: Sequence) -> list[Fraction]:
    return solve_linear_system(LinearSystem.of(a, b))
