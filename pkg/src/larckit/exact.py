"""Exact eigenvalue tags: rationals plus rational multiples of declared
irrational symbols.

Allowed symbols are ``sqrt(m)`` for squarefree integers ``m > 1`` and
``pi``.  Together with 1 these are linearly independent over Q, so two tagged
numbers are equal iff their coefficient vectors are, and rational
(in)dependence of a tagged list reduces to exact linear algebra over Q.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import mpmath

_SQRT = re.compile(r"^sqrt\((\d+)\)$")


def _squarefree_split(m: int) -> tuple[int, int]:
    """Return ``(s, r)`` with ``m = s^2 r`` and ``r`` squarefree."""
    s, r, p = 1, m, 2
    while p * p <= r:
        while r % (p * p) == 0:
            r //= p * p
            s *= p
        p += 1
    return s, r


def canonical_symbol(sym: str) -> tuple[Fraction, str | None]:
    """Normalise a symbol to ``coef * canonical`` (``None`` means the unit 1)."""
    sym = sym.replace(" ", "")
    if sym in ("pi", "π"):
        return Fraction(1), "pi"
    m = _SQRT.match(sym)
    if not m:
        raise ValueError(f"unsupported irrational symbol {sym!r}; use sqrt(<int>) or pi")
    s, r = _squarefree_split(int(m.group(1)))
    if r == 1:
        return Fraction(s), None
    if r == 0:
        return Fraction(0), None
    return Fraction(s), f"sqrt({r})"


@dataclass(frozen=True)
class ExactValue:
    """``rational + sum_s coeffs[s] * s`` with canonical symbols ``s``."""

    rational: Fraction = Fraction(0)
    coeffs: tuple[tuple[str, Fraction], ...] = field(default=())

    @classmethod
    def make(cls, rational=0, coeffs: Mapping[str, object] | None = None) -> "ExactValue":
        rat = Fraction(rational)
        acc: dict[str, Fraction] = {}
        for sym, c in (coeffs or {}).items():
            scale, canon = canonical_symbol(sym)
            c = Fraction(c) * scale
            if canon is None:
                rat += c
            else:
                acc[canon] = acc.get(canon, Fraction(0)) + c
        items = tuple(sorted((k, v) for k, v in acc.items() if v != 0))
        return cls(rat, items)

    @classmethod
    def parse(cls, text: str) -> "ExactValue":
        """Parse sums like ``"1/2 + 3*sqrt(2) - pi/4"``."""
        s = text.replace(" ", "").replace("−", "-")
        if not s:
            raise ValueError("empty exact value")
        if s[0] not in "+-":
            s = "+" + s
        terms = re.findall(r"([+-])([^+-]+)", s)
        if "".join(sign + body for sign, body in terms) != s:
            raise ValueError(f"cannot parse exact value {text!r}")
        rat = Fraction(0)
        coeffs: dict[str, Fraction] = {}
        for sign, body in terms:
            sgn = -1 if sign == "-" else 1
            coef = Fraction(1)
            sym = None
            factors = body.split("*")
            for f in factors:
                if "/" in f and (f.startswith("sqrt(") or f.startswith("pi")):
                    head, _, den = f.partition("/")
                    sym = head
                    coef /= Fraction(den)
                elif f.startswith("sqrt(") or f in ("pi", "π"):
                    sym = f
                else:
                    coef *= Fraction(f)
            if sym is None:
                rat += sgn * coef
            else:
                coeffs[sym] = coeffs.get(sym, Fraction(0)) + sgn * coef
        return cls.make(rat, coeffs)

    @property
    def symbols(self) -> tuple[str, ...]:
        return tuple(k for k, _ in self.coeffs)

    def coeff(self, sym: str | None) -> Fraction:
        if sym is None:
            return self.rational
        return dict(self.coeffs).get(sym, Fraction(0))

    def mp(self, dps: int = 50) -> mpmath.mpf:
        with mpmath.workdps(dps):
            total = mpmath.mpf(self.rational.numerator) / self.rational.denominator
            for sym, c in self.coeffs:
                base = mpmath.pi if sym == "pi" else mpmath.sqrt(int(sym[5:-1]))
                total += mpmath.mpf(c.numerator) / c.denominator * base
            return +total

    def __float__(self) -> float:
        return float(self.mp(30))

    def __add__(self, other: "ExactValue") -> "ExactValue":
        coeffs = dict(self.coeffs)
        for k, v in other.coeffs:
            coeffs[k] = coeffs.get(k, Fraction(0)) + v
        return ExactValue.make(self.rational + other.rational, coeffs)

    def scale(self, q) -> "ExactValue":
        q = Fraction(q)
        return ExactValue.make(self.rational * q, {k: v * q for k, v in self.coeffs})

    def to_json(self) -> dict:
        return {"rational": str(self.rational),
                "irrational": {k: str(v) for k, v in self.coeffs}}

    @classmethod
    def from_json(cls, obj) -> "ExactValue":
        if isinstance(obj, str):
            return cls.parse(obj)
        if isinstance(obj, (int, Fraction)):
            return cls.make(obj)
        return cls.make(obj.get("rational", 0), obj.get("irrational", {}))

    def __str__(self) -> str:
        parts = []
        if self.rational != 0 or not self.coeffs:
            parts.append(str(self.rational))
        for k, v in self.coeffs:
            parts.append(k if v == 1 else f"{v}*{k}")
        return " + ".join(parts)


def sqrt_value(m: int) -> ExactValue:
    return ExactValue.make(0, {f"sqrt({m})": 1})


def rational_nullspace(rows: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    """Basis of ``{c : M c = 0}`` over Q, from the reduced row echelon form.

    The basis vector for free column ``f`` has a 1 in position ``f``.
    """
    m = [list(map(Fraction, r)) for r in rows]
    ncols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for row, pc in enumerate(pivots):
            vec[pc] = -m[row][f]
        basis.append(vec)
    return basis


def integer_vector(vec: Iterable[Fraction]) -> tuple[int, ...]:
    """Scale a rational vector to coprime integers, first nonzero entry positive."""
    vec = [Fraction(v) for v in vec]
    den = 1
    for v in vec:
        den = den * v.denominator // math.gcd(den, v.denominator)
    ints = [int(v * den) for v in vec]
    g = 0
    for v in ints:
        g = math.gcd(g, abs(v))
    g = g or 1
    ints = [v // g for v in ints]
    first = next((v for v in ints if v != 0), 0)
    if first < 0:
        ints = [-v for v in ints]
    return tuple(ints)
