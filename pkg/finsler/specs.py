"""Parsers for the norm, matrix, field and point mini-languages.

Matrices:  ``[[4,0],[0,1]]`` (JSON rows) or ``4,0;0,1``.
Norms:     ``quad:<matrix>``, ``q:<exponent>``, ``euclidean``.
Fields:    ``poly:<terms>``, ``harmonic-pullback:<terms>``, ``liouville``,
           ``constant:<c>``, ``exp:<c1,c2,...>``, ``log-norm``, ``bump``.
Points:    ``1,1;2,0``.

Polynomial terms are sums of monomials ``c*y1^a*y2^b``; ``x`` is accepted in
place of ``y``. Every parse failure raises :class:`SpecParseError` with the
character position in the full specification string.
"""

from __future__ import annotations

import json
import re
from typing import Optional

import numpy as np

from .errors import FinslerError, SpecParseError, UnsupportedNorm
from .fields import (
    BumpFunction,
    Polynomial,
    ScalarField,
    make_constant,
    make_exponential,
    make_harmonic_pullback,
    make_liouville_profile,
    make_log_norm,
    make_polynomial,
)
from .norms import Norm, QNorm, QuadraticNorm, euclidean, quadratic
from .spd import sqrt_spd

_UNSIGNED = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_NUMBER = re.compile(r"[+-]?" + _UNSIGNED.pattern)
_VARIABLE = re.compile(r"[xy](\d+)(?:\^(\d+))?")


def _number(token: str, source: str, position: int) -> float:
    token = token.strip()
    match = _NUMBER.fullmatch(token)
    if not match:
        raise SpecParseError(f"expected a number, got {token!r}", source, position)
    return float(token)


def _split(text: str, sep: str, offset: int) -> list[tuple[str, int]]:
    """Split ``text`` on ``sep``, keeping each piece's absolute offset."""
    pieces, start = [], 0
    for i, ch in enumerate(text):
        if ch == sep:
            pieces.append((text[start:i], offset + start))
            start = i + 1
    pieces.append((text[start:], offset + start))
    return pieces


# -- matrices ---------------------------------------------------------------

def parse_matrix(text: str, *, source: Optional[str] = None, offset: int = 0) -> np.ndarray:
    source = text if source is None else source
    if not text.strip():
        raise SpecParseError("empty matrix", source, offset)
    if text.lstrip().startswith("["):
        try:
            rows = json.loads(text)
        except json.JSONDecodeError as e:
            raise SpecParseError(e.msg, source, offset + e.pos) from e
        if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
            raise SpecParseError("matrix must be a JSON array of rows", source, offset)
        for row in rows:
            for v in row:
                if isinstance(v, bool) or not isinstance(v, (int, float)):
                    raise SpecParseError(f"non-numeric entry {v!r}", source, offset)
        widths = {len(r) for r in rows}
        if len(widths) != 1:
            raise SpecParseError("rows have different lengths", source, offset)
        return np.array(rows, dtype=float)

    out = []
    for row_text, row_pos in _split(text, ";", offset):
        out.append([_number(tok, source, pos) for tok, pos in _split(row_text, ",", row_pos)])
        if len(out[-1]) != len(out[0]):
            raise SpecParseError("rows have different lengths", source, row_pos)
    return np.array(out, dtype=float)


# -- norms ------------------------------------------------------------------

def parse_norm(text: str, n: Optional[int] = None) -> Norm:
    text = text.strip()
    kind, sep, rest = text.partition(":")
    if kind == "quad" and sep:
        h = quadratic(parse_matrix(rest, source=text, offset=len(kind) + 1))
        if n is not None and h.n != n:
            raise SpecParseError(f"matrix is {h.n}x{h.n} but n={n}", text, len(kind) + 1)
        return h
    if kind == "q" and sep:
        q = _number(rest, text, 2)
        try:
            return QNorm(q, n if n is not None else 2)
        except FinslerError as e:
            raise SpecParseError(str(e), text, 2) from e
    if kind == "euclidean" and not rest:
        return euclidean(n if n is not None else 2)
    raise SpecParseError(f"unknown norm kind {kind!r}; expected quad:, q: or euclidean", text, 0)


# -- polynomials ------------------------------------------------------------

class _PolynomialParser:
    """Recursive descent over ``term (('+'|'-') term)*``."""

    def __init__(self, text: str, n: int, source: str, offset: int):
        self.text = text
        self.n = n
        self.source = source
        self.offset = offset
        self.pos = 0

    def error(self, message: str) -> SpecParseError:
        return SpecParseError(message, self.source, self.offset + self.pos)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def sign(self) -> float:
        ch = self.peek()
        if ch and ch in "+-":
            self.pos += 1
            return -1.0 if ch == "-" else 1.0
        return 1.0

    def parse(self) -> dict[tuple[int, ...], float]:
        table: dict[tuple[int, ...], float] = {}
        sign = self.sign()
        while True:
            coeff, alpha = self.term()
            table[alpha] = table.get(alpha, 0.0) + sign * coeff
            ch = self.peek()
            if not ch:
                return table
            if ch not in "+-":
                raise self.error(f"unexpected character {ch!r}")
            sign = self.sign()

    def term(self) -> tuple[float, tuple[int, ...]]:
        alpha = [0] * self.n
        coeff = self.factor(alpha)
        while self.peek() == "*":
            self.pos += 1
            coeff *= self.factor(alpha)
        return coeff, tuple(alpha)

    def factor(self, alpha: list[int]) -> float:
        """Consume one factor; variables bump ``alpha``, numbers are returned."""
        self.skip_ws()
        var = _VARIABLE.match(self.text, self.pos)
        if var:
            index = int(var.group(1))
            if not 1 <= index <= self.n:
                raise self.error(f"variable index {index} outside 1..{self.n}")
            alpha[index - 1] += int(var.group(2) or 1)
            self.pos = var.end()
            return 1.0
        num = _UNSIGNED.match(self.text, self.pos)
        if num:
            self.pos = num.end()
            return float(num.group(0))
        raise self.error("expected a coefficient or a variable y<i>")


def parse_polynomial(text: str, n: int, *, source: Optional[str] = None, offset: int = 0) -> Polynomial:
    source = text if source is None else source
    if not text.strip():
        raise SpecParseError("empty polynomial", source, offset)
    table = _PolynomialParser(text, n, source, offset).parse()
    return Polynomial.from_table(table, n)


# -- fields -----------------------------------------------------------------

def _require_quadratic(norm: Optional[Norm], text: str) -> QuadraticNorm:
    if not isinstance(norm, QuadraticNorm):
        raise UnsupportedNorm(f"field {text!r} needs a quadratic norm")
    return norm


def parse_field(
    text: str,
    n: int,
    norm: Optional[Norm] = None,
    *,
    alpha: float = 0.0,
    scale: float = 1.0,
) -> ScalarField:
    text = text.strip()
    kind, sep, rest = text.partition(":")
    start = len(kind) + 1
    if kind == "poly" and sep:
        return make_polynomial(parse_polynomial(rest, n, source=text, offset=start), n)
    if kind == "harmonic-pullback" and sep:
        poly = parse_polynomial(rest, n, source=text, offset=start)
        return make_harmonic_pullback(poly, sqrt_spd(_require_quadratic(norm, text).matrix))
    if kind == "constant" and sep:
        return make_constant(_number(rest, text, start), n)
    if kind == "exp" and sep:
        coords = [_number(tok, text, pos) for tok, pos in _split(rest, ",", start)]
        if len(coords) > n:
            raise SpecParseError(f"{len(coords)} exponents for n={n}", text, start)
        return make_exponential(coords + [0.0] * (n - len(coords)))
    if text == "liouville":
        if norm is None:
            raise UnsupportedNorm("the Liouville profile needs a norm")
        return make_liouville_profile(norm.dual(), alpha=alpha, scale=scale)
    if text == "log-norm":
        return make_log_norm(n)
    if text == "bump":
        return BumpFunction(np.zeros(n), 1.0).field
    raise SpecParseError(f"unknown field kind {kind!r}", text, 0)


# -- points -----------------------------------------------------------------

def parse_points(text: str, n: int) -> np.ndarray:
    text = text.strip()
    rows = []
    for row_text, pos in _split(text, ";", 0):
        coords = [_number(tok, text, p) for tok, p in _split(row_text, ",", pos)]
        if len(coords) != n:
            raise SpecParseError(f"point has {len(coords)} coordinates, expected {n}", text, pos)
        rows.append(coords)
    return np.array(rows, dtype=float)


def parse_floats(text: str) -> list[float]:
    text = text.strip()
    return [_number(tok, text, pos) for tok, pos in _split(text, ",", 0)]


__all__ = [
    "parse_matrix",
    "parse_norm",
    "parse_polynomial",
    "parse_field",
    "parse_points",
    "parse_floats",
]
