"""Parse and render the one-line function language.

    const <c>              constant
    poly <c0> <c1> ...     polynomial, ascending degree
    taylor <file.csv>      Taylor coefficients from rows ``k,re,im``
    mobius <a> [rot <c>]   rot * (a - z) / (1 - conj(a) z)
    scale <k> (<spec>)     k times the inner function

Complex literals are written ``re``, ``re+imi`` or ``re-imi`` with no
spaces, e.g. ``0.5``, ``0+1i``, ``-2.5e-3-4i``.
"""

from __future__ import annotations

import csv
import math
import re
from pathlib import Path

import numpy as np

from .functions import AnalyticFunction, Constant, Mobius, Polynomial, Taylor, scale

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX = re.compile(rf"^([+-]?{_NUM})(?:([+-])({_NUM})i)?$")
_IMAG = re.compile(rf"^([+-]?{_NUM})i$")


class SpecSyntaxError(ValueError):
    """Malformed function text; ``offset`` is the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "()":
            tokens.append((ch, i))
            i += 1
        else:
            j = i
            while j < len(text) and not text[j].isspace() and text[j] not in "()":
                j += 1
            tokens.append((text[i:j], i))
            i = j
    return tokens


class _Parser:
    def __init__(self, text: str, base_dir: Path | None):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0
        self.base_dir = base_dir

    def offset(self, char_index: int) -> int:
        return len(self.text[:char_index].encode("utf-8"))

    def error(self, message: str, char_index: int | None = None) -> SpecSyntaxError:
        if char_index is None:
            char_index = self.tokens[self.pos][1] if self.pos < len(self.tokens) else len(self.text)
        return SpecSyntaxError(message, self.offset(char_index))

    def peek(self) -> str | None:
        return self.tokens[self.pos][0] if self.pos < len(self.tokens) else None

    def take(self, what: str) -> tuple[str, int]:
        if self.pos >= len(self.tokens):
            raise self.error(f"expected {what}, found end of input")
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def number(self, what: str = "complex literal") -> complex:
        tok, at = self.take(what)
        m = _COMPLEX.match(tok)
        if m:
            re_part = float(m.group(1))
            im_part = 0.0
            if m.group(3) is not None:
                im_part = float(m.group(3)) * (-1 if m.group(2) == "-" else 1)
        else:
            m = _IMAG.match(tok)
            if not m:
                raise self.error(f"bad {what} {tok!r}", at)
            re_part, im_part = 0.0, float(m.group(1))
        if not (math.isfinite(re_part) and math.isfinite(im_part)):
            raise self.error(f"non-finite literal {tok!r}", at)
        return complex(re_part, im_part)

    def function(self) -> AnalyticFunction:
        head, at = self.take("function keyword")
        if head == "const":
            return Constant(self.number())
        if head == "poly":
            coeffs = [self.number()]
            while self.peek() not in (None, ")"):
                coeffs.append(self.number())
            return Polynomial(coeffs)
        if head == "taylor":
            path, pat = self.take("CSV path")
            try:
                return load_taylor_csv(self._resolve(path))
            except (OSError, ValueError) as exc:
                raise self.error(f"cannot read Taylor coefficients: {exc}", pat) from None
        if head == "mobius":
            a_at = self.tokens[self.pos][1] if self.pos < len(self.tokens) else len(self.text)
            a = self.number()
            rot = 1 + 0j
            if self.peek() == "rot":
                self.pos += 1
                r_at = self.tokens[self.pos][1] if self.pos < len(self.tokens) else len(self.text)
                rot = self.number()
                if abs(abs(rot) - 1) > 1e-12:
                    raise self.error("mobius rotation must be unimodular", r_at)
            if not abs(a) < 1:
                raise self.error("mobius parameter must satisfy |a| < 1", a_at)
            return Mobius(a, rot)
        if head == "scale":
            k = self.number("scale factor")
            tok, pat = self.take("'('")
            if tok != "(":
                raise self.error("expected '(' after scale factor", pat)
            inner = self.function()
            tok, pat = self.take("')'")
            if tok != ")":
                raise self.error("expected ')'", pat)
            return scale(inner, k)
        raise self.error(f"unknown function keyword {head!r}", at)

    def _resolve(self, path: str) -> Path:
        p = Path(path)
        if not p.is_absolute() and self.base_dir is not None:
            p = self.base_dir / p
        return p


def parse_spec(text: str, base_dir: str | Path | None = None) -> AnalyticFunction:
    if not text or not text.strip():
        raise SpecSyntaxError("empty function text", 0)
    parser = _Parser(text, Path(base_dir) if base_dir is not None else None)
    f = parser.function()
    if parser.pos != len(parser.tokens):
        raise parser.error(f"unexpected trailing token {parser.peek()!r}")
    return f


def load_taylor_csv(path: str | Path) -> Taylor:
    """Read ``k,re,im`` rows (ascending k, optional header) into a Taylor series.

    The file only samples the series, so the tail is marked unknown.
    """
    rows = []
    with open(path, newline="") as fh:
        for i, row in enumerate(csv.reader(fh)):
            if not row or all(not cell.strip() for cell in row):
                continue
            try:
                k = int(row[0])
                re_part = float(row[1])
                im_part = float(row[2]) if len(row) > 2 and row[2].strip() else 0.0
            except (ValueError, IndexError):
                if i == 0 and not rows:
                    continue
                raise ValueError(f"bad row {i + 1}: {row!r}") from None
            rows.append((k, complex(re_part, im_part)))
    if not rows:
        raise ValueError("no coefficients")
    ks = [k for k, _ in rows]
    if ks[0] < 0 or any(b <= a for a, b in zip(ks, ks[1:])):
        raise ValueError("indices must be nonnegative and strictly ascending")
    coeffs = np.zeros(ks[-1] + 1, dtype=complex)
    for k, c in rows:
        coeffs[k] = c
    return Taylor(coeffs, None)


def format_complex(c: complex) -> str:
    c = complex(c)
    re_part, im_part = c.real + 0.0, c.imag + 0.0
    if im_part == 0:
        return repr(re_part)
    sign = "-" if math.copysign(1.0, im_part) < 0 else "+"
    return f"{re_part!r}{sign}{abs(im_part)!r}i"


def render(f: AnalyticFunction) -> str:
    """Text that parses back to a function equal to ``f`` pointwise.

    Taylor series are rendered as polynomials of their stored coefficients.
    """
    if isinstance(f, Constant):
        return f"const {format_complex(f.value)}"
    if isinstance(f, (Polynomial, Taylor)):
        return "poly " + " ".join(format_complex(c) for c in f.coeffs)
    if isinstance(f, Mobius):
        text = f"mobius {format_complex(f.a)}"
        if f.rotation != 1:
            text += f" rot {format_complex(f.rotation)}"
        return text
    raise TypeError(f"not an analytic function: {f!r}")
