"""Plain-text polynomial files.

::

    homopoly <n> <d>
    # comment
    <e1> ... <en> <coefficient>

Lines are order-insensitive; a multi-index may appear only once.
Coefficients are written with ``repr(float)`` so that reading back a written
file reproduces every coefficient bit for bit.
"""

from __future__ import annotations

import os
from typing import Iterable

from .algebra import HomogeneousPoly, monomials
from .errors import ParseError


def parse_poly(text: str) -> HomogeneousPoly:
    header = None
    coeffs: dict[tuple[int, ...], float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if header is None:
            if len(fields) != 3 or fields[0] != "homopoly":
                raise ParseError(f"line {lineno}: expected 'homopoly <n> <d>'")
            try:
                n, d = int(fields[1]), int(fields[2])
            except ValueError as exc:
                raise ParseError(f"line {lineno}: bad header integers") from exc
            if n < 2 or d < 1:
                raise ParseError(f"line {lineno}: need n >= 2 and d >= 1")
            header = (n, d)
            continue
        n, d = header
        if len(fields) != n + 1:
            raise ParseError(f"line {lineno}: expected {n} exponents and a coefficient")
        try:
            alpha = tuple(int(f) for f in fields[:n])
            c = float(fields[n])
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
        if min(alpha) < 0 or sum(alpha) != d:
            raise ParseError(f"line {lineno}: exponents {alpha} do not sum to {d}")
        if alpha in coeffs:
            raise ParseError(f"line {lineno}: duplicate multi-index {alpha}")
        coeffs[alpha] = c
    if header is None:
        raise ParseError("empty polynomial file")
    return HomogeneousPoly.from_dict(header[0], header[1], coeffs)


def format_poly(P: HomogeneousPoly, comments: Iterable[str] = ()) -> str:
    lines = [f"homopoly {P.n} {P.d}"]
    lines += [f"# {c}" for c in comments]
    for alpha, c in zip(monomials(P.n, P.d), P.coef):
        if c != 0.0:
            lines.append(" ".join(str(a) for a in alpha) + " " + repr(float(c)))
    return "\n".join(lines) + "\n"


def read_poly(path: str | os.PathLike) -> HomogeneousPoly:
    with open(path, encoding="utf-8") as fh:
        return parse_poly(fh.read())


def write_poly(P: HomogeneousPoly, path: str | os.PathLike, comments: Iterable[str] = ()) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_poly(P, comments))
