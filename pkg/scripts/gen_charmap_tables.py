"""Regenerate ``src/thnus/_charmap_tables.py`` from the LaTeX listings.

Reads ``tests/data/charmap_expressions.tex``, parses each listed expression
with sympy and writes every (p, v, w) coefficient as an integer numerator
and denominator polynomial in the tuning factor.

    python3 scripts/gen_charmap_tables.py
"""

from __future__ import annotations

import re
import sys
from pathlib import Path

import sympy as sp
from sympy.parsing.sympy_parser import (convert_xor, implicit_multiplication_application,
                                        parse_expr, standard_transformations)

ROOT = Path(__file__).resolve().parents[1]
SRC = ROOT / "tests" / "data" / "charmap_expressions.tex"
DST = ROOT / "src" / "thnus" / "_charmap_tables.py"

L, p, v, w = sp.symbols("L p v w")
HEAD = re.compile(r"([PST])_\{?(\w)\}?\^\{\s*(\d)\s*,\s*(\d)\s*\}\s*&\s*=")


def _group(s, i):
    """Return (content, end) of the brace group opening at ``s[i]``."""
    depth = 0
    for j in range(i, len(s)):
        depth += {"{": 1, "}": -1}.get(s[j], 0)
        if depth == 0:
            return s[i + 1:j], j + 1
    raise ValueError("unbalanced braces")


def _frac(s):
    out, i = [], 0
    while True:
        k = s.find(r"\frac", i)
        if k < 0:
            return "".join(out) + s[i:]
        num, j = _group(s, k + 5)
        den, j = _group(s, j)
        out.append(s[i:k] + f"(({_frac(num)})/({_frac(den)}))")
        i = j


def to_sympy(tex):
    s = tex.replace(r"\left", "").replace(r"\right", "").replace(r"\lambda", " L ")
    s = " ".join(s.replace("&", " ").replace(r"\\", " ").split())
    s = _frac(s).replace("{", "(").replace("}", ")")
    tr = standard_transformations + (implicit_multiplication_application, convert_xor)
    return parse_expr(s, local_dict={"L": L, "p": p, "v": v, "w": w}, transformations=tr)


def entries(text):
    text = "\n".join(line for line in text.splitlines() if not line.lstrip().startswith("%"))
    body = re.sub(r"\\(begin|end)\{[^}]*\}", " ", text)
    heads = list(HEAD.finditer(body))
    for a, b in zip(heads, heads[1:] + [None]):
        chunk = body[a.end(): b.start() if b else len(body)]
        yield (a.group(1), int(a.group(3)), int(a.group(4))), to_sympy(chunk)


def _coeffs(poly_expr):
    return [int(c) for c in sp.Poly(poly_expr, L).all_coeffs()]


def main():
    rows = []
    for (kind, j, k), expr in entries(SRC.read_text(encoding="utf-8")):
        expr = sp.expand(expr)
        triple = []
        for sym in (p, v, w):
            c = sp.cancel(sp.together(expr.coeff(sym)))
            num, den = sp.fraction(c)
            triple.append((_coeffs(num), _coeffs(den)))
        rows.append((kind, j, k, triple))
    lines = ['"""Generated by scripts/gen_charmap_tables.py; do not edit."""', "",
             "# (kind, j, k) -> ((num, den) for p, (num, den) for v, (num, den) for w);",
             "# integer polynomial coefficients in the tuning factor, highest degree first.",
             "TABLES = {"]
    for kind, j, k, triple in rows:
        lines.append(f"    ({kind!r}, {j}, {k}): (")
        for num, den in triple:
            lines.append(f"        ({num!r},\n         {den!r}),")
        lines.append("    ),")
    lines.append("}")
    DST.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {len(rows)} expressions to {DST.relative_to(ROOT)}", file=sys.stderr)


if __name__ == "__main__":
    main()
