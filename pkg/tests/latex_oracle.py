"""Exact evaluation of the tabulated LaTeX expressions with ``fractions.Fraction``.

A small recursive-descent parser, kept independent of the sympy-based table
generator.  Values are linear forms ``{'1': c, 'p': c, 'v': c, 'w': c}``.
"""

import re
from fractions import Fraction
from pathlib import Path

SOURCE = Path(__file__).with_name("data") / "charmap_expressions.tex"
HEAD = re.compile(r"([PST])_\{?[i2]\}?\^\{\s*(\d)\s*,\s*(\d)\s*\}")
TOKEN = re.compile(r"\s*(\\frac|\\lambda|\d+|[pvw]|[-+^(){}])")
KEYS = ("1", "p", "v", "w")


def _form(**kw):
    return {k: Fraction(kw.get(k, 0)) for k in KEYS}


def _is_scalar(a):
    return all(a[k] == 0 for k in KEYS[1:])


def _add(a, b, sign=1):
    return {k: a[k] + sign * b[k] for k in KEYS}


def _mul(a, b):
    if not _is_scalar(a):
        a, b = b, a
    if not _is_scalar(a):
        raise ValueError("product of two vectors")
    return {k: a["1"] * b[k] for k in KEYS}


def _div(a, b):
    if not _is_scalar(b) or b["1"] == 0:
        raise ValueError("bad denominator")
    return {k: a[k] / b["1"] for k in KEYS}


class _Parser:
    def __init__(self, text, lam):
        text = text.replace(r"\left", "").replace(r"\right", "")
        self.toks = []
        pos = 0
        text = text.strip()
        while pos < len(text):
            m = TOKEN.match(text, pos)
            if not m:
                raise ValueError(f"cannot tokenize at {text[pos:pos + 20]!r}")
            self.toks.append(m.group(1))
            pos = m.end()
            while pos < len(text) and text[pos].isspace():
                pos += 1
        self.i = 0
        self.lam = Fraction(lam)

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, expected=None):
        t = self.peek()
        if expected is not None and t != expected:
            raise ValueError(f"expected {expected!r}, got {t!r}")
        self.i += 1
        return t

    def expr(self):
        sign = 1
        if self.peek() in ("+", "-"):
            sign = -1 if self.take() == "-" else 1
        out = _mul(_form(**{"1": sign}), self.term())
        while self.peek() in ("+", "-"):
            sign = -1 if self.take() == "-" else 1
            out = _add(out, self.term(), sign)
        return out

    def term(self):
        out = self.factor()
        while self.peek() not in (None, "+", "-", ")", "}"):
            out = _mul(out, self.factor())
        return out

    def factor(self):
        base = self.atom()
        if self.peek() == "^":
            self.take()
            if self.peek() == "{":
                self.take()
                e = int(self.take())
                self.take("}")
            else:
                e = int(self.take())
            if not _is_scalar(base):
                raise ValueError("power of a vector")
            base = _form(**{"1": base["1"] ** e})
        return base

    def atom(self):
        t = self.take()
        if t == "\\frac":
            self.take("{")
            num = self.expr()
            self.take("}")
            self.take("{")
            den = self.expr()
            self.take("}")
            return _div(num, den)
        if t == "\\lambda":
            return _form(**{"1": self.lam})
        if t in ("p", "v", "w"):
            return _form(**{t: 1})
        if t in ("(", "{"):
            out = self.expr()
            self.take(")" if t == "(" else "}")
            return out
        if t.isdigit():
            return _form(**{"1": int(t)})
        raise ValueError(f"unexpected token {t!r}")


def expressions(path=SOURCE):
    """Map ``(kind, j, k)`` to the raw right-hand side text."""
    lines = []
    for raw in path.read_text(encoding="utf-8").splitlines():
        s = raw.strip()
        if not s or s.startswith("\\begin") or s.startswith("\\end") or s.startswith("%"):
            continue
        lines.append(s)
    body = " ".join(lines).replace("\\\\", " ").replace("&", " ")
    heads = list(HEAD.finditer(body))
    out = {}
    for a, b in zip(heads, heads[1:] + [None]):
        rhs = body[a.end(): b.start() if b else len(body)].strip()
        if not rhs.startswith("="):
            raise ValueError(f"missing '=' after {a.group(0)}")
        out[(a.group(1), int(a.group(2)), int(a.group(3)))] = rhs[1:]
    return out


def evaluate(text, lam):
    """Exact ``(c_p, c_v, c_w)`` of one expression at rational ``lam``."""
    p = _Parser(text, lam)
    val = p.expr()
    if p.peek() is not None:
        raise ValueError(f"trailing tokens from {p.peek()!r}")
    if val["1"] != 0:
        raise ValueError("expression has a constant part")
    return val["p"], val["v"], val["w"]
