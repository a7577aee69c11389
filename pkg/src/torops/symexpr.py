"""Small expression language for defining symbols in config files.

Grammar (whitespace-insensitive, ``^`` is right-associative power):

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | atom ('^' factor)?
    atom   := NUMBER | IDENT | IDENT '(' expr (',' expr)* ')' | '(' expr ')'

Identifiers are the coordinates ``x1 .. xn`` and frequencies ``xi1 ..
xin`` plus the function names ``exp``, ``sin``, ``cos``, ``abs`` and
``angle``; ``angle(e1, ..., em)`` is sqrt(1 + e1^2 + ... + em^2).
Expressions are compiled to vectorized closures, never passed to eval().
Sums of products that split into an x-only and a xi-only part are
detected and declared as separable terms so the accelerated application
path can use them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .symbols import CallableSymbol

__all__ = ["SymbolParseError", "parse_symbol"]


class SymbolParseError(ValueError):
    """Syntax or name error, carrying the 1-based source position."""

    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    column: int


_TOKEN_RE = re.compile(
    r"""
    (?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>\*\*|[+\-*/^(),])
  | (?P<ws>\s+)
  | (?P<bad>.)
    """,
    re.VERBOSE,
)

_FUNCTIONS = {
    "exp": np.exp,
    "sin": np.sin,
    "cos": np.cos,
    "abs": np.abs,
}


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line, col = 1, 1
    for m in _TOKEN_RE.finditer(text):
        kind = m.lastgroup
        raw = m.group()
        if kind == "bad":
            raise SymbolParseError(f"unexpected character {raw!r}", line, col)
        if kind != "ws":
            text_out = "^" if raw == "**" else raw
            tokens.append(_Token(kind, text_out, line, col))
        newlines = raw.count("\n")
        if newlines:
            line += newlines
            col = len(raw) - raw.rfind("\n")
        else:
            col += len(raw)
    tokens.append(_Token("end", "", line, col))
    return tokens


# AST nodes are tuples:
#   ("num", value) ("var", "x"|"xi", axis) ("call", name, args)
#   ("bin", op, left, right) ("neg", operand)


class _Parser:
    def __init__(self, tokens: list[_Token], n: int) -> None:
        self.tokens = tokens
        self.pos = 0
        self.n = n

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text: str) -> _Token:
        tok = self.take()
        if tok.text != text:
            shown = tok.text or "end of input"
            raise SymbolParseError(f"expected {text!r}, found {shown!r}", tok.line, tok.column)
        return tok

    def parse(self):
        node = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise SymbolParseError(f"unexpected trailing {tok.text!r}", tok.line, tok.column)
        return node

    def expr(self):
        node = self.term()
        while self.peek().text in ("+", "-"):
            op = self.take().text
            node = ("bin", op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek().text in ("*", "/"):
            op = self.take().text
            node = ("bin", op, node, self.factor())
        return node

    def factor(self):
        if self.peek().text == "-":
            self.take()
            return ("neg", self.factor())
        node = self.atom()
        if self.peek().text == "^":
            self.take()
            node = ("bin", "^", node, self.factor())
        return node

    def atom(self):
        tok = self.take()
        if tok.kind == "num":
            return ("num", float(tok.text))
        if tok.text == "(":
            node = self.expr()
            self.expect(")")
            return node
        if tok.kind == "ident":
            if self.peek().text == "(":
                if tok.text not in _FUNCTIONS and tok.text != "angle":
                    raise SymbolParseError(f"unknown function {tok.text!r}", tok.line, tok.column)
                self.take()
                args = [self.expr()]
                while self.peek().text == ",":
                    self.take()
                    args.append(self.expr())
                self.expect(")")
                if tok.text != "angle" and len(args) != 1:
                    raise SymbolParseError(
                        f"{tok.text} takes one argument", tok.line, tok.column
                    )
                return ("call", tok.text, tuple(args))
            return self._variable(tok)
        shown = tok.text or "end of input"
        raise SymbolParseError(f"unexpected {shown!r}", tok.line, tok.column)

    def _variable(self, tok: _Token):
        m = re.fullmatch(r"(xi|x)(\d+)", tok.text)
        if not m:
            raise SymbolParseError(f"unknown name {tok.text!r}", tok.line, tok.column)
        axis = int(m.group(2))
        if not 1 <= axis <= self.n:
            raise SymbolParseError(
                f"{tok.text!r} is out of range for dimension {self.n}", tok.line, tok.column
            )
        return ("var", m.group(1), axis - 1)


def _uses(node, kind: str) -> bool:
    tag = node[0]
    if tag == "var":
        return node[1] == kind
    if tag == "num":
        return False
    if tag == "neg":
        return _uses(node[1], kind)
    if tag == "call":
        return any(_uses(a, kind) for a in node[2])
    return _uses(node[2], kind) or _uses(node[3], kind)


def _compile(node):
    tag = node[0]
    if tag == "num":
        v = node[1]
        return lambda x, xi: v
    if tag == "var":
        kind, axis = node[1], node[2]
        if kind == "x":
            return lambda x, xi: x[axis]
        return lambda x, xi: xi[axis]
    if tag == "neg":
        inner = _compile(node[1])
        return lambda x, xi: -inner(x, xi)
    if tag == "call":
        name, args = node[1], node[2]
        compiled = [_compile(a) for a in args]
        if name == "angle":
            return lambda x, xi: np.sqrt(1.0 + sum(c(x, xi) ** 2 for c in compiled))
        fn = _FUNCTIONS[name]
        arg = compiled[0]
        return lambda x, xi: fn(arg(x, xi))
    op, left, right = node[1], node[2], node[3]
    lf, rf = _compile(left), _compile(right)
    if op == "+":
        return lambda x, xi: lf(x, xi) + rf(x, xi)
    if op == "-":
        return lambda x, xi: lf(x, xi) - rf(x, xi)
    if op == "*":
        return lambda x, xi: lf(x, xi) * rf(x, xi)
    if op == "/":
        return lambda x, xi: lf(x, xi) / rf(x, xi)
    return lambda x, xi: lf(x, xi) ** rf(x, xi)


def _sum_terms(node, sign=1):
    """Flatten top-level +/- into (sign, node) pairs."""
    if node[0] == "bin" and node[1] in ("+", "-"):
        right_sign = sign if node[1] == "+" else -sign
        return _sum_terms(node[2], sign) + _sum_terms(node[3], right_sign)
    if node[0] == "neg":
        return _sum_terms(node[1], -sign)
    return [(sign, node)]


def _product_factors(node):
    """Flatten a term over *// into (node, inverted) pairs, or None if mixed."""
    if node[0] == "bin" and node[1] in ("*", "/"):
        left = _product_factors(node[2])
        right = _product_factors(node[3])
        if left is None or right is None:
            return None
        if node[1] == "/":
            right = [(f, not inv) for f, inv in right]
        return left + right
    return [(node, False)]


def _separable_terms(node):
    """Return ((c_r, m_r), ...) when the AST splits, else None."""
    terms = []
    for sign, term in _sum_terms(node):
        factors = _product_factors(term)
        if factors is None:
            return None
        x_parts, xi_parts = [], []
        for f, inv in factors:
            fx, fxi = _uses(f, "x"), _uses(f, "xi")
            if fx and fxi:
                return None
            (x_parts if fx else xi_parts).append((f, inv))
        x_fns = [(_compile(f), inv) for f, inv in x_parts]
        xi_fns = [(_compile(f), inv) for f, inv in xi_parts]

        def c_fn(x, _sign=sign, _fns=x_fns):
            out = float(_sign)
            for fn, inv in _fns:
                v = fn(x, None)
                out = out / v if inv else out * v
            return out

        def m_fn(xi, _fns=xi_fns):
            out = 1.0
            for fn, inv in _fns:
                v = fn(None, xi)
                out = out / v if inv else out * v
            return out

        terms.append((c_fn, m_fn))
    return tuple(terms)


def parse_symbol(text: str, n: int) -> CallableSymbol:
    """Compile an expression into a symbol over n axes.

    The result is a frequency multiplier when no ``x`` names occur.
    """
    if not 1 <= n <= 3:
        raise ValueError("dimension n must be 1, 2 or 3")
    node = _Parser(_tokenize(text), n).parse()
    xi_only = not _uses(node, "x")
    body = _compile(node)
    separable = _separable_terms(node)

    def fn(x, xi):
        val = np.asarray(body(x, xi), dtype=complex)
        want = xi.shape[1:]
        if not xi_only and x is not None:
            want = np.broadcast_shapes(np.shape(x)[1:], want)
        if val.shape != want:
            val = np.broadcast_to(val, want)
        return val

    return CallableSymbol(n, fn, xi_only=xi_only, separable_terms=separable)
