"""Boolean expression ASTs: parsing, evaluation, and canonical formatting.

Expressions are built from named variables, the constants ``0``/``1`` and
the operators ``!`` (NOT), ``&`` (AND), ``^`` (XOR) and ``|`` (OR), binding
in that order from tightest to loosest. They define gate output columns and
serve as verification oracles for sequential circuits.
"""

import re
from dataclasses import dataclass
from typing import Iterator, Mapping

from .errors import EvalError, ParseError

__all__ = [
    "BoolExpr", "Var", "Const", "Not", "And", "Or", "Xor",
    "OpCounts", "parse_expr", "eval_expr", "expr_vars", "format_expr", "op_counts",
]

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class BoolExpr:
    """Base class for expression nodes. Instances are immutable."""

    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Var(BoolExpr):
    name: str

    def __post_init__(self):
        if not _IDENT_RE.fullmatch(self.name):
            raise ValueError(f"invalid variable name {self.name!r}")


@dataclass(frozen=True, slots=True)
class Const(BoolExpr):
    value: int

    def __post_init__(self):
        if self.value not in (0, 1):
            raise ValueError(f"constant must be 0 or 1, got {self.value!r}")


@dataclass(frozen=True, slots=True)
class Not(BoolExpr):
    child: BoolExpr


@dataclass(frozen=True, slots=True)
class And(BoolExpr):
    left: BoolExpr
    right: BoolExpr


@dataclass(frozen=True, slots=True)
class Or(BoolExpr):
    left: BoolExpr
    right: BoolExpr


@dataclass(frozen=True, slots=True)
class Xor(BoolExpr):
    left: BoolExpr
    right: BoolExpr


@dataclass(frozen=True, slots=True)
class OpCounts:
    xor_count: int = 0
    and_count: int = 0
    or_count: int = 0
    not_count: int = 0


# ---------------------------------------------------------------------------
# Tokenizer

@dataclass(frozen=True, slots=True)
class _Token:
    kind: str       # IDENT, CONST, OP, LPAREN, RPAREN, EOF
    text: str
    line: int
    col: int


def _tokenize(text: str, line: int = 1, col: int = 1) -> list[_Token]:
    """Split ``text`` into tokens, tracking 1-based positions.

    ``line``/``col`` give the position of the first character, so callers can
    lex a fragment embedded in a larger file and still report file-accurate
    locations.
    """
    tokens: list[_Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":  # comment to end of line
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch in "01":
            tokens.append(_Token("CONST", ch, line, col))
            i += 1
            col += 1
            continue
        m = _IDENT_RE.match(text, i)
        if m:
            tokens.append(_Token("IDENT", m.group(), line, col))
            col += m.end() - i
            i = m.end()
            continue
        if ch in "!&^|":
            tokens.append(_Token("OP", ch, line, col))
        elif ch == "(":
            tokens.append(_Token("LPAREN", ch, line, col))
        elif ch == ")":
            tokens.append(_Token("RPAREN", ch, line, col))
        else:
            raise ParseError(f"unknown character {ch!r}", line, col)
        i += 1
        col += 1
    tokens.append(_Token("EOF", "", line, col))
    return tokens


class _Parser:
    """Recursive-descent parser for the grammar

        expr := or ; or := xor ("|" xor)* ; xor := and ("^" and)* ;
        and := unary ("&" unary)* ; unary := "!" unary | atom ;
        atom := IDENT | "0" | "1" | "(" expr ")"

    Binary chains associate to the left.
    """

    _ATOM_EXPECTED = ("identifier", "'0'", "'1'", "'!'", "'('")

    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message: str, expected: tuple[str, ...] = ()) -> ParseError:
        tok = self.peek()
        return ParseError(message, tok.line, tok.col, expected)

    def parse(self) -> BoolExpr:
        node = self.or_()
        tok = self.peek()
        if tok.kind != "EOF":
            raise self.fail(f"unexpected {tok.text!r} after expression", ("operator", "end of input"))
        return node

    def or_(self) -> BoolExpr:
        node = self.xor()
        while self.peek().text == "|":
            self.next()
            node = Or(node, self.xor())
        return node

    def xor(self) -> BoolExpr:
        node = self.and_()
        while self.peek().text == "^":
            self.next()
            node = Xor(node, self.and_())
        return node

    def and_(self) -> BoolExpr:
        node = self.unary()
        while self.peek().text == "&":
            self.next()
            node = And(node, self.unary())
        return node

    def unary(self) -> BoolExpr:
        if self.peek().text == "!":
            self.next()
            return Not(self.unary())
        return self.atom()

    def atom(self) -> BoolExpr:
        tok = self.peek()
        if tok.kind == "IDENT":
            self.next()
            return Var(tok.text)
        if tok.kind == "CONST":
            self.next()
            return Const(int(tok.text))
        if tok.kind == "LPAREN":
            self.next()
            node = self.or_()
            if self.peek().kind != "RPAREN":
                raise self.fail("unclosed parenthesis", ("')'",))
            self.next()
            return node
        if tok.kind == "EOF":
            raise self.fail("unexpected end of input", self._ATOM_EXPECTED)
        raise self.fail(f"unexpected {tok.text!r}", self._ATOM_EXPECTED)


def parse_expr(text: str, line: int = 1, col: int = 1) -> BoolExpr:
    """Parse an expression string into an AST.

    Raises :class:`ParseError` with a 1-based position on malformed input.
    ``line``/``col`` offset reported positions for embedded fragments.
    """
    return _Parser(_tokenize(text, line, col)).parse()


# ---------------------------------------------------------------------------
# Core operations

def eval_expr(expr: BoolExpr, assignment: Mapping[str, int]) -> int:
    """Evaluate ``expr`` under a total variable assignment; returns 0 or 1."""
    if isinstance(expr, Var):
        try:
            return 1 if assignment[expr.name] else 0
        except KeyError:
            raise EvalError(f"unbound variable '{expr.name}'") from None
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Not):
        return eval_expr(expr.child, assignment) ^ 1
    if isinstance(expr, And):
        return eval_expr(expr.left, assignment) & eval_expr(expr.right, assignment)
    if isinstance(expr, Or):
        return eval_expr(expr.left, assignment) | eval_expr(expr.right, assignment)
    if isinstance(expr, Xor):
        return eval_expr(expr.left, assignment) ^ eval_expr(expr.right, assignment)
    raise TypeError(f"not a BoolExpr node: {expr!r}")


def _walk(expr: BoolExpr) -> Iterator[BoolExpr]:
    stack = [expr]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, Not):
            stack.append(node.child)
        elif isinstance(node, (And, Or, Xor)):
            stack.append(node.right)
            stack.append(node.left)


def expr_vars(expr: BoolExpr) -> list[str]:
    """Variable names in first-appearance order, duplicates collapsed."""
    seen: dict[str, None] = {}

    def visit(node: BoolExpr) -> None:
        if isinstance(node, Var):
            seen.setdefault(node.name)
        elif isinstance(node, Not):
            visit(node.child)
        elif isinstance(node, (And, Or, Xor)):
            visit(node.left)
            visit(node.right)

    visit(expr)
    return list(seen)


def op_counts(expr: BoolExpr) -> OpCounts:
    """Count operator nodes by kind."""
    xor = and_ = or_ = not_ = 0
    for node in _walk(expr):
        if isinstance(node, Xor):
            xor += 1
        elif isinstance(node, And):
            and_ += 1
        elif isinstance(node, Or):
            or_ += 1
        elif isinstance(node, Not):
            not_ += 1
    return OpCounts(xor_count=xor, and_count=and_, or_count=or_, not_count=not_)


# Precedence levels for the formatter; higher binds tighter.
_PREC = {Or: 1, Xor: 2, And: 3, Not: 4, Var: 5, Const: 5}
_SYMBOL = {Or: "|", Xor: "^", And: "&"}


def format_expr(expr: BoolExpr) -> str:
    """Render ``expr`` with minimal parentheses.

    ``parse_expr(format_expr(e))`` is structurally equal to ``e``.
    """
    return _format(expr, 0)


def _format(expr: BoolExpr, min_prec: int) -> str:
    prec = _PREC[type(expr)]
    if isinstance(expr, Var):
        out = expr.name
    elif isinstance(expr, Const):
        out = str(expr.value)
    elif isinstance(expr, Not):
        out = "!" + _format(expr.child, prec)
    else:
        # left-associative: the right child needs strictly higher precedence
        out = f"{_format(expr.left, prec)} {_SYMBOL[type(expr)]} {_format(expr.right, prec + 1)}"
    if prec < min_prec:
        return f"({out})"
    return out
