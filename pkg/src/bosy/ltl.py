"""LTL syntax trees, a parser for the textual syntax, NNF and lasso evaluation."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

UNARY = ("not", "X", "F", "G")
BINARY = ("and", "or", "implies", "U", "R", "W")
CONSTANTS = ("true", "false")


@dataclass(frozen=True)
class Ltl:
    kind: str
    children: tuple["Ltl", ...] = ()
    name: str | None = None

    def __post_init__(self):
        if self.kind == "atom":
            if not self.name:
                raise ValueError("atom requires a non-empty name")
            arity = 0
        elif self.kind in CONSTANTS:
            arity = 0
        elif self.kind in UNARY:
            arity = 1
        elif self.kind in BINARY:
            arity = 2
        else:
            raise ValueError(f"unknown LTL node kind {self.kind!r}")
        if len(self.children) != arity:
            raise ValueError(f"{self.kind} expects {arity} children, got {len(self.children)}")

    def __str__(self) -> str:
        return pretty(self)

    def atoms(self) -> frozenset[str]:
        if self.kind == "atom":
            return frozenset([self.name])
        result: frozenset[str] = frozenset()
        for child in self.children:
            result |= child.atoms()
        return result

    def size(self) -> int:
        return 1 + sum(child.size() for child in self.children)


TRUE = Ltl("true")
FALSE = Ltl("false")


def atom(name: str) -> Ltl:
    return Ltl("atom", name=name)


def Not(f: Ltl) -> Ltl:
    return Ltl("not", (f,))


def And(a: Ltl, b: Ltl) -> Ltl:
    return Ltl("and", (a, b))


def Or(a: Ltl, b: Ltl) -> Ltl:
    return Ltl("or", (a, b))


def Implies(a: Ltl, b: Ltl) -> Ltl:
    return Ltl("implies", (a, b))


def Next(f: Ltl) -> Ltl:
    return Ltl("X", (f,))


def Finally(f: Ltl) -> Ltl:
    return Ltl("F", (f,))


def Globally(f: Ltl) -> Ltl:
    return Ltl("G", (f,))


def Until(a: Ltl, b: Ltl) -> Ltl:
    return Ltl("U", (a, b))


def Release(a: Ltl, b: Ltl) -> Ltl:
    return Ltl("R", (a, b))


def WeakUntil(a: Ltl, b: Ltl) -> Ltl:
    return Ltl("W", (a, b))


def conjunction(formulas: Sequence[Ltl]) -> Ltl:
    """Right-nested conjunction; the empty conjunction is ``true``."""
    if not formulas:
        return TRUE
    result = formulas[-1]
    for f in reversed(formulas[:-1]):
        result = And(f, result)
    return result


# -- parsing -----------------------------------------------------------------

class LtlSyntaxError(ValueError):
    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position} in {text!r}")
        self.position = position


_TOKEN = re.compile(r"\s*(?:(->|&&|\|\||[!&|()])|([A-Za-z_][A-Za-z0-9_]*))")
_KEYWORDS = {"G", "F", "X", "U", "R", "W", "true", "false"}
_BINARY_LEVELS = [
    # (tokens, node kind per token, right-associative)
    ({"->": "implies"}, True),
    ({"||": "or", "|": "or"}, False),
    ({"&&": "and", "&": "and"}, False),
    ({"U": "U", "R": "R", "W": "W"}, True),
]


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    text_len = len(text)
    while pos < text_len:
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise LtlSyntaxError(f"unexpected character {text[start]!r}", text, start)
        tok = m.group(1) or m.group(2)
        tokens.append((tok, m.start(m.lastindex)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> str | None:
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def position(self) -> int:
        return self.tokens[self.i][1] if self.i < len(self.tokens) else len(self.text)

    def advance(self) -> str:
        tok = self.tokens[self.i][0]
        self.i += 1
        return tok

    def error(self, message: str):
        raise LtlSyntaxError(message, self.text, self.position())

    def parse(self) -> Ltl:
        if not self.tokens:
            self.error("empty formula")
        f = self.binary(0)
        if self.peek() is not None:
            self.error(f"unexpected token {self.peek()!r}")
        return f

    def binary(self, level: int) -> Ltl:
        if level == len(_BINARY_LEVELS):
            return self.unary()
        ops, right_assoc = _BINARY_LEVELS[level]
        left = self.binary(level + 1)
        if right_assoc:
            if self.peek() in ops:
                kind = ops[self.advance()]
                return Ltl(kind, (left, self.binary(level)))
            return left
        while self.peek() in ops:
            kind = ops[self.advance()]
            left = Ltl(kind, (left, self.binary(level + 1)))
        return left

    def unary(self) -> Ltl:
        tok = self.peek()
        if tok == "!":
            self.advance()
            return Not(self.unary())
        if tok in ("G", "F", "X"):
            self.advance()
            return Ltl(tok, (self.unary(),))
        return self.primary()

    def primary(self) -> Ltl:
        tok = self.peek()
        if tok is None:
            self.error("unexpected end of formula")
        if tok == "(":
            self.advance()
            f = self.binary(0)
            if self.peek() != ")":
                self.error("expected ')'")
            self.advance()
            return f
        if tok == "true":
            self.advance()
            return TRUE
        if tok == "false":
            self.advance()
            return FALSE
        if tok in _KEYWORDS or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", tok):
            self.error(f"unexpected token {tok!r}")
        self.advance()
        return atom(tok)


def parse_ltl(text: str) -> Ltl:
    """Parse an LTL formula.

    Precedence from tightest to loosest: unary operators (``! G F X``),
    ``U R W`` (right-associative), ``&&``, ``||``, ``->`` (right-associative).
    """
    return _Parser(text).parse()


_INFIX = {"and": "&&", "or": "||", "implies": "->", "U": "U", "R": "R", "W": "W"}


def pretty(f: Ltl) -> str:
    """Print ``f`` so that :func:`parse_ltl` reads back the same tree."""
    if f.kind == "atom":
        return f.name
    if f.kind in CONSTANTS:
        return f.kind
    if f.kind == "not":
        return "!" + _operand(f.children[0])
    if f.kind in ("X", "F", "G"):
        return f.kind + " " + _operand(f.children[0])
    left, right = f.children
    return f"({pretty(left)} {_INFIX[f.kind]} {pretty(right)})"


def _operand(f: Ltl) -> str:
    text = pretty(f)
    if f.kind in ("not", "X", "F", "G"):
        return f"({text})"
    return text


# -- negation normal form ------------------------------------------------------

def nnf(f: Ltl, negate: bool = False) -> Ltl:
    """Negation normal form of ``f`` (of ``!f`` when ``negate`` is set).

    The result only contains atoms, negated atoms, constants and the
    operators ``and or X U R F G``.
    """
    k = f.kind
    if k == "atom":
        return Not(f) if negate else f
    if k == "true":
        return FALSE if negate else TRUE
    if k == "false":
        return TRUE if negate else FALSE
    if k == "not":
        return nnf(f.children[0], not negate)
    if k == "X":
        return Next(nnf(f.children[0], negate))
    if k == "F":
        sub = nnf(f.children[0], negate)
        return Globally(sub) if negate else Finally(sub)
    if k == "G":
        sub = nnf(f.children[0], negate)
        return Finally(sub) if negate else Globally(sub)
    a, b = f.children
    if k == "and":
        return (Or if negate else And)(nnf(a, negate), nnf(b, negate))
    if k == "or":
        return (And if negate else Or)(nnf(a, negate), nnf(b, negate))
    if k == "implies":
        if negate:
            return And(nnf(a), nnf(b, True))
        return Or(nnf(a, True), nnf(b))
    if k == "U":
        return (Release if negate else Until)(nnf(a, negate), nnf(b, negate))
    if k == "R":
        return (Until if negate else Release)(nnf(a, negate), nnf(b, negate))
    if k == "W":
        # a W b == b R (a | b)
        if negate:
            return Until(nnf(b, True), And(nnf(a, True), nnf(b, True)))
        return Release(nnf(b), Or(nnf(a), nnf(b)))
    raise AssertionError(k)


# -- evaluation on ultimately periodic words ---------------------------------

def holds_on_lasso(f: Ltl, prefix: Sequence[Iterable[str]], period: Sequence[Iterable[str]]) -> bool:
    """Evaluate ``f`` on the word ``prefix . period^omega``.

    Each letter is the collection of atoms that are true at that position.
    """
    if not period:
        raise ValueError("lasso period must be non-empty")
    word = [frozenset(letter) for letter in prefix] + [frozenset(letter) for letter in period]
    n = len(word)
    succ = list(range(1, n)) + [len(prefix)]
    cache: dict[Ltl, list[bool]] = {}

    def ev(g: Ltl) -> list[bool]:
        if g in cache:
            return cache[g]
        k = g.kind
        if k == "atom":
            val = [g.name in letter for letter in word]
        elif k == "true":
            val = [True] * n
        elif k == "false":
            val = [False] * n
        elif k == "not":
            val = [not x for x in ev(g.children[0])]
        elif k == "X":
            sub = ev(g.children[0])
            val = [sub[succ[p]] for p in range(n)]
        elif k in ("F", "G"):
            sub = ev(g.children[0])
            # the loop part is a single cycle, so a fixpoint is reached in 2n rounds
            val = list(sub)
            for _ in range(2 * n):
                if k == "F":
                    val = [sub[p] or val[succ[p]] for p in range(n)]
                else:
                    val = [sub[p] and val[succ[p]] for p in range(n)]
        else:
            a, b = ev(g.children[0]), ev(g.children[1])
            if k == "and":
                val = [x and y for x, y in zip(a, b)]
            elif k == "or":
                val = [x or y for x, y in zip(a, b)]
            elif k == "implies":
                val = [(not x) or y for x, y in zip(a, b)]
            elif k in ("U", "W"):
                val = [False] * n if k == "U" else [True] * n
                for _ in range(2 * n + 1):
                    val = [b[p] or (a[p] and val[succ[p]]) for p in range(n)]
            elif k == "R":
                val = [True] * n
                for _ in range(2 * n + 1):
                    val = [b[p] and (a[p] or val[succ[p]]) for p in range(n)]
            else:
                raise AssertionError(k)
        cache[g] = val
        return val

    return ev(f)[0]
