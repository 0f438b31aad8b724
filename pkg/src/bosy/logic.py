"""Propositional terms with natural-number comparisons, CNF conversion and
DIMACS/QDIMACS serialization.

Variables are identified by arbitrary hashable keys.  A :class:`Registry`
turns keys into the consecutive positive integers solvers expect and keeps
the reverse mapping for decoding models.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence


class Term:
    __slots__ = ("op", "args", "_hash")

    def __init__(self, op: str, args: tuple):
        self.op = op
        self.args = args
        self._hash = hash((op, args))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Term) or self._hash != other._hash:
            return False
        return self.op == other.op and self.args == other.args

    def __repr__(self):
        return f"Term({self})"

    def __str__(self):
        return to_string(self)

    def __invert__(self):
        return neg(self)

    def __and__(self, other):
        return conj(self, other)

    def __or__(self, other):
        return disj(self, other)

    @property
    def is_const(self) -> bool:
        return self.op == "const"

    @property
    def is_literal(self) -> bool:
        return self.op == "var" or (self.op == "not" and self.args[0].op == "var")


TRUE = Term("const", (True,))
FALSE = Term("const", (False,))


def const(value: bool) -> Term:
    return TRUE if value else FALSE


def var(key: Hashable) -> Term:
    return Term("var", (key,))


def neg(t: Term) -> Term:
    if t.op == "const":
        return FALSE if t.args[0] else TRUE
    if t.op == "not":
        return t.args[0]
    return Term("not", (t,))


def _nary(op: str, terms: Iterable[Term]) -> Term:
    unit, zero = (TRUE, FALSE) if op == "and" else (FALSE, TRUE)
    seen: dict[Term, None] = {}
    for t in terms:
        if t.op == op:
            items = t.args
        else:
            items = (t,)
        for item in items:
            if item == zero:
                return zero
            if item == unit:
                continue
            seen[item] = None
    args = tuple(seen)
    for a in args:
        if a.op == "not" and a.args[0] in seen:
            return zero
    if not args:
        return unit
    if len(args) == 1:
        return args[0]
    return Term(op, args)


def conj(*terms: Term) -> Term:
    return _nary("and", terms)


def disj(*terms: Term) -> Term:
    return _nary("or", terms)


def conj_all(terms: Iterable[Term]) -> Term:
    return _nary("and", terms)


def disj_all(terms: Iterable[Term]) -> Term:
    return _nary("or", terms)


def implies(a: Term, b: Term) -> Term:
    if a == TRUE:
        return b
    if a == FALSE or b == TRUE:
        return TRUE
    if b == FALSE:
        return neg(a)
    return Term("implies", (a, b))


def iff(a: Term, b: Term) -> Term:
    return conj(disj(neg(a), b), disj(a, neg(b)))


def to_string(t: Term) -> str:
    op = t.op
    if op == "const":
        return "TRUE" if t.args[0] else "FALSE"
    if op == "var":
        key = t.args[0]
        return key if isinstance(key, str) else repr(key)
    if op == "not":
        inner = t.args[0]
        s = to_string(inner)
        return "!" + (s if inner.op in ("var", "const", "not") else f"({s})")
    if op in ("and", "or"):
        sep = " & " if op == "and" else " | "
        parts = []
        for a in t.args:
            s = to_string(a)
            parts.append(f"({s})" if a.op in ("and", "or", "implies") else s)
        return sep.join(parts)
    if op == "implies":
        return f"({to_string(t.args[0])}) -> ({to_string(t.args[1])})"
    if op == "cmp":
        left, rel, right = t.args
        return f"{left} {rel} {right}"
    raise AssertionError(op)


def variables(t: Term) -> set:
    """Keys of all variables occurring in ``t`` (including comparison bits)."""
    out: set = set()
    stack = [t]
    seen = set()
    while stack:
        cur = stack.pop()
        if cur in seen:
            continue
        seen.add(cur)
        if cur.op == "var":
            out.add(cur.args[0])
        elif cur.op == "cmp":
            stack.extend(cur.args[0].bits)
            stack.extend(cur.args[2].bits)
        elif cur.op != "const":
            stack.extend(cur.args)
    return out


def evaluate(t: Term, assignment: Mapping) -> bool:
    """Truth value of ``t``; every variable must be assigned."""
    op = t.op
    if op == "var":
        return bool(assignment[t.args[0]])
    if op == "const":
        return t.args[0]
    if op == "not":
        return not evaluate(t.args[0], assignment)
    if op == "and":
        return all(evaluate(a, assignment) for a in t.args)
    if op == "or":
        return any(evaluate(a, assignment) for a in t.args)
    if op == "implies":
        return (not evaluate(t.args[0], assignment)) or evaluate(t.args[1], assignment)
    if op == "cmp":
        left, rel, right = t.args
        lv, rv = left.value(assignment), right.value(assignment)
        return {">=": lv >= rv, ">": lv > rv, "==": lv == rv}[rel]
    raise AssertionError(op)


def substitute(t: Term, mapping: Mapping[Hashable, Term]) -> Term:
    """Replace variables by terms (typically constants) and simplify."""
    cache: dict[Term, Term] = {}

    def go(cur: Term) -> Term:
        hit = cache.get(cur)
        if hit is not None:
            return hit
        op = cur.op
        if op == "var":
            res = mapping.get(cur.args[0], cur)
        elif op == "const":
            res = cur
        elif op == "not":
            res = neg(go(cur.args[0]))
        elif op == "and":
            res = conj_all(go(a) for a in cur.args)
        elif op == "or":
            res = disj_all(go(a) for a in cur.args)
        elif op == "implies":
            res = implies(go(cur.args[0]), go(cur.args[1]))
        elif op == "cmp":
            left, rel, right = cur.args
            res = compare(left.map_bits(go), rel, right.map_bits(go))
        else:
            raise AssertionError(op)
        cache[cur] = res
        return res

    return go(t)


# -- bounded naturals ----------------------------------------------------------

def width_for(capacity: int) -> int:
    """Bits needed to store values ``0..capacity``."""
    if capacity < 0:
        raise ValueError("capacity must be non-negative")
    return capacity.bit_length()


@dataclass(frozen=True)
class BoundedNat:
    """A natural number in ``0..capacity`` stored in little-endian bits."""

    bits: tuple[Term, ...]
    capacity: int

    def __post_init__(self):
        if self.capacity > (1 << len(self.bits)) - 1:
            raise ValueError(f"{len(self.bits)} bits cannot hold capacity {self.capacity}")

    @classmethod
    def fresh(cls, key: Hashable, capacity: int) -> "BoundedNat":
        return cls(tuple(var((key, k)) for k in range(width_for(capacity))), capacity)

    @classmethod
    def constant(cls, value: int, width: int | None = None) -> "BoundedNat":
        if value < 0:
            raise ValueError("negative constant")
        w = width_for(value) if width is None else width
        return cls(tuple(const(bool(value >> k & 1)) for k in range(w)), value)

    @property
    def width(self) -> int:
        return len(self.bits)

    @property
    def keys(self) -> list:
        return [b.args[0] for b in self.bits if b.op == "var"]

    def map_bits(self, fn) -> "BoundedNat":
        return BoundedNat(tuple(fn(b) for b in self.bits), self.capacity)

    def value(self, assignment: Mapping) -> int:
        return sum(1 << k for k, b in enumerate(self.bits) if evaluate(b, assignment))

    def within_capacity(self) -> Term:
        """Constraint ``self <= capacity``; TRUE when every bit pattern is in range."""
        if self.capacity == (1 << self.width) - 1:
            return TRUE
        return compare(BoundedNat.constant(self.capacity, self.width), ">=", self)

    def __str__(self):
        return "[" + ",".join(str(b) for b in self.bits) + "]"

    def __ge__(self, other):
        return compare(self, ">=", other)

    def __gt__(self, other):
        return compare(self, ">", other)

    def equals(self, other: "BoundedNat | int") -> Term:
        if isinstance(other, int):
            other = BoundedNat.constant(other)
        return compare(self, "==", other)


def compare(left: BoundedNat, rel: str, right: BoundedNat) -> Term:
    if rel not in (">=", ">", "=="):
        raise ValueError(f"unknown comparison {rel!r}")
    if left == right:
        return FALSE if rel == ">" else TRUE
    if all(b.is_const for b in left.bits + right.bits):
        lv = sum(1 << k for k, b in enumerate(left.bits) if b.args[0])
        rv = sum(1 << k for k, b in enumerate(right.bits) if b.args[0])
        return const({">=": lv >= rv, ">": lv > rv, "==": lv == rv}[rel])
    return Term("cmp", (left, rel, right))


def _ripple(left: BoundedNat, rel: str, right: BoundedNat) -> Term:
    w = max(left.width, right.width)
    xs = list(left.bits) + [FALSE] * (w - left.width)
    ys = list(right.bits) + [FALSE] * (w - right.width)
    if rel == "==":
        return conj_all(iff(x, y) for x, y in zip(xs, ys))
    if w == 0:
        return TRUE if rel == ">=" else FALSE
    # result for the bits seen so far, least significant first
    x, y = xs[0], ys[0]
    acc = disj(x, neg(y)) if rel == ">=" else conj(x, neg(y))
    for x, y in zip(xs[1:], ys[1:]):
        acc = disj(conj(x, neg(y)), conj(disj(x, neg(y)), acc))
    return acc


def lower_comparisons(t: Term) -> Term:
    """Bit-blast every natural-number comparison into propositional logic."""
    cache: dict[Term, Term] = {}

    def go(cur: Term) -> Term:
        hit = cache.get(cur)
        if hit is not None:
            return hit
        op = cur.op
        if op in ("var", "const"):
            res = cur
        elif op == "cmp":
            res = _ripple(*cur.args)
        elif op == "not":
            res = neg(go(cur.args[0]))
        elif op == "and":
            res = conj_all(go(a) for a in cur.args)
        elif op == "or":
            res = disj_all(go(a) for a in cur.args)
        elif op == "implies":
            res = implies(go(cur.args[0]), go(cur.args[1]))
        else:
            raise AssertionError(op)
        cache[cur] = res
        return res

    return go(t)


def to_nnf(t: Term) -> Term:
    """Push negations to the variables and eliminate implications.

    Comparisons must already be lowered.
    """
    cache: dict[tuple[Term, bool], Term] = {}

    def go(cur: Term, negate: bool) -> Term:
        k = (cur, negate)
        hit = cache.get(k)
        if hit is not None:
            return hit
        op = cur.op
        if op == "var":
            res = neg(cur) if negate else cur
        elif op == "const":
            res = const(cur.args[0] != negate)
        elif op == "not":
            res = go(cur.args[0], not negate)
        elif op in ("and", "or"):
            parts = (go(a, negate) for a in cur.args)
            res = conj_all(parts) if (op == "and") != negate else disj_all(parts)
        elif op == "implies":
            a, b = cur.args
            res = conj(go(a, False), go(b, True)) if negate else disj(go(a, True), go(b, False))
        else:
            raise ValueError(f"cannot convert {op!r} to NNF; lower comparisons first")
        cache[k] = res
        return res

    return go(t, False)


# -- registry, CNF and quantified problems -----------------------------------

class Registry:
    """Consecutive solver variable numbers for hashable keys, in creation order."""

    def __init__(self):
        self._ids: dict[Hashable, int] = {}
        self._keys: list[Hashable] = [None]
        self._aux = 0

    def __len__(self):
        return len(self._keys) - 1

    def __contains__(self, key):
        return key in self._ids

    def id(self, key: Hashable) -> int:
        v = self._ids.get(key)
        if v is None:
            v = len(self._keys)
            self._ids[key] = v
            self._keys.append(key)
        return v

    def get(self, key: Hashable) -> int | None:
        return self._ids.get(key)

    def key(self, v: int) -> Hashable:
        return self._keys[v]

    def fresh_aux(self) -> int:
        self._aux += 1
        return self.id(("aux", self._aux))

    @property
    def num_vars(self) -> int:
        return len(self._keys) - 1

    def decode(self, literals: Iterable[int]) -> dict:
        """Map a solver model (signed integers) back to ``{key: bool}``."""
        out = {}
        for lit in literals:
            v = abs(lit)
            if 0 < v < len(self._keys):
                out[self._keys[v]] = lit > 0
        return out


@dataclass
class Cnf:
    num_vars: int = 0
    clauses: list[tuple[int, ...]] = field(default_factory=list)

    def satisfied_by(self, model: Iterable[int]) -> bool:
        true = set(model)
        return all(any(lit in true for lit in c) for c in self.clauses)


class CnfBuilder:
    """Incrementally asserts terms as CNF clauses.

    Uses polarity-aware Tseitin definitions: conjunctions at the top are
    split, top-level disjunctions become clauses directly and every other
    connective gets an auxiliary variable implying its definition.
    Structurally equal subterms share one auxiliary.
    """

    def __init__(self, registry: Registry | None = None):
        self.registry = registry if registry is not None else Registry()
        self.clauses: list[tuple[int, ...]] = []
        self.aux_vars: list[int] = []
        self._defs: dict[Term, int] = {}

    def add(self, t: Term) -> None:
        t = to_nnf(lower_comparisons(t))
        self._assert(t)

    def add_clause(self, lits: Sequence[int]) -> None:
        self.clauses.append(tuple(lits))

    def _lit(self, t: Term) -> int:
        if t.op == "var":
            return self.registry.id(t.args[0])
        if t.op == "not":
            return -self.registry.id(t.args[0].args[0])
        return self._define(t)

    def _assert(self, t: Term) -> None:
        op = t.op
        if op == "const":
            if not t.args[0]:
                self.clauses.append(())
        elif op == "and":
            for a in t.args:
                self._assert(a)
        elif op == "or":
            self.clauses.append(tuple(self._lit(a) for a in t.args))
        else:
            self.clauses.append((self._lit(t),))

    def _define(self, t: Term) -> int:
        v = self._defs.get(t)
        if v is not None:
            return v
        if t.op == "const":
            v = self.registry.fresh_aux()
            self.aux_vars.append(v)
            self.clauses.append((v,) if t.args[0] else (-v,))
            self._defs[t] = v
            return v
        lits = [self._lit(a) for a in t.args]
        v = self.registry.fresh_aux()
        self.aux_vars.append(v)
        if t.op == "and":
            for lit in lits:
                self.clauses.append((-v, lit))
        elif t.op == "or":
            self.clauses.append((-v, *lits))
        else:
            raise AssertionError(t.op)
        self._defs[t] = v
        return v

    def cnf(self) -> Cnf:
        return Cnf(self.registry.num_vars, list(self.clauses))


def tseitin(t: Term, registry: Registry | None = None) -> tuple[Cnf, Registry]:
    """Textbook Tseitin transformation with full equivalence definitions.

    Every connective gets an auxiliary variable; the root's auxiliary is
    asserted as a unit clause.  ``t`` must be free of comparisons.
    """
    reg = registry if registry is not None else Registry()
    clauses: list[tuple[int, ...]] = []
    defs: dict[Term, int] = {}

    def lit(cur: Term) -> int:
        op = cur.op
        if op == "var":
            return reg.id(cur.args[0])
        if op == "not":
            return -lit(cur.args[0])
        if op == "cmp":
            raise ValueError("tseitin expects comparison-free terms")
        hit = defs.get(cur)
        if hit is not None:
            return hit
        if op == "const":
            v = reg.fresh_aux()
            clauses.append((v,) if cur.args[0] else (-v,))
            defs[cur] = v
            return v
        if op == "implies":
            children = [-lit(cur.args[0]), lit(cur.args[1])]
            kind = "or"
        else:
            children = [lit(a) for a in cur.args]
            kind = op
        v = reg.fresh_aux()
        if kind == "and":
            clauses.extend((-v, c) for c in children)
            clauses.append((v, *(-c for c in children)))
        else:
            clauses.append((-v, *children))
            clauses.extend((v, -c) for c in children)
        defs[cur] = v
        return v

    if t != TRUE:
        clauses.append((lit(t),))
    return Cnf(reg.num_vars, clauses), reg


EXISTS = "e"
FORALL = "a"


@dataclass
class QuantifiedProblem:
    """Prenex problem: quantifier blocks over solver variables and a CNF matrix.

    Variables of the matrix that appear in no block are treated as
    outermost existentials, as in QDIMACS.
    """

    prefix: list[tuple[str, list[int]]]
    matrix: Cnf

    def normalized_prefix(self) -> list[tuple[str, list[int]]]:
        """Drop empty blocks and merge adjacent blocks of the same quantifier."""
        out: list[tuple[str, list[int]]] = []
        for q, vs in self.prefix:
            if not vs:
                continue
            if out and out[-1][0] == q:
                out[-1] = (q, out[-1][1] + list(vs))
            else:
                out.append((q, list(vs)))
        return out


class EmitError(ValueError):
    pass


def emit_dimacs(cnf: Cnf) -> str:
    lines = [f"p cnf {cnf.num_vars} {len(cnf.clauses)}"]
    lines.extend(" ".join(map(str, c)) + (" 0" if c else "0") for c in cnf.clauses)
    return "\n".join(lines) + "\n"


def emit_qdimacs(problem: QuantifiedProblem) -> str:
    cnf = problem.matrix
    lines = [f"p cnf {cnf.num_vars} {len(cnf.clauses)}"]
    bound = set()
    for q, vs in problem.normalized_prefix():
        for v in vs:
            if not 0 < v <= cnf.num_vars:
                raise EmitError(f"quantified variable {v} is not in the registry")
            if v in bound:
                raise EmitError(f"variable {v} quantified twice")
            bound.add(v)
        lines.append(q + " " + " ".join(map(str, vs)) + " 0")
    lines.extend(" ".join(map(str, c)) + (" 0" if c else "0") for c in cnf.clauses)
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> Cnf:
    """Read a DIMACS CNF document (``c`` comment lines are skipped)."""
    num_vars = 0
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            num_vars = int(parts[2])
            continue
        if line[0] in "ae":
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            else:
                current.append(lit)
    if current:
        clauses.append(tuple(current))
    return Cnf(num_vars, clauses)


def parse_model_lines(text: str, marker: str = "v") -> list[int]:
    """Collect the literals of all lines starting with ``marker`` (``v`` or ``V``)."""
    lits = []
    for line in text.splitlines():
        parts = line.split()
        if not parts or parts[0] != marker:
            continue
        for tok in parts[1:]:
            lit = int(tok)
            if lit != 0:
                lits.append(lit)
    return lits
