"""Omega-automata: LTL to Büchi translation, universal co-Büchi automata,
HOA import/export and the two automaton optimizations used by the encoders.

The universal co-Büchi automaton (UCW) for a formula is the Büchi automaton
of its negation read universally: a machine is correct iff no path of the
product with the automaton visits a rejecting state infinitely often.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Iterable, Sequence

from . import logic
from .graphs import is_nontrivial, reachable, strongly_connected_components
from .logic import Term
from .ltl import Ltl, Not, nnf, pretty
from .specio import SynthesisProblem, combine

Edge = tuple[int, Term, int]


@dataclass(frozen=True)
class Nba:
    """Nondeterministic Büchi automaton with formula-labelled edges.

    An edge ``(q, label, q2)`` reads the current letter: it is enabled when
    ``label`` holds for the valuation of ``signals`` at that position.
    """

    signals: tuple[str, ...]
    num_states: int
    initial: int
    edges: tuple[Edge, ...]
    accepting: frozenset[int]

    def successors(self, q: int) -> list[int]:
        return [dst for src, _, dst in self.edges if src == q]


@dataclass(frozen=True)
class UniversalCoBuchi:
    signals: tuple[str, ...]
    num_states: int
    initial: int
    edges: tuple[Edge, ...]
    rejecting: frozenset[int]
    safety: frozenset[int] = frozenset()
    scc_id: tuple[int, ...] | None = None
    rank: tuple[int, ...] | None = None

    @property
    def states(self) -> range:
        return range(self.num_states)

    def out_edges(self, q: int) -> list[Edge]:
        return self._out[q]

    @property
    def _out(self) -> list[list[Edge]]:
        cached = self.__dict__.get("_out_cache")
        if cached is None:
            cached = [[] for _ in range(self.num_states)]
            for e in self.edges:
                cached[e[0]].append(e)
            object.__setattr__(self, "_out_cache", cached)
        return cached

    def is_forbidden(self, edge: Edge) -> bool:
        """Entering a demoted safety state is never allowed."""
        return edge[2] in self.safety

    @property
    def analyzed(self) -> bool:
        return self.scc_id is not None

    def component(self, q: int) -> int:
        return self.scc_id[q] if self.scc_id is not None else 0

    def rank_of(self, q: int) -> int:
        """Rejecting states in the component of ``q`` that can recur; ``|Rej|`` if unanalyzed."""
        if self.rank is None:
            return len(self.rejecting)
        return self.rank[q]

    def counter_capacity(self, q: int, bound: int) -> int:
        return bound * self.rank_of(q)

    def needs_counter_check(self, q: int, q2: int) -> bool:
        return self.component(q) == self.component(q2) and self.rank_of(q) > 0

    def edge_letters(self) -> list[int]:
        """Per edge, the set of enabled letters as a bitmask over ``2**len(signals)`` letters.

        Letter ``k`` assigns ``signals[j]`` the value of bit ``j`` of ``k``.
        """
        return [label_letters(label, self.signals) for _, label, _ in self.edges]


def label_letters(label: Term, signals: Sequence[str]) -> int:
    """Bit-parallel truth table of a propositional label over ``signals``."""
    n = len(signals)
    size = 1 << n
    full = (1 << size) - 1
    tables = {}
    for j, name in enumerate(signals):
        mask = 0
        for k in range(size):
            if k >> j & 1:
                mask |= 1 << k
        tables[name] = mask

    def go(t: Term) -> int:
        op = t.op
        if op == "const":
            return full if t.args[0] else 0
        if op == "var":
            return tables[t.args[0]]
        if op == "not":
            return full & ~go(t.args[0])
        if op == "and":
            acc = full
            for a in t.args:
                acc &= go(a)
            return acc
        if op == "or":
            acc = 0
            for a in t.args:
                acc |= go(a)
            return acc
        if op == "implies":
            return (full & ~go(t.args[0])) | go(t.args[1])
        raise ValueError(f"edge labels must be propositional, got {op!r}")

    return go(label)


# -- tableau translation -------------------------------------------------------

Cover = tuple[frozenset, frozenset, frozenset]  # literals, next obligations, postponed untils


@lru_cache(maxsize=None)
def _order(f: Ltl) -> str:
    return pretty(f)


def _complement(lit: Ltl) -> Ltl:
    return lit.children[0] if lit.kind == "not" else Not(lit)


def _expand(obligations: frozenset) -> list[Cover]:
    """All minimal ways to satisfy ``obligations`` at the current position."""
    results: set[Cover] = set()

    def rec(todo: tuple, lits: frozenset, nexts: frozenset, pending: frozenset, done: frozenset):
        while todo and todo[0] in done:
            todo = todo[1:]
        if not todo:
            results.add((lits, nexts, pending))
            return
        f, rest = todo[0], todo[1:]
        done = done | {f}
        k = f.kind
        if k == "true":
            rec(rest, lits, nexts, pending, done)
        elif k == "false":
            return
        elif k in ("atom", "not"):
            if _complement(f) in lits:
                return
            rec(rest, lits | {f}, nexts, pending, done)
        elif k == "and":
            rec(f.children + rest, lits, nexts, pending, done)
        elif k == "or":
            a, b = f.children
            rec((a,) + rest, lits, nexts, pending, done)
            rec((b,) + rest, lits, nexts, pending, done)
        elif k == "X":
            rec(rest, lits, nexts | {f.children[0]}, pending, done)
        elif k == "U":
            a, b = f.children
            rec((b,) + rest, lits, nexts, pending, done)
            rec((a,) + rest, lits, nexts | {f}, pending | {f}, done)
        elif k == "F":
            rec((f.children[0],) + rest, lits, nexts, pending, done)
            rec(rest, lits, nexts | {f}, pending | {f}, done)
        elif k == "R":
            a, b = f.children
            rec((a, b) + rest, lits, nexts, pending, done)
            rec((b,) + rest, lits, nexts | {f}, pending, done)
        elif k == "G":
            rec((f.children[0],) + rest, lits, nexts | {f}, pending, done)
        else:
            raise ValueError(f"formula is not in negation normal form: {f}")

    rec(tuple(sorted(obligations, key=_order)), frozenset(), frozenset(), frozenset(), frozenset())
    covers = sorted(results, key=_cover_order)
    minimal = []
    for c in covers:
        if any(d is not c and d[0] <= c[0] and d[1] <= c[1] and d[2] <= c[2] and d != c for d in covers):
            continue
        minimal.append(c)
    return minimal


def _cover_order(c: Cover):
    return tuple(sorted(_order(f) for f in c[0])), tuple(sorted(_order(f) for f in c[1])), \
        tuple(sorted(_order(f) for f in c[2]))


def _literal_term(lit: Ltl) -> Term:
    if lit.kind == "not":
        return logic.neg(logic.var(lit.children[0].name))
    return logic.var(lit.name)


def _cube(lits: frozenset) -> Term:
    return logic.conj_all(_literal_term(lit) for lit in sorted(lits, key=_order))


def ltl_to_nba(f: Ltl, signals: Sequence[str] | None = None) -> Nba:
    """Büchi automaton for ``f`` (brought into negation normal form first).

    Tableau expansion yields a generalized Büchi automaton with one
    acceptance condition per until/eventually subformula; it is
    degeneralized with a level counter that only tracks the conditions
    relevant inside each strongly connected component.  Useless states are
    trimmed and bisimilar states merged.
    """
    f = nnf(f)
    signals = tuple(signals) if signals is not None else tuple(sorted(f.atoms()))
    missing = f.atoms() - set(signals)
    if missing:
        raise ValueError(f"formula mentions unknown atoms {sorted(missing)}")

    # generalized automaton; node 0 is the initial pseudo-node
    node_ids: dict = {}
    nodes: list = [None]
    gedges: list[list[tuple[frozenset, int]]] = [[]]
    expand_cache: dict = {}

    def node(nexts, pending) -> int:
        key = (nexts, pending)
        idx = node_ids.get(key)
        if idx is None:
            idx = len(nodes)
            node_ids[key] = idx
            nodes.append(key)
            gedges.append([])
            todo.append(idx)
        return idx

    def covers(obligations):
        hit = expand_cache.get(obligations)
        if hit is None:
            hit = _expand(obligations)
            expand_cache[obligations] = hit
        return hit

    todo: deque[int] = deque()
    for lits, nexts, pending in covers(frozenset([f])):
        gedges[0].append((lits, node(nexts, pending)))
    while todo:
        idx = todo.popleft()
        for lits, nexts, pending in covers(nodes[idx][0]):
            gedges[idx].append((lits, node(nexts, pending)))

    def gsucc(idx):
        return [dst for _, dst in gedges[idx]]

    comp_of: dict[int, int] = {}
    relevant: dict[int, list] = {}
    nontrivial: dict[int, bool] = {}
    for cid, comp in enumerate(strongly_connected_components(range(len(nodes)), gsucc)):
        for idx in comp:
            comp_of[idx] = cid
        untils = set()
        for idx in comp:
            if idx:
                untils |= nodes[idx][1]
        relevant[cid] = sorted(untils, key=_order)
        nontrivial[cid] = is_nontrivial(comp, gsucc)

    # degeneralization over (node, level)
    state_ids: dict[tuple[int, int], int] = {(0, 0): 0}
    states = [(0, 0)]
    edges: list[Edge] = []
    queue = deque([(0, 0)])
    while queue:
        src = queue.popleft()
        idx, lvl = src
        cid = comp_of[idx]
        rel = relevant[cid]
        for lits, dst in gedges[idx]:
            if comp_of[dst] != cid:
                nlvl = 0
            else:
                j = 0 if lvl == len(rel) else lvl
                pending = nodes[idx][1] if idx else frozenset()
                while j < len(rel) and rel[j] not in pending:
                    j += 1
                nlvl = j
            key = (dst, nlvl)
            if key not in state_ids:
                state_ids[key] = len(states)
                states.append(key)
                queue.append(key)
            edges.append((state_ids[src], _cube(lits), state_ids[key]))
    accepting = frozenset(
        sid for sid, (idx, lvl) in enumerate(states)
        if idx and nontrivial[comp_of[idx]] and lvl == len(relevant[comp_of[idx]])
    )
    nba = Nba(signals, len(states), 0, tuple(edges), accepting)
    return _quotient(_trim(nba))


def _trim(nba: Nba) -> Nba:
    """Remove states that cannot reach an accepting cycle, renumbering the rest."""
    succ = [[] for _ in range(nba.num_states)]
    pred = [[] for _ in range(nba.num_states)]
    for src, _, dst in nba.edges:
        succ[src].append(dst)
        pred[dst].append(src)
    good_roots = []
    for comp in strongly_connected_components(range(nba.num_states), lambda q: succ[q]):
        if is_nontrivial(comp, lambda q: succ[q]) and any(q in nba.accepting for q in comp):
            good_roots.extend(comp)
    useful = reachable(good_roots, lambda q: pred[q])
    live = reachable([nba.initial], lambda q: [d for d in succ[q] if d in useful]) | {nba.initial}
    keep = sorted(q for q in live if q in useful or q == nba.initial)
    return _renumber(nba, keep)


def _renumber(nba: Nba, keep: list[int]) -> Nba:
    order = {q: k for k, q in enumerate(keep)}
    edges = tuple((order[s], label, order[d]) for s, label, d in nba.edges if s in order and d in order)
    return Nba(nba.signals, len(keep), order[nba.initial],
               edges, frozenset(order[q] for q in nba.accepting if q in order))


def _quotient(nba: Nba) -> Nba:
    """Merge bisimilar states (same acceptance, same labelled successors)."""
    out: list[list[tuple[Term, int]]] = [[] for _ in range(nba.num_states)]
    for src, label, dst in nba.edges:
        out[src].append((label, dst))
    block = [1 if q in nba.accepting else 0 for q in range(nba.num_states)]
    while True:
        sigs = {}
        new_block = []
        for q in range(nba.num_states):
            sig = (block[q], frozenset((label, block[d]) for label, d in out[q]))
            new_block.append(sigs.setdefault(sig, len(sigs)))
        if len(sigs) == len(set(block)):
            block = new_block
            break
        block = new_block
    # renumber blocks in order of first appearance from a BFS of the initial state
    order: dict[int, int] = {}
    queue = deque([nba.initial])
    seen = {nba.initial}
    while queue:
        q = queue.popleft()
        order.setdefault(block[q], len(order))
        for _, d in out[q]:
            if d not in seen:
                seen.add(d)
                queue.append(d)
    for q in range(nba.num_states):
        order.setdefault(block[q], len(order))
    edge_set: dict[tuple[int, int], list[Term]] = {}
    for src, label, dst in nba.edges:
        labels = edge_set.setdefault((order[block[src]], order[block[dst]]), [])
        if label not in labels:
            labels.append(label)
    edges = []
    for (src, dst), labels in edge_set.items():
        for label in _drop_subsumed(labels):
            edges.append((src, label, dst))
    edges.sort(key=lambda e: (e[0], e[2], str(e[1])))
    accepting = frozenset(order[block[q]] for q in nba.accepting)
    return Nba(nba.signals, len(order), order[block[nba.initial]], tuple(edges), accepting)


def _cube_literals(t: Term) -> frozenset | None:
    if t.op == "const":
        return frozenset() if t.args[0] else None
    if t.is_literal:
        return frozenset([t])
    if t.op == "and" and all(a.is_literal for a in t.args):
        return frozenset(t.args)
    return None


def _drop_subsumed(labels: list[Term]) -> list[Term]:
    """Among parallel edges, drop cube labels implied by another cube label."""
    cubes = [_cube_literals(t) for t in labels]
    kept = []
    for i, t in enumerate(labels):
        ci = cubes[i]
        if ci is not None and any(
            j != i and cubes[j] is not None and cubes[j] <= ci and (cubes[j] != ci or j < i)
            for j in range(len(labels))
        ):
            continue
        kept.append(t)
    return kept


def accepts_lasso(nba: Nba, prefix: Sequence[Iterable[str]], period: Sequence[Iterable[str]]) -> bool:
    """Whether ``nba`` has an accepting run on ``prefix . period^omega``."""
    word = [frozenset(x) for x in prefix] + [frozenset(x) for x in period]
    n = len(word)
    loop = len(prefix)
    enabled = {}
    for src, label, dst in nba.edges:
        for pos in range(n):
            if logic.evaluate(label, {s: s in word[pos] for s in nba.signals}):
                enabled.setdefault((src, pos), []).append((dst, pos + 1 if pos + 1 < n else loop))

    def succ(node):
        return enabled.get(node, ())

    live = reachable([(nba.initial, 0)], succ)
    for comp in strongly_connected_components(live, succ):
        if is_nontrivial(comp, succ) and any(q in nba.accepting for q, _ in comp):
            return True
    return False


# -- universal co-Büchi automata -----------------------------------------------

def ucw_from_nba(nba: Nba) -> UniversalCoBuchi:
    return UniversalCoBuchi(nba.signals, nba.num_states, nba.initial, nba.edges, nba.accepting)


def build_ucw(problem: SynthesisProblem, optimize: bool = True, translator=None) -> UniversalCoBuchi:
    """UCW of the problem's combined formula.

    ``translator`` optionally maps the NNF of the negated formula to an
    :class:`Nba` or :class:`UniversalCoBuchi` (e.g. an external HOA producer).
    """
    negated = nnf(combine(problem), negate=True)
    signals = problem.signals
    if translator is None:
        ucw = ucw_from_nba(ltl_to_nba(negated, signals))
    else:
        result = translator(negated, signals)
        ucw = ucw_from_nba(result) if isinstance(result, Nba) else result
    if optimize:
        ucw = analyze_sccs(demote_safety_states(ucw))
    return ucw


def demote_safety_states(a: UniversalCoBuchi) -> UniversalCoBuchi:
    """Turn rejecting sinks (only a ``true`` self-loop) into forbidden-entry safety states."""
    sinks = set()
    for q in a.rejecting:
        out = a.out_edges(q)
        if out and all(dst == q and label == logic.TRUE for _, label, dst in out):
            sinks.add(q)
    if not sinks:
        return a
    edges = tuple(e for e in a.edges if e[0] not in sinks)
    return replace(a, edges=edges, rejecting=a.rejecting - sinks, safety=a.safety | sinks,
                   scc_id=None, rank=None)


def analyze_sccs(a: UniversalCoBuchi) -> UniversalCoBuchi:
    """Annotate SCC ids and per-state rank ``r(q)``.

    ``r(q)`` counts the rejecting states of the component of ``q`` when that
    component lies on a cycle, and is 0 otherwise: rejecting states outside
    cycles can be visited at most once and never need a counter.
    """
    def succ(q):
        return [dst for _, _, dst in a.out_edges(q) if dst not in a.safety]

    scc_id = [0] * a.num_states
    rank = [0] * a.num_states
    comps = strongly_connected_components(range(a.num_states), succ)
    # number components in topological order (sources first) for stable output
    for cid, comp in enumerate(reversed(comps)):
        r = len([q for q in comp if q in a.rejecting]) if is_nontrivial(comp, succ) else 0
        for q in comp:
            scc_id[q] = cid
            rank[q] = r
    return replace(a, scc_id=tuple(scc_id), rank=tuple(rank))


# -- HOA ---------------------------------------------------------------------

class HoaError(ValueError):
    pass


_HOA_TOKEN = re.compile(
    r'\s*(?:("(?:[^"\\]|\\.)*")|(--BODY--|--END--|--ABORT--)|([A-Za-z_][A-Za-z0-9_-]*:)'
    r'|(@[A-Za-z0-9_-]+)|([A-Za-z_][A-Za-z0-9_-]*)|(\d+)|([\[\]{}()!&|]))'
)


def _hoa_tokens(text: str) -> list[tuple[str, str]]:
    kinds = ("string", "marker", "header", "alias", "ident", "int", "punct")
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        if text.startswith("/*", pos):
            end = text.find("*/", pos)
            if end < 0:
                raise HoaError("unterminated comment")
            pos = end + 2
            continue
        m = _HOA_TOKEN.match(text, pos)
        if not m:
            raise HoaError(f"unexpected character {text[pos]!r} at offset {pos}")
        kind = kinds[m.lastindex - 1]
        tokens.append((kind, m.group(m.lastindex)))
        pos = m.end()
    return tokens


def parse_hoa(text: str, signals: Sequence[str] | None = None) -> UniversalCoBuchi:
    """Read a state-based Büchi automaton in HOA v1 as the UCW of the negated formula.

    Supported: explicit edge labels, a single initial state, acceptance
    ``Inf(0)`` (or the constants ``t``/``f``) with state-based marks.
    Everything else is rejected with :class:`HoaError`.
    """
    tokens = _hoa_tokens(text)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else (None, None)

    headers: dict[str, list] = {}
    if peek() != ("header", "HOA:"):
        raise HoaError("missing 'HOA:' header")
    while True:
        kind, val = peek()
        if kind is None:
            raise HoaError("missing --BODY--")
        if kind == "marker" and val == "--BODY--":
            pos += 1
            break
        if kind != "header":
            raise HoaError(f"unexpected token {val!r} in header")
        pos += 1
        name = val[:-1]
        values = []
        while peek()[0] not in ("header", "marker", None):
            values.append(peek())
            pos += 1
        headers.setdefault(name, []).append(values)

    if headers["HOA"][0] != [("ident", "v1")]:
        raise HoaError("only HOA v1 is supported")
    if "Alias" in headers:
        raise HoaError("unsupported HOA feature: aliases")
    starts = headers.get("Start", [])
    if len(starts) != 1 or len(starts[0]) != 1:
        raise HoaError("unsupported HOA feature: exactly one initial state required")
    if "&" in [v for _, v in starts[0]]:
        raise HoaError("unsupported HOA feature: alternation")
    initial = int(starts[0][0][1])
    aps: list[str] = []
    if "AP" in headers:
        ap_vals = headers["AP"][0]
        count = int(ap_vals[0][1])
        aps = [_unquote(v) for k, v in ap_vals[1:]]
        if len(aps) != count:
            raise HoaError("AP count does not match the listed propositions")
    acc = headers.get("Acceptance")
    if not acc:
        raise HoaError("missing Acceptance header")
    acc_text = " ".join(v for _, v in acc[0])
    acc_norm = acc_text.replace(" ", "")
    if acc_norm in ("1Inf(0)",):
        mode = "buchi"
    elif acc_norm == "0t":
        mode = "all"
    elif acc_norm == "0f":
        mode = "none"
    else:
        raise HoaError(f"unsupported acceptance {acc_text!r}")

    if signals is None:
        signals = tuple(aps)
    else:
        signals = tuple(signals)
        for ap in aps:
            if ap not in signals:
                raise HoaError(f"unknown AP {ap!r}")

    ap_terms = [logic.var(name) for name in aps]

    def parse_label(toks: list) -> Term:
        i = 0

        def disjunction():
            nonlocal i
            t = conjunction()
            while i < len(toks) and toks[i][1] == "|":
                i += 1
                t = logic.disj(t, conjunction())
            return t

        def conjunction():
            nonlocal i
            t = atom()
            while i < len(toks) and toks[i][1] == "&":
                i += 1
                t = logic.conj(t, atom())
            return t

        def atom():
            nonlocal i
            if i >= len(toks):
                raise HoaError("truncated label")
            kind, val = toks[i]
            i += 1
            if val == "!":
                return logic.neg(atom())
            if val == "(":
                t = disjunction()
                if i >= len(toks) or toks[i][1] != ")":
                    raise HoaError("expected ')' in label")
                i += 1
                return t
            if kind == "ident" and val in ("t", "f"):
                return logic.const(val == "t")
            if kind == "int":
                k = int(val)
                if k >= len(ap_terms):
                    raise HoaError(f"AP index {k} out of range")
                return ap_terms[k]
            if kind == "alias":
                raise HoaError("unsupported HOA feature: aliases")
            raise HoaError(f"unexpected token {val!r} in label")

        t = disjunction()
        if i != len(toks):
            raise HoaError("trailing tokens in label")
        return t

    def bracketed(open_, close):
        nonlocal pos
        assert tokens[pos][1] == open_
        pos += 1
        inner = []
        while pos < len(tokens) and tokens[pos][1] != close:
            inner.append(tokens[pos])
            pos += 1
        if pos >= len(tokens):
            raise HoaError(f"missing {close!r}")
        pos += 1
        return inner

    edges: list[Edge] = []
    rejecting = set()
    declared = set()
    while True:
        kind, val = peek()
        if kind is None:
            raise HoaError("missing --END--")
        if kind == "marker":
            if val == "--END--":
                break
            raise HoaError("automaton aborted")
        if (kind, val) != ("header", "State:"):
            raise HoaError(f"expected 'State:', got {val!r}")
        pos += 1
        if peek()[1] == "[":
            raise HoaError("unsupported HOA feature: state labels")
        if peek()[0] != "int":
            raise HoaError("expected state number")
        q = int(peek()[1])
        pos += 1
        declared.add(q)
        if peek()[0] == "string":
            pos += 1
        if peek()[1] == "{":
            marks = bracketed("{", "}")
            if any(v != "0" for _, v in marks):
                raise HoaError("unsupported acceptance: only set 0 is allowed")
            if marks and mode == "buchi":
                rejecting.add(q)
        if mode == "all":
            rejecting.add(q)
        while True:
            kind, val = peek()
            if kind == "header" or kind == "marker" or kind is None:
                break
            if val != "[":
                raise HoaError("unsupported HOA feature: implicit edge labels")
            label = parse_label(bracketed("[", "]"))
            if peek()[0] != "int":
                raise HoaError("expected destination state")
            dst = int(peek()[1])
            pos += 1
            if peek()[1] == "&":
                raise HoaError("unsupported HOA feature: alternation")
            if peek()[1] == "{":
                raise HoaError("unsupported HOA feature: transition-based acceptance")
            edges.append((q, label, dst))
    num_states = int(headers["States"][0][0][1]) if "States" in headers else max(declared | {initial}) + 1
    for s, _, d in edges:
        if not (0 <= s < num_states and 0 <= d < num_states):
            raise HoaError(f"edge {s}->{d} leaves the declared state range")
    if not 0 <= initial < num_states:
        raise HoaError("initial state out of range")
    return UniversalCoBuchi(signals, num_states, initial, tuple(edges), frozenset(rejecting))


def _unquote(s: str) -> str:
    return s[1:-1].replace('\\"', '"').replace("\\\\", "\\")


def print_hoa(a: UniversalCoBuchi | Nba, name: str = "") -> str:
    """State-based Büchi HOA text; the accepting set is the rejecting set of a UCW."""
    marked = a.accepting if isinstance(a, Nba) else a.rejecting
    aps = list(a.signals)
    index = {s: k for k, s in enumerate(aps)}

    def label(t: Term) -> str:
        op = t.op
        if op == "const":
            return "t" if t.args[0] else "f"
        if op == "var":
            return str(index[t.args[0]])
        if op == "not":
            return "!" + label(t.args[0]) if t.args[0].op == "var" else f"!({label(t.args[0])})"
        if op in ("and", "or"):
            sep = " & " if op == "and" else " | "
            return sep.join(f"({label(x)})" if x.op in ("and", "or") else label(x) for x in t.args)
        if op == "implies":
            return f"!({label(t.args[0])}) | ({label(t.args[1])})"
        raise ValueError(op)

    lines = ["HOA: v1"]
    if name:
        lines.append(f'name: "{name}"')
    lines.append(f"States: {a.num_states}")
    lines.append(f"Start: {a.initial}")
    lines.append(f"AP: {len(aps)}" + "".join(f' "{s}"' for s in aps))
    lines.append("acc-name: Buchi")
    lines.append("Acceptance: 1 Inf(0)")
    lines.append("properties: trans-labels explicit-labels state-acc")
    lines.append("--BODY--")
    for q in range(a.num_states):
        lines.append(f"State: {q}" + (" {0}" if q in marked else ""))
        for src, lab, dst in a.edges:
            if src == q:
                lines.append(f"[{label(lab)}] {dst}")
    lines.append("--END--")
    return "\n".join(lines) + "\n"
