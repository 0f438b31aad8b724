"""Finite-state implementations and their verification against a UCW."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence

from . import logic
from .graphs import is_nontrivial, reachable, strongly_connected_components
from .logic import Term
from .omega import UniversalCoBuchi
from .specio import Semantics


class MachineError(ValueError):
    pass


MAX_INPUTS = 16


@dataclass(frozen=True)
class Machine:
    """Transition guards ``guards[s][t]`` over the inputs and one output
    function per state and output signal.  State 0 is initial."""

    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    semantics: Semantics
    num_states: int
    guards: tuple[tuple[Term, ...], ...]
    output_functions: tuple[tuple[Term, ...], ...]

    @property
    def signals(self) -> tuple[str, ...]:
        return self.inputs + self.outputs

    def valuation(self, k: int) -> dict[str, bool]:
        """Input valuation number ``k``: ``inputs[j]`` takes bit ``j`` of ``k``."""
        return {name: bool(k >> j & 1) for j, name in enumerate(self.inputs)}

    @cached_property
    def tables(self) -> tuple[list[list[int]], list[list[int]]]:
        """``(next_state[s][k], output_bits[s][k])`` for every input valuation ``k``.

        ``next_state`` is -1 where the guards are not total-deterministic.
        """
        if len(self.inputs) > MAX_INPUTS:
            raise MachineError(f"more than {MAX_INPUTS} inputs")
        nxt = []
        outs = []
        for s in range(self.num_states):
            row_n, row_o = [], []
            for k in range(1 << len(self.inputs)):
                val = self.valuation(k)
                targets = [t for t in range(self.num_states) if logic.evaluate(self.guards[s][t], val)]
                row_n.append(targets[0] if len(targets) == 1 else -1)
                bits = 0
                for j, f in enumerate(self.output_functions[s]):
                    if logic.evaluate(f, val):
                        bits |= 1 << j
                row_o.append(bits)
            nxt.append(row_n)
            outs.append(row_o)
        return nxt, outs

    def step(self, state: int, inputs: Mapping[str, bool]) -> tuple[int, dict[str, bool]]:
        k = sum(1 << j for j, name in enumerate(self.inputs) if inputs.get(name, False))
        nxt, outs = self.tables
        bits = outs[state][k]
        return nxt[state][k], {name: bool(bits >> j & 1) for j, name in enumerate(self.outputs)}

    def run(self, input_word: Sequence[Mapping[str, bool]]) -> list[dict[str, bool]]:
        """Outputs produced along a finite input sequence from the initial state."""
        state = 0
        trace = []
        for letter in input_word:
            state, out = self._step_checked(state, letter)
            trace.append(out)
        return trace

    def _step_checked(self, state, letter):
        nxt, out = self.step(state, letter)
        if nxt < 0:
            raise MachineError("machine is not total-deterministic")
        return nxt, out


def check_total_deterministic(m: Machine) -> bool:
    if len(m.inputs) > MAX_INPUTS:
        raise MachineError(f"more than {MAX_INPUTS} inputs")
    nxt, _ = m.tables
    if any(t < 0 for row in nxt for t in row):
        return False
    if m.semantics is Semantics.MOORE:
        ins = set(m.inputs)
        for row in m.output_functions:
            for f in row:
                if logic.variables(f) & ins:
                    return False
    return True


def model_check(m: Machine, a: UniversalCoBuchi) -> bool:
    """Whether every trace of ``m`` is accepted by the universal co-Büchi automaton.

    Explores the product of machine states and automaton states; fails if a
    forbidden (safety) edge is enabled in a reachable product node or a
    reachable cycle passes through a rejecting state.
    """
    missing = set(a.signals) - set(m.signals)
    if missing:
        raise MachineError(f"automaton mentions signals unknown to the machine: {sorted(missing)}")
    if not check_total_deterministic(m):
        raise MachineError("machine is not total-deterministic")
    if a.initial in a.safety:
        return False
    nxt, outs = m.tables
    pos_in = {name: j for j, name in enumerate(m.inputs)}
    pos_out = {name: j for j, name in enumerate(m.outputs)}
    letters = a.edge_letters()
    edges_of = [[(k, e) for k, e in enumerate(a.edges) if e[0] == q] for q in a.states]

    def letter(k: int, o: int) -> int:
        code = 0
        for j, name in enumerate(a.signals):
            if name in pos_in:
                bit = k >> pos_in[name] & 1
            else:
                bit = o >> pos_out[name] & 1
            code |= bit << j
        return code

    succ_cache: dict[tuple[int, int], list[tuple[int, int]]] = {}
    violation = False

    def succ(node):
        nonlocal violation
        hit = succ_cache.get(node)
        if hit is not None:
            return hit
        s, q = node
        res = set()
        for k in range(1 << len(m.inputs)):
            s2 = nxt[s][k]
            c = letter(k, outs[s][k])
            for idx, (_, _, q2) in edges_of[q]:
                if letters[idx] >> c & 1:
                    if q2 in a.safety:
                        violation = True
                    else:
                        res.add((s2, q2))
        out = sorted(res)
        succ_cache[node] = out
        return out

    live = reachable([(0, a.initial)], succ)
    if violation:
        return False
    for comp in strongly_connected_components(sorted(live), succ):
        if any(q in a.rejecting for _, q in comp) and is_nontrivial(comp, succ):
            return False
    return True


# -- building machines from tables --------------------------------------------

def minimal_cover(minterms: set[int], names: Sequence[str]) -> Term:
    """A small sum-of-products term over ``names`` true exactly on ``minterms``.

    Quine-McCluskey prime implicants with a greedy cover.
    """
    n = len(names)
    full = 1 << n
    if not minterms:
        return logic.FALSE
    if len(minterms) == full:
        return logic.TRUE
    # cubes as (value, dont_care_mask)
    current = {(m, 0) for m in minterms}
    primes = set()
    while current:
        merged = set()
        used = set()
        items = sorted(current)
        for i, (v1, d1) in enumerate(items):
            for v2, d2 in items[i + 1:]:
                if d1 != d2:
                    continue
                diff = v1 ^ v2
                if diff & (diff - 1) == 0:
                    merged.add((v1 & ~diff, d1 | diff))
                    used.add((v1, d1))
                    used.add((v2, d2))
        primes |= current - used
        current = merged

    def covers(cube, m):
        v, d = cube
        return (m & ~d) == (v & ~d)

    remaining = set(minterms)
    chosen = []
    while remaining:
        best = max(sorted(primes), key=lambda c: (sum(1 for m in remaining if covers(c, m)), bin(c[1]).count("1")))
        chosen.append(best)
        remaining = {m for m in remaining if not covers(best, m)}
    terms = []
    for v, d in chosen:
        lits = []
        for j, name in enumerate(names):
            if d >> j & 1:
                continue
            lits.append(logic.var(name) if v >> j & 1 else logic.neg(logic.var(name)))
        terms.append(logic.conj_all(lits))
    return logic.disj_all(terms)


def machine_from_tables(
    inputs: Sequence[str],
    outputs: Sequence[str],
    semantics: Semantics,
    next_state: Sequence[Sequence[int]],
    output_bits: Sequence[Sequence[int]],
) -> Machine:
    """Machine from explicit per-valuation successor and output tables.

    ``output_bits[s][k]`` has bit ``j`` set when ``outputs[j]`` is true in
    state ``s`` under input valuation ``k``.
    """
    n = len(next_state)
    guards = []
    funcs = []
    for s in range(n):
        row = next_state[s]
        guards.append(tuple(minimal_cover({k for k, t in enumerate(row) if t == t2}, inputs) for t2 in range(n)))
        funcs.append(tuple(
            minimal_cover({k for k, bits in enumerate(output_bits[s]) if bits >> j & 1}, inputs)
            for j in range(len(outputs))
        ))
    return Machine(tuple(inputs), tuple(outputs), semantics, n, tuple(guards), tuple(funcs))


def simplify(m: Machine, a: UniversalCoBuchi) -> Machine:
    """Greedily make transitions and outputs input-independent where the
    result still passes :func:`model_check` against ``a``.

    Solvers pick arbitrary values for irrelevant table entries; this removes
    that noise without giving up correctness.
    """
    nxt, outs = m.tables
    nxt = [list(row) for row in nxt]
    outs = [list(row) for row in outs]
    num_vals = 1 << len(m.inputs)

    def build(next_state, output_bits):
        return machine_from_tables(m.inputs, m.outputs, m.semantics, next_state, output_bits)

    current = m
    for s in range(m.num_states):
        if len(set(nxt[s])) > 1:
            for t in sorted(set(nxt[s])):
                trial = [list(row) for row in nxt]
                trial[s] = [t] * num_vals
                candidate = build(trial, outs)
                if model_check(candidate, a):
                    nxt, current = trial, candidate
                    break
        for j in range(len(m.outputs)):
            column = {bits >> j & 1 for bits in outs[s]}
            if len(column) < 2:
                continue
            for value in (0, 1):
                trial = [list(row) for row in outs]
                trial[s] = [(bits & ~(1 << j)) | (value << j) for bits in outs[s]]
                candidate = build(nxt, trial)
                if model_check(candidate, a):
                    outs, current = trial, candidate
                    break
    return current
