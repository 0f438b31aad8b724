"""Serialize machines as ASCII AIGER, SMV and DOT."""

from __future__ import annotations

from . import logic
from .logic import Term
from .machine import Machine, minimal_cover
from .specio import Semantics


class _Aig:
    """AND-inverter graph with structural hashing and constant folding."""

    def __init__(self, first_and_var: int):
        self.next_var = first_and_var
        self.ands: list[tuple[int, int, int]] = []
        self._hash: dict[tuple[int, int], int] = {}

    def conj(self, a: int, b: int) -> int:
        if a == 0 or b == 0 or a == b ^ 1:
            return 0
        if a == 1:
            return b
        if b == 1 or a == b:
            return a
        key = (max(a, b), min(a, b))
        lit = self._hash.get(key)
        if lit is None:
            lit = 2 * self.next_var
            self.next_var += 1
            self.ands.append((lit, key[0], key[1]))
            self._hash[key] = lit
        return lit

    def disj(self, a: int, b: int) -> int:
        return self.conj(a ^ 1, b ^ 1) ^ 1

    def disj_all(self, lits) -> int:
        acc = 0
        for lit in lits:
            acc = self.disj(acc, lit)
        return acc

    def term(self, t: Term, atoms: dict[str, int]) -> int:
        op = t.op
        if op == "const":
            return 1 if t.args[0] else 0
        if op == "var":
            return atoms[t.args[0]]
        if op == "not":
            return self.term(t.args[0], atoms) ^ 1
        if op == "and":
            acc = 1
            for a in t.args:
                acc = self.conj(acc, self.term(a, atoms))
            return acc
        if op == "or":
            return self.disj_all(self.term(a, atoms) for a in t.args)
        if op == "implies":
            return self.disj(self.term(t.args[0], atoms) ^ 1, self.term(t.args[1], atoms))
        raise ValueError(f"cannot translate {op!r} to AIG")


def emit_aiger(m: Machine) -> str:
    """ASCII AIGER with the state stored in binary latches.

    Codes at or above the state count behave like state 0.
    """
    n = m.num_states
    num_in = len(m.inputs)
    num_latch = (n - 1).bit_length()
    in_lits = [2 * (k + 1) for k in range(num_in)]
    latch_lits = [2 * (num_in + k + 1) for k in range(num_latch)]
    aig = _Aig(num_in + num_latch + 1)
    atoms = dict(zip(m.inputs, in_lits))

    select = [0] * n
    for s in range(1, n):
        acc = 1
        for b, lit in enumerate(latch_lits):
            acc = aig.conj(acc, lit if s >> b & 1 else lit ^ 1)
        select[s] = acc
    select[0] = aig.disj_all(select[1:]) ^ 1

    next_lits = []
    for b in range(num_latch):
        terms = []
        for s in range(n):
            for t in range(n):
                if t >> b & 1:
                    terms.append(aig.conj(select[s], aig.term(m.guards[s][t], atoms)))
        next_lits.append(aig.disj_all(terms))
    out_lits = []
    for j in range(len(m.outputs)):
        out_lits.append(aig.disj_all(
            aig.conj(select[s], aig.term(m.output_functions[s][j], atoms)) for s in range(n)
        ))

    max_var = aig.next_var - 1
    lines = [f"aag {max_var} {num_in} {num_latch} {len(out_lits)} {len(aig.ands)}"]
    lines.extend(str(lit) for lit in in_lits)
    lines.extend(f"{lit} {nxt}" for lit, nxt in zip(latch_lits, next_lits))
    lines.extend(str(lit) for lit in out_lits)
    lines.extend(f"{lhs} {r0} {r1}" for lhs, r0, r1 in aig.ands)
    lines.extend(f"i{k} {name}" for k, name in enumerate(m.inputs))
    lines.extend(f"l{k} s{k}" for k in range(num_latch))
    lines.extend(f"o{k} {name}" for k, name in enumerate(m.outputs))
    return "\n".join(lines) + "\n"


def _smv_guard(t: Term) -> str:
    text = logic.to_string(t)
    return f"({text})" if t.op in ("or", "implies") else text


def emit_smv(m: Machine) -> str:
    n = m.num_states
    states = ", ".join(f"s{s}" for s in range(n))
    lines = ["MODULE main", "  VAR", f"    state: {{{states}}};"]
    lines.extend(f"    {name} : boolean;" for name in m.inputs)
    lines.append("  ASSIGN")
    lines.append("    init(state) := s0;")
    lines.append("    next(state) := case")
    for s in range(n):
        for t in range(n):
            guard = m.guards[s][t]
            if guard != logic.FALSE:
                lines.append(f"      state = s{s} & {_smv_guard(guard)} : s{t};")
    lines.append("    esac;")
    if m.outputs:
        lines.append("  DEFINE")
    for j, name in enumerate(m.outputs):
        parts = [
            f"(state = s{s} & {_smv_guard(m.output_functions[s][j])})"
            for s in range(n) if m.output_functions[s][j] != logic.FALSE
        ]
        lines.append(f"    {name} := {' | '.join(parts) if parts else 'FALSE'};")
    return "\n".join(lines) + "\n"


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _outputs_text(names, bits: int) -> str:
    return " ".join(name if bits >> j & 1 else "!" + name for j, name in enumerate(names))


def emit_dot(m: Machine) -> str:
    nxt, outs = m.tables
    n = m.num_states
    num_vals = 1 << len(m.inputs)
    lines = ["digraph machine {", "  rankdir=LR;", '  init [shape=point, label=""];']
    for s in range(n):
        label = f"s{s}"
        if m.semantics is Semantics.MOORE and m.outputs:
            label += "\\n" + _dot_escape(_outputs_text(m.outputs, outs[s][0]))
        shape = "doublecircle" if s == 0 else "circle"
        lines.append(f'  s{s} [label="{label}", shape={shape}];')
    lines.append("  init -> s0;")
    for s in range(n):
        for t in range(n):
            vals = [k for k in range(num_vals) if nxt[s][k] == t]
            if not vals:
                continue
            if m.semantics is Semantics.MOORE or not m.outputs:
                parts = [logic.to_string(m.guards[s][t])]
            else:
                groups: dict[int, list[int]] = {}
                for k in vals:
                    groups.setdefault(outs[s][k], []).append(k)
                parts = [
                    f"{logic.to_string(minimal_cover(set(ks), m.inputs))} / {_outputs_text(m.outputs, bits)}"
                    for bits, ks in sorted(groups.items())
                ]
            label = "\\n".join(_dot_escape(p) for p in parts)
            lines.append(f'  s{s} -> s{t} [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


EMITTERS = {"aiger": emit_aiger, "smv": emit_smv, "dot": emit_dot}
