"""Bounded-synthesis constraint systems.

Both encodings assert the existence of a machine with ``bound`` states and
an annotation of the product with the UCW: a reachability marker
``lb(s, q)`` and, where the automaton's SCC rank requires it, a bounded
counter ``lc(s, q)`` that must grow on every visit to a rejecting state
within a component.

* propositional: successor and output functions are unrolled over all
  concrete input valuations (plain SAT);
* input-symbolic: one copy over universally quantified input variables,
  prefix exists (annotation) / forall (inputs) / exists (functions).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable

from . import logic
from .logic import (EXISTS, FORALL, BoundedNat, Cnf, CnfBuilder, QuantifiedProblem, Registry,
                    Term, emit_dimacs, emit_qdimacs)
from .machine import MAX_INPUTS, Machine, machine_from_tables
from .omega import UniversalCoBuchi
from .specio import Semantics, SynthesisProblem


class EncodingError(ValueError):
    pass


@dataclass
class EncodingContext:
    automaton: UniversalCoBuchi
    bound: int
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    semantics: Semantics

    def __post_init__(self):
        if self.bound < 1:
            raise EncodingError("bound must be at least 1")
        if len(self.inputs) > MAX_INPUTS:
            raise EncodingError(f"more than {MAX_INPUTS} inputs cannot be enumerated")
        missing = set(self.automaton.signals) - set(self.inputs) - set(self.outputs)
        if missing:
            raise EncodingError(f"automaton uses undeclared signals {sorted(missing)}")

    @classmethod
    def for_problem(cls, problem: SynthesisProblem, automaton: UniversalCoBuchi, bound: int):
        return cls(automaton, bound, problem.inputs, problem.outputs, problem.semantics)

    @property
    def mealy(self) -> bool:
        return self.semantics is Semantics.MEALY

    def reach(self, s: int, q: int) -> Term:
        return logic.var(("lb", s, q))

    def counter(self, s: int, q: int) -> BoundedNat:
        return BoundedNat.fresh(("lc", s, q), self.automaton.counter_capacity(q, self.bound))

    def successor(self, s: int, i: Hashable) -> BoundedNat:
        return BoundedNat.fresh(("d", s, i), self.bound - 1)

    def output(self, s: int, i: Hashable, name: str) -> Term:
        if self.mealy:
            return logic.var(("o", s, i, name))
        return logic.var(("o", s, name))


@dataclass
class ConstraintSystem:
    """A CNF (with optional quantifier prefix) and the registry to decode it."""

    context: EncodingContext
    kind: str
    registry: Registry
    cnf: Cnf
    prefix: list[tuple[str, list[int]]] = field(default_factory=list)

    @property
    def num_vars(self) -> int:
        return self.cnf.num_vars

    @property
    def num_clauses(self) -> int:
        return len(self.cnf.clauses)

    def function_var_count(self) -> int:
        """Variables encoding successor and output functions."""
        return sum(1 for v in range(1, self.registry.num_vars + 1) if _is_function_var(self.registry.key(v)))

    def quantified(self) -> QuantifiedProblem:
        return QuantifiedProblem(self.prefix, self.cnf)

    def dimacs(self) -> str:
        return emit_dimacs(self.cnf)

    def qdimacs(self) -> str:
        return emit_qdimacs(self.quantified())


def _is_function_var(key) -> bool:
    if not isinstance(key, tuple) or not key:
        return False
    head = key[0]
    if head == "o":
        return True
    return isinstance(head, tuple) and head and head[0] == "d"


def _annotation_vars(ctx: EncodingContext, reg: Registry) -> list[int]:
    a = ctx.automaton
    ids = []
    for s in range(ctx.bound):
        for q in a.states:
            if q in a.safety:
                continue
            ids.append(reg.id(("lb", s, q)))
    for s in range(ctx.bound):
        for q in a.states:
            if q in a.safety:
                continue
            ids.extend(reg.id(k) for k in ctx.counter(s, q).keys)
    return ids


def _annotation_constraints(ctx: EncodingContext, builder: CnfBuilder) -> None:
    a = ctx.automaton
    if a.initial in a.safety:
        # every word starts in a forbidden state: nothing can satisfy the automaton
        builder.add(logic.FALSE)
        return
    builder.add(ctx.reach(0, a.initial))
    for s in range(ctx.bound):
        for q in a.states:
            if q not in a.safety:
                builder.add(ctx.counter(s, q).within_capacity())


def _edge_constraints(ctx: EncodingContext, builder: CnfBuilder, s: int, i: Hashable,
                      input_terms: dict[str, Term]) -> None:
    """Constraints for machine state ``s`` under input context ``i``."""
    a = ctx.automaton
    n = ctx.bound
    succ = ctx.successor(s, i)
    builder.add(succ.within_capacity())
    mapping = dict(input_terms)
    for name in ctx.outputs:
        mapping[name] = ctx.output(s, i, name)
    targets = [succ.equals(t) for t in range(n)]
    for q in a.states:
        if q in a.safety:
            continue
        lb = ctx.reach(s, q)
        for _, label, q2 in a.out_edges(q):
            guard = logic.substitute(label, mapping)
            if guard == logic.FALSE:
                continue
            if q2 in a.safety:
                builder.add(logic.disj(logic.neg(lb), logic.neg(guard)))
                continue
            check = a.needs_counter_check(q, q2)
            for t in range(n):
                premise = logic.conj(lb, guard, targets[t])
                builder.add(logic.implies(premise, ctx.reach(t, q2)))
                if check:
                    src, dst = ctx.counter(s, q), ctx.counter(t, q2)
                    rel = ">" if q2 in a.rejecting else ">="
                    builder.add(logic.implies(premise, logic.compare(dst, rel, src)))


def _register_functions(ctx: EncodingContext, reg: Registry, contexts: list[Hashable]) -> list[int]:
    ids = []
    for s in range(ctx.bound):
        for i in contexts:
            ids.extend(reg.id(k) for k in ctx.successor(s, i).keys)
            if ctx.mealy:
                ids.extend(reg.id(ctx.output(s, i, name).args[0]) for name in ctx.outputs)
        if not ctx.mealy:
            ids.extend(reg.id(ctx.output(s, None, name).args[0]) for name in ctx.outputs)
    return ids


def encode_propositional(ctx: EncodingContext) -> ConstraintSystem:
    reg = Registry()
    _annotation_vars(ctx, reg)
    valuations = list(range(1 << len(ctx.inputs)))
    _register_functions(ctx, reg, valuations)
    builder = CnfBuilder(reg)
    _annotation_constraints(ctx, builder)
    for s in range(ctx.bound):
        for k in valuations:
            input_terms = {name: logic.const(bool(k >> j & 1)) for j, name in enumerate(ctx.inputs)}
            _edge_constraints(ctx, builder, s, k, input_terms)
    return ConstraintSystem(ctx, "propositional", reg, builder.cnf())


def encode_input_symbolic(ctx: EncodingContext) -> ConstraintSystem:
    reg = Registry()
    outer = _annotation_vars(ctx, reg)
    universals = [reg.id(("u", name)) for name in ctx.inputs]
    functions = _register_functions(ctx, reg, [None])
    if not ctx.mealy:
        # Moore outputs may not depend on the current input, so they belong outside the forall
        moore = {reg.id(ctx.output(s, None, name).args[0]) for s in range(ctx.bound) for name in ctx.outputs}
        outer = outer + [v for v in functions if v in moore]
        functions = [v for v in functions if v not in moore]
    builder = CnfBuilder(reg)
    _annotation_constraints(ctx, builder)
    input_terms = {name: logic.var(("u", name)) for name in ctx.inputs}
    for s in range(ctx.bound):
        _edge_constraints(ctx, builder, s, None, input_terms)
    inner = functions + builder.aux_vars
    prefix = [(EXISTS, outer), (FORALL, universals), (EXISTS, inner)]
    return ConstraintSystem(ctx, "input-symbolic", reg, builder.cnf(), prefix)


def decode_machine(system: ConstraintSystem, model) -> Machine:
    """Machine from a solver model.

    ``model`` is a list of signed literals (propositional systems) or a
    :class:`bosy.qbf.QbfModel` (input-symbolic systems).
    """
    ctx = system.context
    reg = system.registry
    n = ctx.bound
    nin = len(ctx.inputs)

    if system.kind == "propositional":
        values = {abs(lit): lit > 0 for lit in model}

        def lookup(key, k):
            v = reg.get(key)
            if v is None or v not in values:
                raise EncodingError(f"model does not assign {key!r}")
            return values[v]

        ctx_of = lambda k: k  # noqa: E731
    else:
        universal_ids = [reg.get(("u", name)) for name in ctx.inputs]
        if list(model.universals) != universal_ids:
            raise EncodingError("model universals do not match the encoding")

        def lookup(key, k):
            v = reg.get(key)
            if v is None:
                raise EncodingError(f"model does not assign {key!r}")
            valuation = tuple(bool(k >> j & 1) for j in range(nin))
            try:
                return model.value(v, valuation)
            except KeyError:
                raise EncodingError(f"model does not assign {key!r}") from None

        ctx_of = lambda k: None  # noqa: E731

    next_state = []
    output_bits = []
    for s in range(n):
        row_n, row_o = [], []
        for k in range(1 << nin):
            succ = ctx.successor(s, ctx_of(k))
            t = sum(1 << b for b, key in enumerate(succ.keys) if lookup(key, k))
            if t >= n:
                raise EncodingError(f"successor {t} out of range")
            row_n.append(t)
            bits = 0
            for j, name in enumerate(ctx.outputs):
                key = ctx.output(s, ctx_of(k), name).args[0]
                if lookup(key, k):
                    bits |= 1 << j
            row_o.append(bits)
        next_state.append(row_n)
        output_bits.append(row_o)
    return machine_from_tables(ctx.inputs, ctx.outputs, ctx.semantics, next_state, output_bits)
