"""QBF decision by universal expansion.

Problems of the shape exists-forall-exists are solved the way the two-step
synthesis procedure needs them: the outer existential assignment and, for
every valuation of the universal block, the inner assignment (a Skolem
function given as a table).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Mapping

from .logic import FORALL, Cnf, QuantifiedProblem
from .sat import SAT, UNSAT, SolveResult, solve_cnf

MAX_UNIVERSALS = 16


class QbfError(ValueError):
    pass


@dataclass
class QbfModel:
    universals: list[int]
    outer: dict[int, bool]
    inner: dict[tuple[bool, ...], dict[int, bool]]

    def value(self, var: int, valuation: tuple[bool, ...]) -> bool:
        if var in self.outer:
            return self.outer[var]
        return self.inner[valuation][var]


def _split_prefix(problem: QuantifiedProblem) -> tuple[list[int], list[int], list[int]]:
    blocks = problem.normalized_prefix()
    shape = "".join(q for q, _ in blocks)
    if shape not in ("", "e", "a", "ea", "ae", "eae"):
        raise QbfError(f"unsupported quantifier prefix shape {shape!r}")
    outer: list[int] = []
    universals: list[int] = []
    inner: list[int] = []
    seen_forall = False
    for q, vs in blocks:
        if q == FORALL:
            universals = list(vs)
            seen_forall = True
        elif seen_forall:
            inner = list(vs)
        else:
            outer = list(vs)
    bound = set(outer) | set(universals) | set(inner)
    free = sorted({abs(lit) for c in problem.matrix.clauses for lit in c} - bound)
    return free + outer, universals, inner


def expand_universals(problem: QuantifiedProblem, should_stop=None) -> SolveResult:
    outer, universals, inner = _split_prefix(problem)
    if len(universals) > MAX_UNIVERSALS:
        raise QbfError(f"universal block too wide ({len(universals)} > {MAX_UNIVERSALS})")
    cnf = problem.matrix
    uni_index = {v: j for j, v in enumerate(universals)}
    inner_set = set(inner)
    next_var = cnf.num_vars
    clauses: list[tuple[int, ...]] = []
    copies: list[tuple[tuple[bool, ...], dict[int, int]]] = []
    for valuation in product((False, True), repeat=len(universals)):
        if copies:
            rename = {}
            for v in inner:
                next_var += 1
                rename[v] = next_var
        else:
            rename = {v: v for v in inner}
        copies.append((valuation, rename))
        for clause in cnf.clauses:
            out = []
            satisfied = False
            for lit in clause:
                v = abs(lit)
                j = uni_index.get(v)
                if j is not None:
                    if valuation[j] == (lit > 0):
                        satisfied = True
                        break
                    continue
                if v in inner_set:
                    w = rename[v]
                    out.append(w if lit > 0 else -w)
                else:
                    out.append(lit)
            if not satisfied:
                clauses.append(tuple(out))
    result = solve_cnf(Cnf(next_var, clauses), should_stop)
    if not result.sat:
        return SolveResult(UNSAT)
    values = {abs(lit): lit > 0 for lit in result.model}
    model = QbfModel(
        universals=list(universals),
        outer={v: values.get(v, False) for v in outer},
        inner={val: {v: values.get(w, False) for v, w in rename.items()} for val, rename in copies},
    )
    return SolveResult(SAT, model)


def reduce_outer(problem: QuantifiedProblem, outer: Mapping[int, bool]) -> QuantifiedProblem:
    """Fix the outer existential block to ``outer`` and drop it from the prefix,
    leaving a forall-exists problem."""
    clauses = []
    for clause in problem.matrix.clauses:
        out = []
        satisfied = False
        for lit in clause:
            v = abs(lit)
            if v in outer:
                if outer[v] == (lit > 0):
                    satisfied = True
                    break
                continue
            out.append(lit)
        if not satisfied:
            clauses.append(tuple(out))
    prefix = [(q, [v for v in vs if v not in outer]) for q, vs in problem.prefix]
    return QuantifiedProblem(prefix, Cnf(problem.matrix.num_vars, clauses))


def two_step(problem: QuantifiedProblem, outer: Mapping[int, bool] | None = None, should_stop=None) -> SolveResult:
    """Synthesis-mode solving: take a top-level assignment (computed here when
    not supplied, e.g. by an external QBF solver), reduce the query to its
    forall-exists remainder and solve that for the inner Skolem tables."""
    if outer is None:
        return expand_universals(problem, should_stop)
    outer_vars, universals, _ = _split_prefix(problem)
    fixed = {v: bool(outer.get(v, False)) for v in outer_vars}
    residual = reduce_outer(problem, fixed)
    result = expand_universals(residual, should_stop)
    if not result.sat:
        return result
    model = result.model
    return SolveResult(SAT, QbfModel(universals, fixed, model.inner))

