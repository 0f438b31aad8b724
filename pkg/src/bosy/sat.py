"""A CDCL SAT solver.

Two watched literals, first-UIP learning with local clause minimization,
VSIDS branching (ties broken by the lowest variable), phase saving, Luby
restarts and periodic deletion of learnt clauses ranked by LBD and activity.
The search is fully deterministic.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable, Sequence

from .logic import Cnf

SAT = "sat"
UNSAT = "unsat"


@dataclass
class SolveResult:
    verdict: str
    model: object = None

    def __post_init__(self):
        if self.verdict not in (SAT, UNSAT):
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if (self.model is not None) != (self.verdict == SAT):
            raise ValueError("a model is present exactly for sat results")

    @property
    def sat(self) -> bool:
        return self.verdict == SAT


def luby(i: int) -> int:
    """The i-th element (1-based) of the Luby sequence 1 1 2 1 1 2 4 ..."""
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    while (1 << k) - 1 != i:
        i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i:
            k += 1
    return 1 << (k - 1)


class Interrupted(Exception):
    """Raised when the ``should_stop`` callback asks the solver to give up."""


class CdclSolver:
    RESTART_BASE = 64
    REDUCE_INTERVAL = 2000
    VAR_DECAY = 0.95
    CLAUSE_DECAY = 0.999

    def __init__(self, num_vars: int, clauses: Iterable[Sequence[int]], should_stop=None):
        n = num_vars
        for c in clauses:
            for lit in c:
                n = max(n, abs(lit))
        self.n = n
        self.should_stop = should_stop
        size = 2 * n + 1
        # literal-indexed arrays rely on negative indexing: index -l lands in the upper half
        self.value = [0] * size
        self.watches: list[list[int]] = [[] for _ in range(size)]
        self.level = [0] * (n + 1)
        self.reason: list[int] = [-1] * (n + 1)
        self.activity = [0.0] * (n + 1)
        self.phase = [False] * (n + 1)
        self.var_inc = 1.0
        self.cla_inc = 1.0
        self.clauses: list[list[int] | None] = []
        self.learnt: list[int] = []
        self.cla_activity: dict[int, float] = {}
        self.lbd: dict[int, int] = {}
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.heap = [(0.0, v) for v in range(1, n + 1)]
        self.ok = True
        self.conflicts = 0
        for c in clauses:
            self._add_input_clause(c)

    # -- setup -------------------------------------------------------------

    def _add_input_clause(self, lits: Sequence[int]) -> None:
        if not self.ok:
            return
        clause = []
        seen = set()
        for lit in lits:
            if -lit in seen:
                return  # tautology
            if lit not in seen:
                seen.add(lit)
                clause.append(lit)
        clause = [lit for lit in clause if self.value[lit] != -1]
        if any(self.value[lit] == 1 for lit in clause):
            return
        if not clause:
            self.ok = False
            return
        if len(clause) == 1:
            self._enqueue(clause[0], -1)
            if self._propagate() != -1:
                self.ok = False
            return
        self._attach(clause)

    def _attach(self, clause: list[int]) -> int:
        ci = len(self.clauses)
        self.clauses.append(clause)
        self.watches[clause[0]].append(ci)
        self.watches[clause[1]].append(ci)
        return ci

    # -- core --------------------------------------------------------------

    def _enqueue(self, lit: int, reason: int) -> None:
        v = lit if lit > 0 else -lit
        self.value[lit] = 1
        self.value[-lit] = -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _propagate(self) -> int:
        """Unit propagation; returns the index of a conflicting clause or -1."""
        value = self.value
        watches = self.watches
        clauses = self.clauses
        trail = self.trail
        level = self.level
        reason = self.reason
        dl = len(self.trail_lim)
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            false_lit = -p
            ws = watches[false_lit]
            i = j = 0
            end = len(ws)
            while i < end:
                ci = ws[i]
                i += 1
                c = clauses[ci]
                if c is None:
                    continue
                if c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                if value[first] == 1:
                    ws[j] = ci
                    j += 1
                    continue
                for k in range(2, len(c)):
                    lk = c[k]
                    if value[lk] != -1:
                        c[1] = lk
                        c[k] = false_lit
                        watches[lk].append(ci)
                        break
                else:
                    ws[j] = ci
                    j += 1
                    if value[first] == -1:
                        while i < end:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        return ci
                    value[first] = 1
                    value[-first] = -1
                    v = first if first > 0 else -first
                    level[v] = dl
                    reason[v] = ci
                    trail.append(first)
            del ws[j:]
        return -1

    def _bump_var(self, v: int) -> None:
        act = self.activity[v] + self.var_inc
        self.activity[v] = act
        if act > 1e100:
            for u in range(1, self.n + 1):
                self.activity[u] *= 1e-100
            self.var_inc *= 1e-100
            self.heap = [(-self.activity[u], u) for u in range(1, self.n + 1) if self.value[u] == 0]
            heapq.heapify(self.heap)
        else:
            heapq.heappush(self.heap, (-act, v))

    def _bump_clause(self, ci: int) -> None:
        if ci in self.cla_activity:
            act = self.cla_activity[ci] + self.cla_inc
            self.cla_activity[ci] = act
            if act > 1e20:
                for k in self.cla_activity:
                    self.cla_activity[k] *= 1e-20
                self.cla_inc *= 1e-20

    def _analyze(self, confl: int) -> tuple[list[int], int]:
        seen = set()
        learnt = [0]
        counter = 0
        p = 0
        idx = len(self.trail) - 1
        dl = len(self.trail_lim)
        level = self.level
        while True:
            self._bump_clause(confl)
            c = self.clauses[confl]
            for q in (c if p == 0 else c[1:]):
                v = q if q > 0 else -q
                if v not in seen and level[v] > 0:
                    seen.add(v)
                    self._bump_var(v)
                    if level[v] >= dl:
                        counter += 1
                    else:
                        learnt.append(q)
            while True:
                lit = self.trail[idx]
                if (lit if lit > 0 else -lit) in seen:
                    break
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            pv = p if p > 0 else -p
            confl = self.reason[pv]
            seen.discard(pv)
            counter -= 1
            if counter == 0:
                break
        learnt[0] = -p
        # local minimization: drop literals implied by the rest of the clause
        in_clause = {abs(q) for q in learnt}
        kept = [learnt[0]]
        for q in learnt[1:]:
            r = self.reason[abs(q)]
            if r == -1:
                kept.append(q)
                continue
            rc = self.clauses[r]
            if all(abs(x) in in_clause or level[abs(x)] == 0 for x in rc[1:]):
                continue
            kept.append(q)
        learnt = kept
        if len(learnt) == 1:
            return learnt, 0
        best = 1
        for k in range(2, len(learnt)):
            if level[abs(learnt[k])] > level[abs(learnt[best])]:
                best = k
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, level[abs(learnt[1])]

    def _cancel_until(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        start = self.trail_lim[lvl]
        value = self.value
        for k in range(len(self.trail) - 1, start - 1, -1):
            lit = self.trail[k]
            v = lit if lit > 0 else -lit
            value[lit] = 0
            value[-lit] = 0
            self.phase[v] = lit > 0
            self.reason[v] = -1
            heapq.heappush(self.heap, (-self.activity[v], v))
        del self.trail[start:]
        del self.trail_lim[lvl:]
        self.qhead = start

    def _pick_branch(self) -> int:
        heap = self.heap
        value = self.value
        activity = self.activity
        while heap:
            neg_act, v = heapq.heappop(heap)
            if value[v] == 0 and -neg_act == activity[v]:
                return v if self.phase[v] else -v
        for v in range(1, self.n + 1):
            if value[v] == 0:
                return v if self.phase[v] else -v
        return 0

    def _reduce_db(self) -> None:
        locked = set()
        for lit in self.trail:
            r = self.reason[abs(lit)]
            if r != -1:
                locked.add(r)
        candidates = [ci for ci in self.learnt if self.clauses[ci] is not None
                      and len(self.clauses[ci]) > 2 and self.lbd[ci] > 2 and ci not in locked]
        candidates.sort(key=lambda ci: (-self.lbd[ci], self.cla_activity[ci], ci))
        for ci in candidates[: len(candidates) // 2]:
            self.clauses[ci] = None
            del self.cla_activity[ci]
            del self.lbd[ci]
        self.learnt = [ci for ci in self.learnt if self.clauses[ci] is not None]

    def solve(self) -> SolveResult:
        if not self.ok or self._propagate() != -1:
            self.ok = False
            return SolveResult(UNSAT)
        restart_count = 1
        conflicts_left = luby(restart_count) * self.RESTART_BASE
        next_reduce = self.REDUCE_INTERVAL
        while True:
            confl = self._propagate()
            if confl != -1:
                self.conflicts += 1
                conflicts_left -= 1
                if not self.trail_lim:
                    self.ok = False
                    return SolveResult(UNSAT)
                learnt, back = self._analyze(confl)
                self._cancel_until(back)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], -1)
                else:
                    ci = self._attach(learnt)
                    self.learnt.append(ci)
                    self.cla_activity[ci] = self.cla_inc
                    self.lbd[ci] = len({self.level[abs(q)] for q in learnt})
                    self._enqueue(learnt[0], ci)
                self.var_inc /= self.VAR_DECAY
                self.cla_inc /= self.CLAUSE_DECAY
                if self.should_stop is not None and self.conflicts % 256 == 0 and self.should_stop():
                    raise Interrupted()
                continue
            if conflicts_left <= 0:
                restart_count += 1
                conflicts_left = luby(restart_count) * self.RESTART_BASE
                self._cancel_until(0)
            if self.conflicts >= next_reduce:
                next_reduce += self.REDUCE_INTERVAL
                self._reduce_db()
            lit = self._pick_branch()
            if lit == 0:
                model = [v if self.value[v] == 1 else -v for v in range(1, self.n + 1)]
                return SolveResult(SAT, model)
            self.trail_lim.append(len(self.trail))
            self._enqueue(lit, -1)


def solve_cnf(cnf: Cnf, should_stop=None) -> SolveResult:
    """Decide ``cnf``; a sat result carries a full model as signed literals."""
    solver = CdclSolver(cnf.num_vars, cnf.clauses, should_stop)
    result = solver.solve()
    if result.sat:
        assert cnf.satisfied_by(result.model), "solver returned a non-model"
    return result
