"""Bound search: the per-player bound loop and the dual realizability race."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Iterator

from .encode import ConstraintSystem, EncodingContext, decode_machine, encode_input_symbolic, encode_propositional
from .external import solve_external, translate_external
from .machine import Machine, model_check, simplify
from .omega import UniversalCoBuchi, build_ucw
from .qbf import two_step
from .sat import solve_cnf
from .specio import Player, SynthesisProblem, dualize

log = logging.getLogger(__name__)

REALIZABLE = "realizable"
UNREALIZABLE = "unrealizable"
UNKNOWN = "unknown"


class SynthesisError(RuntimeError):
    pass


@dataclass(frozen=True)
class SearchStrategy:
    kind: str = "exponential"
    initial: int = 1
    cap: int | None = None

    def __post_init__(self):
        if self.kind not in ("linear", "exponential"):
            raise ValueError(f"unknown search strategy {self.kind!r}")
        if self.initial < 1:
            raise ValueError("initial bound must be positive")

    def next(self, bound: int) -> int:
        return bound + 1 if self.kind == "linear" else 2 * bound

    def bounds(self) -> Iterator[int]:
        b = self.initial
        while self.cap is None or b <= self.cap:
            yield b
            b = self.next(b)


@dataclass
class Verdict:
    outcome: str
    machine: Machine | None = None
    bound: int | None = None
    player: Player = Player.SYSTEM
    automaton: UniversalCoBuchi | None = field(default=None, repr=False)
    history: list[tuple[int, bool]] = field(default_factory=list)


class Backend:
    """Encodes and solves one bound at a time for a fixed problem and automaton."""

    name = "abstract"

    def __init__(self, problem: SynthesisProblem, automaton: UniversalCoBuchi,
                 external_cmd: str | None = None, should_stop: Callable[[], bool] | None = None):
        self.problem = problem
        self.automaton = automaton
        self.external_cmd = external_cmd
        self.should_stop = should_stop
        self.system: ConstraintSystem | None = None
        self._model = None

    def encode(self, bound: int) -> ConstraintSystem:
        raise NotImplementedError

    def solve(self, bound: int) -> bool:
        raise NotImplementedError

    def extract_solution(self) -> Machine:
        if self.system is None or self._model is None:
            raise SynthesisError("extract_solution called without a satisfiable query")
        return decode_machine(self.system, self._model)


class SatBackend(Backend):
    name = "sat"

    def encode(self, bound: int) -> ConstraintSystem:
        ctx = EncodingContext.for_problem(self.problem, self.automaton, bound)
        return encode_propositional(ctx)

    def solve(self, bound: int) -> bool:
        self.system = self.encode(bound)
        self._model = None
        if self.external_cmd:
            result = solve_external(self.external_cmd, self.system.dimacs(), "dimacs",
                                    should_stop=self.should_stop)
        else:
            result = solve_cnf(self.system.cnf, self.should_stop)
        if result.sat:
            self._model = result.model
        return result.sat


class QbfBackend(Backend):
    name = "qbf"

    def encode(self, bound: int) -> ConstraintSystem:
        ctx = EncodingContext.for_problem(self.problem, self.automaton, bound)
        return encode_input_symbolic(ctx)

    def solve(self, bound: int) -> bool:
        self.system = self.encode(bound)
        self._model = None
        self._outer = None
        query = self.system.quantified()
        if self.external_cmd:
            result = solve_external(self.external_cmd, self.system.qdimacs(), "qdimacs",
                                    should_stop=self.should_stop)
            if result.sat:
                self._outer = result.model
            return result.sat
        result = two_step(query, should_stop=self.should_stop)
        if result.sat:
            self._model = result.model
        return result.sat

    def extract_solution(self) -> Machine:
        if self._model is None and self._outer is not None:
            # second step: fix the solver's top-level assignment, solve the forall-exists rest
            result = two_step(self.system.quantified(), self._outer, self.should_stop)
            if not result.sat:
                raise SynthesisError("top-level assignment from the external solver does not extend to a solution")
            self._model = result.model
        return super().extract_solution()


BACKENDS = {"sat": SatBackend, "qbf": QbfBackend}


@dataclass
class Options:
    backend: str = "qbf"
    synthesize: bool = True
    optimize: bool = True
    external_sat: str | None = None
    external_qbf: str | None = None
    translator: str | None = None
    verify: bool = True
    simplify: bool = True


def _automaton(problem: SynthesisProblem, options: Options) -> UniversalCoBuchi:
    translator = None
    if options.translator:
        cmd = options.translator

        def translator(formula, signals):
            return translate_external(cmd, formula, signals)
    return build_ucw(problem, optimize=options.optimize, translator=translator)


def _steps(problem: SynthesisProblem, strategy: SearchStrategy, options: Options,
           should_stop=None) -> Iterator[Verdict | None]:
    """Yield ``None`` after every unsatisfiable bound, then the final verdict."""
    started = time.monotonic()
    automaton = _automaton(problem, options)
    log.info("%s: automaton with %d states (%d rejecting, %d safety)", problem.player.value,
             automaton.num_states, len(automaton.rejecting), len(automaton.safety))
    cls = BACKENDS[options.backend]
    external = options.external_sat if options.backend == "sat" else options.external_qbf
    backend = cls(problem, automaton, external, should_stop)
    history: list[tuple[int, bool]] = []
    for bound in strategy.bounds():
        sat = backend.solve(bound)
        history.append((bound, sat))
        log.info("%s: bound %d -> %s (%d vars, %d clauses, %.2fs)", problem.player.value, bound,
                 "sat" if sat else "unsat", backend.system.num_vars, backend.system.num_clauses,
                 time.monotonic() - started)
        if sat:
            machine = None
            if options.synthesize:
                machine = backend.extract_solution()
                if options.simplify:
                    machine = simplify(machine, automaton)
                if options.verify and not model_check(machine, automaton):
                    raise SynthesisError("extracted machine violates the specification automaton")
            yield Verdict(REALIZABLE, machine, bound, problem.player, automaton, history)
            return
        yield None
    yield Verdict(UNKNOWN, None, None, problem.player, automaton, history)


def run_single(problem: SynthesisProblem, strategy: SearchStrategy = SearchStrategy(),
               options: Options | None = None, should_stop=None) -> Verdict:
    """Search bounds for ``problem``'s player; ``realizable`` means that player wins."""
    options = options or Options()
    for step in _steps(problem, strategy, options, should_stop):
        if step is not None:
            return step
    raise AssertionError("search ended without a verdict")


def run_dual(problem: SynthesisProblem, strategy: SearchStrategy = SearchStrategy(),
             options: Options | None = None) -> Verdict:
    """Search for a system strategy and an environment counter-strategy.

    The two searches alternate one bound at a time; the first satisfiable
    side decides.  A counter-strategy yields ``unrealizable`` together with
    the environment machine.
    """
    if problem.player is not Player.SYSTEM:
        raise ValueError("dual search starts from the system player's problem")
    options = options or Options()
    sides = {
        Player.SYSTEM: _steps(problem, strategy, options),
        Player.ENVIRONMENT: _steps(dualize(problem), strategy, options),
    }
    finished: dict[Player, Verdict] = {}
    while len(finished) < 2:
        for player, gen in sides.items():
            if player in finished:
                continue
            step = next(gen)
            if step is None:
                continue
            if step.outcome == REALIZABLE:
                for other, g in sides.items():
                    if other is not player:
                        g.close()
                if player is Player.SYSTEM:
                    return step
                step.outcome = UNREALIZABLE
                return step
            finished[player] = step
    return Verdict(UNKNOWN, None, None, Player.SYSTEM)
