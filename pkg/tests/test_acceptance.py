"""End-to-end acceptance checks; each test prints one PASS/FAIL line."""

import contextlib
import random
import time

import pytest

from bosy import ltl as L
from bosy.emit import emit_aiger, emit_smv
from bosy.encode import EncodingContext, encode_input_symbolic, encode_propositional
from bosy.logic import QuantifiedProblem
from bosy.machine import machine_from_tables, model_check
from bosy.omega import build_ucw, ltl_to_nba
from bosy.qbf import expand_universals
from bosy.sat import UNSAT, solve_cnf
from bosy.search import REALIZABLE, UNREALIZABLE, Options, SearchStrategy, run_dual, run_single
from bosy.specio import Semantics, load_spec
from conftest import SUITE, SUITE_DIR
from oracles import (Aiger, LassoBatch, Smv, all_lassos, enumerate_machines, evaluate_cnf, evaluate_qbf,
                     formula_corpus, input_words, machine_satisfies_on, nba_lasso_verdicts)
from test_emit import FIG4B
from test_qbf import random_eae
from test_sat import pigeonhole, random_cnf

LINEAR_4 = SearchStrategy("linear", 1, 4)


@pytest.fixture
def criterion(capsys):
    """Context manager printing one PASS/FAIL line for a criterion."""
    @contextlib.contextmanager
    def run(number, title):
        notes = []
        try:
            yield notes
        except BaseException:
            with capsys.disabled():
                print(f"\nACCEPTANCE {number} FAIL: {title}")
            raise
        with capsys.disabled():
            extra = f" ({'; '.join(notes)})" if notes else ""
            print(f"\nACCEPTANCE {number} PASS: {title}{extra}")
    return run


@pytest.fixture(scope="module")
def suite_runs():
    """Dual-search verdicts per (backend, optimize) over the bundled suite, n <= 4."""
    runs, clocks = {}, {}
    for backend, optimize in (("sat", True), ("qbf", True), ("qbf", False)):
        started = time.monotonic()
        options = Options(backend=backend, optimize=optimize)
        runs[backend, optimize] = {p.stem: run_dual(load_spec(p), LINEAR_4, options) for p in SUITE}
        clocks[backend, optimize] = time.monotonic() - started
    return runs, clocks


def test_arbiter_end_to_end(criterion, arbiter):
    with criterion(1, "arbiter realizable, first-sat bound 2 (linear), bound 1 refuted, verified, < 10 s") as notes:
        started = time.monotonic()
        verdict = run_single(arbiter, SearchStrategy("linear"), Options())
        elapsed = time.monotonic() - started
        assert verdict.outcome == REALIZABLE
        assert verdict.history == [(1, False), (2, True)]
        assert verdict.machine.num_states == 2
        assert model_check(verdict.machine, verdict.automaton)
        assert elapsed < 10
        # bound 1: no single-state Mealy machine implements the arbiter
        lassos = all_lassos(2, 3)
        count = 0
        for nxt, outs in enumerate_machines(1, arbiter.inputs, arbiter.outputs):
            m = machine_from_tables(arbiter.inputs, arbiter.outputs, Semantics.MEALY, nxt, outs)
            assert not model_check(m, verdict.automaton)
            assert not machine_satisfies_on(m, arbiter.formula(), lassos, arbiter.signals)
            count += 1
        assert count == 256
        notes.append(f"{elapsed:.2f} s, {count} one-state machines refuted")


def test_output_conformance(criterion, arbiter):
    with criterion(2, "SMV structurally and trace-equivalent to the reference, AIGER 2/1/2 co-simulates") as notes:
        m = run_single(arbiter, SearchStrategy("linear"), Options()).machine
        smv_text = emit_smv(m)
        ours, ref = Smv(smv_text), Smv(FIG4B)
        assert len(ours.states) == len(ref.states) == 2
        assert len(ours.cases) == len(ref.cases)
        assert [name for name, _ in ours.defines] == [name for name, _ in ref.defines]
        assert ours.inputs == ref.inputs
        aig = Aiger(emit_aiger(m))
        assert (aig.I, aig.L, aig.O) == (2, 1, 2)
        words = 0
        for length in range(1, 7):
            for word in input_words(m.inputs, length):
                expected = m.run(word)
                assert ours.simulate(word) == ref.simulate(word) == expected
                assert aig.simulate(word) == expected
                words += 1
        notes.append(f"{words} input sequences, SMV text identical: {smv_text == FIG4B}")


def test_encoding_cross_check(criterion, suite_runs):
    with criterion(3, f"SAT and QBF agree on {len(SUITE)} specs for n <= 4, QBF arbiter instance smaller") as notes:
        runs, clocks = suite_runs
        assert len(SUITE) >= 20
        for name in runs["sat", True]:
            s, q = runs["sat", True][name], runs["qbf", True][name]
            assert (s.outcome, s.bound, s.player) == (q.outcome, q.bound, q.player), name
        assert clocks["sat", True] + clocks["qbf", True] < 300
        arbiter = load_spec(SUITE_DIR / "arbiter_2.json")
        ctx = EncodingContext.for_problem(arbiter, build_ucw(arbiter), 2)
        sat_vars, qbf_vars = encode_propositional(ctx).num_vars, encode_input_symbolic(ctx).num_vars
        assert qbf_vars < sat_vars
        notes.append(f"wall clock sat {clocks['sat', True]:.1f} s, qbf {clocks['qbf', True]:.1f} s")
        notes.append(f"arbiter n=2 variables sat {sat_vars}, qbf {qbf_vars}")


def test_duality(criterion, suite_runs):
    with criterion(4, "dual search decides every suite spec and the winner's machine is verified") as notes:
        runs, _ = suite_runs
        tally = {REALIZABLE: 0, UNREALIZABLE: 0}
        for name, verdict in runs["qbf", True].items():
            assert verdict.outcome in tally, name
            assert verdict.machine is not None and verdict.automaton is not None
            assert model_check(verdict.machine, verdict.automaton), name
            tally[verdict.outcome] += 1
        notes.append(f"{tally[REALIZABLE]} realizable, {tally[UNREALIZABLE]} unrealizable")


def test_translator_correctness(criterion):
    with criterion(5, "tableau NBA matches lasso semantics on the size <= 5 corpus and the arbiter guarantees") as notes:
        arbiter = load_spec(SUITE_DIR / "arbiter_2.json")
        lassos = all_lassos(2, 4)
        mismatches = checked = 0
        batches = {}
        for f in formula_corpus(5) + list(arbiter.guarantees):
            signals = tuple(sorted(f.atoms())) if f.atoms() - {"a", "b"} else ("a", "b")
            batch = batches.get(signals) or batches.setdefault(signals, LassoBatch(lassos, signals))
            got = nba_lasso_verdicts(ltl_to_nba(f, signals), lassos)
            mismatches += got != batch.verdicts(f)
            checked += 1
        negated = L.Not(arbiter.formula())
        wide = all_lassos(4, 4)
        mismatches += nba_lasso_verdicts(ltl_to_nba(negated, arbiter.signals), wide) != \
            LassoBatch(wide, arbiter.signals).verdicts(negated)
        assert mismatches == 0
        notes.append(f"{checked} formulas on {len(lassos)} lassos, negated arbiter on {len(wide)} lassos")


def test_optimization_neutrality(criterion, suite_runs, arbiter):
    with criterion(6, "optimize none vs all: same verdicts and bounds, optimized arbiter encoding no larger") as notes:
        runs, _ = suite_runs
        for name, opt in runs["qbf", True].items():
            plain = runs["qbf", False][name]
            assert (opt.outcome, opt.bound, opt.player) == (plain.outcome, plain.bound, plain.player), name
        for encode in (encode_propositional, encode_input_symbolic):
            sizes = [encode(EncodingContext.for_problem(arbiter, build_ucw(arbiter, optimize=o), 2)).num_clauses
                     for o in (True, False)]
            assert sizes[0] <= sizes[1]
            notes.append(f"{encode.__name__} clauses {sizes[0]} vs {sizes[1]}")


def test_solver_core(criterion):
    with criterion(7, "CDCL vs truth tables, pigeonhole(4,3) < 1 s, universal expansion vs game evaluator") as notes:
        rng = random.Random(7)
        for _ in range(1000):
            cnf = random_cnf(rng)
            result = solve_cnf(cnf)
            assert result.sat == evaluate_cnf(cnf.num_vars, cnf.clauses)
            if result.sat:
                assert cnf.satisfied_by(result.model)
        started = time.monotonic()
        assert solve_cnf(pigeonhole(4, 3)).verdict == UNSAT
        php = time.monotonic() - started
        assert php < 1
        for _ in range(500):
            q = random_eae(rng)
            assert isinstance(q, QuantifiedProblem)
            assert expand_universals(q).sat == evaluate_qbf(q)
        notes.append(f"pigeonhole(4,3) in {php * 1000:.0f} ms")
