import itertools

import pytest

from bosy import logic
from bosy.encode import EncodingContext, EncodingError, decode_machine, encode_input_symbolic, encode_propositional
from bosy.logic import EXISTS, FORALL
from bosy.ltl import parse_ltl
from bosy.machine import check_total_deterministic, machine_from_tables, model_check
from bosy.omega import UniversalCoBuchi, build_ucw
from bosy.qbf import expand_universals
from bosy.sat import solve_cnf
from bosy.specio import Semantics, SynthesisProblem, load_spec
from conftest import SUITE, SUITE_DIR
from oracles import enumerate_machines, evaluate_qbf

SMALL = [p for p in SUITE if p.stem != "arbiter_3"]


def encode(problem, bound, kind, optimize=True):
    ctx = EncodingContext.for_problem(problem, build_ucw(problem, optimize=optimize), bound)
    return (encode_propositional if kind == "sat" else encode_input_symbolic)(ctx)


def decide(system):
    if system.kind == "propositional":
        return solve_cnf(system.cnf)
    return expand_universals(system.quantified())


def test_arbiter_bounds(arbiter):
    for kind in ("sat", "qbf"):
        assert not decide(encode(arbiter, 1, kind)).sat
        system = encode(arbiter, 2, kind)
        result = decide(system)
        assert result.sat
        m = decode_machine(system, result.model)
        assert m.num_states == 2 and check_total_deterministic(m)
        assert model_check(m, system.context.automaton)


def test_no_inputs_always_g():
    p = SynthesisProblem((), ("g",), Semantics.MEALY, (), (parse_ltl("G g"),))
    for kind in ("sat", "qbf"):
        system = encode(p, 1, kind)
        m = decode_machine(system, decide(system).model)
        assert m.guards == ((logic.TRUE,),)
        assert m.output_functions == ((logic.TRUE,),)
    assert encode(p, 1, "qbf").quantified().normalized_prefix()[0][0] == EXISTS
    assert FORALL not in [q for q, _ in encode(p, 1, "qbf").quantified().normalized_prefix()]


def test_prefix_shape(arbiter):
    system = encode(arbiter, 2, "qbf")
    assert [q for q, _ in system.quantified().normalized_prefix()] == [EXISTS, FORALL, EXISTS]
    (_, outer), (_, universals), (_, inner) = system.quantified().normalized_prefix()
    keys = [system.registry.key(v) for v in outer]
    assert all(k[0] in ("lb", "lc") or k[0][0] == "lc" for k in keys)
    assert sorted(system.registry.key(v) for v in universals) == [("u", "r_0"), ("u", "r_1")]


def test_moore_outputs_are_outer():
    p = load_spec(SUITE_DIR / "arbiter_2_moore.json")
    system = encode(p, 2, "qbf")
    (_, outer), _, (_, inner) = system.quantified().normalized_prefix()
    assert {system.registry.key(v) for v in outer} >= {("o", 0, "g_0"), ("o", 1, "g_1")}
    assert not any(system.registry.key(v)[0] == "o" for v in inner)


def test_input_symbolic_has_fewer_function_variables(arbiter):
    sat, qbf = encode(arbiter, 2, "sat"), encode(arbiter, 2, "qbf")
    assert qbf.function_var_count() < sat.function_var_count()
    assert qbf.num_vars < sat.num_vars


def test_bound_and_width_guards(arbiter):
    ucw = build_ucw(arbiter)
    with pytest.raises(EncodingError):
        EncodingContext.for_problem(arbiter, ucw, 0)
    wide = tuple(f"i{k}" for k in range(17))
    with pytest.raises(EncodingError):
        EncodingContext(UniversalCoBuchi((), 1, 0, (), frozenset()), 1, wide, (), Semantics.MEALY)
    with pytest.raises(EncodingError):
        EncodingContext(ucw, 1, ("r_0",), ("g_0",), Semantics.MEALY)


def test_dag_automaton_needs_no_counters():
    p = SynthesisProblem(("r",), ("g",), Semantics.MEALY, (), (parse_ltl("X X g"),))
    ucw = build_ucw(p)
    assert all(rk == 0 for rk in ucw.rank)
    system = encode(p, 2, "sat")
    keys = [system.registry.key(v) for v in range(1, system.num_vars + 1)]
    assert not any(isinstance(k[0], tuple) and k[0][0] == "lc" for k in keys)
    assert decide(system).sat == decide(encode(p, 2, "sat", optimize=False)).sat


def test_safety_states_get_no_annotation(arbiter):
    system = encode(arbiter, 2, "sat")
    (sink,) = system.context.automaton.safety
    assert system.registry.get(("lb", 0, sink)) is None


def test_initial_safety_state_is_unsat():
    p = SynthesisProblem((), ("g",), Semantics.MEALY, (), (parse_ltl("g"),))
    ucw = UniversalCoBuchi(("g",), 1, 0, (), frozenset(), safety=frozenset({0}))
    ctx = EncodingContext.for_problem(p, ucw, 1)
    assert not decide(encode_propositional(ctx)).sat
    assert not decide(encode_input_symbolic(ctx)).sat


def test_decode_rejects_incomplete_model(arbiter):
    system = encode(arbiter, 2, "sat")
    with pytest.raises(EncodingError):
        decode_machine(system, [])


@pytest.mark.parametrize("path", SMALL, ids=lambda p: p.stem)
def test_encodings_agree_and_are_monotone(path):
    p = load_spec(path)
    seen_sat = False
    for n in range(1, 5):
        sat, qbf = decide(encode(p, n, "sat")), decide(encode(p, n, "qbf"))
        assert sat.sat == qbf.sat
        assert sat.sat or not seen_sat
        seen_sat |= sat.sat
        for system, result in ((encode(p, n, "sat"), sat), (encode(p, n, "qbf"), qbf)):
            if result.sat:
                m = decode_machine(system, result.model)
                assert check_total_deterministic(m)
                assert model_check(m, system.context.automaton)


@pytest.mark.parametrize("path", SMALL, ids=lambda p: p.stem)
def test_optimizations_do_not_change_verdicts(path):
    p = load_spec(path)
    for n in range(1, 4):
        for kind in ("sat", "qbf"):
            assert decide(encode(p, n, kind)).sat == decide(encode(p, n, kind, optimize=False)).sat


TINY = [p for p in SUITE if len(load_spec(p).signals) <= 3]


@pytest.mark.parametrize("path", TINY, ids=lambda p: p.stem)
def test_completeness_against_machine_enumeration(path):
    p = load_spec(path)
    ucw = build_ucw(p)
    moore = p.semantics is Semantics.MOORE
    for n in (1, 2):
        exists = any(
            model_check(machine_from_tables(p.inputs, p.outputs, p.semantics, nxt, outs), ucw)
            for nxt, outs in enumerate_machines(n, p.inputs, p.outputs, moore=moore)
        )
        assert decide(encode(p, n, "sat")).sat == exists


@pytest.mark.parametrize("text, bound", [("G (r -> g)", 1), ("G (r -> g)", 2), ("G (r -> F g)", 1),
                                          ("G (g -> X r)", 1), ("G (g -> X r)", 2)])
def test_small_qbf_instances_match_game_evaluator(text, bound):
    p = SynthesisProblem(("r",), ("g",), Semantics.MEALY, (), (parse_ltl(text),))
    q = encode(p, bound, "qbf").quantified()
    assert q.matrix.num_vars <= 12
    assert evaluate_qbf(q) == expand_universals(q).sat == decide(encode(p, bound, "sat")).sat


def test_emitted_documents_are_stable(arbiter):
    assert encode(arbiter, 2, "sat").dimacs() == encode(arbiter, 2, "sat").dimacs()
    assert encode(arbiter, 2, "qbf").qdimacs() == encode(arbiter, 2, "qbf").qdimacs()
