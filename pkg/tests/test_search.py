import pytest

from bosy import search
from bosy.ltl import parse_ltl
from bosy.machine import model_check
from bosy.omega import build_ucw
from bosy.search import (REALIZABLE, UNKNOWN, UNREALIZABLE, Options, SearchStrategy, run_dual, run_single)
from bosy.specio import Player, Semantics, SynthesisProblem, dualize, load_spec
from conftest import SUITE, SUITE_DIR


def test_strategy_bounds():
    assert list(SearchStrategy("linear", 1, 4).bounds()) == [1, 2, 3, 4]
    assert list(SearchStrategy("exponential", 1, 9).bounds()) == [1, 2, 4, 8]
    assert list(SearchStrategy("exponential", 3, 3).bounds()) == [3]
    for kind in ("linear", "exponential"):
        s = SearchStrategy(kind)
        assert all(s.next(b) > b for b in range(1, 50))
    with pytest.raises(ValueError):
        SearchStrategy("random")
    with pytest.raises(ValueError):
        SearchStrategy("linear", 0)


@pytest.mark.parametrize("backend", ["sat", "qbf"])
def test_arbiter_linear(arbiter, backend):
    v = run_single(arbiter, SearchStrategy("linear"), Options(backend=backend))
    assert (v.outcome, v.bound, v.history) == (REALIZABLE, 2, [(1, False), (2, True)])
    assert model_check(v.machine, v.automaton)


def test_always_g_without_inputs():
    p = SynthesisProblem((), ("g",), Semantics.MEALY, (), (parse_ltl("G g"),))
    assert run_single(p).bound == 1


def test_cap_gives_unknown(arbiter):
    v = run_single(arbiter, SearchStrategy("linear", cap=1))
    assert v.outcome == UNKNOWN and v.machine is None and v.bound is None


def test_verdict_without_synthesis(arbiter):
    v = run_single(arbiter, options=Options(synthesize=False))
    assert v.outcome == REALIZABLE and v.machine is None


def test_dual_arbiter(arbiter):
    v = run_dual(arbiter)
    assert (v.outcome, v.bound, v.player) == (REALIZABLE, 2, Player.SYSTEM)


def test_dual_eventually_input():
    p = load_spec(SUITE_DIR / "eventually_input.json")
    v = run_dual(p)
    assert v.outcome == UNREALIZABLE and v.player is Player.ENVIRONMENT and v.bound == 1
    m = v.machine
    assert m.semantics is Semantics.MOORE and m.num_states == 1 and m.outputs == ("r",)
    # the counter-strategy keeps r low forever, whatever the system does
    assert all(step["r"] is False for step in m.run([{"g": b} for b in (True, False, True, True)]))


def test_dual_false():
    p = SynthesisProblem(("r",), ("g",), Semantics.MEALY, (), (parse_ltl("false"),))
    v = run_dual(p)
    assert (v.outcome, v.bound) == (UNREALIZABLE, 1)


def test_dual_both_capped():
    p = load_spec(SUITE_DIR / "predict_input.json")
    assert run_dual(p, SearchStrategy("linear", cap=1)).outcome == UNKNOWN
    assert run_dual(p, SearchStrategy("linear", cap=2)).outcome == UNREALIZABLE


def test_dual_requires_system_problem(arbiter):
    with pytest.raises(ValueError):
        run_dual(dualize(arbiter))


def test_environment_single_player():
    p = dualize(load_spec(SUITE_DIR / "guarantee_false.json"))
    assert run_single(p).outcome == REALIZABLE


SMALL = [p for p in SUITE if p.stem != "arbiter_3"]


@pytest.mark.parametrize("path", SMALL, ids=lambda p: p.stem)
def test_strategies_agree(path):
    p = load_spec(path)
    lin = run_dual(p, SearchStrategy("linear", cap=4), Options(backend="sat"))
    exp = run_dual(p, SearchStrategy("exponential", cap=8), Options(backend="sat"))
    assert lin.outcome == exp.outcome
    assert lin.player == exp.player
    assert lin.bound <= exp.bound <= 2 * lin.bound
    again = run_dual(p, SearchStrategy("linear", cap=4), Options(backend="sat"))
    assert (again.outcome, again.bound, again.machine) == (lin.outcome, lin.bound, lin.machine)
    winner = p if lin.player is Player.SYSTEM else dualize(p)
    assert model_check(lin.machine, build_ucw(winner))


def test_extracted_machine_is_verified(arbiter, monkeypatch):
    monkeypatch.setattr(search, "model_check", lambda m, a: False)
    with pytest.raises(search.SynthesisError):
        run_single(arbiter)
