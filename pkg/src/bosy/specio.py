"""JSON specification input and the system/environment synthesis problems."""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

from .ltl import Ltl, LtlSyntaxError, Not, conjunction, Implies, parse_ltl


class SpecError(ValueError):
    pass


class Semantics(str, Enum):
    MEALY = "mealy"
    MOORE = "moore"

    def dual(self) -> "Semantics":
        return Semantics.MOORE if self is Semantics.MEALY else Semantics.MEALY


class Player(str, Enum):
    SYSTEM = "system"
    ENVIRONMENT = "environment"


@dataclass(frozen=True)
class SynthesisProblem:
    """Signal partition, target semantics and LTL formulas of one player.

    ``inputs`` are the signals the player observes and ``outputs`` those it
    controls.  For the environment player these are the system's outputs
    and inputs respectively.
    """

    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    semantics: Semantics
    assumptions: tuple[Ltl, ...] = ()
    guarantees: tuple[Ltl, ...] = ()
    player: Player = Player.SYSTEM

    def __post_init__(self):
        _check_signals(self.inputs, self.outputs)
        declared = set(self.inputs) | set(self.outputs)
        for f in self.assumptions + self.guarantees:
            undeclared = f.atoms() - declared
            if undeclared:
                raise SpecError(f"undeclared atom {sorted(undeclared)[0]!r} in {f}")

    @property
    def signals(self) -> tuple[str, ...]:
        return self.inputs + self.outputs

    def formula(self) -> Ltl:
        return combine(self)


def _check_signals(inputs, outputs):
    seen = set()
    for name in list(inputs) + list(outputs):
        if not isinstance(name, str) or not name:
            raise SpecError(f"invalid signal name {name!r}")
        if name in seen:
            raise SpecError(f"duplicate signal {name!r}")
        seen.add(name)


def parse_spec(text: str) -> SynthesisProblem:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecError(f"malformed JSON: {e}") from e
    if not isinstance(doc, dict):
        raise SpecError("specification must be a JSON object")
    for key in ("semantics", "inputs", "outputs", "guarantees"):
        if key not in doc:
            raise SpecError(f"missing key {key!r}")
    try:
        semantics = Semantics(doc["semantics"])
    except ValueError:
        raise SpecError(f"unknown semantics {doc['semantics']!r}") from None

    def formulas(key):
        items = doc.get(key, [])
        if not isinstance(items, list):
            raise SpecError(f"{key!r} must be a list of LTL strings")
        result = []
        for item in items:
            if not isinstance(item, str):
                raise SpecError(f"{key!r} must contain strings, got {item!r}")
            try:
                result.append(parse_ltl(item))
            except LtlSyntaxError as e:
                raise SpecError(f"in {key}: {e}") from e
        return tuple(result)

    for key in ("inputs", "outputs"):
        if not isinstance(doc[key], list):
            raise SpecError(f"{key!r} must be a list of signal names")
    return SynthesisProblem(
        inputs=tuple(doc["inputs"]),
        outputs=tuple(doc["outputs"]),
        semantics=semantics,
        assumptions=formulas("assumptions"),
        guarantees=formulas("guarantees"),
    )


def load_spec(path) -> SynthesisProblem:
    with open(path, encoding="utf-8") as fh:
        return parse_spec(fh.read())


def combine(problem: SynthesisProblem) -> Ltl:
    """``(/\\ assumptions) -> (/\\ guarantees)``; without assumptions just the guarantees."""
    guarantees = conjunction(list(problem.guarantees))
    if not problem.assumptions:
        return guarantees
    return Implies(conjunction(list(problem.assumptions)), guarantees)


def dualize(problem: SynthesisProblem) -> SynthesisProblem:
    """The environment's problem: realize the negated formula with swapped
    signal roles under the dual semantics."""
    if problem.player is not Player.SYSTEM:
        raise SpecError("only a system-player problem can be dualized")
    return SynthesisProblem(
        inputs=problem.outputs,
        outputs=problem.inputs,
        semantics=problem.semantics.dual(),
        assumptions=(),
        guarantees=(Not(combine(problem)),),
        player=Player.ENVIRONMENT,
    )
