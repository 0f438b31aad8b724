import sys
import textwrap
from pathlib import Path

import pytest

import bosy
from bosy.machine import machine_from_tables
from bosy.specio import Semantics, load_spec

SUITE_DIR = Path(bosy.__file__).parent / "suite"
SUITE = sorted(SUITE_DIR.glob("*.json"))


@pytest.fixture
def arbiter():
    return load_spec(SUITE_DIR / "arbiter_2.json")


@pytest.fixture
def alternating_grants():
    """The two-state arbiter: grant g_1 in s0, g_0 in s1, ignore requests."""
    return machine_from_tables(("r_0", "r_1"), ("g_0", "g_1"), Semantics.MEALY,
                               [[1] * 4, [0] * 4], [[0b10] * 4, [0b01] * 4])


@pytest.fixture
def make_script(tmp_path):
    """Write an executable Python script and return a shell command running it."""
    def make(name, body):
        path = tmp_path / name
        path.write_text(textwrap.dedent(body))
        return f"{sys.executable} {path}"
    return make
