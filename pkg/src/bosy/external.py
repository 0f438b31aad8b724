"""Subprocess adapters for external SAT/QBF solvers and LTL translators."""

from __future__ import annotations

import logging
import os
import shlex
import subprocess
import tempfile
import time
from typing import Sequence

from .ltl import Ltl, pretty
from .omega import UniversalCoBuchi, parse_hoa
from .sat import SAT, UNSAT, SolveResult

log = logging.getLogger(__name__)

SAT_EXIT = 10
UNSAT_EXIT = 20


class ExternalToolError(RuntimeError):
    pass


def _command(template: str, placeholder: str, value: str) -> list[str]:
    argv = shlex.split(template)
    if not argv:
        raise ExternalToolError("empty command template")
    if any(placeholder in arg for arg in argv):
        return [arg.replace(placeholder, value) for arg in argv]
    return argv + [value]


def _run(argv: Sequence[str], timeout: float | None, should_stop) -> tuple[int, str]:
    log.debug("running %s", " ".join(shlex.quote(a) for a in argv))
    try:
        proc = subprocess.Popen(argv, stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True)
    except OSError as e:
        raise ExternalToolError(f"cannot start {argv[0]!r}: {e}") from e
    deadline = None if timeout is None else time.monotonic() + timeout
    try:
        while True:
            try:
                out, _ = proc.communicate(timeout=0.05)
                return proc.returncode, out
            except subprocess.TimeoutExpired:
                if deadline is not None and time.monotonic() > deadline:
                    raise ExternalToolError(f"{argv[0]!r} timed out after {timeout}s") from None
                if should_stop is not None and should_stop():
                    raise ExternalToolError(f"{argv[0]!r} cancelled") from None
    finally:
        if proc.poll() is None:
            proc.kill()
            proc.communicate()


def solve_external(cmd: str, instance: str, fmt: str = "dimacs", timeout: float | None = None,
                   should_stop=None) -> SolveResult:
    """Run a solver on ``instance`` written to a temporary file.

    ``{file}`` in ``cmd`` is replaced by the path (appended if absent).  Exit
    status 10 means sat, 20 unsat.  For DIMACS the model comes from ``v``
    lines; for QDIMACS the top-level assignment from ``V`` lines, returned as
    ``{variable: value}``.
    """
    if fmt not in ("dimacs", "qdimacs"):
        raise ValueError(f"unknown instance format {fmt!r}")
    suffix = ".cnf" if fmt == "dimacs" else ".qdimacs"
    fd, path = tempfile.mkstemp(suffix=suffix, prefix="bosy-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(instance)
        status, out = _run(_command(cmd, "{file}", path), timeout, should_stop)
    finally:
        os.unlink(path)

    verdict_line = None
    lits: list[int] = []
    for line in out.splitlines():
        parts = line.split()
        if not parts or parts[0] == "c":
            continue
        try:
            if parts[0] == "s":
                verdict_line = parts[1:]
            elif parts[0] in ("v", "V"):
                lits.extend(int(tok) for tok in parts[1:] if tok != "0")
            else:
                raise ValueError(line)
        except (ValueError, IndexError):
            raise ExternalToolError(f"unparseable solver output: {line!r}") from None
    if status not in (SAT_EXIT, UNSAT_EXIT):
        raise ExternalToolError(f"solver exited with status {status}")
    if verdict_line is None:
        raise ExternalToolError("verdict line missing in solver output")
    if status == UNSAT_EXIT:
        return SolveResult(UNSAT)
    if fmt == "dimacs":
        return SolveResult(SAT, lits)
    return SolveResult(SAT, {abs(lit): lit > 0 for lit in lits})


def translate_external(cmd: str, formula: Ltl, signals: Sequence[str], timeout: float | None = None) -> UniversalCoBuchi:
    """Run an LTL-to-Büchi translator and read the HOA automaton from its output.

    ``{formula}`` in ``cmd`` is replaced by the formula text (appended if absent).
    """
    status, out = _run(_command(cmd, "{formula}", pretty(formula)), timeout, None)
    if status != 0:
        raise ExternalToolError(f"translator exited with status {status}")
    return parse_hoa(out, signals)
