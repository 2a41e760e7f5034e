"""Syntactic well-formedness, determinism and reversibility checks.

Determinism is decided syntactically: two distinct transitions from the same
state reading the same letter conflict iff the conjunction of their tests
and operation-tests is satisfiable.  Reverse-determinism reverses each
transition first and runs the same check on pairs sharing (target, letter).
The syntactic checks quantify over all configurations, including unreachable
ones, so syntactic-true implies the semantic property on every word.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional

from .core import (
    Test,
    Transducer,
    Transition,
    reverse_op,
    satisfiable,
    test_of_op,
)
from ._optests import reverse_test_under_op


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.detail}"


@dataclass(frozen=True)
class ConflictWitness:
    t1: Transition
    t2: Transition
    direction: str  # "forward" | "backward"
    joint_test: Test


def validate(machine: Transducer) -> list[Violation]:
    """Empty list iff the transducer invariants hold."""
    v: list[Violation] = []
    states = machine.states

    def bad(kind: str, detail: str) -> None:
        v.append(Violation(kind, detail))

    if machine.k < 0:
        bad("NegativePebbleCount", str(machine.k))
    if machine.initial not in states:
        bad("UnknownState", f"initial {machine.initial!r}")
    if machine.final not in states:
        bad("UnknownState", f"final {machine.final!r}")
    if machine.initial == machine.final:
        bad("InitialEqualsFinal", repr(machine.initial))
    for role, s in (("initial", machine.initial), ("final", machine.final)):
        if s in states and machine.pol(s) != 0:
            bad("EndpointNotStationary", f"{role} state {s!r} has polarity {machine.pol(s)}")
    for p in machine.polarity.values():
        if p not in (-1, 0, 1):
            bad("BadPolarity", str(p))
    for alph_name, alph in (
        ("input", machine.input_alphabet),
        ("output", machine.output_alphabet),
    ):
        for s in alph:
            if s.is_endmarker():
                bad("ReservedLetterInAlphabet", f"'#' in {alph_name} alphabet")
    letters = machine.letters()
    for idx, t in enumerate(machine.transitions):
        where = f"transition #{idx} ({t.render()})"
        if t.src not in states:
            bad("UnknownState", f"{where}: source {t.src!r}")
        if t.dst not in states:
            bad("UnknownState", f"{where}: target {t.dst!r}")
        if t.src == machine.final:
            bad("FinalStateHasOutgoing", where)
        if t.dst == machine.initial:
            bad("InitialStateHasIncoming", where)
        if t.letter not in letters:
            bad("LetterNotInAlphabet", f"{where}: {t.letter.render()}")
        for sym in t.out:
            if sym not in machine.output_alphabet:
                bad("OutputNotInAlphabet", f"{where}: {sym.render()}")
        for a in t.test.atoms:
            if not 1 <= a.i <= machine.k or (a.kind == "p" and not 1 <= a.j <= machine.k):
                bad("AtomIndexOutOfRange", f"{where}: {a.render()}")
            if a.kind == "p" and not machine.equality_tests_allowed:
                bad("EqualityAtomInBasicMachine", f"{where}: {a.render()}")
        if not t.op.is_nop() and not 1 <= t.op.index <= machine.k:
            bad("OpIndexOutOfRange", f"{where}: {t.op.render()}")
    return v


def _forward_conflict(machine: Transducer, t1: Transition, t2: Transition) -> Optional[Test]:
    joint = (
        t1.test.conjoin(test_of_op(t1.op, machine.k))
        .conjoin(t2.test)
        .conjoin(test_of_op(t2.op, machine.k))
    )
    return joint if satisfiable(joint, machine.k) else None


def is_deterministic(machine: Transducer) -> tuple[bool, Optional[ConflictWitness]]:
    """No two distinct transitions with the same (source, letter) can be
    simultaneously enabled."""
    groups: dict = {}
    for t in machine.transitions:
        groups.setdefault((t.src, t.letter), []).append(t)
    for group in groups.values():
        for t1, t2 in combinations(group, 2):
            joint = _forward_conflict(machine, t1, t2)
            if joint is not None:
                return False, ConflictWitness(t1, t2, "forward", joint)
    return True, None


def _reversed_guard(machine: Transducer, t: Transition) -> Test:
    return reverse_test_under_op(t.op, t.test).conjoin(
        test_of_op(reverse_op(t.op), machine.k)
    )


def is_reverse_deterministic(machine: Transducer) -> tuple[bool, Optional[ConflictWitness]]:
    """No two distinct transitions with the same (target, letter) can be
    simultaneously reverse-enabled."""
    groups: dict = {}
    for t in machine.transitions:
        groups.setdefault((t.dst, t.letter), []).append(t)
    for group in groups.values():
        for t1, t2 in combinations(group, 2):
            joint = _reversed_guard(machine, t1).conjoin(_reversed_guard(machine, t2))
            if satisfiable(joint, machine.k):
                return False, ConflictWitness(t1, t2, "backward", joint)
    return True, None


def is_reversible(machine: Transducer) -> bool:
    return is_deterministic(machine)[0] and is_reverse_deterministic(machine)[0]
