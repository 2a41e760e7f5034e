"""Operational semantics: stepping, full runs, and relation enumeration."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Union

from .core import (
    Configuration,
    PebbleError,
    Symbol,
    Transducer,
    Transition,
    apply_op,
    eval_test,
    letter_at,
    op_enabled,
    reverse_op,
    word_symbols,
)

Word = Union[str, Iterable[Symbol]]


class NondeterministicChoiceError(PebbleError):
    """Two transitions were enabled at a configuration during run()."""

    def __init__(self, config: Configuration, t1: Transition, t2: Transition):
        super().__init__(
            f"two transitions enabled at {config}: {t1.render()} / {t2.render()}"
        )
        self.config = config
        self.candidates = (t1, t2)


@dataclass(frozen=True)
class RunResult:
    """Outcome of a deterministic run.

    ``verdict`` is one of ``accept`` / ``reject`` / ``diverge``; accepted
    runs end in the configuration (final, empty stack, position 0).
    """

    verdict: str
    output: Optional[tuple[Symbol, ...]]
    steps: int
    trace: Optional[tuple[tuple[Transition, Configuration], ...]] = None
    repeated_configuration: Optional[Configuration] = None

    @property
    def accepted(self) -> bool:
        return self.verdict == "accept"


@dataclass(frozen=True)
class EnumResult:
    outputs: frozenset[tuple[Symbol, ...]]
    truncated: bool


def initial_configuration(machine: Transducer) -> Configuration:
    return Configuration(machine.initial, (), 0)


def is_final_configuration(machine: Transducer, c: Configuration) -> bool:
    return c.state == machine.final and c.peb == () and c.head == 0


def default_budget(machine: Transducer, word: tuple[Symbol, ...]) -> int:
    """Upper bound on distinct configurations, so exceeding it on a
    deterministic machine certifies a revisit (divergence)."""
    n = len(word) + 1
    k = machine.k
    return len(machine.polarity) * (n ** (k + 1)) * (k + 1) + 1


def enabled(
    machine: Transducer, t: Transition, c: Configuration, word: tuple[Symbol, ...]
) -> bool:
    """Letter matches, the test holds, and the operation is executable."""
    return (
        t.src == c.state
        and t.letter == letter_at(word, c.head)
        and eval_test(t.test, c.peb, c.head)
        and op_enabled(t.op, c.peb, c.head)
    )


def step(
    machine: Transducer, c: Configuration, word: tuple[Symbol, ...]
) -> list[tuple[Transition, Configuration]]:
    """All successors; the head moves by the polarity of the target state,
    wrapping across the endmarker."""
    n = len(word) + 1
    out = []
    for t in machine.from_state_letter(c.state, letter_at(word, c.head)):
        if not eval_test(t.test, c.peb, c.head):
            continue
        peb = apply_op(t.op, c.peb, c.head)
        if peb is None:
            continue
        head = (c.head + machine.pol(t.dst)) % n
        out.append((t, Configuration(t.dst, peb, head)))
    return out


def reverse_enabled(
    machine: Transducer, t: Transition, c_after: Configuration, word: tuple[Symbol, ...]
) -> bool:
    """Could ``t`` have produced ``c_after`` as its successor?"""
    if t.dst != c_after.state:
        return False
    n = len(word) + 1
    h = (c_after.head - machine.pol(t.dst)) % n
    if t.letter != letter_at(word, h):
        return False
    rev = reverse_op(t.op)
    peb = apply_op(rev, c_after.peb, h)
    if peb is None:
        return False
    return eval_test(t.test, peb, h)


def step_back(
    machine: Transducer, c_after: Configuration, word: tuple[Symbol, ...]
) -> list[tuple[Transition, Configuration]]:
    """Exactly the (t, c) with c --t--> c_after."""
    n = len(word) + 1
    out = []
    for t in machine.into_state(c_after.state):
        if not reverse_enabled(machine, t, c_after, word):
            continue
        h = (c_after.head - machine.pol(t.dst)) % n
        peb = apply_op(reverse_op(t.op), c_after.peb, h)
        out.append((t, Configuration(t.src, peb, h)))
    return out


def run(
    machine: Transducer,
    u: Word,
    budget: Optional[int] = None,
    trace: bool = False,
    detect_loop: bool = False,
) -> RunResult:
    """Follow the unique enabled transition from the initial configuration.

    Requires a deterministic machine; raises NondeterministicChoiceError if
    two transitions are ever enabled at once.  ``detect_loop`` trades memory
    for reporting the repeated configuration instead of a bare budget stop.
    """
    word = word_symbols(u)
    if budget is None:
        budget = default_budget(machine, word)
    c = initial_configuration(machine)
    output: list[Symbol] = []
    steps = 0
    path: list[tuple[Transition, Configuration]] = []
    visited = {c} if detect_loop else None
    while True:
        if is_final_configuration(machine, c):
            return RunResult(
                "accept", tuple(output), steps, tuple(path) if trace else None
            )
        succ = step(machine, c, word)
        if len(succ) > 1:
            raise NondeterministicChoiceError(c, succ[0][0], succ[1][0])
        if not succ:
            return RunResult("reject", None, steps, tuple(path) if trace else None)
        if steps >= budget:
            return RunResult("diverge", None, steps, tuple(path) if trace else None)
        t, c = succ[0]
        output.extend(t.out)
        steps += 1
        if trace:
            path.append((t, c))
        if visited is not None:
            if c in visited:
                return RunResult(
                    "diverge",
                    None,
                    steps,
                    tuple(path) if trace else None,
                    repeated_configuration=c,
                )
            visited.add(c)


def enumerate_runs(
    machine: Transducer, u: Word, budget: Optional[int] = None
) -> EnumResult:
    """Outputs of all accepting runs of length <= budget (exhaustive search).

    Nondeterministic machines may have unboundedly long runs, so the search
    is budgeted per path and reports truncation.  Search states are
    (configuration, output) pairs, deduplicated so that silent loops do not
    blow the search up.
    """
    word = word_symbols(u)
    if budget is None:
        budget = default_budget(machine, word)
    outputs: set[tuple[Symbol, ...]] = set()
    truncated = False
    frontier = {(initial_configuration(machine), ())}
    seen = set(frontier)
    for _ in range(budget + 1):
        if not frontier:
            break
        nxt = set()
        for c, out in frontier:
            if is_final_configuration(machine, c):
                outputs.add(out)
                continue
            for t, c2 in step(machine, c, word):
                node = (c2, out + t.out)
                if node not in seen:
                    seen.add(node)
                    nxt.add(node)
        frontier = nxt
    if frontier:
        truncated = True
    return EnumResult(frozenset(outputs), truncated)


def semantics(
    machine: Transducer, u: Word, budget: Optional[int] = None
) -> Optional[tuple[Symbol, ...]]:
    """Partial-function view of a deterministic machine: output or None."""
    result = run(machine, u, budget=budget)
    return result.output if result.accepted else None
