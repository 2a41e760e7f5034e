"""Transducer-to-transducer rewrites.

Covers output reversal, compiling equality tests away into matrix-annotated
states, and the normalizations (single-letter outputs, full input reads,
separating pebble actions from head moves) that the composition
constructions assume.
"""

from __future__ import annotations

from collections import deque
from itertools import product
from ._optests import reverse_test_under_op
from .core import (
    ENDMARKER,
    NOP,
    NotReversibleError,
    PebbleOp,
    Test,
    TRUE,
    Transducer,
    Transition,
    head_eq,
    reverse_op,
    test_of_op,
)
from .analysis import is_reversible

__all__ = [
    "reverse_test_under_op",
    "reverse_transducer",
    "eliminate_equality",
    "phi1",
    "phi2",
    "split_outputs",
    "ensure_full_read",
    "separate_drop_lift_moves",
    "mat_zero",
    "mat_ones",
    "basic_consistent",
    "bits_matrix_satisfy",
    "op_allowed_by_bits",
    "update_matrix",
]

Matrix = tuple[tuple[int, ...], ...]
Bits = tuple[int, ...]


# ---------------------------------------------------------------------------
# Reversal


def reverse_transition(t: Transition) -> Transition:
    """t = (q,a,phi,op,q') becomes (q',a,op(phi),reverse(op),q), same output."""
    return Transition(
        t.dst, t.letter, reverse_test_under_op(t.op, t.test), reverse_op(t.op), t.src, t.out
    )


def _reverse_unchecked(machine: Transducer) -> Transducer:
    polarity = {q: -p for q, p in machine.polarity.items()}
    return machine.replace(
        name=f"reverse({machine.name})",
        polarity=polarity,
        initial=machine.final,
        final=machine.initial,
        transitions=tuple(reverse_transition(t) for t in machine.transitions),
    )


def reverse_transducer(machine: Transducer) -> Transducer:
    """Machine computing the reversed output string on the same domain.

    State polarities flip, initial/final swap, and every transition is
    reversed.  Only defined for reversible machines.
    """
    if not is_reversible(machine):
        raise NotReversibleError(f"{machine.name} is not reversible")
    return _reverse_unchecked(machine)


# ---------------------------------------------------------------------------
# Equality-test elimination (matrix abstraction)


def mat_zero(k: int) -> Matrix:
    return tuple(tuple(0 for _ in range(k)) for _ in range(k))


def mat_ones(k: int) -> Matrix:
    return tuple(tuple(1 for _ in range(k)) for _ in range(k))


def phi1(peb: tuple[int, ...], k: int) -> Matrix:
    """alpha[i][j] = 1 iff pebbles i,j are both dropped on the same spot."""
    n = len(peb)
    return tuple(
        tuple(
            1 if i < n and j < n and peb[i] == peb[j] else 0 for j in range(k)
        )
        for i in range(k)
    )


def phi2(h: int, peb: tuple[int, ...], k: int) -> Bits:
    """b[i] = 1 iff pebble i+1 is dropped on the head position."""
    n = len(peb)
    return tuple(1 if i < n and peb[i] == h else 0 for i in range(k))


def basic_consistent(alpha: Matrix, b: Bits) -> bool:
    """Invariants I1-I5: alpha symmetric/transitive, bits agree with alpha,
    and dropped pebbles respect the stack discipline."""
    k = len(b)
    for i in range(k):
        for j in range(k):
            if alpha[i][j] != alpha[j][i]:
                return False
            for n in range(k):
                if alpha[i][j] and alpha[j][n] and not alpha[i][n]:
                    return False
    for i in range(k):
        if b[i] and not alpha[i][i]:
            return False
        for j in range(k):
            if b[i] and b[j] and not alpha[i][j]:
                return False
            if alpha[i][j] and not (alpha[i][i] and alpha[j][j] and b[i] == b[j]):
                return False
    for j in range(1, k):
        if alpha[j][j] and not alpha[j - 1][j - 1]:
            return False
    return True


def bits_matrix_satisfy(test: Test, alpha: Matrix, b: Bits) -> bool:
    """alpha, b |= phi (head atoms read bits, equality atoms read alpha)."""
    if test.false:
        return False
    for a in test.atoms:
        if a.kind == "h":
            value = b[a.i - 1] == 1
        else:
            value = alpha[a.i - 1][a.j - 1] == 1
        if value == a.negated:
            return False
    return True


def op_allowed_by_bits(op: PebbleOp, alpha: Matrix, b: Bits) -> bool:
    k = len(b)
    if op.is_nop():
        return True
    n = op.index
    if op.kind == "drop":
        return alpha[n - 1][n - 1] == 0 and (n == 1 or alpha[n - 2][n - 2] == 1)
    return b[n - 1] == 1 and (n == k or alpha[n][n] == 0)


def update_matrix(op: PebbleOp, alpha: Matrix, b: Bits) -> Matrix:
    """The abstraction of the stack after executing op under bit vector b."""
    k = len(b)
    if op.is_nop():
        return alpha
    n = op.index
    rows = [list(row) for row in alpha]
    if op.kind == "drop":
        for i in range(k):
            for j in range(k):
                if i >= n or j >= n:
                    rows[i][j] = 0
        rows[n - 1][n - 1] = 1
        for j in range(n - 1):
            if b[j]:
                rows[n - 1][j] = rows[j][n - 1] = 1
    else:
        for i in range(k):
            for j in range(k):
                if i >= n - 1 or j >= n - 1:
                    rows[i][j] = 0
    return tuple(tuple(row) for row in rows)


def _bits_test(b: Bits) -> Test:
    return Test.of(*(head_eq(i + 1, negated=not bit) for i, bit in enumerate(b)))


def eliminate_equality(machine: Transducer) -> Transducer:
    """Basic machine equivalent to one with equality tests.

    States are (state, matrix) pairs reachable from the zero matrix; each
    transition is duplicated over every consistent complete bit vector, so
    guards become complete head-pebble tests and equality atoms disappear.
    Determinism and reverse-determinism carry over.
    """
    k = machine.k
    all_bits = list(product((0, 1), repeat=k))
    start = (machine.initial, mat_zero(k))
    final = (machine.final, mat_zero(k))
    polarity = {start: 0, final: 0}
    transitions: list[Transition] = []
    queue = deque([start])
    seen = {start, final}
    while queue:
        q, alpha = queue.popleft()
        for t in machine.from_state(q):
            for b in all_bits:
                if not basic_consistent(alpha, b):
                    continue
                if not bits_matrix_satisfy(t.test, alpha, b):
                    continue
                if not op_allowed_by_bits(t.op, alpha, b):
                    continue
                target = (t.dst, update_matrix(t.op, alpha, b))
                if target not in seen:
                    seen.add(target)
                    queue.append(target)
                polarity.setdefault(target, machine.pol(t.dst))
                transitions.append(
                    Transition((q, alpha), t.letter, _bits_test(b), t.op, target, t.out)
                )
    for state in seen:
        polarity.setdefault(state, machine.pol(state[0]))
    return Transducer(
        name=f"basic({machine.name})",
        k=k,
        input_alphabet=machine.input_alphabet,
        output_alphabet=machine.output_alphabet,
        polarity=polarity,
        initial=start,
        final=final,
        transitions=tuple(transitions),
        equality_tests_allowed=False,
    )


# ---------------------------------------------------------------------------
# Normalizations used by composition


def split_outputs(machine: Transducer) -> Transducer:
    """Decompose multi-letter outputs into chains emitting one letter each.

    Intermediate states are keyed by (state, emitted prefix) and guarded by
    the original test plus the operation's enabling test, so reversibility
    carries over.
    """
    if all(len(t.out) <= 1 for t in machine.transitions):
        return machine
    polarity = dict(machine.polarity)
    transitions: list[Transition] = []
    for t in machine.transitions:
        if len(t.out) <= 1:
            transitions.append(t)
            continue
        guard = t.test.conjoin(test_of_op(t.op, machine.k))
        prev = t.src
        for i, sym in enumerate(t.out[:-1]):
            chain = ("emit", t.src, t.out[: i + 1])
            polarity.setdefault(chain, 0)
            transitions.append(Transition(prev, t.letter, guard, NOP, chain, (sym,)))
            prev = chain
        transitions.append(Transition(prev, t.letter, t.test, t.op, t.dst, (t.out[-1],)))
    return machine.replace(polarity=polarity, transitions=tuple(transitions))


def ensure_full_read(machine: Transducer) -> Transducer:
    """Make a machine sweep its whole input before starting.

    Adds one right-moving state between the initial state and the original
    initial transitions; the domain and outputs are unchanged.  (Stated for
    pebbleless machines, but nothing here touches the stack.)
    """
    sweep = ("fullread", machine.initial)
    while sweep in machine.polarity:
        sweep = ("fullread", sweep)
    polarity = dict(machine.polarity)
    polarity[sweep] = 1
    transitions = [Transition(machine.initial, ENDMARKER, TRUE, NOP, sweep)]
    for a in sorted(machine.input_alphabet):
        transitions.append(Transition(sweep, a, TRUE, NOP, sweep))
    for t in machine.transitions:
        if t.src == machine.initial:
            transitions.append(Transition(sweep, t.letter, t.test, t.op, t.dst, t.out))
        else:
            transitions.append(t)
    return machine.replace(polarity=polarity, transitions=tuple(transitions))


def _separate(machine: Transducer) -> Transducer:
    polarity = dict(machine.polarity)
    transitions: list[Transition] = []
    for t in machine.transitions:
        if t.op.is_nop():
            transitions.append(t)
            continue
        mid = ("held", t.src, t.op)
        polarity.setdefault(mid, 0)
        guard = reverse_test_under_op(t.op, t.test).conjoin(
            test_of_op(reverse_op(t.op), machine.k)
        )
        transitions.append(Transition(t.src, t.letter, t.test, t.op, mid, t.out))
        transitions.append(Transition(mid, t.letter, guard, NOP, t.dst))
    return machine.replace(polarity=polarity, transitions=tuple(transitions))


def separate_drop_lift_moves(machine: Transducer) -> Transducer:
    """Split every pebble-moving transition so head moves only happen under
    nop.  Requires reversibility (which it preserves)."""
    if not is_reversible(machine):
        raise NotReversibleError(f"{machine.name} is not reversible")
    return _separate(machine)


def separate_ops_unchecked(machine: Transducer) -> Transducer:
    """Same splitting without the reversibility precondition; preserves
    determinism but not necessarily reverse-determinism."""
    return _separate(machine)
