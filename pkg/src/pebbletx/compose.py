"""Composition of a reversible pebble transducer with a deterministic one.

``compose_simple`` handles a pebbleless second machine as a synchronized
product: sync states pair up one producing transition of the first machine
with the consuming transition of the second, and simulation states replay
the first machine forward or backward (using reversed transitions) to find
the next or previous produced letter.

``compose_general`` lets the second machine carry pebbles.  A pebble of the
second machine sitting on output position i is frozen as the configuration
of the first machine's run at the moment position i was produced: its stack
followed by its head position, pushed as a segment of the composed stack.
Guards of the second machine are compiled against those segments
(``xi_bar``), and its drop/lift operations become gadgets that copy or
unwind a segment pebble by pebble.

Machines are built by forward reachability, so unreachable product states
and gadget chains are pruned as constructed.
"""

from __future__ import annotations

from collections import deque
from ._optests import reverse_test_under_op
from .analysis import is_deterministic, is_reversible
from .core import (
    ENDMARKER,
    NOP,
    TRUE,
    AlphabetMismatchError,
    Atom,
    HasPebblesError,
    NotDeterministicError,
    NotReversibleError,
    PebbleOp,
    Test,
    Transducer,
    Transition,
    drop,
    head_eq,
    lift,
    peb_eq,
    reverse_op,
    satisfiable,
    test_of_op,
)
from .transforms import ensure_full_read, separate_drop_lift_moves, separate_ops_unchecked, split_outputs

__all__ = ["compose", "compose_simple", "compose_general", "xi_bar", "build_xi"]


# ---------------------------------------------------------------------------
# Normalizations internal to composition


def with_endmarker_prefix(machine: Transducer) -> Transducer:
    """Prefix the produced string with '#': on the circular input ``#u`` the
    machine now writes ``#v``.  Applied to every transition leaving the
    initial state (exactly one can ever fire)."""
    transitions = tuple(
        Transition(t.src, t.letter, t.test, t.op, t.dst, (ENDMARKER,) + t.out)
        if t.src == machine.initial
        else t
        for t in machine.transitions
    )
    return machine.replace(transitions=transitions)


def normalize_first(machine: Transducer) -> Transducer:
    """First-machine normalization: '#'-prefixed output, one letter per
    transition."""
    return split_outputs(with_endmarker_prefix(machine))


def wrap_transition(machine: Transducer) -> Transition:
    """t_{f,i}: silently moves from the final configuration back to the
    initial one, letting the simulated run cross the endmarker of the
    produced circular word.  Never exposed on the machine itself."""
    guard = Test.of(peb_eq(1, 1, negated=True)) if machine.k >= 1 else TRUE
    return Transition(machine.final, ENDMARKER, guard, NOP, machine.initial)


def _check_compose_preconditions(first: Transducer, second: Transducer) -> None:
    if not is_reversible(first):
        raise NotReversibleError(f"{first.name} must be reversible to compose")
    ok, witness = is_deterministic(second)
    if not ok:
        raise NotDeterministicError(
            f"{second.name} must be deterministic to compose (conflict: "
            f"{witness.t1.render()} / {witness.t2.render()})"
        )
    if not first.output_alphabet <= second.input_alphabet:
        missing = first.output_alphabet - second.input_alphabet
        raise AlphabetMismatchError(
            f"{second.name} does not read {sorted(s.render() for s in missing)}"
        )


def compose(first: Transducer, second: Transducer) -> Transducer:
    """g∘f for f computed by a reversible machine and g by a deterministic
    one; dispatches on the second machine's pebble count."""
    _check_compose_preconditions(first, second)
    if second.k == 0:
        return compose_simple(first, second)
    return compose_general(first, second)


# ---------------------------------------------------------------------------
# Simple case: second machine is pebbleless


def compose_simple(first: Transducer, second: Transducer) -> Transducer:
    _check_compose_preconditions(first, second)
    if second.k != 0:
        raise HasPebblesError("compose_simple expects a pebbleless second machine")
    tn = normalize_first(first)
    sn = ensure_full_read(second)
    n = tn.k
    pool = list(tn.transitions) + [wrap_transition(tn)]
    by_src: dict = {}
    by_dst: dict = {}
    for t in pool:
        by_src.setdefault(t.src, []).append(t)
        by_dst.setdefault(t.dst, []).append(t)

    def sync(q, q2):
        return ("sync", q, q2)

    def sim(q, q2):
        return ("sim", q, q2)

    def pol_of(state) -> int:
        if state[0] == "sync":
            return 0
        return tn.pol(state[1]) * sn.pol(state[2])

    init = sync(tn.initial, sn.initial)
    fin = sync(tn.initial, sn.final)
    polarity = {init: 0, fin: 0}
    transitions: list[Transition] = []
    kinds: dict[Transition, str] = {}
    queue = deque([init])
    seen = {init, fin}

    def emit(src, letter, test, op, dst, out, kind):
        if not satisfiable(test.conjoin(test_of_op(op, n)), n):
            return
        polarity.setdefault(dst, pol_of(dst))
        t = Transition(src, letter, test, op, dst, out)
        transitions.append(t)
        kinds.setdefault(t, kind)
        if dst not in seen:
            seen.add(dst)
            queue.append(dst)

    while queue:
        state = queue.popleft()
        if state[0] == "sync":
            _, q, q2 = state
            for t in by_src.get(q, []):
                if not t.out:
                    continue
                for t2 in sn.from_state_letter(q2, t.out[0]):
                    p2 = sn.pol(t2.dst)
                    if p2 > 0:
                        emit(state, t.letter, t.test, t.op, sim(t.dst, t2.dst), t2.out, "tr-a")
                    elif p2 < 0:
                        emit(
                            state, t.letter, t.test.conjoin(test_of_op(t.op, n)),
                            NOP, sim(q, t2.dst), t2.out, "tr-b",
                        )
                    else:
                        emit(
                            state, t.letter, t.test.conjoin(test_of_op(t.op, n)),
                            NOP, sync(q, t2.dst), t2.out, "tr-c",
                        )
        else:
            _, q, q2 = state
            if sn.pol(q2) > 0:
                for t in by_src.get(q, []):
                    if t.out:
                        emit(
                            state, t.letter, t.test.conjoin(test_of_op(t.op, n)),
                            NOP, sync(q, q2), (), "sw-a",
                        )
                    else:
                        emit(state, t.letter, t.test, t.op, sim(t.dst, q2), (), "mv-a")
            else:
                for t in by_dst.get(q, []):
                    guard = reverse_test_under_op(t.op, t.test)
                    rop = reverse_op(t.op)
                    if t.out:
                        emit(state, t.letter, guard, rop, sync(t.src, q2), (), "sw-b")
                    else:
                        emit(state, t.letter, guard, rop, sim(t.src, q2), (), "mv-b")

    eq_used = any(a.kind == "p" for t in transitions for a in t.test.atoms)
    return Transducer(
        name=f"compose({first.name},{second.name})",
        k=n,
        input_alphabet=first.input_alphabet,
        output_alphabet=second.output_alphabet,
        polarity=polarity,
        initial=init,
        final=fin,
        transitions=tuple(transitions),
        equality_tests_allowed=eq_used,
        metadata={
            "kinds": kinds,
            "first_normalized": tn,
            "second_normalized": sn,
            "state_bound": 2 * len(tn.polarity) * len(sn.polarity),
        },
    )


# ---------------------------------------------------------------------------
# General case: second machine carries pebbles


def _subst_atom(a: Atom, q, xbar, ybar, r: int):
    """Positive-atom image under the stacked-configuration encoding; ``False``
    when ruled out statically, else a list of literals."""
    k = len(xbar)
    d_k = sum(ybar)
    if a.kind == "h":
        i = a.i
        if i > k or xbar[i - 1] != q:
            return False
        y = ybar[i - 1]
        d_prev = sum(ybar[: i - 1])
        atoms = [peb_eq(l + d_k, l + d_prev) for l in range(1, y)]
        atoms.append(head_eq(d_prev + y))
        if y + d_k <= r:
            atoms.append(peb_eq(y + d_k, y + d_k, negated=True))
        return atoms
    i, j = a.i, a.j
    if i > k or j > k:
        return False
    if xbar[i - 1] != xbar[j - 1] or ybar[i - 1] != ybar[j - 1]:
        return False
    y = ybar[i - 1]
    di = sum(ybar[: i - 1])
    dj = sum(ybar[: j - 1])
    return [peb_eq(l + di, l + dj) for l in range(1, y + 1)]


def xi_bar(q, xbar, ybar, psi: Test, r: int) -> list[Test]:
    """Compile a second-machine test against the encoded configuration.

    Negated atoms turn a conjunction image into a disjunction, so the result
    is a disjoint DNF: a list of tests whose union is the compiled formula
    (empty list = false)."""
    if psi.false:
        return []
    dnf: list[tuple[Atom, ...]] = [()]
    for literal in psi.atoms:
        image = _subst_atom(Atom(literal.kind, literal.i, literal.j), q, xbar, ybar, r)
        if image is False:
            if literal.negated:
                continue  # ¬false = true
            return []
        if not literal.negated:
            dnf = [term + tuple(image) for term in dnf]
        else:
            if not image:
                return []  # ¬(empty conjunction) = false
            expansions = [
                tuple(image[:idx]) + (image[idx].negate(),) for idx in range(len(image))
            ]
            dnf = [term + e for term in dnf for e in expansions]
    return [Test.of(*term) for term in dnf]


def _stack_window(d: int, n: int, r: int) -> Test:
    """xi_0 shifted by d: satisfied exactly when d <= |stack| <= d+n."""
    atoms = []
    if d >= 1:
        atoms.append(peb_eq(d, d))
    if n + 1 + d <= r:
        atoms.append(peb_eq(n + 1 + d, n + 1 + d, negated=True))
    return Test.of(*atoms)


def _stack_exactly(size: int, r: int) -> Test:
    """Satisfied exactly by stacks of the given size."""
    atoms = []
    if size >= 1:
        atoms.append(peb_eq(size, size))
    if size + 1 <= r:
        atoms.append(peb_eq(size + 1, size + 1, negated=True))
    return Test.of(*atoms)


def build_xi(
    q, xbar, ybar, phi: Test, op: PebbleOp, psi: Test, n: int, r: int
) -> list[Test]:
    """The joint enabledness test for a (first, second) transition pair:
    (xi_0 ∧ phi ∧ test(op)) shifted past the frozen segments, conjoined with
    the compiled second-machine test.  Returned as a disjoint DNF."""
    d = sum(ybar)
    base = (
        _stack_window(d, n, r)
        .conjoin(phi.shifted(d, r))
        .conjoin(test_of_op(op, n).shifted(d, r))
    )
    if base.false:
        return []
    return [base.conjoin(term) for term in xi_bar(q, xbar, ybar, psi, r) if not term.false]


def compose_general(first: Transducer, second: Transducer) -> Transducer:
    _check_compose_preconditions(first, second)
    tn = normalize_first(first)
    sn = ensure_full_read(second)
    sn = separate_drop_lift_moves(sn) if is_reversible(sn) else separate_ops_unchecked(sn)
    n, m = tn.k, sn.k
    r = (n + 1) * (m + 1) - 1
    pool = list(tn.transitions) + [wrap_transition(tn)]
    by_src: dict = {}
    by_dst: dict = {}
    for t in pool:
        by_src.setdefault(t.src, []).append(t)
        by_dst.setdefault(t.dst, []).append(t)

    def sync(q, q2, xbar, ybar):
        return ("sync", q, q2, xbar, ybar)

    def sim(q, q2, xbar, ybar):
        return ("sim", q, q2, xbar, ybar)

    def pol_of(state) -> int:
        tag = state[0]
        if tag == "sync" or tag == "liftg0":
            return 0
        if tag == "sim":
            return tn.pol(state[1]) * sn.pol(state[2])
        return 1  # gadget-internal states scan right

    init = sync(tn.initial, sn.initial, (), ())
    fin = sync(tn.initial, sn.final, (), ())
    polarity = {init: 0, fin: 0}
    transitions: list[Transition] = []
    kinds: dict[Transition, str] = {}
    queue = deque([init])
    seen = {init, fin}
    # gadget exits registered while processing the owning sync state:
    # state -> list of (letter, test, target, kind)
    pending_exits: dict = {}

    def emit(src, letter, test, op, dst, out, kind):
        if not satisfiable(test.conjoin(test_of_op(op, r)), r):
            return
        polarity.setdefault(dst, pol_of(dst))
        t = Transition(src, letter, test, op, dst, out)
        transitions.append(t)
        kinds.setdefault(t, kind)
        if dst not in seen:
            seen.add(dst)
            queue.append(dst)

    all_letters = sorted(tn.input_alphabet) + [ENDMARKER]

    def process_sync(state):
        _, q, q2, xbar, ybar = state
        k = len(xbar)
        d = sum(ybar)
        for t in by_src.get(q, []):
            if not t.out:
                continue
            for t2 in sn.from_state_letter(q2, t.out[0]):
                psi = t2.test.conjoin(test_of_op(t2.op, m))
                if t2.op.is_nop():
                    for test in build_xi(q, xbar, ybar, t.test, t.op, psi, n, r):
                        p2 = sn.pol(t2.dst)
                        if p2 > 0:
                            emit(state, t.letter, test, t.op.shifted(d, r),
                                 sim(t.dst, t2.dst, xbar, ybar), t2.out, "gtr-a")
                        elif p2 < 0:
                            emit(state, t.letter, test, NOP,
                                 sim(q, t2.dst, xbar, ybar), t2.out, "gtr-b")
                        else:
                            emit(state, t.letter, test, NOP,
                                 sync(q, t2.dst, xbar, ybar), t2.out, "gtr-c")
                elif t2.op.kind == "lift":
                    if t2.op.index != k or k == 0 or xbar[-1] != q:
                        continue
                    target = sync(q, t2.dst, xbar[:-1], ybar[:-1])
                    exit_psi = reverse_test_under_op(t2.op, t2.test).conjoin(
                        test_of_op(reverse_op(t2.op), m)
                    )
                    # Pin the exact stack size after popping the segment:
                    # without it, exits of gadgets with different segment
                    # lengths into the same sync state would be jointly
                    # reverse-enabled.  The entry test forces this size, so
                    # nothing is lost.
                    pin = _stack_exactly(d - 1, r)
                    exit_tests = [
                        x.conjoin(pin)
                        for x in build_xi(
                            q, xbar[:-1], ybar[:-1], t.test, t.op, exit_psi, n, r
                        )
                    ]
                    entry = ("liftg", q, q2, xbar, ybar, 1)
                    for test in build_xi(q, xbar, ybar, t.test, t.op, psi, n, r):
                        emit(state, t.letter, test, NOP, entry, t2.out, "lift-a")
                    exits = pending_exits.setdefault(("liftg0", q, q2, xbar, ybar), [])
                    for test in exit_tests:
                        exits.append((t.letter, test, target, "lift-b"))
                else:  # drop
                    if t2.op.index != k + 1 or t2.op.index > m:
                        continue
                    exit_psi = reverse_test_under_op(t2.op, t2.test).conjoin(
                        test_of_op(reverse_op(t2.op), m)
                    )
                    for z in range(1, n + 2):
                        xbar2, ybar2 = xbar + (q,), ybar + (z,)
                        target = sync(q, t2.dst, xbar2, ybar2)
                        entry = ("dropg", q, q2, xbar, ybar, z, 1)
                        for test in build_xi(q, xbar, ybar, t.test, t.op, psi, n, r):
                            emit(state, t.letter, test, drop(d + z), entry, t2.out, "drop-a")
                        exits = pending_exits.setdefault(
                            ("dropg", q, q2, xbar, ybar, z, z), []
                        )
                        for test in build_xi(
                            q, xbar2, ybar2, t.test, t.op, exit_psi, n, r
                        ):
                            exits.append((t.letter, test, target, "drop-b"))

    def process_sim(state):
        _, q, q2, xbar, ybar = state
        d = sum(ybar)
        if sn.pol(q2) > 0:
            for t in by_src.get(q, []):
                if t.out:
                    guard = t.test.conjoin(test_of_op(t.op, n)).shifted(d, r)
                    emit(state, t.letter, guard, NOP, sync(q, q2, xbar, ybar), (), "gsw-a")
                else:
                    emit(state, t.letter, t.test.shifted(d, r), t.op.shifted(d, r),
                         sim(t.dst, q2, xbar, ybar), (), "gmv-a")
        else:
            for t in by_dst.get(q, []):
                guard = reverse_test_under_op(t.op, t.test).shifted(d, r)
                rop = reverse_op(t.op).shifted(d, r)
                if t.out:
                    emit(state, t.letter, guard, rop, sync(t.src, q2, xbar, ybar), (), "gsw-b")
                else:
                    emit(state, t.letter, guard, rop, sim(t.src, q2, xbar, ybar), (), "gmv-b")

    def process_liftg(state):
        _, q, q2, xbar, ybar, ell = state
        d = sum(ybar)
        y = ybar[-1]
        loop_test = Test.of(
            head_eq(d - ell + 1, negated=True), head_eq(d + y - ell, negated=True)
        )
        for sigma in all_letters:
            emit(state, sigma, loop_test, NOP, state, (), "lift-scan")
            if ell < y:
                emit(state, sigma, Test.of(head_eq(d - ell)), lift(d + y - ell),
                     ("liftg", q, q2, xbar, ybar, ell + 1), (), "lift-pop")
            else:
                emit(state, sigma, TRUE, lift(d),
                     ("liftg0", q, q2, xbar, ybar), (), "lift-pop")

    def process_liftg0(state):
        for letter, test, target, kind in pending_exits.get(state, []):
            emit(state, letter, test, NOP, target, (), kind)

    def process_dropg(state):
        _, q, q2, xbar, ybar, z, ell = state
        d = sum(ybar)
        loop_test = Test.of(
            head_eq(d + z + ell - 1, negated=True), head_eq(d + ell, negated=True)
        )
        for sigma in all_letters:
            emit(state, sigma, loop_test, NOP, state, (), "drop-scan")
            if ell < z:
                emit(state, sigma, Test.of(head_eq(d + ell)), drop(d + z + ell),
                     ("dropg", q, q2, xbar, ybar, z, ell + 1), (), "drop-push")
        if ell == z:
            for letter, test, target, kind in pending_exits.get(state, []):
                emit(state, letter, test, NOP, target, (), kind)

    handlers = {
        "sync": process_sync,
        "sim": process_sim,
        "liftg": process_liftg,
        "liftg0": process_liftg0,
        "dropg": process_dropg,
    }
    while queue:
        state = queue.popleft()
        handlers[state[0]](state)

    eq_used = any(a.kind == "p" for t in transitions for a in t.test.atoms)
    return Transducer(
        name=f"compose({first.name},{second.name})",
        k=r,
        input_alphabet=first.input_alphabet,
        output_alphabet=second.output_alphabet,
        polarity=polarity,
        initial=init,
        final=fin,
        transitions=tuple(transitions),
        equality_tests_allowed=eq_used,
        metadata={
            "kinds": kinds,
            "first_normalized": tn,
            "second_normalized": sn,
        },
    )
