"""Rewriting a guard across a pebble operation (shared helper).

``reverse_test_under_op(op, t)`` computes the test op(t) such that
``peb, h |= t`` iff ``op(peb, h), h |= op(t)`` whenever op(peb, h) is
defined.  It lives in its own module because both the analysis checks and
the transducer rewrites need it.
"""

from __future__ import annotations

from typing import Union

from .core import FALSE, Atom, PebbleOp, Test, head_eq, peb_eq

# an atom image is True (drop the literal), False, or a replacement atom
_Image = Union[bool, Atom]


def _image(op: PebbleOp, a: Atom) -> _Image:
    if op.is_nop():
        return Atom(a.kind, a.i, a.j, False)
    ell = op.index
    if op.kind == "drop":
        if a.kind == "h":
            return head_eq(a.i) if a.i < ell else False
        return peb_eq(a.i, a.j) if a.j < ell else False
    # lift
    if a.kind == "h":
        if a.i < ell:
            return head_eq(a.i)
        return True if a.i == ell else False
    i, j = a.i, a.j
    if j < ell:
        return peb_eq(i, j)
    if i == j == ell:
        return True
    if i < j == ell:
        return head_eq(i)
    return False


def reverse_test_under_op(op: PebbleOp, t: Test) -> Test:
    """Homomorphic over conjunction and negation; see the case table."""
    if t.false:
        return FALSE
    atoms: list[Atom] = []
    for a in t.atoms:
        img = _image(op, a)
        if isinstance(img, bool):
            value = img != a.negated
            if not value:
                return FALSE
            continue  # literal is identically true, drop it
        atoms.append(img.negate() if a.negated else img)
    return Test.of(*atoms)
