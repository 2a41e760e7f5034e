"""The ``.ptx`` machine file format (JSON-based, canonical on output).

The reserved endmarker never appears in files: a transition reading it
stores ``null`` as its letter.  Plain letters are one-character strings,
annotated letters objects ``{"base": ..., "bits": ..., "matrix": ...}``.
Unknown fields are rejected so files round-trip losslessly.
"""

from __future__ import annotations

import json

from .core import (
    ENDMARKER,
    FALSE,
    NOP,
    PebbleError,
    PebbleOp,
    Symbol,
    Test,
    Transducer,
    Transition,
    head_eq,
    peb_eq,
)

FORMAT_VERSION = 1


class MachineFileError(PebbleError):
    """Syntax or semantic error in a machine file, tagged with a location."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


# ---------------------------------------------------------------------------
# Symbols


def _symbol_to_json(sym: Symbol):
    if sym.bits is None and sym.matrix is None:
        return None if sym.base == "#" else sym.base
    obj = {"base": None if sym.base == "#" else sym.base}
    if sym.bits is not None:
        obj["bits"] = list(sym.bits)
    if sym.matrix is not None:
        obj["matrix"] = [list(row) for row in sym.matrix]
    return obj


def _symbol_from_json(value, where: str) -> Symbol:
    if value is None:
        return ENDMARKER
    if isinstance(value, str):
        if len(value) != 1:
            raise MachineFileError(where, f"letters are single characters, got {value!r}")
        if value == "#":
            raise MachineFileError(where, "'#' is implicit and may not appear in files")
        return Symbol(value)
    if not isinstance(value, dict):
        raise MachineFileError(where, f"bad symbol {value!r}")
    unknown = set(value) - {"base", "bits", "matrix"}
    if unknown:
        raise MachineFileError(where, f"unknown symbol fields {sorted(unknown)}")
    base = value.get("base")
    base = "#" if base is None else base
    if not isinstance(base, str) or len(base) != 1:
        raise MachineFileError(where, f"bad symbol base {base!r}")
    bits = value.get("bits")
    matrix = value.get("matrix")
    return Symbol(
        base,
        None if bits is None else tuple(int(b) for b in bits),
        None if matrix is None else tuple(tuple(int(b) for b in row) for row in matrix),
    )


# ---------------------------------------------------------------------------
# Tests and operations


def _test_to_json(test: Test):
    if test.false:
        return "false"
    out = []
    for a in test.atoms:
        obj = {"kind": "head" if a.kind == "h" else "peb", "i": a.i}
        if a.kind == "p":
            obj["j"] = a.j
        if a.negated:
            obj["negated"] = True
        out.append(obj)
    return out


def _test_from_json(value, where: str, k: int) -> Test:
    if value == "false":
        return FALSE
    if not isinstance(value, list):
        raise MachineFileError(where, f"test must be a list of atoms or \"false\"")
    atoms = []
    for idx, obj in enumerate(value):
        w = f"{where}[{idx}]"
        if not isinstance(obj, dict):
            raise MachineFileError(w, f"bad atom {obj!r}")
        unknown = set(obj) - {"kind", "i", "j", "negated"}
        if unknown:
            raise MachineFileError(w, f"unknown atom fields {sorted(unknown)}")
        kind = obj.get("kind")
        i = obj.get("i")
        neg = bool(obj.get("negated", False))
        if kind == "head":
            if "j" in obj:
                raise MachineFileError(w, "head atoms take no 'j'")
            if not isinstance(i, int) or not 1 <= i <= k:
                raise MachineFileError(w, f"IndexOutOfRange: i={i!r} with k={k}")
            atoms.append(head_eq(i, neg))
        elif kind == "peb":
            j = obj.get("j")
            if not isinstance(i, int) or not isinstance(j, int) or not (
                1 <= i <= k and 1 <= j <= k
            ):
                raise MachineFileError(w, f"IndexOutOfRange: i={i!r}, j={j!r} with k={k}")
            atoms.append(peb_eq(i, j, neg))
        else:
            raise MachineFileError(w, f"bad atom kind {kind!r}")
    return Test.of(*atoms)


def _op_to_json(op: PebbleOp):
    if op.is_nop():
        return {"kind": "nop"}
    return {"kind": op.kind, "index": op.index}


def _op_from_json(value, where: str, k: int) -> PebbleOp:
    if not isinstance(value, dict):
        raise MachineFileError(where, f"bad op {value!r}")
    unknown = set(value) - {"kind", "index"}
    if unknown:
        raise MachineFileError(where, f"unknown op fields {sorted(unknown)}")
    kind = value.get("kind")
    if kind == "nop":
        if "index" in value:
            raise MachineFileError(where, "nop takes no index")
        return NOP
    if kind not in ("drop", "lift"):
        raise MachineFileError(where, f"bad op kind {kind!r}")
    index = value.get("index")
    if not isinstance(index, int) or not 1 <= index <= k:
        raise MachineFileError(where, f"IndexOutOfRange: index={index!r} with k={k}")
    return PebbleOp(kind, index)


# ---------------------------------------------------------------------------
# Whole machines


def state_name(state) -> str:
    return state if isinstance(state, str) else repr(state)


def serialize(machine: Transducer) -> str:
    """Canonical textual form: states and transitions sorted, stable keys."""
    names = {s: state_name(s) for s in machine.polarity}
    if len(set(names.values())) != len(names):
        raise MachineFileError("states", "state names collide under stringification")

    def sym_key(s: Symbol):
        return s.sort_key()

    states = sorted(
        ({"id": names[s], "polarity": machine.pol(s)} for s in machine.polarity),
        key=lambda d: d["id"],
    )
    transitions = sorted(
        (
            {
                "from": names[t.src],
                "letter": _symbol_to_json(t.letter),
                "test": _test_to_json(t.test),
                "op": _op_to_json(t.op),
                "to": names[t.dst],
                "output": [_symbol_to_json(s) for s in t.out],
            }
            for t in machine.transitions
        ),
        key=lambda d: json.dumps(d, sort_keys=True),
    )
    doc = {
        "format_version": FORMAT_VERSION,
        "name": machine.name,
        "pebbles": machine.k,
        "equality_tests": machine.equality_tests_allowed,
        "input_alphabet": [_symbol_to_json(s) for s in sorted(machine.input_alphabet, key=sym_key)],
        "output_alphabet": [_symbol_to_json(s) for s in sorted(machine.output_alphabet, key=sym_key)],
        "states": states,
        "initial": names[machine.initial],
        "final": names[machine.final],
        "transitions": transitions,
    }
    return json.dumps(doc, indent=2, sort_keys=False, ensure_ascii=False) + "\n"


_TOP_FIELDS = {
    "format_version", "name", "pebbles", "equality_tests", "input_alphabet",
    "output_alphabet", "states", "initial", "final", "transitions",
}


def parse(text: str) -> Transducer:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise MachineFileError(f"line {e.lineno}, column {e.colno}", e.msg) from e
    if not isinstance(doc, dict):
        raise MachineFileError("document", "expected a JSON object")
    unknown = set(doc) - _TOP_FIELDS
    if unknown:
        raise MachineFileError("document", f"unknown fields {sorted(unknown)}")
    missing = _TOP_FIELDS - set(doc)
    if missing:
        raise MachineFileError("document", f"missing fields {sorted(missing)}")
    if doc["format_version"] != FORMAT_VERSION:
        raise MachineFileError("format_version", f"unsupported version {doc['format_version']!r}")
    k = doc["pebbles"]
    if not isinstance(k, int) or k < 0:
        raise MachineFileError("pebbles", f"bad pebble count {k!r}")
    input_alphabet = frozenset(
        _symbol_from_json(v, f"input_alphabet[{i}]") for i, v in enumerate(doc["input_alphabet"])
    )
    output_alphabet = frozenset(
        _symbol_from_json(v, f"output_alphabet[{i}]") for i, v in enumerate(doc["output_alphabet"])
    )
    polarity: dict = {}
    for i, st in enumerate(doc["states"]):
        where = f"states[{i}]"
        if not isinstance(st, dict) or set(st) != {"id", "polarity"}:
            raise MachineFileError(where, f"expected {{id, polarity}}, got {st!r}")
        if st["polarity"] not in (-1, 0, 1):
            raise MachineFileError(where, f"bad polarity {st['polarity']!r}")
        if st["id"] in polarity:
            raise MachineFileError(where, f"duplicate state {st['id']!r}")
        polarity[st["id"]] = st["polarity"]

    def known_state(s, where):
        if s not in polarity:
            raise MachineFileError(where, f"UnknownState: {s!r}")
        return s

    transitions = []
    for i, tr in enumerate(doc["transitions"]):
        where = f"transitions[{i}]"
        if not isinstance(tr, dict):
            raise MachineFileError(where, f"expected an object, got {tr!r}")
        unknown = set(tr) - {"from", "letter", "test", "op", "to", "output"}
        if unknown:
            raise MachineFileError(where, f"unknown fields {sorted(unknown)}")
        transitions.append(
            Transition(
                known_state(tr["from"], f"{where}.from"),
                _symbol_from_json(tr.get("letter"), f"{where}.letter"),
                _test_from_json(tr.get("test", []), f"{where}.test", k),
                _op_from_json(tr.get("op", {"kind": "nop"}), f"{where}.op", k),
                known_state(tr["to"], f"{where}.to"),
                tuple(
                    _symbol_from_json(v, f"{where}.output[{j}]")
                    for j, v in enumerate(tr.get("output", []))
                ),
            )
        )
    return Transducer(
        name=doc["name"],
        k=k,
        input_alphabet=input_alphabet,
        output_alphabet=output_alphabet,
        polarity=polarity,
        initial=known_state(doc["initial"], "initial"),
        final=known_state(doc["final"], "final"),
        transitions=tuple(transitions),
        equality_tests_allowed=bool(doc["equality_tests"]),
    )


def load(path) -> Transducer:
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh.read())


def save(machine: Transducer, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(machine))
