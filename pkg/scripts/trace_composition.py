#!/usr/bin/env python3
"""Show the composed machine rewinding its first stage.

Composes the '!'-marking variant of squaring with the iterated reverse and
prints the fragment of the run on 'bcd' where the second machine walks left
over the produced string, so the first machine's run is replayed backwards
(watch the pebble being undropped and re-lifted one position earlier).
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from pebbletx.builtins import iterated_reverse, modified_squaring  # noqa: E402
from pebbletx.compose import compose  # noqa: E402
from pebbletx.runner import run  # noqa: E402


def main() -> int:
    first = modified_squaring("bcd")
    second = iterated_reverse("bcd")
    composed = compose(first, second)
    kinds = composed.metadata["kinds"]
    result = run(composed, "bcd", trace=True)
    print(f"input 'bcd' -> {' '.join(s.render() for s in result.output)}")
    print(f"{len(result.trace)} steps; showing the backward fragment:\n")
    seq = [kinds[t] for t, _ in result.trace]
    target = ["tr-b", "sw-b", "tr-b", "mv-b", "mv-b", "mv-b",
              "mv-b", "mv-b", "sw-b", "tr-b", "sw-b", "tr-b"]
    start = next(
        i for i in range(len(seq)) if seq[i : i + len(target)] == target
    )
    for offset in range(len(target)):
        t, c = result.trace[start + offset]
        out = "".join(s.render() for s in t.out) or "-"
        print(
            f"  {offset + 1:>2} {kinds[t]:<5} reads {t.letter.render()}"
            f" emits {out:<2} -> state={c.state} peb={list(c.peb)} head={c.head}"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
