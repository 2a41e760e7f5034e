"""Reversible pebble transducers: model, analysis, and constructions."""

from .core import (
    ENDMARKER,
    FALSE,
    NOP,
    TRUE,
    Atom,
    Configuration,
    PebbleOp,
    Symbol,
    Test,
    Transducer,
    Transition,
    apply_op,
    drop,
    eval_test,
    head_eq,
    lift,
    peb_eq,
    reverse_op,
    satisfiable,
    shift_op,
    shift_test,
    test_of_op,
    word_symbols,
)
from .runner import (
    EnumResult,
    RunResult,
    enumerate_runs,
    run,
    semantics,
    step,
    step_back,
)

__all__ = [name for name in dir() if not name.startswith("_")]
