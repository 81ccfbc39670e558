from equivfuse.backends.base import Counterexample, EmittedProblem
from equivfuse.backends.smtlib import emit_smtlib
from equivfuse.backends.btor2 import emit_btor2
from equivfuse.backends.aiger import emit_aiger
from equivfuse.backends.dimacs import emit_dimacs
from equivfuse.backends.model import parse_model

from equivfuse.miter import MiterModule


def emit(m: MiterModule) -> EmittedProblem:
    """Emit a miter in its own mode's format."""
    if m.mode == "smtlib":
        return emit_smtlib(m)
    if m.mode == "btor2":
        return emit_btor2(m)
    if m.mode == "aiger":
        return emit_aiger(m.aig, suffixed=m.suffixed, n_frames=m.n_frames)
    raise ValueError(f"unknown miter mode {m.mode!r}")


__all__ = [
    "Counterexample", "EmittedProblem", "emit",
    "emit_smtlib", "emit_btor2", "emit_aiger", "emit_dimacs", "parse_model",
]
