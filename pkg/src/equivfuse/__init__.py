"""equivfuse: cross-abstraction equivalence checking for hardware designs.

Frontends for a C-like algorithmic subset, tensor operator graphs, and
structural gate-level netlists all lower into one word-level SSA core IR.
Miters built over that IR are discharged by internal engines (exhaustive
enumeration, SAT) or external solvers via SMT-LIB2, BTOR2, AIGER, and
DIMACS emitters.
"""

__version__ = "0.1.0"

from equivfuse import errors  # noqa: F401
