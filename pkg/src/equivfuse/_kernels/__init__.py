"""Speed kernels with a pure-Python fallback.

The compiled extension is preferred when it imported cleanly; otherwise the
pure implementations take over with identical results. Set EQUIVFUSE_PURE=1
to force the pure backend regardless (useful for debugging and benchmarks).
"""

import os

from equivfuse._kernels.tape import Tape, TapeOverflow, compile_tape

if os.environ.get("EQUIVFUSE_PURE") == "1":
    from equivfuse._kernels import pure as _impl
else:
    try:
        from equivfuse._kernels import _speed as _impl  # type: ignore[no-redef]
    except ImportError:
        from equivfuse._kernels import pure as _impl

BACKEND = _impl.BACKEND
eval_tape = _impl.eval_tape
enum_first_diff = _impl.enum_first_diff
sat_solve = _impl.sat_solve

__all__ = [
    "BACKEND", "Tape", "TapeOverflow", "compile_tape",
    "eval_tape", "enum_first_diff", "sat_solve",
]
