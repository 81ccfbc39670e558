from equivfuse.core.module import (
    Builder, CoreModule, Port, Register, mask, pack_elements, to_signed,
    unpack_elements,
)
from equivfuse.core.simulate import simulate, simulate_comb
from equivfuse.core.fold import const_fold
from equivfuse.core.lower import lower_hir
from equivfuse.core.unroll import unroll_sequential

__all__ = [
    "Builder", "CoreModule", "Port", "Register",
    "simulate", "simulate_comb", "const_fold", "lower_hir",
    "unroll_sequential",
    "mask", "pack_elements", "to_signed", "unpack_elements",
]
