from equivfuse.hir.ast import (
    HirExpr, HirFunction, HirProgram, HirStmt, HirType, Param, U1,
    Assign, Binary, Cast, Const, For, If, Index, Unary, Var,
    array, scalar,
)
from equivfuse.hir.parser import parse_mini_c
from equivfuse.hir.check import check
from equivfuse.hir.interp import interpret

__all__ = [
    "HirType", "Param", "HirFunction", "HirProgram", "HirStmt", "HirExpr", "U1",
    "For", "If", "Assign", "Const", "Var", "Index", "Binary", "Unary", "Cast",
    "array", "scalar", "parse_mini_c", "check", "interpret",
]
