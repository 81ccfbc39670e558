"""And-inverter graphs with structural hashing.

Literal encoding follows the AIGER convention: variable v becomes literal
2v, negation sets the low bit, and the constants are literal 0 (false) and
1 (true).  ANDs are deduplicated under commutativity (the hash key is the
sorted operand pair; storage keeps call order), and the trivial cases
(constant operand, x & x, x & ~x) never allocate a node.
"""

from __future__ import annotations

FALSE = 0
TRUE = 1


class Aig:
    def __init__(self, name: str = "aig"):
        self.name = name
        self.inputs: list[tuple[str, int]] = []
        self.ands: list[tuple[int, int, int]] = []
        self.outputs: list[tuple[str, int]] = []
        self._strash: dict[tuple[int, int], int] = {}
        self._next_var = 1

    @property
    def num_vars(self) -> int:
        return self._next_var - 1

    def add_input(self, name: str) -> int:
        lit = 2 * self._next_var
        self._next_var += 1
        self.inputs.append((name, lit))
        return lit

    def add_output(self, name: str, lit: int) -> None:
        self.outputs.append((name, lit))

    def and_(self, a: int, b: int) -> int:
        lo, hi = (a, b) if a <= b else (b, a)
        if lo == FALSE or hi == (lo ^ 1):
            return FALSE
        if lo == TRUE or lo == hi:
            return hi
        key = (lo, hi)
        hit = self._strash.get(key)
        if hit is not None:
            return hit
        lhs = 2 * self._next_var
        self._next_var += 1
        # Operands keep call order; the hash key alone is normalized.
        self.ands.append((lhs, a, b))
        self._strash[key] = lhs
        return lhs

    def or_(self, a: int, b: int) -> int:
        return self.and_(a ^ 1, b ^ 1) ^ 1

    def xor_(self, a: int, b: int) -> int:
        return self.or_(self.and_(a, b ^ 1), self.and_(a ^ 1, b))

    def mux(self, s: int, a: int, b: int) -> int:
        """a when s else b."""
        return self.or_(self.and_(s, a), self.and_(s ^ 1, b))

    def eval(self, in_vals: dict[str, int]) -> dict[str, int]:
        """Reference evaluation with 0/1 input values per input name."""
        val = [0] * (self._next_var * 2)
        val[TRUE] = 1
        for name, lit in self.inputs:
            val[lit] = in_vals[name] & 1
            val[lit ^ 1] = val[lit] ^ 1
        for lhs, a, b in self.ands:
            val[lhs] = val[a] & val[b]
            val[lhs ^ 1] = val[lhs] ^ 1
        return {name: val[lit] for name, lit in self.outputs}
