"""Shared backend types: emitted problems and counterexamples.

Symbol tables map solver-level identifiers (SMT symbol, BTOR2 input
position, AIG literal, CNF variable) back to (port, frame, bit, width).
The table is the only authoritative reverse mapping; emitted names are
sanitized lossily and never re-parsed.
"""

from __future__ import annotations

from dataclasses import dataclass, field


def symbol_entry(port: str, frame: int, bit: int | None, width: int) -> dict:
    return {"port": port, "frame": frame, "bit": bit, "width": width}


def split_frame(name: str, suffixed: bool) -> tuple[str, int]:
    """Miter port name -> (base port, frame index)."""
    if suffixed and "@" in name:
        base, _, t = name.rpartition("@")
        return base, int(t)
    return name, 0


@dataclass
class EmittedProblem:
    format: str
    text: str
    symbols: dict[str, dict]
    suffix: str
    n_frames: int = 1

    def write(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.text)


@dataclass
class Counterexample:
    """Inputs that expose a divergence: one dict per frame, keyed by the
    original (unsuffixed) port name."""

    frames: list[dict[str, int]]
    defaulted: list[str] = field(default_factory=list)
    observed: list[tuple] | None = None

    def to_json(self) -> dict:
        return {"frames": self.frames, "defaulted": self.defaulted}

    @classmethod
    def empty(cls, n_frames: int) -> "Counterexample":
        return cls([{} for _ in range(n_frames)])

    def set_bits(self, port: str, frame: int, bit: int | None, value: int) -> None:
        fr = self.frames[frame]
        if bit is None:
            fr[port] = value
        else:
            fr[port] = fr.get(port, 0) | ((value & 1) << bit)
