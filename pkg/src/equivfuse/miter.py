"""Port matching and miter construction.

A miter instantiates the specification and the implementation under shared
inputs and reduces "do they ever disagree" to the satisfiability of a
single 1-bit output ``neq``: the OR, over all matched output pairs, of a
word-level not-equal.  Sequential designs are time-frame expanded first and
outputs are compared per the transaction policy (final frame by default);
the two sides may be unrolled to different depths when their latencies
differ, in which case each side's own final frame is compared.

Input sharing is per frame: the frame-t miter input feeds both sides'
frame-t copies, named after the spec-side port.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from equivfuse import errors
from equivfuse.core import Builder, CoreModule, const_fold, unroll_sequential
from equivfuse.core.aig import Aig
from equivfuse.core.bitblast import bitblast
from equivfuse.core.fold import _rebuild

MITER_MODES = ("smtlib", "btor2", "aiger")


@dataclass
class PortMap:
    """Bijective pairing of spec and impl ports: (spec name, impl name,
    direction).  ``unmatched`` is always empty on success; matching errors
    raise instead."""

    pairs: list[tuple[str, str, str]]
    unmatched: list[tuple[str, str]] = field(default_factory=list)

    def inputs(self) -> list[tuple[str, str]]:
        return [(s, i) for s, i, d in self.pairs if d == "in"]

    def outputs(self) -> list[tuple[str, str]]:
        return [(s, i) for s, i, d in self.pairs if d == "out"]


def match_ports(spec: CoreModule, impl: CoreModule, directives: dict | None = None) -> PortMap:
    """Bind ports by exact name; directives may rename ports on either side
    before matching (``{"rename_spec": {old: new}, "rename_impl": {...}}``).
    Any mismatch in count, name, direction, or width raises."""
    directives = directives or {}
    rn_spec = directives.get("rename_spec", {})
    rn_impl = directives.get("rename_impl", {})
    if len(spec.ports) != len(impl.ports):
        raise errors.CountMismatch(len(spec.ports), len(impl.ports))
    impl_by_name = {rn_impl.get(p.name, p.name): p for p in impl.ports}
    pairs = []
    for sp in spec.ports:
        key = rn_spec.get(sp.name, sp.name)
        ip = impl_by_name.get(key)
        if ip is None:
            raise errors.NameMissing("impl", sp.name)
        if sp.direction != ip.direction:
            raise errors.DirectionMismatch(sp.name)
        if sp.width != ip.width:
            raise errors.WidthMismatch(
                f"port {sp.name!r}: spec is {sp.width} bits, impl is {ip.width}",
                name=sp.name, spec_w=sp.width, impl_w=ip.width)
        pairs.append((sp.name, ip.name, sp.direction))
    return PortMap(pairs)


@dataclass
class MiterModule:
    """The miter circuit plus everything needed to interpret its verdicts:
    the original sides for counterexample replay, the port map, and the
    frame bookkeeping."""

    module: CoreModule
    spec: CoreModule
    impl: CoreModule
    pm: PortMap
    mode: str
    spec_k: int
    impl_k: int
    suffixed: bool
    compare_frames: list[tuple[int, int]]
    output_pairs: list[tuple[str, str, int, int]]
    aig: Aig | None = None

    @property
    def n_frames(self) -> int:
        return max(self.spec_k, self.impl_k)

    def in_port_name(self, spec_port: str, frame: int) -> str:
        return f"{spec_port}@{frame}" if self.suffixed else spec_port

    def to_json(self) -> dict:
        return {
            "module": self.module.to_json(),
            "spec": self.spec.to_json(),
            "impl": self.impl.to_json(),
            "pairs": [list(p) for p in self.pm.pairs],
            "mode": self.mode,
            "spec_k": self.spec_k,
            "impl_k": self.impl_k,
            "suffixed": self.suffixed,
            "compare_frames": [list(p) for p in self.compare_frames],
            "output_pairs": [list(p) for p in self.output_pairs],
        }

    @classmethod
    def from_json(cls, data: dict) -> "MiterModule":
        m = cls(
            module=CoreModule.from_json(data["module"]),
            spec=CoreModule.from_json(data["spec"]),
            impl=CoreModule.from_json(data["impl"]),
            pm=PortMap([tuple(p) for p in data["pairs"]]),
            mode=data["mode"],
            spec_k=data["spec_k"],
            impl_k=data["impl_k"],
            suffixed=data["suffixed"],
            compare_frames=[tuple(p) for p in data["compare_frames"]],
            output_pairs=[tuple(p) for p in data["output_pairs"]],
        )
        if m.mode == "aiger":
            m.aig = bitblast(m.module).aig
        return m


def _instantiate(b: Builder, module: CoreModule, input_nodes: dict[str, int]) -> dict[str, int]:
    """Copy a combinational module's logic into ``b``, driving each input
    port from ``input_nodes``.  Returns output name -> node."""
    remap: list[int] = [0] * module.num_nodes
    for i, kind in enumerate(module.kinds):
        if kind == "const":
            remap[i] = b.const(module.attrs[i], module.widths[i])
        elif kind == "input":
            remap[i] = input_nodes[module.ports[module.attrs[i]].name]
        elif kind == "reg":
            raise errors.HasState(f"{module.name!r} must be unrolled first")
        else:
            args = tuple(remap[a] for a in module.args[i])
            remap[i] = _rebuild(b, kind, args, module.attrs[i], module.widths[i])
    return {name: remap[nid] for name, nid in module.outputs.items()}


def build_miter(
    spec: CoreModule,
    impl: CoreModule,
    pm: PortMap,
    mode: str = "smtlib",
    k: int | None = None,
    *,
    spec_k: int | None = None,
    impl_k: int | None = None,
    compare_frames: str | list[int] = "last",
) -> MiterModule:
    if mode not in MITER_MODES:
        raise ValueError(f"unknown miter mode {mode!r}")
    ks = spec_k if spec_k is not None else k
    ki = impl_k if impl_k is not None else k
    if spec.registers and ks is None:
        raise errors.NeedsUnrollDepth(spec.name)
    if impl.registers and ki is None:
        raise errors.NeedsUnrollDepth(impl.name)

    suffixed = ks is not None or ki is not None
    ks = ks or 1
    ki = ki or 1
    if suffixed:
        spec_u = unroll_sequential(spec, ks)
        impl_u = unroll_sequential(impl, ki)
    else:
        spec_u, impl_u = spec, impl

    if compare_frames == "last":
        frame_pairs = [(ks - 1, ki - 1)]
    elif compare_frames == "all":
        if ks != ki:
            raise ValueError("compare-frames=all requires equal unroll depths")
        frame_pairs = [(t, t) for t in range(ks)]
    else:
        for t in compare_frames:
            if not (0 <= t < ks and 0 <= t < ki):
                raise ValueError(f"compared frame {t} outside both unroll depths")
        frame_pairs = [(t, t) for t in compare_frames]

    b = Builder(f"miter_{spec.name}_{impl.name}")
    spec_in: dict[str, int] = {}
    impl_in: dict[str, int] = {}
    widths = {p.name: p.width for p in spec.in_ports()}
    for s, i in pm.inputs():
        for t in range(max(ks, ki)):
            name = f"{s}@{t}" if suffixed else s
            node = b.add_in_port(name, widths[s])
            if t < ks:
                spec_in[name] = node
            if t < ki:
                impl_in[f"{i}@{t}" if suffixed else i] = node

    spec_out = _instantiate(b, spec_u, spec_in)
    impl_out = _instantiate(b, impl_u, impl_in)

    neq = b.const(0, 1)
    output_pairs = []
    for s, i in pm.outputs():
        for ts, ti in frame_pairs:
            sn = f"{s}@{ts}" if suffixed else s
            im = f"{i}@{ti}" if suffixed else i
            neq = b.or_(neq, b.ne(spec_out[sn], impl_out[im]))
            output_pairs.append((s, i, ts, ti))
    b.add_out_port("neq", 1, neq)

    m = MiterModule(
        module=const_fold(b.finish()),
        spec=spec,
        impl=impl,
        pm=pm,
        mode=mode,
        spec_k=ks,
        impl_k=ki,
        suffixed=suffixed,
        compare_frames=frame_pairs,
        output_pairs=output_pairs,
    )
    if mode == "aiger":
        m.aig = bitblast(m.module).aig
    return m
