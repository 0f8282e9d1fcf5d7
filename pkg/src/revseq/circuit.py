"""Circuit netlists: data model, DSL parser/formatter, validation, builtins.

A circuit is a list of gate instances wired by named wires, plus primary
inputs, named constants, and state variables. Feedback is explicit: a state
variable ``Q`` exposes the readable tap ``Q.prev`` and expects exactly one
gate output named ``Q.next``; severing feedback at these taps makes the
instance graph a DAG (the *cut graph*), which is what simulation and delay
computation operate on.

DSL example (one statement per line, ``#`` comments)::

    circuit d_latch
    input CLK, D
    state Q = 0
    const ONE = 1
    gate g1 : MG1 (CLK, D, Q.prev, ONE) -> (nCLK, g, Q.next, Qbar)
    output Q.next as Q, Qbar as Qn
    garbage g
"""

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from .errors import ParseError, RevseqError, ValidationError
from .gates import GateRegistry

__all__ = [
    "GateInstance", "StateVar", "OutputExport", "Diagnostic", "Circuit",
    "parse_circuit", "format_circuit", "validate", "topo_order", "require_valid",
    "builtin_designs", "builtin_circuit_text", "BUILTIN_DESIGN_NAMES",
]

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_WIRE_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*(\.(prev|next))?")

BUILTIN_DESIGN_NAMES = ("d_latch", "ms_d_ff", "jk_latch", "ms_jk_ff")


@dataclass(frozen=True)
class GateInstance:
    id: str
    gate_name: str
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    # source location only; two instances parsed from differently laid-out
    # files still count as equal
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class StateVar:
    name: str
    init: int = 0

    @property
    def prev_wire(self) -> str:
        return f"{self.name}.prev"

    @property
    def next_wire(self) -> str:
        return f"{self.name}.next"


@dataclass(frozen=True)
class OutputExport:
    wire: str
    label: str


@dataclass(frozen=True)
class Diagnostic:
    severity: str            # "error" | "warning"
    code: str
    message: str
    line: int = 0

    def __str__(self) -> str:
        loc = f" (line {self.line})" if self.line else ""
        return f"{self.severity}[{self.code}]: {self.message}{loc}"


@dataclass(frozen=True)
class Circuit:
    name: str
    inputs: tuple[str, ...] = ()
    constants: tuple[tuple[str, int], ...] = ()
    states: tuple[StateVar, ...] = ()
    instances: tuple[GateInstance, ...] = ()
    exports: tuple[OutputExport, ...] = ()
    garbage: tuple[str, ...] = ()
    clock: str | None = None

    @property
    def const_map(self) -> dict[str, int]:
        return dict(self.constants)

    @property
    def state_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.states)

    def clock_input(self) -> str | None:
        """The designated clock: an explicit `clock` statement, else an
        input literally named CLK."""
        if self.clock is not None:
            return self.clock
        return "CLK" if "CLK" in self.inputs else None

    def drivers(self) -> dict[str, str]:
        """Map wire -> driver description; gate outputs map to 'gate:ID'."""
        d: dict[str, str] = {}
        for n in self.inputs:
            d[n] = "input"
        for n, _ in self.constants:
            d[n] = "const"
        for s in self.states:
            d[s.prev_wire] = "state"
        for inst in self.instances:
            for w in inst.outputs:
                d.setdefault(w, f"gate:{inst.id}")
        return d


# ---------------------------------------------------------------------------
# Parsing

def _check_wire(w: str, lineno: int) -> str:
    if not _WIRE_RE.fullmatch(w):
        raise ParseError(f"invalid wire name {w!r}", lineno,
                         expected=("identifier", "id.prev", "id.next"))
    return w


def _split_list(blob: str, lineno: int) -> list[str]:
    parts = [p.strip() for p in blob.split(",")]
    if parts == [""]:
        return []
    if any(not p for p in parts):
        raise ParseError("empty entry in comma-separated list", lineno)
    return parts


_GATE_STMT_RE = re.compile(
    r"gate\s+(\w+)\s*:\s*(\w+)\s*\(\s*([^)]*)\)\s*->\s*\(\s*([^)]*)\)\s*$")
_BIT_RE = re.compile(r"[01]$")


def parse_circuit(text: str) -> Circuit:
    """Parse DSL text into a Circuit.

    Only structural problems are rejected here (syntax, duplicate
    declarations); wiring problems are left for :func:`validate` so that a
    circuit with, say, an undriven wire still parses and can be reported on.
    """
    name: str | None = None
    clock: str | None = None
    inputs: list[str] = []
    constants: list[tuple[str, int]] = []
    states: list[StateVar] = []
    instances: list[GateInstance] = []
    exports: list[OutputExport] = []
    garbage: list[str] = []
    declared: dict[str, str] = {}   # plain-name declarations: name -> kind
    instance_ids: set[str] = set()
    labels: set[str] = set()

    def declare(n: str, kind: str, lineno: int) -> None:
        if not _IDENT_RE.fullmatch(n):
            raise ParseError(f"invalid identifier {n!r}", lineno)
        if n in declared:
            raise ParseError(f"duplicate declaration of {n!r} (already a {declared[n]})", lineno)
        declared[n] = kind

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        word = line.split(None, 1)[0]
        rest = line[len(word):].strip()

        if word == "circuit":
            if name is not None:
                raise ParseError("duplicate circuit statement", lineno)
            if not _IDENT_RE.fullmatch(rest):
                raise ParseError(f"invalid circuit name {rest!r}", lineno)
            name = rest
        elif word == "clock":
            if clock is not None:
                raise ParseError("duplicate clock statement", lineno)
            if not _IDENT_RE.fullmatch(rest):
                raise ParseError(f"invalid clock name {rest!r}", lineno)
            clock = rest
        elif word == "input":
            for n in _split_list(rest, lineno):
                declare(n, "input", lineno)
                inputs.append(n)
        elif word == "const":
            m = re.fullmatch(r"(\w+)\s*=\s*([01])", rest)
            if not m:
                raise ParseError("malformed const statement", lineno,
                                 expected=("const NAME = 0|1",))
            declare(m.group(1), "const", lineno)
            constants.append((m.group(1), int(m.group(2))))
        elif word == "state":
            m = re.fullmatch(r"(\w+)(?:\s*=\s*([01]))?", rest)
            if not m:
                raise ParseError("malformed state statement", lineno,
                                 expected=("state NAME [= 0|1]",))
            declare(m.group(1), "state", lineno)
            states.append(StateVar(m.group(1), int(m.group(2) or 0)))
        elif word == "gate":
            m = _GATE_STMT_RE.fullmatch(line)
            if not m:
                raise ParseError("malformed gate statement", lineno,
                                 expected=("gate ID : NAME (wires) -> (wires)",))
            inst_id, gname, ins, outs = m.groups()
            if inst_id in instance_ids:
                raise ParseError(f"duplicate gate instance id {inst_id!r}", lineno)
            instance_ids.add(inst_id)
            in_wires = tuple(_check_wire(w, lineno) for w in _split_list(ins, lineno))
            out_wires = tuple(_check_wire(w, lineno) for w in _split_list(outs, lineno))
            instances.append(GateInstance(inst_id, gname, in_wires, out_wires, lineno))
        elif word == "output":
            for part in _split_list(rest, lineno):
                m = re.fullmatch(r"(\S+)(?:\s+as\s+(\w+))?", part)
                if not m:
                    raise ParseError(f"malformed output entry {part!r}", lineno,
                                     expected=("wire [as LABEL]",))
                wire = _check_wire(m.group(1), lineno)
                label = m.group(2) or wire
                if label in labels:
                    raise ParseError(f"duplicate output label {label!r}", lineno)
                labels.add(label)
                exports.append(OutputExport(wire, label))
        elif word == "garbage":
            for w in _split_list(rest, lineno):
                _check_wire(w, lineno)
                if w in garbage:
                    raise ParseError(f"duplicate garbage entry {w!r}", lineno)
                garbage.append(w)
        else:
            raise ParseError(f"unknown statement {word!r}", lineno,
                             expected=("circuit", "clock", "input", "state", "const",
                                       "gate", "output", "garbage"))

    if name is None:
        raise ParseError("missing circuit statement")
    return Circuit(name=name, inputs=tuple(inputs), constants=tuple(constants),
                   states=tuple(states), instances=tuple(instances),
                   exports=tuple(exports), garbage=tuple(garbage), clock=clock)


def format_circuit(circuit: Circuit) -> str:
    """Canonical DSL rendering; parsing it back yields an equal Circuit."""
    lines = [f"circuit {circuit.name}"]
    if circuit.clock is not None:
        lines.append(f"clock {circuit.clock}")
    if circuit.inputs:
        lines.append(f"input {', '.join(circuit.inputs)}")
    for s in circuit.states:
        lines.append(f"state {s.name} = {s.init}")
    for n, v in circuit.constants:
        lines.append(f"const {n} = {v}")
    for inst in circuit.instances:
        lines.append(f"gate {inst.id} : {inst.gate_name} "
                     f"({', '.join(inst.inputs)}) -> ({', '.join(inst.outputs)})")
    if circuit.exports:
        parts = [e.wire if e.label == e.wire else f"{e.wire} as {e.label}"
                 for e in circuit.exports]
        lines.append(f"output {', '.join(parts)}")
    if circuit.garbage:
        lines.append(f"garbage {', '.join(circuit.garbage)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Validation

def _instance_edges(circuit: Circuit) -> dict[str, set[str]]:
    """Cut-graph adjacency: edge A -> B when an output wire of A feeds B."""
    producer: dict[str, str] = {}
    for inst in circuit.instances:
        for w in inst.outputs:
            producer.setdefault(w, inst.id)
    edges: dict[str, set[str]] = {inst.id: set() for inst in circuit.instances}
    for inst in circuit.instances:
        for w in inst.inputs:
            src = producer.get(w)
            if src is not None:
                # a self-edge (gate output wired to its own input) is a
                # combinational loop and must surface as CYCLE
                edges[src].add(inst.id)
    return edges


def topo_order(circuit: Circuit) -> list[GateInstance] | None:
    """Instances in dependency order over the cut graph; None if cyclic."""
    edges = _instance_edges(circuit)
    indeg = {i: 0 for i in edges}
    for src, dsts in edges.items():
        for d in dsts:
            indeg[d] += 1
    by_id = {inst.id: inst for inst in circuit.instances}
    # seed with declaration order so the result is deterministic
    ready = [i.id for i in circuit.instances if indeg[i.id] == 0]
    out: list[GateInstance] = []
    while ready:
        cur = ready.pop(0)
        out.append(by_id[cur])
        for d in sorted(edges[cur]):
            indeg[d] -= 1
            if indeg[d] == 0:
                ready.append(d)
    if len(out) != len(circuit.instances):
        return None
    return out


def require_valid(circuit: Circuit, registry: GateRegistry) -> list[GateInstance]:
    """Validate and return the topological instance order, or raise
    :class:`ValidationError` carrying the error diagnostics."""
    errors = [d for d in validate(circuit, registry) if d.severity == "error"]
    if errors:
        raise ValidationError(errors)
    return topo_order(circuit)


def validate(circuit: Circuit, registry: GateRegistry) -> list[Diagnostic]:
    """Structural checks. Errors block simulation; warnings are lints.

    Error codes: UNKNOWN_GATE, ARITY, UNDRIVEN, MULTIDRIVE, NEXT_UNDRIVEN,
    CYCLE. Warning codes: FANOUT (a gate-output wire with more than one
    sink), GARBAGE_USED (declared garbage that is consumed or exported, or
    is not a gate output), EMPTY (no gate instances).
    """
    diags: list[Diagnostic] = []
    err = lambda code, msg, line=0: diags.append(Diagnostic("error", code, msg, line))
    warn = lambda code, msg, line=0: diags.append(Diagnostic("warning", code, msg, line))

    driver_counts: dict[str, list[str]] = {}
    for n in circuit.inputs:
        driver_counts.setdefault(n, []).append("input")
    for n, _ in circuit.constants:
        driver_counts.setdefault(n, []).append("const")
    for s in circuit.states:
        driver_counts.setdefault(s.prev_wire, []).append(f"state {s.name}")
    for inst in circuit.instances:
        for w in inst.outputs:
            driver_counts.setdefault(w, []).append(f"gate {inst.id}")

    for w, sources in driver_counts.items():
        if len(sources) > 1:
            err("MULTIDRIVE", f"wire '{w}' has {len(sources)} drivers ({', '.join(sources)})")

    gate_output_wires = {w for inst in circuit.instances for w in inst.outputs}
    state_next = {s.next_wire for s in circuit.states}

    for inst in circuit.instances:
        if inst.gate_name not in registry:
            err("UNKNOWN_GATE", f"instance '{inst.id}' uses unknown gate '{inst.gate_name}'",
                inst.line)
        else:
            k = registry.get(inst.gate_name).arity
            if len(inst.inputs) != k or len(inst.outputs) != k:
                err("ARITY", f"instance '{inst.id}': gate {inst.gate_name} has arity {k}, "
                             f"got {len(inst.inputs)} inputs and {len(inst.outputs)} outputs",
                    inst.line)
        for w in inst.inputs:
            if w not in driver_counts:
                err("UNDRIVEN", f"wire '{w}' used as input of '{inst.id}' has no driver",
                    inst.line)

    for e in circuit.exports:
        if e.wire not in driver_counts:
            err("UNDRIVEN", f"exported wire '{e.wire}' has no driver")
    for w in circuit.garbage:
        if w not in driver_counts:
            err("UNDRIVEN", f"declared-garbage wire '{w}' has no driver")

    for s in circuit.states:
        if s.next_wire not in gate_output_wires:
            err("NEXT_UNDRIVEN", f"state '{s.name}' has no gate output driving {s.next_wire}")

    if topo_order(circuit) is None:
        err("CYCLE", "combinational cycle: instance graph is cyclic after cutting "
                     "feedback at state variables")

    # fan-out lint: sinks are gate inputs, exports, and the state update
    sink_counts: dict[str, int] = {}
    for inst in circuit.instances:
        for w in inst.inputs:
            sink_counts[w] = sink_counts.get(w, 0) + 1
    for e in circuit.exports:
        sink_counts[e.wire] = sink_counts.get(e.wire, 0) + 1
    for w in state_next:
        sink_counts[w] = sink_counts.get(w, 0) + 1
    for w in sorted(gate_output_wires):
        if sink_counts.get(w, 0) > 1:
            warn("FANOUT", f"gate output '{w}' drives {sink_counts[w]} sinks")

    exported = {e.wire for e in circuit.exports}
    for w in circuit.garbage:
        if w not in gate_output_wires:
            if w in driver_counts:
                warn("GARBAGE_USED", f"declared-garbage wire '{w}' is not a gate output")
        elif w in exported or sink_counts.get(w, 0) > 0:
            warn("GARBAGE_USED", f"declared-garbage wire '{w}' is consumed or exported")

    if not circuit.instances:
        warn("EMPTY", "circuit has no gate instances")

    return diags


# ---------------------------------------------------------------------------
# Builtin designs

def builtin_circuit_text(name: str) -> str:
    """Source text of a shipped circuit file (see BUILTIN_DESIGN_NAMES)."""
    if name not in BUILTIN_DESIGN_NAMES:
        raise RevseqError(f"unknown builtin circuit '{name}' "
                          f"(have: {', '.join(BUILTIN_DESIGN_NAMES)})")
    return (resources.files("revseq") / "data" / "circuits" / f"{name}.rseq").read_text()


@lru_cache(maxsize=None)
def _parsed_builtin(name: str) -> Circuit:
    return parse_circuit(builtin_circuit_text(name))


def builtin_designs(registry: GateRegistry) -> dict[str, Circuit]:
    """The four shipped sequential designs, parsed and validated.

    d_latch: one MG1; ms_d_ff: two MG1 in master-slave; jk_latch: MG2
    feeding MG1; ms_jk_ff: MG2 plus a master-slave MG1 pair.
    """
    designs: dict[str, Circuit] = {}
    for name in BUILTIN_DESIGN_NAMES:
        c = _parsed_builtin(name)
        errors = [d for d in validate(c, registry) if d.severity == "error"]
        if errors:
            raise RevseqError(f"builtin design {name} does not validate: {errors[0]}")
        designs[name] = c
    return designs
