"""Circuit evaluation: single steps, settling, stimulus runs, and
exhaustive next-state tables.

Timing model is two-phase: within one step every state tap ``Q.prev`` is
frozen at the current state, all gates evaluate combinationally in
topological order, and the values on the ``Q.next`` wires commit together at
the end of the step. Level-sensitive behavior (a transparent latch) is
modeled by :func:`settle`, which re-applies the same inputs until the state
reaches a fixpoint or provably cycles.

Exhaustive enumeration is vectorized through the kernel backends; the
scalar :func:`eval_combinational` route stays independent of the kernels so
the two can be cross-checked.
"""

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .circuit import Circuit, require_valid
from .errors import (CapExceededError, EvalError, OscillationError,
                     ParseError, RevseqError)
from .expr import BoolExpr, eval_expr, expr_vars, parse_expr
from .gates import (BijectivityResult, GateRegistry, TruthTable,
                    builtin_library, compile_expr, eval_gate)
from .kernels import (Program, ProgramBuilder, enumerate_inputs, eval_program,
                      find_first_collision, pack_rows)

__all__ = [
    "ENUM_CAP", "StepResult", "SettleResult", "TraceStep", "Trace",
    "NextStateTable", "FailRow", "CharacteristicReport", "CircuitMap",
    "eval_combinational", "settle", "run_sequence", "extract_next_state_table",
    "verify_characteristic", "circuit_truth_map",
    "parse_stimulus", "parse_stimulus_inline",
]

# Exhaustive tables enumerate 2**(inputs + state bits); 2**20 rows is the
# agreed desk-scale ceiling.
ENUM_CAP = 20


@dataclass(frozen=True)
class StepResult:
    outputs: dict[str, int]       # exported label -> bit
    next_state: dict[str, int]    # state var -> bit
    wires: dict[str, int]         # every wire value seen this step


@dataclass(frozen=True)
class SettleResult:
    outcome: str                  # "stable" | "oscillating"
    state: dict[str, int] | None  # fixpoint state when stable
    iterations: int               # state commits applied
    period: int | None = None     # cycle length when oscillating
    result: StepResult | None = None   # evaluation at the fixpoint


@dataclass(frozen=True)
class TraceStep:
    inputs: dict[str, int]
    result: StepResult


@dataclass(frozen=True)
class Trace:
    steps: tuple[TraceStep, ...]

    def __len__(self) -> int:
        return len(self.steps)


def _bit(value) -> int:
    return 1 if value else 0


def eval_combinational(circuit: Circuit, inputs: Mapping[str, int],
                       state: Mapping[str, int] | None = None,
                       registry: GateRegistry | None = None) -> StepResult:
    """One combinational pass with state taps frozen at ``state``.

    Scalar reference implementation: instances evaluate one at a time via
    :func:`eval_gate` in topological order.
    """
    registry = registry if registry is not None else builtin_library()
    state = state or {}
    order = require_valid(circuit, registry)

    wires: dict[str, int] = {}
    for n in circuit.inputs:
        if n not in inputs:
            raise EvalError(f"missing binding for input '{n}'")
        wires[n] = _bit(inputs[n])
    for n, v in circuit.constants:
        wires[n] = v
    for s in circuit.states:
        if s.name not in state:
            raise EvalError(f"missing binding for state '{s.name}'")
        wires[s.prev_wire] = _bit(state[s.name])

    for inst in order:
        gate = registry.get(inst.gate_name)
        word = 0
        for w in inst.inputs:
            word = (word << 1) | wires[w]
        out = eval_gate(gate, word)
        for i, w in enumerate(inst.outputs):
            wires[w] = (out >> (gate.arity - 1 - i)) & 1

    outputs = {e.label: wires[e.wire] for e in circuit.exports}
    next_state = {s.name: wires[s.next_wire] for s in circuit.states}
    return StepResult(outputs=outputs, next_state=next_state, wires=wires)


def settle(circuit: Circuit, inputs: Mapping[str, int],
           state: Mapping[str, int] | None = None,
           registry: GateRegistry | None = None) -> SettleResult:
    """Hold ``inputs`` steady and iterate state updates to a fixpoint.

    At most ``2**n_state + 1`` updates are applied; a revisited state vector
    short-circuits to an oscillation verdict with the cycle period.
    """
    cur = {s.name: _bit((state or {}).get(s.name, s.init)) for s in circuit.states}
    if state:
        for n in state:
            if n not in cur:
                raise EvalError(f"unknown state variable '{n}'")
    cap = (1 << len(circuit.states)) + 1
    seen = {tuple(sorted(cur.items())): 0}
    iterations = 0
    while iterations <= cap:
        r = eval_combinational(circuit, inputs, cur, registry)
        if r.next_state == cur:
            return SettleResult("stable", cur, iterations, result=r)
        iterations += 1
        cur = r.next_state
        key = tuple(sorted(cur.items()))
        if key in seen:
            return SettleResult("oscillating", None, iterations,
                                period=iterations - seen[key])
        seen[key] = iterations
    # cap is sized so that either a fixpoint or a revisit must occur first
    return SettleResult("oscillating", None, iterations, period=None)


def run_sequence(circuit: Circuit, stimulus: list[Mapping[str, int]],
                 settle_each: bool = False,
                 registry: GateRegistry | None = None,
                 initial_state: Mapping[str, int] | None = None) -> Trace:
    """Apply stimulus entries in order, threading state between steps.

    State starts from the declared initial bits unless ``initial_state``
    overrides them. With ``settle_each`` every entry is held until stable;
    an oscillating step raises :class:`OscillationError` with its index.
    """
    cur = {s.name: s.init for s in circuit.states}
    if initial_state:
        for n, v in initial_state.items():
            if n not in cur:
                raise EvalError(f"unknown state variable '{n}'")
            cur[n] = _bit(v)
    steps: list[TraceStep] = []
    for i, entry in enumerate(stimulus):
        if settle_each:
            sr = settle(circuit, entry, cur, registry)
            if sr.outcome != "stable":
                raise OscillationError(i, sr.period or 0)
            cur = dict(sr.state)
            result = sr.result
        else:
            result = eval_combinational(circuit, entry, cur, registry)
            cur = dict(result.next_state)
        steps.append(TraceStep(dict(entry), result))
    return Trace(tuple(steps))


# ---------------------------------------------------------------------------
# Exhaustive enumeration (vectorized)

@dataclass(frozen=True)
class CompiledCircuit:
    program: Program
    free_names: tuple[str, ...]        # input slot names: inputs then taps
    wire_slots: dict[str, int]
    gate_out_wires: tuple[str, ...]    # declaration order


def compile_circuit(circuit: Circuit, registry: GateRegistry | None = None) -> CompiledCircuit:
    """Lower a validated circuit to a kernel program over its free bits."""
    registry = registry if registry is not None else builtin_library()
    order = require_valid(circuit, registry)
    b = ProgramBuilder()
    wire_slots: dict[str, int] = {}
    free = list(circuit.inputs) + [s.prev_wire for s in circuit.states]
    for n in free:
        wire_slots[n] = b.input_slot()
    for n, v in circuit.constants:
        wire_slots[n] = b.const(v)
    for inst in order:
        gate = registry.get(inst.gate_name)
        in_slots = [wire_slots[w] for w in inst.inputs]
        if gate.exprs is not None:
            env = dict(zip(gate.inputs, in_slots))
            out_slots = [compile_expr(b, e, env) for e in gate.exprs]
        else:
            table = np.array(gate.perm.image, dtype=np.uint32)
            out_slots = [b.lut(table, in_slots, gate.arity - 1 - i)
                         for i in range(gate.arity)]
        for w, slot in zip(inst.outputs, out_slots):
            wire_slots[w] = slot
    gate_out = tuple(w for inst in circuit.instances for w in inst.outputs)
    return CompiledCircuit(b.build(), tuple(free), wire_slots, gate_out)


def _check_cap(circuit: Circuit) -> int:
    n_free = len(circuit.inputs) + len(circuit.states)
    if n_free > ENUM_CAP:
        raise CapExceededError(
            f"{n_free} free bits (inputs + state) exceed the enumeration cap of {ENUM_CAP}")
    return n_free


@dataclass(frozen=True)
class NextStateTable:
    """Exhaustive (input word × state word) → (outputs, next state) map.

    Row order: inputs outer, state inner; within each group the
    first-declared name is the most significant bit.
    """

    input_names: tuple[str, ...]
    state_names: tuple[str, ...]
    output_labels: tuple[str, ...]
    outputs: np.ndarray        # uint8, (n_rows, n_outputs)
    next_state: np.ndarray     # uint8, (n_rows, n_states)

    @property
    def n_rows(self) -> int:
        return self.outputs.shape[0]

    def row_assignment(self, row: int) -> dict[str, int]:
        """Input and current-state bits encoded by a row index."""
        names = self.input_names + self.state_names
        n = len(names)
        return {name: (row >> (n - 1 - i)) & 1 for i, name in enumerate(names)}


def extract_next_state_table(circuit: Circuit,
                             registry: GateRegistry | None = None) -> NextStateTable:
    """Enumerate every (input, state) combination on the kernel backend."""
    n_free = _check_cap(circuit)
    cc = compile_circuit(circuit, registry)
    V = eval_program(cc.program, enumerate_inputs(n_free))
    labels = tuple(e.label for e in circuit.exports)
    out_slots = [cc.wire_slots[e.wire] for e in circuit.exports]
    ns_slots = [cc.wire_slots[s.next_wire] for s in circuit.states]
    outputs = V[out_slots].T.copy() if out_slots else np.empty((V.shape[1], 0), np.uint8)
    next_state = V[ns_slots].T.copy() if ns_slots else np.empty((V.shape[1], 0), np.uint8)
    return NextStateTable(tuple(circuit.inputs), circuit.state_names, labels,
                          outputs, next_state)


@dataclass(frozen=True)
class FailRow:
    assignment: dict[str, int]
    expected: int     # oracle value
    actual: int       # circuit value


@dataclass(frozen=True)
class CharacteristicReport:
    target: str
    total: int
    failures: tuple[FailRow, ...]

    @property
    def passed(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        ok = self.total - len(self.failures)
        verdict = "PASS" if self.passed else "FAIL"
        return f"{verdict} {ok}/{self.total}"


def verify_characteristic(circuit: Circuit, oracle: BoolExpr | str, target: str,
                          registry: GateRegistry | None = None) -> CharacteristicReport:
    """Compare a next-state column against a boolean oracle on every row.

    The oracle ranges over primary inputs and current-state variables and is
    evaluated by the scalar expression interpreter, independent of the
    vectorized circuit route it is checking.
    """
    if isinstance(oracle, str):
        oracle = parse_expr(oracle)
    if target not in circuit.state_names:
        raise RevseqError(f"unknown target state variable '{target}'")
    allowed = set(circuit.inputs) | set(circuit.state_names)
    for v in expr_vars(oracle):
        if v not in allowed:
            raise RevseqError(f"oracle variable '{v}' is not an input or state variable")
    table = extract_next_state_table(circuit, registry)
    col = table.state_names.index(target)
    failures = []
    for row in range(table.n_rows):
        assignment = table.row_assignment(row)
        want = eval_expr(oracle, assignment)
        got = int(table.next_state[row, col])
        if want != got:
            failures.append(FailRow(assignment, want, got))
    return CharacteristicReport(target, table.n_rows, tuple(failures))


@dataclass(frozen=True)
class CircuitMap:
    """Truth table of the cut combinational core plus bijectivity verdict.

    ``bijective`` is None when the free-input and output widths differ; the
    note then says why no verdict applies.
    """

    table: TruthTable
    bijective: BijectivityResult | None
    note: str = ""


def circuit_truth_map(circuit: Circuit,
                      registry: GateRegistry | None = None) -> CircuitMap:
    """Map every free-input word to the values of all gate-output wires.

    Free inputs are the primary inputs and state taps; constants are held at
    their fixed values.
    """
    n_free = _check_cap(circuit)
    cc = compile_circuit(circuit, registry)
    V = eval_program(cc.program, enumerate_inputs(n_free))
    out_wires = cc.gate_out_wires
    words = pack_rows(V, [cc.wire_slots[w] for w in out_wires])
    table = TruthTable(arity=n_free, out_width=max(len(out_wires), 1),
                       outputs=tuple(int(w) for w in words),
                       in_names=cc.free_names, out_names=out_wires)
    if n_free == len(out_wires):
        collision = find_first_collision(words)
        verdict = (BijectivityResult(True) if collision is None
                   else BijectivityResult(False, collision))
        return CircuitMap(table, verdict)
    return CircuitMap(table, None,
                      f"not applicable: {n_free} free inputs vs {len(out_wires)} outputs")


# ---------------------------------------------------------------------------
# Stimulus

def _parse_bit(token: str, lineno: int) -> int:
    if token not in ("0", "1"):
        raise ParseError(f"stimulus value must be 0 or 1, got {token!r}", lineno)
    return int(token)


def parse_stimulus(text: str) -> list[dict[str, int]]:
    """File form: a header line of input names, then one bit row per step."""
    names: list[str] | None = None
    steps: list[dict[str, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.replace(",", " ").split()
        if names is None:
            names = tokens
            if len(set(names)) != len(names):
                raise ParseError("duplicate name in stimulus header", lineno)
            continue
        if len(tokens) != len(names):
            raise ParseError(f"expected {len(names)} values, got {len(tokens)}", lineno)
        steps.append({n: _parse_bit(t, lineno) for n, t in zip(names, tokens)})
    if names is None:
        raise ParseError("empty stimulus: missing header line")
    return steps


def parse_stimulus_inline(text: str) -> list[dict[str, int]]:
    """Inline form: steps split on ';', bindings on ',' — e.g.
    ``"CLK=1,D=1; CLK=0,D=1"``."""
    steps = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        entry: dict[str, int] = {}
        for binding in part.split(","):
            name, eq, value = binding.partition("=")
            name, value = name.strip(), value.strip()
            if not eq or not name:
                raise ParseError(f"malformed stimulus binding {binding.strip()!r}",
                                 expected=("NAME=0|1",))
            if name in entry:
                raise ParseError(f"duplicate binding for '{name}' in one step")
            entry[name] = _parse_bit(value, 1)
        steps.append(entry)
    if not steps:
        raise ParseError("empty stimulus")
    return steps
