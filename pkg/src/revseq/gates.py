"""Reversible gate definitions, truth tables, and bijectivity checks.

A gate is a k-input/k-output primitive whose semantics is a bijection on
k-bit words, given either as one boolean expression per output line or as an
explicit permutation of row indices (or both, in which case they must agree).
Registration verifies bijectivity by exhaustive enumeration, so every
constructed :class:`Gate` is guaranteed reversible.

Bit order convention: the FIRST listed line is the most significant bit of a
packed word, for both inputs (row index) and outputs. Every golden table in
the test suite depends on this.
"""

import re
from dataclasses import dataclass, field

import numpy as np

from .errors import NonBijectiveError, ParseError, RevseqError
from .expr import (And, BoolExpr, Const, Not, Or, Var, Xor,
                   eval_expr, expr_vars, format_expr, parse_expr)
from .kernels import (ProgramBuilder, Program, enumerate_inputs, eval_program,
                      find_first_collision, pack_rows)

__all__ = [
    "MAX_ARITY", "Permutation", "TruthTable", "Gate", "BijectivityResult",
    "GateRegistry", "gate_from_exprs", "gate_from_permutation", "eval_gate",
    "truth_table", "is_bijective", "inverse_gate", "builtin_library",
    "parse_gates", "format_gate", "format_gates",
]

# Exhaustive verification of a 16-line gate is 65,536 rows — still instant.
# Anything larger is outside the tool's scope.
MAX_ARITY = 16

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass(frozen=True)
class Permutation:
    """A bijection on row indices, stored as its image array."""

    image: tuple[int, ...]

    def __post_init__(self):
        n = len(self.image)
        seen = [False] * n
        for v in self.image:
            if not 0 <= v < n:
                raise RevseqError(f"permutation entry {v} out of range [0, {n})")
            if seen[v]:
                raise RevseqError(f"duplicate permutation entry {v}")
            seen[v] = True

    @property
    def size(self) -> int:
        return len(self.image)

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.image)
        for x, y in enumerate(self.image):
            inv[y] = x
        return Permutation(tuple(inv))


@dataclass(frozen=True)
class TruthTable:
    """Complete input→output map of a gate or a cut circuit.

    Row ``i`` has input word ``i`` (first line = MSB) and output word
    ``outputs[i]``. ``out_width`` equals ``arity`` for gates but may differ
    for circuit maps.
    """

    arity: int
    out_width: int
    outputs: tuple[int, ...]
    in_names: tuple[str, ...] | None = None
    out_names: tuple[str, ...] | None = None

    def __post_init__(self):
        if len(self.outputs) != 1 << self.arity:
            raise RevseqError(f"expected {1 << self.arity} rows, got {len(self.outputs)}")
        for w in self.outputs:
            if not 0 <= w < 1 << self.out_width:
                raise RevseqError(f"output word {w} wider than {self.out_width} bits")

    @property
    def rows(self) -> list[tuple[int, int]]:
        return list(enumerate(self.outputs))


@dataclass(frozen=True)
class BijectivityResult:
    ok: bool
    witness: tuple[int, int] | None = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class Gate:
    """A registered reversible gate. Construct via :func:`gate_from_exprs`
    or :func:`gate_from_permutation`; both verify bijectivity.
    """

    name: str
    arity: int
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    exprs: tuple[BoolExpr, ...] | None = None
    perm: Permutation | None = None
    quantum_cost: int | None = None
    provenance: str | None = None


def _check_names(kind: str, names: tuple[str, ...], arity: int) -> None:
    if len(names) != arity:
        raise RevseqError(f"expected {arity} {kind} names, got {len(names)}")
    seen = set()
    for n in names:
        if not _IDENT_RE.fullmatch(n):
            raise RevseqError(f"invalid {kind} line name {n!r}")
        if n in seen:
            raise RevseqError(f"duplicate line name {n!r}")
        seen.add(n)


def compile_gate(gate: Gate) -> tuple[Program, list[int]]:
    """Lower a gate to a kernel program; returns (program, output slots)."""
    b = ProgramBuilder(gate.arity)
    out_slots: list[int] = []
    if gate.exprs is not None:
        env = {name: i for i, name in enumerate(gate.inputs)}
        for e in gate.exprs:
            out_slots.append(compile_expr(b, e, env))
    else:
        table = np.array(gate.perm.image, dtype=np.uint32)
        arg_slots = list(range(gate.arity))
        for pos in range(gate.arity):
            out_slots.append(b.lut(table, arg_slots, gate.arity - 1 - pos))
    return b.build(), out_slots


def compile_expr(b: ProgramBuilder, expr: BoolExpr, env: dict[str, int]) -> int:
    """Emit ops for ``expr`` into builder ``b``; ``env`` maps names to slots."""
    if isinstance(expr, Var):
        return env[expr.name]
    if isinstance(expr, Const):
        return b.const(expr.value)
    if isinstance(expr, Not):
        return b.not_(compile_expr(b, expr.child, env))
    a = compile_expr(b, expr.left, env)
    c = compile_expr(b, expr.right, env)
    if isinstance(expr, And):
        return b.and_(a, c)
    if isinstance(expr, Or):
        return b.or_(a, c)
    if isinstance(expr, Xor):
        return b.xor(a, c)
    raise TypeError(f"not a BoolExpr node: {expr!r}")


def _output_words(gate: Gate) -> np.ndarray:
    prog, out_slots = compile_gate(gate)
    V = eval_program(prog, enumerate_inputs(gate.arity))
    return pack_rows(V, out_slots)


def _verify(gate: Gate) -> None:
    if not 1 <= gate.arity <= MAX_ARITY:
        raise RevseqError(f"arity {gate.arity} outside supported range 1..{MAX_ARITY}")
    _check_names("input", gate.inputs, gate.arity)
    _check_names("output", gate.outputs, gate.arity)
    if gate.exprs is None and gate.perm is None:
        raise RevseqError(f"gate {gate.name}: needs output expressions or a permutation")
    if gate.exprs is not None:
        if len(gate.exprs) != gate.arity:
            raise RevseqError(f"gate {gate.name}: {len(gate.exprs)} expressions for arity {gate.arity}")
        allowed = set(gate.inputs)
        for out_name, e in zip(gate.outputs, gate.exprs):
            for v in expr_vars(e):
                if v not in allowed:
                    raise RevseqError(f"gate {gate.name}: output {out_name} uses unknown variable '{v}'")
    if gate.perm is not None and gate.perm.size != 1 << gate.arity:
        raise RevseqError(f"gate {gate.name}: permutation of size {gate.perm.size} for arity {gate.arity}")
    words = _output_words(gate)
    if gate.exprs is not None and gate.perm is not None:
        diff = np.flatnonzero(words != np.array(gate.perm.image, dtype=np.uint32))
        if len(diff):
            i = int(diff[0])
            raise RevseqError(
                f"gate {gate.name}: expressions and permutation disagree at input "
                f"{i:0{gate.arity}b} ({int(words[i]):0{gate.arity}b} vs {gate.perm.image[i]:0{gate.arity}b})")
    collision = find_first_collision(words)
    if collision is not None:
        i, j = collision
        raise NonBijectiveError(f"gate {gate.name} is not reversible", (i, j))


def gate_from_exprs(name: str, inputs: list[str] | tuple[str, ...],
                    outputs: list[tuple[str, BoolExpr | str]],
                    quantum_cost: int | None = None,
                    provenance: str | None = None) -> Gate:
    """Register a gate from per-output expressions over the input names.

    Expressions may be given as strings (parsed here) or ASTs. Raises
    :class:`NonBijectiveError` with a colliding input pair if the induced
    map is not a bijection.
    """
    out_names = tuple(n for n, _ in outputs)
    exprs = tuple(parse_expr(e) if isinstance(e, str) else e for _, e in outputs)
    gate = Gate(name=name, arity=len(inputs), inputs=tuple(inputs),
                outputs=out_names, exprs=exprs,
                quantum_cost=quantum_cost, provenance=provenance)
    _verify(gate)
    return gate


def gate_from_permutation(name: str, arity: int, perm: Permutation | list[int],
                          inputs: tuple[str, ...] | None = None,
                          outputs: tuple[str, ...] | None = None,
                          quantum_cost: int | None = None) -> Gate:
    """Register a gate from an explicit image array of 2**arity row indices."""
    if not isinstance(perm, Permutation):
        perm = Permutation(tuple(int(v) for v in perm))
    if inputs is None:
        inputs = tuple(f"X{i}" for i in range(arity))
    if outputs is None:
        outputs = tuple(f"Y{i}" for i in range(arity))
    gate = Gate(name=name, arity=arity, inputs=tuple(inputs), outputs=tuple(outputs),
                perm=perm, quantum_cost=quantum_cost)
    _verify(gate)
    return gate


def eval_gate(gate: Gate, word: int) -> int:
    """Scalar evaluation: output word for one input word.

    Kept independent of the vectorized kernels so the two routes can be
    cross-checked against each other.
    """
    if not 0 <= word < 1 << gate.arity:
        raise RevseqError(f"input word {word} outside 0..{(1 << gate.arity) - 1} for {gate.name}")
    if gate.perm is not None:
        return gate.perm.image[word]
    k = gate.arity
    assignment = {name: (word >> (k - 1 - i)) & 1 for i, name in enumerate(gate.inputs)}
    out = 0
    for e in gate.exprs:
        out = (out << 1) | eval_expr(e, assignment)
    return out


def truth_table(gate: Gate) -> TruthTable:
    """All 2**k rows in ascending input order, computed on the active backend."""
    words = _output_words(gate)
    return TruthTable(arity=gate.arity, out_width=gate.arity,
                      outputs=tuple(int(w) for w in words),
                      in_names=gate.inputs, out_names=gate.outputs)


def is_bijective(table: TruthTable) -> BijectivityResult:
    """True iff output words are pairwise distinct; witness on failure.

    The witness is the deterministic earliest collision: ``j`` is the first
    row whose output already appeared and ``i`` its first occurrence.
    """
    collision = find_first_collision(np.array(table.outputs, dtype=np.uint32))
    if collision is None:
        return BijectivityResult(True)
    return BijectivityResult(False, collision)


def inverse_gate(gate: Gate) -> Gate:
    """The gate G⁻¹ with eval(G⁻¹, eval(G, x)) = x for every input x."""
    perm = gate.perm if gate.perm is not None else Permutation(truth_table(gate).outputs)
    inv = Gate(name=f"{gate.name}_inv", arity=gate.arity,
               inputs=gate.outputs, outputs=gate.inputs, perm=perm.inverse())
    _verify(inv)
    return inv


class GateRegistry:
    """Name-keyed collection of registered gates.

    Built once and read-only in normal use; tests construct variants for
    fault injection via :meth:`replaced`.
    """

    def __init__(self, gates: list[Gate] | tuple[Gate, ...] = ()):
        self._gates: dict[str, Gate] = {}
        for g in gates:
            self.add(g)

    def add(self, gate: Gate) -> None:
        if gate.name in self._gates:
            raise RevseqError(f"gate '{gate.name}' already registered")
        self._gates[gate.name] = gate

    def get(self, name: str) -> Gate:
        try:
            return self._gates[name]
        except KeyError:
            raise RevseqError(f"unknown gate '{name}'") from None

    def names(self) -> list[str]:
        return list(self._gates)

    def replaced(self, gate: Gate) -> "GateRegistry":
        return GateRegistry([gate if g.name == gate.name else g for g in self])

    def __contains__(self, name: str) -> bool:
        return name in self._gates

    def __iter__(self):
        return iter(self._gates.values())

    def __len__(self) -> int:
        return len(self._gates)


_MG1_NOTE = ("Q column follows the tabulated definition Q = !A&B ^ A&!C; "
             "a commonly quoted prose variant !A&B ^ !A&C contradicts table "
             "rows 1000 and 1010 and is treated as a typo.")

_builtins: GateRegistry | None = None


def builtin_library() -> GateRegistry:
    """The seven builtin gates: NOT, FG, TG, FRG, PG, MG1, MG2.

    Each is verified bijective at construction. The registry is built once
    and shared; treat it as read-only.
    """
    global _builtins
    if _builtins is None:
        _builtins = GateRegistry([
            gate_from_exprs("NOT", ("A",), [("P", "!A")]),
            gate_from_exprs("FG", ("A", "B"), [("P", "A"), ("Q", "A ^ B")]),
            gate_from_exprs("TG", ("A", "B", "C"),
                            [("P", "A"), ("Q", "B"), ("R", "A & B ^ C")]),
            gate_from_exprs("FRG", ("A", "B", "C"),
                            [("P", "A"),
                             ("Q", "!A & B ^ A & C"),
                             ("R", "!A & C ^ A & B")]),
            gate_from_exprs("PG", ("A", "B", "C"),
                            [("P", "A"), ("Q", "A ^ B"), ("R", "A & B ^ C")]),
            gate_from_exprs("MG1", ("A", "B", "C", "D"),
                            [("P", "A ^ D"),
                             ("Q", "!A & B ^ A & !C"),
                             ("R", "!A & C ^ A & B"),
                             ("S", "!A & C ^ A & B ^ D")],
                            provenance=_MG1_NOTE),
            gate_from_exprs("MG2", ("A", "B", "C", "D"),
                            [("P", "A"),
                             ("Q", "!A & B ^ A & !C"),
                             ("R", "!A & C ^ A & B"),
                             ("S", "A ^ D")]),
        ])
    return _builtins


# ---------------------------------------------------------------------------
# Gate definition files
#
#   gate MG1(A, B, C, D) -> (P, Q, R, S)
#       P = A ^ D
#       ...
#   meta quantum_cost = 6          # attaches to the preceding gate
#   gate SWAP2(2) perm = [0, 2, 1, 3]

_GATE_EXPR_RE = re.compile(
    r"gate\s+(\w+)\s*\(\s*([^)]*)\)\s*->\s*\(\s*([^)]*)\)\s*$")
_GATE_PERM_RE = re.compile(
    r"gate\s+(\w+)\s*\(\s*(\d+)\s*\)\s*perm\s*=\s*\[([^\]]*)\]\s*$")
_DEF_RE = re.compile(r"(\w+)\s*=\s*(.+)$")
_META_RE = re.compile(r"meta\s+quantum_cost\s*=\s*(\d+)\s*$")


def _split_names(blob: str, line: int) -> tuple[str, ...]:
    names = tuple(p.strip() for p in blob.split(",")) if blob.strip() else ()
    for n in names:
        if not _IDENT_RE.fullmatch(n):
            raise ParseError(f"invalid line name {n!r}", line)
    return names


def parse_gates(text: str) -> list[Gate]:
    """Parse a gate definition file; returns gates in file order."""
    gates: list[Gate] = []
    # accumulate one gate's pieces, registering when the next header arrives
    pending: dict | None = None

    def flush():
        nonlocal pending
        if pending is None:
            return
        if pending.get("perm") is not None:
            gates.append(gate_from_permutation(
                pending["name"], pending["arity"], pending["perm"],
                quantum_cost=pending["cost"]))
        else:
            missing = [n for n in pending["outputs"] if n not in pending["defs"]]
            if missing:
                raise ParseError(
                    f"gate {pending['name']}: no definition for output {missing[0]!r}",
                    pending["line"])
            outputs = [(n, pending["defs"][n]) for n in pending["outputs"]]
            gates.append(gate_from_exprs(pending["name"], pending["inputs"], outputs,
                                         quantum_cost=pending["cost"]))
        pending = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        if stripped.startswith("gate"):
            flush()
            m = _GATE_EXPR_RE.fullmatch(stripped)
            if m:
                name, ins, outs = m.group(1), m.group(2), m.group(3)
                pending = {"name": name, "inputs": _split_names(ins, lineno),
                           "outputs": _split_names(outs, lineno),
                           "defs": {}, "perm": None, "cost": None, "line": lineno}
                continue
            m = _GATE_PERM_RE.fullmatch(stripped)
            if m:
                name, arity, blob = m.group(1), int(m.group(2)), m.group(3)
                try:
                    image = [int(p.strip()) for p in blob.split(",")] if blob.strip() else []
                except ValueError:
                    raise ParseError("permutation entries must be integers", lineno) from None
                pending = {"name": name, "arity": arity, "perm": image,
                           "cost": None, "line": lineno}
                continue
            raise ParseError("malformed gate header", lineno,
                             expected=("gate NAME(lines) -> (lines)", "gate NAME(k) perm = [...]"))
        m = _META_RE.fullmatch(stripped)
        if m:
            if pending is None:
                raise ParseError("meta line before any gate", lineno)
            pending["cost"] = int(m.group(1))
            continue
        m = _DEF_RE.fullmatch(stripped)
        if m and pending is not None and pending.get("perm") is None:
            out_name, body = m.group(1), m.group(2)
            if out_name not in pending["outputs"]:
                raise ParseError(f"'{out_name}' is not an output of gate {pending['name']}", lineno)
            if out_name in pending["defs"]:
                raise ParseError(f"duplicate definition of output {out_name!r}", lineno)
            pending["defs"][out_name] = parse_expr(body, line=lineno)
            continue
        raise ParseError(f"unrecognized line {stripped!r}", lineno,
                         expected=("gate", "meta", "OUTPUT = expr"))
    flush()
    return gates


def format_gate(gate: Gate) -> str:
    """Canonical file rendering of one gate definition."""
    lines = []
    if gate.exprs is not None:
        lines.append(f"gate {gate.name}({', '.join(gate.inputs)}) -> ({', '.join(gate.outputs)})")
        for name, e in zip(gate.outputs, gate.exprs):
            lines.append(f"    {name} = {format_expr(e)}")
    else:
        k = gate.arity
        image = ", ".join(str(v) for v in gate.perm.image)
        lines.append(f"gate {gate.name}({k}) perm = [{image}]")
    if gate.quantum_cost is not None:
        lines.append(f"    meta quantum_cost = {gate.quantum_cost}")
    return "\n".join(lines) + "\n"


def format_gates(gates: list[Gate]) -> str:
    return "\n".join(format_gate(g) for g in gates)
