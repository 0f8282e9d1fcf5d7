"""Command-line front end.

Subcommands:
  gates list | table NAME | verify NAME
  circuit check|table|simulate|verify|metrics FILE
  reproduce [--tables LIST] [--out DIR]

Exit codes are stable: 0 success/match, 1 verification or reproduction
mismatch (including validation errors), 2 usage or parse errors, 3
oscillation during simulation. Circuit FILE arguments accept ``@name`` for
the shipped designs (``@d_latch``, ``@ms_d_ff``, ``@jk_latch``,
``@ms_jk_ff``). Set REVSEQ_COLOR=0 to disable ANSI styling.
"""

import argparse
import json
import os
import sys
from pathlib import Path

from .circuit import (BUILTIN_DESIGN_NAMES, Circuit, builtin_circuit_text,
                      parse_circuit, validate)
from .errors import (CapExceededError, EvalError, NonBijectiveError,
                     OscillationError, ParseError, RevseqError, ValidationError)
from .gates import GateRegistry, builtin_library, is_bijective, parse_gates, truth_table
from .metrics import compute_metrics, render_metrics
from .reproduce import gate_table_csv, run_reproduce
from .simulate import (Trace, extract_next_state_table, parse_stimulus,
                       parse_stimulus_inline, run_sequence, verify_characteristic)

__all__ = ["main", "entry", "build_parser"]


def _color_on() -> bool:
    return os.environ.get("REVSEQ_COLOR", "") != "0" and sys.stdout.isatty()


def _style(text: str, code: str) -> str:
    return f"\x1b[{code}m{text}\x1b[0m" if _color_on() else text


def _good(text: str) -> str:
    return _style(text, "32")


def _bad(text: str) -> str:
    return _style(text, "31")


def _fail(message: str, code: int) -> int:
    print(_bad(message), file=sys.stderr)
    return code


def _load_registry(args) -> GateRegistry:
    registry = builtin_library()
    extra = getattr(args, "gates_file", None)
    if extra:
        registry = GateRegistry(list(registry))
        for g in parse_gates(Path(extra).read_text()):
            registry.add(g)
    return registry


def _load_circuit(ref: str) -> Circuit:
    if ref.startswith("@"):
        return parse_circuit(builtin_circuit_text(ref[1:]))
    return parse_circuit(Path(ref).read_text())


# ---------------------------------------------------------------------------
# gates

def _cmd_gates_list(args) -> int:
    registry = _load_registry(args)
    gates = list(registry)
    if args.format == "json":
        print(json.dumps([{"name": g.name, "arity": g.arity,
                           "inputs": list(g.inputs), "outputs": list(g.outputs),
                           "quantum_cost": g.quantum_cost} for g in gates], indent=2))
    elif args.format == "csv":
        print("name,arity,inputs,outputs")
        for g in gates:
            print(f"{g.name},{g.arity},{' '.join(g.inputs)},{' '.join(g.outputs)}")
    else:
        for g in gates:
            print(f"{g.name:<6} {g.arity}x{g.arity}  "
                  f"({', '.join(g.inputs)}) -> ({', '.join(g.outputs)})")
    return 0


def _cmd_gates_table(args) -> int:
    registry = _load_registry(args)
    gate = registry.get(args.name)
    if args.format == "csv":
        print(gate_table_csv(gate), end="")
        return 0
    t = truth_table(gate)
    k = gate.arity
    if args.format == "json":
        rows = [{"input": f"{i:0{k}b}", "output": f"{out:0{k}b}"} for i, out in t.rows]
        print(json.dumps({"gate": gate.name, "inputs": list(gate.inputs),
                          "outputs": list(gate.outputs), "rows": rows}, indent=2))
        return 0
    print(" ".join(gate.inputs) + " | " + " ".join(gate.outputs))
    for i, out in t.rows:
        ins = " ".join(f"{(i >> (k - 1 - p)) & 1}" for p in range(k))
        outs = " ".join(f"{(out >> (k - 1 - p)) & 1}" for p in range(k))
        print(f"{ins} | {outs}")
    return 0


def _cmd_gates_verify(args) -> int:
    registry = _load_registry(args)
    gate = registry.get(args.name)
    res = is_bijective(truth_table(gate))
    if res.ok:
        print(f"{gate.name}: {_good('bijective')} ({1 << gate.arity} output words distinct)")
        return 0
    i, j = res.witness
    print(f"{gate.name}: {_bad('NOT bijective')} — inputs {i:0{gate.arity}b} "
          f"and {j:0{gate.arity}b} collide")
    return 1


# ---------------------------------------------------------------------------
# circuit

def _diagnostics(circuit: Circuit, registry: GateRegistry, strict_fanout: bool):
    diags = validate(circuit, registry)
    if strict_fanout:
        diags = [d if d.code != "FANOUT"
                 else type(d)("error", d.code, d.message, d.line) for d in diags]
    return diags


def _cmd_circuit_check(args) -> int:
    registry = _load_registry(args)
    circuit = _load_circuit(args.file)
    diags = _diagnostics(circuit, registry, args.strict_fanout)
    for d in diags:
        line = str(d)
        print(_bad(line) if d.severity == "error" else line)
    errors = sum(1 for d in diags if d.severity == "error")
    warnings = len(diags) - errors
    print(f"{circuit.name}: {errors} error(s), {warnings} warning(s)")
    return 1 if errors else 0


def _cmd_circuit_table(args) -> int:
    registry = _load_registry(args)
    circuit = _load_circuit(args.file)
    t = extract_next_state_table(circuit, registry)
    # output labels may shadow input/state names, so keep sections distinct
    header = (list(t.input_names) + list(t.state_names)
              + [f"{s}_next" for s in t.state_names]
              + [f"out_{l}" for l in t.output_labels])
    n_bits = len(t.input_names) + len(t.state_names)

    def row_bits(row: int) -> list[int]:
        free = [(row >> (n_bits - 1 - i)) & 1 for i in range(n_bits)]
        return free + [int(b) for b in t.next_state[row]] + [int(b) for b in t.outputs[row]]

    if args.format == "json":
        n_in, n_st = len(t.input_names), len(t.state_names)
        rows = []
        for r in range(t.n_rows):
            bits = row_bits(r)
            rows.append({
                "inputs": dict(zip(t.input_names, bits[:n_in])),
                "state": dict(zip(t.state_names, bits[n_in:n_bits])),
                "next_state": dict(zip(t.state_names, bits[n_bits:n_bits + n_st])),
                "outputs": dict(zip(t.output_labels, bits[n_bits + n_st:])),
            })
        print(json.dumps(rows, indent=2))
    elif args.format == "csv":
        print(",".join(header))
        for r in range(t.n_rows):
            print(",".join(str(b) for b in row_bits(r)))
    else:
        print(" ".join(header))
        for r in range(t.n_rows):
            print(" ".join(f"{b:>{len(h)}}" for h, b in zip(header, row_bits(r))))
    return 0


def _render_trace(trace: Trace, circuit: Circuit, fmt: str) -> str:
    input_names = list(circuit.inputs)
    labels = [e.label for e in circuit.exports]
    states = list(circuit.state_names)
    header = (["step"] + input_names + [f"out_{l}" for l in labels]
              + [f"{s}_next" for s in states])
    rows = []
    for i, step in enumerate(trace.steps):
        rows.append([i] + [step.inputs[n] for n in input_names]
                    + [step.result.outputs[l] for l in labels]
                    + [step.result.next_state[s] for s in states])
    if fmt == "json":
        return json.dumps([{
            "step": i,
            "inputs": dict(step.inputs),
            "outputs": dict(step.result.outputs),
            "next_state": dict(step.result.next_state),
        } for i, step in enumerate(trace.steps)], indent=2)
    if fmt == "csv":
        return "\n".join([",".join(header)] + [",".join(map(str, r)) for r in rows])
    out = [" ".join(f"{h}" for h in header)]
    for r in rows:
        out.append(" ".join(f"{v:>{len(h)}}" for h, v in zip(header, r)))
    return "\n".join(out)


def _cmd_circuit_simulate(args) -> int:
    registry = _load_registry(args)
    circuit = _load_circuit(args.file)
    if not args.stim:
        return _fail("simulate requires --stim (inline string or @file)", 2)
    if args.stim.startswith("@"):
        stimulus = parse_stimulus(Path(args.stim[1:]).read_text())
    else:
        stimulus = parse_stimulus_inline(args.stim)
    trace = run_sequence(circuit, stimulus, settle_each=args.settle, registry=registry)
    print(_render_trace(trace, circuit, args.format))
    return 0


def _cmd_circuit_verify(args) -> int:
    registry = _load_registry(args)
    circuit = _load_circuit(args.file)
    if not args.oracle or not args.next:
        return _fail("verify requires --oracle EXPR and --next STATEVAR", 2)
    rep = verify_characteristic(circuit, args.oracle, args.next, registry)
    verdict = _good(rep.summary()) if rep.passed else _bad(rep.summary())
    print(f"{verdict} rows for next-state {args.next}")
    for f in rep.failures[:16]:
        bind = " ".join(f"{n}={v}" for n, v in f.assignment.items())
        print(f"  {bind}: circuit {f.actual}, oracle {f.expected}")
    if len(rep.failures) > 16:
        print(f"  ... {len(rep.failures) - 16} more failing rows")
    return 0 if rep.passed else 1


def _cmd_circuit_metrics(args) -> int:
    registry = _load_registry(args)
    circuit = _load_circuit(args.file)
    print(render_metrics(compute_metrics(circuit, registry), args.format))
    return 0


# ---------------------------------------------------------------------------
# reproduce

def _cmd_reproduce(args) -> int:
    try:
        tables = [int(p) for p in args.tables.replace(",", " ").split()]
    except ValueError:
        return _fail(f"--tables must be a comma-separated subset of 1-6, got {args.tables!r}", 2)
    try:
        code, lines = run_reproduce(tables, args.out)
    except ValueError as exc:
        return _fail(str(exc), 2)
    for line in lines:
        if "MISMATCH" in line or "FAIL" in line:
            print(_bad(line))
        elif line.startswith("RESULT") and code == 0:
            print(_good(line))
        else:
            print(line)
    return code


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="revseq",
        description="Reversible-logic workbench: gate tables, sequential "
                    "circuit simulation, verification, and cost metrics.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_format(p):
        p.add_argument("--format", choices=["text", "csv", "json"], default="text")

    def add_gates_file(p):
        p.add_argument("--gates", dest="gates_file", metavar="FILE",
                       help="load extra gate definitions from FILE")

    gates = sub.add_parser("gates", help="inspect the gate library")
    gsub = gates.add_subparsers(dest="action", required=True)
    p = gsub.add_parser("list", help="list registered gates")
    add_format(p); add_gates_file(p)
    p.set_defaults(func=_cmd_gates_list)
    p = gsub.add_parser("table", help="print a gate's full truth table")
    p.add_argument("name")
    add_format(p); add_gates_file(p)
    p.set_defaults(func=_cmd_gates_table)
    p = gsub.add_parser("verify", help="check a gate's bijectivity")
    p.add_argument("name")
    add_format(p); add_gates_file(p)
    p.set_defaults(func=_cmd_gates_verify)

    circ = sub.add_parser("circuit", help="work with a circuit file (@name for builtins)")
    csub = circ.add_subparsers(dest="action", required=True)
    handlers = {"check": _cmd_circuit_check, "table": _cmd_circuit_table,
                "simulate": _cmd_circuit_simulate, "verify": _cmd_circuit_verify,
                "metrics": _cmd_circuit_metrics}
    helps = {"check": "parse and validate, printing diagnostics",
             "table": "print the exhaustive next-state table",
             "simulate": "run a stimulus sequence",
             "verify": "check a characteristic equation exhaustively",
             "metrics": "compute gate/garbage/delay metrics"}
    for action, func in handlers.items():
        p = csub.add_parser(action, help=helps[action])
        p.add_argument("file", help="circuit file path or @builtin name")
        p.add_argument("--stim", help='stimulus: "CLK=1,D=1; CLK=0,D=1" or @file')
        p.add_argument("--settle", action="store_true",
                       help="hold each stimulus entry until the state is stable")
        p.add_argument("--oracle", help="boolean expression over inputs and state")
        p.add_argument("--next", help="state variable whose next value is checked")
        p.add_argument("--strict-fanout", action="store_true",
                       help="treat FANOUT warnings as errors")
        add_format(p); add_gates_file(p)
        p.set_defaults(func=func)

    rep = sub.add_parser("reproduce", help="recompute and check all reference tables")
    rep.add_argument("--tables", default="1,2,3,4,5,6",
                     help="comma-separated subset of 1-6 (default: all)")
    rep.add_argument("--out", default="reproduce-out", help="output directory")
    rep.set_defaults(func=_cmd_reproduce)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except OscillationError as exc:
        return _fail(str(exc), 3)
    except ValidationError as exc:
        for d in exc.diagnostics:
            print(_bad(str(d)), file=sys.stderr)
        return 1
    except (ParseError, NonBijectiveError, EvalError, CapExceededError) as exc:
        return _fail(str(exc), 2)
    except RevseqError as exc:
        return _fail(str(exc), 2)
    except FileNotFoundError as exc:
        return _fail(f"no such file: {exc.filename}", 2)


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
