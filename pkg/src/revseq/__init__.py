"""Workbench for reversible sequential logic.

Gates are k-in/k-out bijections on bit words; circuits wire them into
clocked latches and flip-flops. The package parses gate and circuit
descriptions, simulates them exhaustively or on stimulus sequences,
verifies characteristic equations, and computes cost metrics (gate count,
garbage outputs, delay) against a stored comparison dataset.
"""

from .errors import (CapExceededError, EvalError, NonBijectiveError,
                     OscillationError, ParseError, RevseqError, ValidationError)
from .expr import (And, BoolExpr, Const, Not, OpCounts, Or, Var, Xor,
                   eval_expr, expr_vars, format_expr, op_counts, parse_expr)
from .kernels import backend_name
from .gates import (Gate, GateRegistry, Permutation, TruthTable,
                    builtin_library, eval_gate, format_gate, format_gates,
                    gate_from_exprs, gate_from_permutation, inverse_gate,
                    is_bijective, parse_gates, truth_table)
from .circuit import (BUILTIN_DESIGN_NAMES, Circuit, Diagnostic, GateInstance,
                      OutputExport, StateVar, builtin_circuit_text,
                      builtin_designs, format_circuit, parse_circuit, validate)
from .simulate import (CharacteristicReport, NextStateTable, SettleResult,
                       StepResult, Trace, circuit_truth_map, eval_combinational,
                       extract_next_state_table, parse_stimulus,
                       parse_stimulus_inline, run_sequence, settle,
                       verify_characteristic)
from .metrics import (ComparisonReport, ComparisonRow, MetricsReport,
                      classify_outputs, comparison_dataset, comparison_report,
                      compute_metrics, delay)
from .reproduce import run_reproduce
from .cli import main

__version__ = "0.1.0"

__all__ = [
    "And", "BoolExpr", "BUILTIN_DESIGN_NAMES", "CapExceededError",
    "CharacteristicReport", "Circuit", "ComparisonReport", "ComparisonRow",
    "Const", "Diagnostic", "EvalError", "Gate", "GateInstance",
    "GateRegistry", "MetricsReport", "NextStateTable", "NonBijectiveError",
    "Not", "OpCounts", "Or", "OscillationError", "OutputExport",
    "ParseError", "Permutation", "RevseqError", "SettleResult", "StateVar",
    "StepResult", "Trace", "TruthTable", "ValidationError", "Var", "Xor",
    "__version__", "backend_name", "builtin_circuit_text", "builtin_designs",
    "builtin_library", "circuit_truth_map", "classify_outputs",
    "comparison_dataset", "comparison_report", "compute_metrics", "delay",
    "eval_combinational", "eval_expr", "eval_gate", "expr_vars",
    "extract_next_state_table", "format_circuit", "format_expr",
    "format_gate", "format_gates", "gate_from_exprs", "gate_from_permutation",
    "inverse_gate", "is_bijective", "main", "op_counts", "parse_circuit",
    "parse_expr", "parse_gates", "parse_stimulus", "parse_stimulus_inline",
    "run_reproduce", "run_sequence", "settle", "truth_table", "validate",
    "verify_characteristic",
]
