"""Compare the numpy and numba execution backends on the hot kernels.

Three workloads:
  * full truth table of a random 16-line permutation gate (65,536 rows
    through a LUT-heavy program);
  * a deep synthetic expression program evaluated over 20 free bits
    (1,048,576 rows through CONST/NOT/AND/OR/XOR ops);
  * 2,000 evaluations of a small 4-line gate program over 16 rows — the
    shape that dominates output classification and table extraction.

Run:  python3 bench/bench_backends.py [--repeats N]
"""

import argparse
import os
import time

import numpy as np

from revseq.expr import parse_expr
from revseq.gates import compile_gate, gate_from_exprs, gate_from_permutation, truth_table
from revseq.kernels import ProgramBuilder, backend_name, enumerate_inputs, eval_program


def big_permutation_gate(k: int = 16, seed: int = 7):
    rng = np.random.default_rng(seed)
    image = rng.permutation(1 << k)
    return gate_from_permutation(f"RAND{k}", k, [int(v) for v in image])


def deep_program(n_inputs: int = 20, n_ops: int = 400, seed: int = 11):
    rng = np.random.default_rng(seed)
    b = ProgramBuilder()
    slots = [b.input_slot() for _ in range(n_inputs)]
    for _ in range(n_ops):
        op = rng.integers(0, 4)
        a = slots[int(rng.integers(0, len(slots)))]
        c = slots[int(rng.integers(0, len(slots)))]
        if op == 0:
            slots.append(b.xor(a, c))
        elif op == 1:
            slots.append(b.and_(a, c))
        elif op == 2:
            slots.append(b.or_(a, c))
        else:
            slots.append(b.not_(a))
    return b.build()


def small_gate_program():
    gate = gate_from_exprs("MINI", ["A", "B", "C", "D"], [
        ("P", parse_expr("A ^ D")),
        ("Q", parse_expr("!A & B ^ A & !C")),
        ("R", parse_expr("!A & C ^ A & B")),
        ("S", parse_expr("!A & C ^ A & B ^ D")),
    ])
    program, _ = compile_gate(gate)
    return program


def timed(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run_backend(flag: str, workloads, repeats: int):
    os.environ["REVSEQ_NUMBA"] = flag
    name = backend_name()
    for fn in workloads:
        fn()  # throwaway call so numba's compile time is not measured
    return name, [timed(fn, repeats) for fn in workloads]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    gate = big_permutation_gate()
    program = deep_program()
    inputs = enumerate_inputs(20)
    small = small_gate_program()
    small_inputs = enumerate_inputs(4)

    def many_small():
        for _ in range(2000):
            eval_program(small, small_inputs)

    workloads = [lambda: truth_table(gate),
                 lambda: eval_program(program, inputs),
                 many_small]
    labels = ["perm gate 16 lines, 64k rows",
              "expr program 20 bits, 1M rows",
              "2000 x 4-line gate, 16 rows"]

    rows = [run_backend(flag, workloads, args.repeats) for flag in ("0", "1")]

    width = max(len(l) for l in labels) + 2
    print(f"{'workload':<{width}} " + " ".join(f"{n + ' (ms)':>14}" for n, _ in rows)
          + f" {'speedup':>8}")
    for i, label in enumerate(labels):
        vals = [r[1][i] for r in rows]
        speedup = vals[0] / vals[1] if vals[1] else float("inf")
        print(f"{label:<{width}} " + " ".join(f"{v * 1e3:>14.2f}" for v in vals)
              + f" {speedup:>7.1f}x")


if __name__ == "__main__":
    main()
