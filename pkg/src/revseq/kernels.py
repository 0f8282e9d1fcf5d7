"""Vectorized bit-level evaluation kernels.

A :class:`Program` is a straight-line sequence of bitwise operations over
*slots*. Each slot holds one bit per row of a batch, so evaluating a program
over all ``2**n`` input rows computes a full truth table in one pass. The
executor has two interchangeable backends:

* ``numpy`` — column-at-a-time array operations, always available;
* ``numba`` — a JIT-compiled row loop, used when importable.

Selection is controlled by the ``REVSEQ_NUMBA`` environment variable:
``"0"`` forces numpy, ``"1"`` requires numba (raising if it cannot be
imported), anything else picks numba when available. Both backends produce
bit-identical results; the test suite cross-checks them and
``bench/bench_backends.py`` compares their throughput.
"""

import os
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "OP_CONST", "OP_NOT", "OP_AND", "OP_OR", "OP_XOR", "OP_COPY", "OP_LUT",
    "Program", "ProgramBuilder", "backend_name", "eval_program",
    "enumerate_inputs", "pack_rows", "find_first_collision",
]

OP_CONST = 0   # dst <- a                  (a is 0 or 1)
OP_NOT = 1     # dst <- V[a] ^ 1
OP_AND = 2     # dst <- V[a] & V[b]
OP_OR = 3      # dst <- V[a] | V[b]
OP_XOR = 4     # dst <- V[a] ^ V[b]
OP_COPY = 5    # dst <- V[a]
OP_LUT = 6     # dst <- bit b of luts[a + index], index packed from the
               # arg slots args[aux_off : aux_off+aux_len], first arg = MSB


@dataclass(frozen=True)
class Program:
    """Compiled straight-line bit program.

    ``n_fixed`` slots at the front are inputs supplied by the caller; the
    remaining slots are written by the ops in order. ``ops`` has one row per
    operation: ``(opcode, dst, a, b, aux_off, aux_len)``.
    """

    ops: np.ndarray          # int64, shape (n_ops, 6)
    args: np.ndarray         # int64, flat pool of LUT argument slots
    luts: np.ndarray         # uint32, flat pool of lookup tables
    n_slots: int
    n_fixed: int


class ProgramBuilder:
    """Builds a :class:`Program` one operation at a time.

    Methods return the slot index holding the result, so construction reads
    like three-address code::

        b = ProgramBuilder()
        a, c = b.input_slot(), b.input_slot()
        out = b.xor(b.not_(a), c)
    """

    def __init__(self, n_inputs: int = 0):
        self._ops: list[tuple[int, int, int, int, int, int]] = []
        self._args: list[int] = []
        self._luts: list[np.ndarray] = []
        self._lut_offsets: dict[bytes, int] = {}
        self._lut_total = 0
        self.n_fixed = 0
        self.n_slots = 0
        for _ in range(n_inputs):
            self.input_slot()

    def input_slot(self) -> int:
        if self.n_fixed != self.n_slots:
            raise ValueError("input slots must be allocated before any op")
        self.n_fixed += 1
        self.n_slots += 1
        return self.n_slots - 1

    def _emit(self, op: int, a: int, b: int = 0, aux_off: int = 0, aux_len: int = 0) -> int:
        dst = self.n_slots
        self.n_slots += 1
        self._ops.append((op, dst, a, b, aux_off, aux_len))
        return dst

    def const(self, value: int) -> int:
        return self._emit(OP_CONST, int(value))

    def not_(self, a: int) -> int:
        return self._emit(OP_NOT, a)

    def and_(self, a: int, b: int) -> int:
        return self._emit(OP_AND, a, b)

    def or_(self, a: int, b: int) -> int:
        return self._emit(OP_OR, a, b)

    def xor(self, a: int, b: int) -> int:
        return self._emit(OP_XOR, a, b)

    def copy(self, a: int) -> int:
        return self._emit(OP_COPY, a)

    def lut(self, table: np.ndarray, arg_slots: list[int], bit: int) -> int:
        """Slot <- bit ``bit`` (shift from LSB) of ``table[packed args]``.

        ``arg_slots`` are packed first-slot-as-MSB. Identical tables are
        pooled, so per-output-bit calls against one table cost nothing extra.
        """
        table = np.ascontiguousarray(table, dtype=np.uint32)
        if len(table) != 1 << len(arg_slots):
            raise ValueError(f"table of {len(table)} entries does not match {len(arg_slots)} args")
        key = table.tobytes()
        base = self._lut_offsets.get(key)
        if base is None:
            base = self._lut_total
            self._lut_offsets[key] = base
            self._luts.append(table)
            self._lut_total += len(table)
        aux_off = len(self._args)
        self._args.extend(arg_slots)
        return self._emit(OP_LUT, base, int(bit), aux_off, len(arg_slots))

    def build(self) -> Program:
        ops = np.array(self._ops, dtype=np.int64).reshape(len(self._ops), 6)
        args = np.array(self._args, dtype=np.int64)
        luts = (np.concatenate(self._luts) if self._luts
                else np.empty(0, dtype=np.uint32))
        return Program(ops=ops, args=args, luts=luts,
                       n_slots=self.n_slots, n_fixed=self.n_fixed)


# ---------------------------------------------------------------------------
# Backend selection

_njit_exec = None


def _numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def backend_name() -> str:
    """Resolve the active backend from the REVSEQ_NUMBA environment flag."""
    flag = os.environ.get("REVSEQ_NUMBA", "").strip()
    if flag == "0":
        return "numpy"
    if flag == "1":
        if not _numba_available():
            raise ImportError("REVSEQ_NUMBA=1 but numba is not importable")
        return "numba"
    return "numba" if _numba_available() else "numpy"


def _exec_rows(ops, args, luts, V):  # pragma: no cover - compiled below
    n_rows = V.shape[1]
    idx = np.zeros(n_rows, dtype=np.int64)
    for k in range(ops.shape[0]):
        op = ops[k, 0]
        dst = ops[k, 1]
        a = ops[k, 2]
        b = ops[k, 3]
        aux_off = ops[k, 4]
        aux_len = ops[k, 5]
        if op == OP_CONST:
            for r in range(n_rows):
                V[dst, r] = a
        elif op == OP_NOT:
            for r in range(n_rows):
                V[dst, r] = V[a, r] ^ 1
        elif op == OP_AND:
            for r in range(n_rows):
                V[dst, r] = V[a, r] & V[b, r]
        elif op == OP_OR:
            for r in range(n_rows):
                V[dst, r] = V[a, r] | V[b, r]
        elif op == OP_XOR:
            for r in range(n_rows):
                V[dst, r] = V[a, r] ^ V[b, r]
        elif op == OP_COPY:
            for r in range(n_rows):
                V[dst, r] = V[a, r]
        else:  # OP_LUT
            for r in range(n_rows):
                idx[r] = 0
            for t in range(aux_len):
                s = args[aux_off + t]
                for r in range(n_rows):
                    idx[r] = (idx[r] << 1) | V[s, r]
            for r in range(n_rows):
                V[dst, r] = (luts[a + idx[r]] >> b) & 1


def _get_njit_exec():
    global _njit_exec
    if _njit_exec is None:
        from numba import njit
        _njit_exec = njit(cache=True)(_exec_rows)
    return _njit_exec


def _exec_numpy(ops, args, luts, V):
    n_rows = V.shape[1]
    for k in range(ops.shape[0]):
        op, dst, a, b, aux_off, aux_len = ops[k]
        if op == OP_CONST:
            V[dst, :] = a
        elif op == OP_NOT:
            np.bitwise_xor(V[a], 1, out=V[dst])
        elif op == OP_AND:
            np.bitwise_and(V[a], V[b], out=V[dst])
        elif op == OP_OR:
            np.bitwise_or(V[a], V[b], out=V[dst])
        elif op == OP_XOR:
            np.bitwise_xor(V[a], V[b], out=V[dst])
        elif op == OP_COPY:
            V[dst, :] = V[a]
        else:  # OP_LUT
            idx = np.zeros(n_rows, dtype=np.int64)
            for t in range(aux_len):
                np.left_shift(idx, 1, out=idx)
                np.bitwise_or(idx, V[args[aux_off + t]], out=idx)
            V[dst, :] = (luts[a + idx] >> b) & 1


def eval_program(program: Program, inputs: np.ndarray) -> np.ndarray:
    """Run ``program`` over a batch of rows.

    ``inputs`` has shape ``(n_fixed, n_rows)`` with one uint8 bit row per
    input slot. Returns the full slot matrix ``(n_slots, n_rows)``; callers
    read whichever result slots they kept indices for.
    """
    inputs = np.asarray(inputs, dtype=np.uint8)
    if inputs.ndim != 2 or inputs.shape[0] != program.n_fixed:
        raise ValueError(f"expected inputs of shape ({program.n_fixed}, n_rows), got {inputs.shape}")
    n_rows = inputs.shape[1]
    V = np.empty((program.n_slots, n_rows), dtype=np.uint8)
    V[:program.n_fixed] = inputs
    if program.ops.shape[0]:
        if backend_name() == "numba":
            _get_njit_exec()(program.ops, program.args, program.luts, V)
        else:
            _exec_numpy(program.ops, program.args, program.luts, V)
    return V


def enumerate_inputs(n_bits: int) -> np.ndarray:
    """All ``2**n_bits`` input rows as a ``(n_bits, 2**n_bits)`` bit matrix.

    Row 0 is the most significant bit, so column ``w`` spells the binary
    expansion of ``w`` top to bottom.
    """
    if n_bits < 0:
        raise ValueError("n_bits must be >= 0")
    if n_bits > 26:
        raise ValueError(f"refusing to enumerate 2**{n_bits} rows")
    words = np.arange(1 << n_bits, dtype=np.uint32)
    out = np.empty((n_bits, 1 << n_bits), dtype=np.uint8)
    for t in range(n_bits):
        out[t] = (words >> (n_bits - 1 - t)) & 1
    return out


def pack_rows(V: np.ndarray, slots: list[int]) -> np.ndarray:
    """Pack the given slot rows into one word per column, first slot = MSB."""
    n_rows = V.shape[1]
    words = np.zeros(n_rows, dtype=np.uint32)
    for s in slots:
        np.left_shift(words, 1, out=words)
        np.bitwise_or(words, V[s].astype(np.uint32), out=words)
    return words


def find_first_collision(words: np.ndarray) -> tuple[int, int] | None:
    """First repeated value in ``words``, scanning rows in order.

    Returns ``(i, j)`` where ``j`` is the earliest row whose value already
    appeared and ``i`` is that value's first occurrence, or ``None`` if all
    values are distinct. Both backends apply the same rule, so collision
    witnesses are reproducible.
    """
    n = len(words)
    if n < 2:
        return None
    if backend_name() == "numba":
        res = _get_njit_collision()(np.ascontiguousarray(words, dtype=np.uint32))
        if res[0] < 0:
            return None
        return int(res[0]), int(res[1])
    order = np.argsort(words, kind="stable")
    sorted_w = words[order]
    is_dup = np.zeros(n, dtype=bool)
    is_dup[1:] = sorted_w[1:] == sorted_w[:-1]
    if not is_dup.any():
        return None
    dup_positions = np.flatnonzero(is_dup)
    js = order[dup_positions]
    k = int(js.argmin())
    pos = int(dup_positions[k])
    run_starts = np.flatnonzero(~is_dup)
    start = int(run_starts[np.searchsorted(run_starts, pos, side="right") - 1])
    return int(order[start]), int(js[k])


def _collision_rows(words):  # pragma: no cover - compiled below
    n = words.shape[0]
    vmax = np.uint32(0)
    for r in range(n):
        if words[r] > vmax:
            vmax = words[r]
    seen = np.full(int(vmax) + 1, -1, dtype=np.int64)
    for r in range(n):
        w = words[r]
        if seen[w] >= 0:
            return np.array([seen[w], r], dtype=np.int64)
        seen[w] = r
    return np.array([-1, -1], dtype=np.int64)


_njit_collision = None


def _get_njit_collision():
    global _njit_collision
    if _njit_collision is None:
        from numba import njit
        _njit_collision = njit(cache=True)(_collision_rows)
    return _njit_collision
