"""Explicit truth tables for Boolean functions of up to 16 variables.

A table stores the function value for minterm ``t`` at bit ``t`` of a single
Python integer; variable ``x_j`` (0-based) is bit ``j`` of the minterm index.
The integer is exposed as a sequence of 64-bit words through
:attr:`TruthTable.words`.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import Iterable, Sequence

MAX_VARS = 16
WORD_BITS = 64
WORD_MASK = (1 << WORD_BITS) - 1


class TruthTableError(ValueError):
    """Raised on invalid truth-table construction or mismatched operands."""


class ChainSyntaxError(TruthTableError):
    def __init__(self, line_number: int, line: str, reason: str):
        super().__init__(f"line {line_number}: {reason}: `{line}`")
        self.line_number = line_number
        self.line = line
        self.reason = reason


@lru_cache(maxsize=None)
def full_mask(num_vars: int) -> int:
    return (1 << (1 << num_vars)) - 1


@lru_cache(maxsize=None)
def var_mask(num_vars: int, i: int) -> int:
    """Bit pattern of the projection x_i over ``num_vars`` variables."""
    s = 1 << i
    unit = ((1 << s) - 1) << s
    return unit * (full_mask(num_vars) // ((1 << (2 * s)) - 1))


def _check_num_vars(num_vars: int) -> None:
    if not isinstance(num_vars, int) or not 0 <= num_vars <= MAX_VARS:
        raise TruthTableError(f"num_vars must be in 0..{MAX_VARS}, got {num_vars!r}")


class TruthTable:
    """Immutable truth table with a fixed number of variables."""

    __slots__ = ("_num_vars", "_bits")

    def __init__(self, num_vars: int, bits: int = 0):
        _check_num_vars(num_vars)
        if bits < 0 or bits > full_mask(num_vars):
            raise TruthTableError(f"bits do not fit into a {num_vars}-variable table")
        self._num_vars = num_vars
        self._bits = bits

    @classmethod
    def from_words(cls, num_vars: int, words: Sequence[int]) -> TruthTable:
        if len(words) != num_words(num_vars):
            raise TruthTableError(
                f"expected {num_words(num_vars)} words for {num_vars} variables, got {len(words)}"
            )
        bits = 0
        for k, w in enumerate(words):
            if not 0 <= w <= WORD_MASK:
                raise TruthTableError(f"word {k} is not a 64-bit unsigned value")
            bits |= w << (WORD_BITS * k)
        return cls(num_vars, bits)

    @property
    def num_vars(self) -> int:
        return self._num_vars

    @property
    def num_bits(self) -> int:
        return 1 << self._num_vars

    @property
    def bits(self) -> int:
        """The table as an unsigned integer (bit ``t`` is f(t))."""
        return self._bits

    @property
    def words(self) -> tuple[int, ...]:
        return tuple(
            (self._bits >> (WORD_BITS * k)) & WORD_MASK for k in range(num_words(self._num_vars))
        )

    def get_bit(self, t: int) -> int:
        if not 0 <= t < self.num_bits:
            raise IndexError(f"minterm {t} out of range for {self._num_vars} variables")
        return (self._bits >> t) & 1

    def count_ones(self) -> int:
        return bin(self._bits).count("1")

    def is_const0(self) -> bool:
        return self._bits == 0

    def _same_arity(self, other: TruthTable) -> None:
        if not isinstance(other, TruthTable):
            raise TypeError(f"expected TruthTable, got {type(other).__name__}")
        if other._num_vars != self._num_vars:
            raise TruthTableError(
                f"operands differ in num_vars ({self._num_vars} vs {other._num_vars})"
            )

    def __and__(self, other: TruthTable) -> TruthTable:
        self._same_arity(other)
        return TruthTable(self._num_vars, self._bits & other._bits)

    def __or__(self, other: TruthTable) -> TruthTable:
        self._same_arity(other)
        return TruthTable(self._num_vars, self._bits | other._bits)

    def __xor__(self, other: TruthTable) -> TruthTable:
        self._same_arity(other)
        return TruthTable(self._num_vars, self._bits ^ other._bits)

    def __invert__(self) -> TruthTable:
        return TruthTable(self._num_vars, self._bits ^ full_mask(self._num_vars))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruthTable):
            return NotImplemented
        return self._num_vars == other._num_vars and self._bits == other._bits

    def __hash__(self) -> int:
        return hash((self._num_vars, self._bits))

    def __lt__(self, other: TruthTable) -> bool:
        self._same_arity(other)
        return self._bits < other._bits

    def __repr__(self) -> str:
        return f"TruthTable({self._num_vars}, 0x{to_hex(self)})"


def num_words(num_vars: int) -> int:
    return max(1, 1 << max(0, num_vars - 6))


def constant(num_vars: int, value: bool) -> TruthTable:
    return TruthTable(num_vars, full_mask(num_vars) if value else 0)


def create_nth_var(num_vars: int, i: int) -> TruthTable:
    _check_num_vars(num_vars)
    if not 0 <= i < num_vars:
        raise TruthTableError(f"variable index {i} out of range for {num_vars} variables")
    return TruthTable(num_vars, var_mask(num_vars, i))


class Op(enum.Enum):
    AND = "and"
    OR = "or"
    XOR = "xor"
    NOT = "not"


def apply(op: Op, *operands: TruthTable) -> TruthTable:
    """Bitwise combination of one (NOT) or two (AND/OR/XOR) tables."""
    if op is Op.NOT:
        if len(operands) != 1:
            raise TruthTableError("NOT takes exactly one operand")
        return ~operands[0]
    if len(operands) != 2:
        raise TruthTableError(f"{op.name} takes exactly two operands")
    a, b = operands
    if op is Op.AND:
        return a & b
    if op is Op.OR:
        return a | b
    return a ^ b


def ternary_majority(a: TruthTable, b: TruthTable, c: TruthTable) -> TruthTable:
    return (a & b) | (a & c) | (b & c)


def hex_length(num_vars: int) -> int:
    return max(1, (1 << num_vars) >> 2)


def to_hex(tt: TruthTable) -> str:
    return format(tt.bits, f"0{hex_length(tt.num_vars)}x")


def to_binary(tt: TruthTable) -> str:
    return format(tt.bits, f"0{tt.num_bits}b")


_HEX_RE = re.compile(r"[0-9a-fA-F]+")


def create_from_hex_string(num_vars: int, text: str) -> TruthTable:
    _check_num_vars(num_vars)
    expected = hex_length(num_vars)
    if len(text) != expected:
        raise TruthTableError(
            f"hex string of length {len(text)} does not match {num_vars} variables "
            f"(expected {expected})"
        )
    if not _HEX_RE.fullmatch(text):
        raise TruthTableError(f"invalid hex digit in {text!r}")
    bits = int(text, 16)
    if bits > full_mask(num_vars):
        raise TruthTableError(f"{text!r} sets bits beyond {1 << num_vars} minterms")
    return TruthTable(num_vars, bits)


def create_from_binary_string(num_vars: int, text: str) -> TruthTable:
    _check_num_vars(num_vars)
    if len(text) != 1 << num_vars or set(text) - {"0", "1"}:
        raise TruthTableError(f"invalid binary string {text!r} for {num_vars} variables")
    return TruthTable(num_vars, int(text, 2))


_STEP_RE = re.compile(r"\s*x(\d+)\s*=\s*x(\d+)\s*([&|^])\s*x(\d+)\s*")


def simulate_chain_text(num_inputs: int, lines: Iterable[str]) -> list[TruthTable]:
    """Simulate a textual chain such as ``["x5 = x3 ^ x4", "x6 = x1 & x3"]``.

    Variables are 1-based: ``x1..x{num_inputs}`` are the inputs, and the k-th
    line must define ``x{num_inputs + k}``. Returns one table per line.
    """
    _check_num_vars(num_inputs)
    values = [create_nth_var(num_inputs, j) for j in range(num_inputs)]
    steps = []
    for lineno, line in enumerate(lines, start=1):
        m = _STEP_RE.fullmatch(line)
        if m is None:
            raise ChainSyntaxError(lineno, line, "expected `x<i> = x<j> <op> x<k>`")
        target, lhs, op, rhs = int(m[1]), int(m[2]), m[3], int(m[4])
        if target != len(values) + 1:
            raise ChainSyntaxError(lineno, line, f"expected definition of x{len(values) + 1}")
        for ref in (lhs, rhs):
            if ref < 1:
                raise ChainSyntaxError(lineno, line, f"bad index x{ref}")
            if ref >= target:
                raise ChainSyntaxError(lineno, line, f"forward reference to x{ref}")
        a, b = values[lhs - 1], values[rhs - 1]
        value = a & b if op == "&" else a | b if op == "|" else a ^ b
        values.append(value)
        steps.append(value)
    return steps


@dataclass(frozen=True)
class Cube:
    """Product of positive literals; the empty cube is the constant-1 term."""

    positive_vars: frozenset[int] = frozenset()

    def to_string(self, num_vars: int) -> str:
        return "".join("1" if j in self.positive_vars else "-" for j in range(num_vars))

    def to_truth_table(self, num_vars: int) -> TruthTable:
        bits = full_mask(num_vars)
        for j in self.positive_vars:
            bits &= var_mask(num_vars, j)
        return TruthTable(num_vars, bits)


def pprm_cubes(tt: TruthTable) -> list[Cube]:
    """Positive-polarity Reed-Muller (algebraic normal form) cover of ``tt``.

    The butterfly transform turns the table into its monomial coefficients.
    Cubes are listed in the order of a recursion over x_0, x_1, ... that
    visits the branch containing the variable first; the last variable is the
    base case and emits the cube without it before the cube with it.
    """
    n = tt.num_vars
    coeffs = tt.bits
    for i in range(n):
        s = 1 << i
        coeffs ^= (coeffs & (full_mask(n) ^ var_mask(n, i))) << s
    monomials = [m for m in range(1 << n) if (coeffs >> m) & 1]

    def rank(m: int) -> tuple[int, ...]:
        key = [1 - ((m >> j) & 1) for j in range(n)]
        if n:
            key[-1] = 1 - key[-1]
        return tuple(key)

    monomials.sort(key=rank)
    return [Cube(frozenset(j for j in range(n) if (m >> j) & 1)) for m in monomials]


def print_cubes(cubes: Iterable[Cube], num_vars: int) -> str:
    return "".join(cube.to_string(num_vars) + "\n" for cube in cubes)


@dataclass(frozen=True)
class NpnTransform:
    """Input permutation/negation plus output negation.

    Applying the transform to ``f`` yields ``g(x) = output_phase ^ f(w)`` where
    input ``k`` of ``f`` reads ``w_k = x[perm[k]] ^ bit k of input_phase``.
    """

    perm: tuple[int, ...]
    input_phase: int = 0
    output_phase: bool = False

    def __post_init__(self):
        if sorted(self.perm) != list(range(len(self.perm))):
            raise TruthTableError(f"{self.perm} is not a permutation")
        if not 0 <= self.input_phase < (1 << len(self.perm)):
            raise TruthTableError(f"input phase {self.input_phase:#x} out of range")

    @property
    def num_vars(self) -> int:
        return len(self.perm)

    @classmethod
    def identity(cls, num_vars: int) -> NpnTransform:
        return cls(tuple(range(num_vars)))


def apply_npn_transform(tt: TruthTable, transform: NpnTransform) -> TruthTable:
    n = tt.num_vars
    if transform.num_vars != n:
        raise TruthTableError(
            f"transform over {transform.num_vars} variables applied to {n}-variable table"
        )
    perm, phase, f = transform.perm, transform.input_phase, tt.bits
    out = 1 if transform.output_phase else 0
    bits = 0
    for x in range(1 << n):
        w = phase
        for k in range(n):
            w ^= ((x >> perm[k]) & 1) << k
        bits |= (((f >> w) & 1) ^ out) << x
    return TruthTable(n, bits)


MAX_NPN_VARS = 6


@lru_cache(maxsize=None)
def _plain_changes(n: int) -> tuple[int, ...]:
    """Adjacent-swap positions visiting all n! permutations (Steinhaus-Johnson-Trotter)."""
    if n <= 1:
        return ()
    sub = _plain_changes(n - 1)
    swaps: list[int] = []
    leftward = True
    for k in range(len(sub) + 1):
        swaps.extend(range(n - 2, -1, -1) if leftward else range(n - 1))
        if k < len(sub):
            swaps.append(sub[k] + 1 if leftward else sub[k])
        leftward = not leftward
    return tuple(swaps)


def _flip(bits: int, n: int, i: int) -> int:
    m = var_mask(n, i)
    s = 1 << i
    return ((bits & m) >> s) | ((bits & (full_mask(n) ^ m)) << s)


def _swap_adjacent(bits: int, n: int, p: int) -> int:
    lo, hi = var_mask(n, p), var_mask(n, p + 1)
    m10 = lo & ~hi
    m01 = hi & ~lo
    s = 1 << p
    return (bits & ~(m10 | m01)) | ((bits & m01) >> s) | ((bits & m10) << s)


def exact_npn_canonization(tt: TruthTable) -> tuple[TruthTable, NpnTransform]:
    """Smallest table over all n!·2^n·2 NPN transforms, and the transform reaching it.

    Permutations are walked by adjacent swaps and input phases by a Gray code,
    so each candidate costs one bitwise update.
    """
    n = tt.num_vars
    if n > MAX_NPN_VARS:
        raise TruthTableError(f"exact NPN canonization supports at most {MAX_NPN_VARS} variables")
    mask = full_mask(n)
    flips = [(k & -k).bit_length() - 1 for k in range(1, 1 << n)]

    # f input k is driven by current-table variable q[k]; qinv is its inverse
    qinv = list(range(n))
    phase = 0
    h = tt.bits
    best = (h, tuple(qinv), phase, False)
    if (h ^ mask) < best[0]:
        best = (h ^ mask, tuple(qinv), phase, True)

    def scan(h: int, phase: int) -> tuple[int, int]:
        nonlocal best
        for i in flips:
            h = _flip(h, n, i)
            phase ^= 1 << qinv[i]
            if h < best[0]:
                best = (h, tuple(qinv), phase, False)
            if (h ^ mask) < best[0]:
                best = (h ^ mask, tuple(qinv), phase, True)
        return h, phase

    h, phase = scan(h, phase)
    for p in _plain_changes(n):
        h = _swap_adjacent(h, n, p)
        qinv[p], qinv[p + 1] = qinv[p + 1], qinv[p]
        if h < best[0]:
            best = (h, tuple(qinv), phase, False)
        if (h ^ mask) < best[0]:
            best = (h ^ mask, tuple(qinv), phase, True)
        h, phase = scan(h, phase)

    bits, best_qinv, best_phase, out = best
    perm = [0] * n
    for var, k in enumerate(best_qinv):
        perm[k] = var
    return TruthTable(n, bits), NpnTransform(tuple(perm), best_phase, out)


def npn_class_representative(tt: TruthTable) -> TruthTable:
    return exact_npn_canonization(tt)[0]


def xor_all(tables: Iterable[TruthTable], num_vars: int) -> TruthTable:
    return reduce(lambda a, b: a ^ b, tables, constant(num_vars, False))
