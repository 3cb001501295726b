"""Boolean chains: fanin-2 straight-line programs over primary inputs.

References are integers: ``0`` is the constant-0 signal (outputs only),
``1..num_inputs`` are the primary inputs and ``num_inputs + 1 + s`` is step
``s``. A step operator is a 4-bit table whose bit ``a + 2*b`` is the output
for fanin values ``a`` (first fanin) and ``b`` (second fanin).
"""

from __future__ import annotations

from dataclasses import dataclass

from .truthtable import TruthTable, create_nth_var, full_mask

# constants, projections and complemented projections
TRIVIAL_OPS = frozenset({0x0, 0xF, 0xA, 0x5, 0xC, 0x3})
NONTRIVIAL_OPS = tuple(op for op in range(16) if op not in TRIVIAL_OPS)
MAX_INPUTS = 16


class ChainError(ValueError):
    pass


@dataclass(frozen=True)
class Step:
    fanin_a: int
    fanin_b: int
    op: int


def _decompose(op: int) -> tuple[str, bool, bool, bool]:
    """Split an operator into (base, negate first, negate second, negate result).

    Conjunction/disjunction tables pick whichever of AND/OR needs fewer
    complements (AND on ties); XOR and XNOR keep plain operands.
    """
    if op == 0x6:
        return "xor", False, False, False
    if op == 0x9:
        return "xor", False, False, True
    for na in (False, True):
        for nb in (False, True):
            for nout in (False, True):
                table = 0
                for idx in range(4):
                    a, b = idx & 1, idx >> 1
                    table |= (((a ^ na) & (b ^ nb)) ^ nout) << idx
                if table == op:
                    if na + nb + nout <= 1:
                        return "and", na, nb, nout
                    return "or", not na, not nb, not nout
    raise ChainError(f"operator {op:#x} is trivial")


_BRACKETS = {"and": "()", "or": "{}", "xor": "[]"}


@dataclass(frozen=True)
class Chain:
    num_inputs: int
    steps: tuple[Step, ...] = ()
    outputs: tuple[tuple[int, bool], ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self, "steps", tuple(s if isinstance(s, Step) else Step(*s) for s in self.steps)
        )
        object.__setattr__(
            self, "outputs", tuple((int(ref), bool(neg)) for ref, neg in self.outputs)
        )

    @property
    def size(self) -> int:
        return len(self.steps)

    def step_ref(self, s: int) -> int:
        return self.num_inputs + 1 + s

    def validate(self) -> list[str]:
        """Every structural violation, or an empty list for a well-formed chain."""
        problems = []
        if not 0 <= self.num_inputs <= MAX_INPUTS:
            problems.append(f"number of inputs {self.num_inputs} out of range")
        for s, step in enumerate(self.steps):
            ref = self.step_ref(s)
            for name, fanin in (("first", step.fanin_a), ("second", step.fanin_b)):
                if fanin >= ref:
                    problems.append(f"step {ref}: {name} fanin {fanin} does not precede the step")
                elif fanin < 1:
                    problems.append(f"step {ref}: {name} fanin {fanin} is not a signal")
            if step.fanin_a >= step.fanin_b:
                problems.append(f"step {ref}: fanins {step.fanin_a}, {step.fanin_b} out of order")
            if not 0 <= step.op <= 0xF:
                problems.append(f"step {ref}: operator {step.op} is not a 4-bit table")
            elif step.op in TRIVIAL_OPS:
                problems.append(f"step {ref}: trivial operator {step.op:#x}")
        last = self.step_ref(len(self.steps) - 1)
        for h, (ref, _) in enumerate(self.outputs):
            if not 0 <= ref <= last:
                problems.append(f"output {h}: dangling reference {ref}")
        return problems

    def is_valid(self) -> bool:
        return not self.validate()

    def _check(self) -> None:
        problems = self.validate()
        if problems:
            raise ChainError("; ".join(problems))

    def simulate_steps(self) -> list[TruthTable]:
        """Truth tables of every signal indexed by reference (constant, inputs, steps)."""
        self._check()
        n = self.num_inputs
        mask = full_mask(n)
        values = [0] + [create_nth_var(n, j).bits for j in range(n)]
        for step in self.steps:
            a, b = values[step.fanin_a], values[step.fanin_b]
            na, nb = a ^ mask, b ^ mask
            v = 0
            if step.op & 1:
                v |= na & nb
            if step.op & 2:
                v |= a & nb
            if step.op & 4:
                v |= na & b
            if step.op & 8:
                v |= a & b
            values.append(v)
        return [TruthTable(n, v) for v in values]

    def simulate(self) -> list[TruthTable]:
        """One truth table per output, complement flags applied."""
        values = self.simulate_steps()
        return [~values[ref] if neg else values[ref] for ref, neg in self.outputs]

    def to_expression(self, output_index: int = 0) -> str:
        """Expression for one output: ``()`` AND, ``{}`` OR, ``[]`` XOR, ``!`` complement."""
        self._check()
        if not 0 <= output_index < len(self.outputs):
            raise ChainError(f"output index {output_index} out of range")
        ref, neg = self.outputs[output_index]
        return self._expr(ref, neg)

    def _expr(self, ref: int, neg: bool) -> str:
        if ref == 0:
            return "1" if neg else "0"
        bang = "!" if neg else ""
        if ref <= self.num_inputs:
            return bang + chr(ord("a") + ref - 1)
        step = self.steps[ref - self.num_inputs - 1]
        base, na, nb, nout = _decompose(step.op)
        open_, close = _BRACKETS[base]
        bang = "!" if neg != nout else ""
        return f"{bang}{open_}{self._expr(step.fanin_a, na)}{self._expr(step.fanin_b, nb)}{close}"

    def __str__(self) -> str:
        lines = []
        for s, step in enumerate(self.steps):
            lines.append(
                f"x{self.step_ref(s)} = {step.op:04b}(x{step.fanin_a}, x{step.fanin_b})"
            )
        outs = ", ".join(f"{'!' if neg else ''}x{ref}" for ref, neg in self.outputs)
        lines.append(f"outputs: {outs}")
        return "\n".join(lines)


def constant_chain(num_inputs: int, value: bool) -> Chain:
    return Chain(num_inputs, (), ((0, value),))


def simulate(chain: Chain) -> list[TruthTable]:
    return chain.simulate()


def to_expression(chain: Chain, output_index: int = 0) -> str:
    return chain.to_expression(output_index)


def validate(chain: Chain) -> list[str]:
    return chain.validate()
