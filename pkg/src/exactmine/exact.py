"""SAT-based exact synthesis of minimum-size Boolean chains.

The flow composes a specification, the single-selection-variable (SSV)
encoder, a solver backend and a synthesizer that deepens the chain size until
the encoding becomes satisfiable.
"""

from __future__ import annotations

import enum
import sys
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import IO, Sequence

from .chain import Chain, Step
from .sat import SolveResult, SolverBackend, State, make_solver
from .truthtable import TruthTable, create_nth_var, var_mask

MAX_EXACT_INPUTS = 6


class SynthError(ValueError):
    pass


class SynthMethod(enum.Enum):
    STD = "std"
    STD_CEGAR = "std_cegar"


class SynthResult(enum.Enum):
    SUCCESS = "success"
    TIMEOUT = "timeout"
    FAILURE = "failure"


@dataclass
class SynthSpec:
    nr_in: int
    functions: list[TruthTable]
    conflict_limit: int | None = None
    verbosity: int = 0
    # sound size-preserving constraints; off keeps the encoding minimal
    symmetry_breaking: bool = False
    max_steps: int = 32

    @property
    def nr_out(self) -> int:
        return len(self.functions)

    def check(self) -> None:
        if not 1 <= self.nr_in <= MAX_EXACT_INPUTS:
            raise SynthError(f"nr_in must be in 1..{MAX_EXACT_INPUTS}, got {self.nr_in}")
        if not self.functions:
            raise SynthError("specification has no functions")
        for h, f in enumerate(self.functions):
            if f.num_vars != self.nr_in:
                raise SynthError(
                    f"function {h} has {f.num_vars} variables, specification expects {self.nr_in}"
                )


def normalize(spec: SynthSpec) -> tuple[SynthSpec, list[bool]]:
    """Complement every function that is 1 on the all-zero minterm."""
    spec.check()
    inversions = [f.get_bit(0) == 1 for f in spec.functions]
    functions = [~f if inv else f for f, inv in zip(spec.functions, inversions)]
    return replace(spec, functions=functions), inversions


def _trivial_ref(f: TruthTable) -> int | None:
    """Reference for a normalized function that needs no step, else None."""
    if f.is_const0():
        return 0
    for j in range(f.num_vars):
        if f == create_nth_var(f.num_vars, j):
            return j + 1
    return None


def _depends_on(f: TruthTable, var: int) -> bool:
    mask = var_mask(f.num_vars, var)
    return ((f.bits & mask) >> (1 << var)) != (f.bits & (mask >> (1 << var)))


class SsvEncoding:
    """CNF whose models are chains of exactly ``r`` steps computing ``functions``.

    Functions must be normalized (0 on minterm 0) and non-trivial. Minterms
    are encoded on demand so the CEGAR flow can grow the formula; the
    all-zero minterm is never encoded because normalized steps are 0 there.
    """

    def __init__(
        self,
        nr_in: int,
        functions: Sequence[TruthTable],
        r: int,
        solver: SolverBackend,
        symmetry_breaking: bool = False,
    ):
        if r < 1:
            raise SynthError("the SSV encoding needs at least one step")
        self.nr_in = nr_in
        self.functions = list(functions)
        self.r = r
        self.solver = solver
        self.minterms: list[int] = []
        n = nr_in

        def fresh() -> int:
            return solver.add_variable()

        # selection[s]: list of (j, k, var) with refs j < k < n + 1 + s
        self.selection: list[list[tuple[int, int, int]]] = []
        # operator[s]: variables for op bits 1 (a=1,b=0), 2 (a=0,b=1), 3 (a=b=1)
        self.operator: list[tuple[int, int, int]] = []
        for s in range(r):
            refs = range(1, n + 1 + s)
            self.selection.append([(j, k, fresh()) for j, k in combinations(refs, 2)])
            self.operator.append((fresh(), fresh(), fresh()))
        # output[h][s]: output h is step s
        self.output = [[fresh() for _ in range(r)] for _ in self.functions]
        self.simulation: dict[int, list[int]] = {}

        add = solver.add_clause
        for s in range(r):
            svars = [2 * v for _, _, v in self.selection[s]]
            add(svars)
            for x, y in combinations(svars, 2):
                add((x ^ 1, y ^ 1))
            f1, f2, f3 = (2 * v for v in self.operator[s])
            add((f1, f2, f3))  # not constant 0
            add((f1 ^ 1, f2, f3 ^ 1))  # not the first fanin
            add((f1, f2 ^ 1, f3 ^ 1))  # not the second fanin
        for ovars in self.output:
            lits = [2 * v for v in ovars]
            add(lits)
            for x, y in combinations(lits, 2):
                add((x ^ 1, y ^ 1))
        if symmetry_breaking:
            self._add_symmetry_breaking()

    def _add_symmetry_breaking(self) -> None:
        n, r, add = self.nr_in, self.r, self.solver.add_clause
        # every step feeds a later step or an output
        for s in range(r):
            ref = n + 1 + s
            users = [2 * self.output[h][s] for h in range(len(self.functions))]
            for s2 in range(s + 1, r):
                users.extend(2 * v for j, k, v in self.selection[s2] if ref in (j, k))
            add(users)
        # every input some output depends on is read by some step
        for i in range(1, n + 1):
            if any(_depends_on(f, i - 1) for f in self.functions):
                add([2 * v for step in self.selection for j, k, v in step if i in (j, k)])
        # independent consecutive steps appear in colexicographic fanin order
        for s in range(r - 1):
            ref = n + 1 + s
            for j, k, v in self.selection[s]:
                for j2, k2, v2 in self.selection[s + 1]:
                    if ref not in (j2, k2) and (k2, j2) < (k, j):
                        add((2 * v + 1, 2 * v2 + 1))
        # a step never combines another step with one of that step's own fanins
        for s in range(r):
            ref = n + 1 + s
            for s2 in range(s + 1, r):
                for j, k, v in self.selection[s]:
                    for j2, k2, v2 in self.selection[s2]:
                        if k2 == ref and j2 in (j, k):
                            add((2 * v + 1, 2 * v2 + 1))
        # consecutive steps on the same fanins have strictly increasing operators
        for s in range(r - 1):
            pairs = {(j, k): v for j, k, v in self.selection[s + 1]}
            ops_lo = [2 * v for v in self.operator[s]]
            ops_hi = [2 * v for v in self.operator[s + 1]]
            same = 2 * self.solver.add_variable()
            for j, k, v in self.selection[s]:
                add((2 * v + 1, 2 * pairs[(j, k)] + 1, same))
            self._add_op_less([same ^ 1], ops_lo, ops_hi)

    def _add_op_less(self, guard: list[int], lo: list[int], hi: list[int]) -> None:
        """Under ``guard``, operator bits ``lo`` < ``hi`` read as (bit3, bit2, bit1)."""
        add = self.solver.add_clause
        lo_msb, hi_msb = lo[::-1], hi[::-1]
        # forbid every (lo, hi) assignment pair with lo >= hi; 3 bits keep this small
        for a in range(8):
            for b in range(a + 1):
                clause = list(guard)
                for pos in range(3):
                    bit_a = (a >> (2 - pos)) & 1
                    bit_b = (b >> (2 - pos)) & 1
                    clause.append(lo_msb[pos] ^ bit_a)
                    clause.append(hi_msb[pos] ^ bit_b)
                add(clause)

    def _sim_var(self, ref: int, t: int) -> int | None:
        return None if ref <= self.nr_in else self.simulation[t][ref - self.nr_in - 1]

    def add_minterm(self, t: int) -> None:
        if t in self.simulation:
            return
        if not 0 < t < (1 << self.nr_in):
            raise SynthError(f"minterm {t} cannot be encoded")
        n, add = self.nr_in, self.solver.add_clause
        xs = [self.solver.add_variable() for _ in range(self.r)]
        self.simulation[t] = xs
        self.minterms.append(t)
        for s in range(self.r):
            x = 2 * xs[s]
            fvars = self.operator[s]
            for j, k, sv in self.selection[s]:
                guard = 2 * sv + 1
                xj = self._sim_var(j, t)
                xk = self._sim_var(k, t)
                for a in (0, 1):
                    if xj is None:
                        if (t >> (j - 1)) & 1 != a:
                            continue
                        lits_a = []
                    else:
                        lits_a = [2 * xj + a]
                    for b in (0, 1):
                        if xk is None:
                            if (t >> (k - 1)) & 1 != b:
                                continue
                            lits_b = []
                        else:
                            lits_b = [2 * xk + b]
                        base = [guard, *lits_a, *lits_b]
                        if a == 0 and b == 0:
                            add(base + [x ^ 1])
                        else:
                            f = 2 * fvars[a + 2 * b - 1]
                            add(base + [x ^ 1, f])
                            add(base + [x, f ^ 1])
        for h, func in enumerate(self.functions):
            want = (func.bits >> t) & 1
            for s in range(self.r):
                add((2 * self.output[h][s] + 1, 2 * xs[s] + (0 if want else 1)))

    def extract_chain(self, result: SolveResult) -> Chain:
        """Decode a model into a chain (outputs not yet un-normalized)."""
        if result.model is None:
            raise SynthError("cannot decode a chain without a model")
        model = result.model
        steps = []
        for s in range(self.r):
            chosen = [(j, k) for j, k, v in self.selection[s] if model[v]]
            if len(chosen) != 1:
                raise SynthError(f"step {s}: {len(chosen)} fanin pairs selected")
            f1, f2, f3 = (model[v] for v in self.operator[s])
            steps.append(Step(*chosen[0], (f1 << 1) | (f2 << 2) | (f3 << 3)))
        outputs = []
        for h, ovars in enumerate(self.output):
            chosen = [s for s, v in enumerate(ovars) if model[v]]
            if len(chosen) != 1:
                raise SynthError(f"output {h}: {len(chosen)} steps selected")
            outputs.append((self.nr_in + 1 + chosen[0], False))
        return Chain(self.nr_in, steps, outputs)


def encode_ssv(
    spec: SynthSpec,
    r: int,
    solver: SolverBackend,
    minterms: Sequence[int] | None = None,
) -> SsvEncoding:
    """Encode a normalized, trivial-free spec for chains of ``r`` steps.

    All minterms are encoded unless ``minterms`` selects a subset.
    """
    enc = SsvEncoding(spec.nr_in, spec.functions, r, solver, spec.symmetry_breaking)
    for t in minterms if minterms is not None else range(1, 1 << spec.nr_in):
        enc.add_minterm(t)
    return enc


def extract_chain(encoding: SsvEncoding, result: SolveResult) -> Chain:
    return encoding.extract_chain(result)


def verify(chain: Chain, spec: SynthSpec) -> bool:
    if chain.num_inputs != spec.nr_in or len(chain.outputs) != spec.nr_out:
        raise SynthError(
            f"chain with {chain.num_inputs} inputs/{len(chain.outputs)} outputs does not fit "
            f"a {spec.nr_in}-input/{spec.nr_out}-output specification"
        )
    return chain.simulate() == list(spec.functions)


@dataclass
class SynthStats:
    """Outcome of every solver call, keyed by chain size."""

    attempts: list[tuple[int, State, int]] = field(default_factory=list)

    def record(self, r: int, result: SolveResult) -> None:
        self.attempts.append((r, result.state, result.conflicts))

    def unsat_sizes(self) -> list[int]:
        return sorted({r for r, state, _ in self.attempts if state is State.UNSATISFIABLE})


class _Assembly:
    """Splits a spec into trivial outputs and the part that needs SAT."""

    def __init__(self, spec: SynthSpec):
        self.spec = spec
        normalized, self.inversions = normalize(spec)
        self.normalized = normalized
        self.trivial: dict[int, int] = {}
        self.targets: list[int] = []
        for h, f in enumerate(normalized.functions):
            ref = _trivial_ref(f)
            if ref is None:
                self.targets.append(h)
            else:
                self.trivial[h] = ref
        self.target_functions = [normalized.functions[h] for h in self.targets]

    def finish(self, partial: Chain | None) -> Chain:
        steps = partial.steps if partial is not None else ()
        outputs = []
        for h in range(self.spec.nr_out):
            if h in self.trivial:
                ref = self.trivial[h]
            else:
                ref = partial.outputs[self.targets.index(h)][0]
            outputs.append((ref, self.inversions[h]))
        return Chain(self.spec.nr_in, steps, outputs)


def _log(spec: SynthSpec, stream: IO[str] | None, message: str) -> None:
    if spec.verbosity > 0:
        print(message, file=stream if stream is not None else sys.stdout)


def synthesize(
    spec: SynthSpec,
    method: SynthMethod = SynthMethod.STD,
    solver: str = "cdcl",
    encoder: str = "ssv",
    stats: SynthStats | None = None,
    stream: IO[str] | None = None,
) -> tuple[SynthResult, Chain | None]:
    """Find a minimum-size chain for ``spec``.

    Sizes are tried in increasing order starting at 1, so a returned chain
    of size r comes with UNSAT results for every smaller size. ``solver``
    names a registered backend; ``ssv`` is the only encoder.
    """
    if encoder != "ssv":
        raise SynthError(f"unknown encoder {encoder!r} (available: ssv)")
    job = _Assembly(spec)
    if stats is None:
        stats = SynthStats()
    if not job.targets:
        _log(spec, stream, "[i] all outputs are trivial, no steps needed")
        return SynthResult.SUCCESS, job.finish(None)

    run = _std if method is SynthMethod.STD else _cegar
    for r in range(1, spec.max_steps + 1):
        outcome, partial = run(job, r, solver, stats, stream)
        if outcome is State.UNDEFINED:
            _log(spec, stream, f"[i] r = {r}: conflict limit reached")
            return SynthResult.TIMEOUT, None
        if outcome is State.UNSATISFIABLE:
            _log(spec, stream, f"[i] r = {r}: no chain")
            continue
        chain = job.finish(partial)
        if not verify(chain, spec):
            return SynthResult.FAILURE, None
        _log(spec, stream, f"[i] r = {r}: found chain")
        return SynthResult.SUCCESS, chain
    return SynthResult.FAILURE, None


def _std(job: _Assembly, r: int, solver_name: str, stats: SynthStats, stream):
    spec = job.spec
    solver = make_solver(solver_name)
    enc = SsvEncoding(spec.nr_in, job.target_functions, r, solver, spec.symmetry_breaking)
    for t in range(1, 1 << spec.nr_in):
        enc.add_minterm(t)
    result = solver.solve(conflict_limit=spec.conflict_limit)
    stats.record(r, result)
    if result.state is not State.SATISFIABLE:
        return result.state, None
    return State.SATISFIABLE, enc.extract_chain(result)


def _first_mismatch(chain: Chain, functions: Sequence[TruthTable]) -> int | None:
    diff = 0
    for got, want in zip(chain.simulate(), functions):
        diff |= got.bits ^ want.bits
    if not diff:
        return None
    return (diff & -diff).bit_length() - 1


def _cegar(job: _Assembly, r: int, solver_name: str, stats: SynthStats, stream):
    spec = job.spec
    solver = make_solver(solver_name)
    enc = SsvEncoding(spec.nr_in, job.target_functions, r, solver, spec.symmetry_breaking)
    onset = 0
    for f in job.target_functions:
        onset |= f.bits
    enc.add_minterm((onset & -onset).bit_length() - 1)
    while True:
        result = solver.solve(conflict_limit=spec.conflict_limit)
        stats.record(r, result)
        if result.state is not State.SATISFIABLE:
            return result.state, None
        candidate = enc.extract_chain(result)
        t = _first_mismatch(candidate, job.target_functions)
        if t is None:
            return State.SATISFIABLE, candidate
        _log(spec, stream, f"[i] r = {r}: counterexample at minterm {t}, "
             f"{len(enc.minterms) + 1} minterms encoded")
        enc.add_minterm(t)


def chain_exists(spec: SynthSpec, r: int, solver: str = "cdcl") -> State:
    """Whether some chain of exactly ``r`` steps realizes ``spec`` (r >= 1)."""
    job = _Assembly(spec)
    if not job.targets:
        raise SynthError("all outputs are trivial; only the empty chain is meaningful")
    state, _ = _std(job, r, solver, SynthStats(), None)
    return state
