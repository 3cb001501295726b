"""Propositional reasoning layer: solver interface, Tseytin gadgets, bundled CDCL solver.

Literals are plain integers ``2 * var + negated`` wrapped in :class:`Literal`
for readability; every solver accepts either form.
"""

from __future__ import annotations

import enum
import heapq
from dataclasses import dataclass, field
from typing import IO, Iterable, Protocol, Sequence


# True when this module runs as the Cython-compiled extension
COMPILED = not __file__.endswith(".py")


class SolverError(ValueError):
    pass


class Literal(int):
    """Solver literal; ``~lit`` negates it."""

    __slots__ = ()

    def __new__(cls, variable: int, negated: bool = False):
        if variable < 0:
            raise SolverError(f"invalid variable {variable}")
        return super().__new__(cls, 2 * variable + (1 if negated else 0))

    @classmethod
    def positive(cls, variable: int) -> Literal:
        return cls(variable, False)

    @classmethod
    def negative(cls, variable: int) -> Literal:
        return cls(variable, True)

    @property
    def variable(self) -> int:
        return int(self) >> 1

    @property
    def is_negated(self) -> bool:
        return bool(int(self) & 1)

    def __invert__(self) -> Literal:
        return Literal(int(self) >> 1, not (int(self) & 1))

    def __repr__(self) -> str:
        return f"{'~' if self.is_negated else ''}v{self.variable}"


def lit(x: int) -> Literal:
    """Promote a raw integer literal."""
    return Literal(x >> 1, bool(x & 1))


class State(enum.Enum):
    SATISFIABLE = "satisfiable"
    UNSATISFIABLE = "unsatisfiable"
    UNDEFINED = "undefined"


@dataclass
class SolveResult:
    state: State
    model: list[bool] | None = None
    conflicts: int = 0

    def __bool__(self) -> bool:
        return self.state is State.SATISFIABLE

    def value(self, literal: int) -> bool:
        if self.model is None:
            raise SolverError("no model available")
        return self.model[literal >> 1] != bool(literal & 1)


class SolverBackend(Protocol):
    """What a solver must provide to plug into gadgets and exact synthesis."""

    def add_variable(self) -> int: ...

    def add_clause(self, literals: Iterable[int]) -> None: ...

    def solve(
        self, assumptions: Sequence[int] = (), conflict_limit: int | None = None
    ) -> SolveResult: ...

    @property
    def num_variables(self) -> int: ...


# --------------------------------------------------------------------------
# Bundled solver


def _luby(i: int) -> int:
    """i-th element (0-based) of the Luby restart sequence."""
    size, seq = 1, 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i %= size
    return 1 << seq


class CdclSolver:
    """Conflict-driven clause-learning solver.

    Two watched literals per clause, first-UIP learning with clause
    minimization, VSIDS branching with phase saving, Luby restarts and
    periodic learnt-clause reduction. Clauses may be added between calls to
    :meth:`solve`; assumptions hold for a single call only.
    """

    restart_unit = 64

    def __init__(self):
        self._nvars = 0
        # per-literal value: 1 true, -1 false, 0 unassigned
        self._val: list[int] = []
        self._level: list[int] = []
        self._reason: list[list[int] | None] = []
        self._phase: list[int] = []
        self._activity: list[float] = []
        # long clauses: per literal, (blocker literal, clause) pairs
        self._watches: list[list[tuple[int, list[int]]]] = []
        # binary clauses: per literal, (other literal, clause) pairs
        self._bin_watches: list[list[tuple[int, list[int]]]] = []
        self._seen: list[bool] = []
        self._heap: list[tuple[float, int]] = []
        self._var_inc = 1.0
        self._trail: list[int] = []
        self._trail_lim: list[int] = []
        self._qhead = 0
        self._clauses: list[list[int]] = []
        self._learnts: list[list[int]] = []
        self._original: list[tuple[int, ...]] = []
        self._ok = True
        self._max_learnts = 2000.0
        self.stats = {"conflicts": 0, "decisions": 0, "propagations": 0, "restarts": 0}

    # -- problem construction ------------------------------------------------

    @property
    def num_variables(self) -> int:
        return self._nvars

    @property
    def num_clauses(self) -> int:
        return len(self._original)

    @property
    def clauses(self) -> list[tuple[int, ...]]:
        return list(self._original)

    def add_variable(self) -> int:
        v = self._nvars
        self._nvars += 1
        self._val.extend((0, 0))
        self._level.append(0)
        self._reason.append(None)
        self._phase.append(1)  # prefer negative literal
        self._activity.append(0.0)
        self._watches.extend(([], []))
        self._bin_watches.extend(([], []))
        self._seen.append(False)
        heapq.heappush(self._heap, (0.0, v))
        return v

    def add_variables(self, count: int) -> list[int]:
        return [self.add_variable() for _ in range(count)]

    def add_clause(self, literals: Iterable[int]) -> None:
        clause = [int(x) for x in literals]
        limit = 2 * self._nvars
        for x in clause:
            if not 0 <= x < limit:
                raise SolverError(f"literal {x} refers to an unknown variable")
        self._original.append(tuple(clause))
        if not self._ok:
            return
        if self._trail_lim:
            self._cancel_until(0)
        val = self._val
        simplified = []
        for x in dict.fromkeys(clause):
            if x ^ 1 in simplified or val[x] == 1:
                return  # tautology or already satisfied at level 0
            if val[x] == 0:
                simplified.append(x)
        if not simplified:
            self._ok = False
        elif len(simplified) == 1:
            self._assign(simplified[0], None)
            if self._propagate() is not None:
                self._ok = False
        else:
            self._attach(simplified)
            self._clauses.append(simplified)

    def _attach(self, clause: list[int]) -> None:
        a, b = clause[0], clause[1]
        if len(clause) == 2:
            self._bin_watches[a].append((b, clause))
            self._bin_watches[b].append((a, clause))
        else:
            self._watches[a].append((b, clause))
            self._watches[b].append((a, clause))

    # -- search ---------------------------------------------------------------

    def _assign(self, x: int, reason: list[int] | None) -> None:
        v = x >> 1
        self._val[x] = 1
        self._val[x ^ 1] = -1
        self._level[v] = len(self._trail_lim)
        self._reason[v] = reason
        self._trail.append(x)

    def _propagate(self) -> list[int] | None:
        val = self._val
        watches = self._watches
        bin_watches = self._bin_watches
        trail = self._trail
        level = self._level
        reason = self._reason
        dl = len(self._trail_lim)
        qhead = self._qhead
        conflict = None
        while qhead < len(trail):
            false_lit = trail[qhead] ^ 1
            qhead += 1
            for other, c in bin_watches[false_lit]:
                v = val[other]
                if v == 1:
                    continue
                if v == -1:
                    conflict = c
                    break
                val[other] = 1
                val[other ^ 1] = -1
                level[other >> 1] = dl
                reason[other >> 1] = c
                trail.append(other)
            if conflict is not None:
                break
            ws = watches[false_lit]
            i = j = 0
            n = len(ws)
            while i < n:
                w = ws[i]
                i += 1
                # the blocker is some literal of the clause; if true, skip it
                if val[w[0]] == 1:
                    ws[j] = w
                    j += 1
                    continue
                c = w[1]
                first = c[0]
                if first == false_lit:
                    first = c[1]
                    c[0] = first
                    c[1] = false_lit
                if val[first] == 1:
                    ws[j] = (first, c)
                    j += 1
                    continue
                for k in range(2, len(c)):
                    x = c[k]
                    if val[x] != -1:
                        c[1] = x
                        c[k] = false_lit
                        watches[x].append((first, c))
                        break
                else:
                    ws[j] = w
                    j += 1
                    if val[first] == -1:
                        conflict = c
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                    else:
                        v = first >> 1
                        val[first] = 1
                        val[first ^ 1] = -1
                        level[v] = dl
                        reason[v] = c
                        trail.append(first)
            del ws[j:]
            if conflict is not None:
                break
        self.stats["propagations"] += qhead - self._qhead
        self._qhead = len(trail) if conflict is not None else qhead
        return conflict

    def _cancel_until(self, target: int) -> None:
        if len(self._trail_lim) <= target:
            return
        start = self._trail_lim[target]
        val, phase, heap, act = self._val, self._phase, self._heap, self._activity
        for x in self._trail[start:]:
            v = x >> 1
            val[x] = 0
            val[x ^ 1] = 0
            self._reason[v] = None
            phase[v] = x & 1
            heapq.heappush(heap, (-act[v], v))
        del self._trail[start:]
        del self._trail_lim[target:]
        self._qhead = start
        if len(heap) > 8 * self._nvars + 1024:
            self._heap = [
                (-act[v], v) for v in range(self._nvars) if val[2 * v] == 0
            ]
            heapq.heapify(self._heap)

    def _bump(self, v: int) -> None:
        act = self._activity
        act[v] += self._var_inc
        if act[v] > 1e100:
            for u in range(self._nvars):
                act[u] *= 1e-100
            self._var_inc *= 1e-100
            self._heap = [
                (-act[u], u) for u in range(self._nvars)
                if self._val[2 * u] == 0
            ]
            heapq.heapify(self._heap)
        elif self._val[2 * v] == 0:
            heapq.heappush(self._heap, (-act[v], v))

    def _analyze(self, conflict: list[int]) -> tuple[list[int], int]:
        seen, level, reason, trail = self._seen, self._level, self._reason, self._trail
        dl = len(self._trail_lim)
        learnt = [0]
        counter = 0
        p = -1
        index = len(trail) - 1
        clause = conflict
        touched = []
        while True:
            for x in clause if p == -1 else clause[1:]:
                v = x >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = True
                    touched.append(v)
                    self._bump(v)
                    if level[v] >= dl:
                        counter += 1
                    else:
                        learnt.append(x)
            while not seen[trail[index] >> 1]:
                index -= 1
            p = trail[index]
            index -= 1
            counter -= 1
            if counter == 0:
                break
            clause = reason[p >> 1]
            # reason clauses keep the implied literal first
            if clause[0] != p:
                k = clause.index(p)
                clause[0], clause[k] = clause[k], clause[0]
        learnt[0] = p ^ 1

        # drop literals implied by the rest of the clause (local minimization)
        kept = [learnt[0]]
        for x in learnt[1:]:
            r = reason[x >> 1]
            if r is None:
                kept.append(x)
                continue
            for y in r:
                if y != x ^ 1 and not seen[y >> 1] and level[y >> 1] > 0:
                    kept.append(x)
                    break
        learnt = kept
        for v in touched:
            seen[v] = False

        if len(learnt) == 1:
            back = 0
        else:
            best = 1
            for k in range(2, len(learnt)):
                if level[learnt[k] >> 1] > level[learnt[best] >> 1]:
                    best = k
            learnt[1], learnt[best] = learnt[best], learnt[1]
            back = level[learnt[1] >> 1]
        self._var_inc *= 1.0 / 0.95
        return learnt, back

    def _pick_branch(self) -> int:
        heap, val, act = self._heap, self._val, self._activity
        while heap:
            a, v = heapq.heappop(heap)
            if val[2 * v] == 0 and -a == act[v]:
                return 2 * v + self._phase[v]
        for v in range(self._nvars):
            if val[2 * v] == 0:
                return 2 * v + self._phase[v]
        return -1

    def _reduce_db(self) -> None:
        """Drop the less useful half of the learnt clauses (at level 0)."""
        locked = {id(r) for r in self._reason if r is not None}
        self._learnts.sort(key=len)
        half = len(self._learnts) // 2
        keep = [c for k, c in enumerate(self._learnts) if k < half or len(c) <= 2 or id(c) in locked]
        self._learnts = keep
        self._rebuild_watches()

    def _rebuild_watches(self) -> None:
        val = self._val
        for ws in self._watches:
            ws.clear()
        for ws in self._bin_watches:
            ws.clear()
        live = []
        for c in self._clauses:
            if any(val[x] == 1 for x in c):
                continue
            c.sort(key=lambda x: val[x] == -1)
            live.append(c)
            self._attach(c)
        self._clauses = live
        learnts = []
        for c in self._learnts:
            if any(val[x] == 1 for x in c):
                continue
            c.sort(key=lambda x: val[x] == -1)
            learnts.append(c)
            self._attach(c)
        self._learnts = learnts

    def solve(
        self, assumptions: Sequence[int] = (), conflict_limit: int | None = None
    ) -> SolveResult:
        assumptions = [int(a) for a in assumptions]
        for a in assumptions:
            if not 0 <= a < 2 * self._nvars:
                raise SolverError(f"assumption {a} refers to an unknown variable")
        if not self._ok:
            return SolveResult(State.UNSATISFIABLE)
        self._cancel_until(0)
        if self._propagate() is not None:
            self._ok = False
            return SolveResult(State.UNSATISFIABLE)

        conflicts = 0
        restart = 0
        budget = _luby(restart) * self.restart_unit
        val = self._val
        while True:
            conflict = self._propagate()
            if conflict is not None:
                conflicts += 1
                self.stats["conflicts"] += 1
                if not self._trail_lim:
                    self._ok = False
                    return SolveResult(State.UNSATISFIABLE, conflicts=conflicts)
                learnt, back = self._analyze(conflict)
                self._cancel_until(back)
                if len(learnt) == 1:
                    self._assign(learnt[0], None)
                else:
                    self._attach(learnt)
                    self._learnts.append(learnt)
                    self._assign(learnt[0], learnt)
                continue

            if conflict_limit is not None and conflicts >= conflict_limit:
                self._cancel_until(0)
                return SolveResult(State.UNDEFINED, conflicts=conflicts)
            if conflicts >= budget:
                restart += 1
                self.stats["restarts"] += 1
                budget = conflicts + _luby(restart) * self.restart_unit
                self._cancel_until(0)
                if len(self._learnts) - len(self._trail) >= self._max_learnts:
                    self._reduce_db()
                    self._max_learnts *= 1.1
                continue

            dl = len(self._trail_lim)
            if dl < len(assumptions):
                a = assumptions[dl]
                if val[a] == 1:
                    self._trail_lim.append(len(self._trail))
                    continue
                if val[a] == -1:
                    self._cancel_until(0)
                    return SolveResult(State.UNSATISFIABLE, conflicts=conflicts)
                decision = a
            else:
                decision = self._pick_branch()
                if decision < 0:
                    model = [val[2 * v] == 1 for v in range(self._nvars)]
                    self._cancel_until(0)
                    return SolveResult(State.SATISFIABLE, model, conflicts)
                self.stats["decisions"] += 1
            self._trail_lim.append(len(self._trail))
            self._assign(decision, None)

    # -- export ---------------------------------------------------------------

    def write_dimacs(self, stream: IO[str]) -> None:
        write_dimacs(stream, self._nvars, self._original)


def write_dimacs(stream: IO[str], num_variables: int, clauses: Sequence[Sequence[int]]) -> None:
    stream.write(f"p cnf {num_variables} {len(clauses)}\n")
    for clause in clauses:
        ints = [(x >> 1) + 1 if not x & 1 else -((x >> 1) + 1) for x in clause]
        stream.write(" ".join(map(str, ints + [0])) + "\n")


def clause_satisfied(clause: Sequence[int], model: Sequence[bool]) -> bool:
    return any(model[x >> 1] != bool(x & 1) for x in clause)


_BACKENDS = {"cdcl": CdclSolver}


def register_backend(name: str, factory) -> None:
    _BACKENDS[name] = factory


def make_solver(name: str = "cdcl") -> SolverBackend:
    try:
        return _BACKENDS[name]()
    except KeyError:
        raise SolverError(
            f"unknown solver backend {name!r} (available: {', '.join(sorted(_BACKENDS))})"
        ) from None


# --------------------------------------------------------------------------
# Tseytin gadgets


class Gate(enum.Enum):
    AND = "and"
    OR = "or"
    XOR = "xor"


def tseytin(solver: SolverBackend, gate: Gate, a: int, b: int) -> Literal:
    """Fresh literal ``t`` constrained to ``t <-> gate(a, b)``."""
    a, b = int(a), int(b)
    limit = 2 * solver.num_variables
    if not (0 <= a < limit and 0 <= b < limit):
        raise SolverError("gadget operand refers to an unknown variable")
    t = 2 * solver.add_variable()
    nt, na, nb = t ^ 1, a ^ 1, b ^ 1
    if gate is Gate.AND:
        clauses = [(nt, a), (nt, b), (t, na, nb)]
    elif gate is Gate.OR:
        clauses = [(t, na), (t, nb), (nt, a, b)]
    else:
        clauses = [(nt, a, b), (nt, na, nb), (t, na, b), (t, a, nb)]
    for c in clauses:
        solver.add_clause(c)
    return lit(t)


def add_tseytin_and(solver: SolverBackend, a: int, b: int) -> Literal:
    return tseytin(solver, Gate.AND, a, b)


def add_tseytin_or(solver: SolverBackend, a: int, b: int) -> Literal:
    return tseytin(solver, Gate.OR, a, b)


def add_tseytin_xor(solver: SolverBackend, a: int, b: int) -> Literal:
    return tseytin(solver, Gate.XOR, a, b)
