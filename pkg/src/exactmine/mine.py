"""The exactmine shell: collect functions and compute their optimum networks.

Functions enter the ``opt`` store either directly (``load``) or from the
LUTs of a BENCH netlist (``load_bench``). ``find_network`` runs exact
synthesis on the current entry and stores the chain as an expression.
With the variable ``npn`` set, functions are replaced by their NPN class
representative before insertion, so each class is stored at most once.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import IO

from .chain import Chain
from .exact import SynthError, SynthResult, SynthSpec, synthesize, verify
from .parsers import BenchReader, DiagnosticEngine, ReturnCode, read_bench
from .shell import Command, Environment, Shell, has_store_element
from .truthtable import (
    TruthTable,
    TruthTableError,
    create_from_hex_string,
    exact_npn_canonization,
    to_binary,
    to_hex,
)

NAME = "exactmine"


@dataclass
class OptimumNetwork:
    function: TruthTable
    network: str = ""
    chain: Chain | None = field(default=None, compare=False)

    @property
    def computed(self) -> bool:
        return bool(self.network)

    @property
    def num_steps(self) -> int | None:
        if not self.network:
            return None
        if self.chain is not None:
            return self.chain.size
        return sum(self.network.count(c) for c in "({[")


class SeenFunctions:
    """Functions already admitted to the store, one set per variable count."""

    def __init__(self):
        self._tables: dict[int, set[TruthTable]] = {}

    def __contains__(self, tt: TruthTable) -> bool:
        return tt in self._tables.get(tt.num_vars, ())

    def add(self, tt: TruthTable) -> bool:
        """Record ``tt``; False if it was already present."""
        bucket = self._tables.setdefault(tt.num_vars, set())
        if tt in bucket:
            return False
        bucket.add(tt)
        return True

    def __len__(self) -> int:
        return sum(len(b) for b in self._tables.values())


def seen_functions(env: Environment) -> SeenFunctions:
    return env.data.setdefault("seen_functions", SeenFunctions())


def add_optimum_network_entry(env: Environment, function: TruthTable) -> bool:
    """Insert ``function`` (or its NPN representative) unless already seen."""
    if env.variable("npn"):
        function, _ = exact_npn_canonization(function)
    if not seen_functions(env).add(function):
        return False
    env.store(OptimumNetwork).extend(OptimumNetwork(function))
    return True


def describe(entry: OptimumNetwork) -> str:
    text = to_hex(entry.function)
    return f"{text}, optimum network computed" if entry.computed else text


def print_entry(out: IO[str], entry: OptimumNetwork) -> None:
    print(f"function (hex): {to_hex(entry.function)}", file=out)
    print(f"function (bin): {to_binary(entry.function)}", file=out)
    if entry.computed:
        print(f"optimum network: {entry.network}", file=out)
    else:
        print("no optimum network computed", file=out)


def print_statistics(out: IO[str], entry: OptimumNetwork) -> None:
    steps = entry.num_steps
    suffix = "no network computed" if steps is None else f"{steps} steps"
    print(f"[i] {entry.function.num_vars} variables, {suffix}", file=out)


def log_statistics(entry: OptimumNetwork) -> dict:
    return {
        "function": to_hex(entry.function),
        "num_vars": entry.function.num_vars,
        "network": entry.network,
        "steps": entry.num_steps,
    }


def parse_table(text: str) -> TruthTable:
    """Hex truth table whose bit count (4 per digit) is a power of two."""
    digits = text[2:] if text[:2].lower() == "0x" else text
    bits = 4 * len(digits)
    if bits == 0 or bits & (bits - 1):
        raise TruthTableError(f"`{text}` has {bits} bits, which is not a power of two")
    num_vars = bits.bit_length() - 1
    return create_from_hex_string(num_vars, digits)


class LoadCommand(Command):
    name = "load"
    category = "Loading"
    description = "Load a truth table into the store"

    def configure(self, parser):
        parser.add_argument("table", nargs="?", help="truth table in hexadecimal")
        parser.add_argument("--tt", help="truth table in hexadecimal")

    def validity_rules(self):
        return [
            (lambda: (self.args.table is None) != (self.args.tt is None),
             "expected one truth table (positional or --tt)"),
        ]

    def execute(self):
        text = self.args.table if self.args.table is not None else self.args.tt
        try:
            function = parse_table(text)
        except TruthTableError as exc:
            print(f"[e] {exc}", file=self.err)
            return
        add_optimum_network_entry(self.env, function)

    def log(self):
        return {"table": self.args.table if self.args.table is not None else self.args.tt}


class _LutCollector(BenchReader):
    def __init__(self, threshold: int):
        self.threshold = threshold
        self.functions: list[TruthTable] = []
        self.skipped = 0
        self.problems: list[str] = []

    def on_gate(self, inputs, output, type):
        if not type.startswith("0x") or len(inputs) > self.threshold:
            self.skipped += 1
            return
        k = len(inputs)
        value = int(type[2:], 16)
        if value >> (1 << k):
            self.problems.append(f"LUT `{output}`: {type} does not fit {k} inputs")
            return
        self.functions.append(TruthTable(k, value))


class LoadBenchCommand(Command):
    name = "load_bench"
    category = "Loading"
    description = "Load LUT functions from a BENCH file"
    added = 0

    def configure(self, parser):
        parser.add_argument("filename", help="BENCH file")
        parser.add_argument("-t", "--threshold", type=int, default=6,
                            help="maximum number of LUT inputs (default: 6)")

    def validity_rules(self):
        return [(lambda: self.args.threshold >= 0, "threshold must be non-negative")]

    def execute(self):
        collector = _LutCollector(self.args.threshold)
        diagnostics = _EnvDiagnostics(self.env)
        if read_bench(self.args.filename, collector, diagnostics) is not ReturnCode.SUCCESS:
            print(f"[e] could not read `{self.args.filename}`", file=self.err)
            return
        for problem in collector.problems:
            print(f"[w] {problem}", file=self.err)
        self.added = sum(add_optimum_network_entry(self.env, f) for f in collector.functions)

    def log(self):
        return {"filename": self.args.filename, "added": self.added}


class _EnvDiagnostics(DiagnosticEngine):
    """Diagnostics printed on the shell's error stream."""

    def __init__(self, env: Environment):
        super().__init__()
        self.env = env

    def emit(self, level, message):
        self.stream = self.env.err
        super().emit(level, message)


class FindNetworkCommand(Command):
    name = "find_network"
    category = "Exact synthesis"
    description = "Compute an optimum network for the current function"

    def configure(self, parser):
        parser.add_argument("--verify", action="store_true",
                            help="check the network against the function")
        parser.add_argument("-f", "--force", action="store_true",
                            help="recompute an existing network")
        parser.add_argument("-v", "--verbose", action="store_true", help="print progress")

    def validity_rules(self):
        store = self.store(OptimumNetwork)
        return [
            has_store_element(self.env, OptimumNetwork),
            (lambda: self.is_set("force") or not store.current.computed,
             "network already computed (use -f to override)"),
        ]

    def execute(self):
        store = self.store(OptimumNetwork)
        entry = store.current
        f = entry.function
        spec = SynthSpec(
            nr_in=f.num_vars,
            functions=[f],
            verbosity=1 if self.is_set("verbose") else 0,
            symmetry_breaking=True,
        )
        try:
            result, chain = synthesize(spec, stream=self.out)
        except SynthError as exc:
            print(f"[e] {exc}", file=self.err)
            return
        if result is not SynthResult.SUCCESS:
            print("[e] could not find optimum network", file=self.err)
            return
        store.current = OptimumNetwork(f, chain.to_expression(0), chain)
        if self.is_set("verify"):
            if verify(chain, spec):
                print("[i] synthesized chain matches specification", file=self.out)
            else:
                print("[e] synthesized chain does not match specification", file=self.err)

    def log(self):
        entry = self.store(OptimumNetwork).current
        return {"function": to_hex(entry.function), "network": entry.network}


def create_shell(out: IO[str] | None = None, err: IO[str] | None = None) -> Shell:
    shell = Shell(NAME, out, err)
    shell.register_store(
        OptimumNetwork, "opt", "o", "network", "networks",
        describe=describe, print=print_entry,
        print_statistics=print_statistics, log_statistics=log_statistics,
    )
    for cls in (LoadCommand, LoadBenchCommand, FindNetworkCommand):
        shell.add_command(cls)
    return shell


def run(commands: str) -> tuple[Shell, str, str]:
    """Run ``;``/newline-separated commands in a fresh shell; return (shell, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    shell = create_shell(out, err)
    shell.run_commands(commands)
    return shell, out.getvalue(), err.getvalue()


def main(argv: list[str] | None = None) -> int:
    return create_shell().main(argv)
