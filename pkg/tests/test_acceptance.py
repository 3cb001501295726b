"""End-to-end acceptance checks, each under its wall-clock budget."""

import io
import json
import random
import time
from pathlib import Path

import pytest

from exactmine.exact import SynthMethod, SynthResult, SynthSpec, chain_exists, synthesize, verify
from exactmine.mine import OptimumNetwork, create_shell
from exactmine.parsers import DiagnosticEngine, ReturnCode, read_pla_string
from exactmine.sat import CdclSolver, Literal, State, add_tseytin_and, add_tseytin_or, add_tseytin_xor
from exactmine.truthtable import (
    NpnTransform,
    Op,
    TruthTable,
    apply,
    apply_npn_transform,
    create_from_hex_string,
    create_nth_var,
    exact_npn_canonization,
    pprm_cubes,
    print_cubes,
    simulate_chain_text,
    ternary_majority,
    to_hex,
    xor_all,
)

from oracles import eval_expression, min_chain_sizes, npn_representative

ADDER = Path(__file__).parent / "data" / "adder.bench"


class Budget:
    def __init__(self, seconds):
        self.seconds = seconds

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.seconds, f"took {self.elapsed:.1f} s, budget {self.seconds} s"


@pytest.mark.criterion(1)
def test_full_adder_tables():
    with Budget(1):
        a, b, c = (create_nth_var(3, i) for i in range(3))
        total = apply(Op.XOR, apply(Op.XOR, a, b), c)
        carry = ternary_majority(a, b, c)
        assert to_hex(total) == "96"
        assert to_hex(carry) == "e8"


INVERSION_CHAIN = [
    "x5 = x3 ^ x4", "x6 = x1 & x3", "x7 = x2 ^ x6",
    "x8 = x1 ^ x2", "x9 = x4 ^ x6", "x10 = x8 & x9",
    "x11 = x5 & x7", "x12 = x1 & x4", "x13 = x8 & x12",
    "x14 = x8 ^ x13", "x15 = x2 & x3", "x16 = x5 & x15",
    "x17 = x5 ^ x16", "x18 = x6 ^ x17", "x19 = x4 ^ x11",
    "x20 = x6 ^ x14", "x21 = x2 ^ x10",
]


@pytest.mark.criterion(2)
def test_inversion_chain_and_cubes():
    with Budget(1):
        steps = simulate_chain_text(4, INVERSION_CHAIN)
        x18 = steps[18 - 5]
        assert to_hex(x18) == "af90"
        text = print_cubes(pprm_cubes(x18), 4)
        assert text.splitlines() == ["1-1-", "-11-", "-111", "--1-", "---1"]


@pytest.mark.criterion(3)
def test_de_morgan_unsat():
    with Budget(1):
        solver = CdclSolver()
        a = Literal(solver.add_variable())
        b = Literal(solver.add_variable())
        t0 = add_tseytin_and(solver, a, b)
        t1 = ~add_tseytin_or(solver, ~a, ~b)
        t2 = add_tseytin_xor(solver, t0, t1)
        solver.add_clause([t2])
        assert solver.solve().state is State.UNSATISFIABLE


@pytest.mark.criterion(4)
def test_synthesis_matches_oracle():
    with Budget(300):
        oracle2 = min_chain_sizes(2, 2)
        oracle3 = min_chain_sizes(3, 4)
        reps = sorted({npn_representative(v, 3) for v in range(256)})
        assert len(reps) == 14
        cases = [(2, v, oracle2[v]) for v in range(16)] + [(3, v, oracle3[v]) for v in reps]
        for n, v, expected in cases:
            for method in SynthMethod:
                result, chain = synthesize(SynthSpec(n, [TruthTable(n, v)]), method)
                assert result is SynthResult.SUCCESS
                assert chain.size == expected, (n, hex(v), method)
        assert oracle3[0xE8] == 4 and oracle3[0x96] == 2
        for v, steps in ((0xE8, 4), (0x96, 2)):
            _, chain = synthesize(SynthSpec(3, [TruthTable(3, v)]))
            assert chain.size == steps


@pytest.mark.criterion(5)
def test_session_replay():
    with Budget(120):
        out, err = io.StringIO(), io.StringIO()
        shell = create_shell(out, err)
        shell.run_script(io.StringIO(
            "load cafe\nload affe\nset npn 1\n"
            f"load_bench -t 3 {ADDER}\n"
            "current -o 1\nfind_network --verify\nstore -o\nprint -o\n"
        ))
        assert err.getvalue() == ""
        lines = out.getvalue().splitlines()
        start = lines.index("[i] networks in store:")
        listing = lines[start + 1:start + 11]
        assert [line.split(": ", 1)[1] for line in listing] == [
            "cafe", "affe, optimum network computed",
            "6", "1e", "01", "69", "07", "1", "06", "17",
        ]
        assert [line[:5] == "  *  " for line in listing] == [i == 1 for i in range(10)]
        assert "[i] synthesized chain matches specification" in lines
        assert "function (bin): 1010111111111110" in lines
        entry = shell.env.store(OptimumNetwork)[1]
        assert entry.chain.size == 4
        assert eval_expression(entry.network, 4) == 0xAFFE
        spec = SynthSpec(4, [create_from_hex_string(4, "affe")])
        assert chain_exists(spec, 3) is State.UNSATISFIABLE


@pytest.mark.criterion(6)
def test_npn_properties():
    with Budget(30):
        rng = random.Random(2024)
        for _ in range(1000):
            f = TruthTable(4, rng.getrandbits(16))
            perm = list(range(4))
            rng.shuffle(perm)
            t = NpnTransform(tuple(perm), rng.getrandbits(4), bool(rng.getrandbits(1)))
            rep, found = exact_npn_canonization(f)
            assert exact_npn_canonization(apply_npn_transform(f, t))[0] == rep
            assert exact_npn_canonization(rep)[0] == rep
            assert apply_npn_transform(f, found) == rep


@pytest.mark.criterion(7)
def test_pprm_round_trip():
    with Budget(30):
        rng = random.Random(7)
        for n in range(2, 9):
            for _ in range(500):
                f = TruthTable(n, rng.getrandbits(1 << n))
                cubes = pprm_cubes(f)
                assert xor_all((c.to_truth_table(n) for c in cubes), n) == f


@pytest.mark.criterion(8)
def test_cegar_agrees_with_std():
    with Budget(300):
        rng = random.Random(2019)
        for _ in range(50):
            f = TruthTable(4, rng.getrandbits(16))
            sizes = []
            for method in SynthMethod:
                spec = SynthSpec(4, [f], symmetry_breaking=True)
                result, chain = synthesize(spec, method)
                assert result is SynthResult.SUCCESS
                assert verify(chain, spec)
                sizes.append(chain.size)
            assert sizes[0] == sizes[1], to_hex(f)


@pytest.mark.criterion(9)
def test_pla_diagnostics():
    with Budget(1):
        diag = DiagnosticEngine(io.StringIO())
        assert read_pla_string("i 16\n", diagnostics=diag) is ReturnCode.PARSE_ERROR
        text = diag.stream.getvalue()
        assert "Unable to parse line" in text and "line 1: `i 16`" in text

        diag = DiagnosticEngine(io.StringIO())
        source = ".i 2\n.o 1\n11 1\n.abc\n"
        assert read_pla_string(source, diagnostics=diag) is ReturnCode.PARSE_ERROR
        assert "Unsupported keyword `abc`" in diag.stream.getvalue()


@pytest.mark.criterion(10)
def test_json_log(tmp_path):
    with Budget(1):
        script = tmp_path / "session.txt"
        script.write_text(
            "load cafe\nload affe\nset npn 1\nload e8\ncurrent -o 2\nprint -o\nstore -o\n"
        )
        log = tmp_path / "log.json"
        shell = create_shell(io.StringIO(), io.StringIO())
        assert shell.main(["-c", str(script), "-l", str(log)]) == 0
        entries = json.loads(log.read_text())
        assert isinstance(entries, list) and len(entries) == 7
        assert all(isinstance(e, dict) and {"command", "time"} <= e.keys() for e in entries)
