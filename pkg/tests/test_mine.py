import io
import json
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exactmine.mine import OptimumNetwork, create_shell, main, parse_table, run
from exactmine.shell import Status
from exactmine.truthtable import TruthTable, TruthTableError, exact_npn_canonization, to_hex

from oracles import eval_expression

ADDER = Path(__file__).parent / "data" / "adder.bench"


def listing(shell):
    return [to_hex(e.function) for e in shell.env.store(OptimumNetwork)]


class TestLoad:
    def test_parse_table(self):
        assert parse_table("cafe") == TruthTable(4, 0xCAFE)
        assert parse_table("0xe8") == TruthTable(3, 0xE8)
        assert parse_table("8").num_vars == 2
        for bad in ("caf", "", "xyz"):
            with pytest.raises(TruthTableError):
                parse_table(bad)

    def test_duplicates_skipped(self):
        shell, _, _ = run("load e8; load 0xe8; load --tt e8")
        assert listing(shell) == ["e8"]

    def test_npn_representative_stored(self):
        shell, _, _ = run("set npn 1; load e8; load 17")
        assert listing(shell) == ["17"]

    def test_without_npn_both_kept(self):
        shell, _, _ = run("load e8; load 17")
        assert listing(shell) == ["e8", "17"]

    def test_bad_table(self):
        shell, _, err = run("load cafe; load xyz")
        assert listing(shell) == ["cafe"]
        assert err.startswith("[e]")

    def test_table_required_once(self):
        shell = create_shell()
        assert shell.execute_line("load") is Status.INVALID
        assert shell.execute_line("load e8 --tt e8") is Status.INVALID


class TestLoadBench:
    def test_threshold_skips_wide_luts(self):
        shell, _, _ = run(f"load_bench -t 3 {ADDER}")
        assert "e8e8" not in listing(shell)
        shell, _, _ = run(f"load_bench {ADDER}")
        assert "e8e8" in listing(shell)

    def test_single_lut_with_npn(self, tmp_path):
        path = tmp_path / "one.bench"
        path.write_text("INPUT(a)\nINPUT(b)\nINPUT(c)\nOUTPUT(y)\ny = LUT 0xe8 (a, b, c)\n")
        shell, _, _ = run(f"set npn 1; load_bench {path}")
        assert listing(shell) == ["17"]

    def test_dedup_spans_commands(self, tmp_path):
        path = tmp_path / "one.bench"
        path.write_text("y = LUT 0xe8 (a, b, c)\n")
        shell, _, _ = run(f"load e8; load_bench {path}")
        assert listing(shell) == ["e8"]

    def test_parse_error_aborts(self, tmp_path):
        path = tmp_path / "bad.bench"
        path.write_text("y = LUT 0x8 (a, b)\ny := a\n")
        shell, _, err = run(f"load_bench {path}")
        assert listing(shell) == []
        assert "Unable to parse line" in err and "could not read" in err

    def test_oversized_lut_value(self, tmp_path):
        path = tmp_path / "wide.bench"
        path.write_text("y = LUT 0x1f (a, b)\n")
        shell, _, err = run(f"load_bench {path}")
        assert listing(shell) == [] and "does not fit" in err


SESSION = f"load cafe; load affe; set npn 1; load_bench -t 3 {ADDER}; store -o; " \
          "current -o 1; find_network --verify; store -o; print -o; ps -o"


class TestFindNetwork:
    def test_session(self):
        shell, out, err = run(SESSION)
        assert err == ""
        lines = out.splitlines()
        first = lines[:11]
        assert first[0] == "[i] networks in store:"
        assert [line[5:].split(": ")[1] for line in first[1:]] == [
            "cafe", "affe", "6", "1e", "01", "69", "07", "1", "06", "17",
        ]
        assert first[10].startswith("  *  9: ")
        assert "[i] synthesized chain matches specification" in lines
        assert "  *  1: affe, optimum network computed" in lines
        assert "function (bin): 1010111111111110" in lines
        entry = shell.env.store(OptimumNetwork)[1]
        assert entry.num_steps == 4
        assert eval_expression(entry.network, 4) == 0xAFFE
        assert lines[-1] == "[i] 4 variables, 4 steps"

    def test_rules(self):
        err = io.StringIO()
        shell = create_shell(io.StringIO(), err)
        assert shell.execute_line("find_network") is Status.INVALID
        shell.execute_line("load 8")
        assert shell.execute_line("find_network") is Status.SUCCESS
        assert shell.execute_line("find_network") is Status.INVALID
        assert "use -f to override" in err.getvalue()
        assert shell.execute_line("find_network -f") is Status.SUCCESS

    def test_print_without_network(self):
        _, out, _ = run("load 6; print; ps")
        assert out.splitlines() == [
            "function (hex): 6",
            "function (bin): 0110",
            "no optimum network computed",
            "[i] 2 variables, no network computed",
        ]

    def test_verbose(self):
        _, out, _ = run("load e8; find_network -v")
        assert "[i] r = 4: found chain" in out

    def test_trivial_function(self):
        shell, _, _ = run("load a; find_network")
        entry = shell.env.store(OptimumNetwork).current
        assert entry.num_steps == 0 and entry.computed

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 255), st.booleans())
    def test_stored_networks_evaluate_to_function(self, v, npn):
        shell, _, _ = run(("set npn 1; " if npn else "") + f"load {v:02x}; find_network")
        entry = shell.env.store(OptimumNetwork).current
        assert eval_expression(entry.network, 3) == entry.function.bits
        if npn:
            assert exact_npn_canonization(entry.function)[0] == entry.function


def test_cli_log(tmp_path):
    log = tmp_path / "log.json"
    assert main(["-e", "load cafe; find_network; store", "-l", str(log)]) == 0
    entries = json.loads(log.read_text())
    assert [e["command"] for e in entries] == ["load cafe", "find_network", "store"]
    assert entries[1]["function"] == "cafe" and entries[1]["network"]
