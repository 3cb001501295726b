"""Event-driven readers for PLA and BENCH files with a diagnostic engine.

A reader walks its input line by line and calls the matching visitor event
whenever a primitive has been parsed. Problems are reported to an optional
:class:`DiagnosticEngine`; readers never raise on malformed input and signal
failure through :class:`ReturnCode` instead.
"""

from __future__ import annotations

import enum
import io
import os
import re
import sys
from collections import Counter
from dataclasses import dataclass
from typing import IO, Union

Source = Union[str, os.PathLike, IO[str]]


class ReturnCode(enum.Enum):
    SUCCESS = "success"
    PARSE_ERROR = "parse_error"


class DiagnosticLevel(enum.IntEnum):
    NOTE = 0
    WARNING = 1
    ERROR = 2
    FATAL = 3


_PREFIX = {
    DiagnosticLevel.NOTE: "[n] ",
    DiagnosticLevel.WARNING: "[w] ",
    DiagnosticLevel.ERROR: "[e] ",
    DiagnosticLevel.FATAL: "[f] ",
}


@dataclass(frozen=True)
class Diagnostic:
    level: DiagnosticLevel
    message: str
    line_number: int | None = None
    line_text: str | None = None
    # "line" or "in line", as the reader phrases the location
    location: str = "line"

    def __post_init__(self):
        if not self.message:
            raise ValueError("diagnostic message must not be empty")

    @property
    def text(self) -> str:
        if self.line_number is None:
            return self.message
        return f"{self.message}\n{self.location} {self.line_number}: `{self.line_text}`"


class DiagnosticEngine:
    """Collects diagnostics and prints them with a one-letter severity prefix.

    Override :meth:`emit` to change how diagnostics are presented; counting
    and recording happen in :meth:`report` regardless.
    """

    def __init__(self, stream: IO[str] | None = None):
        self.stream = stream
        self.diagnostics: list[Diagnostic] = []
        self.counts: Counter[DiagnosticLevel] = Counter()

    def report(self, diagnostic: Diagnostic) -> None:
        self.diagnostics.append(diagnostic)
        self.counts[diagnostic.level] += 1
        self.emit(diagnostic.level, diagnostic.text)

    def emit(self, level: DiagnosticLevel, message: str) -> None:
        stream = self.stream if self.stream is not None else sys.stderr
        stream.write(_PREFIX[level] + message + "\n")

    @property
    def num_errors(self) -> int:
        return self.counts[DiagnosticLevel.ERROR] + self.counts[DiagnosticLevel.FATAL]


class _Reporter:
    """Tracks whether any error was reported during one parse."""

    def __init__(self, engine: DiagnosticEngine | None):
        self.engine = engine
        self.failed = False

    def __call__(self, level, message, line_number=None, line_text=None, location="line"):
        if level >= DiagnosticLevel.ERROR:
            self.failed = True
        if self.engine is not None:
            self.engine.report(Diagnostic(level, message, line_number, line_text, location))


def _open(source: Source) -> tuple[IO[str], bool]:
    if isinstance(source, (str, os.PathLike)):
        return open(source, encoding="utf-8"), True
    return source, False


def _lines(source: Source, report: _Reporter):
    try:
        stream, owned = _open(source)
    except OSError as exc:
        report(DiagnosticLevel.FATAL, f"could not open file `{source}`: {exc.strerror}")
        return
    try:
        for number, raw in enumerate(stream, start=1):
            yield number, raw.rstrip("\r\n")
    finally:
        if owned:
            stream.close()


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].strip()


class PlaReader:
    """PLA visitor; every event is a no-op by default."""

    def on_number_of_inputs(self, number_of_inputs: int) -> None:
        pass

    def on_number_of_outputs(self, number_of_outputs: int) -> None:
        pass

    def on_number_of_terms(self, number_of_terms: int) -> None:
        pass

    def on_term(self, term: str, out: str) -> None:
        pass

    def on_end(self) -> None:
        pass


_PLA_COUNT = re.compile(r"\.(i|o|p)\s+(\d+)")
_PLA_TERM = re.compile(r"([01-]+)\s+([01-~]+)")
_PLA_SKIPPED = {"type", "ilb", "ob", "phase", "pair", "symbolic", "mv", "kiss"}


def read_pla(
    source: Source, reader: PlaReader | None = None, diagnostics: DiagnosticEngine | None = None
) -> ReturnCode:
    """Parse a PLA from a path or text stream, firing ``reader`` events.

    ``on_end`` fires on ``.e``/``.end`` or, if the file has no terminator, at
    end of input.
    """
    reader = reader if reader is not None else PlaReader()
    report = _Reporter(diagnostics)
    ended = False
    for number, raw in _lines(source, report):
        line = _strip_comment(raw)
        if not line:
            continue
        if line.startswith("."):
            m = _PLA_COUNT.fullmatch(line)
            keyword = line[1:].split()[0] if len(line) > 1 else ""
            if m:
                value = int(m[2])
                if m[1] == "i":
                    reader.on_number_of_inputs(value)
                elif m[1] == "o":
                    reader.on_number_of_outputs(value)
                else:
                    reader.on_number_of_terms(value)
            elif keyword in ("e", "end") and line == "." + keyword:
                reader.on_end()
                ended = True
            elif keyword in ("i", "o", "p"):
                report(DiagnosticLevel.ERROR, "Unable to parse line", number, raw)
            elif keyword in _PLA_SKIPPED:
                report(DiagnosticLevel.WARNING, f"Ignoring keyword `{keyword}`", number, raw,
                       "in line")
            else:
                report(DiagnosticLevel.ERROR, f"Unsupported keyword `{keyword}`", number, raw,
                       "in line")
            continue
        m = _PLA_TERM.fullmatch(line)
        if m is None:
            report(DiagnosticLevel.ERROR, "Unable to parse line", number, raw)
            continue
        reader.on_term(m[1], m[2])
    if not ended and not report.failed:
        reader.on_end()
    return ReturnCode.PARSE_ERROR if report.failed else ReturnCode.SUCCESS


class BenchReader:
    """BENCH visitor; every event is a no-op by default.

    ``on_gate`` receives the gate type as written: ``"0x<hex>"`` for LUTs and
    the upper-case keyword (``"AND"``, ``"NOT"``...) for classic gates.
    """

    def on_input(self, name: str) -> None:
        pass

    def on_output(self, name: str) -> None:
        pass

    def on_gate(self, inputs: list[str], output: str, type: str) -> None:
        pass


_NAME = r"[^\s(),=#]+"
_BENCH_IO = re.compile(rf"(INPUT|OUTPUT)\s*\(\s*({_NAME})\s*\)", re.IGNORECASE)
_BENCH_LUT = re.compile(rf"({_NAME})\s*=\s*LUT\s+(\S+)\s*\((.*)\)")
_BENCH_GATE = re.compile(rf"({_NAME})\s*=\s*([A-Za-z][A-Za-z0-9_]*)\s*\((.*)\)")
_HEX_TYPE = re.compile(r"0x[0-9a-fA-F]+")
_BENCH_GATES = {"AND", "NAND", "OR", "NOR", "XOR", "XNOR", "NOT", "BUF", "BUFF", "DFF"}


def _fanins(text: str) -> list[str] | None:
    text = text.strip()
    if not text:
        return []
    names = [name.strip() for name in text.split(",")]
    if not all(re.fullmatch(_NAME, name) for name in names):
        return None
    return names


def read_bench(
    source: Source, reader: BenchReader | None = None, diagnostics: DiagnosticEngine | None = None
) -> ReturnCode:
    """Parse a BENCH netlist with ``INPUT``, ``OUTPUT``, LUT and classic gate lines."""
    reader = reader if reader is not None else BenchReader()
    report = _Reporter(diagnostics)
    for number, raw in _lines(source, report):
        line = _strip_comment(raw)
        if not line:
            continue
        m = _BENCH_IO.fullmatch(line)
        if m:
            if m[1].upper() == "INPUT":
                reader.on_input(m[2])
            else:
                reader.on_output(m[2])
            continue
        m = _BENCH_LUT.fullmatch(line)
        if m:
            fanins = _fanins(m[3])
            if not _HEX_TYPE.fullmatch(m[2]):
                report(DiagnosticLevel.ERROR, f"Invalid LUT truth table `{m[2]}`", number, raw,
                       "in line")
            elif fanins is None:
                report(DiagnosticLevel.ERROR, "Unable to parse line", number, raw)
            else:
                reader.on_gate(fanins, m[1], m[2])
            continue
        m = _BENCH_GATE.fullmatch(line)
        if m and m[2].upper() in _BENCH_GATES:
            fanins = _fanins(m[3])
            if fanins is None:
                report(DiagnosticLevel.ERROR, "Unable to parse line", number, raw)
            else:
                reader.on_gate(fanins, m[1], m[2].upper())
            continue
        if m:
            report(DiagnosticLevel.ERROR, f"Unsupported gate type `{m[2]}`", number, raw,
                   "in line")
            continue
        report(DiagnosticLevel.ERROR, "Unable to parse line", number, raw)
    return ReturnCode.PARSE_ERROR if report.failed else ReturnCode.SUCCESS


def read_pla_string(text: str, reader: PlaReader | None = None,
                    diagnostics: DiagnosticEngine | None = None) -> ReturnCode:
    return read_pla(io.StringIO(text), reader, diagnostics)


def read_bench_string(text: str, reader: BenchReader | None = None,
                      diagnostics: DiagnosticEngine | None = None) -> ReturnCode:
    return read_bench(io.StringIO(text), reader, diagnostics)
