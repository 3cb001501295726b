"""A small store-based command shell.

Applications register *stores* (typed, ordered collections with a current
element) and *commands*. Every shell ships generic commands that operate on
stores (``store``, ``current``, ``print``, ``ps``, ``convert``) plus ``alias``,
``set``, ``help``, ``show`` and ``quit``. Commands parse their arguments with
:mod:`argparse`, are guarded by validity rules, and may contribute key/value
data to a JSON log.
"""

from __future__ import annotations

import argparse
import datetime
import enum
import json
import re
import shlex
import sys
from dataclasses import dataclass, field
from typing import IO, Any, Callable, ClassVar, Generic, Iterator, TypeVar

T = TypeVar("T")

GENERAL = "General"
NO_CURRENT = "no current store element"


class ShellError(Exception):
    pass


class OptionError(ShellError):
    pass


class Store(Generic[T]):
    """Ordered elements with an optional current index."""

    def __init__(self):
        self.elements: list[T] = []
        self.current_index: int | None = None

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[T]:
        return iter(self.elements)

    def __getitem__(self, index: int) -> T:
        return self.elements[index]

    @property
    def empty(self) -> bool:
        return not self.elements

    def extend(self, element: T) -> T:
        """Append ``element`` and make it current."""
        self.elements.append(element)
        self.current_index = len(self.elements) - 1
        return element

    @property
    def current(self) -> T:
        if self.current_index is None:
            raise ShellError(NO_CURRENT)
        return self.elements[self.current_index]

    @current.setter
    def current(self, element: T) -> None:
        if self.current_index is None:
            raise ShellError(NO_CURRENT)
        self.elements[self.current_index] = element

    def set_current(self, index: int) -> None:
        if not 0 <= index < len(self.elements):
            raise ShellError(f"index {index} out of range")
        self.current_index = index


@dataclass
class StoreInfo:
    type: type
    long_flag: str
    short_flag: str
    name: str
    plural: str
    describe: Callable[[Any], str]
    print: Callable[[IO[str], Any], None] | None = None
    print_statistics: Callable[[IO[str], Any], None] | None = None
    log_statistics: Callable[[Any], dict] | None = None


@dataclass
class Conversion:
    source: StoreInfo
    target: StoreInfo
    convert: Callable[[Any], Any]

    @property
    def flag(self) -> str:
        return f"{self.source.long_flag}_to_{self.target.long_flag}"


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise OptionError(message)

    def exit(self, status=0, message=None):
        if message:
            raise OptionError(message.strip())
        raise OptionError("")


class Environment:
    def __init__(self, out: IO[str] | None = None, err: IO[str] | None = None):
        self.store_infos: list[StoreInfo] = []
        self.stores: dict[type, Store] = {}
        self.conversions: list[Conversion] = []
        self.variables: dict[str, str] = {}
        self.aliases: list[tuple[str, str]] = []
        # application state shared by commands of one session
        self.data: dict[str, Any] = {}
        self._out = out
        self._err = err

    @property
    def out(self) -> IO[str]:
        return self._out if self._out is not None else sys.stdout

    @property
    def err(self) -> IO[str]:
        return self._err if self._err is not None else sys.stderr

    def store(self, store_type: type) -> Store:
        try:
            return self.stores[store_type]
        except KeyError:
            raise ShellError(f"no store registered for {store_type.__name__}") from None

    def info(self, store_type: type) -> StoreInfo:
        for info in self.store_infos:
            if info.type is store_type:
                return info
        raise ShellError(f"no store registered for {store_type.__name__}")

    def variable(self, name: str) -> str:
        return self.variables.get(name, "")


Rule = tuple[Callable[[], bool], str]


class Command:
    """Base class for shell commands.

    Subclasses set ``name``/``category``/``description``, declare arguments
    in :meth:`configure`, and implement :meth:`execute`. A new instance is
    created for every invocation.
    """

    name: ClassVar[str] = ""
    category: ClassVar[str] = GENERAL
    description: ClassVar[str] = ""

    def __init__(self, env: Environment):
        self.env = env
        self.parser = _ArgumentParser(prog=self.name, description=self.description, add_help=False)
        self.args = argparse.Namespace()
        self.configure(self.parser)

    def configure(self, parser: argparse.ArgumentParser) -> None:
        pass

    def parse(self, argv: list[str]) -> None:
        self.args = self.parser.parse_args(argv)

    def is_set(self, name: str) -> bool:
        return bool(getattr(self.args, name, False))

    def store(self, store_type: type) -> Store:
        return self.env.store(store_type)

    def validity_rules(self) -> list[Rule]:
        return []

    def execute(self) -> None:
        raise NotImplementedError

    def log(self) -> dict | None:
        return None

    @property
    def out(self) -> IO[str]:
        return self.env.out

    @property
    def err(self) -> IO[str]:
        return self.env.err


def has_store_element(env: Environment, store_type: type) -> Rule:
    return (lambda: not env.store(store_type).empty, NO_CURRENT)


# ---------------------------------------------------------------------------
# generic commands


class _StoreCommand(Command):
    """Generic command addressing stores through their flags."""

    def configure(self, parser):
        group = parser.add_mutually_exclusive_group()
        for info in self.env.store_infos:
            group.add_argument(
                f"--{info.long_flag}", f"-{info.short_flag}", dest=f"store_{info.long_flag}",
                action="store_true", help=f"use {info.plural} store",
            )

    def selected(self) -> StoreInfo | None:
        infos = self.env.store_infos
        for info in infos:
            if getattr(self.args, f"store_{info.long_flag}", False):
                return info
        return infos[0] if len(infos) == 1 else None

    def _rule_store_selected(self) -> Rule:
        msg = "no store selected" if self.env.store_infos else "no stores registered"
        return (lambda: self.selected() is not None, msg)

    def _rule_has_current(self) -> Rule:
        def ok():
            info = self.selected()
            return info is None or self.env.store(info.type).current_index is not None
        return (ok, NO_CURRENT)


class StoreListCommand(_StoreCommand):
    name = "store"
    description = "Show elements in stores"

    def validity_rules(self):
        return [self._rule_store_selected()]

    def execute(self):
        info = self.selected()
        store = self.env.store(info.type)
        if store.empty:
            print(f"[i] no {info.plural} in store", file=self.out)
            return
        print(f"[i] {info.plural} in store:", file=self.out)
        width = len(str(len(store) - 1))
        for index, element in enumerate(store):
            marker = "  *  " if index == store.current_index else "     "
            print(f"{marker}{index:>{width}}: {info.describe(element)}", file=self.out)


class CurrentCommand(_StoreCommand):
    name = "current"
    description = "Switch current store element"

    def configure(self, parser):
        super().configure(parser)
        parser.add_argument("index", nargs="?", type=int, help="new current index")

    def validity_rules(self):
        def in_range():
            index = self.args.index
            return index is None or 0 <= index < len(self.env.store(self.selected().type))
        return [
            self._rule_store_selected(),
            self._rule_has_current(),
            (in_range, "index out of range"),
        ]

    def execute(self):
        store = self.env.store(self.selected().type)
        if self.args.index is None:
            print(f"[i] current index: {store.current_index}", file=self.out)
        else:
            store.set_current(self.args.index)


class PrintCommand(_StoreCommand):
    name = "print"
    description = "Print current store element"

    def validity_rules(self):
        return [self._rule_store_selected(), self._rule_has_current()]

    def execute(self):
        info = self.selected()
        element = self.env.store(info.type).current
        if info.print is None:
            print(info.describe(element), file=self.out)
        else:
            info.print(self.out, element)


class PsCommand(_StoreCommand):
    name = "ps"
    description = "Print statistics"

    def validity_rules(self):
        return [self._rule_store_selected(), self._rule_has_current()]

    def execute(self):
        info = self.selected()
        element = self.env.store(info.type).current
        if info.print_statistics is None:
            print(f"[w] no statistics available for {info.plural}", file=self.out)
        else:
            info.print_statistics(self.out, element)

    def log(self):
        info = self.selected()
        if info.log_statistics is None:
            return None
        return info.log_statistics(self.env.store(info.type).current)


class ConvertCommand(Command):
    name = "convert"
    description = "Convert store element into another type"

    def configure(self, parser):
        group = parser.add_mutually_exclusive_group()
        for conv in self.env.conversions:
            group.add_argument(f"--{conv.flag}", dest=conv.flag, action="store_true")

    def execute(self):
        if not self.env.conversions:
            print("[w] no conversion available", file=self.out)
            return
        for conv in self.env.conversions:
            if getattr(self.args, conv.flag):
                source = self.env.store(conv.source.type)
                if source.empty:
                    print(f"[e] {NO_CURRENT}", file=self.err)
                    return
                self.env.store(conv.target.type).extend(conv.convert(source.current))
                return
        print("[w] no conversion selected", file=self.out)


class SetCommand(Command):
    name = "set"
    description = "Set (or list) environment variables"

    def configure(self, parser):
        parser.add_argument("variable", nargs="?")
        parser.add_argument("value", nargs="?", default="")

    def execute(self):
        if self.args.variable is None:
            for key, value in self.env.variables.items():
                print(f"{key} = {value}", file=self.out)
        else:
            self.env.variables[self.args.variable] = self.args.value


class AliasCommand(Command):
    name = "alias"
    description = "Create (or list) command aliases"

    def configure(self, parser):
        parser.add_argument("pattern", nargs="?")
        parser.add_argument("expansion", nargs="?")

    def validity_rules(self):
        def compiles():
            try:
                re.compile(self.args.pattern or "")
            except re.error:
                return False
            return True
        return [
            (lambda: (self.args.pattern is None) == (self.args.expansion is None),
             "alias needs a pattern and an expansion"),
            (compiles, "alias pattern is not a valid regular expression"),
        ]

    def execute(self):
        if self.args.pattern is None:
            for pattern, expansion in self.env.aliases:
                print(f'"{pattern}" -> "{expansion}"', file=self.out)
            return
        self.env.aliases = [(p, e) for p, e in self.env.aliases if p != self.args.pattern]
        self.env.aliases.append((self.args.pattern, self.args.expansion))


class HelpCommand(Command):
    name = "help"
    description = "Show help"

    def configure(self, parser):
        parser.add_argument("command", nargs="?")

    def execute(self):
        shell: Shell = self.env.shell  # type: ignore[attr-defined]
        if self.args.command is not None:
            cls = shell.commands.get(self.args.command)
            if cls is None:
                print(f"[e] unknown command `{self.args.command}`", file=self.err)
                return
            self.out.write(cls(self.env).parser.format_help())
            return
        for k, category in enumerate(shell.categories()):
            if k:
                print(file=self.out)
            print(f"{category} commands:", file=self.out)
            names = sorted(n for n, c in shell.commands.items() if c.category == category)
            for row in range(0, len(names), 4):
                print(" " + "".join(n.ljust(12) for n in names[row:row + 4]).rstrip(),
                      file=self.out)


class ShowCommand(Command):
    name = "show"
    description = "Show store element (not supported)"

    def configure(self, parser):
        parser.add_argument("rest", nargs=argparse.REMAINDER)

    def execute(self):
        print("[w] show is not supported in this shell", file=self.out)


class QuitCommand(Command):
    name = "quit"
    description = "Quit the shell"

    def execute(self):
        self.env.shell.running = False  # type: ignore[attr-defined]


GENERIC_COMMANDS = (
    AliasCommand, ConvertCommand, CurrentCommand, HelpCommand, PrintCommand,
    PsCommand, QuitCommand, SetCommand, ShowCommand, StoreListCommand,
)


class Status(enum.Enum):
    SUCCESS = "success"
    EMPTY = "empty"
    UNKNOWN_COMMAND = "unknown_command"
    OPTION_ERROR = "option_error"
    INVALID = "invalid"
    FAILED = "failed"


def split_commands(text: str) -> list[str]:
    """Split on newlines and on ``;`` outside quotes."""
    parts, current, quote = [], [], None
    for ch in text:
        if quote:
            current.append(ch)
            if ch == quote:
                quote = None
        elif ch in "\"'":
            quote = ch
            current.append(ch)
        elif ch in ";\n":
            parts.append("".join(current))
            current = []
        else:
            current.append(ch)
    parts.append("".join(current))
    return [p.strip() for p in parts if p.strip()]


class Shell:
    def __init__(self, name: str, out: IO[str] | None = None, err: IO[str] | None = None):
        self.name = name
        self.env = Environment(out, err)
        self.env.shell = self  # type: ignore[attr-defined]
        self.commands: dict[str, type[Command]] = {}
        self.running = True
        self.logging = False
        self.log: list[dict] = []
        for cls in GENERIC_COMMANDS:
            self.add_command(cls)

    @property
    def prompt(self) -> str:
        return f"{self.name}> "

    def register_store(
        self,
        store_type: type,
        long_flag: str,
        short_flag: str,
        name: str,
        plural: str | None = None,
        describe: Callable[[Any], str] = str,
        print: Callable[[IO[str], Any], None] | None = None,
        print_statistics: Callable[[IO[str], Any], None] | None = None,
        log_statistics: Callable[[Any], dict] | None = None,
    ) -> StoreInfo:
        for info in self.env.store_infos:
            if info.long_flag == long_flag or info.short_flag == short_flag:
                raise ShellError(f"store flag --{long_flag}/-{short_flag} is already in use")
            if info.type is store_type:
                raise ShellError(f"a store for {store_type.__name__} already exists")
        info = StoreInfo(store_type, long_flag, short_flag, name, plural or name + "s", describe,
                         print, print_statistics, log_statistics)
        self.env.store_infos.append(info)
        self.env.stores[store_type] = Store()
        return info

    def register_conversion(self, source: type, target: type, convert: Callable) -> None:
        self.env.conversions.append(
            Conversion(self.env.info(source), self.env.info(target), convert)
        )

    def add_command(self, cls: type[Command]) -> None:
        if not cls.name:
            raise ShellError(f"{cls.__name__} has no command name")
        if cls.name in self.commands and self.commands[cls.name] is not cls:
            raise ShellError(f"command `{cls.name}` is already registered")
        self.commands[cls.name] = cls

    def categories(self) -> list[str]:
        custom = sorted({c.category for c in self.commands.values()} - {GENERAL})
        return custom + [GENERAL]

    def expand_alias(self, line: str) -> str:
        for pattern, expansion in self.env.aliases:
            m = re.fullmatch(pattern, line)
            if m:
                result = expansion
                for group in m.groups():
                    result = result.replace("{}", group or "", 1)
                return result
        return line

    def execute_line(self, line: str) -> Status:
        line = line.strip()
        if not line or line.startswith("#"):
            return Status.EMPTY
        expanded = self.expand_alias(line)
        try:
            tokens = shlex.split(expanded)
        except ValueError as exc:
            print(f"[e] {exc}", file=self.env.err)
            return Status.OPTION_ERROR
        if not tokens:
            return Status.EMPTY
        cls = self.commands.get(tokens[0])
        if cls is None:
            print(f"[e] unknown command `{tokens[0]}`", file=self.env.err)
            return Status.UNKNOWN_COMMAND
        cmd = cls(self.env)
        try:
            cmd.parse(tokens[1:])
        except OptionError as exc:
            print(f"[e] {exc}", file=self.env.err)
            return Status.OPTION_ERROR
        for predicate, message in cmd.validity_rules():
            if not predicate():
                print(f"[e] {message}", file=self.env.err)
                return Status.INVALID
        started = datetime.datetime.now()
        status = Status.SUCCESS
        try:
            cmd.execute()
        except ShellError as exc:
            print(f"[e] {exc}", file=self.env.err)
            status = Status.FAILED
        if self.logging:
            entry = {"command": expanded, "time": started.strftime("%Y-%m-%d %H:%M:%S")}
            entry.update(cmd.log() or {})
            self.log.append(entry)
        return status

    def run_commands(self, text: str) -> None:
        for line in split_commands(text):
            if not self.running:
                break
            self.execute_line(line)

    def run_script(self, stream: IO[str]) -> None:
        for raw in stream:
            if not self.running:
                break
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            self.run_commands(line)

    def run_repl(self, stdin: IO[str] | None = None) -> None:
        interactive = stdin is None
        while self.running:
            try:
                if interactive:
                    line = input(self.prompt)
                else:
                    self.env.out.write(self.prompt)
                    line = stdin.readline()
                    if not line:
                        break
            except EOFError:
                break
            self.run_commands(line)

    def start_log(self) -> None:
        self.logging = True
        self.log = []

    def write_log(self, stream: IO[str]) -> None:
        json.dump(self.log, stream, indent=2)
        stream.write("\n")

    def main(self, argv: list[str] | None = None) -> int:
        """Command-line entry: ``-c FILE`` runs a script, ``-l FILE`` writes a JSON log."""
        parser = argparse.ArgumentParser(prog=self.name)
        parser.add_argument("-c", "--command-file", metavar="FILE",
                            help="execute commands from FILE instead of the interactive prompt")
        parser.add_argument("-e", "--execute", metavar="COMMANDS",
                            help="execute ';'-separated commands instead of the prompt")
        parser.add_argument("-l", "--log", metavar="FILE", help="write a JSON log of all commands")
        args = parser.parse_args(argv)
        log_stream = None
        if args.log:
            try:
                log_stream = open(args.log, "w", encoding="utf-8")
            except OSError as exc:
                parser.error(f"cannot write log file {args.log}: {exc.strerror}")
            self.start_log()
        try:
            if args.command_file:
                try:
                    with open(args.command_file, encoding="utf-8") as script:
                        self.run_script(script)
                except OSError as exc:
                    parser.error(f"cannot read {args.command_file}: {exc.strerror}")
            elif args.execute:
                self.run_commands(args.execute)
            else:
                self.run_repl()
        finally:
            if log_stream is not None:
                self.write_log(log_stream)
                log_stream.close()
        return 0
