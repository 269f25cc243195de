from __future__ import annotations

import argparse
from dataclasses import dataclass
from typing import Callable

from ..errors import UsageError

Handler = Callable[[argparse.Namespace], int]
Configure = Callable[[argparse.ArgumentParser], None]


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # type: ignore[override]
        raise UsageError(message, usage=self.format_usage().strip())


@dataclass(frozen=True)
class Command:
    name: str
    help: str
    configure: Configure
    handler: Handler


class CommandRegistry:
    """Subcommands register here; ``build_parser`` assembles them into one argparse tree."""

    def __init__(self, prog: str = "billiards") -> None:
        self.prog = prog
        self.commands: dict[str, Command] = {}

    def command(self, name: str, help: str, configure: Configure) -> Callable[[Handler], Handler]:
        def decorator(handler: Handler) -> Handler:
            if name in self.commands:
                raise ValueError(f"command {name!r} registered twice")
            self.commands[name] = Command(name, help, configure, handler)
            return handler

        return decorator

    def build_parser(self) -> argparse.ArgumentParser:
        parser = _Parser(prog=self.prog, description="Polygonal billiards experiments")
        sub = parser.add_subparsers(dest="command", metavar="<command>", parser_class=_Parser)
        sub.required = True
        for command in self.commands.values():
            child = sub.add_parser(command.name, help=command.help, description=command.help)
            command.configure(child)
            child.set_defaults(handler=command.handler)
        return parser


registry = CommandRegistry()

# Import command modules so that they register on the shared registry.
from . import simulate  # noqa: E402,F401
from . import compare  # noqa: E402,F401
from . import equiv  # noqa: E402,F401
from . import analyze  # noqa: E402,F401
from . import surface  # noqa: E402,F401
from . import iet  # noqa: E402,F401
from . import diagonals  # noqa: E402,F401
from . import classify  # noqa: E402,F401
from . import search  # noqa: E402,F401

__all__ = ["Command", "CommandRegistry", "registry"]
