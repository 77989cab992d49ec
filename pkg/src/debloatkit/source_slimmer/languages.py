"""Per-language lexical conventions used by the line-based slimmer."""

from __future__ import annotations

import enum
import os
import re
from dataclasses import dataclass, field
from typing import Optional

from ..errors import UnsupportedLanguage


class LangName(enum.Enum):
    PYTHON = "Python"
    SHELL = "Shell"
    PERL = "Perl"
    C = "C"
    JAVA = "Java"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class SourceLanguage:
    name: LangName
    line_comment: Optional[str]
    block_comment: Optional[tuple[str, str]] = None
    print_call_patterns: tuple[str, ...] = ()
    terminate_calls: tuple[str, ...] = ()
    quotes: tuple[str, ...] = ('"', "'")
    # identifiers that may appear in an otherwise literal argument list
    literal_names: frozenset[str] = field(default_factory=frozenset)
    literal_operators: tuple[str, ...] = (",",)

    @property
    def supported(self) -> bool:
        return self.name is not LangName.UNKNOWN

    @property
    def braces(self) -> bool:
        return self.name in (LangName.C, LangName.JAVA, LangName.PERL)

    def __str__(self) -> str:
        return self.name.value


PYTHON = SourceLanguage(
    LangName.PYTHON,
    line_comment="#",
    print_call_patterns=("print", "sys.stdout.write", "sys.stderr.write"),
    terminate_calls=("sys.exit", "exit", "quit", "os._exit"),
    quotes=('"""', "'''", '"', "'"),
    literal_names=frozenset({"None", "True", "False", "sys.stderr", "sys.stdout", "end", "sep", "file", "flush"}),
    literal_operators=(",", "+", "*", "=", ">>"),
)

SHELL = SourceLanguage(
    LangName.SHELL,
    line_comment="#",
    print_call_patterns=("echo", "printf"),
    terminate_calls=("exit",),
    quotes=('"', "'", "`"),
)

PERL = SourceLanguage(
    LangName.PERL,
    line_comment="#",
    block_comment=("=pod", "=cut"),
    print_call_patterns=("print", "printf", "say"),
    terminate_calls=("exit", "die"),
    quotes=('"', "'", "`"),
    literal_names=frozenset({"STDERR", "STDOUT"}),
    literal_operators=(",", ".", "x"),
)

C = SourceLanguage(
    LangName.C,
    line_comment="//",
    block_comment=("/*", "*/"),
    print_call_patterns=("printf", "puts", "fprintf", "fputs", "perror"),
    terminate_calls=("exit", "_exit", "abort"),
    literal_names=frozenset({"stderr", "stdout", "NULL"}),
)

JAVA = SourceLanguage(
    LangName.JAVA,
    line_comment="//",
    block_comment=("/*", "*/"),
    print_call_patterns=("System.out.println", "System.out.print", "System.out.printf",
                         "System.err.println", "System.err.print", "System.err.printf"),
    terminate_calls=("System.exit",),
    literal_operators=(",", "+"),
)

UNKNOWN = SourceLanguage(LangName.UNKNOWN, line_comment=None)

LANGUAGES = {lang.name: lang for lang in (PYTHON, SHELL, PERL, C, JAVA, UNKNOWN)}

_EXTENSIONS = {
    ".py": PYTHON, ".pyw": PYTHON,
    ".sh": SHELL, ".bash": SHELL,
    ".pl": PERL, ".pm": PERL,
    ".c": C, ".h": C,
    ".java": JAVA,
}

_SHEBANG = re.compile(r"^#!\s*(?:/usr/bin/env\s+(?:-\S+\s+)*)?(\S+)")
_INTERPRETERS = [
    (re.compile(r"python[\d.]*$"), PYTHON),
    (re.compile(r"(?:ba|da|k|z|a)?sh$"), SHELL),
    (re.compile(r"perl[\d.]*$"), PERL),
]


def language_by_name(name: str) -> SourceLanguage:
    for lang in LANGUAGES.values():
        if lang.name.value.lower() == name.strip().lower():
            return lang
    raise UnsupportedLanguage(f"unknown language {name!r}")


def detect_language(path: str, content: str = "") -> SourceLanguage:
    """Guess the language from the extension, then from a ``#!`` line."""
    ext = os.path.splitext(os.path.basename(path))[1].lower()
    if ext in _EXTENSIONS:
        return _EXTENSIONS[ext]
    if not ext:
        first = content.split("\n", 1)[0]
        m = _SHEBANG.match(first)
        if m:
            interp = os.path.basename(m.group(1))
            for pattern, lang in _INTERPRETERS:
                if pattern.match(interp):
                    return lang
    return UNKNOWN
