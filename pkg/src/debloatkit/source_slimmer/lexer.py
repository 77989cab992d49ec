"""Line scanner: separates comments and strings from code, groups statements.

Each physical line gets three views:

* ``text``  the line as written (no line terminator)
* ``code``  the line with comments removed, strings intact
* ``mask``  like ``code`` but string contents replaced by ``_`` so that
  brackets and keywords inside literals cannot be mistaken for syntax
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .languages import LangName, SourceLanguage

_HEREDOC = re.compile(r"<<(?!<)([-~]?)\s*(?:'(\w+)'|\"(\w+)\"|([A-Za-z_]\w*))")
_SH_OPEN_HEADER = re.compile(r"^\s*(?:if|elif|while|until|for|select)\b(?!.*(?:;|\s)(?:then|do)\b)")
_SH_FUNC_HEADER = re.compile(r"^\s*(?:function\s+[\w-]+(?:\s*\(\s*\))?|[\w-]+\s*\(\s*\))\s*$")
_PERL_HEREDOC = re.compile(r"<<([~]?)(?:'(\w+)'|\"(\w+)\"|([A-Z_]\w*))")


@dataclass
class Line:
    number: int
    text: str
    code: str = ""
    mask: str = ""
    has_comment: bool = False
    starts_in_string: bool = False
    data: bool = False  # Perl data section after __END__/__DATA__

    @property
    def blank(self) -> bool:
        return not self.text.strip()

    @property
    def comment_only(self) -> bool:
        return self.has_comment and not self.code.strip() and not self.starts_in_string

    @property
    def is_code(self) -> bool:
        return bool(self.code.strip()) or self.starts_in_string


@dataclass
class BlockComment:
    first: int
    last: int


@dataclass
class Statement:
    first: int
    last: int
    code: str
    mask: str
    lines: list[int] = field(default_factory=list)

    @property
    def text(self) -> str:
        return self.code.strip()

    @property
    def span(self) -> range:
        return range(self.first, self.last + 1)


@dataclass
class Scan:
    lines: list[Line]
    statements: list[Statement]
    block_comments: list[BlockComment]

    def line(self, number: int) -> Line:
        return self.lines[number - 1]


def split_lines(content: str) -> list[str]:
    """Split on ``\\n`` keeping terminators; no phantom line after a final newline."""
    if not content:
        return []
    parts = content.split("\n")
    out = [p + "\n" for p in parts[:-1]]
    if parts[-1]:
        out.append(parts[-1])
    return out


def _strip_eol(raw: str) -> str:
    if raw.endswith("\n"):
        raw = raw[:-1]
    if raw.endswith("\r"):
        raw = raw[:-1]
    return raw


class _Scanner:
    def __init__(self, lang: SourceLanguage):
        self.lang = lang
        self.string: Optional[str] = None  # open delimiter
        self.block_open: Optional[int] = None  # line of an unterminated block comment
        self.pod = False
        self.heredocs: list[tuple[str, bool]] = []  # pending (terminator, allow_indent)
        self.heredoc: Optional[tuple[str, bool]] = None
        self.depth = 0
        self.data = False
        self.block_comments: list[BlockComment] = []

    def _line_comment_at(self, text: str, i: int) -> bool:
        tok = self.lang.line_comment
        if not tok or not text.startswith(tok, i):
            return False
        name = self.lang.name
        if name is LangName.SHELL:
            return i == 0 or text[i - 1] in " \t;|&("
        if name is LangName.PERL:
            return i == 0 or text[i - 1] not in "$@{\\"
        return True

    def scan_line(self, line: Line) -> None:
        text = line.text
        lang = self.lang
        line.starts_in_string = self.string is not None or self.heredoc is not None

        if self.data:
            line.data = True
            return
        if self.heredoc is not None:
            term, indent_ok = self.heredoc
            body = text.strip() if indent_ok else text
            if body == term:
                self.heredoc = self.heredocs.pop(0) if self.heredocs else None
            line.code = text
            line.mask = "_" * len(text)
            return
        if lang.name is LangName.PERL and self.string is None:
            if self.pod:
                line.has_comment = True
                if text.startswith("=cut"):
                    self.pod = False
                    self.block_comments[-1].last = line.number
                return
            if re.match(r"=[A-Za-z]", text):
                self.pod = not text.startswith("=cut")
                line.has_comment = True
                self.block_comments.append(BlockComment(line.number, line.number))
                return
            if text.strip() in ("__END__", "__DATA__"):
                self.data = True
                line.code = line.mask = text
                return

        code: list[str] = []
        mask: list[str] = []
        i, n = 0, len(text)
        heredoc_re = _PERL_HEREDOC if lang.name is LangName.PERL else _HEREDOC
        while i < n:
            if self.block_open is not None:
                close = lang.block_comment[1]
                j = text.find(close, i)
                line.has_comment = True
                if j < 0:
                    i = n
                    break
                i = j + len(close)
                self.block_comments.append(BlockComment(self.block_open, line.number))
                self.block_open = None
                continue
            if self.string is not None:
                d = self.string
                ch = text[i]
                if ch == "\\" and not (d == "'" and lang.name is LangName.SHELL):
                    code.append(text[i:i + 2])
                    mask.append("_" * len(text[i:i + 2]))
                    i += 2
                    continue
                if text.startswith(d, i):
                    code.append(d)
                    mask.append(d)
                    i += len(d)
                    self.string = None
                    continue
                code.append(ch)
                mask.append("_")
                i += 1
                continue

            if (lang.block_comment and lang.name is not LangName.PERL
                    and text.startswith(lang.block_comment[0], i)):
                self.block_open = line.number
                line.has_comment = True
                code.append(" ")
                mask.append(" ")
                i += len(lang.block_comment[0])
                continue
            if self._line_comment_at(text, i):
                line.has_comment = True
                break
            if lang.name in (LangName.SHELL, LangName.PERL) and text.startswith("<<", i):
                m = heredoc_re.match(text, i)
                if m:
                    term = m.group(2) or m.group(3) or m.group(4)
                    self.heredocs.append((term, bool(m.group(1))))
                    code.append(m.group(0))
                    mask.append(m.group(0))
                    i = m.end()
                    continue
            opened = None
            for q in lang.quotes:
                if text.startswith(q, i):
                    opened = q
                    break
            if opened is not None:
                if lang.name is LangName.PERL and opened == "'" and i and (text[i - 1].isalnum()):
                    opened = None  # old-style package separator
            if opened is not None:
                self.string = opened
                code.append(opened)
                mask.append(opened)
                i += len(opened)
                continue
            ch = text[i]
            if ch in "([":
                self.depth += 1
            elif ch in ")]" and self.depth:
                self.depth -= 1
            code.append(ch)
            mask.append(ch)
            i += 1

        # single-line string literals do not survive the end of a line
        if self.string is not None and not (code and code[-1].endswith("\\")):
            if lang.name is LangName.PYTHON and self.string in ('"', "'"):
                self.string = None
            elif lang.name in (LangName.C, LangName.JAVA):
                self.string = None
        line.code = "".join(code)
        line.mask = "".join(mask)
        if self.heredocs and self.heredoc is None:
            self.heredoc = self.heredocs.pop(0)

    def continues(self, line: Line) -> bool:
        """Does the statement that includes ``line`` go on past it?"""
        if self.string is not None or self.heredoc is not None or self.block_open is not None:
            return True
        m = line.mask.rstrip()
        if m.endswith("\\"):
            return True
        name = self.lang.name
        if name is LangName.PYTHON:
            return self.depth > 0
        if name is LangName.SHELL:
            if self.depth > 0 or m.endswith(("|", "&&", "||")):
                return True
            return bool(_SH_OPEN_HEADER.match(m) or _SH_FUNC_HEADER.match(m))
        if self.depth > 0:
            return True
        if name is LangName.C and m.lstrip().startswith("#"):
            return False
        return not m.endswith((";", "{", "}", ":"))


def scan(content: str, lang: SourceLanguage) -> Scan:
    raw_lines = split_lines(content)
    lines = [Line(i + 1, _strip_eol(r)) for i, r in enumerate(raw_lines)]
    sc = _Scanner(lang)
    statements: list[Statement] = []
    current: Optional[Statement] = None
    for line in lines:
        sc.scan_line(line)
        if line.data:
            current = None
            continue
        if current is None:
            if not line.is_code:
                continue
            current = Statement(line.number, line.number, "", "", [])
        current.lines.append(line.number)
        current.last = line.number
        sep = "\n" if current.code else ""
        current.code += sep + line.code
        current.mask += sep + line.mask
        if not sc.continues(line):
            statements.append(current)
            current = None
    if current is not None:
        statements.append(current)
    if sc.block_open is not None:
        sc.block_comments.append(BlockComment(sc.block_open, len(lines)))
    return Scan(lines, statements, sc.block_comments)
