"""Decide whether an argument list is made only of literals.

"Literal" here means string and number literals joined by the language's
pure operators, plus a few names known to be side-effect free (standard
streams, ``None``, the program name).  Anything else, including string
interpolation, makes the expression non-literal.
"""

from __future__ import annotations

import re

from .languages import LangName, SourceLanguage

_NUMBER = re.compile(r"-?(?:0[xX][0-9a-fA-F]+|\d+(?:\.\d*)?)[lLuUfF]*")
_IDENT = re.compile(r"[A-Za-z_][\w.]*(?:\[0\])?")
_PY_KWARGS = {"end", "sep", "file", "flush"}

_PROGRAM_NAME = {
    LangName.PYTHON: {"sys.argv[0]"},
    LangName.C: {"argv[0]"},
}


def _scan_quoted(text: str, i: int, delim: str, escapes: bool = True) -> int:
    """Index just past the closing ``delim`` of a literal opened at ``i``; -1 if open."""
    j = i + len(delim)
    while j < len(text):
        if escapes and text[j] == "\\":
            j += 2
            continue
        if text.startswith(delim, j):
            return j + len(delim)
        j += 1
    return -1


def interpolates(body: str, sigils: str) -> bool:
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\":
            i += 2
            continue
        if ch in sigils:
            nxt = body[i + 1:i + 2]
            if ch == "$" and nxt == "0" and not body[i + 2:i + 3].isalnum():
                i += 2
                continue
            if nxt and (nxt.isalnum() or nxt in "_{(#@$!&*:"):
                return True
        if ch == "`":
            return True
        i += 1
    return False


def literal_expr(text: str, lang: SourceLanguage) -> bool:
    """True if ``text`` is a (possibly empty) comma list of literal expressions."""
    name = lang.name
    ops = sorted(lang.literal_operators + (("%",) if name is LangName.PYTHON else ()), key=len, reverse=True)
    allowed = set(lang.literal_names) | _PROGRAM_NAME.get(name, set())
    depth = 0
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "(":
            depth += 1
            i += 1
            continue
        if ch == ")":
            depth -= 1
            if depth < 0:
                return False
            i += 1
            continue

        if name is LangName.PYTHON:
            m = re.compile(r"([rRbBuUfF]{0,2})('''|\"\"\"|'|\")").match(text, i)
            if m:
                if "f" in m.group(1).lower():
                    return False
                end = _scan_quoted(text, m.start(2), m.group(2))
                if end < 0:
                    return False
                i = end
                continue
        elif ch in ("'", '"'):
            end = _scan_quoted(text, i, ch)
            if end < 0:
                return False
            if name is LangName.PERL and ch == '"' and interpolates(text[i + 1:end - 1], "$@"):
                return False
            i = end
            continue
        if ch == "`":
            return False

        if name is LangName.PERL and text.startswith("$0", i) and not text[i + 2:i + 3].isalnum():
            i += 2
            continue
        m = _NUMBER.match(text, i)
        if m and (m.group(0)[0] != "-" or _after_operator(text, i)):
            i = m.end()
            continue
        m = _IDENT.match(text, i)
        if m:
            word = m.group(0)
            if name is LangName.PERL and word == "x" and "x" in ops:
                i = m.end()
                continue
            if name is LangName.PYTHON and word in _PY_KWARGS:
                rest = text[m.end():].lstrip()
                if rest.startswith("=") and not rest.startswith("=="):
                    i = m.end()
                    continue
                return False
            if word not in allowed:
                return False
            i = m.end()
            continue
        for op in ops:
            if text.startswith(op, i):
                if op == "=" and text.startswith("==", i):
                    return False
                i += len(op)
                break
        else:
            return False
    return depth == 0


def _after_operator(text: str, i: int) -> bool:
    before = text[:i].rstrip()
    return not before or before[-1] in ",(+*=%"


_SH_SAFE = re.compile(r"[A-Za-z0-9_.,:=+\-/@%!^~]+")
_SH_REDIRECT = re.compile(r"(?:1)?>&2(?=\s|;|$)")


def shell_words_literal(text: str) -> bool:
    """True if every shell word is a literal (no expansion, no redirection to files)."""
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch == ";" and not text[i + 1:].strip():
            return True
        if ch == "'":
            end = _scan_quoted(text, i, "'", escapes=False)
            if end < 0:
                return False
            i = end
            continue
        if ch == '"':
            end = _scan_quoted(text, i, '"')
            if end < 0 or interpolates(text[i + 1:end - 1], "$"):
                return False
            i = end
            continue
        if ch == "\\" and i + 1 < n:
            i += 2
            continue
        if text.startswith("$0", i) and not text[i + 2:i + 3].isalnum():
            i += 2
            continue
        m = _SH_REDIRECT.match(text, i)
        if m:
            i = m.end()
            continue
        m = _SH_SAFE.match(text, i)
        if m:
            i = m.end()
            continue
        return False
    return True


def is_string_only(text: str, lang: SourceLanguage) -> bool:
    """A statement consisting of nothing but one or more adjacent string literals."""
    t = text.strip()
    if not t or t[0] not in "'\"rRbBuU":
        return False
    if not literal_expr(t, lang):
        return False
    return not re.search(r"[,+*%]", _outside_strings(t))


def _outside_strings(text: str) -> str:
    out = []
    i = 0
    while i < len(text):
        m = re.compile(r"([rRbBuU]{0,2})('''|\"\"\"|'|\")").match(text, i)
        if m:
            end = _scan_quoted(text, m.start(2), m.group(2))
            if end < 0:
                return text
            out.append(" ")
            i = end
            continue
        out.append(text[i])
        i += 1
    return "".join(out)
