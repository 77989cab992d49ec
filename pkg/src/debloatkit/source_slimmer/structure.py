"""Block structure recovered from statements: indentation, braces or shell keywords."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .languages import LangName, SourceLanguage
from .lexer import Scan, Statement


@dataclass(eq=False)
class Node:
    header: Optional[Statement]
    parent: Optional["Node"] = None
    children: list["Node"] = field(default_factory=list)
    closer: Optional[Statement] = None
    block: bool = False
    # empty bodies are legal (brace languages, case arms) so no pinning needed
    may_be_empty: bool = False

    @property
    def first(self) -> int:
        return self.header.first

    @property
    def last(self) -> int:
        if self.closer is not None:
            return self.closer.last
        if self.children:
            return self.children[-1].last
        return self.header.last

    @property
    def span(self) -> range:
        return range(self.first, self.last + 1)

    @property
    def text(self) -> str:
        return self.header.text if self.header else ""

    @property
    def mask(self) -> str:
        return self.header.mask.strip() if self.header else ""

    def next_sibling(self) -> Optional["Node"]:
        if self.parent is None:
            return None
        sibs = self.parent.children
        i = sibs.index(self)
        return sibs[i + 1] if i + 1 < len(sibs) else None

    def prev_sibling(self) -> Optional["Node"]:
        if self.parent is None:
            return None
        sibs = self.parent.children
        i = sibs.index(self)
        return sibs[i - 1] if i else None

    def walk(self) -> Iterator["Node"]:
        for child in self.children:
            yield child
            yield from child.walk()

    def statements(self) -> Iterator[Statement]:
        if self.header is not None:
            yield self.header
        for child in self.children:
            yield from child.statements()
        if self.closer is not None:
            yield self.closer


def _indent(text: str) -> int:
    width = 0
    for ch in text:
        if ch == " ":
            width += 1
        elif ch == "\t":
            width += 8 - width % 8
        else:
            break
    return width


def _python_tree(scan: Scan) -> Node:
    root = Node(None, block=True, may_be_empty=True)
    stack: list[tuple[int, Node]] = [(-1, root)]
    for stmt in scan.statements:
        indent = _indent(scan.line(stmt.first).text)
        while stack[-1][0] >= indent:
            stack.pop()
        parent = stack[-1][1]
        header = stmt.mask.rstrip().endswith(":")
        node = Node(stmt, parent, block=header)
        parent.children.append(node)
        if header:
            stack.append((indent, node))
    return root


def _brace_tree(scan: Scan) -> Node:
    root = Node(None, block=True, may_be_empty=True)
    cur = root
    for stmt in scan.statements:
        m = stmt.mask.strip()
        if m.startswith("}") and cur is not root:
            rest = m[1:].strip()
            done, cur = cur, cur.parent
            while rest.startswith("}") and cur is not root:
                done.closer = stmt
                done, cur = cur, cur.parent
                rest = rest[1:].strip()
            if rest.endswith("{"):
                # "} else {" closes one block and opens its continuation
                node = Node(stmt, cur, block=True, may_be_empty=True)
                cur.children.append(node)
                cur = node
            else:
                done.closer = stmt
            continue
        delta = m.count("{") - m.count("}")
        if m.endswith("{") and delta >= 1:
            node = Node(stmt, cur, block=True, may_be_empty=True)
            cur.children.append(node)
            cur = node
        else:
            cur.children.append(Node(stmt, cur))
    return root


_SH_CLOSE = re.compile(r"^(fi|done|esac|\})(?:\s|;|$|[<>|&)])")
_SH_MIDDLE = re.compile(r"^(elif\b.*\bthen|else)$", re.S)
_SH_OPEN = re.compile(r"(?:^|[;\s])(then|do)$|\{$|^case\b.*\bin$", re.S)


def _shell_tree(scan: Scan) -> Node:
    root = Node(None, block=True, may_be_empty=True)
    cur = root
    for stmt in scan.statements:
        m = stmt.mask.strip()
        if cur is not root and _SH_MIDDLE.match(m):
            cur = cur.parent
            node = Node(stmt, cur, block=True)
            cur.children.append(node)
            cur = node
            continue
        if cur is not root and _SH_CLOSE.match(m):
            cur.closer = stmt
            cur = cur.parent
            continue
        if _SH_OPEN.search(m):
            node = Node(stmt, cur, block=True, may_be_empty=m.startswith("case"))
            cur.children.append(node)
            cur = node
            continue
        cur.children.append(Node(stmt, cur))
    return root


def build_tree(scan: Scan, lang: SourceLanguage) -> Node:
    if lang.name is LangName.PYTHON:
        return _python_tree(scan)
    if lang.name is LangName.SHELL:
        return _shell_tree(scan)
    return _brace_tree(scan)
