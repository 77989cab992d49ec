"""Detectors that decide which whole lines of a source file can be dropped.

Every detector produces a set of candidate lines computed independently of
which other detectors are enabled, so enabling more detectors can only grow
a plan.  Removal must never leave an empty Python suite or shell compound
body behind; where a whole body would vanish, one statement of it is pinned
(kept) for detectors that do not also remove the enclosing construct.
"""

from __future__ import annotations

import re
from typing import Iterable, Optional

from ..errors import UnsupportedLanguage
from .languages import LangName, SourceLanguage
from .lexer import Statement, scan
from .literals import interpolates, is_string_only, literal_expr, shell_words_literal
from .structure import Node, build_tree

COMMENT = "comment"
BANNER_PRINT = "banner_print"
PRINT_ONLY_FUNCTION = "print_only_function"
USAGE_ERROR_BLOCK = "usage_error_block"
EXPLICIT = "explicit"

DETECTORS = (COMMENT, BANNER_PRINT, PRINT_ONLY_FUNCTION, USAGE_ERROR_BLOCK)
DEFAULT_DETECTORS = frozenset({COMMENT, BANNER_PRINT, PRINT_ONLY_FUNCTION})

# when one line is claimed by several detectors, the broadest construct wins
_PRIORITY = {EXPLICIT: 0, USAGE_ERROR_BLOCK: 1, PRINT_ONLY_FUNCTION: 2, BANNER_PRINT: 3, COMMENT: 4}

_MAIN_NAMES = {"main", "WinMain", "DllMain", "wmain"}
_C_KEYWORDS = {"if", "while", "for", "switch", "return", "sizeof", "do", "else", "case"}

_PURE_CALLS = {
    LangName.PYTHON: {"len", "isinstance", "hasattr", "os.path.exists", "os.path.isfile",
                      "os.path.isdir", "str", "int", "float", "bool", "any", "all"},
    LangName.C: {"strcmp", "strncmp", "strcasecmp", "strlen", "atoi"},
    LangName.JAVA: {"equals", "equalsIgnoreCase", "length"},
    LangName.PERL: {"defined", "scalar", "length"},
    LangName.SHELL: set(),
}


def _norm(text: str) -> str:
    return " ".join(text.split())


def _strip_semicolon(text: str) -> Optional[str]:
    t = text.rstrip()
    if not t.endswith(";"):
        return None
    return t[:-1].rstrip()


def _matching_paren(mask: str, open_at: int) -> int:
    depth = 0
    for j in range(open_at, len(mask)):
        if mask[j] == "(":
            depth += 1
        elif mask[j] == ")":
            depth -= 1
            if depth == 0:
                return j
    return -1


class _Recognizer:
    """Per-language statement shapes."""

    def __init__(self, lang: SourceLanguage):
        self.lang = lang
        self.name = lang.name

    # -- prints ------------------------------------------------------------
    def is_print(self, stmt: Statement) -> bool:
        t = stmt.code.strip()
        name = self.name
        if name is LangName.PYTHON:
            m = re.fullmatch(r"(print|sys\.stdout\.write|sys\.stderr\.write)\s*\((.*)\)\s*;?", t, re.S)
            if m:
                return literal_expr(m.group(2), self.lang)
            m = re.fullmatch(r"print(?:\s+(.*?))?\s*;?", t, re.S)
            if m and not t.startswith("print="):
                return literal_expr(m.group(1) or "", self.lang)
            return False
        if name is LangName.SHELL:
            m = re.fullmatch(r"(echo|printf)(\s+.*)?", t, re.S)
            return bool(m) and shell_words_literal(m.group(2) or "")
        heredoc_body = ""
        if name is LangName.PERL and "\n" in t and re.search(r"<<~?['\"]?[A-Za-z_]", stmt.mask.split("\n")[0]):
            t, _, heredoc_body = t.partition("\n")
            t = t.strip()
        body = _strip_semicolon(t)
        if body is None:
            return False
        if name is LangName.PERL:
            m = re.fullmatch(r"(print|printf|say)\b\s*(.*)", body, re.S)
            if not m:
                return False
            args = m.group(2).strip()
            if args.startswith("(") and _matching_paren(args, 0) == len(args) - 1:
                args = args[1:-1].strip()
            args = re.sub(r"^(?:STDERR|STDOUT|\{\s*\*?(?:STDERR|STDOUT)\s*\})\s+(?!,)", "", args)
            heredoc = re.fullmatch(r"<<~?(['\"]?)([A-Za-z_]\w*)\1", args)
            if heredoc:
                if heredoc.group(1) == "'":
                    return True
                return not interpolates(heredoc_body, "$@")
            return literal_expr(args, self.lang)
        if name is LangName.C:
            m = re.fullmatch(r"(printf|puts|fprintf|fputs|perror)\s*\((.*)\)", body, re.S)
            return bool(m) and literal_expr(m.group(2), self.lang)
        if name is LangName.JAVA:
            m = re.fullmatch(r"System\.(?:out|err)\.(?:println|print|printf)\s*\((.*)\)", body, re.S)
            return bool(m) and literal_expr(m.group(1), self.lang)
        return False

    # -- termination -------------------------------------------------------
    def is_terminate(self, stmt: Statement, in_main: bool) -> bool:
        t = stmt.code.strip()
        name = self.name
        if name is LangName.PYTHON:
            t = t.rstrip(";").rstrip()
            m = re.fullmatch(r"(?:sys\.exit|exit|quit|os\._exit)\s*\((.*)\)", t, re.S)
            if m:
                return literal_expr(m.group(1), self.lang)
            m = re.fullmatch(r"raise\s+SystemExit(?:\s*\((.*)\))?", t, re.S)
            if m:
                return literal_expr(m.group(1) or "", self.lang)
            m = re.fullmatch(r"return\b(.*)", t, re.S)
            return bool(m) and in_main and literal_expr(m.group(1), self.lang)
        if name is LangName.SHELL:
            return bool(re.fullmatch(r"exit(?:\s+-?\d+)?\s*;?", t))
        body = _strip_semicolon(t)
        if body is None:
            return False
        if name is LangName.PERL:
            if re.fullmatch(r"exit\b\s*(?:\(\s*-?\d*\s*\)|-?\d+)?", body):
                return True
            m = re.fullmatch(r"die\b\s*(.*)", body, re.S)
            return bool(m) and literal_expr(m.group(1), self.lang)
        status = r"(?:-?\d+|EXIT_FAILURE|EXIT_SUCCESS)"
        if name is LangName.C:
            if re.fullmatch(rf"_?exit\s*\(\s*{status}\s*\)|abort\s*\(\s*\)", body):
                return True
            return in_main and bool(re.fullmatch(rf"return\b\s*{status}?", body))
        if name is LangName.JAVA:
            if re.fullmatch(r"System\.exit\s*\(\s*-?\d+\s*\)", body):
                return True
            return in_main and body == "return"
        return False

    # -- calls -------------------------------------------------------------
    def call_name(self, stmt: Statement) -> Optional[str]:
        """Name of the function if the statement is a bare call with literal arguments."""
        t = stmt.code.strip()
        name = self.name
        if name is LangName.SHELL:
            m = re.fullmatch(r"([A-Za-z_][\w-]*)(\s+.*?)?\s*;?", t, re.S)
            if m and shell_words_literal(m.group(2) or ""):
                return m.group(1)
            return None
        if name is LangName.PYTHON:
            m = re.fullmatch(r"([A-Za-z_]\w*)\s*\((.*)\)\s*;?", t, re.S)
            if m and literal_expr(m.group(2), self.lang):
                return m.group(1)
            return None
        body = _strip_semicolon(t)
        if body is None:
            return None
        if name is LangName.PERL:
            m = re.fullmatch(r"&?([A-Za-z_]\w*)\s*(?:\((.*)\))?", body, re.S)
            if m and literal_expr(m.group(2) or "", self.lang):
                return m.group(1)
            return None
        m = re.fullmatch(r"([A-Za-z_]\w*)\s*\((.*)\)", body, re.S)
        if m and m.group(1) not in _C_KEYWORDS and literal_expr(m.group(2), self.lang):
            return m.group(1)
        return None

    def is_prototype(self, stmt: Statement, fname: str) -> bool:
        if self.name is not LangName.C:
            return False
        t = _norm(stmt.mask)
        return bool(re.fullmatch(rf"(?:[A-Za-z_][\w\s\*]*[\s\*])?{re.escape(fname)}\s*\([^;{{}}()]*\)\s*;", t))

    # -- definitions -------------------------------------------------------
    def function_name(self, node: Node) -> Optional[str]:
        if not node.block or node.header is None:
            return None
        t = _norm(node.header.code)
        name = self.name
        fname = None
        if name is LangName.PYTHON:
            m = re.fullmatch(r"def ([A-Za-z_]\w*) ?\(.*\) ?(?:->.*)?:", t)
            if m and not m.group(1).startswith("__"):
                prev = node.prev_sibling()
                if prev is None or not prev.text.startswith("@"):
                    fname = m.group(1)
        elif name is LangName.SHELL:
            m = re.fullmatch(r"function ([\w-]+) ?(?:\( ?\))? ?\{|([\w-]+) ?\( ?\) ?\{", t)
            if m:
                fname = m.group(1) or m.group(2)
        elif name is LangName.PERL:
            m = re.fullmatch(r"sub ([A-Za-z_]\w*) ?\{", t)
            if m:
                fname = m.group(1)
        elif name is LangName.C:
            if node.parent is not None and node.parent.header is None:
                m = re.fullmatch(r"(?:[A-Za-z_][\w \*]*[ \*])?([A-Za-z_]\w*) ?\([^;{}()]*\) ?\{", _norm(node.header.mask))
                if m and m.group(1) not in _C_KEYWORDS:
                    fname = m.group(1)
        elif name is LangName.JAVA:
            m = re.fullmatch(
                r"((?:(?:public|private|protected|static|final|synchronized) )*)"
                r"(?:<[^>]*> ?)?[\w<>\[\],.? ]+? ([A-Za-z_]\w*) ?\([^;{}]*\) ?(?:throws [\w., ]+)?\{",
                _norm(node.header.mask))
            if m and ("private" in m.group(1) or "static" in m.group(1)) and m.group(2) not in _C_KEYWORDS:
                fname = m.group(2)
        if fname in _MAIN_NAMES:
            return None
        if self.lang.braces and node.closer is None:
            return None
        return fname

    # -- conditionals ------------------------------------------------------
    def pure_condition(self, cond: str, mask: str) -> bool:
        name = self.name
        if name is LangName.SHELL:
            if "`" in cond or "$(" in cond:
                return False
            parts = re.split(r"&&|\|\|", mask)
            return all(re.fullmatch(r"\s*!?\s*(?:\[\[.*\]\]|\[.*\]|test\s.*)\s*", p, re.S) for p in parts)
        if re.search(r"(?<![=!<>:~])=(?![=~>])|\+\+|--|:=|\blambda\b", mask):
            return False
        if name is LangName.PERL and re.search(r"<\w*>|\bopen\b|\bsystem\b", mask):
            return False
        for call in re.finditer(r"([A-Za-z_][\w.]*)\s*\(", mask):
            callee = call.group(1)
            if name is LangName.JAVA:
                callee = callee.rsplit(".", 1)[-1]
            if callee in ("not", "and", "or", "if", "unless"):
                continue
            if callee not in _PURE_CALLS[name]:
                return False
        return True

    def conditional_header(self, node: Node) -> Optional[bool]:
        """True if ``node`` is a removable-shaped ``if`` block with no else branch."""
        if node.header is None or not node.block:
            return None
        t, m = node.header.code.strip(), node.header.mask.strip()
        nxt = node.next_sibling()
        name = self.name
        if name is LangName.PYTHON:
            mm = re.fullmatch(r"if\s+(.+):", m, re.S)
            if not mm:
                return None
            if nxt is not None and re.match(r"(elif|else)\b", nxt.mask):
                return None
            return self.pure_condition(t[mm.start(1):mm.end(1)], mm.group(1))
        if name is LangName.SHELL:
            mm = re.fullmatch(r"if\s+(.+?)\s*;?\s*then", m, re.S)
            if not mm or node.closer is None or not node.closer.mask.strip().startswith("fi"):
                return None
            return self.pure_condition(t[mm.start(1):mm.end(1)], mm.group(1))
        mm = re.match(r"(if|unless)\s*\(", m)
        if not mm or not m.endswith("{") or node.closer is None:
            return None
        close = _matching_paren(m, mm.end() - 1)
        if close < 0 or m[close + 1:].strip() != "{":
            return None
        if nxt is not None and re.match(r"(else|elsif)\b", nxt.mask):
            return None
        return self.pure_condition(t[mm.end():close], m[mm.end():close])

    def inline_conditional(self, stmt: Statement) -> Optional[Statement]:
        """Body of a one-statement guard such as ``die "..." unless @ARGV;``."""
        t, m = stmt.code.strip(), stmt.mask.strip()
        name = self.name

        def sub(start: int, end: int) -> Statement:
            return Statement(stmt.first, stmt.last, t[start:end], m[start:end], list(stmt.lines))

        if name is LangName.PYTHON:
            mm = re.match(r"if\s+", m)
            if not mm:
                return None
            depth = 0
            for j in range(mm.end(), len(m)):
                c = m[j]
                if c in "([{":
                    depth += 1
                elif c in ")]}":
                    depth -= 1
                elif c == ":" and depth == 0:
                    if self.pure_condition(t[mm.end():j], m[mm.end():j]) and m[j + 1:].strip():
                        return sub(j + 1, len(t))
                    return None
            return None
        if name is LangName.SHELL:
            mm = re.fullmatch(r"(\[\[.*?\]\]|\[.*?\]|test\s[^&|]*?)\s*(&&|\|\|)\s*(.+)", m, re.S)
            if mm and self.pure_condition(t[mm.start(1):mm.end(1)], mm.group(1)):
                return sub(mm.start(3), len(t))
            return None
        if name is LangName.PERL:
            mm = re.fullmatch(r"(.+?)\s+(?:if|unless)\s+(.+);", m, re.S)
            if mm and self.pure_condition(t[mm.start(2):mm.end(2)], mm.group(2)):
                return Statement(stmt.first, stmt.last, t[:mm.end(1)] + ";", m[:mm.end(1)] + ";",
                                 list(stmt.lines))
            # fall through to the C-like "if (cond) stmt;" form
        mm = re.match(r"if\s*\(", m)
        if not mm:
            return None
        close = _matching_paren(m, mm.end() - 1)
        if close < 0:
            return None
        rest = m[close + 1:].strip()
        if not rest or rest.startswith("{"):
            return None
        if not self.pure_condition(t[mm.end():close], m[mm.end():close]):
            return None
        return sub(close + 1, len(t))


def _enclosing_function(node: Node, rec: _Recognizer) -> Optional[str]:
    """Name of the innermost enclosing ``def``/``sub``/function, main included."""
    cur = node.parent
    while cur is not None and cur.header is not None:
        t = _norm(cur.header.code)
        m = (re.match(r"def (\w+)", t) or re.match(r"sub (\w+)", t)
             or re.match(r"(?:function )?([\w-]+) ?\( ?\) ?\{", t)
             or re.search(r"(\w+) ?\([^;{}()]*\) ?(?:throws [\w., ]+)?\{$", t))
        if m and m.group(1) not in _C_KEYWORDS:
            return m.group(1)
        cur = cur.parent
    return None


class Planner:
    def __init__(self, content: str, lang: SourceLanguage):
        if not lang.supported:
            raise UnsupportedLanguage("detector-driven planning needs a known language")
        self.lang = lang
        self.rec = _Recognizer(lang)
        self.scan = scan(content, lang)
        self.root = build_tree(self.scan, lang)
        self.nodes = list(self.root.walk())
        self._kinds: dict[int, str] = {}
        self._calls: dict[int, Optional[str]] = {}
        self._inline: dict[int, Optional[Statement]] = {}
        self._classify()
        self.functions = {n: f for n in self.nodes if (f := self.rec.function_name(n))}
        self._docstrings = self._find_docstrings()
        self._solve()

    # -- leaf classification -----------------------------------------------
    def _classify(self) -> None:
        for node in self.nodes:
            if node.block or node.header is None:
                continue
            stmt = node.header
            key = id(node)
            in_main = _enclosing_function(node, self.rec) in _MAIN_NAMES
            if self.rec.is_print(stmt):
                self._kinds[key] = "print"
            elif self.rec.is_terminate(stmt, in_main):
                self._kinds[key] = "term"
            elif self.lang.name is LangName.PYTHON and stmt.code.strip() == "pass":
                self._kinds[key] = "pass"
            else:
                self._kinds[key] = "other"
                body = self.rec.inline_conditional(stmt)
                if body is not None:
                    self._inline[key] = body
            self._calls[key] = self.rec.call_name(stmt)

    def _find_docstrings(self) -> set[Node]:
        if self.lang.name is not LangName.PYTHON:
            return set()
        found = set()
        heads = [self.root] + [n for n in self.nodes if n.block and re.match(r"(def|class)\b", n.text)]
        for head in heads:
            if head.children:
                first = head.children[0]
                if not first.block and is_string_only(first.header.code, self.lang):
                    found.add(first)
        return found

    def kind(self, node: Node) -> str:
        if node in self._docstrings:
            return "doc"
        return self._kinds.get(id(node), "block" if node.block else "other")

    def call(self, node: Node) -> Optional[str]:
        return None if node.block else self._calls.get(id(node))

    # -- fixpoint ----------------------------------------------------------
    def _body_ok(self, body: list[Node], p_names: set[str], t_names: Optional[set[str]],
                 removable: frozenset = frozenset()) -> bool:
        """Printish body; when ``t_names`` is given it must also terminate somewhere.

        Statements after the termination are dead, so its position does not matter.
        """
        useful = terminates = False
        for child in body:
            k = self.kind(child)
            if k in ("print",):
                useful = True
            elif k in ("doc", "pass") or child in removable:
                pass
            elif self.call(child) in p_names:
                useful = True
            elif t_names is not None and (k == "term" or self.call(child) in t_names):
                terminates = True
            else:
                return False
        return terminates if t_names is not None else useful

    def _solve(self) -> None:
        excluded: set[Node] = set()
        while True:
            # removable conditionals can make their enclosing body printish,
            # which can in turn enlarge P, T and C; iterate until nothing grows
            C: frozenset = frozenset()
            while True:
                P, T, grown = self._candidates(excluded, C)
                if grown == C:
                    break
                C = grown

            pinned, newly_excluded = self._pins(P, T, C)
            bad = self._reference_violations(P, T, C, pinned)
            if not newly_excluded and not bad:
                break
            excluded |= newly_excluded | bad

        self.print_only, self.terminating, self.conditionals, self.pinned = P, T, C, pinned

    def _candidates(self, excluded: set[Node], removable: frozenset) -> tuple[set[Node], set[Node], frozenset]:
        P = {n for n in self.functions if n not in excluded}
        while True:
            names = {self.functions[n] for n in P}
            keep = {n for n in P if self._body_ok(n.children, names, None, removable)}
            if keep == P:
                break
            P = keep
        p_names = {self.functions[n] for n in P}
        T = {n for n in self.functions if n not in excluded and n not in P}
        while True:
            t_names = {self.functions[n] for n in T}
            keep = {n for n in T if self._body_ok(n.children, p_names, t_names, removable)}
            if keep == T:
                break
            T = keep
        t_names = {self.functions[n] for n in T}
        C = set()
        for n in self.nodes:
            if n in excluded:
                continue
            if n.block and self.rec.conditional_header(n) and self._body_ok(n.children, p_names, t_names, removable):
                C.add(n)
            elif id(n) in self._inline:
                body = self._inline[id(n)]
                in_main = _enclosing_function(n, self.rec) in _MAIN_NAMES
                if self.rec.is_terminate(body, in_main) or self.rec.call_name(body) in t_names:
                    C.add(n)
        return P, T, frozenset(C)

    def _pins(self, P: set[Node], T: set[Node], C: set[Node]) -> tuple[set[Node], set[Node]]:
        p_names = {self.functions[n] for n in P}
        pinned: set[Node] = set()
        excluded: set[Node] = set()
        blocks = [n for n in self.nodes if n.block and not n.may_be_empty]
        for block in blocks:
            kids = block.children
            if not kids:
                continue
            if not all(self._removable_unit(k, p_names, P, T, C) for k in kids):
                continue
            soft = [k for k in kids if self.kind(k) in ("print", "doc")]
            calls = [k for k in kids if not k.block and self.call(k) in p_names]
            if soft:
                pinned.add(soft[-1])
            elif calls:
                pinned.add(calls[-1])
            else:
                excluded.add(kids[-1])
        return pinned, excluded

    def _removable_unit(self, node: Node, p_names, P, T, C) -> bool:
        if node in P or node in T or node in C:
            return True
        if node.block:
            return False
        if self.kind(node) in ("print", "doc"):
            return True
        return self.call(node) in p_names

    def _reference_violations(self, P, T, C, pinned) -> set[Node]:
        spans_p = [(n.first, n.last) for n in P]
        spans_tc = [(n.first, n.last) for n in T | C]
        leaf_of = {id(n.header): n for n in self.nodes if n.header is not None and not n.block}
        bad: set[Node] = set()
        stmts = self.scan.statements
        for fnode in P | T:
            fname = self.functions[fnode]
            pat = re.compile(rf"(?<![\w$@%-]){re.escape(fname)}(?![\w-])")
            for stmt in stmts:
                if fnode.first <= stmt.first and stmt.last <= fnode.last:
                    continue
                if not pat.search(stmt.code):
                    continue
                leaf = leaf_of.get(id(stmt))
                is_call = leaf is not None and self.call(leaf) == fname
                if fnode in P:
                    if self.rec.is_prototype(stmt, fname) and leaf is not None:
                        continue
                    if is_call and leaf not in pinned:
                        continue
                    if is_call and any(a <= stmt.first and stmt.last <= b for a, b in spans_p):
                        continue
                else:
                    inside = any(a <= stmt.first and stmt.last <= b for a, b in spans_tc)
                    if inside:
                        continue
                bad.add(fnode)
                break
        return bad

    # -- candidate lines per detector --------------------------------------
    def candidates(self, detector: str) -> set[int]:
        if detector == COMMENT:
            return self._comment_lines()
        if detector == BANNER_PRINT:
            out = set()
            for n in self.nodes:
                if self.kind(n) == "print" and n not in self.pinned:
                    out.update(n.header.span)
            return out
        if detector == PRINT_ONLY_FUNCTION:
            out = set()
            names = {self.functions[n] for n in self.print_only}
            for n in self.print_only:
                out.update(n.span)
            for n in self.nodes:
                if n.block or n.header is None:
                    continue
                if self.call(n) in names and n not in self.pinned:
                    out.update(n.header.span)
                elif any(self.rec.is_prototype(n.header, f) for f in names):
                    out.update(n.header.span)
            return out
        if detector == USAGE_ERROR_BLOCK:
            out = set()
            for n in self.conditionals | self.terminating:
                out.update(n.span)
            return out
        raise ValueError(f"unknown detector {detector!r}")

    def _comment_lines(self) -> set[int]:
        lines = self.scan.lines
        protected = set()
        if lines and lines[0].text.startswith("#!"):
            protected.add(1)
        if self.lang.name is LangName.PYTHON:
            for ln in lines[:2]:
                if re.match(r"^[ \t\f]*#.*?coding[:=][ \t]*[-\w.]+", ln.text):
                    protected.add(ln.number)
        # a block comment whose end shares a line with code keeps both ends
        for bc in self.scan.block_comments:
            first, last = self.scan.line(bc.first), self.scan.line(bc.last)
            if not (first.comment_only and last.comment_only):
                protected.update({bc.first, bc.last})
        out = {ln.number for ln in lines if ln.comment_only and ln.number not in protected}
        for n in self._docstrings:
            if n not in self.pinned:
                out.update(n.header.span)
        return out


def plan_lines(content: str, lang: SourceLanguage, detectors: Iterable[str]) -> dict[int, str]:
    """Map of line number to detector tag for the enabled ``detectors``."""
    detectors = set(detectors)
    unknown = detectors - set(DETECTORS)
    if unknown:
        raise ValueError(f"unknown detectors: {sorted(unknown)}")
    planner = Planner(content, lang)
    reasons: dict[int, str] = {}
    for det in sorted(detectors, key=_PRIORITY.__getitem__, reverse=True):
        for line in planner.candidates(det):
            reasons[line] = det
    return dict(sorted(reasons.items()))
