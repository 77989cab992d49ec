import itertools
import json
from pathlib import Path

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from debloatkit import source_slimmer as slim
from debloatkit.errors import LineOutOfRange, PlanFormatError, UnsupportedLanguage
from debloatkit.source_slimmer import (
    BANNER_PRINT,
    COMMENT,
    DETECTORS,
    PRINT_ONLY_FUNCTION,
    USAGE_ERROR_BLOCK,
    LangName,
    RemovalPlan,
    apparent_size,
    apply_removals,
    detect_language,
    explicit_plan,
    language_by_name,
    parse_line_ranges,
    plan_removals,
    preview_diff,
)

FIX = Path(__file__).parent / "fixtures"
GOLDEN = ["punbb_like.py", "backdoor_like.sh", "ircbot_like.pl", "worm_like.c", "Killer.java"]
PY = language_by_name("Python")


def load(name):
    path = FIX / name
    text = path.read_text(encoding="utf-8")
    return text, detect_language(path, text)


def golden_plan(name):
    stem = "punbb_like" if name.endswith(".py") else name
    return RemovalPlan.load(FIX / f"{stem}.plan.json")


@pytest.mark.parametrize("name", GOLDEN)
def test_golden_plans(name):
    text, lang = load(name)
    plan = plan_removals(text, lang, DETECTORS, target_id=name)
    assert plan == golden_plan(name)


def test_default_detectors_golden():
    text, lang = load("punbb_like.py")
    assert plan_removals(text, lang, target_id="punbb_like.py") == \
        RemovalPlan.load(FIX / "punbb_like.default.plan.json")


def test_usage_message_left_when_usage_detector_off():
    text, lang = load("punbb_like.py")
    plan = plan_removals(text, lang, {COMMENT, BANNER_PRINT, PRINT_ONLY_FUNCTION})
    out = apply_removals(text, plan)
    assert "sys.exit(1)" in out
    assert "if len(sys.argv) != 3:" in out and "usage()" in out


@pytest.mark.parametrize("name", GOLDEN)
def test_slimmed_output_is_smaller_and_stable(name):
    text, lang = load(name)
    plan = golden_plan(name)
    out = apply_removals(text, plan)
    assert apparent_size(out) < apparent_size(text)
    assert plan_removals(out, lang, DETECTORS).lines == ()


@pytest.mark.parametrize("name", GOLDEN)
def test_detector_sets_are_monotone(name):
    text, lang = load(name)
    dets = sorted(DETECTORS)
    plans = {}
    for k in range(len(dets) + 1):
        for combo in itertools.combinations(dets, k):
            plans[frozenset(combo)] = set(plan_removals(text, lang, combo).lines)
    for a, b in itertools.product(plans, repeat=2):
        if a <= b:
            assert plans[a] <= plans[b], (sorted(a), sorted(b))


@pytest.mark.parametrize("name", GOLDEN)
def test_each_detector_is_idempotent(name):
    text, lang = load(name)
    for det in DETECTORS:
        out = apply_removals(text, plan_removals(text, lang, {det}))
        assert plan_removals(out, lang, {det}).lines == ()


def test_retained_lines_are_byte_identical():
    text, lang = load("worm_like.c")
    plan = golden_plan("worm_like.c")
    kept = [ln for i, ln in enumerate(text.splitlines(keepends=True), 1) if i not in plan.lines]
    assert apply_removals(text, plan) == "".join(kept)
    # a trailing comment shares its line with code and stays
    assert "int x = 1; /* trailing */" in apply_removals(text, plan)


def test_strings_containing_comment_markers_are_kept():
    src = 'x = "# not a comment"\ny = 1  # real comment\n# whole line\nprint(x, y)\n'
    assert plan_removals(src, PY, {COMMENT}).lines == (3,)


def test_shebang_and_coding_cookie_survive():
    text, lang = load("punbb_like.py")
    out = apply_removals(text, plan_removals(text, lang, DETECTORS))
    assert out.startswith("#!/usr/bin/env python\n# -*- coding: utf-8 -*-\n")


def test_heredoc_body_is_not_a_comment():
    text, lang = load("backdoor_like.sh")
    out = apply_removals(text, plan_removals(text, lang, DETECTORS))
    assert "# not a comment" in out


def test_block_comment_sharing_a_line_with_code_is_kept():
    src = "int a; /* starts here\n   middle\n   ends */ int b;\n/* alone */\n"
    plan = plan_removals(src, language_by_name("C"), {COMMENT})
    assert plan.lines == (2, 4)


def test_interpolated_print_is_not_a_banner():
    src = 'import sys\nname = sys.argv[1]\nprint("hello %s" % name)\nprint(f"hi {name}")\nprint("static")\n'
    assert plan_removals(src, PY, {BANNER_PRINT}).lines == (5,)


def test_function_used_as_value_is_kept():
    src = (
        "def banner():\n    print('x')\n\n"
        "callbacks = [banner]\n"
        "banner()\n"
    )
    assert plan_removals(src, PY, {PRINT_ONLY_FUNCTION}).lines == ()


def test_decorated_function_is_kept():
    src = "import atexit\n@atexit.register\ndef bye():\n    print('bye')\n"
    plan = plan_removals(src, PY, {PRINT_ONLY_FUNCTION})
    assert plan.lines == ()


def test_block_never_left_empty():
    src = "def f(x):\n    if x:\n        print('a')\n    return x\n"
    out = apply_removals(src, plan_removals(src, PY, DETECTORS))
    compile(out, "<slimmed>", "exec")


def test_unknown_language_needs_explicit_lines(tmp_path):
    with pytest.raises(UnsupportedLanguage):
        plan_removals("hello\n", language_by_name("Unknown"), DETECTORS)
    plan = explicit_plan("1-2", content="a\nb\nc\n")
    assert apply_removals("a\nb\nc\n", plan) == "c\n"


def test_language_detection():
    assert detect_language("x.py", "").name is LangName.PYTHON
    assert detect_language("x.pm", "").name is LangName.PERL
    assert detect_language("x.h", "").name is LangName.C
    assert detect_language("X.java", "").name is LangName.JAVA
    assert detect_language("run", "#!/usr/bin/env bash\necho hi\n").name is LangName.SHELL
    assert detect_language("run", "#!/usr/bin/python3\n").name is LangName.PYTHON
    assert detect_language("run", "#!/usr/bin/perl -w\n").name is LangName.PERL
    assert detect_language("blob", "no clue").name is LangName.UNKNOWN
    with pytest.raises(UnsupportedLanguage):
        language_by_name("cobol")


def test_line_ranges():
    assert parse_line_ranges("26-28, 45") == [26, 27, 28, 45]
    assert parse_line_ranges("") == []
    for bad in ("3-1", "a", "1-2-3"):
        with pytest.raises(ValueError):
            parse_line_ranges(bad)
    with pytest.raises(LineOutOfRange):
        explicit_plan([4], content="a\nb\n")
    with pytest.raises(LineOutOfRange):
        apply_removals("a\n", explicit_plan([2]))
    with pytest.raises(LineOutOfRange):
        explicit_plan([0])


def test_plan_roundtrip_and_validation(tmp_path):
    plan = explicit_plan("2,4", target_id="t.py")
    path = tmp_path / "p.json"
    plan.dump(path)
    doc = json.loads(path.read_text())
    assert doc == {"target_id": "t.py", "lines": [2, 4], "reasons": {"2": "explicit", "4": "explicit"}}
    assert RemovalPlan.load(path) == plan
    assert RemovalPlan.from_dict({"lines": [3]}).reasons == {3: "explicit"}
    with pytest.raises(PlanFormatError):
        RemovalPlan.from_dict({"lines": ["x"]})
    with pytest.raises(ValueError):
        RemovalPlan("t", (1,), {1: "mystery"})
    with pytest.raises(ValueError):
        RemovalPlan("t", (1, 2), {1: "comment"})


def test_preview_is_a_unified_diff():
    text, lang = load("punbb_like.py")
    diff = preview_diff(text, golden_plan("punbb_like.py"), "punbb_like.py")
    removed = [ln for ln in diff.splitlines() if ln.startswith("-") and not ln.startswith("---")]
    assert len(removed) == len(golden_plan("punbb_like.py"))
    assert diff.startswith("--- punbb_like.py\n+++ punbb_like.py (slimmed)\n")


def test_non_utf8_bytes_roundtrip():
    raw = b"# caf\xe9\nx = 1\n"
    text = slim.decode_source(raw)
    out = apply_removals(text, plan_removals(text, PY, {COMMENT}))
    assert slim.encode_source(out) == b"x = 1\n"
    assert slim.encode_source(text) == raw
    assert apparent_size(raw) == apparent_size(text) == len(raw)


def test_crlf_line_endings_preserved():
    src = "# c\r\nx = 1\r\nprint('banner')\r\n"
    out = apply_removals(src, plan_removals(src, PY, DETECTORS))
    assert out == "x = 1\r\n"


# generated Python programs: slimming must keep them compilable

_LIT = st.sampled_from(['"==== tool ===="', "'usage: prog'", '"a" + "b"', '"%s" % sys.argv[0]', '"-" * 40'])
_NAMES = st.sampled_from(["alpha", "beta", "gamma"])


@st.composite
def _stmt(draw, depth=0):
    kinds = ["print", "assign", "comment", "call", "exit", "ref"] + (["if", "ifelse", "for"] if depth < 2 else [])
    kind = draw(st.sampled_from(kinds))
    if kind == "print":
        return [f"print({draw(_LIT)})"]
    if kind == "assign":
        return [f"v = {draw(st.integers(0, 9))}"]
    if kind == "comment":
        return ["# " + draw(st.sampled_from(["note", "todo", "hmm"]))]
    if kind == "call":
        return [f"{draw(_NAMES)}()"]
    if kind == "exit":
        return ["sys.exit(1)"]
    if kind == "ref":
        return [f"cb = {draw(_NAMES)}"]
    body = ["    " + ln for blk in draw(_block(depth + 1)) for ln in blk]
    if kind == "for":
        return ["for arg in sys.argv:"] + body
    head = [f"if len(sys.argv) < {draw(st.integers(1, 3))}:"] + body
    if kind == "ifelse":
        head += ["else:"] + ["    " + ln for blk in draw(_block(depth + 1)) for ln in blk]
    return head


def _block(depth):
    # a block of only comments is not valid Python to begin with
    return st.lists(_stmt(depth), min_size=1, max_size=3).filter(
        lambda blk: any(not ln.startswith("#") for b in blk for ln in b[:1]))


@st.composite
def _program(draw):
    lines = ["import sys"]
    for name in ["alpha", "beta", "gamma"]:
        body = draw(_block(1))
        doc = ['    """Docstring."""'] if draw(st.booleans()) else []
        lines += [f"def {name}():"] + doc + ["    " + ln for blk in body for ln in blk] + [""]
    top = draw(st.lists(_stmt(), min_size=1, max_size=5))
    lines += [ln for blk in top for ln in blk]
    return "\n".join(lines) + "\n"


@settings(max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(_program(), st.sets(st.sampled_from(sorted(DETECTORS))))
def test_generated_programs_stay_compilable(src, dets):
    compile(src, "<orig>", "exec")
    plan = plan_removals(src, PY, dets)
    out = apply_removals(src, plan)
    compile(out, "<slimmed>", "exec")
    assert plan_removals(out, PY, dets).lines == ()
