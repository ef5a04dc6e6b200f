"""Line-oriented surface checker for Python program fragments.

The checker never builds an AST: program states produced by deleting
arbitrary lines from a valid program routinely fail to parse, and the
whole point is to report which surviving lines lost something they
depended on.  Instead every line is scanned once into context-free facts
(cleaned code, bracket events, indent, string state transitions, name
uses and bindings) and a cheap flow pass walks any subset of lines,
threading cross-line state: open strings, open brackets, indentation
blocks, scopes, and definition order.

Checks covered: bracket balance and pairing, indentation-block
consistency, header/body pairing for block openers, unterminated string
literals, and definition-before-use for module and function names
(imports included).  Full semantic analysis is a non-goal; the documented
approximations (annotation-only statements do not bind, ``match``/``case``
headers are opaque, one-line ``def`` bodies resolve at the def line,
semicolon chains use intra-line token order) keep the pass linear.

``Analysis`` caches per-line scans keyed by the string state a line is
entered in, so re-checking many states of one source program costs only
the flow pass.
"""

from __future__ import annotations

import builtins
import keyword
import re
from typing import Iterable, Sequence

_KEYWORDS = frozenset(keyword.kwlist)
_MODULE_GLOBALS = (
    "__file__", "__name__", "__doc__", "__package__", "__loader__",
    "__spec__", "__builtins__", "__annotations__", "__dict__",
)
_BUILTINS = frozenset(dir(builtins)) | frozenset(_MODULE_GLOBALS)
_PAIR = {"(": ")", "[": "]", "{": "}"}
_OPENERS = frozenset("([{")
_CLOSERS = frozenset(")]}")
_AUG_OPS = frozenset(
    ["+=", "-=", "*=", "/=", "//=", "%=", "**=", ">>=", "<<=", "&=", "|=", "^=", "@="]
)
_STRING_PREFIX_RE = re.compile(r"[rRbBuUfF]{1,2}")
_LATE = 10000  # sub-position offset: assignment targets bind after the line's uses

_TOKEN_RE = re.compile(
    r"[A-Za-z_]\w*"
    r"|\d[\w.]*"
    r"|\*\*=|//=|>>=|<<="
    r"|:=|->|==|!=|<=|>=|\+=|-=|\*=|/=|%=|&=|\|=|\^=|@="
    r"|\*\*|//|<<|>>"
    r"|\S"
)


def _is_name(tok: str) -> bool:
    return (tok[0].isalpha() or tok[0] == "_") and tok not in _KEYWORDS


def _tokens(code: str) -> list[tuple[str, int]]:
    return [(m.group(), m.start()) for m in _TOKEN_RE.finditer(code)]


def _indent_width(raw: str) -> int:
    width = 0
    for ch in raw:
        if ch == " ":
            width += 1
        elif ch == "\t":
            width += 8 - width % 8
        else:
            break
    return width


def _find_single_close(raw: str, start: int, quote: str) -> int | None:
    i = start
    n = len(raw)
    while i < n:
        c = raw[i]
        if c == "\\":
            i += 2
            continue
        if c == quote:
            return i + 1
        i += 1
    return None


def _find_triple_close(raw: str, start: int, quotes: str) -> int | None:
    i = start
    n = len(raw)
    while i < n:
        if raw[i] == "\\":
            i += 2
            continue
        if raw.startswith(quotes, i):
            return i + 3
        i += 1
    return None


def _fstring_exprs(content: str, pos: int) -> list[tuple[int, str]]:
    """Top-level ``{...}`` expression sources of an f-string body."""
    out = []
    depth = 0
    start = 0
    i = 0
    n = len(content)
    while i < n:
        c = content[i]
        if c == "{":
            if depth == 0 and content.startswith("{{", i):
                i += 2
                continue
            if depth == 0:
                start = i + 1
            depth += 1
        elif c == "}":
            if depth == 0:
                i += 2 if content.startswith("}}", i) else 1
                continue
            depth -= 1
            if depth == 0:
                out.append((pos, content[start:i]))
        i += 1
    return out


class NameFacts:
    """Classified name events of one scanned line."""

    __slots__ = (
        "uses",
        "defs",
        "pending",
        "scope_kind",
        "scope_name",
        "scope_params",
        "star_import",
        "first_word",
    )

    def __init__(self) -> None:
        self.uses: list[tuple[str, int]] = []
        self.defs: list[tuple[str, int]] = []
        self.pending: str | None = None
        self.scope_kind: str | None = None
        self.scope_name: str | None = None
        self.scope_params: tuple[str, ...] = ()
        self.star_import = False
        self.first_word = ""


class LineScan:
    """Context-free facts of one physical line for one entry string state."""

    __slots__ = (
        "exit_state",
        "indent",
        "has_content",
        "code",
        "closes",
        "opens",
        "last_char",
        "ends_backslash",
        "inline_findings",
        "fstrings",
        "_fresh",
        "_cont",
    )

    def __init__(self) -> None:
        self.exit_state = ""
        self.indent = 0
        self.has_content = False
        self.code = ""
        self.closes: tuple[str, ...] = ()
        self.opens: tuple[str, ...] = ()
        self.last_char = ""
        self.ends_backslash = False
        self.inline_findings: tuple[tuple[str, str], ...] = ()
        self.fstrings: tuple[tuple[int, str], ...] = ()
        self._fresh: NameFacts | None = None
        self._cont: tuple[tuple, tuple] | None = None

    def fresh_facts(self) -> NameFacts:
        if self._fresh is None:
            self._fresh = _classify_fresh(self.code, self.fstrings)
        return self._fresh

    def cont_facts(self) -> tuple[tuple, tuple]:
        if self._cont is None:
            uses: list = []
            defs: list = []
            toks = _tokens(self.code)
            _scan_expr(toks, 0, len(toks), uses, defs, kwarg_any_depth=True)
            _add_fstring_uses(self.fstrings, toks, uses)
            self._cont = (tuple(uses), tuple(defs))
        return self._cont


def scan_line(raw: str, entry: str) -> LineScan:
    scan = LineScan()
    n = len(raw)
    buf = [" "] * n
    inline: list[tuple[str, str]] = []
    fstrings: list[tuple[int, str]] = []
    local_stack: list[str] = []
    closes: list[str] = []
    opens: list[str] = []
    saw_string = False
    state = entry
    i = 0

    if state:
        end = _find_triple_close(raw, 0, state)
        if end is None:
            scan.exit_state = state
            return scan
        saw_string = True
        state = ""
        i = end

    scan.indent = _indent_width(raw)
    while i < n:
        c = raw[i]
        if c == "#":
            break
        if c == '"' or c == "'":
            saw_string = True
            qpos = i
            j = i
            while j > 0 and j > i - 2 and raw[j - 1].isalpha():
                j -= 1
            prefix = raw[j:i]
            is_prefix = bool(
                prefix
                and _STRING_PREFIX_RE.fullmatch(prefix)
                and (j == 0 or not (raw[j - 1].isalnum() or raw[j - 1] == "_"))
            )
            if is_prefix:
                for k in range(j, i):
                    buf[k] = " "
            is_f = is_prefix and "f" in prefix.lower()
            if raw.startswith(c * 3, i):
                end = _find_triple_close(raw, i + 3, c * 3)
                if end is None:
                    state = c * 3
                    i = n
                    break
                if is_f:
                    fstrings.extend(_fstring_exprs(raw[i + 3 : end - 3], qpos))
                i = end
            else:
                end = _find_single_close(raw, i + 1, c)
                if end is None:
                    inline.append(("unterminated-string", "unterminated string literal"))
                    i = n
                    break
                if is_f:
                    fstrings.extend(_fstring_exprs(raw[i + 1 : end - 1], qpos))
                i = end
            continue
        if c in _OPENERS:
            buf[i] = c
            local_stack.append(c)
        elif c in _CLOSERS:
            buf[i] = c
            if local_stack:
                op = local_stack.pop()
                if _PAIR[op] != c:
                    inline.append(
                        ("mismatched-bracket", f"closing '{c}' does not match opening '{op}'")
                    )
            else:
                closes.append(c)
        else:
            buf[i] = c
        i += 1

    opens.extend(local_stack)
    code = "".join(buf)
    stripped = code.rstrip()
    ends_backslash = stripped.endswith("\\")
    if ends_backslash:
        stripped = stripped[:-1].rstrip()
        code = code[: len(stripped)] + " " * (len(code) - len(stripped))

    scan.exit_state = state
    scan.has_content = bool(stripped) or saw_string
    scan.code = code
    scan.closes = tuple(closes)
    scan.opens = tuple(opens)
    scan.last_char = stripped[-1:] if stripped else ""
    scan.ends_backslash = ends_backslash
    scan.inline_findings = tuple(inline)
    scan.fstrings = tuple(fstrings)
    return scan


def _add_fstring_uses(
    fstrings: Sequence[tuple[int, str]],
    toks: list[tuple[str, int]],
    uses: list[tuple[str, int]],
) -> None:
    if not fstrings:
        return
    starts = [s for _, s in toks]
    for pos, expr in fstrings:
        sub = 0
        while sub < len(starts) and starts[sub] < pos:
            sub += 1
        names: list[str] = []
        _fstring_names(expr, names)
        for name in names:
            uses.append((name, sub))


def _fstring_names(expr: str, out: list[str]) -> None:
    depth = 0
    cut = len(expr)
    for idx, ch in enumerate(expr):
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        elif depth == 0 and ch in ":!":
            if ch == "!" and expr[idx + 1 : idx + 2] == "=":
                continue
            cut = idx
            break
    toks = _tokens(expr[:cut])
    for i, (t, _) in enumerate(toks):
        if not _is_name(t):
            continue
        prev = toks[i - 1][0] if i else ""
        nxt = toks[i + 1][0] if i + 1 < len(toks) else ""
        if prev != "." and nxt != "=":
            out.append(t)
    for m in re.finditer(r"\{([^{}]*)\}", expr[cut:]):
        _fstring_names(m.group(1), out)


def _scan_expr(
    toks: list[tuple[str, int]],
    start: int,
    end: int,
    uses: list[tuple[str, int]],
    defs: list[tuple[str, int]],
    *,
    kwarg_any_depth: bool = False,
) -> None:
    """Generic expression/compound-statement scan of a token span."""
    depth = 0
    lambda_params: set[str] = set()
    in_lambda_params = False
    comp_target = False
    i = start
    while i < end:
        t = toks[i][0]
        if in_lambda_params:
            if t == ":":
                in_lambda_params = False
            elif _is_name(t):
                lambda_params.add(t)
            i += 1
            continue
        if t in _OPENERS:
            depth += 1
        elif t in _CLOSERS:
            depth -= 1
        elif t == "lambda":
            in_lambda_params = True
        elif t == "for":
            comp_target = True
        elif t == "in":
            comp_target = False
        elif _is_name(t):
            prev = toks[i - 1][0] if i > start else ""
            nxt = toks[i + 1][0] if i + 1 < end else ""
            if prev == ".":
                pass
            elif prev == "as":
                defs.append((t, i))
            elif nxt == ":=":
                defs.append((t, _LATE + i))
            elif comp_target:
                defs.append((t, -1))
            elif nxt == "=":
                if depth == 0 and not kwarg_any_depth:
                    defs.append((t, _LATE + i))
                # else: keyword argument, neither use nor def
            elif t in lambda_params:
                pass
            else:
                uses.append((t, i))
        i += 1


def _target_names(
    toks: list[tuple[str, int]],
    start: int,
    end: int,
    uses: list[tuple[str, int]],
    defs: list[tuple[str, int]],
) -> None:
    """Names of an assignment-target span: bare names bind, the rest are uses."""
    stack: list[bool] = []
    i = start
    while i < end:
        t = toks[i][0]
        if t in _OPENERS:
            prev = toks[i - 1][0] if i > start else ""
            call_like = t == "{" or (prev != "" and (_is_name(prev) or prev in ")]"))
            stack.append(call_like)
        elif t in _CLOSERS:
            if stack:
                stack.pop()
        elif _is_name(t):
            prev = toks[i - 1][0] if i > start else ""
            nxt = toks[i + 1][0] if i + 1 < end else ""
            if prev == ".":
                pass
            elif any(stack):
                if nxt != "=":
                    uses.append((t, i))
            elif nxt in (".", "(", "["):
                uses.append((t, i))
            else:
                defs.append((t, _LATE + i))
        i += 1


def _parse_import(toks: list[tuple[str, int]], defs: list[tuple[str, int]]) -> None:
    # import a.b as c, d.e  ->  binds c and d
    head: tuple[str, int] | None = None
    alias: tuple[str, int] | None = None
    expect_alias = False

    def emit() -> None:
        if alias is not None:
            defs.append(alias)
        elif head is not None:
            defs.append(head)

    for i in range(1, len(toks)):
        t = toks[i][0]
        if t == ",":
            emit()
            head = alias = None
            expect_alias = False
        elif t == "as":
            expect_alias = True
        elif _is_name(t):
            if expect_alias:
                alias = (t, i)
                expect_alias = False
            elif head is None:
                head = (t, i)
    emit()


def _parse_from_import(toks: list[tuple[str, int]], facts: NameFacts) -> None:
    # from pkg.mod import x, y as z   |   from mod import *   |   from mod import (
    try:
        imp = next(i for i, (t, _) in enumerate(toks) if t == "import")
    except StopIteration:
        return
    i = imp + 1
    while i < len(toks):
        t = toks[i][0]
        if t == "*":
            facts.star_import = True
        elif t == "(":
            facts.pending = "import"
        elif t == "as":
            if i + 1 < len(toks) and _is_name(toks[i + 1][0]):
                if facts.defs and facts.defs[-1][1] == i - 1:
                    facts.defs.pop()
                facts.defs.append((toks[i + 1][0], i + 1))
                i += 1
        elif _is_name(t):
            facts.defs.append((t, i))
        i += 1


def _import_cont(code: str) -> tuple[tuple, tuple]:
    toks = _tokens(code)
    defs: list[tuple[str, int]] = []
    for i, (t, _) in enumerate(toks):
        if not _is_name(t):
            continue
        nxt = toks[i + 1][0] if i + 1 < len(toks) else ""
        if nxt == "as":
            continue
        defs.append((t, i))
    return ((), tuple(defs))


def _def_cont(code: str, fstrings: Sequence[tuple[int, str]]) -> tuple[tuple, tuple]:
    """Continuation of a multi-line def header: params vs default/annotation uses."""
    toks = _tokens(code)
    uses: list[tuple[str, int]] = []
    params: list[tuple[str, int]] = []
    depth = 0
    mode = "param"
    for i, (t, _) in enumerate(toks):
        if t in _OPENERS:
            depth += 1
            continue
        if t in _CLOSERS:
            depth -= 1
            continue
        if depth < 0:
            # past the header's closing paren: return annotation etc.
            if _is_name(t) and (i == 0 or toks[i - 1][0] != "."):
                uses.append((t, i))
            continue
        if depth == 0:
            if t == ",":
                mode = "param"
            elif t == "=":
                mode = "default"
            elif t == ":":
                mode = "annotation"
            elif _is_name(t):
                if mode == "param":
                    params.append((t, i))
                elif i == 0 or toks[i - 1][0] != ".":
                    uses.append((t, i))
            continue
        if _is_name(t):
            prev = toks[i - 1][0] if i else ""
            nxt = toks[i + 1][0] if i + 1 < len(toks) else ""
            if prev != "." and nxt != "=":
                uses.append((t, i))
    _add_fstring_uses(fstrings, toks, uses)
    return (tuple(uses), tuple(params))


def _parse_def(
    toks: list[tuple[str, int]], start: int, facts: NameFacts
) -> None:
    i = start + 1
    if i >= len(toks) or not _is_name(toks[i][0]):
        return
    fname = toks[i][0]
    facts.defs.append((fname, i))
    facts.scope_kind = "function"
    facts.scope_name = fname
    params: list[str] = []
    i += 1
    closed = True
    if i < len(toks) and toks[i][0] == "(":
        depth = 1
        mode = "param"
        i += 1
        closed = False
        while i < len(toks):
            t = toks[i][0]
            if t in _OPENERS:
                depth += 1
            elif t in _CLOSERS:
                depth -= 1
                if depth == 0:
                    closed = True
                    i += 1
                    break
            elif depth == 1:
                if t == ",":
                    mode = "param"
                elif t == "=":
                    mode = "default"
                elif t == ":":
                    mode = "annotation"
                elif _is_name(t):
                    if mode == "param":
                        params.append(t)
                    elif toks[i - 1][0] != ".":
                        facts.uses.append((t, i))
            elif _is_name(t):
                prev = toks[i - 1][0]
                nxt = toks[i + 1][0] if i + 1 < len(toks) else ""
                if prev != "." and nxt != "=":
                    facts.uses.append((t, i))
            i += 1
        if not closed:
            facts.pending = "def"
    facts.scope_params = tuple(params)
    if not closed:
        return
    # return annotation up to the block colon, then a possible inline body
    colon = None
    depth = 0
    j = i
    while j < len(toks):
        t = toks[j][0]
        if t in _OPENERS:
            depth += 1
        elif t in _CLOSERS:
            depth -= 1
        elif t == ":" and depth == 0:
            colon = j
            break
        j += 1
    ann_end = colon if colon is not None else len(toks)
    for k in range(i, ann_end):
        t = toks[k][0]
        if _is_name(t) and toks[k - 1][0] != ".":
            facts.uses.append((t, k))
    if colon is not None and colon + 1 < len(toks):
        body_uses: list[tuple[str, int]] = []
        body_defs: list[tuple[str, int]] = []
        _scan_expr(toks, colon + 1, len(toks), body_uses, body_defs)
        pset = set(params)
        facts.uses.extend((n, s) for n, s in body_uses if n not in pset)
        facts.scope_kind = None
        facts.scope_name = None
        facts.scope_params = ()


def _parse_class(toks: list[tuple[str, int]], start: int, facts: NameFacts) -> None:
    i = start + 1
    if i >= len(toks) or not _is_name(toks[i][0]):
        return
    facts.defs.append((toks[i][0], i))
    facts.scope_kind = "class"
    facts.scope_name = toks[i][0]
    i += 1
    end = len(toks)
    if i < end and toks[i][0] == "(":
        depth = 0
        j = i
        while j < end:
            t = toks[j][0]
            if t in _OPENERS:
                depth += 1
            elif t in _CLOSERS:
                depth -= 1
                if depth == 0:
                    break
            j += 1
        _scan_expr(toks, i + 1, min(j, end), facts.uses, facts.defs, kwarg_any_depth=True)
        i = j + 1
    # inline body after the colon: treat like any expression, no new scope
    depth = 0
    while i < end:
        t = toks[i][0]
        if t in _OPENERS:
            depth += 1
        elif t in _CLOSERS:
            depth -= 1
        elif t == ":" and depth == 0:
            if i + 1 < end:
                _scan_expr(toks, i + 1, end, facts.uses, facts.defs)
                facts.scope_kind = None
                facts.scope_name = None
            break
        i += 1


def _parse_assignment(
    toks: list[tuple[str, int]], facts: NameFacts
) -> bool:
    depth = 0
    eq_positions: list[int] = []
    aug_pos = None
    for i, (t, _) in enumerate(toks):
        if t in _OPENERS:
            depth += 1
        elif t in _CLOSERS:
            depth -= 1
        elif depth == 0:
            if t == "=":
                eq_positions.append(i)
            elif t in _AUG_OPS and aug_pos is None:
                aug_pos = i
    if aug_pos is not None and (not eq_positions or aug_pos < eq_positions[0]):
        tgt_uses: list[tuple[str, int]] = []
        tgt_defs: list[tuple[str, int]] = []
        _target_names(toks, 0, aug_pos, tgt_uses, tgt_defs)
        facts.uses.extend(tgt_uses)
        for name, sub in tgt_defs:
            # an augmented target is read before it is rebound
            facts.uses.append((name, sub - _LATE))
            facts.defs.append((name, sub))
        _scan_expr(toks, aug_pos + 1, len(toks), facts.uses, facts.defs)
        return True
    if not eq_positions:
        return False
    _scan_expr(toks, eq_positions[-1] + 1, len(toks), facts.uses, facts.defs)
    seg_start = 0
    for eq in eq_positions:
        # optional annotation: target [: annotation] = value
        colon = None
        d = 0
        for k in range(seg_start, eq):
            t = toks[k][0]
            if t in _OPENERS:
                d += 1
            elif t in _CLOSERS:
                d -= 1
            elif t == ":" and d == 0:
                colon = k
                break
        tgt_end = colon if colon is not None else eq
        _target_names(toks, seg_start, tgt_end, facts.uses, facts.defs)
        if colon is not None:
            _scan_expr(toks, colon + 1, eq, facts.uses, facts.defs)
        seg_start = eq + 1
    return True


def _classify_fresh(code: str, fstrings: Sequence[tuple[int, str]]) -> NameFacts:
    facts = NameFacts()
    toks = _tokens(code)
    if not toks:
        _add_fstring_uses(fstrings, toks, facts.uses)
        return facts
    facts.first_word = toks[0][0]
    first = toks[0][0]
    start = 0
    if first == "async" and len(toks) > 1:
        start = 1
        first = toks[1][0]
        facts.first_word = "async " + first
    if first == "import":
        _parse_import(toks[start:], facts.defs)
    elif first == "from":
        _parse_from_import(toks[start:], facts)
    elif first in ("global", "nonlocal"):
        for t, _ in toks[start + 1 :]:
            if _is_name(t):
                facts.defs.append((t, -1))
    elif first == "def":
        _parse_def(toks, start, facts)
    elif first == "class":
        _parse_class(toks, start, facts)
    elif first in ("match", "case") and toks[-1][0] == ":":
        pass  # soft-keyword headers are opaque to the surface checker
    elif first == "@":
        _scan_expr(toks, start + 1, len(toks), facts.uses, facts.defs)
    elif first in _KEYWORDS:
        _scan_expr(toks, start, len(toks), facts.uses, facts.defs)
    elif not _parse_assignment(toks, facts):
        _scan_expr(toks, start, len(toks), facts.uses, facts.defs)
    _add_fstring_uses(fstrings, toks, facts.uses)
    return facts


class _Scope:
    __slots__ = ("kind", "parent", "defs", "star")

    def __init__(self, kind: str, parent: "_Scope | None") -> None:
        self.kind = kind
        self.parent = parent
        self.defs: dict[str, tuple[int, int]] = {}
        self.star = False


def _define(scope: _Scope, name: str, pos: tuple[int, int]) -> None:
    cur = scope.defs.get(name)
    if cur is None or pos < cur:
        scope.defs[name] = pos


def _resolvable(scope: _Scope, name: str, use_pos: tuple[int, int]) -> bool:
    if name in _BUILTINS:
        return True
    s: _Scope | None = scope
    passed_function = False
    while s is not None:
        if s.kind == "class" and s is not scope:
            s = s.parent
            continue
        if s.star:
            return True
        dp = s.defs.get(name)
        if dp is not None and (passed_function or dp < use_pos):
            return True
        if s.kind == "function":
            passed_function = True
        s = s.parent
    return False


class Analysis:
    """Scan cache for one source program's lines."""

    __slots__ = ("lines", "_scans", "_specials")

    def __init__(self, lines: Sequence[str]) -> None:
        self.lines = list(lines)
        self._scans: dict[tuple[int, str], LineScan] = {}
        self._specials: dict[tuple[int, str, str], tuple[tuple, tuple]] = {}

    def scan(self, idx: int, entry: str) -> LineScan:
        key = (idx, entry)
        f = self._scans.get(key)
        if f is None:
            f = scan_line(self.lines[idx], entry)
            self._scans[key] = f
        return f

    def special(self, idx: int, entry: str, mode: str) -> tuple[tuple, tuple]:
        key = (idx, entry, mode)
        r = self._specials.get(key)
        if r is None:
            f = self.scan(idx, entry)
            if mode == "import":
                r = _import_cont(f.code)
            else:
                r = _def_cont(f.code, f.fstrings)
            self._specials[key] = r
        return r


def flow(analysis: Analysis, kept: Iterable[int]) -> list[tuple[int, str, str]]:
    """Check the program formed by the given source-line indices.

    Returns sorted (line, code, message) findings; line numbers are
    1-based positions within the checked subset.
    """
    findings: set[tuple[int, str, str]] = set()
    add = findings.add
    sstate = ""
    string_open = 0
    brackets: list[tuple[str, int]] = []
    levels: list[tuple[int, bool]] = [(0, False)]
    module = _Scope("module", None)
    scope = module
    uses: list[tuple[_Scope, str, tuple[int, int], int]] = []
    expect_block = False
    opener_line = 0
    opener_word = ""
    pending_scope: _Scope | None = None
    pending_mode: str | None = None
    logical_open = False
    logical_start = 0
    logical_last = ""
    logical_first = ""

    for cand_no, idx in enumerate(kept, 1):
        entry = sstate
        f = analysis.scan(idx, entry)
        sstate = f.exit_state
        for fcode, fmsg in f.inline_findings:
            add((cand_no, fcode, fmsg))
        if entry == "" and sstate != "":
            string_open = cand_no
        if not f.has_content:
            continue

        if not logical_open:
            logical_start = cand_no
            nf = f.fresh_facts()
            logical_first = nf.first_word
            ind = f.indent
            pushed = False
            if expect_block:
                if ind > levels[-1][0]:
                    levels.append((ind, pending_scope is not None))
                    if pending_scope is not None:
                        scope = pending_scope
                    pushed = True
                else:
                    add(
                        (
                            opener_line,
                            "missing-block-body",
                            f"expected an indented block after '{opener_word}'",
                        )
                    )
                expect_block = False
                pending_scope = None
            if ind > levels[-1][0]:
                if not pushed:
                    add((cand_no, "unexpected-indent", "unexpected indent"))
                    levels.append((ind, False))
            elif ind < levels[-1][0]:
                while ind < levels[-1][0]:
                    _, owns = levels.pop()
                    if owns and scope.parent is not None:
                        scope = scope.parent
                if ind != levels[-1][0]:
                    add(
                        (
                            cand_no,
                            "inconsistent-dedent",
                            "dedent does not match any outer indentation level",
                        )
                    )
                    levels.append((ind, False))
            for name, sub in nf.defs:
                _define(scope, name, (cand_no, sub))
            for name, sub in nf.uses:
                uses.append((scope, name, (cand_no, sub), cand_no))
            if nf.star_import:
                scope.star = True
            if nf.scope_kind is not None:
                pending_scope = _Scope(nf.scope_kind, scope)
                for p in nf.scope_params:
                    _define(pending_scope, p, (cand_no, 0))
            pending_mode = nf.pending
        else:
            if pending_mode == "import":
                cu, cd = analysis.special(idx, entry, "import")
                for name, sub in cd:
                    _define(scope, name, (cand_no, sub))
                for name, sub in cu:
                    uses.append((scope, name, (cand_no, sub), cand_no))
            elif pending_mode == "def" and pending_scope is not None:
                cu, cp = analysis.special(idx, entry, "def")
                for name, sub in cp:
                    _define(pending_scope, name, (cand_no, sub))
                for name, sub in cu:
                    uses.append((scope, name, (cand_no, sub), cand_no))
            else:
                cu, cd = f.cont_facts()
                for name, sub in cd:
                    _define(scope, name, (cand_no, sub))
                for name, sub in cu:
                    uses.append((scope, name, (cand_no, sub), cand_no))

        for ch in f.closes:
            if brackets:
                op, _ln = brackets.pop()
                if _PAIR[op] != ch:
                    add(
                        (
                            cand_no,
                            "mismatched-bracket",
                            f"closing '{ch}' does not match opening '{op}'",
                        )
                    )
            else:
                add((cand_no, "unmatched-close", f"unmatched '{ch}'"))
        for ch in f.opens:
            brackets.append((ch, cand_no))

        if f.last_char:
            logical_last = f.last_char
        ended = sstate == "" and not f.ends_backslash and not brackets
        if ended:
            if logical_last == ":":
                expect_block = True
                opener_line = logical_start
                opener_word = logical_first or "statement"
            if not expect_block:
                pending_scope = None
            pending_mode = None
            logical_last = ""
        logical_open = not ended

    if expect_block:
        add(
            (
                opener_line,
                "missing-block-body",
                f"expected an indented block after '{opener_word}'",
            )
        )
    if sstate != "":
        add((string_open, "unterminated-string", "unterminated triple-quoted string"))
    for ch, ln in brackets:
        add((ln, "unclosed-bracket", f"unclosed '{ch}'"))
    for sc, name, pos, line in uses:
        if not _resolvable(sc, name, pos):
            add((line, "undefined-name", f"undefined name '{name}'"))
    return sorted(findings)


def check_lines(lines: Sequence[str]) -> list[tuple[int, str, str]]:
    return flow(Analysis(lines), range(len(lines)))
