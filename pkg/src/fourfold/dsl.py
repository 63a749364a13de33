"""Parser for construction scripts.

One statement per line; ``#`` starts a comment.  Grammar::

    script    := { line }
    line      := [ stmt ] [ "#" comment ] NEWLINE
    stmt      := "let" ID "=" mexpr
               | "fam" ID "=" fexpr
               | "eval" ID [ "ell" "=" INT ".." INT ]
               | "certify" ID { "," ID }
               | "check" ID
               | "rewrite" ID
               | "export" ID PATH
    mexpr     := "E" "(" INT ")" | "P" "(" INT ")"
               | "S2xS2" | "CP2" | "CP2bar" | "S4"
               | "logt" "(" ID "," "nucleus" "=" LABEL "," "p" "=" INT ")"
               | "csum" "(" ID "," ID ")"
               | "fsum" "(" ID "," ID "," LABEL "," LABEL ")"
               | "Z" "(" "p" "=" INT "," "r" "=" INT "," "s" "=" INT [ "," "v" "=" ID ] ")"
               | "load" "(" STRING ")"
    fexpr     := "base" "(" "q" "=" INT ")" "on" ID
               | "suspend" "(" ID ")"
               | "commstep" "(" ID [ "," "block" "=" LABEL ] ")"
               | "compose" "(" ID "," ID ")"
               | "alpha" "(" "p" "=" INT "," "q" "=" INT [ "," "r" "=" INT ] [ "," "s" "=" INT ] ")"
               | "load" "(" STRING ")"
    LABEL     := INT | ID
    PATH      := STRING | non-blank text

Keyword arguments may appear in any order.  Names are bound once and
must be bound before use; models and families live in one namespace.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import FourfoldError


@dataclass(frozen=True)
class Span:
    line: int
    col: int
    end: int = 0

    def __str__(self):
        return f"{self.line}:{self.col}"


class ParseError(FourfoldError, ValueError):
    def __init__(self, message: str, span: Span):
        super().__init__(f"{span}: {message}")
        self.message = message
        self.span = span


class ScriptError(FourfoldError):
    """An execution failure, tied to the statement that raised it."""

    def __init__(self, span: Span, error: Exception, text: str = ""):
        super().__init__(f"{span}: {type(error).__name__}: {error}")
        self.span = span
        self.error = error
        self.text = text


@dataclass(frozen=True)
class Arg:
    value: object
    kind: str  # int | id | range | string
    span: Span
    key: str | None = None


@dataclass(frozen=True)
class Call:
    head: str
    args: tuple[Arg, ...]
    span: Span
    on: Arg | None = None

    def positional(self) -> list[Arg]:
        return [a for a in self.args if a.key is None]

    def kw(self, key, default=None):
        for a in self.args:
            if a.key == key:
                return a.value
        return default


@dataclass(frozen=True)
class Statement:
    kind: str  # let | fam | eval | certify | check | rewrite | export
    span: Span
    text: str
    name: str | None = None
    expr: Call | None = None
    targets: tuple[str, ...] = ()
    ell: tuple[int, int] | None = None
    path: str | None = None


@dataclass
class Script:
    statements: list[Statement] = field(default_factory=list)
    source: str = ""


_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t]+)
  | (?P<comment>\#.*)
  | (?P<string>"[^"\n]*")
  | (?P<range>-?\d+\.\.-?\d+)
  | (?P<int>-?\d+)
  | (?P<id>[A-Za-z_][A-Za-z0-9_'.]*)
  | (?P<punct>[(),=])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Tok:
    kind: str
    text: str
    span: Span


def tokenize_line(text: str, lineno: int) -> list[Tok]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", Span(lineno, pos + 1, pos + 2))
        kind = m.lastgroup
        if kind == "comment":
            break
        if kind != "ws":
            out.append(Tok(kind, m.group(), Span(lineno, pos + 1, m.end() + 1)))
        pos = m.end()
    return out


# head -> (positional kinds, required keywords, optional keywords)
MODEL_FORMS = {
    "E": (("int",), (), ()),
    "P": (("int",), (), ()),
    "S2xS2": None,
    "CP2": None,
    "CP2bar": None,
    "S4": None,
    "logt": (("model",), ("nucleus", "p"), ()),
    "csum": (("model", "model"), (), ()),
    "fsum": (("model", "model", "label", "label"), (), ()),
    "Z": ((), ("p", "r", "s"), ("v",)),
    "load": (("string",), (), ()),
}
FAMILY_FORMS = {
    "base": ((), ("q",), ()),
    "suspend": (("family",), (), ()),
    "commstep": (("family",), (), ("block",)),
    "compose": (("family", "family"), (), ()),
    "alpha": ((), ("p", "q"), ("r", "s", "v")),
    "load": (("string",), (), ()),
}
INT_KEYS = {"p", "q", "r", "s"}


class _Cursor:
    def __init__(self, toks: list[Tok], lineno: int, linelen: int):
        self.toks = toks
        self.i = 0
        self.eol = Span(lineno, linelen + 1, linelen + 2)

    def peek(self) -> Tok | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self, what: str) -> Tok:
        t = self.peek()
        if t is None:
            raise ParseError(f"expected {what}, found end of line", self.eol)
        self.i += 1
        return t

    def expect(self, kind: str, text: str | None = None) -> Tok:
        t = self.next(repr(text) if text else kind)
        if t.kind != kind or (text is not None and t.text != text):
            raise ParseError(f"expected {text or kind}, found {t.text!r}", t.span)
        return t

    def accept(self, text: str) -> bool:
        t = self.peek()
        if t is not None and t.kind == "punct" and t.text == text:
            self.i += 1
            return True
        return False

    def done(self) -> None:
        t = self.peek()
        if t is not None:
            raise ParseError(f"unexpected {t.text!r}", t.span)


def _value(c: _Cursor, key: str | None) -> Arg:
    t = c.next("a value")
    if t.kind == "int":
        return Arg(int(t.text), "int", t.span, key)
    if t.kind == "id":
        return Arg(t.text, "id", t.span, key)
    if t.kind == "range":
        a, b = t.text.split("..")
        return Arg((int(a), int(b)), "range", t.span, key)
    if t.kind == "string":
        return Arg(t.text[1:-1], "string", t.span, key)
    raise ParseError(f"expected a value, found {t.text!r}", t.span)


def _call(c: _Cursor) -> Call:
    head = c.expect("id")
    args = []
    if c.accept("("):
        if not c.accept(")"):
            while True:
                t = c.peek()
                nxt = c.toks[c.i + 1] if c.i + 1 < len(c.toks) else None
                if t is not None and t.kind == "id" and nxt is not None and nxt.text == "=":
                    c.i += 2
                    args.append(_value(c, t.text))
                else:
                    args.append(_value(c, None))
                if c.accept(")"):
                    break
                c.expect("punct", ",")
    on = None
    t = c.peek()
    if t is not None and t.kind == "id" and t.text == "on":
        c.i += 1
        on = _value(c, "on")
    return Call(head.text, tuple(args), head.span, on)


class Parser:
    """Line-oriented parser with name resolution."""

    def __init__(self):
        self.kinds: dict[str, str] = {}

    def _ref(self, arg: Arg, want: str) -> None:
        if arg.kind != "id":
            raise ParseError(f"expected a {want} name, found {arg.value!r}", arg.span)
        have = self.kinds.get(arg.value)
        if have is None:
            raise ParseError(f"unknown identifier {arg.value!r}", arg.span)
        if have != want:
            raise ParseError(f"{arg.value!r} is a {have}, expected a {want}", arg.span)

    def _check_form(self, call: Call, forms: dict, what: str) -> None:
        if call.head not in forms:
            raise ParseError(f"unknown {what} constructor {call.head!r}", call.span)
        form = forms[call.head]
        if form is None:
            if call.args:
                raise ParseError(f"{call.head} takes no arguments", call.span)
            return
        pos_kinds, required, optional = form
        pos = call.positional()
        if len(pos) != len(pos_kinds):
            raise ParseError(
                f"{call.head} expects {len(pos_kinds)} positional argument(s), got {len(pos)}", call.span
            )
        for a, kind in zip(pos, pos_kinds):
            if kind in ("model", "family"):
                self._ref(a, kind)
            elif kind == "int" and a.kind != "int":
                raise ParseError(f"expected an integer, found {a.value!r}", a.span)
            elif kind == "label" and a.kind not in ("int", "id"):
                raise ParseError(f"expected a nucleus label, found {a.value!r}", a.span)
            elif kind == "string" and a.kind != "string":
                raise ParseError("expected a quoted path", a.span)
        keys = [a.key for a in call.args if a.key is not None]
        for k in keys:
            if k not in required and k not in optional:
                raise ParseError(f"{call.head} has no argument {k!r}", call.span)
            if keys.count(k) > 1:
                raise ParseError(f"argument {k!r} given twice", call.span)
        for k in required:
            if k not in keys:
                raise ParseError(f"{call.head} needs argument {k}=", call.span)
        for a in call.args:
            if a.key in INT_KEYS and a.kind != "int":
                raise ParseError(f"{a.key}= needs an integer", a.span)
        if call.head == "base":
            if call.on is None:
                raise ParseError("base(q=..) needs 'on <model>'", call.span)
            self._ref(call.on, "model")
        elif call.on is not None:
            raise ParseError("'on' is only used with base(...)", call.on.span)

    def _bind(self, tok: Tok, kind: str) -> None:
        if tok.text in self.kinds:
            raise ParseError(f"{tok.text!r} is already bound", tok.span)
        self.kinds[tok.text] = kind

    def statement(self, text: str, lineno: int) -> Statement | None:
        m = _EXPORT.match(text)
        if m:
            return self._export(m, text, lineno)
        toks = tokenize_line(text, lineno)
        if not toks:
            return None
        c = _Cursor(toks, lineno, len(text))
        kw = c.expect("id")
        span = kw.span
        src = text.strip()
        if kw.text in ("let", "fam"):
            name = c.expect("id")
            c.expect("punct", "=")
            call = _call(c)
            c.done()
            if kw.text == "let":
                self._check_form(call, MODEL_FORMS, "model")
                self._bind(name, "model")
            else:
                self._check_form(call, FAMILY_FORMS, "family")
                self._bind(name, "family")
            return Statement(kw.text, span, src, name=name.text, expr=call)
        if kw.text == "eval":
            target = c.expect("id")
            self._ref(Arg(target.text, "id", target.span), self.kinds.get(target.text, "model"))
            ell = None
            if c.peek() is not None:
                c.expect("id", "ell")
                c.expect("punct", "=")
                r = c.next("a range a..b")
                if r.kind != "range":
                    raise ParseError(f"expected a range a..b, found {r.text!r}", r.span)
                a, b = (int(x) for x in r.text.split(".."))
                if a > b:
                    raise ParseError("empty ell range", r.span)
                ell = (a, b)
            c.done()
            return Statement("eval", span, src, targets=(target.text,), ell=ell)
        if kw.text == "certify":
            names = [c.expect("id")]
            while c.accept(","):
                names.append(c.expect("id"))
            c.done()
            for t in names:
                self._ref(Arg(t.text, "id", t.span), "family")
            return Statement("certify", span, src, targets=tuple(t.text for t in names))
        if kw.text in ("check", "rewrite"):
            target = c.expect("id")
            c.done()
            want = "model" if kw.text == "rewrite" else self.kinds.get(target.text, "model")
            self._ref(Arg(target.text, "id", target.span), want)
            return Statement(kw.text, span, src, targets=(target.text,))
        raise ParseError(f"unknown statement {kw.text!r}", kw.span)

    def _export(self, m: re.Match, text: str, lineno: int) -> Statement:
        span = Span(lineno, m.start("kw") + 1, m.end("kw") + 1)
        name = m.group("name")
        if not name:
            raise ParseError("export needs a target name", Span(lineno, m.end("kw") + 1))
        tspan = Span(lineno, m.start("name") + 1, m.end("name") + 1)
        self._ref(Arg(name, "id", tspan), self.kinds.get(name, "model"))
        rest = m.group("path").strip()
        if rest.startswith('"'):
            if not rest.endswith('"') or len(rest) < 2:
                raise ParseError("unterminated string", Span(lineno, m.start("path") + 1))
            rest = rest[1:-1]
        else:
            rest = rest.split("#", 1)[0].strip()
        if not rest:
            raise ParseError("export needs a path", Span(lineno, len(text) + 1))
        return Statement("export", span, text.strip(), targets=(name,), path=rest)


_EXPORT = re.compile(r"[ \t]*(?P<kw>export)\b[ \t]*(?P<name>[A-Za-z_][A-Za-z0-9_'.]*)?(?P<path>.*)$")


def parse(text: str) -> Script:
    """Parse a whole script; raises :class:`ParseError` on the first problem."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"script is not UTF-8: {exc}", Span(1, 1)) from exc
    p = Parser()
    script = Script(source=text)
    for i, line in enumerate(text.splitlines(), start=1):
        st = p.statement(line, i)
        if st is not None:
            script.statements.append(st)
    return script
