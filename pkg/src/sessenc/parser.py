"""Recursive-descent parsers for types and processes of both calculi.

Grammar summary (``--`` starts a comment)::

    session types  end | !T.S | ?T.S | +{l:S, ...} | &{l:S, ...} | rec X.S | X | ~X
    types          S | #T | unit
    pi types       empty[] | #[T,...] | li[T,...] | lo[T,...] | l#[T,...]
                   | <l:T, ...> | rec X.T | X | ~X | unit
    session procs  x!v.P | x?(y:T).P | sel x l.P | bra x {l:P, ...} | P | Q
                   | (new x y:S)P | (newc a:T)P | *P | 0
    pi procs       x!(v,...).P | x?(y,...).P | case v of {l(x) => P, ...}
                   | (new a:T)P | *P | 0

``|`` is right-associative and binds looser than every prefix; a
restriction's scope extends as far right as possible.  Program files
may start with ``type NAME = <type>`` lines whose names are expanded wherever
they appear in type position.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping

from .syntax import (
    Branch, Branching, Case, Chan, ChanRes, Conn, End, Input, LinConn, LinIn, LinOut,
    Name, Nil, NoCap, Output, Par, PInput, POutput, PRes, Rec, Recv, Repl, Select,
    Selection, Send, SessRes, SyntaxError_, TVar, Unit, UnitVal, Variant, VariantVal,
    free_type_vars, is_guarded,
)


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int
    line: int
    column: int


class ParseError(Exception):
    def __init__(self, message: str, span: SourceSpan, expected: frozenset = frozenset()):
        self.message = message
        self.span = span
        self.expected = expected
        where = f"line {span.line}, column {span.column}"
        hint = f" (expected one of: {', '.join(sorted(expected))})" if expected else ""
        super().__init__(f"{where}: {message}{hint}")


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|--[^\n]*)
  | (?P<lsharp>l\#(?=\s*\[))
  | (?P<arrow>=>)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<num>[0-9]+)
  | (?P<sym>[!?.+&{}()\[\]<>:,|*~#=])
    """,
    re.VERBOSE,
)

KEYWORDS = {"end", "rec", "unit", "sel", "bra", "new", "newc", "case", "of", "empty", "li", "lo", "type"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    start: int
    end: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", _span(text, pos, pos + 1))
        kind = m.lastgroup
        if kind != "ws":
            tok = m.group()
            out.append(Token("sym" if kind in ("lsharp", "arrow") else kind, tok, m.start(), m.end()))
        pos = m.end()
    out.append(Token("eof", "", len(text), len(text)))
    return out


def _span(text: str, start: int, end: int) -> SourceSpan:
    line = text.count("\n", 0, start) + 1
    col = start - (text.rfind("\n", 0, start) + 1) + 1
    return SourceSpan(start, end, line, col)


class _Parser:
    def __init__(self, text: str, aliases: Mapping | None = None):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.aliases = dict(aliases or {})

    # -- token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str, expected=()) -> ParseError:
        t = self.tok
        return ParseError(msg, _span(self.text, t.start, t.end), frozenset(expected))

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind != "eof"

    def eat(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"found {found!r}", [text])
        t = self.tok
        self.i += 1
        return t

    def ident(self, what: str = "identifier") -> str:
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS:
            raise self.error(f"expected {what}, found {t.text or 'end of input'!r}", [what])
        self.i += 1
        return t.text

    def label(self) -> str:
        t = self.tok
        if t.kind not in ("ident", "num"):
            raise self.error(f"expected label, found {t.text!r}", ["label"])
        self.i += 1
        return t.text

    def done(self):
        if self.tok.kind != "eof":
            raise self.error(f"trailing input {self.tok.text!r}", ["end of input"])

    def labelled(self, close: str, item):
        pairs = []
        start = self.tok
        while True:
            pairs.append(item())
            if self.at(","):
                self.eat(",")
                continue
            break
        self.eat(close)
        try:
            labels = [lab for lab, _ in pairs]
            if len(set(labels)) != len(labels):
                raise SyntaxError_("duplicate labels")
        except SyntaxError_ as exc:
            raise ParseError(str(exc), _span(self.text, start.start, self.tok.start)) from None
        return pairs

    # -- session-calculus types
    def stype(self, bound: frozenset = frozenset()):
        t = self.tok
        if self.at("!") or self.at("?"):
            self.i += 1
            carried = self.satom(bound)
            self.eat(".")
            cont = self.stype(bound)
            return (Send if t.text == "!" else Recv)(carried, cont)
        if self.at("rec"):
            self.eat("rec")
            var = self.ident("type variable")
            self.eat(".")
            return Rec(var, self.stype(bound | {var}))
        return self.satom(bound)

    def satom(self, bound: frozenset):
        t = self.tok
        if self.at("end"):
            self.i += 1
            return End()
        if self.at("unit"):
            self.i += 1
            return Unit()
        if self.at("+") or self.at("&"):
            self.i += 1
            self.eat("{")

            def item():
                lab = self.label()
                self.eat(":")
                return lab, self.stype(bound)

            pairs = self.labelled("}", item)
            return (Select if t.text == "+" else Branch)(pairs)
        if self.at("#"):
            self.i += 1
            return Chan(self.satom(bound))
        if self.at("~"):
            self.i += 1
            return TVar(self.ident("type variable"), True)
        if self.at("("):
            self.eat("(")
            inner = self.stype(bound)
            self.eat(")")
            return inner
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.i += 1
            if t.text not in bound and t.text in self.aliases:
                return self.aliases[t.text]
            return TVar(t.text)
        raise self.error(f"expected a type, found {t.text or 'end of input'!r}",
                         ["end", "unit", "!", "?", "+", "&", "#", "rec", "~", "(", "variable"])

    # -- pi types
    def ptype(self, bound: frozenset = frozenset()):
        t = self.tok
        if self.at("rec"):
            self.eat("rec")
            var = self.ident("type variable")
            self.eat(".")
            return Rec(var, self.ptype(bound | {var}))
        if self.at("empty"):
            self.i += 1
            self.eat("[")
            self.eat("]")
            return NoCap()
        if self.at("unit"):
            self.i += 1
            return Unit()
        heads = {"#": Conn, "li": LinIn, "lo": LinOut, "l#": LinConn}
        if t.text in heads and self.peek().text == "[":
            self.i += 1
            self.eat("[")
            items = []
            if not self.at("]"):
                items.append(self.ptype(bound))
                while self.at(","):
                    self.eat(",")
                    items.append(self.ptype(bound))
            self.eat("]")
            return heads[t.text](tuple(items))
        if self.at("<"):
            self.eat("<")

            def item():
                lab = self.label()
                self.eat(":")
                return lab, self.ptype(bound)

            return Variant(self.labelled(">", item))
        if self.at("~"):
            self.i += 1
            return TVar(self.ident("type variable"), True)
        if self.at("("):
            self.eat("(")
            inner = self.ptype(bound)
            self.eat(")")
            return inner
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.i += 1
            if t.text not in bound and t.text in self.aliases:
                return self.aliases[t.text]
            return TVar(t.text)
        raise self.error(f"expected a pi type, found {t.text or 'end of input'!r}",
                         ["empty", "#", "li", "lo", "l#", "<", "rec", "unit", "~", "(", "variable"])

    # -- session processes
    def sproc(self):
        left = self.sprefix()
        if self.at("|"):
            self.eat("|")
            return Par(left, self.sproc())
        return left

    def sprefix(self):
        t = self.tok
        if self.at("0"):
            self.i += 1
            return Nil()
        if self.at("*"):
            self.i += 1
            return Repl(self.sprefix())
        if self.at("sel"):
            self.i += 1
            x = self.ident("channel")
            lab = self.label()
            self.eat(".")
            return Selection(x, lab, self.sprefix())
        if self.at("bra"):
            self.i += 1
            x = self.ident("channel")
            self.eat("{")

            def item():
                lab = self.label()
                self.eat(":")
                return lab, self.sproc()

            return Branching(x, self.labelled("}", item))
        if self.at("("):
            nxt = self.peek().text
            if nxt == "new":
                self.eat("(")
                self.eat("new")
                x = self.ident("channel")
                y = self.ident("channel")
                if x == y:
                    raise self.error("co-variables must be distinct")
                self.eat(":")
                annot = self.type_checked(self.stype)
                self.eat(")")
                return SessRes(x, y, annot, self.sproc())
            if nxt == "newc":
                self.eat("(")
                self.eat("newc")
                a = self.ident("channel")
                self.eat(":")
                annot = self.type_checked(self.stype)
                self.eat(")")
                return ChanRes(a, annot, self.sproc())
            self.eat("(")
            inner = self.sproc()
            self.eat(")")
            return inner
        if t.kind == "ident" and t.text not in KEYWORDS:
            x = self.ident()
            if self.at("!"):
                self.eat("!")
                v = self.svalue()
                self.eat(".")
                return Output(x, v, self.sprefix())
            if self.at("?"):
                self.eat("?")
                self.eat("(")
                y = self.ident("binder")
                self.eat(":")
                annot = self.type_checked(self.stype)
                self.eat(")")
                self.eat(".")
                return Input(x, y, annot, self.sprefix())
            raise self.error("expected '!' or '?' after channel", ["!", "?"])
        raise self.error(f"expected a process, found {t.text or 'end of input'!r}",
                         ["0", "*", "sel", "bra", "(", "channel"])

    def svalue(self):
        if self.at("("):
            self.eat("(")
            self.eat(")")
            return UnitVal()
        return Name(self.ident("value"))

    # -- pi processes
    def pproc(self):
        left = self.pprefix()
        if self.at("|"):
            self.eat("|")
            return Par(left, self.pproc())
        return left

    def pprefix(self):
        t = self.tok
        if self.at("0"):
            self.i += 1
            return Nil()
        if self.at("*"):
            self.i += 1
            return Repl(self.pprefix())
        if self.at("case"):
            self.i += 1
            v = self.pvalue()
            self.eat("of")
            self.eat("{")

            def item():
                lab = self.label()
                self.eat("(")
                x = self.ident("binder")
                self.eat(")")
                self.eat("=>")
                return lab, (x, self.pproc())

            return Case(v, self.labelled("}", item))
        if self.at("("):
            if self.peek().text == "new":
                self.eat("(")
                self.eat("new")
                a = self.ident("channel")
                self.eat(":")
                annot = self.type_checked(self.ptype)
                self.eat(")")
                return PRes(a, annot, self.pproc())
            self.eat("(")
            inner = self.pproc()
            self.eat(")")
            return inner
        if t.kind == "ident" and t.text not in KEYWORDS:
            x = self.ident()
            if self.at("!"):
                self.eat("!")
                self.eat("(")
                vals = []
                if not self.at(")"):
                    vals.append(self.pvalue())
                    while self.at(","):
                        self.eat(",")
                        vals.append(self.pvalue())
                self.eat(")")
                self.eat(".")
                return POutput(x, tuple(vals), self.pprefix())
            if self.at("?"):
                self.eat("?")
                self.eat("(")
                ys = []
                if not self.at(")"):
                    ys.append(self.ident("binder"))
                    while self.at(","):
                        self.eat(",")
                        ys.append(self.ident("binder"))
                self.eat(")")
                self.eat(".")
                return PInput(x, tuple(ys), self.pprefix())
            raise self.error("expected '!' or '?' after channel", ["!", "?"])
        raise self.error(f"expected a process, found {t.text or 'end of input'!r}",
                         ["0", "*", "case", "(", "channel"])

    def pvalue(self):
        if self.at("("):
            self.eat("(")
            self.eat(")")
            return UnitVal()
        x = self.ident("value")
        if self.at("("):
            self.eat("(")
            inner = self.pvalue()
            self.eat(")")
            return VariantVal(x, inner)
        return Name(x)

    # -- checks
    def type_checked(self, rule, require_closed: bool = True):
        start = self.tok.start
        t = rule()
        span = _span(self.text, start, self.toks[self.i - 1].end)
        if not is_guarded(t):
            raise ParseError("unguarded recursive type", span)
        if require_closed and free_type_vars(t):
            names = ", ".join(sorted(free_type_vars(t)))
            raise ParseError(f"free type variable(s) {names} in annotation", span)
        return t

    def aliases_block(self, rule):
        while self.at("type"):
            self.eat("type")
            name = self.ident("alias name")
            self.eat("=")
            self.aliases[name] = self.type_checked(rule)


def _run(text, method, aliases=None, check_type=False):
    p = _Parser(text, aliases)
    try:
        if check_type:
            node = p.type_checked(getattr(p, method), require_closed=False)
        else:
            node = getattr(p, method)()
        p.done()
    except SyntaxError_ as exc:
        raise ParseError(str(exc), _span(text, 0, len(text))) from None
    return node


def parse_session_type(text: str, aliases: Mapping | None = None):
    """Parse a session-calculus type (session, channel or unit)."""
    return _run(text, "stype", aliases, check_type=True)


def parse_pi_type(text: str, aliases: Mapping | None = None):
    return _run(text, "ptype", aliases, check_type=True)


def parse_session_process(text: str, aliases: Mapping | None = None):
    p = _Parser(text, aliases)
    p.aliases_block(p.stype)
    node = p.sproc()
    p.done()
    return node


def parse_pi_process(text: str, aliases: Mapping | None = None):
    p = _Parser(text, aliases)
    p.aliases_block(p.ptype)
    node = p.pproc()
    p.done()
    return node


def load_program(path):
    """Read a ``.spi`` (session) or ``.pi`` (linear pi) file; returns ``(calculus, process)``."""
    from pathlib import Path

    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".spi":
        return "session", parse_session_process(text)
    if path.suffix == ".pi":
        return "pi", parse_pi_process(text)
    raise ValueError(f"unknown program extension {path.suffix!r}; use .spi or .pi")


def parse_context(text: str, pi: bool = False) -> dict:
    """Parse ``x:T; y:S`` into a typing context; an empty string is the empty context."""
    out = {}
    for entry in filter(None, (e.strip() for e in text.split(";"))):
        name, sep, ty = entry.partition(":")
        if not sep or not name.strip().isidentifier():
            raise ParseError(f"context entry {entry!r} is not of the form name:type",
                             _span(text, 0, len(text)))
        out[name.strip()] = (parse_pi_type if pi else parse_session_type)(ty)
    return out
