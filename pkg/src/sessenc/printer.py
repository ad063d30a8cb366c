"""Canonical concrete syntax for every AST node; the inverse of :mod:`sessenc.parser`."""

from __future__ import annotations

from .syntax import (
    Branch, Branching, Case, Chan, ChanRes, Conn, End, Hole, Input, LinConn, LinIn, LinOut,
    Name, Nil, NoCap, Output, Par, PInput, POutput, PRes, Rec, Recv, Repl, Select,
    Selection, Send, SessRes, TVar, Unit, UnitVal, Variant, VariantVal,
)


def pretty_type(t) -> str:
    if isinstance(t, End):
        return "end"
    if isinstance(t, Unit):
        return "unit"
    if isinstance(t, TVar):
        return ("~" if t.dual else "") + t.name
    if isinstance(t, Rec):
        return f"rec {t.var}.{pretty_type(t.body)}"
    if isinstance(t, Send):
        return f"!{_atom(t.carried)}.{pretty_type(t.cont)}"
    if isinstance(t, Recv):
        return f"?{_atom(t.carried)}.{pretty_type(t.cont)}"
    if isinstance(t, Select):
        return "+{" + ", ".join(f"{lab}:{pretty_type(s)}" for lab, s in t.branches) + "}"
    if isinstance(t, Branch):
        return "&{" + ", ".join(f"{lab}:{pretty_type(s)}" for lab, s in t.branches) + "}"
    if isinstance(t, Chan):
        return "#" + _atom(t.carried)
    if isinstance(t, NoCap):
        return "empty[]"
    if isinstance(t, (Conn, LinIn, LinOut, LinConn)):
        head = {Conn: "#", LinIn: "li", LinOut: "lo", LinConn: "l#"}[type(t)]
        return head + "[" + ", ".join(pretty_type(s) for s in t.carried) + "]"
    if isinstance(t, Variant):
        return "<" + ", ".join(f"{lab}:{pretty_type(s)}" for lab, s in t.cases) + ">"
    raise TypeError(f"not a type: {t!r}")


def _atom(t) -> str:
    # Carried positions and channel payloads of `#` take atomic types only.
    text = pretty_type(t)
    if isinstance(t, (Send, Recv, Rec, Chan)):
        return f"({text})"
    return text


def pretty_value(v) -> str:
    if isinstance(v, Name):
        return v.name
    if isinstance(v, UnitVal):
        return "()"
    if isinstance(v, VariantVal):
        return f"{v.label}({pretty_value(v.payload)})"
    raise TypeError(f"not a value: {v!r}")


def pretty_process(p, tail: bool = True) -> str:
    """Print a process.  ``tail`` is true where the parser reads greedily to the end."""
    if isinstance(p, Par):
        text = f"{pretty_process(p.left, False)} | {pretty_process(p.right, True)}"
        return text if tail else f"({text})"
    if isinstance(p, (SessRes, ChanRes, PRes)):
        if isinstance(p, SessRes):
            head = f"(new {p.x} {p.y}:{pretty_type(p.annot)})"
        elif isinstance(p, ChanRes):
            head = f"(newc {p.name}:{pretty_type(p.annot)})"
        else:
            head = f"(new {p.name}:{pretty_type(p.annot)})"
        text = head + pretty_process(p.body, True)
        return text if tail else f"({text})"
    return _prefix(p)


def _prefix(p) -> str:
    if isinstance(p, Nil):
        return "0"
    if isinstance(p, Hole):
        return "[]"
    if isinstance(p, Repl):
        return "*" + pretty_process(p.body, False)
    if isinstance(p, Output):
        return f"{p.subject}!{pretty_value(p.payload)}.{pretty_process(p.cont, False)}"
    if isinstance(p, Input):
        return f"{p.subject}?({p.binder}:{pretty_type(p.annot)}).{pretty_process(p.cont, False)}"
    if isinstance(p, Selection):
        return f"sel {p.subject} {p.label}.{pretty_process(p.cont, False)}"
    if isinstance(p, Branching):
        arms = ", ".join(f"{lab}: {pretty_process(q)}" for lab, q in p.arms)
        return f"bra {p.subject} {{{arms}}}"
    if isinstance(p, POutput):
        vals = ", ".join(pretty_value(v) for v in p.payloads)
        return f"{p.subject}!({vals}).{pretty_process(p.cont, False)}"
    if isinstance(p, PInput):
        return f"{p.subject}?({', '.join(p.binders)}).{pretty_process(p.cont, False)}"
    if isinstance(p, Case):
        arms = ", ".join(f"{lab}({x}) => {pretty_process(q)}" for lab, (x, q) in p.arms)
        return f"case {pretty_value(p.scrutinee)} of {{{arms}}}"
    raise TypeError(f"not a process: {p!r}")


def pretty(node) -> str:
    """Print any type, value or process in the concrete syntax the parser reads."""
    if isinstance(node, (Name, UnitVal, VariantVal)):
        return pretty_value(node)
    try:
        return pretty_type(node)
    except TypeError:
        return pretty_process(node)
