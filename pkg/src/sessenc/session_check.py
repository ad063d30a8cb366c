"""Type checking for the session pi-calculus.

Contexts are split across ``|`` by usage and session endpoints advance along
their type at each prefix.  Replicated and terminated processes need an
unlimited context.  A session restriction types its second co-variable with
the complement of the annotation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .algebra import complement_session, dual_session, equiv, subtype, unfold
from .printer import pretty, pretty_type
from .syntax import (
    Branch, Branching, Chan, ChanRes, End, Input, Name, Nil, Output, Par, Recv, Repl, Select,
    Selection, Send, SessRes, Unit, UnitVal, free_names, is_session_type, well_formed,
)


class TypingError(Exception):
    """A failed typing judgement; ``kind`` names the violated discipline."""

    KINDS = ("unbound", "linearity", "subtype", "duality", "leftover", "shape", "annotation")

    def __init__(self, kind: str, message: str, process=None, types=()):
        assert kind in self.KINDS, kind
        self.kind = kind
        self.process = process
        self.types = tuple(types)
        super().__init__(f"{kind}: {message}")


@dataclass(frozen=True)
class SideCondition:
    relation: str  # "<=s", "=s", "dual", "un", "<=p", "=p"
    left: object
    right: object = None

    def __str__(self):
        show = lambda t: t if isinstance(t, str) else pretty(t)
        if self.relation == "un":
            return f"un({show(self.left)}:{show(self.right)})"
        sym = {"<=s": "≼s", "=s": "=s", "dual": "⊥s", "=p": "=p", "<=p": "≼p"}[self.relation]
        return f"{show(self.left)} {sym} {show(self.right)}"


@dataclass(frozen=True)
class Derivation:
    rule: str
    context: tuple
    subject: object
    side: tuple = ()
    premises: tuple = ()

    def rules(self) -> list[str]:
        """Rule names in pre-order."""
        out = [self.rule]
        for p in self.premises:
            out.extend(p.rules())
        return out

    def walk(self):
        yield self
        for p in self.premises:
            yield from p.walk()

    def render(self, indent: int = 0) -> str:
        ctx = ", ".join(f"{x}:{pretty_type(t)}" for x, t in self.context) or "∅"
        line = f"{'  ' * indent}[{self.rule}] {ctx} ⊢ {pretty(self.subject)}"
        if self.side:
            line += "    where " + "; ".join(str(s) for s in self.side)
        return "\n".join([line] + [p.render(indent + 1) for p in self.premises])

    def __str__(self):
        return self.render()


def is_unlimited(t) -> bool:
    """Unit, standard channel types and terminated sessions carry no obligation."""
    return isinstance(unfold(t), (Unit, Chan, End))


def _frozen(ctx: Mapping) -> tuple:
    return tuple(ctx.items())


def _lookup(ctx, x, p):
    if x not in ctx:
        raise TypingError("unbound", f"unbound variable {x!r}", p)
    return ctx[x]


def _value_ok(have, want) -> tuple[bool, SideCondition]:
    if is_session_type(have) or is_session_type(want):
        return subtype(have, want), SideCondition("<=s", have, want)
    return equiv(have, want), SideCondition("=s", have, want)


def check_value(ctx: Mapping, v, t) -> SideCondition | None:
    """Check ``ctx ⊢ v : t``; returns the subtyping side condition used, if any."""
    if isinstance(v, UnitVal):
        if not isinstance(unfold(t), Unit):
            raise TypingError("subtype", f"() is not of type {pretty_type(t)}", v, (t,))
        return None
    if isinstance(v, Name):
        have = _lookup(ctx, v.name, v)
        ok, cond = _value_ok(have, t)
        if not ok:
            raise TypingError("subtype", f"{v.name}:{pretty_type(have)} does not fit {pretty_type(t)}",
                              v, (have, t))
        return cond
    raise TypingError("shape", f"not a session value: {v!r}", v)


def _bind(ctx: dict, x: str, t, p):
    old = ctx.get(x)
    if old is not None and not is_unlimited(old):
        raise TypingError("linearity", f"binding {x!r} hides a linear resource", p)
    if not well_formed(t):
        raise TypingError("annotation", f"ill-formed annotation {t!r}", p)
    ctx[x] = t


def check_process(ctx: Mapping, p) -> Derivation:
    """Build a derivation of ``ctx ⊢ p`` or raise :class:`TypingError`."""
    for x, t in ctx.items():
        if not well_formed(t):
            raise TypingError("annotation", f"ill-formed context entry {x}:{t!r}", p)
    return _check(dict(ctx), p)


def _linear(ctx: Mapping) -> set:
    return {x for x, t in ctx.items() if not is_unlimited(t)}


def _check(ctx: dict, p) -> Derivation:
    frozen = _frozen(ctx)
    if isinstance(p, Nil):
        left = sorted(_linear(ctx))
        if left:
            raise TypingError("leftover", f"unused linear resource(s) {', '.join(left)}", p)
        return Derivation("T-Nil", frozen, p)

    if isinstance(p, Par):
        lin = _linear(ctx)
        fl, fr = free_names(p.left), free_names(p.right)
        both = sorted(lin & fl & fr)
        if both:
            raise TypingError("linearity", f"linear {', '.join(both)} used on both sides of |", p)
        un = {x: t for x, t in ctx.items() if x not in lin}
        left = {**un, **{x: ctx[x] for x in lin & fl}}
        right = {**un, **{x: ctx[x] for x in lin - fl}}
        return Derivation("T-Par", frozen, p, (), (_check(left, p.left), _check(right, p.right)))

    if isinstance(p, Repl):
        left = sorted(_linear(ctx))
        if left:
            raise TypingError("linearity", f"replicated process under linear {', '.join(left)}", p)
        return Derivation("T-Rep", frozen, p, (), (_check(ctx, p.body),))

    if isinstance(p, SessRes):
        if not well_formed(p.annot) or not is_session_type(p.annot):
            raise TypingError("annotation", f"restriction needs a session type, got {p.annot!r}", p)
        co = complement_session(p.annot)
        if not dual_session(p.annot, co):
            raise TypingError("duality", "co-variable types are not dual", p, (p.annot, co))
        inner = dict(ctx)
        _bind(inner, p.x, p.annot, p)
        _bind(inner, p.y, co, p)
        side = (SideCondition("dual", p.annot, co),)
        return Derivation("T-ResS", frozen, p, side, (_check(inner, p.body),))

    if isinstance(p, ChanRes):
        if not well_formed(p.annot) or not isinstance(unfold(p.annot), Chan):
            raise TypingError("annotation", f"channel restriction needs #T, got {p.annot!r}", p)
        inner = dict(ctx)
        _bind(inner, p.name, p.annot, p)
        return Derivation("T-Res", frozen, p, (), (_check(inner, p.body),))

    if isinstance(p, Output):
        tx = _lookup(ctx, p.subject, p)
        u = unfold(tx)
        if isinstance(p.payload, Name) and p.payload.name == p.subject:
            raise TypingError("linearity", f"{p.subject} sent over itself", p)
        if isinstance(u, Chan):
            side = [SideCondition("un", p.subject, tx)]
            carried, cont = u.carried, None
        elif isinstance(u, Send):
            side = []
            carried, cont = u.carried, u.cont
        else:
            raise TypingError("shape", f"output on {p.subject}:{pretty_type(tx)}", p, (tx,))
        cond = check_value(ctx, p.payload, carried)
        if cond is not None:
            side.append(cond)
        inner = dict(ctx)
        if isinstance(p.payload, Name) and not is_unlimited(ctx[p.payload.name]):
            del inner[p.payload.name]
        if cont is not None:
            inner[p.subject] = cont
        return Derivation("T-Out", frozen, p, tuple(side), (_check(inner, p.cont),))

    if isinstance(p, Input):
        tx = _lookup(ctx, p.subject, p)
        u = unfold(tx)
        if p.binder == p.subject:
            raise TypingError("linearity", f"input binder shadows its subject {p.subject}", p)
        if not well_formed(p.annot):
            raise TypingError("annotation", f"ill-formed annotation {p.annot!r}", p)
        inner = dict(ctx)
        if isinstance(u, Chan):
            side = [SideCondition("un", p.subject, tx)]
            carried = u.carried
        elif isinstance(u, Recv):
            side = []
            carried = u.carried
            inner[p.subject] = u.cont
        else:
            raise TypingError("shape", f"input on {p.subject}:{pretty_type(tx)}", p, (tx,))
        if not equiv(carried, p.annot):
            raise TypingError("annotation", f"binder annotated {pretty_type(p.annot)} "
                              f"but channel carries {pretty_type(carried)}", p, (p.annot, carried))
        _bind(inner, p.binder, p.annot, p)
        return Derivation("T-In", frozen, p, tuple(side), (_check(inner, p.cont),))

    if isinstance(p, Selection):
        tx = _lookup(ctx, p.subject, p)
        u = unfold(tx)
        if not isinstance(u, Select) or u.get(p.label) is None:
            raise TypingError("subtype", f"{p.subject}:{pretty_type(tx)} cannot select {p.label}",
                              p, (tx,))
        chosen = u.get(p.label)
        side = (SideCondition("<=s", tx, Select({p.label: chosen})),)
        inner = {**ctx, p.subject: chosen}
        return Derivation("T-Select", frozen, p, side, (_check(inner, p.cont),))

    if isinstance(p, Branching):
        tx = _lookup(ctx, p.subject, p)
        u = unfold(tx)
        offered = dict(p.arms)
        if not isinstance(u, Branch) or not set(dict(u.branches)) <= set(offered):
            raise TypingError("subtype", f"{p.subject}:{pretty_type(tx)} is not covered by "
                              f"branches {sorted(offered)}", p, (tx,))
        side = (SideCondition("<=s", tx, u),)
        premises = tuple(_check({**ctx, p.subject: s}, offered[lab]) for lab, s in u.branches)
        return Derivation("T-Branch", frozen, p, side, premises)

    raise TypingError("shape", f"not a session process: {p!r}", p)


def typechecks(ctx: Mapping, p) -> bool:
    try:
        check_process(ctx, p)
    except TypingError:
        return False
    return True
