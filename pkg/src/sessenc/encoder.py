"""Translation of session types and processes into the linear pi-calculus.

Each session action is compiled to one linear communication that also carries
a fresh continuation channel; selection and branching carry a variant value
and the receiver dispatches on it with ``case``.  The renaming ``f`` tracks,
for every session endpoint, the pi channel that currently stands for it.

The encoder is type-directed only to annotate the restrictions it creates, so
that the output can be fed to the pi type checker.  It never rejects a
process for being ill-typed: where no type is known it emits ``empty[]``, and
the pi checker then reports the problem.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

from .algebra import complement_session, unfold
from .syntax import (
    Branch, Branching, Case, Chan, ChanRes, Conn, End, Input, LinConn, LinIn, LinOut, Name, Nil,
    NoCap, Output, Par, PInput, POutput, PRes, Rec, Recv, Repl, Select, Selection, Send,
    SessRes, TVar, Unit, UnitVal, Variant, VariantVal, all_names, is_session_type, well_formed,
)


class EncodingError(ValueError):
    pass


def encode_type(t):
    """Session-calculus type to linear pi type."""
    if isinstance(t, End):
        return NoCap()
    if isinstance(t, Send):
        return LinOut((encode_type(t.carried), encode_type(complement_session(t.cont))))
    if isinstance(t, Recv):
        return LinIn((encode_type(t.carried), encode_type(t.cont)))
    if isinstance(t, Select):
        return LinOut((Variant([(l, encode_type(complement_session(s))) for l, s in t.branches]),))
    if isinstance(t, Branch):
        return LinIn((Variant([(l, encode_type(s)) for l, s in t.branches]),))
    if isinstance(t, TVar):
        return t
    if isinstance(t, Rec):
        return Rec(t.var, encode_type(t.body))
    if isinstance(t, Chan):
        return Conn((encode_type(t.carried),))
    if isinstance(t, Unit):
        return t
    raise EncodingError(f"not a session-calculus type: {t!r}")


def encode_env(ctx: Mapping) -> dict:
    return {x: encode_type(t) for x, t in ctx.items()}


def encode_value(v, f: Mapping):
    if isinstance(v, Name):
        return Name(f.get(v.name, v.name))
    if isinstance(v, UnitVal):
        return v
    raise EncodingError(f"not a session value: {v!r}")


def restriction_annotation(s):
    """Type of the pi channel that implements a session whose first endpoint has type ``s``."""
    if not is_session_type(s):
        raise EncodingError(f"not a session type: {s!r}")
    u = unfold(encode_type(s))
    if isinstance(u, NoCap):
        return u
    if isinstance(u, (LinIn, LinOut)):
        return LinConn(u.carried)
    raise EncodingError(f"unexpected encoded session type {u!r}")


@dataclass
class NameSupply:
    """Issues ``prefix0, prefix1, ...`` skipping every name in ``avoid``."""

    prefix: str = "c"
    avoid: set = field(default_factory=set)
    counter: int = 0

    def fresh(self) -> str:
        while True:
            name = f"{self.prefix}{self.counter}"
            self.counter += 1
            if name not in self.avoid:
                self.avoid.add(name)
                return name


def _safe_annotation(t):
    try:
        if t is not None and well_formed(t):
            return restriction_annotation(t)
    except (EncodingError, ValueError):
        pass
    return NoCap()


def _step(t, want):
    # Unfolded type of an endpoint if it has the wanted shape, else None.
    if t is None or not is_session_type(t):
        return None
    u = unfold(t)
    return u if isinstance(u, want) else None


def encode_process(p, f: Mapping | None = None, supply: NameSupply | None = None,
                   ctx: Mapping | None = None):
    """Encode ``p`` under renaming ``f``.

    ``ctx`` gives the session types of free names; it only feeds restriction
    annotations.  A fresh supply avoiding every name of ``p`` is used when none
    is given.
    """
    f = dict(f or {})
    if supply is None:
        supply = NameSupply(avoid=set(all_names(p)) | set(f.values()) | set(ctx or {}))
    types = dict(ctx or {})
    return _enc(p, f, supply, types)


def _enc(p, f: dict, supply: NameSupply, types: dict):
    fx = lambda x: f.get(x, x)
    if isinstance(p, Nil):
        return p
    if isinstance(p, Par):
        return Par(_enc(p.left, f, supply, types), _enc(p.right, f, supply, types))
    if isinstance(p, Repl):
        return Repl(_enc(p.body, f, supply, types))
    if isinstance(p, ChanRes):
        inner_f = {k: v for k, v in f.items() if k != p.name}
        return PRes(p.name, encode_type(p.annot), _enc(p.body, inner_f, supply,
                                                       {**types, p.name: p.annot}))
    if isinstance(p, SessRes):
        c = supply.fresh()
        co = complement_session(p.annot) if well_formed(p.annot) and is_session_type(p.annot) else None
        body = _enc(p.body, {**f, p.x: c, p.y: c}, supply,
                    {**types, p.x: p.annot, p.y: co})
        return PRes(c, _safe_annotation(p.annot), body)

    t = types.get(p.subject) if hasattr(p, "subject") else None
    session = t is not None and is_session_type(t)

    if isinstance(p, Output):
        v = encode_value(p.payload, f)
        if not session:
            return POutput(fx(p.subject), (v,), _enc(p.cont, f, supply, types))
        u = _step(t, Send)
        cont_t = u.cont if u is not None else None
        c = supply.fresh()
        body = _enc(p.cont, {**f, p.subject: c}, supply, {**types, p.subject: cont_t})
        return PRes(c, _safe_annotation(cont_t), POutput(fx(p.subject), (v, Name(c)), body))

    if isinstance(p, Input):
        inner_f = {**{k: v for k, v in f.items() if k != p.binder}}
        if is_session_type(p.annot):
            inner_f[p.binder] = p.binder
        if not session:
            return PInput(fx(p.subject), (p.binder,),
                          _enc(p.cont, inner_f, supply, {**types, p.binder: p.annot}))
        u = _step(t, Recv)
        c = supply.fresh()
        inner_f[p.subject] = c
        inner_types = {**types, p.subject: u.cont if u is not None else None, p.binder: p.annot}
        return PInput(fx(p.subject), (p.binder, c), _enc(p.cont, inner_f, supply, inner_types))

    if isinstance(p, Selection):
        u = _step(t, Select)
        cont_t = u.get(p.label) if u is not None else None
        c = supply.fresh()
        body = _enc(p.cont, {**f, p.subject: c}, supply, {**types, p.subject: cont_t})
        return PRes(c, _safe_annotation(cont_t),
                    POutput(fx(p.subject), (VariantVal(p.label, Name(c)),), body))

    if isinstance(p, Branching):
        u = _step(t, Branch)
        y = supply.fresh()
        c = supply.fresh()
        arms = []
        for lab, q in p.arms:
            arm_t = u.get(lab) if u is not None else None
            arms.append((lab, (c, _enc(q, {**f, p.subject: c}, supply,
                                       {**types, p.subject: arm_t}))))
        return PInput(fx(p.subject), (y,), Case(Name(y), arms))

    raise EncodingError(f"not a session process: {p!r}")


def encode(p, ctx: Mapping | None = None):
    """Encode a process with the identity renaming; ``ctx`` types its free names."""
    return encode_process(p, {}, None, ctx)
