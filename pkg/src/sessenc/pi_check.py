"""Type checking for the linear pi-calculus with variants.

The checker threads the context through the process: each use of a linear
capability removes it (``lo``/``li`` become ``empty[]``, ``l#`` loses the used
half), so ``P | Q`` is checked as ``P`` followed by ``Q`` on what ``P`` left.
This realises the partial combination of contexts without guessing a split.
A judgement ``Γ ⊢ P`` holds when everything left over is unlimited.
"""

from __future__ import annotations

from typing import Mapping

from .algebra import equiv, unfold
from .printer import pretty_type
from .session_check import Derivation, SideCondition, TypingError
from .syntax import (
    Case, Conn, LinConn, LinIn, LinOut, Name, Nil, NoCap, Par, PInput, POutput, PRes, Repl, Unit,
    UnitVal, Variant, VariantVal, free_names, well_formed,
)


def is_unlimited_pi(t) -> bool:
    u = unfold(t)
    if isinstance(u, (NoCap, Conn, Unit)):
        return True
    if isinstance(u, Variant):
        return all(is_unlimited_pi(s) for _, s in u.cases)
    return False


def _same_payload(a: tuple, b: tuple) -> bool:
    return len(a) == len(b) and all(equiv(x, y) for x, y in zip(a, b))


def combine(left: Mapping, right: Mapping) -> dict:
    """Pointwise combination: ``li[T] ⊎ lo[T] = l#[T]``; unlimited entries must agree."""
    out = dict(left)
    for x, t in right.items():
        if x not in out:
            out[x] = t
            continue
        s = out[x]
        us, ut = unfold(s), unfold(t)
        if is_unlimited_pi(s) and is_unlimited_pi(t) and equiv(s, t):
            continue
        pair = {type(us), type(ut)}
        if pair == {LinIn, LinOut} and _same_payload(us.carried, ut.carried):
            out[x] = LinConn(us.carried)
            continue
        raise TypingError("linearity", f"{x} cannot combine {pretty_type(s)} with {pretty_type(t)}")
    return out


def _use(ctx: dict, x: str, direction: str, p) -> tuple:
    if x not in ctx:
        raise TypingError("unbound", f"unbound variable {x!r}", p)
    u = unfold(ctx[x])
    if isinstance(u, Conn):
        return u.carried
    if isinstance(u, LinConn):
        ctx[x] = LinOut(u.carried) if direction == "in" else LinIn(u.carried)
        return u.carried
    if (direction, type(u)) in (("in", LinIn), ("out", LinOut)):
        ctx[x] = NoCap()
        return u.carried
    raise TypingError("linearity" if isinstance(u, (NoCap, LinIn, LinOut)) else "shape",
                      f"no {direction}put capability on {x}:{pretty_type(ctx[x])}", p, (ctx[x],))


def _consume_value(ctx: dict, v, t, p) -> None:
    want = unfold(t)
    if isinstance(v, UnitVal):
        if not isinstance(want, Unit):
            raise TypingError("subtype", f"() is not of type {pretty_type(t)}", p, (t,))
        return
    if isinstance(v, VariantVal):
        if not isinstance(want, Variant) or want.get(v.label) is None:
            raise TypingError("subtype", f"label {v.label} not in {pretty_type(t)}", p, (t,))
        _consume_value(ctx, v.payload, want.get(v.label), p)
        return
    if not isinstance(v, Name):
        raise TypingError("shape", f"not a pi value: {v!r}", p)
    if v.name not in ctx:
        raise TypingError("unbound", f"unbound variable {v.name!r}", p)
    have = ctx[v.name]
    uh = unfold(have)
    if isinstance(want, (LinIn, LinOut)):
        if isinstance(uh, LinConn) and _same_payload(uh.carried, want.carried):
            ctx[v.name] = LinIn(uh.carried) if isinstance(want, LinOut) else LinOut(uh.carried)
            return
        if type(uh) is type(want) and _same_payload(uh.carried, want.carried):
            ctx[v.name] = NoCap()
            return
    elif equiv(have, t):
        if not is_unlimited_pi(have):
            ctx[v.name] = NoCap()
        return
    raise TypingError("subtype", f"{v.name}:{pretty_type(have)} does not fit {pretty_type(t)}",
                      p, (have, t))


def check_pi_value(ctx: Mapping, v, t) -> dict:
    """Check ``ctx ⊢ v : t``; returns the context left after the capabilities ``v`` uses."""
    out = dict(ctx)
    _consume_value(out, v, t, v)
    return out


def _scoped(ctx: dict, names, types, p, body_check):
    saved = {}
    for x, t in zip(names, types):
        if x in ctx:
            if not is_unlimited_pi(ctx[x]):
                raise TypingError("linearity", f"binding {x!r} hides a linear resource", p)
            saved[x] = ctx[x]
        ctx[x] = t
    res, der = body_check(ctx)
    for x in names:
        if not is_unlimited_pi(res[x]):
            raise TypingError("leftover", f"{x}:{pretty_type(res[x])} not used up", p)
        del res[x]
    res.update(saved)
    return res, der


def _check(ctx: dict, p) -> tuple[dict, Derivation]:
    frozen = tuple(ctx.items())
    if isinstance(p, Nil):
        return ctx, Derivation("P-Nil", frozen, p)

    if isinstance(p, Par):
        mid, d1 = _check(dict(ctx), p.left)
        out, d2 = _check(mid, p.right)
        return out, Derivation("P-Par", frozen, p, (), (d1, d2))

    if isinstance(p, Repl):
        lin = sorted(x for x in free_names(p.body) if x in ctx and not is_unlimited_pi(ctx[x]))
        if lin:
            raise TypingError("linearity", f"replicated process uses linear {', '.join(lin)}", p)
        un = {x: t for x, t in ctx.items() if is_unlimited_pi(t)}
        _, d = _check(un, p.body)
        return ctx, Derivation("P-Rep", frozen, p, (), (d,))

    if isinstance(p, PRes):
        if not well_formed(p.annot):
            raise TypingError("annotation", f"ill-formed annotation {p.annot!r}", p)
        res, d = _scoped(dict(ctx), [p.name], [p.annot], p, lambda c: _check(c, p.body))
        return res, Derivation("P-Res", frozen, p, (), (d,))

    if isinstance(p, POutput):
        inner = dict(ctx)
        carried = _use(inner, p.subject, "out", p)
        if len(carried) != len(p.payloads):
            raise TypingError("shape", f"{p.subject} carries {len(carried)} value(s), "
                              f"{len(p.payloads)} sent", p)
        for v, t in zip(p.payloads, carried):
            _consume_value(inner, v, t, p)
        out, d = _check(inner, p.cont)
        return out, Derivation("P-Out", frozen, p, (), (d,))

    if isinstance(p, PInput):
        inner = dict(ctx)
        carried = _use(inner, p.subject, "in", p)
        if len(carried) != len(p.binders):
            raise TypingError("shape", f"{p.subject} carries {len(carried)} value(s), "
                              f"{len(p.binders)} expected", p)
        if len(set(p.binders)) != len(p.binders) or p.subject in p.binders:
            raise TypingError("linearity", "input binders must be distinct from each other "
                              "and from the subject", p)
        res, d = _scoped(inner, list(p.binders), list(carried), p, lambda c: _check(c, p.cont))
        return res, Derivation("P-In", frozen, p, (), (d,))

    if isinstance(p, Case):
        inner = dict(ctx)
        v = p.scrutinee
        if isinstance(v, Name):
            if v.name not in inner:
                raise TypingError("unbound", f"unbound variable {v.name!r}", p)
            vt = unfold(inner[v.name])
            if not isinstance(vt, Variant):
                raise TypingError("shape", f"case on non-variant {v.name}:{pretty_type(vt)}", p)
            if not is_unlimited_pi(vt):
                inner[v.name] = NoCap()
            cases = dict(vt.cases)
        elif isinstance(v, VariantVal):
            return _check_known_case(ctx, frozen, p)
        else:
            raise TypingError("shape", f"case on non-variant value {v!r}", p)
        arms = dict(p.arms)
        missing = sorted(set(cases) - set(arms))
        if missing:
            raise TypingError("subtype", f"case lacks arm(s) {', '.join(missing)}", p)
        results, premises = [], []
        for lab, t in sorted(cases.items()):
            x, body = arms[lab]
            res, d = _scoped(dict(inner), [x], [t], p, lambda c, body=body: _check(c, body))
            results.append(res)
            premises.append(d)
        first = results[0]
        for other in results[1:]:
            if set(other) != set(first) or not all(
                    other[k] == first[k] or equiv(other[k], first[k]) for k in first):
                raise TypingError("linearity", "case arms use different linear resources", p)
        return first, Derivation("P-Case", frozen, p, (), tuple(premises))

    raise TypingError("shape", f"not a pi process: {p!r}", p)


def _check_known_case(ctx: dict, frozen: tuple, p) -> tuple[dict, Derivation]:
    # A case on a literal variant only runs the matching arm.  A linear
    # connection in the payload may have been split by a communication, so the
    # arm is offered each capability in turn and the rest stays in the context.
    v = p.scrutinee
    arms = dict(p.arms)
    if v.label not in arms:
        raise TypingError("subtype", f"case lacks arm {v.label}", p)
    x, body = arms[v.label]
    payload = v.payload
    if isinstance(payload, UnitVal):
        options = [(Unit(), None)]
    elif isinstance(payload, Name) and payload.name in ctx:
        have = ctx[payload.name]
        u = unfold(have)
        if isinstance(u, LinConn):
            options = [(have, NoCap()), (LinIn(u.carried), LinOut(u.carried)),
                       (LinOut(u.carried), LinIn(u.carried))]
        else:
            options = [(have, None if is_unlimited_pi(have) else NoCap())]
    else:
        raise TypingError("shape", f"cannot type case scrutinee {v!r}", p)
    error = None
    for given, kept in options:
        inner = dict(ctx)
        if kept is not None:
            inner[payload.name] = kept
        try:
            res, d = _scoped(inner, [x], [given], p, lambda c: _check(c, body))
        except TypingError as exc:
            error = exc
            continue
        return res, Derivation("P-Case", frozen, p, (), (d,))
    raise error


def check_pi_process(ctx: Mapping, p) -> Derivation:
    """Derive ``ctx ⊢ p`` in the linear pi-calculus or raise :class:`TypingError`."""
    for x, t in ctx.items():
        if not well_formed(t):
            raise TypingError("annotation", f"ill-formed context entry {x}:{t!r}", p)
    res, d = _check(dict(ctx), p)
    left = sorted(x for x, t in res.items() if not is_unlimited_pi(t))
    if left:
        raise TypingError("leftover", f"unused linear resource(s) {', '.join(left)}", p)
    return d


def pi_typechecks(ctx: Mapping, p) -> bool:
    try:
        check_pi_process(ctx, p)
    except TypingError:
        return False
    return True


__all__ = ["combine", "check_pi_value", "check_pi_process", "pi_typechecks", "is_unlimited_pi",
           "SideCondition"]
