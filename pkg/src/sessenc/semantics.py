"""Reduction semantics and structural congruence for both calculi.

A process is handled in *flattened* form: top-level restrictions pulled to
the front (renamed apart where needed) and the parallel components collected
into a list of threads, each a prefix, a ``case`` or a replication.  A step
picks a redex among the threads, where a replicated thread contributes one
fresh copy of its body, fires it, and rebuilds a process.

Restriction annotations follow the types: after a session step the
annotation of ``(new x y:S)`` advances to the continuation of ``S``; after a
communication on a linear pi channel its annotation becomes ``empty[]``.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from .algebra import equiv, unfold
from .printer import pretty, pretty_type, pretty_value
from .syntax import (
    Branch, Branching, Case, Hole, ChanRes, Conn, Input, LinConn, LinIn, LinOut, Name, Nil, NoCap,
    Output, Par, PInput, POutput, PRes, Recv, Repl, Select, Selection, Send, SessRes, UnitVal,
    VariantVal, all_names, alpha_normal_type, free_names, par, value_names,
)


class SemanticsError(Exception):
    pass


@dataclass(frozen=True)
class Fault:
    """Result of a step that went wrong at run time (for instance an arity mismatch)."""

    message: str


@dataclass(frozen=True)
class Step:
    process: object
    rule: str
    location: str


# ---------------------------------------------------------------------------
# names and substitution


class _Fresh:
    def __init__(self, used):
        self.used = set(used)

    def __call__(self, base: str) -> str:
        stem = base.rstrip("0123456789'_") or "n"
        for k in itertools.count(1):
            cand = f"{stem}_{k}"
            if cand not in self.used:
                self.used.add(cand)
                return cand


def _subst_value(v, sub: dict):
    if isinstance(v, Name):
        return sub.get(v.name, v)
    if isinstance(v, VariantVal):
        return VariantVal(v.label, _subst_value(v.payload, sub))
    return v


def _subject(x: str, sub: dict) -> str:
    v = sub.get(x)
    if v is None:
        return x
    if not isinstance(v, Name):
        raise SemanticsError(f"value {pretty(v)} used as a channel")
    return v.name


def substitute(p, sub: dict, fresh: _Fresh | None = None):
    """Capture-avoiding substitution of values for free names."""
    if not sub:
        return p
    if fresh is None:
        used = all_names(p)
        for v in sub.values():
            used |= value_names(v)
        fresh = _Fresh(used | set(sub))
    return _subst(p, sub, fresh)


def _binders(p, names, body, sub, fresh):
    # Drop shadowed entries; rename binders that would capture a substituted name.
    inner = {k: v for k, v in sub.items() if k not in names}
    incoming = set()
    for v in inner.values():
        incoming |= value_names(v)
    renamed = []
    ren = {}
    for b in names:
        if b in incoming:
            nb = fresh(b)
            ren[b] = Name(nb)
            renamed.append(nb)
        else:
            renamed.append(b)
    if ren:
        body = _subst(body, ren, fresh)
    return renamed, (_subst(body, inner, fresh) if inner else body)


def _subst(p, sub, fresh):
    if isinstance(p, Nil):
        return p
    if isinstance(p, Par):
        return Par(_subst(p.left, sub, fresh), _subst(p.right, sub, fresh))
    if isinstance(p, Repl):
        return Repl(_subst(p.body, sub, fresh))
    if isinstance(p, Output):
        return Output(_subject(p.subject, sub), _subst_value(p.payload, sub),
                      _subst(p.cont, sub, fresh))
    if isinstance(p, Input):
        (b,), body = _binders(p, [p.binder], p.cont, sub, fresh)
        return Input(_subject(p.subject, sub), b, p.annot, body)
    if isinstance(p, Selection):
        return Selection(_subject(p.subject, sub), p.label, _subst(p.cont, sub, fresh))
    if isinstance(p, Branching):
        return Branching(_subject(p.subject, sub), [(l, _subst(q, sub, fresh)) for l, q in p.arms])
    if isinstance(p, SessRes):
        (x, y), body = _binders(p, [p.x, p.y], p.body, sub, fresh)
        return SessRes(x, y, p.annot, body)
    if isinstance(p, (ChanRes, PRes)):
        (a,), body = _binders(p, [p.name], p.body, sub, fresh)
        return type(p)(a, p.annot, body)
    if isinstance(p, POutput):
        return POutput(_subject(p.subject, sub), tuple(_subst_value(v, sub) for v in p.payloads),
                       _subst(p.cont, sub, fresh))
    if isinstance(p, PInput):
        bs, body = _binders(p, list(p.binders), p.cont, sub, fresh)
        return PInput(_subject(p.subject, sub), tuple(bs), body)
    if isinstance(p, Case):
        arms = []
        for lab, (x, q) in p.arms:
            (b,), body = _binders(p, [x], q, sub, fresh)
            arms.append((lab, (b, body)))
        return Case(_subst_value(p.scrutinee, sub), arms)
    raise SemanticsError(f"not a process: {p!r}")


# ---------------------------------------------------------------------------
# flattening


@dataclass(frozen=True)
class Restriction:
    kind: str  # "sess", "chan" or "pi"
    names: tuple
    annot: object


def flatten(p, fresh: _Fresh):
    """Split ``p`` into top-level restrictions and threads, renaming binders apart."""
    restrictions: list[Restriction] = []
    threads: list = []

    def go(p):
        if isinstance(p, Nil):
            return
        if isinstance(p, Par):
            go(p.left)
            go(p.right)
            return
        if isinstance(p, (SessRes, ChanRes, PRes)):
            names = [p.x, p.y] if isinstance(p, SessRes) else [p.name]
            ren = {}
            for n in names:
                if n in fresh.used:
                    ren[n] = Name(fresh(n))
                else:
                    fresh.used.add(n)
            new = [ren[n].name if n in ren else n for n in names]
            body = _subst(p.body, ren, fresh) if ren else p.body
            kind = {SessRes: "sess", ChanRes: "chan", PRes: "pi"}[type(p)]
            restrictions.append(Restriction(kind, tuple(new), p.annot))
            go(body)
            return
        threads.append(p)

    go(p)
    return restrictions, threads


def _fresh_for(p) -> _Fresh:
    # Free names are reserved; bound names get claimed as they are met.
    return _Fresh(free_names(p))


def rebuild(restrictions, threads):
    body = par(*threads)
    for r in reversed(restrictions):
        if r.kind == "sess":
            body = SessRes(r.names[0], r.names[1], r.annot, body)
        elif r.kind == "chan":
            body = ChanRes(r.names[0], r.annot, body)
        else:
            body = PRes(r.names[0], r.annot, body)
    return body


# ---------------------------------------------------------------------------
# redexes


@dataclass
class _Config:
    restrictions: list
    threads: list
    copies: dict  # thread index -> (restrictions, threads) of one unfolded copy
    fresh: _Fresh


def _configure(p) -> _Config:
    fresh = _fresh_for(p)
    fresh.used |= all_names(p)
    restrictions, threads = flatten(p, _Fresh(free_names(p)))
    fresh.used |= {n for r in restrictions for n in r.names}
    copies = {}
    for i, t in enumerate(threads):
        if isinstance(t, Repl):
            copies[i] = flatten(t.body, fresh)
    return _Config(restrictions, threads, copies, fresh)


def _pool(cfg: _Config):
    """Candidate threads as ``(slot, process)``; slot is ``(i,)`` or ``(i, k)`` for copies."""
    out = []
    for i, t in enumerate(cfg.threads):
        if isinstance(t, Repl):
            for k, c in enumerate(cfg.copies[i][1]):
                out.append(((i, k), c))
        else:
            out.append(((i,), t))
    return out


def _session_partner(cfg: _Config, x: str):
    for r in cfg.restrictions:
        if r.kind == "sess" and x in r.names:
            return r, (r.names[1] if x == r.names[0] else r.names[0])
    for i, (rs, _) in cfg.copies.items():
        for r in rs:
            if r.kind == "sess" and x in r.names:
                return r, (r.names[1] if x == r.names[0] else r.names[0])
    return None, None


@dataclass
class _Redex:
    rule: str
    slots: tuple
    results: tuple  # continuation per slot
    location: str
    advance: tuple | None = None  # (restriction, new annotation)
    fault: str | None = None


def _session_redexes(cfg: _Config) -> Iterator[_Redex]:
    pool = _pool(cfg)
    for (sa, a), (sb, b) in itertools.permutations(pool, 2):
        if isinstance(a, Output) and isinstance(b, Input):
            r, partner = _session_partner(cfg, a.subject)
            if r is not None:
                if partner != b.subject:
                    continue
                rule = "R-Com"
            elif a.subject == b.subject and _session_partner(cfg, b.subject)[0] is None:
                rule = "R-ChanCom"
            else:
                continue
            received = substitute(b.cont, {b.binder: a.payload})
            adv = None
            if r is not None:
                u = unfold(r.annot)
                if isinstance(u, (Send, Recv)):
                    adv = (r, u.cont)
            loc = a.subject if rule == "R-ChanCom" else f"{a.subject}/{b.subject}"
            yield _Redex(rule, (sa, sb), (a.cont, received), loc, adv)
        elif isinstance(a, Selection) and isinstance(b, Branching):
            r, partner = _session_partner(cfg, a.subject)
            if r is None or partner != b.subject:
                continue
            arms = dict(b.arms)
            if a.label not in arms:
                continue
            u = unfold(r.annot)
            adv = None
            if isinstance(u, (Select, Branch)) and u.get(a.label) is not None:
                adv = (r, u.get(a.label))
            yield _Redex("R-Sel", (sa, sb), (a.cont, arms[a.label]),
                         f"{a.subject}/{b.subject} {a.label}", adv)


def _restriction_of(cfg: _Config, x: str):
    for r in cfg.restrictions:
        if x in r.names:
            return r
    for rs, _ in cfg.copies.values():
        for r in rs:
            if x in r.names:
                return r
    return None


def _pi_redexes(cfg: _Config) -> Iterator[_Redex]:
    pool = _pool(cfg)
    for slot, t in pool:
        if isinstance(t, Case) and isinstance(t.scrutinee, VariantVal):
            arms = dict(t.arms)
            if t.scrutinee.label in arms:
                x, body = arms[t.scrutinee.label]
                try:
                    res = substitute(body, {x: t.scrutinee.payload})
                except SemanticsError as exc:
                    yield _Redex("R-Case", (slot,), (Nil(),), "case", fault=str(exc))
                    continue
                yield _Redex("R-Case", (slot,), (res,), f"case {t.scrutinee.label}")
    for (sa, a), (sb, b) in itertools.permutations(pool, 2):
        if not (isinstance(a, POutput) and isinstance(b, PInput) and a.subject == b.subject):
            continue
        if len(a.payloads) != len(b.binders):
            yield _Redex("R-Com", (sa, sb), (Nil(), Nil()), a.subject,
                         fault=f"arity mismatch on {a.subject}: "
                               f"{len(a.payloads)} sent, {len(b.binders)} expected")
            continue
        try:
            received = substitute(b.cont, dict(zip(b.binders, a.payloads)))
        except SemanticsError as exc:
            yield _Redex("R-Com", (sa, sb), (Nil(), Nil()), a.subject, fault=str(exc))
            continue
        r = _restriction_of(cfg, a.subject)
        adv = None
        if r is not None and isinstance(unfold(r.annot), (LinConn, LinIn, LinOut)):
            adv = (r, NoCap())
        yield _Redex("R-Com", (sa, sb), (a.cont, received), a.subject, adv)


def _fire(cfg: _Config, rx: _Redex):
    if rx.fault is not None:
        return Fault(rx.fault)
    replace = dict(zip(rx.slots, rx.results))
    used_copies = {s[0] for s in rx.slots if len(s) == 2}
    restrictions = list(cfg.restrictions)
    slots = []
    for i, t in enumerate(cfg.threads):
        if i in used_copies:
            rs, cs = cfg.copies[i]
            restrictions.extend(rs)
            for k, c in enumerate(cs):
                slots.append(replace.get((i, k), c))
            slots.append(t)
        else:
            slots.append(replace.get((i,), t))
    if rx.advance is not None:
        old, new = rx.advance
        restrictions = [Restriction(r.kind, r.names, new) if r is old else r for r in restrictions]
    return rebuild(restrictions, [s for s in slots if not isinstance(s, Nil)])


def _steps(p, redexes) -> list[Step]:
    cfg = _configure(p)
    out, seen = [], set()
    for rx in redexes(cfg):
        q = _fire(cfg, rx)
        key = ("fault", q.message) if isinstance(q, Fault) else canonical_key(q)
        if key in seen:
            continue
        seen.add(key)
        out.append(Step(q, rx.rule, rx.location))
    return out


def step_session(p) -> list[Step]:
    """All one-step reducts of a closed session process, up to structural congruence."""
    return _steps(p, _session_redexes)


def step_pi(p) -> list[Step]:
    """All one-step reducts of a closed pi process, up to structural congruence."""
    return _steps(p, _pi_redexes)


def step(p) -> list[Step]:
    from .syntax import is_pi_process
    return step_pi(p) if is_pi_process(p) else step_session(p)


def decompose(p) -> list[tuple[object, object]]:
    """Every split of ``p`` into an evaluation context and a redex."""
    from .syntax import is_pi_process

    cfg = _configure(p)
    redexes = _pi_redexes if is_pi_process(p) else _session_redexes
    out = []
    pool = dict(_pool(cfg))
    for rx in redexes(cfg):
        used_copies = {s[0] for s in rx.slots if len(s) == 2}
        restrictions = list(cfg.restrictions)
        rest = []
        for i, t in enumerate(cfg.threads):
            if i in used_copies:
                rs, cs = cfg.copies[i]
                restrictions.extend(rs)
                rest.extend(c for k, c in enumerate(cs) if (i, k) not in rx.slots)
                rest.append(t)
            elif (i,) not in rx.slots:
                rest.append(t)
        redex = par(*[pool[s] for s in rx.slots])
        ctx = rebuild(restrictions, [Hole()] + rest)
        out.append((ctx, redex))
    return out


def plug(ctx, p):
    """Fill the hole of an evaluation context."""
    if isinstance(ctx, Hole):
        return p
    if isinstance(ctx, Par):
        return Par(plug(ctx.left, p), plug(ctx.right, p))
    if isinstance(ctx, SessRes):
        return SessRes(ctx.x, ctx.y, ctx.annot, plug(ctx.body, p))
    if isinstance(ctx, (ChanRes, PRes)):
        return type(ctx)(ctx.name, ctx.annot, plug(ctx.body, p))
    return ctx


# ---------------------------------------------------------------------------
# structural congruence


_NAME = re.compile(r"[A-Za-z_%][A-Za-z0-9_'%]*")
_MAX_TIE_PERMUTATIONS = 5040
_MAX_EXACT_ORDERS = 720


@dataclass(frozen=True)
class Canonical:
    key: tuple
    # top-level annotations aligned with key[1], one tuple per labeling reaching the key
    annotations: tuple


def _collect(restrictions: list, threads: list) -> list:
    """Drop restrictions none of whose names is used any more."""
    while True:
        used = set()
        for t in threads:
            used |= free_names(t)
        keep = [r for r in restrictions if any(n in used for n in r.names)]
        if len(keep) == len(restrictions):
            return keep
        restrictions = keep


def _normal(p, depth: int = 0) -> tuple[list, list]:
    fresh = _Fresh(free_names(p))
    restrictions, threads = flatten(p, fresh)
    restrictions = _collect(restrictions, threads)
    # absorb copies of replicated bodies: P | *P == *P
    fresh.used |= all_names(p)
    changed = True
    while changed:
        changed = False
        for t in list(threads):
            if not isinstance(t, Repl):
                continue
            rs, body = flatten(t.body, _Fresh(set(fresh.used)))
            if _collect(rs, body) or not body:
                continue
            pool = [_thread_text(u, depth) for u in threads if u is not t]
            need = [_thread_text(u, depth) for u in body]
            if any(pool.count(k) < need.count(k) for k in set(need)):
                continue
            for k in need:
                idx = next(j for j, u in enumerate(threads)
                           if u is not t and _thread_text(u, depth) == k)
                threads.pop(idx)
            changed = True
            break
    return restrictions, threads


def _binder(depth: int, i: int = 0) -> str:
    # cannot clash with source names, which never contain '%'
    return f"%{depth}%{i}"


def _under(binders, cont, depth: int) -> str:
    ren = {b: Name(_binder(depth, i)) for i, b in enumerate(binders)}
    body = substitute(cont, ren) if ren else cont
    return _nested_text(body, depth + 1)


@lru_cache(maxsize=65536)
def _thread_text(t, depth: int = 0) -> str:
    """Text of one thread, with every continuation in canonical form."""
    ty = lambda a: pretty_type(alpha_normal_type(a))
    val = lambda v: pretty_value(v)
    if isinstance(t, Repl):
        return f"*{{{_nested_text(t.body, depth)}}}"
    if isinstance(t, Output):
        return f"{t.subject}!{val(t.payload)}.{_nested_text(t.cont, depth)}"
    if isinstance(t, Input):
        return f"{t.subject}?({ty(t.annot)}).{_under([t.binder], t.cont, depth)}"
    if isinstance(t, Selection):
        return f"sel {t.subject} {t.label}.{_nested_text(t.cont, depth)}"
    if isinstance(t, Branching):
        arms = ", ".join(f"{lab}:{_nested_text(q, depth)}" for lab, q in t.arms)
        return f"bra {t.subject} {{{arms}}}"
    if isinstance(t, POutput):
        vs = ", ".join(val(v) for v in t.payloads)
        return f"{t.subject}!({vs}).{_nested_text(t.cont, depth)}"
    if isinstance(t, PInput):
        return f"{t.subject}?{len(t.binders)}.{_under(t.binders, t.cont, depth)}"
    if isinstance(t, Case):
        arms = ", ".join(f"{lab}:{_under([x], q, depth)}" for lab, (x, q) in t.arms)
        return f"case {val(t.scrutinee)} {{{arms}}}"
    raise TypeError(f"not a thread: {t!r}")


def _nested_text(p, depth: int) -> str:
    key, annots = _canonical(p, depth)
    texts, rs = key
    shown = min(tuple(pretty_type(alpha_normal_type(a)) for a in ann) for ann in annots)
    head = "".join(f"(new[{kind}] {' '.join(ns)}:{a})" for (kind, ns), a in zip(rs, shown))
    return head + "(" + " | ".join(texts) + ")"


def _render(restrictions, threads, names: dict, depth: int):
    ren = {n: Name(k) for n, k in names.items()}
    rendered = tuple(sorted(_thread_text(substitute(t, ren) if ren else t, depth)
                            for t in threads))
    res = sorted((r.kind, tuple(names[n] for n in r.names), i)
                 for i, r in enumerate(restrictions))
    return (rendered, tuple((k, ns) for k, ns, _ in res)), tuple(restrictions[i].annot
                                                                 for _, _, i in res)


def _label(order, depth: int) -> dict:
    names, k = {}, 0
    for r in order:
        for n in r.names:
            names[n] = f"@{depth}_{k}"
            k += 1
    return names


def _labelings(restrictions, threads, depth: int):
    """Candidate namings of the restricted names.

    Restrictions are ordered by kind; within a kind every order is tried when
    that is affordable, otherwise names are numbered by first occurrence over
    every order of look-alike threads.
    """
    by_kind = [list(g) for _, g in itertools.groupby(
        sorted(restrictions, key=lambda r: (r.kind, len(r.names))),
        key=lambda r: (r.kind, len(r.names)))]
    combos = math.prod(math.factorial(len(g)) for g in by_kind)
    if combos <= _MAX_EXACT_ORDERS:
        for pick in itertools.product(*(itertools.permutations(g) for g in by_kind)):
            yield _label([r for g in pick for r in g], depth)
        return
    texts = [_thread_text(t, depth) for t in threads]
    owned = {n for r in restrictions for n in r.names}

    def shape(text):
        return _NAME.sub(lambda m: "@" if m.group() in owned else m.group(), text)

    order = sorted(range(len(texts)), key=lambda i: shape(texts[i]))
    groups = [list(g) for _, g in itertools.groupby(order, key=lambda i: shape(texts[i]))]
    if math.prod(math.factorial(len(g)) for g in groups) > _MAX_TIE_PERMUTATIONS:
        choices = [[g] for g in groups]
    else:
        choices = [list(itertools.permutations(g)) for g in groups]
    owner = {n: r for r in restrictions for n in r.names}
    for pick in itertools.product(*choices):
        seen: list = []
        for i in (i for g in pick for i in g):
            for m in _NAME.finditer(texts[i]):
                r = owner.get(m.group())
                if r is not None and all(r is not q for q in seen):
                    seen.append(r)
        seen += [r for r in restrictions if all(r is not q for q in seen)]
        yield _label(seen, depth)


def _canonical(p, depth: int) -> tuple[tuple, tuple]:
    """Minimal key and the annotation tuples of every labeling reaching it."""
    restrictions, threads = _normal(p, depth)
    best, annots = None, []
    for names in _labelings(restrictions, threads, depth):
        key, ann = _render(restrictions, threads, names, depth)
        if best is None or key < best:
            best, annots = key, [ann]
        elif key == best and ann not in annots:
            annots.append(ann)
    return best, tuple(annots)


def canonical(p) -> Canonical:
    """Canonical form of ``p`` modulo structural congruence and alpha-renaming.

    Continuations are normalised too, so the relation is a congruence.  Only
    the annotations of top-level restrictions are kept apart (in
    ``annotations``) so they can be compared up to type equivalence.
    """
    key, annots = _canonical(p, 0)
    return Canonical(key, annots)


def canonical_key(p) -> tuple:
    return canonical(p).key


def struct_equiv(p, q) -> bool:
    """Structural congruence: Par laws, scope extrusion, garbage restrictions,
    one-copy replication unfolding, and alpha-renaming.  Restriction
    annotations are compared up to type equivalence."""
    cp, cq = canonical(p), canonical(q)
    if cp.key != cq.key:
        return False
    target = cq.annotations[0]
    return any(all(a == b or equiv(a, b) for a, b in zip(ann, target))
               for ann in cp.annotations)


def hook_equiv(q1, q2) -> bool:
    """``q1`` is congruent to ``q2``, possibly after one ``case`` reduction of ``q1``."""
    if struct_equiv(q1, q2):
        return True
    return any(s.rule == "R-Case" and not isinstance(s.process, Fault)
               and struct_equiv(s.process, q2) for s in step_pi(q1))


# ---------------------------------------------------------------------------
# traces


@dataclass(frozen=True)
class TraceEntry:
    process: object
    rule: str
    location: str


def run(p, steps: int, chooser=None) -> list[TraceEntry]:
    """Follow the first available step (or ``chooser(steps)``) up to ``steps`` times."""
    trace = [TraceEntry(p, "start", "")]
    cur = p
    for _ in range(steps):
        options = step(cur)
        if not options:
            break
        pick = chooser(options) if chooser else options[0]
        trace.append(TraceEntry(pick.process, pick.rule, pick.location))
        if isinstance(pick.process, Fault):
            break
        cur = pick.process
    return trace


def format_trace(trace: list[TraceEntry]) -> str:
    lines = []
    for e in trace:
        if e.rule != "start":
            lines.append(f"--rule {e.rule} at {e.location}")
        text = e.process.message if isinstance(e.process, Fault) else pretty(e.process)
        lines.append(text)
    return "\n".join(lines)


def concurrent_rounds(trace: list[TraceEntry]) -> list[list[TraceEntry]]:
    """Group a trace into rounds of independent steps.

    A step joins the current round when its redex was already enabled in the
    state the round started from and no earlier step of the round fired at the
    same location.  Steps of one round can therefore fire in any order.
    """
    rounds: list[list[TraceEntry]] = []
    start, enabled = None, set()
    for prev, e in zip(trace, trace[1:]):
        joins = (rounds and (e.rule, e.location) in enabled
                 and all(e.location != f.location for f in rounds[-1]))
        if joins:
            rounds[-1].append(e)
            continue
        start = prev.process
        enabled = set() if isinstance(start, Fault) else {(s.rule, s.location) for s in step(start)}
        rounds.append([e])
    return rounds
