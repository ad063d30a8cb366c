"""Abstract syntax for the session pi-calculus and the linear pi-calculus.

Types of both calculi share the variable, recursion and unit nodes.  Session
types add ``End``/``Send``/``Recv``/``Select``/``Branch`` and the channel
type ``Chan``; linear pi types add ``NoCap``, the four capability shapes and
``Variant``.  Processes share ``Par``, ``Repl`` and ``Nil``.

Labelled constructs store their arms as label-sorted tuples, so two nodes
that differ only in arm order compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Union


class SyntaxError_(ValueError):
    """Raised when a node violates a construction invariant."""


def _arms(items: Mapping | Iterable) -> tuple:
    pairs = list(items.items()) if isinstance(items, Mapping) else list(items)
    labels = [lab for lab, _ in pairs]
    if not pairs:
        raise SyntaxError_("labelled construct with no arms")
    if len(set(labels)) != len(labels):
        raise SyntaxError_(f"duplicate labels in {labels}")
    return tuple(sorted(pairs, key=lambda p: p[0]))


# ---------------------------------------------------------------------------
# types


@dataclass(frozen=True)
class TVar:
    name: str
    dual: bool = False

    def flipped(self) -> "TVar":
        return TVar(self.name, not self.dual)


@dataclass(frozen=True)
class Rec:
    var: str
    body: "AnyType"


@dataclass(frozen=True)
class Unit:
    pass


@dataclass(frozen=True)
class End:
    pass


@dataclass(frozen=True)
class Send:
    carried: "Type"
    cont: "SessionType"


@dataclass(frozen=True)
class Recv:
    carried: "Type"
    cont: "SessionType"


@dataclass(frozen=True)
class Select:
    branches: tuple

    def __init__(self, branches):
        object.__setattr__(self, "branches", _arms(branches))

    def get(self, label):
        return dict(self.branches).get(label)


@dataclass(frozen=True)
class Branch:
    branches: tuple

    def __init__(self, branches):
        object.__setattr__(self, "branches", _arms(branches))

    def get(self, label):
        return dict(self.branches).get(label)


@dataclass(frozen=True)
class Chan:
    """Unlimited standard channel type ``#T`` of the session calculus."""

    carried: "Type"


@dataclass(frozen=True)
class NoCap:
    """``empty[]``: a channel with no capability left."""


@dataclass(frozen=True)
class Conn:
    carried: tuple


@dataclass(frozen=True)
class LinIn:
    carried: tuple


@dataclass(frozen=True)
class LinOut:
    carried: tuple


@dataclass(frozen=True)
class LinConn:
    carried: tuple


@dataclass(frozen=True)
class Variant:
    cases: tuple

    def __init__(self, cases):
        object.__setattr__(self, "cases", _arms(cases))

    def get(self, label):
        return dict(self.cases).get(label)


SessionType = Union[End, Send, Recv, Select, Branch, TVar, Rec]
Type = Union[SessionType, Chan, Unit]
PiType = Union[NoCap, Conn, LinIn, LinOut, LinConn, Variant, Unit, TVar, Rec]
AnyType = Union[Type, PiType]

SESSION_NODES = (End, Send, Recv, Select, Branch)
CHANNEL_NODES = (NoCap, Conn, LinIn, LinOut, LinConn)
PI_NODES = CHANNEL_NODES + (Variant,)


def children(t) -> list[tuple[object, bool]]:
    """Immediate sub-types of ``t`` paired with a flag: is it a carried position?"""
    if isinstance(t, (Send, Recv)):
        return [(t.carried, True), (t.cont, False)]
    if isinstance(t, (Select, Branch)):
        return [(s, False) for _, s in t.branches]
    if isinstance(t, Chan):
        return [(t.carried, True)]
    if isinstance(t, (Conn, LinIn, LinOut, LinConn)):
        return [(s, True) for s in t.carried]
    if isinstance(t, Variant):
        return [(s, True) for _, s in t.cases]
    if isinstance(t, Rec):
        return [(t.body, False)]
    return []


def rebuild(t, kids: list):
    """Rebuild ``t`` with new children, in the order given by :func:`children`."""
    if isinstance(t, Send):
        return Send(kids[0], kids[1])
    if isinstance(t, Recv):
        return Recv(kids[0], kids[1])
    if isinstance(t, Select):
        return Select(zip([lab for lab, _ in t.branches], kids))
    if isinstance(t, Branch):
        return Branch(zip([lab for lab, _ in t.branches], kids))
    if isinstance(t, Chan):
        return Chan(kids[0])
    if isinstance(t, (Conn, LinIn, LinOut, LinConn)):
        return type(t)(tuple(kids))
    if isinstance(t, Variant):
        return Variant(zip([lab for lab, _ in t.cases], kids))
    if isinstance(t, Rec):
        return Rec(t.var, kids[0])
    return t


@lru_cache(maxsize=None)
def free_type_vars(t) -> frozenset:
    """Names of type variables not bound by an enclosing ``Rec``."""
    if isinstance(t, TVar):
        return frozenset([t.name])
    if isinstance(t, Rec):
        return free_type_vars(t.body) - {t.var}
    out = frozenset()
    for kid, _ in children(t):
        out |= free_type_vars(kid)
    return out


def is_guarded(t) -> bool:
    """Every recursion variable occurs under a constructor other than ``rec``."""

    def walk(t, unguarded: frozenset) -> bool:
        if isinstance(t, TVar):
            return t.name not in unguarded
        if isinstance(t, Rec):
            return walk(t.body, unguarded | {t.var})
        return all(walk(k, frozenset()) for k, _ in children(t))

    return walk(t, frozenset())


def _labels_ok(t) -> bool:
    # Construction already rejects duplicates; this guards hand-built tuples.
    if isinstance(t, (Select, Branch)):
        labs = [lab for lab, _ in t.branches]
    elif isinstance(t, Variant):
        labs = [lab for lab, _ in t.cases]
    else:
        labs = []
    if len(labs) != len(set(labs)):
        return False
    return all(_labels_ok(k) for k, _ in children(t))


def rec_kind(t) -> type | None:
    """Top constructor class under any leading ``rec`` binders."""
    while isinstance(t, Rec):
        t = t.body
    return None if isinstance(t, TVar) else type(t)


def _duals_ok(t, env: Mapping[str, bool]) -> bool:
    # A dualised variable needs a binder whose body is a session type or a
    # linear/empty channel type, otherwise its complement is undefined.
    if isinstance(t, TVar):
        return not t.dual or env.get(t.name, False)
    if isinstance(t, Rec):
        kind = rec_kind(t.body)
        ok = kind is not None and (kind in SESSION_NODES or kind in (NoCap, LinIn, LinOut))
        return _duals_ok(t.body, {**env, t.var: ok})
    return all(_duals_ok(k, env) for k, _ in children(t))


def _calculus_ok(t, pi: bool) -> bool:
    bad = (End, Send, Recv, Select, Branch, Chan) if pi else PI_NODES
    if isinstance(t, bad):
        return False
    return all(_calculus_ok(k, pi) for k, _ in children(t))


@lru_cache(maxsize=None)
def well_formed(t) -> bool:
    """Closed, guarded, distinct labels, and dualised variables only where meaningful."""
    pi = _is_pi_type(t)
    return (
        not free_type_vars(t)
        and is_guarded(t)
        and _labels_ok(t)
        and _duals_ok(t, {})
        and _calculus_ok(t, pi)
    )


def _is_pi_type(t) -> bool:
    if isinstance(t, PI_NODES):
        return True
    if isinstance(t, (Rec,)):
        return _is_pi_type(t.body)
    return False


def is_session_type(t) -> bool:
    return rec_kind(t) in SESSION_NODES


# ---------------------------------------------------------------------------
# values and processes


@dataclass(frozen=True)
class Name:
    name: str


@dataclass(frozen=True)
class UnitVal:
    pass


@dataclass(frozen=True)
class VariantVal:
    label: str
    payload: "PiValue"


SessionValue = Union[Name, UnitVal]
PiValue = Union[Name, UnitVal, VariantVal]


@dataclass(frozen=True)
class Nil:
    pass


@dataclass(frozen=True)
class Hole:
    """The hole of an evaluation context."""


@dataclass(frozen=True)
class Par:
    left: object
    right: object


@dataclass(frozen=True)
class Repl:
    body: object


@dataclass(frozen=True)
class Output:
    subject: str
    payload: SessionValue
    cont: object


@dataclass(frozen=True)
class Input:
    subject: str
    binder: str
    annot: Type
    cont: object


@dataclass(frozen=True)
class Selection:
    subject: str
    label: str
    cont: object


@dataclass(frozen=True)
class Branching:
    subject: str
    arms: tuple

    def __init__(self, subject, arms):
        object.__setattr__(self, "subject", subject)
        object.__setattr__(self, "arms", _arms(arms))


@dataclass(frozen=True)
class SessRes:
    x: str
    y: str
    annot: SessionType
    body: object

    def __post_init__(self):
        if self.x == self.y:
            raise SyntaxError_(f"co-variables must differ, got {self.x!r} twice")


@dataclass(frozen=True)
class ChanRes:
    name: str
    annot: Type
    body: object


@dataclass(frozen=True)
class POutput:
    subject: str
    payloads: tuple
    cont: object


@dataclass(frozen=True)
class PInput:
    subject: str
    binders: tuple
    cont: object


@dataclass(frozen=True)
class Case:
    scrutinee: PiValue
    arms: tuple  # ((label, (binder, process)), ...)

    def __init__(self, scrutinee, arms):
        object.__setattr__(self, "scrutinee", scrutinee)
        object.__setattr__(self, "arms", _arms(arms))


@dataclass(frozen=True)
class PRes:
    name: str
    annot: PiType
    body: object


SessionProcess = Union[Output, Input, Selection, Branching, Par, SessRes, ChanRes, Repl, Nil]
PiProcess = Union[POutput, PInput, Case, Par, PRes, Repl, Nil]


def par(*procs):
    """Right-nested parallel composition; ``par()`` is ``Nil``."""
    if not procs:
        return Nil()
    out = procs[-1]
    for p in reversed(procs[:-1]):
        out = Par(p, out)
    return out


def value_names(v) -> set[str]:
    if isinstance(v, Name):
        return {v.name}
    if isinstance(v, VariantVal):
        return value_names(v.payload)
    return set()


def free_names(p) -> frozenset:
    """Free channel names of a process of either calculus."""
    return _free_names(p)


@lru_cache(maxsize=None)
def _free_names(p) -> frozenset:
    if isinstance(p, (Nil, Hole)):
        return frozenset()
    if isinstance(p, Par):
        return _free_names(p.left) | _free_names(p.right)
    if isinstance(p, Repl):
        return _free_names(p.body)
    if isinstance(p, Output):
        return frozenset({p.subject} | value_names(p.payload)) | _free_names(p.cont)
    if isinstance(p, Input):
        return frozenset({p.subject}) | (_free_names(p.cont) - {p.binder})
    if isinstance(p, Selection):
        return frozenset({p.subject}) | _free_names(p.cont)
    if isinstance(p, Branching):
        out = frozenset({p.subject})
        for _, q in p.arms:
            out |= _free_names(q)
        return out
    if isinstance(p, SessRes):
        return _free_names(p.body) - {p.x, p.y}
    if isinstance(p, (ChanRes, PRes)):
        return _free_names(p.body) - {p.name}
    if isinstance(p, POutput):
        out = frozenset({p.subject})
        for v in p.payloads:
            out |= value_names(v)
        return out | _free_names(p.cont)
    if isinstance(p, PInput):
        return frozenset({p.subject}) | (_free_names(p.cont) - set(p.binders))
    if isinstance(p, Case):
        out = frozenset(value_names(p.scrutinee))
        for _, (x, q) in p.arms:
            out |= _free_names(q) - {x}
        return out
    raise TypeError(f"not a process: {p!r}")


def all_names(p) -> set[str]:
    """Every name occurring in ``p``, free or bound."""
    out: set[str] = set()

    def walk(p):
        if isinstance(p, (Output, Input, Selection, Branching, POutput, PInput)):
            out.add(p.subject)
        if isinstance(p, Output):
            out.update(value_names(p.payload))
        elif isinstance(p, POutput):
            for v in p.payloads:
                out.update(value_names(v))
        elif isinstance(p, Input):
            out.add(p.binder)
        elif isinstance(p, PInput):
            out.update(p.binders)
        elif isinstance(p, SessRes):
            out.update((p.x, p.y))
        elif isinstance(p, (ChanRes, PRes)):
            out.add(p.name)
        elif isinstance(p, Case):
            out.update(value_names(p.scrutinee))
            for _, (x, _q) in p.arms:
                out.add(x)
        for q in subprocesses(p):
            walk(q)

    walk(p)
    return out


def subprocesses(p) -> list:
    if isinstance(p, Par):
        return [p.left, p.right]
    if isinstance(p, (Repl, SessRes, ChanRes, PRes)):
        return [p.body]
    if isinstance(p, (Output, Input, Selection, POutput, PInput)):
        return [p.cont]
    if isinstance(p, Branching):
        return [q for _, q in p.arms]
    if isinstance(p, Case):
        return [q for _, (_x, q) in p.arms]
    return []


def with_subprocesses(p, kids: list):
    """Rebuild ``p`` with its immediate subprocesses replaced, in ``subprocesses`` order."""
    if isinstance(p, Par):
        return Par(kids[0], kids[1])
    if isinstance(p, Repl):
        return Repl(kids[0])
    if isinstance(p, SessRes):
        return SessRes(p.x, p.y, p.annot, kids[0])
    if isinstance(p, (ChanRes, PRes)):
        return type(p)(p.name, p.annot, kids[0])
    if isinstance(p, Output):
        return Output(p.subject, p.payload, kids[0])
    if isinstance(p, Input):
        return Input(p.subject, p.binder, p.annot, kids[0])
    if isinstance(p, Selection):
        return Selection(p.subject, p.label, kids[0])
    if isinstance(p, POutput):
        return POutput(p.subject, p.payloads, kids[0])
    if isinstance(p, PInput):
        return PInput(p.subject, p.binders, kids[0])
    if isinstance(p, Branching):
        return Branching(p.subject, [(lab, q) for (lab, _), q in zip(p.arms, kids)])
    if isinstance(p, Case):
        return Case(p.scrutinee, [(lab, (x, q)) for (lab, (x, _)), q in zip(p.arms, kids)])
    return p


def process_size(p) -> int:
    """Number of process constructors in ``p``, not counting the ``0`` leaves."""
    if isinstance(p, Nil):
        return 0
    return 1 + sum(process_size(q) for q in subprocesses(p))


# ---------------------------------------------------------------------------
# alpha equivalence


@lru_cache(maxsize=None)
def alpha_normal_type(t, depth: int = 0, env: tuple = ()):
    """Rename ``rec`` binders to depth-indexed names that cannot clash with source names."""
    if isinstance(t, TVar):
        for name, new in reversed(env):
            if name == t.name:
                return TVar(new, t.dual)
        return t
    if isinstance(t, Rec):
        new = f"%{depth}"
        return Rec(new, alpha_normal_type(t.body, depth + 1, env + ((t.var, new),)))
    kids = children(t)
    if not kids:
        return t
    return rebuild(t, [alpha_normal_type(k, depth, env) for k, _ in kids])


def _rename_value(v, env: dict):
    if isinstance(v, Name):
        return Name(env.get(v.name, v.name))
    if isinstance(v, VariantVal):
        return VariantVal(v.label, _rename_value(v.payload, env))
    return v


def alpha_normal_process(p, with_types: bool = True):
    """Rename every bound name to a traversal-indexed name."""
    counter = [0]

    def fresh():
        counter[0] += 1
        return f"%{counter[0]}"

    def ty(t):
        return alpha_normal_type(t) if with_types else None

    def walk(p, env: dict):
        if isinstance(p, (Nil, Hole)):
            return p
        if isinstance(p, Par):
            return Par(walk(p.left, env), walk(p.right, env))
        if isinstance(p, Repl):
            return Repl(walk(p.body, env))
        s = env.get(getattr(p, "subject", None), getattr(p, "subject", None))
        if isinstance(p, Output):
            return Output(s, _rename_value(p.payload, env), walk(p.cont, env))
        if isinstance(p, Input):
            b = fresh()
            return Input(s, b, ty(p.annot), walk(p.cont, {**env, p.binder: b}))
        if isinstance(p, Selection):
            return Selection(s, p.label, walk(p.cont, env))
        if isinstance(p, Branching):
            return Branching(s, [(lab, walk(q, env)) for lab, q in p.arms])
        if isinstance(p, SessRes):
            x, y = fresh(), fresh()
            return SessRes(x, y, ty(p.annot), walk(p.body, {**env, p.x: x, p.y: y}))
        if isinstance(p, (ChanRes, PRes)):
            a = fresh()
            return type(p)(a, ty(p.annot), walk(p.body, {**env, p.name: a}))
        if isinstance(p, POutput):
            return POutput(s, tuple(_rename_value(v, env) for v in p.payloads), walk(p.cont, env))
        if isinstance(p, PInput):
            bs = tuple(fresh() for _ in p.binders)
            return PInput(s, bs, walk(p.cont, {**env, **dict(zip(p.binders, bs))}))
        if isinstance(p, Case):
            arms = []
            for lab, (x, q) in p.arms:
                b = fresh()
                arms.append((lab, (b, walk(q, {**env, x: b}))))
            return Case(_rename_value(p.scrutinee, env), arms)
        raise TypeError(f"not a process: {p!r}")

    return walk(p, {})


def alpha_eq(a, b) -> bool:
    """Equality up to consistent renaming of bound type variables and bound names."""
    if _is_process(a) or _is_process(b):
        if not (_is_process(a) and _is_process(b)):
            return False
        return alpha_normal_process(a) == alpha_normal_process(b)
    if isinstance(a, (Name, UnitVal, VariantVal)):
        return a == b
    return alpha_normal_type(a) == alpha_normal_type(b)


_PROCESS_NODES = (Nil, Hole, Par, Repl, Output, Input, Selection, Branching, SessRes, ChanRes,
                  POutput, PInput, Case, PRes)


def _is_process(x) -> bool:
    return isinstance(x, _PROCESS_NODES)


def is_pi_process(p) -> bool:
    """True if ``p`` contains only nodes of the linear pi-calculus."""
    if isinstance(p, (Output, Input, Selection, Branching, SessRes, ChanRes)):
        return False
    return all(is_pi_process(q) for q in subprocesses(p))


def is_session_process(p) -> bool:
    if isinstance(p, (POutput, PInput, Case, PRes)):
        return False
    return all(is_session_process(q) for q in subprocesses(p))
