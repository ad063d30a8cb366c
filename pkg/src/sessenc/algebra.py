"""Unfolding, substitution, complement, and the coinductive type relations.

Subtyping, equivalence and duality are decided by the usual greatest-fixed-point
search: a pair is assumed to hold when first visited, both sides are unfolded
and the clause matching the exposed constructors is checked.  Revisiting an
assumed pair answers true.  Every clause is a conjunction, so a single
assumption set per query is sound even when a sibling check fails.

Complement and dualised variables
---------------------------------
A dualised variable ``~X`` stands for the complement of whatever ``X`` is bound
to, so ``unfold(rec X.T)`` replaces ``X`` by the recursive type and ``~X`` by
its complement.  Complementing an open term flips its free variables
(``X`` <-> ``~X``).  Complementing ``rec X.T`` rebinds ``X`` to the complement,
so occurrences of ``X`` in continuation positions keep their spelling while
occurrences in carried positions (whose meaning must not change) are toggled.
This makes the complement an involution on syntax and keeps it finite even when
``~X`` occurs in a carried position.
"""

from __future__ import annotations

from functools import lru_cache

from .syntax import (
    Branch, Chan, Conn, End, LinConn, LinIn, LinOut, NoCap, Rec, Recv, Select, Send, TVar,
    Unit, Variant, alpha_normal_type, children, is_session_type, rebuild, rec_kind,
    well_formed, CHANNEL_NODES,
)


class TypeAlgebraError(ValueError):
    """Raised on ill-formed input or on shapes a function is not defined for."""


def _require_wf(*ts):
    for t in ts:
        if not well_formed(t):
            raise TypeAlgebraError(f"not a closed, guarded, well-formed type: {t!r}")


# ---------------------------------------------------------------------------
# substitution and unfolding


def subst(t, var: str, s, dual=None):
    """Replace free ``var`` by ``s`` and free ``~var`` by the complement of ``s``.

    ``dual`` overrides the replacement used for ``~var``.
    """
    return _subst(t, var, s, dual)


@lru_cache(maxsize=None)
def _subst(t, var, s, dual):
    if isinstance(t, TVar):
        if t.name != var:
            return t
        if not t.dual:
            return s
        return dual if dual is not None else complement(s)
    if isinstance(t, Rec):
        if t.var == var:
            return t
        return Rec(t.var, _subst(t.body, var, s, dual))
    kids = children(t)
    if not kids:
        return t
    return rebuild(t, [_subst(k, var, s, dual) for k, _ in kids])


def carried_subst(t, var: str, s, dual=None):
    """Substitute only inside carried positions.

    Carried positions are the message types of ``!T.S``/``?T.S``, the payload of
    ``#T``, and the payloads of pi channel types and variant cases.  Within a
    carried subtree the ordinary substitution applies in full.
    """
    if isinstance(t, Rec) and t.var == var:
        return t
    kids = children(t)
    if not kids:
        return t
    new = [subst(k, var, s, dual) if carried else carried_subst(k, var, s, dual)
           for k, carried in kids]
    return rebuild(t, new)


@lru_cache(maxsize=None)
def unfold(t):
    """Unfold leading ``rec`` binders until another constructor is on top."""
    seen = 0
    while isinstance(t, Rec):
        t = subst(t.body, t.var, t)
        seen += 1
        if seen > 10_000:
            raise TypeAlgebraError("unguarded recursion while unfolding")
    return t


# ---------------------------------------------------------------------------
# complement


def complement(t):
    """Complement of a session type or of a linear pi channel type, chosen by shape."""
    kind = rec_kind(t)
    if kind in CHANNEL_NODES or kind in (Variant,):
        return complement_pi(t)
    return complement_session(t)


def _toggle(t, names: frozenset):
    if not names:
        return t
    if isinstance(t, TVar):
        return t.flipped() if t.name in names else t
    if isinstance(t, Rec):
        return Rec(t.var, _toggle(t.body, names - {t.var}))
    kids = children(t)
    if not kids:
        return t
    return rebuild(t, [_toggle(k, names) for k, _ in kids])


@lru_cache(maxsize=None)
def _complement(t, rebound: frozenset, pi: bool):
    if isinstance(t, TVar):
        return t if t.name in rebound else t.flipped()
    if isinstance(t, Rec):
        return Rec(t.var, _complement(t.body, rebound | {t.var}, pi))
    if not pi:
        if isinstance(t, End):
            return t
        if isinstance(t, Send):
            return Recv(_toggle(t.carried, rebound), _complement(t.cont, rebound, pi))
        if isinstance(t, Recv):
            return Send(_toggle(t.carried, rebound), _complement(t.cont, rebound, pi))
        if isinstance(t, Select):
            return Branch([(lab, _complement(s, rebound, pi)) for lab, s in t.branches])
        if isinstance(t, Branch):
            return Select([(lab, _complement(s, rebound, pi)) for lab, s in t.branches])
        raise TypeAlgebraError(f"complement is not defined on non-session type {t!r}")
    if isinstance(t, NoCap):
        return t
    if isinstance(t, LinIn):
        return LinOut(tuple(_toggle(s, rebound) for s in t.carried))
    if isinstance(t, LinOut):
        return LinIn(tuple(_toggle(s, rebound) for s in t.carried))
    raise TypeAlgebraError(f"complement is not defined on {type(t).__name__} at top level")


def complement_session(s):
    """Complement of a session type: swaps send/receive and select/branch."""
    return _complement(s, frozenset(), False)


def complement_pi(t):
    """Complement of a linear pi type: swaps ``li``/``lo``; payloads keep their meaning."""
    return _complement(t, frozenset(), True)


# ---------------------------------------------------------------------------
# coinductive relations


def _key(t, s):
    return alpha_normal_type(t), alpha_normal_type(s)


class _Simulation:
    """One subtyping query; ``assumed`` is the candidate type simulation."""

    def __init__(self):
        self.assumed: set = set()

    def sub(self, t, s) -> bool:
        key = _key(t, s)
        if key in self.assumed:
            return True
        self.assumed.add(key)
        ut, us = unfold(t), unfold(s)
        if isinstance(ut, TVar) or isinstance(us, TVar):
            raise TypeAlgebraError("free type variable reached during simulation")
        if isinstance(ut, (End, Unit, NoCap)):
            return type(us) is type(ut)
        if isinstance(ut, Recv):
            return (isinstance(us, Recv) and self.sub(ut.carried, us.carried)
                    and self.sub(ut.cont, us.cont))
        if isinstance(ut, Send):
            return (isinstance(us, Send) and self.sub(us.carried, ut.carried)
                    and self.sub(ut.cont, us.cont))
        if isinstance(ut, Branch):
            if not isinstance(us, Branch):
                return False
            mine, theirs = dict(ut.branches), dict(us.branches)
            return set(mine) <= set(theirs) and all(self.sub(mine[l], theirs[l]) for l in mine)
        if isinstance(ut, Select):
            if not isinstance(us, Select):
                return False
            mine, theirs = dict(ut.branches), dict(us.branches)
            return set(theirs) <= set(mine) and all(self.sub(mine[l], theirs[l]) for l in theirs)
        if isinstance(ut, Chan):
            return (isinstance(us, Chan) and self.sub(ut.carried, us.carried)
                    and self.sub(us.carried, ut.carried))
        if isinstance(ut, (LinIn, LinOut)):
            return (type(us) is type(ut) and len(us.carried) == len(ut.carried)
                    and all(self.sub(a, b) for a, b in zip(ut.carried, us.carried)))
        if isinstance(ut, (Conn, LinConn)):
            return (type(us) is type(ut) and len(us.carried) == len(ut.carried)
                    and all(self.sub(a, b) and self.sub(b, a)
                            for a, b in zip(ut.carried, us.carried)))
        if isinstance(ut, Variant):
            if not isinstance(us, Variant):
                return False
            mine, theirs = dict(ut.cases), dict(us.cases)
            return set(mine) == set(theirs) and all(
                self.sub(mine[l], theirs[l]) and self.sub(theirs[l], mine[l]) for l in mine)
        raise TypeAlgebraError(f"unexpected type node {ut!r}")


@lru_cache(maxsize=None)
def _subtype(t, s) -> bool:
    return _Simulation().sub(t, s)


@lru_cache(maxsize=None)
def _equiv(t, s) -> bool:
    return _subtype(t, s) and _subtype(s, t)


class _Duality:
    def __init__(self):
        self.assumed: set = set()

    def dual(self, t, s) -> bool:
        key = _key(t, s)
        if key in self.assumed:
            return True
        self.assumed.add(key)
        ut, us = unfold(t), unfold(s)
        if isinstance(ut, End):
            return isinstance(us, End)
        if isinstance(ut, NoCap):
            return isinstance(us, NoCap)
        if isinstance(ut, Recv):
            return (isinstance(us, Send) and _equiv(ut.carried, us.carried)
                    and self.dual(ut.cont, us.cont))
        if isinstance(ut, Send):
            return (isinstance(us, Recv) and _equiv(ut.carried, us.carried)
                    and self.dual(ut.cont, us.cont))
        if isinstance(ut, (Branch, Select)):
            other = Select if isinstance(ut, Branch) else Branch
            if not isinstance(us, other):
                return False
            mine, theirs = dict(ut.branches), dict(us.branches)
            return set(mine) == set(theirs) and all(self.dual(mine[l], theirs[l]) for l in mine)
        if isinstance(ut, (LinIn, LinOut)):
            other = LinOut if isinstance(ut, LinIn) else LinIn
            return (isinstance(us, other) and len(us.carried) == len(ut.carried)
                    and all(_equiv(a, b) for a, b in zip(ut.carried, us.carried)))
        return False


@lru_cache(maxsize=None)
def _dual(t, s) -> bool:
    return _Duality().dual(t, s)


def subtype_session(t, s) -> bool:
    """``t`` is a subtype of ``s``: some type simulation contains the pair."""
    _require_wf(t, s)
    return _subtype(t, s)


def equiv_session(t, s) -> bool:
    _require_wf(t, s)
    return _equiv(t, s)


def dual_session(t, s) -> bool:
    """Coinductive duality of two session types; carried types must be equivalent."""
    _require_wf(t, s)
    return _dual(t, s)


def subtype_pi(t, s) -> bool:
    _require_wf(t, s)
    return _subtype(t, s)


def equiv_pi(t, s) -> bool:
    _require_wf(t, s)
    return _equiv(t, s)


def dual_pi(t, s) -> bool:
    """Coinductive duality of linear pi types: opposite capabilities, equivalent payloads."""
    _require_wf(t, s)
    return _dual(t, s)


def subtype(t, s) -> bool:
    """Subtyping on any pair of closed types of the same calculus."""
    return _subtype(t, s)


def equiv(t, s) -> bool:
    return _equiv(t, s)


__all__ = [
    "TypeAlgebraError", "subst", "carried_subst", "unfold", "complement",
    "complement_session", "complement_pi", "subtype_session", "equiv_session",
    "dual_session", "subtype_pi", "equiv_pi", "dual_pi", "subtype", "equiv",
    "is_session_type",
]
