"""Slow, obviously-correct reference implementations used as test oracles."""

from functools import lru_cache

from sessenc.syntax import (
    Branch, Chan, Conn, End, LinConn, LinIn, LinOut, NoCap, Rec, Recv, Select, Send, TVar,
    Unit, Variant, children, rebuild,
)


def naive_subst(t, var, s, comp):
    """Textbook substitution of ``s`` for ``var`` (``comp`` for ``~var``)."""
    if isinstance(t, TVar):
        if t.name != var:
            return t
        return comp if t.dual else s
    if isinstance(t, Rec):
        return t if t.var == var else Rec(t.var, naive_subst(t.body, var, s, comp))
    kids = children(t)
    return rebuild(t, [naive_subst(k, var, s, comp) for k, _ in kids]) if kids else t


@lru_cache(maxsize=None)
def bounded_sub(t, s, k):
    """Depth-``k`` approximation of subtyping: no mismatch within ``k`` unfoldings."""
    from sessenc import unfold
    if k == 0:
        return True
    ut, us = unfold(t), unfold(s)
    d = k - 1
    both = lambda a, b: bounded_sub(a, b, d) and bounded_sub(b, a, d)
    if isinstance(ut, (End, Unit, NoCap)):
        return type(us) is type(ut)
    if type(ut) is not type(us):
        return False
    if isinstance(ut, Recv):
        return bounded_sub(ut.carried, us.carried, d) and bounded_sub(ut.cont, us.cont, d)
    if isinstance(ut, Send):
        return bounded_sub(us.carried, ut.carried, d) and bounded_sub(ut.cont, us.cont, d)
    if isinstance(ut, Branch):
        a, b = dict(ut.branches), dict(us.branches)
        return set(a) <= set(b) and all(bounded_sub(a[l], b[l], d) for l in a)
    if isinstance(ut, Select):
        a, b = dict(ut.branches), dict(us.branches)
        return set(b) <= set(a) and all(bounded_sub(a[l], b[l], d) for l in b)
    if isinstance(ut, Chan):
        return both(ut.carried, us.carried)
    if isinstance(ut, (LinIn, LinOut)):
        return len(ut.carried) == len(us.carried) and all(
            bounded_sub(a, b, d) for a, b in zip(ut.carried, us.carried))
    if isinstance(ut, (Conn, LinConn)):
        return len(ut.carried) == len(us.carried) and all(
            both(a, b) for a, b in zip(ut.carried, us.carried))
    if isinstance(ut, Variant):
        a, b = dict(ut.cases), dict(us.cases)
        return set(a) == set(b) and all(both(a[l], b[l]) for l in a)
    raise AssertionError(ut)


def bounded_equiv(t, s, k):
    return bounded_sub(t, s, k) and bounded_sub(s, t, k)
