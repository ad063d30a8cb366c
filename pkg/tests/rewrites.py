"""Random applications of structural-congruence laws, used to test ≡ and stepping."""

import random

from sessenc.semantics import flatten, _Fresh
from sessenc.syntax import (
    ChanRes, Nil, NoCap, Par, PRes, Repl, SessRes, all_names, free_names, subprocesses,
    with_subprocesses,
)


def _fresh_name(p, stem="g"):
    taken = all_names(p)
    i = 0
    while f"{stem}{i}" in taken:
        i += 1
    return f"{stem}{i}"


def _rename_binder(p, new):
    from sessenc.semantics import substitute
    if isinstance(p, SessRes):
        return SessRes(new, p.y, p.annot, substitute(p.body, {p.x: _n(new)}))
    return type(p)(new, p.annot, substitute(p.body, {p.name: _n(new)}))


def _n(x):
    from sessenc.syntax import Name
    return Name(x)


def _top_moves(p, pi):
    moves = [lambda: Par(p, Nil())]
    if isinstance(p, Par):
        moves.append(lambda: Par(p.right, p.left))
        if isinstance(p.right, Par):
            moves.append(lambda: Par(Par(p.left, p.right.left), p.right.right))
        left = p.left
        if isinstance(left, (ChanRes, PRes)) and left.name not in free_names(p.right):
            moves.append(lambda: type(left)(left.name, left.annot, Par(left.body, p.right)))
        if isinstance(left, SessRes) and not {left.x, left.y} & free_names(p.right):
            moves.append(lambda: SessRes(left.x, left.y, left.annot, Par(left.body, p.right)))
    if isinstance(p, Repl) and not flatten(p.body, _Fresh(set()))[0]:
        moves.append(lambda: Par(p.body, p))
    if isinstance(p, (ChanRes, PRes, SessRes)):
        moves.append(lambda: _rename_binder(p, _fresh_name(p, "r")))
    if pi:
        moves.append(lambda: PRes(_fresh_name(p), NoCap(), p))
    return moves


def rewrite(p, rng: random.Random, pi: bool, depth: int = 0):
    """One random ≡ move somewhere in ``p`` (congruence closure included)."""
    kids = subprocesses(p)
    if kids and rng.random() < 0.5 and depth < 6:
        i = rng.randrange(len(kids))
        new = list(kids)
        new[i] = rewrite(kids[i], rng, pi, depth + 1)
        return with_subprocesses(p, new)
    return rng.choice(_top_moves(p, pi))()


def scramble(p, rng: random.Random, pi: bool, moves: int = 6):
    for _ in range(moves):
        p = rewrite(p, rng, pi)
    return p
