import random

import pytest
from hypothesis import given, settings, strategies as st

from sessenc import (
    Fault, concurrent_rounds, decompose, encode, hook_equiv, parse_pi_process as pp,
    parse_session_process as sp, plug, run, step_pi, step_session, struct_equiv,
)
from sessenc.correspondence import process_corpus
from sessenc.semantics import canonical_key, format_trace, substitute
from sessenc.syntax import (
    Branching, ChanRes, Hole, Input, Name, Nil, Output, Par, PRes, Repl, Selection, SessRes,
    subprocesses, with_subprocesses,
)

from rewrites import scramble

CORPUS = process_corpus(80, seed=5)


def keys(steps):
    return {("fault",) if isinstance(s.process, Fault) else canonical_key(s.process)
            for s in steps}


@pytest.mark.parametrize("left, right", [
    ("a!().0 | b!().0", "b!().0 | a!().0"),
    ("a!().0 | (b!().0 | c!().0)", "(a!().0 | b!().0) | c!().0"),
    ("a!().0 | 0", "a!().0"),
    ("(new c:l#[])(c!().0) | a!().0", "(new c:l#[])(c!().0 | a!().0)"),
    ("(new c:l#[])(c!().0)", "(new d:l#[])(d!().0)"),
    ("(new c:l#[])a!().0", "a!().0"),
    ("*a?(x).0", "a?(y).0 | *a?(x).0"),
    ("a?(x).(x!().0 | b!().0)", "a?(y).(b!().0 | y!().0)"),
    ("(new c:li[unit])c?(x).0", "(new c:li[unit])c?(x).0"),
])
def test_congruent(left, right):
    assert struct_equiv(pp(left), pp(right))


@pytest.mark.parametrize("left, right", [
    ("a!().0", "b!().0"),
    ("a!().0", "0"),
    ("a!().0 | a!().0", "a!().0"),
    ("(new c:l#[])c!().0", "c!().0"),
    ("a?(x).x!().0", "a?(x).b!().0"),
])
def test_not_congruent(left, right):
    assert not struct_equiv(pp(left), pp(right))


def test_session_annotations_compared_up_to_equivalence():
    a = sp("(new x y:rec X.!unit.X)(x!().0 | y?(z:unit).0)")
    b = sp("(new x y:!unit.rec X.!unit.X)(x!().0 | y?(z:unit).0)")
    c = sp("(new x y:!unit.end)(x!().0 | y?(z:unit).0)")
    assert struct_equiv(a, b) and not struct_equiv(a, c)


def test_hook():
    q = pp("case l(()) of {l(x) => a!().0}")
    assert hook_equiv(q, pp("a!().0"))
    assert not hook_equiv(pp("a!().0"), q)
    assert not hook_equiv(pp("c!(()).0"), pp("0"))
    # at most one case is absorbed
    two = pp("case l(()) of {l(x) => case m(()) of {m(y) => 0}}")
    assert not hook_equiv(two, pp("0"))


@pytest.mark.parametrize("text, rule, result", [
    ("(new x y:!unit.end)(x!().0 | y?(z:unit).a!z.0)", "R-Com", "a!().0"),
    ("(new x y:+{l:end, m:end})(sel x m.a!().0 | bra y {l:0, m:b!().0})", "R-Sel",
     "a!().0 | b!().0"),
    ("(newc c:#unit)(c!().0 | c?(z:unit).a!z.0)", "R-ChanCom", "a!().0"),
])
def test_session_steps(text, rule, result):
    (s,) = step_session(sp(text))
    assert s.rule == rule
    assert struct_equiv(s.process, sp(result))


def test_session_step_advances_annotation():
    p = sp("(new x y:!unit.?unit.end)(x!().x?(u:unit).0 | y?(z:unit).y!z.0)")
    (s,) = step_session(p)
    assert struct_equiv(s.process, sp("(new x y:?unit.end)(x?(u:unit).0 | y!().0)"))
    assert not struct_equiv(s.process, sp("(new x y:!unit.?unit.end)(x?(u:unit).0 | y!().0)"))


def test_cross_session_communication_is_stuck():
    p = sp("(new x y:!unit.end)(new u w:!unit.end)"
           "(x!().0 | w?(z:unit).a!z.0 | u!().0 | y?(z:unit).0)")
    assert {s.location for s in step_session(p)} == {"x/y", "u/w"}


@pytest.mark.parametrize("text, rule, result", [
    ("a!((), b).0 | a?(x, y).y!(x).0", "R-Com", "b!(()).0"),
    ("case m(b) of {l(x) => 0, m(y) => y!().0}", "R-Case", "b!().0"),
])
def test_pi_steps(text, rule, result):
    (s,) = step_pi(pp(text))
    assert s.rule == rule and struct_equiv(s.process, pp(result))


def test_pi_faults():
    (s,) = step_pi(pp("a!((), ()).0 | a?(x).0"))
    assert isinstance(s.process, Fault) and "arity" in s.process.message
    (s,) = step_pi(pp("a!(()).0 | a?(x).x!().0"))
    assert isinstance(s.process, Fault)


def test_replication_spawns_one_copy_per_step():
    p = pp("*a?(x).b!(x).0 | a!(()).0 | a!(()).0")
    steps = step_pi(p)
    assert len(steps) == 1
    assert struct_equiv(steps[0].process, pp("*a?(x).b!(x).0 | b!(()).0 | a!(()).0"))


def test_substitution_avoids_capture():
    p = pp("b?(y).x!(y).0")
    q = substitute(p, {"x": Name("y")})
    assert struct_equiv(q, pp("b?(z).y!(z).0"))


def test_sys_first_steps_are_the_two_receptions(sys_process):
    assert sorted((s.rule, s.location) for s in step_session(sys_process)) == [
        ("R-ChanCom", "a"), ("R-ChanCom", "b")]


def test_sys_cycles(sys_process):
    trace = run(sys_process, 4)
    assert [e.rule for e in trace[1:4]] == ["R-ChanCom", "R-ChanCom", "R-Sel"]
    assert struct_equiv(trace[3].process, sys_process)
    rounds = concurrent_rounds(trace[:4])
    assert [[e.location for e in r] for r in rounds] == [["a", "b"], ["v/w l"]]

    enc = encode(sys_process)
    trace = run(enc, 4)
    assert [e.rule for e in trace[1:]] == ["R-Com", "R-Com", "R-Com", "R-Case"]
    assert not struct_equiv(trace[3].process, enc)
    assert hook_equiv(trace[3].process, enc)
    assert struct_equiv(trace[4].process, enc)
    assert len(concurrent_rounds(trace[:4])) == 2
    text = format_trace(trace)
    assert text.count("--rule") == 4


def test_run_with_chooser_and_stuck_process():
    assert len(run(pp("0"), 5)) == 1
    p = pp("a!(()).0 | a?(x).0 | b!(()).0 | b?(x).0")
    last = run(p, 1, chooser=lambda steps: steps[-1])
    assert last[1].location == "b"


def _decomposition_oracle(p):
    """Steps obtained by firing each decomposed redex on its own, then plugging back."""
    out = set()
    for ctx, redex in decompose(p):
        for s in step_pi(redex):
            if not isinstance(s.process, Fault):
                out.add(canonical_key(plug(ctx, s.process)))
    return out


def test_decompose_matches_step_on_encodings():
    checked = 0
    for _, ctx, p in CORPUS:
        q = encode(p, ctx)
        for c, r in decompose(q):
            assert struct_equiv(plug(c, r), q)
            assert sum(isinstance(n, Hole) for n in _nodes(c)) == 1
        assert _decomposition_oracle(q) == keys(step_pi(q))
        checked += bool(decompose(q))
    assert checked > 20


def _nodes(p):
    yield p
    for q in subprocesses(p):
        yield from _nodes(q)


def test_decompose_session():
    for _, ctx, p in CORPUS:
        pairs = decompose(p)
        assert len(pairs) >= len(step_session(p))
        for c, r in pairs:
            assert struct_equiv(plug(c, r), p)


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(CORPUS), st.integers(0, 1000))
def test_steps_are_stable_under_congruence(entry, seed):
    _, ctx, p = entry
    rng = random.Random(seed)
    for q, stepper, pi in ((p, step_session, False), (encode(p, ctx), step_pi, True)):
        r = scramble(q, rng, pi)
        assert struct_equiv(q, r)
        assert keys(stepper(q)) == keys(stepper(r))


def _unfold_replications(r):
    """Replace every replication in evaluation position by ``P | *P``."""
    if isinstance(r, Repl):
        return Par(r.body, r)
    if isinstance(r, (Par, SessRes, ChanRes, PRes)):
        return with_subprocesses(r, [_unfold_replications(k) for k in subprocesses(r)])
    return r


REPLICATED = [e for e in CORPUS if any(isinstance(n, Repl) for n in _nodes(e[2]))]


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(REPLICATED))
def test_replication_unfolds_once(entry):
    _, ctx, p = entry
    assert keys(step_session(p)) == keys(step_session(_unfold_replications(p)))
    q = encode(p, ctx)
    assert keys(step_pi(q)) == keys(step_pi(_unfold_replications(q)))


def _leaves(p, scope=()):
    """Threads in evaluation position with the session restrictions above them.

    A replication contributes the threads of one copy of its body.
    """
    if isinstance(p, Nil):
        return []
    if isinstance(p, Par):
        return _leaves(p.left, scope) + _leaves(p.right, scope)
    if isinstance(p, (SessRes, ChanRes, PRes)):
        return _leaves(p.body, scope + (p,))
    if isinstance(p, Repl):
        return _leaves(p.body, scope)
    return [(p, scope)]


def _binder(name, scope):
    for r in reversed(scope):
        names = (r.x, r.y) if isinstance(r, SessRes) else (r.name,)
        if name in names:
            return r
    return None


def _brute_force_redexes(p):
    found = []
    leaves = _leaves(p)
    for i, (a, sa) in enumerate(leaves):
        for j, (b, sb) in enumerate(leaves):
            if i == j:
                continue
            ra = _binder(getattr(a, "subject", None), sa)
            rb = _binder(getattr(b, "subject", None), sb)
            covars = (isinstance(ra, SessRes) and ra is rb
                      and {a.subject, b.subject} == {ra.x, ra.y})
            if isinstance(a, Output) and isinstance(b, Input):
                if covars:
                    found.append("R-Com")
                elif a.subject == b.subject and ra is rb and not isinstance(ra, SessRes):
                    found.append("R-ChanCom")
            if isinstance(a, Selection) and isinstance(b, Branching) and covars:
                if a.label in dict(b.arms):
                    found.append("R-Sel")
    return sorted(found)


def _redex_rule(redex):
    return "sel" if isinstance(redex.left, Selection) else "com"


def test_decompose_simple_session_example():
    p = sp("(new x y:!unit.end)(x!().0 | y?(z:unit).0)")
    ((ctx, redex),) = decompose(p)
    assert isinstance(ctx, SessRes) and isinstance(ctx.body, Hole)
    assert struct_equiv(plug(ctx, redex), p)
    assert decompose(sp("0")) == []


def test_decompose_against_brute_force_hole_placement(sys_process):
    for p in [sys_process] + [p for _, _, p in CORPUS]:
        expected = _brute_force_redexes(p)
        got = decompose(p)
        assert len(got) == len(expected), p
        assert sorted("sel" if r == "R-Sel" else "com" for r in expected) == sorted(
            _redex_rule(r) for _, r in got)
