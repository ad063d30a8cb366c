import pytest
from hypothesis import given, settings, strategies as st

from sessenc import (
    NameSupply, alpha_eq, encode, encode_process, encode_type, encode_value, load_program,
    parse_pi_process, parse_pi_type as P, parse_session_process as proc,
    parse_session_type as S, pretty, restriction_annotation,
)
from sessenc.correspondence import GenConfig, gen_typed_process
from sessenc.encoder import EncodingError
from sessenc.syntax import Name, PInput, PRes, all_names, subprocesses

from conftest import PROGRAMS


@pytest.mark.parametrize("session, pi", [
    ("end", "empty[]"),
    ("unit", "unit"),
    ("#unit", "#[unit]"),
    ("!unit.end", "lo[unit, empty[]]"),
    ("?unit.end", "li[unit, empty[]]"),
    ("!unit.?unit.end", "lo[unit, lo[unit, empty[]]]"),
    ("+{l:end}", "lo[<l:empty[]>]"),
    ("&{l:?unit.end}", "li[<l:li[unit, empty[]]>]"),
    ("rec X.+{l:X}", "rec X.lo[<l:~X>]"),
    ("rec X.&{l:X}", "rec X.li[<l:X>]"),
])
def test_type_goldens(session, pi):
    assert alpha_eq(encode_type(S(session)), P(pi))


def test_restriction_annotation():
    assert restriction_annotation(S("!unit.end")) == P("l#[unit, empty[]]")
    assert restriction_annotation(S("end")) == P("empty[]")
    assert restriction_annotation(S("rec X.&{l:X}")) == P("l#[<l:rec X.li[<l:X>]>]")
    with pytest.raises(EncodingError):
        restriction_annotation(S("#unit"))


def test_process_goldens():
    assert pretty(encode(proc("(new x y:!unit.end)(x!().0 | y?(z:unit).0)"))) == (
        "(new c0:l#[unit, empty[]])((new c1:empty[])c0!((), c1).0) | c0?(z, c2).0")
    assert pretty(encode(proc("sel x l.0"), {"x": S("+{l:end}")})) == (
        "(new c0:empty[])x!(l(c0)).0")
    assert pretty(encode(proc("bra x {l:0, m:0}"), {"x": S("&{l:end, m:end}")})) == (
        "x?(c0).case c0 of {l(c1) => 0, m(c1) => 0}")
    # standard channels are left alone
    assert pretty(encode(proc("a!b.0"), {"a": S("#unit")})) == "a!(b).0"


def test_sys_golden(sys_process):
    expected = parse_pi_process((PROGRAMS / "sys_encoded.pi").read_text())
    assert alpha_eq(encode(sys_process), expected)


def test_values():
    assert encode_value(Name("x"), {"x": "c3"}) == Name("c3")
    assert encode_value(Name("y"), {"x": "c3"}) == Name("y")


def test_name_supply_skips_taken_names():
    s = NameSupply(avoid={"c0", "c2"})
    assert [s.fresh() for _ in range(3)] == ["c1", "c3", "c4"]


def test_supply_avoids_names_of_the_source():
    p = proc("(new c0 c1:!unit.end)(c0!().0 | c1?(c2:unit).0)")
    q = encode(p)
    introduced = {n for n in all_names(q)} - all_names(p)
    assert introduced and not introduced & {"c0", "c1", "c2"}


def _binders(q):
    out = []
    stack = [q]
    while stack:
        r = stack.pop()
        if isinstance(r, PRes):
            out.append(r.name)
        elif isinstance(r, PInput):
            out.extend(r.binders)
        stack.extend(subprocesses(r))
    return out


def _restricted(q):
    if isinstance(q, PRes):
        return [q.name] + _restricted(q.body)
    return [n for r in subprocesses(q) for n in _restricted(r)]


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10_000))
def test_freshness_audit(seed):
    ctx, p = gen_typed_process(GenConfig(seed=seed))
    q = encode(p, ctx)
    fresh = [n for n in _binders(q) if n not in all_names(p)]
    assert all(n.startswith("c") for n in fresh)
    # one restriction per encoded session action, never reusing a name
    restricted = [n for n in fresh if n in _restricted(q)]
    assert len(restricted) == len(set(restricted))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000))
def test_encoding_is_deterministic(seed):
    ctx, p = gen_typed_process(GenConfig(seed=seed))
    assert encode(p, ctx) == encode(p, ctx)
    assert encode_process(p, {}, NameSupply(avoid=set(all_names(p))), ctx) == encode(p, ctx)
