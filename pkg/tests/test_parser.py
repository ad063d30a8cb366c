import pytest
from hypothesis import given, settings

from sessenc import (
    ParseError, alpha_eq, load_program, parse_context, parse_pi_process, parse_pi_type,
    parse_session_process, parse_session_type, pretty,
)
from sessenc.syntax import (
    Branch, Case, Chan, End, LinConn, LinIn, LinOut, Name, NoCap, Par, PInput, POutput, Rec,
    Recv, Repl, Select, Send, TVar, Unit, UnitVal, Variant, VariantVal,
)

from strategies import pi_processes, pi_types, session_processes, session_types


@pytest.mark.parametrize("text, node", [
    ("end", End()),
    ("!unit.end", Send(Unit(), End())),
    ("?#unit.end", Recv(Chan(Unit()), End())),
    ("+{l:end, m:end}", Select({"l": End(), "m": End()})),
    ("&{l:end}", Branch({"l": End()})),
    ("rec X.+{l:X}", Rec("X", Select({"l": TVar("X")}))),
    ("rec X.!unit.~X", Rec("X", Send(Unit(), TVar("X", True)))),
])
def test_session_type_examples(text, node):
    assert parse_session_type(text) == node


@pytest.mark.parametrize("text, node", [
    ("empty[]", NoCap()),
    ("li[unit]", LinIn((Unit(),))),
    ("lo[unit, empty[]]", LinOut((Unit(), NoCap()))),
    ("l#[]", LinConn(())),
    ("<l:unit, m:empty[]>", Variant({"l": Unit(), "m": NoCap()})),
    ("rec X.lo[<l:~X>]", Rec("X", LinOut((Variant({"l": TVar("X", True)}),)))),
])
def test_pi_type_examples(text, node):
    assert parse_pi_type(text) == node


def test_pi_process_examples():
    p = parse_pi_process("x!(l(c), ()).0 | x?(y, z).case y of {l(c) => c!().0}")
    assert isinstance(p, Par)
    assert isinstance(p.left, POutput) and p.left.payloads == (VariantVal("l", Name("c")), UnitVal())
    assert isinstance(p.right, PInput) and p.right.binders == ("y", "z")
    assert isinstance(p.right.cont, Case)


def test_par_binds_looser_than_prefix_and_associates_right():
    p = parse_session_process("a!().0 | b!().0 | *c!().0")
    assert isinstance(p.right, Par) and isinstance(p.right.right, Repl)
    assert pretty(p) == "a!().0 | b!().0 | *c!().0"


def test_type_aliases(sys_path):
    calculus, p = load_program(sys_path)
    assert calculus == "session"
    assert alpha_eq(p.annot, parse_session_type("#(rec Y.+{l:Y})"))


@pytest.mark.parametrize("text", [
    "!unit", "rec X.X", "+{l:end, l:end}", "+{}", "!unit.end)", "&{l:end",
])
def test_bad_session_types(text):
    with pytest.raises(ParseError):
        parse_session_type(text)


def test_error_position():
    with pytest.raises(ParseError) as exc:
        parse_session_process("a!().\n  0 |")
    assert exc.value.span.line == 2
    assert "line 2" in str(exc.value)


def test_rec_variable_clash_with_keyword_rejected():
    with pytest.raises(ParseError):
        parse_session_type("rec end.end")


def test_parse_context():
    ctx = parse_context("a:#unit; x:!unit.end")
    assert ctx == {"a": Chan(Unit()), "x": Send(Unit(), End())}
    assert parse_context("") == {}
    assert parse_context("c:l#[]", pi=True) == {"c": LinConn(())}
    with pytest.raises(ParseError):
        parse_context("nocolon")


def test_unknown_extension(tmp_path):
    f = tmp_path / "x.txt"
    f.write_text("0")
    with pytest.raises(ValueError):
        load_program(f)


def _round_trip(node, parse):
    assert alpha_eq(parse(pretty(node)), node), pretty(node)


@settings(max_examples=300, deadline=None)
@given(session_types(depth=4))
def test_round_trip_session_types(t):
    _round_trip(t, parse_session_type)


@settings(max_examples=300, deadline=None)
@given(pi_types(depth=4))
def test_round_trip_pi_types(t):
    _round_trip(t, parse_pi_type)


@settings(max_examples=300, deadline=None)
@given(session_processes())
def test_round_trip_session_processes(p):
    _round_trip(p, parse_session_process)


@settings(max_examples=300, deadline=None)
@given(pi_processes())
def test_round_trip_pi_processes(p):
    _round_trip(p, parse_pi_process)


def test_open_types_parse_but_not_as_annotations():
    assert parse_session_type("X") == TVar("X")
    with pytest.raises(ParseError):
        parse_session_process("(new x y:X)0")
