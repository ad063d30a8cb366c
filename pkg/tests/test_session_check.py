import pytest
from hypothesis import given, settings, strategies as st

from sessenc import TypingError, check_process, check_value, parse_context, typechecks
from sessenc import parse_session_process as proc, parse_session_type as S
from sessenc.correspondence import GenConfig, gen_typed_process, mutants
from sessenc.syntax import Name, Par, UnitVal


def rejects(ctx, text, kind):
    with pytest.raises(TypingError) as exc:
        check_process(parse_context(ctx), proc(text))
    assert exc.value.kind == kind, str(exc.value)


def test_sys_derivation_spine(sys_process):
    d = check_process({}, sys_process)
    rules = d.rules()
    spine = ["T-Rep", "T-In", "T-Select", "T-Out", "T-Nil"]
    i = rules.index("T-Rep")
    assert rules[i:i + 5] == spine
    text = d.render()
    assert "rec X.+{l:X} ≼s +{l:rec X.+{l:X}}" in text
    assert "rec X.+{l:X} ≼s rec X.+{l:X}" in text
    assert "T-Branch" in rules


@pytest.mark.parametrize("ctx, text", [
    ("", "0"),
    ("a:#unit", "a!().0 | a?(x:unit).0"),
    ("", "(new x y:!unit.end)(x!().0 | y?(z:unit).0)"),
    ("", "(new x y:+{l:end, m:end})(sel x l.0 | bra y {l:0, m:0})"),
    ("x:&{l:end}", "bra x {l:0, m:0}"),
    ("x:+{l:end, m:end}", "sel x m.0"),
    ("a:#(!unit.end)", "(new x y:!unit.end)(a!x.0 | y?(z:unit).0)"),
    ("a:#unit", "*a?(x:unit).a!x.0"),
])
def test_accepts(ctx, text):
    assert typechecks(parse_context(ctx), proc(text))


@pytest.mark.parametrize("ctx, text, kind", [
    ("x:!unit.end", "0", "leftover"),
    ("x:!unit.end", "x!().0 | x!().0", "linearity"),
    ("x:!unit.end", "*x!().0", "linearity"),
    ("x:?unit.end", "x!().0", "shape"),
    ("", "a!().0", "unbound"),
    ("x:+{l:end}", "sel x m.0", "subtype"),
    ("x:&{l:end, m:end}", "bra x {l:0}", "subtype"),
    ("x:!unit.end", "x!x.0", "linearity"),
    ("a:#unit", "a?(x:#unit).0", "annotation"),
    ("", "(new x y:#unit)0", "annotation"),
])
def test_rejects(ctx, text, kind):
    rejects(ctx, text, kind)


def test_value_subsumption():
    ctx = {"x": S("+{l:end, m:end}")}
    cond = check_value(ctx, Name("x"), S("+{l:end}"))
    assert cond is not None and cond.relation == "<=s"
    assert check_value({}, UnitVal(), S("unit")) is None
    with pytest.raises(TypingError):
        check_value(ctx, Name("x"), S("+{l:end, m:end, n:end}"))


def test_restriction_types_second_endpoint_with_complement():
    d = check_process({}, proc("(new x y:!unit.?unit.end)(x!().x?(z:unit).0 | y?(z:unit).y!().0)"))
    assert d.rule == "T-ResS"
    assert dict(d.premises[0].context)["y"] == S("?unit.!unit.end")


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_generated_processes_typecheck_and_par_commutes(seed):
    ctx, p = gen_typed_process(GenConfig(seed=seed))
    assert typechecks(ctx, p)
    if isinstance(p, Par):
        assert typechecks(ctx, Par(p.right, p.left))


def test_duplicating_a_session_body_breaks_linearity():
    p = proc("(new x y:!unit.end)(x!().0 | y?(z:unit).0)")
    for m in mutants(p):
        assert not typechecks({}, m)
