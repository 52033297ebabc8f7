import pytest
from hypothesis import given, strategies as st

from errors import SignatureError, TermSyntaxError
from term_core import (
    App, Signature, Var, app, instantiate, is_ground, parse_term, parse_var, print_term, substitute, term_depth,
    validate_term, vars_of, vars_of_all, x, y,
)

GROUP = Signature("group", (("e", 0), ("mul", 2), ("inv", 1)))

leaves = st.one_of(
    st.builds(x, st.integers(1, 3)),
    st.builds(y, st.integers(1, 3)),
    st.just(app("e")),
)


def _extend(children):
    return st.one_of(
        st.builds(lambda a: app("inv", a), children),
        st.builds(lambda a, b: app("mul", a, b), children, children),
    )


terms = st.recursive(leaves, _extend, max_leaves=12)
variables = st.one_of(st.builds(x, st.integers(1, 3)), st.builds(y, st.integers(1, 3)))
bindings = st.dictionaries(variables, st.recursive(leaves, _extend, max_leaves=4), max_size=3)
ALL_VARS = [x(i) for i in (1, 2, 3)] + [y(i) for i in (1, 2, 3)]


def test_parse_nested_term():
    t = parse_term("mul(x1, inv(y2))", GROUP)
    assert t == app("mul", x(1), app("inv", y(2)))
    assert print_term(t) == "mul(x1,inv(y2))"


def test_constants_parse_with_or_without_parentheses():
    assert parse_term("e", GROUP) == App("e", ())
    assert parse_term("e()", GROUP) == App("e", ())
    assert print_term(App("e", ())) == "e"


@pytest.mark.parametrize("text", ["mul(x1,,x2)", "mul(x1", "mul(x1,x2) x3", "mul(x1;x2)", ""])
def test_malformed_terms_report_a_position(text):
    with pytest.raises(TermSyntaxError) as info:
        parse_term(text, GROUP)
    assert 0 <= info.value.position <= len(text)


def test_variables_take_no_arguments():
    with pytest.raises(TermSyntaxError):
        parse_term("x1(e)", GROUP)


def test_signature_checked_while_parsing():
    with pytest.raises(SignatureError, match="arity"):
        parse_term("mul(x1)", GROUP)
    with pytest.raises(SignatureError, match="unknown symbol"):
        parse_term("omega(x1,x2)", GROUP)
    # without a signature any symbol is accepted
    assert parse_term("omega(x1,x2)") == app("omega", x(1), x(2))


def test_validate_term_lists_every_violation():
    bad = app("mul", app("inv", x(1), x(2)), app("omega", y(1)), app("e", x(1)))
    problems = validate_term(GROUP, bad)
    assert len(problems) == 4
    assert any("arity" in p for p in problems)
    assert any("omega" in p for p in problems)
    assert validate_term(GROUP, parse_term("mul(e,inv(x1))", GROUP)) == []


def test_variables():
    assert parse_var(" y12 ") == y(12)
    with pytest.raises(TermSyntaxError):
        parse_var("z1")
    with pytest.raises(ValueError):
        Var("z", 1)
    with pytest.raises(ValueError):
        Var("x", 0)


def test_vars_are_ordered_x_before_y():
    t = parse_term("mul(y2,mul(x3,y1))", GROUP)
    assert vars_of(t).ordered() == [x(3), y(1), y(2)]
    both = vars_of_all([t, parse_term("inv(x1)", GROUP)])
    assert both.ordered() == [x(1), x(3), y(1), y(2)]
    assert len(both) == 4


def test_instantiate_and_depth():
    theta = parse_term("mul(x1,x2)", GROUP)
    t = instantiate(theta, [y(1), x(1)])
    assert t == app("mul", y(1), x(1))
    assert term_depth(t) == 1
    assert term_depth(x(1)) == 0
    assert term_depth(parse_term("inv(mul(x1,e))", GROUP)) == 2


def test_signature_rules():
    with pytest.raises(SignatureError):
        Signature("bad", (("mul", 2), ("mul", 1)))
    with pytest.raises(SignatureError):
        Signature("bad", (("x1", 0),))
    with pytest.raises(SignatureError):
        GROUP.extend([("inv", 1)])
    ext = GROUP.extend([("omega", 2)], "omega_group")
    assert ext.includes(GROUP)
    assert not GROUP.includes(ext)
    assert ext.symbols[-1] == "omega"
    assert GROUP.constants == ("e",)
    assert GROUP.arity("inv") == 1 and GROUP.arity("nope") is None


@given(terms)
def test_printed_terms_parse_back(t):
    assert parse_term(print_term(t), GROUP) == t


@given(terms)
def test_generated_terms_are_well_formed(t):
    assert validate_term(GROUP, t) == []


@given(terms)
def test_empty_substitution_is_identity(t):
    assert substitute(t, {}) == t


@given(terms)
def test_grounding_substitution_removes_every_variable(t):
    grounded = substitute(t, {v: app("e") for v in vars_of(t).ordered()})
    assert is_ground(grounded)
    assert term_depth(grounded) == term_depth(t)


@given(terms, terms)
def test_substitution_replaces_only_the_bound_variable(t, s):
    out = substitute(t, {x(1): s})
    expected = vars_of(t).xvars - {1}
    if 1 in vars_of(t).xvars:
        expected = expected | vars_of(s).xvars
    assert vars_of(out).xvars == expected


@given(terms, bindings, bindings)
def test_substitutions_compose(t, first, second):
    composed = {v: substitute(substitute(v, first), second) for v in ALL_VARS}
    assert substitute(substitute(t, first), second) == substitute(t, composed)


@given(terms, bindings)
def test_substitution_depth_is_bounded(t, binding):
    deepest = max([term_depth(s) for s in binding.values()], default=0)
    assert term_depth(t) <= term_depth(substitute(t, binding)) <= term_depth(t) + deepest
