import pytest
from hypothesis import given, strategies as st

from devs_scc.model import GuardedCase, Model, StateSchema
from devs_scc.parser import ParseFailure, parse_model_text, parse_pred_text
from devs_scc.render import render_model
from devs_scc.syntax import (
    And,
    Cmp,
    Const,
    InSet,
    MinOp,
    Or,
    Ref,
    TRUE,
    TupleExpr,
)
from devs_scc.values import (
    EnumSort,
    ExtSort,
    INF,
    INT,
    Lit,
    NAT,
    RAT,
    TIME,
    num,
    sort_literals,
)


def test_soda_input_sort_has_seven_literals(soda):
    assert len(sort_literals(soda.input_sort)) == 7


def test_soda_case_counts(soda):
    assert len(soda.delta_ext) == 5
    assert len(soda.delta_int) == 6


def test_elevator_has_five_timer_components(elevator):
    assert len(elevator.schema.time_vars) == 5
    assert set(elevator.schema.time_vars) == {"at", "dt1", "dt2", "gft", "ot"}


def test_elevator_case_counts(elevator):
    assert len(elevator.delta_ext) == 18  # 17 guarded plus the otherwise case
    assert elevator.delta_ext[-1].is_otherwise
    assert len(elevator.delta_int) == 18
    assert len(elevator.output_fn) == 25


def test_empty_file_has_positioned_diagnostic():
    with pytest.raises(ParseFailure) as err:
        parse_model_text("")
    diag = err.value.diagnostics[0]
    assert (diag.line, diag.col) == (1, 1)


def test_unbound_variable_is_reported():
    text = """
    model bad {
      state { n: nat; }
      input enum {go};
      output nat;
      ta = 1;
      dext(s, e, x) { case q > 0 -> n; }
      dint(s) { }
      lambda(s) { otherwise -> n; }
    }
    """
    model, report = parse_model_text(text)
    assert not report.usable
    assert any("unbound variable q" in e for e in report.errors)


def test_syntax_error_carries_position():
    with pytest.raises(ParseFailure) as err:
        parse_model_text("model m {\n  state {\n")
    assert err.value.diagnostics[0].line >= 2


def test_fixture_round_trips(soda, elevator, toggle):
    for model in (soda, elevator, toggle):
        text = render_model(model)
        again, report = parse_model_text(text)
        assert report.usable
        assert again == model


def test_elevator_renders_compactly(elevator):
    assert len(render_model(elevator).splitlines()) <= 400


def test_unicode_fallbacks():
    a = parse_pred_text("a >= 0 /\\ b != 1 => c <= 2")
    b = parse_pred_text("a ≥ 0 ∧ b ≠ 1 ⇒ c ≤ 2")
    assert a == b


def test_ascii_infinity_and_tau():
    p = parse_pred_text("x = tau \\/ t < infinity")
    assert p == parse_pred_text("x = τ ∨ t < ∞")


# ---------------------------------------------------------------------------
# round-trip property over generated models

_ENUMS = [("red", "green"), ("lo", "mid", "hi")]

simple_sort = st.sampled_from([NAT, INT, RAT])
var_sort = st.one_of(
    simple_sort,
    st.sampled_from([EnumSort(lits) for lits in _ENUMS]),
    st.just(ExtSort(NAT, "blank")),
)


@st.composite
def models(draw):
    n_vars = draw(st.integers(1, 3))
    names = [f"v{i}" for i in range(n_vars)]
    sorts = [draw(var_sort) for _ in names]
    schema_vars = list(zip(names, sorts))
    with_timer = draw(st.booleans())
    time_vars = ()
    if with_timer:
        schema_vars.append(("clk", TIME))
        time_vars = ("clk",)
    schema = StateSchema(tuple(schema_vars), time_vars)
    input_sort = EnumSort(("go", "halt"))

    def atom():
        name, sort = draw(st.sampled_from(schema_vars))
        if sort in (NAT, INT, RAT, TIME):
            op = draw(st.sampled_from(["<", "<=", "=", ">", ">=", "!="]))
            return Cmp(op, Ref(name), Const(num(draw(st.integers(0, 3)))))
        lits = sort_literals(sort)
        if draw(st.booleans()) and len(lits) > 1:
            return InSet(Ref(name), lits[:2])
        return Cmp("=", Ref(name), Const(Lit(lits[0])))

    def guard(prefix=()):
        atoms = list(prefix) + [atom() for _ in range(draw(st.integers(1, 3)))]
        if len(atoms) == 1:
            return atoms[0]
        # keep conjunctions flat, the way the parser builds them
        if prefix or draw(st.booleans()):
            return And(tuple(atoms))
        return Or(tuple(atoms))

    identity = (
        TupleExpr(tuple(Ref(n) for n, _ in schema_vars))
        if len(schema_vars) > 1
        else Ref(schema_vars[0][0])
    )
    dext = tuple(
        GuardedCase(i + 1, guard(prefix=[Cmp("=", Ref("x"), Const(Lit("go")))]), identity)
        for i in range(draw(st.integers(1, 2)))
    )
    dint = (GuardedCase(1, guard(), identity),)
    lam = (GuardedCase(1, TRUE, Const(num(0)), is_otherwise=True),)
    ta = Const(INF) if not with_timer else MinOp((Ref("clk"), Ref("clk")))
    return Model(
        name="generated",
        schema=schema,
        input_sort=input_sort,
        output_sort=NAT,
        delta_ext=dext,
        delta_int=dint,
        output_fn=lam,
        ta=ta,
    )


@given(models())
def test_generated_model_round_trip(model):
    from devs_scc.check import validate_model

    bound, report = validate_model(model)
    assert report.usable, report.errors
    text = render_model(bound)
    again, report2 = parse_model_text(text)
    assert report2.usable
    assert again == bound


@given(st.integers(0, 400), st.integers(1, 8))
def test_mutated_sources_fail_with_positions(seed, drop):
    source = render_model_sample()
    tokens = source.split(" ")
    k = seed % max(1, len(tokens) - 1)
    mutated = " ".join(tokens[:k] + tokens[k + drop:])
    try:
        parse_model_text(mutated)
    except ParseFailure as err:
        assert err.diagnostics
        assert all(d.line >= 1 and d.col >= 1 for d in err.diagnostics)


_SAMPLE = None


def render_model_sample() -> str:
    global _SAMPLE
    if _SAMPLE is None:
        from devs_scc.parser import parse_model_file
        from tests.conftest import FIXTURES

        model, _ = parse_model_file(str(FIXTURES / "soda.devs"))
        _SAMPLE = render_model(model)
    return _SAMPLE
