from fractions import Fraction

import pytest

from devs_scc.values import (
    EnumSort,
    EvalError,
    ExtSort,
    INF,
    Lit,
    NAT,
    Num,
    RAT,
    TIME,
    Tup,
    TupleSort,
    coerce,
    compare,
    ext_base,
    ext_literals,
    num,
    parse_number,
    render_value,
    v_add,
    v_div,
    v_min,
    v_sub,
    value_conforms,
)


def test_exact_number_parsing():
    assert parse_number("0.50") == Fraction(1, 2)
    assert parse_number("7") == 7
    assert parse_number("1/3") == Fraction(1, 3)


def test_render_round_trips_fractions():
    for text in ("0", "7", "3/2", "-5/4"):
        assert render_value(Num(parse_number(text))) == text


def test_min_treats_infinity_as_top():
    assert v_min([INF, INF]) == INF
    assert v_min([INF, num(3)]) == num(3)
    assert v_min([num(2), num(5), INF]) == num(2)


def test_infinity_arithmetic():
    assert v_sub(INF, num(4)) == INF
    assert v_add(INF, num(1)) == INF
    with pytest.raises(EvalError):
        v_sub(num(1), INF)
    with pytest.raises(EvalError):
        v_sub(INF, INF)


def test_floor_division_is_exact():
    assert v_div(num(Fraction(7, 4)), num(1)) == num(1)
    assert v_div(num(Fraction(3, 4)), num(Fraction(1, 2))) == num(1)
    with pytest.raises(EvalError):
        v_div(num(1), num(0))


def test_comparison_with_incomparable_literal_is_false():
    empty = Lit("none")
    assert compare(">", empty, num(0)) is False
    assert compare("<", empty, num(5)) is False
    assert compare("=", empty, num(0)) is False
    assert compare("!=", empty, num(0)) is True
    assert compare("=", empty, Lit("none")) is True


def test_time_order_with_infinity():
    assert compare("<", num(3), INF)
    assert compare("<=", INF, INF)
    assert not compare("<", INF, num(3))


def test_nat_coercion_rejects_negative_and_fractional():
    with pytest.raises(EvalError):
        coerce(num(-1), NAT, "f")
    with pytest.raises(EvalError):
        coerce(num(Fraction(1, 2)), NAT)
    assert coerce(num(3), NAT) == num(3)


def test_extended_sort_membership():
    fc = ExtSort(NAT, "none")
    assert value_conforms(Lit("none"), fc)
    assert value_conforms(num(2), fc)
    assert not value_conforms(num(-2), fc)
    assert not value_conforms(Lit("other"), fc)


def test_extension_chain_literals():
    chain = ExtSort(ExtSort(NAT, "a"), "b")
    assert ext_literals(chain) == ("a", "b")
    assert ext_base(chain) == NAT


def test_tuple_conformance():
    coins = TupleSort((NAT, NAT, NAT))
    assert value_conforms(Tup((num(1), num(0), num(2))), coins)
    assert not value_conforms(Tup((num(1), num(0))), coins)
    assert not value_conforms(Tup((num(1), num(0), num(Fraction(1, 2)))), coins)


def test_time_conformance():
    assert value_conforms(INF, TIME)
    assert value_conforms(num(0), TIME)
    assert not value_conforms(num(-1), TIME)
    assert value_conforms(num(Fraction(-1, 2)), RAT)


def test_enum_sort_requires_distinct_literals():
    with pytest.raises(Exception):
        EnumSort(("a", "a"))
