import itertools

import pytest

from devs_scc.bounds import Bounds, const_env
from devs_scc.criteria import cases_criterion
from devs_scc.evaluator import eval_pred
from devs_scc.parser import parse_model_text
from devs_scc.scc import make_scc
from devs_scc.selector import SelectError, sample_configs, select_config
from devs_scc.syntax import And, Cmp, Const, FALSE, Ref
from devs_scc.values import Lit, TAU, num

TOY_MODEL = """
model toy {
  state { n: nat; m: enum {ON, OFF}; }
  input nat;
  output nat;
  ta = infinity;
  dext(s, e, x) { case x >= 0 -> (n, m); }
  dint(s) { }
  lambda(s) { otherwise -> n; }
}
"""


@pytest.fixture(scope="module")
def toy():
    model, report = parse_model_text(TOY_MODEL)
    assert report.usable
    return model


@pytest.fixture(scope="module")
def toy_bounds():
    return Bounds(nat_ranges={"": (0, 20)})


def test_toy_class_selects_the_least_member(toy, toy_bounds):
    scc = make_scc(
        And((Cmp("<=", Ref("n"), Const(num(10))), Cmp("=", Ref("m"), Const(Lit("ON"))))),
        Cmp("=", Ref("x"), Const(num(1))),
        "t", "d", id=4,
    )
    cfg = select_config(scc, toy, toy_bounds)

    # oracle: exhaustive scan of the grid in declaration order
    expected_state = None
    for n, m in itertools.product(range(0, 21), ("ON", "OFF")):
        if n <= 10 and m == "ON":
            expected_state = {"n": num(n), "m": Lit(m)}
            break
    assert cfg.state == expected_state
    assert (cfg.event, cfg.time) == (num(1), num(0))


def test_unsatisfiable_class_is_an_error(toy, toy_bounds):
    scc = make_scc(FALSE, Cmp("=", Ref("x"), Const(num(0))), "t", "empty", id=9)
    with pytest.raises(SelectError, match="no representative within bounds"):
        select_config(scc, toy, toy_bounds)


def test_budget_exhaustion_is_an_error(toy):
    tiny = Bounds(nat_ranges={"": (0, 20)}, max_attempts=2)
    scc = make_scc(
        Cmp(">", Ref("n"), Const(num(19))), Cmp("=", Ref("x"), Const(num(0))),
        "t", "deep", id=5,
    )
    with pytest.raises(SelectError, match="budget"):
        select_config(scc, toy, tiny)


def test_soda_diet_class_picks_zero_money_and_zero_price(soda, soda_bounds):
    sccs, _ = cases_criterion(soda, soda_bounds)
    diet = next(s for s in sccs if s.target == "dext case 3")
    cfg = select_config(diet, soda, soda_bounds)
    assert cfg.state["d"] == num(0)
    assert cfg.state["dp"] == num(0)
    assert cfg.event == Lit("getDiet")
    assert cfg.time == num(0)
    consts = const_env(soda_bounds, soda)
    assert eval_pred(diet.init_states, {**consts, **cfg.state}, soda, soda_bounds)


def test_selection_is_deterministic(elevator, elevator_bounds):
    sccs, _ = cases_criterion(elevator, elevator_bounds)
    first = [select_config(s, elevator, elevator_bounds).to_json() for s in sccs[:8]]
    second = [select_config(s, elevator, elevator_bounds).to_json() for s in sccs[:8]]
    assert first == second


def test_every_config_reevaluates_its_class_predicates(soda, soda_bounds):
    consts = const_env(soda_bounds, soda)
    sccs, _ = cases_criterion(soda, soda_bounds)
    for scc in sccs:
        cfg = select_config(scc, soda, soda_bounds)
        assert eval_pred(scc.init_states, {**consts, **cfg.state}, soda, soda_bounds)
        assert eval_pred(
            scc.input_pairs, {**consts, "x": cfg.event, "t": cfg.time}, soda, soda_bounds
        )


def test_tau_class_configs_carry_time_zero(soda, soda_bounds):
    sccs, _ = cases_criterion(soda, soda_bounds)
    for scc in sccs:
        if scc.target.startswith("dint"):
            cfg = select_config(scc, soda, soda_bounds)
            assert cfg.event == TAU
            assert cfg.time == num(0)


def test_sampling_returns_distinct_members(soda, soda_bounds):
    sccs, _ = cases_criterion(soda, soda_bounds)
    coin = sccs[0]
    samples = sample_configs(coin, 6, soda, soda_bounds)
    assert len(samples) >= 3
    keys = {repr(c.to_json()) for c in samples}
    assert len(keys) == len(samples)
    consts = const_env(soda_bounds, soda)
    for cfg in samples:
        assert eval_pred(coin.init_states, {**consts, **cfg.state}, soda, soda_bounds)


def test_sampling_is_deterministic(soda, soda_bounds):
    sccs, _ = cases_criterion(soda, soda_bounds)
    a = [c.to_json() for c in sample_configs(sccs[3], 5, soda, soda_bounds)]
    b = [c.to_json() for c in sample_configs(sccs[3], 5, soda, soda_bounds)]
    assert a == b
