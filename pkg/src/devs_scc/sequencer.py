"""Chaining selected configurations into simulation sequences.

After simulating one class the post-state often already belongs to
another class's state set; chaining reuses it instead of configuring a
fresh run.  The three nondeterministic choices of the sequencing
algorithm are fixed for reproducibility: the next class is always the
lowest remaining id, the first state and input pair come from the
selector's least witness, and a chained input pair is the least pair the
current state admits.  Every class is consumed exactly once, so the
covered-id sets of the produced sequences partition the input catalog.
A failing step ends its sequence with the failure recorded and the
remaining classes continue in fresh sequences.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .bounds import Bounds, const_env, pair_space
from .evaluator import eval_pred
from .model import Model
from .sat import satisfiable
from .scc import SCC
from .selector import SelectError, select_config
from .simulator import SimError, SimState, UndefinedTransition, init, step, time_advance
from .syntax import Cmp, Const, Ref, conj, conjuncts, subst_pred
from .values import EvalError, Inf, Num, TAU, Value, render_value


@dataclass
class SeqStep:
    scc_id: int
    state_used: dict[str, Value]
    event: Value
    time: Value
    fired: tuple[str, int] | None = None
    error: str | None = None

    def to_json(self) -> dict:
        rec = {
            "scc": self.scc_id,
            "state": {k: render_value(v) for k, v in self.state_used.items()},
            "input": {"event": render_value(self.event), "time": render_value(self.time)},
        }
        if self.fired:
            rec["fired"] = {"function": self.fired[0], "case": self.fired[1]}
        if self.error:
            rec["error"] = self.error
        return rec


@dataclass
class SimulationSequence:
    steps: list[SeqStep] = field(default_factory=list)
    covered: list[int] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"steps": [s.to_json() for s in self.steps], "covered": self.covered}


def build_sequences(
    model: Model, sccs: list[SCC], bounds: Bounds
) -> tuple[list[SimulationSequence], list[str]]:
    consts = const_env(bounds, model)
    remaining = sorted(sccs, key=lambda s: s.id)
    sequences: list[SimulationSequence] = []
    notes: list[str] = []

    while remaining:
        scc = remaining.pop(0)
        seq = SimulationSequence(covered=[scc.id])
        sequences.append(seq)
        try:
            cfg = select_config(scc, model, bounds)
        except SelectError as err:
            notes.append(f"class {scc.id}: {err}")
            seq.steps.append(
                SeqStep(scc.id, {}, TAU, Num(0), error=str(err))
            )
            continue
        sim = init(model, cfg.state)
        sim, ok = _run_step(model, sim, consts, cfg.event, cfg.time, seq, scc.id)
        if not ok:
            continue
        while True:
            found = _next_reachable(remaining, sim, consts, model, bounds)
            if found is None:
                break
            nxt, (event, rel_time) = found
            remaining.remove(nxt)
            seq.covered.append(nxt.id)
            sim, ok = _run_step(model, sim, consts, event, rel_time, seq, nxt.id)
            if not ok:
                break
    return sequences, notes


def _run_step(model, sim, consts, event, rel_time, seq, scc_id):
    """Execute one sequence step; the pair's time is elapsed time relative
    to the state the class matched on."""
    state_used = dict(sim.state)
    try:
        if event == TAU:
            nxt, _, ev = step(model, sim, consts)
        else:
            if not isinstance(rel_time, Num):
                raise SimError("external event needs a finite time")
            at = sim.last + rel_time.value
            nxt, _, ev = step(model, sim, consts, (event, at))
        seq.steps.append(SeqStep(scc_id, state_used, event, rel_time, fired=ev.fired))
        return nxt, True
    except (UndefinedTransition, SimError, EvalError) as err:
        seq.steps.append(SeqStep(scc_id, state_used, event, rel_time, error=str(err)))
        return sim, False


def _next_reachable(remaining, sim, consts, model, bounds):
    """First remaining class (ascending id) whose state set contains the
    current state and which admits an executable input pair from it."""
    env = {**consts, **sim.state}
    for scc in remaining:
        try:
            if not eval_pred(scc.init_states, env, model, bounds):
                continue
        except EvalError:
            continue
        pair = _pick_pair(scc, sim, consts, model, bounds)
        if pair is not None:
            return scc, pair
    return None


def _pick_pair(scc: SCC, sim: SimState, consts, model, bounds):
    """Least input pair compatible with, and executable from, the current
    state: t must not exceed the pending time advance, and the no-event
    marker needs a finite one."""
    ta = time_advance(model, sim, consts)
    space = pair_space(model, bounds)
    if isinstance(ta, Inf):
        space = [("x", [v for v in space[0][1] if v != TAU]), space[1]]
        bound = []
    else:
        bound = [Cmp("<=", Ref("t"), Const(ta))]
    if scc.joint is not None:
        pred = subst_pred(scc.joint, {k: Const(v) for k, v in sim.state.items()})
    else:
        pred = scc.input_pairs
    verdict = satisfiable(
        conj(conjuncts(pred) + bound), space, bounds, model, base_env=dict(consts)
    )
    if verdict.status != "sat" and scc.joint is not None:
        # the guard may reject this exact state; fall back to the bare pair
        verdict = satisfiable(
            conj(conjuncts(scc.input_pairs) + bound), space, bounds, model,
            base_env=dict(consts),
        )
    if verdict.status != "sat":
        return None
    w = verdict.witness
    return w["x"], w["t"]
