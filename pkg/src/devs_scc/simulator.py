"""Abstract simulator for atomic models.

Executes the standard semantics on concrete states: the system sits in a
state for ta(s) time units; when that expires it emits the output of the
pre-transition state and applies the internal transition.  An input
arriving after elapsed time e (0 <= e <= ta) triggers the external
transition instead, producing no output.  The clock is an exact
rational, so there is no drift and ties are decidable: an input landing
exactly on the internal deadline is applied as the external transition
and the step is annotated so the engineer sees the tie.

A concrete (state, event, elapsed) with no matching guard is the
principal validation finding this tool exists to surface.  It is
reported as an "undefined transition" finding in the trace, not a crash.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .bounds import Bounds, const_env
from .evaluator import eval_expr, select_case
from .model import Model
from .scc import SCC
from .selector import SimulationConfig, sample_configs
from .syntax import TupleExpr
from .values import (
    EvalError,
    Inf,
    Lit,
    Num,
    TAU,
    Tup,
    Value,
    coerce,
    render_value,
)


class SimError(Exception):
    """A violated stepping precondition: injecting beyond the internal
    deadline, or asking a passive state for an internal transition."""


class UndefinedTransition(Exception):
    def __init__(self, function: str, detail: str):
        super().__init__(f"undefined transition: no {function} case matches ({detail})")
        self.function = function
        self.detail = detail


@dataclass
class SimState:
    state: dict[str, Value]
    clock: Fraction
    last: Fraction  # instant of the most recent transition

    def elapsed(self) -> Fraction:
        return self.clock - self.last


@dataclass
class TraceEvent:
    at: Value
    kind: str  # "internal" | "external" | "error"
    fired: tuple[str, int] | None
    state_after: dict[str, Value]
    input: Value | None = None
    output: Value | None = None
    tie: bool = False
    error: str | None = None

    def to_json(self) -> dict:
        rec = {
            "at": render_value(self.at),
            "kind": self.kind,
            "state": {k: render_value(v) for k, v in self.state_after.items()},
        }
        if self.fired:
            rec["fired"] = {"function": self.fired[0], "case": self.fired[1]}
        if self.input is not None:
            rec["input"] = render_value(self.input)
        if self.output is not None:
            rec["output"] = render_value(self.output)
        if self.tie:
            rec["tie"] = True
        if self.error:
            rec["error"] = self.error
        return rec


@dataclass
class Trace:
    events: list[TraceEvent] = field(default_factory=list)
    findings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.findings


def init(model: Model, s0: dict[str, Value]) -> SimState:
    state = {}
    for name, sort in model.schema.vars:
        if name not in s0:
            raise SimError(f"initial state misses variable {name}")
        state[name] = coerce(s0[name], sort, f"initial {name}")
    return SimState(state=state, clock=Fraction(0), last=Fraction(0))


def time_advance(model: Model, st: SimState, consts: dict[str, Value]) -> Value:
    v = eval_expr(model.ta, {**consts, **st.state}, model)
    if isinstance(v, Inf):
        return v
    if isinstance(v, Num) and v.value >= 0:
        return v
    raise EvalError(f"ta produced {render_value(v)}")


def step(
    model: Model,
    st: SimState,
    consts: dict[str, Value],
    injected: tuple[Value, Fraction] | None = None,
) -> tuple[SimState, Value | None, TraceEvent]:
    """One transition.  `injected` carries (event, absolute time); absent,
    the pending internal transition fires at its deadline."""
    ta = time_advance(model, st, consts)
    if injected is None:
        if isinstance(ta, Inf):
            raise SimError("passive state, no internal transition")
        deadline = st.last + ta.value
        env = {**consts, **st.state}
        out_case = select_case(model.output_fn, env, model)
        if out_case is None:
            raise UndefinedTransition("lambda", _state_str(st.state))
        output = eval_expr(out_case.result, env, model)
        int_case = select_case(model.delta_int, env, model)
        if int_case is None:
            raise UndefinedTransition("dint", _state_str(st.state))
        new_state = _apply_result(model, int_case.result, env)
        nxt = SimState(new_state, deadline, deadline)
        event = TraceEvent(
            at=Num(deadline),
            kind="internal",
            fired=("dint", int_case.id),
            state_after=dict(new_state),
            output=output,
        )
        return nxt, output, event

    x, at_time = injected
    if at_time < st.clock:
        raise SimError("injected event lies in the past")
    e = at_time - st.last
    tie = False
    if not isinstance(ta, Inf):
        if e > ta.value:
            raise SimError("event after internal deadline")
        tie = e == ta.value
    env = {**consts, **st.state, "e": Num(e), "x": x}
    ext_case = select_case(model.delta_ext, env, model)
    if ext_case is None:
        raise UndefinedTransition(
            "dext", f"{_state_str(st.state)}, x={render_value(x)}, e={e}"
        )
    new_state = _apply_result(model, ext_case.result, env)
    nxt = SimState(new_state, at_time, at_time)
    event = TraceEvent(
        at=Num(at_time),
        kind="external",
        fired=("dext", ext_case.id),
        state_after=dict(new_state),
        input=x,
        tie=tie,
    )
    return nxt, None, event


def _apply_result(model: Model, result, env) -> dict[str, Value]:
    names = model.schema.names()
    if len(names) == 1:
        value = eval_expr(result, env, model)
        return {names[0]: coerce(value, model.schema.vars[0][1], names[0])}
    if isinstance(result, TupleExpr) and len(result.items) == len(names):
        parts = [eval_expr(item, env, model) for item in result.items]
    else:
        whole = eval_expr(result, env, model)
        if not isinstance(whole, Tup) or len(whole.items) != len(names):
            raise EvalError("transition result does not match the state schema")
        parts = list(whole.items)
    return {
        name: coerce(part, sort, name)
        for (name, sort), part in zip(model.schema.vars, parts)
    }


def _state_str(state: dict[str, Value]) -> str:
    return ", ".join(f"{k}={render_value(v)}" for k, v in state.items())


def run_config(model: Model, config: SimulationConfig, bounds: Bounds) -> Trace:
    """Drive one configuration: tau asks for the pending internal
    transition, anything else is injected at the configured time."""
    consts = const_env(bounds, model)
    trace = Trace()
    try:
        st = init(model, config.state)
    except (SimError, EvalError) as err:
        trace.findings.append(f"setup failed: {err}")
        return trace
    try:
        if config.event == TAU:
            st, _, event = step(model, st, consts)
        else:
            if not isinstance(config.time, Num):
                raise SimError("external event needs a finite time")
            st, _, event = step(model, st, consts, (config.event, config.time.value))
        trace.events.append(event)
    except UndefinedTransition as err:
        trace.findings.append(str(err))
        trace.events.append(
            TraceEvent(
                at=Num(st.clock), kind="error", fired=None,
                state_after=dict(st.state), error=str(err),
            )
        )
    except (SimError, EvalError) as err:
        trace.findings.append(f"step failed: {err}")
        trace.events.append(
            TraceEvent(
                at=Num(st.clock), kind="error", fired=None,
                state_after=dict(st.state), error=str(err),
            )
        )
    return trace


# ---------------------------------------------------------------------------
# uniformity probe

@dataclass
class ProbeReport:
    scc_id: int
    uniform: bool
    signatures: list[str]
    note: str = ""

    def to_json(self) -> dict:
        return {
            "scc": self.scc_id,
            "uniform": self.uniform,
            "signatures": self.signatures,
            "note": self.note,
        }


def uniformity_probe(
    model: Model, scc: SCC, k: int, bounds: Bounds
) -> ProbeReport:
    """Run several members of one class and compare their behavior
    signatures (case fired plus output shape).  Differing signatures mean
    the class is not uniform and should be re-partitioned."""
    samples = sample_configs(scc, k, model, bounds)
    if len(samples) < 2:
        return ProbeReport(
            scc.id, True, [],
            note="fewer than 2 witnesses available, probe skipped",
        )
    signatures = []
    for cfg in samples:
        trace = run_config(model, cfg, bounds)
        sig = []
        for ev in trace.events:
            step_sig = ev.fired[0] + ":" + str(ev.fired[1]) if ev.fired else "undefined"
            if ev.output is not None:
                step_sig += "/" + _shape(ev.output)
            sig.append(step_sig)
        signatures.append(";".join(sig) if sig else "no-step")
    uniform = len(set(signatures)) == 1
    note = "" if uniform else "members behave differently; re-partition this class"
    return ProbeReport(scc.id, uniform, signatures, note)


def _shape(v: Value) -> str:
    """Output constructor shape: literals kept, numerics wildcarded."""
    if isinstance(v, Tup):
        return "(%s)" % ",".join(_shape(x) for x in v.items)
    if isinstance(v, Lit):
        return v.name
    if isinstance(v, Inf):
        return "infinity"
    return "#"
