"""Deterministic pretty-printing of models back to DSL text.

Reparsing the rendered text reproduces the model structurally: sort
aliases and let-bindings are already resolved in the in-memory form, so
they never appear in output.
"""

from __future__ import annotations

from .model import GuardedCase, Model, OperatorDef
from .syntax import TRUE, render_expr, render_pred


def render_model(model: Model) -> str:
    lines: list[str] = [f"model {model.name} {{"]
    for name, sort in model.constants:
        lines.append(f"  const {name}: {sort};")
    lines.append("  state {")
    time_vars = set(model.schema.time_vars)
    for name, sort in model.schema.vars:
        suffix = " @time" if name in time_vars else ""
        lines.append(f"    {name}: {sort}{suffix};")
    lines.append("  }")
    lines.append(f"  input {model.input_sort};")
    lines.append(f"  output {model.output_sort};")
    for op in model.operators:
        lines.extend(_render_op(op))
    lines.append(f"  ta = {render_expr(model.ta)};")
    lines.extend(_render_fn("dext(s, e, x)", model.delta_ext))
    lines.extend(_render_fn("dint(s)", model.delta_int))
    lines.extend(_render_fn("lambda(s)", model.output_fn))
    lines.append("}")
    return "\n".join(lines) + "\n"


def _render_op(op: OperatorDef) -> list[str]:
    params = ", ".join(f"{n}: {s}" for n, s in op.params)
    head = f"  op {op.name}({params}): {op.result} {{"
    if len(op.cases) == 1 and op.cases[0].guard == TRUE and not op.cases[0].is_otherwise:
        return [head, f"    {render_expr(op.cases[0].result)};", "  }"]
    return [head, *_render_cases(op.cases), "  }"]


def _render_fn(head: str, cases: tuple[GuardedCase, ...]) -> list[str]:
    return [f"  {head} {{", *_render_cases(cases), "  }"]


def _render_cases(cases: tuple[GuardedCase, ...]) -> list[str]:
    out = []
    for case in cases:
        if case.is_otherwise:
            out.append(f"    otherwise -> {render_expr(case.result)};")
        else:
            out.append(f"    case {render_pred(case.guard)} -> {render_expr(case.result)};")
    return out
