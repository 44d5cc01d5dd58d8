"""Name resolution and sort checking for models.

Binding rewrites parser output in place of guesswork: identifiers become
state-variable references, symbolic constants, or enum literals resolved
against the sort expected where they appear.  Sort checking is
bidirectional — inference where possible, checking against an expected
sort where a literal needs context.  `validate_model` re-binds an entire
model, so it also works as a standalone audit of programmatically built
models, and optionally runs bounded dynamic checks (guard overlap and
exhaustiveness sampling) when given enumeration bounds.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from math import prod

from .bounds import Bounds, const_env, schema_space, sort_grid, time_points
from .evaluator import eval_expr, eval_pred
from .model import GuardedCase, Model, OperatorDef, ValidationReport
from .syntax import (
    And,
    Apply,
    BinOp,
    BoolConst,
    Cmp,
    Const,
    ConstRef,
    Exists,
    Expr,
    Implies,
    InBase,
    InSet,
    MinOp,
    Name,
    Neg,
    Not,
    Or,
    Predicate,
    Proj,
    Ref,
    TupleExpr,
    expr_vars,
    render_expr,
    render_pred,
)
from .values import (
    EvalError,
    Inf,
    Lit,
    NatSort,
    Num,
    Sort,
    TimeSort,
    TupleSort,
    ExtSort,
    TIME,
    INT,
    NAT,
    RAT,
    ext_base,
    is_numeric,
    numeric_join,
    sort_literals,
    render_value,
)


class BindError(Exception):
    pass


class Unresolved(BindError):
    """An identifier that is neither a variable nor a constant; it may
    still resolve as a literal once an expected sort is known."""


@dataclass
class Ctx:
    vars: dict[str, Sort]
    consts: dict[str, Sort]
    operators: dict[str, OperatorDef]
    where: str = ""

    def child(self, extra: dict[str, Sort], where: str | None = None) -> "Ctx":
        return Ctx({**self.vars, **extra}, self.consts, self.operators,
                   where if where is not None else self.where)


def infer_expr(expr: Expr, ctx: Ctx) -> tuple[Expr, Sort]:
    if isinstance(expr, Const):
        v = expr.value
        if isinstance(v, Num):
            if v.value.denominator == 1:
                return expr, NAT if v.value >= 0 else INT
            return expr, RAT
        if isinstance(v, Inf):
            return expr, TIME
        raise Unresolved(render_value(v))
    if isinstance(expr, (Ref, Name)):
        if expr.name in ctx.vars:
            return Ref(expr.name), ctx.vars[expr.name]
        if expr.name in ctx.consts:
            return ConstRef(expr.name), ctx.consts[expr.name]
        raise Unresolved(expr.name)
    if isinstance(expr, ConstRef):
        if expr.name in ctx.consts:
            return expr, ctx.consts[expr.name]
        raise BindError(f"unknown constant {expr.name}{_at(ctx)}")
    if isinstance(expr, BinOp):
        left, ls = infer_expr(expr.left, ctx)
        right, rs = infer_expr(expr.right, ctx)
        for side, s in (("left", ls), ("right", rs)):
            if not is_numeric(s):
                raise BindError(
                    f"{side} operand of {expr.op} is not numeric{_at(ctx)}"
                )
        if expr.op == "div":
            out = NAT if isinstance(ls, NatSort) and isinstance(rs, NatSort) else INT
        elif expr.op == "-":
            # subtraction may dip below zero; the slot receiving the value
            # enforces the nat/time floor at evaluation time
            out = numeric_join(numeric_join(ls, rs), INT)
        else:
            out = numeric_join(ls, rs)
        return BinOp(expr.op, left, right), out
    if isinstance(expr, Neg):
        arg, s = infer_expr(expr.arg, ctx)
        if not is_numeric(s):
            raise BindError(f"cannot negate non-numeric value{_at(ctx)}")
        return Neg(arg), numeric_join(s, INT)
    if isinstance(expr, MinOp):
        args = []
        out: Sort = NAT
        for a in expr.args:
            ta, s = infer_expr(a, ctx)
            if not is_numeric(s):
                raise BindError(f"min over non-numeric argument{_at(ctx)}")
            args.append(ta)
            out = numeric_join(out, s)
        return MinOp(tuple(args)), out
    if isinstance(expr, TupleExpr):
        typed = [infer_expr(a, ctx) for a in expr.items]
        return (
            TupleExpr(tuple(t for t, _ in typed)),
            TupleSort(tuple(s for _, s in typed)),
        )
    if isinstance(expr, Proj):
        base, s = infer_expr(expr.base, ctx)
        if not isinstance(s, TupleSort):
            raise BindError(f"projection from non-tuple {render_expr(expr.base)}{_at(ctx)}")
        if not 1 <= expr.index <= len(s.items):
            raise BindError(f"projection index {expr.index} out of range{_at(ctx)}")
        return Proj(base, expr.index), s.items[expr.index - 1]
    if isinstance(expr, Apply):
        if expr.op not in ctx.operators:
            raise BindError(f"unknown operator {expr.op}{_at(ctx)}")
        op = ctx.operators[expr.op]
        if len(expr.args) != len(op.params):
            raise BindError(
                f"operator {op.name} expects {len(op.params)} arguments, "
                f"got {len(expr.args)}{_at(ctx)}"
            )
        args = tuple(
            check_expr(a, ctx, sort) for a, (_, sort) in zip(expr.args, op.params)
        )
        return Apply(expr.op, args), op.result
    raise BindError(f"cannot infer sort of {expr!r}{_at(ctx)}")


def check_expr(expr: Expr, ctx: Ctx, expected: Sort) -> Expr:
    # literal resolution happens only here, against the expected sort
    if isinstance(expr, (Ref, Name)) and expr.name not in ctx.vars and expr.name not in ctx.consts:
        if expr.name in sort_literals(expected):
            return Const(Lit(expr.name))
        raise BindError(f"unbound variable {expr.name}{_at(ctx)}")
    if isinstance(expr, Const) and isinstance(expr.value, Lit):
        if expr.value.name in sort_literals(expected):
            return expr
        raise BindError(
            f"literal {expr.value.name} does not belong to {expected}{_at(ctx)}"
        )
    if isinstance(expr, TupleExpr) and isinstance(expected, TupleSort):
        if len(expr.items) != len(expected.items):
            raise BindError(
                f"tuple has {len(expr.items)} components, "
                f"{expected} needs {len(expected.items)}{_at(ctx)}"
            )
        return TupleExpr(
            tuple(check_expr(a, ctx, s) for a, s in zip(expr.items, expected.items))
        )
    if isinstance(expected, ExtSort):
        # a name may be one of the added literals; otherwise fall through to
        # the numeric base
        if isinstance(expr, (Ref, Name)) and expr.name in ctx.vars:
            typed, actual = infer_expr(expr, ctx)
            if _compat(actual, expected):
                return typed
            raise BindError(
                f"{render_expr(expr)} has sort {actual}, expected {expected}{_at(ctx)}"
            )
    typed, actual = infer_expr(expr, ctx)
    if not _compat(actual, expected):
        raise BindError(
            f"{render_expr(expr)} has sort {actual}, expected {expected}{_at(ctx)}"
        )
    return typed


def _compat(actual: Sort, expected: Sort) -> bool:
    """Static assignability; exact range checks stay with the evaluator."""
    if actual == expected:
        return True
    if is_numeric(actual) and is_numeric(expected):
        # time admits any numeric, and numeric slots reject time (may be inf)
        return not isinstance(actual, TimeSort) or isinstance(expected, TimeSort)
    if isinstance(expected, ExtSort):
        if isinstance(actual, ExtSort):
            return _compat(ext_base(actual), ext_base(expected))
        return _compat(actual, ext_base(expected))
    if isinstance(actual, TupleSort) and isinstance(expected, TupleSort):
        return len(actual.items) == len(expected.items) and all(
            _compat(a, b) for a, b in zip(actual.items, expected.items)
        )
    return False


def _orderable(sort: Sort) -> bool:
    return is_numeric(sort) or (isinstance(sort, ExtSort) and is_numeric(ext_base(sort)))


def bind_pred(pred: Predicate, ctx: Ctx) -> Predicate:
    if isinstance(pred, BoolConst):
        return pred
    if isinstance(pred, Cmp):
        try:
            left, ls = infer_expr(pred.left, ctx)
            try:
                right, rs = infer_expr(pred.right, ctx)
            except Unresolved:
                right, rs = check_expr(pred.right, ctx, ls), ls
        except Unresolved:
            right, rs = infer_expr(pred.right, ctx)
            left, ls = check_expr(pred.left, ctx, rs), rs
        if pred.op in ("<", "<=", ">", ">="):
            if not (_orderable(ls) and _orderable(rs)):
                raise BindError(
                    f"cannot order {ls} against {rs} in "
                    f"{render_pred(pred)}{_at(ctx)}"
                )
        else:
            if not (_compat(ls, rs) or _compat(rs, ls)):
                raise BindError(
                    f"cannot compare {ls} with {rs} in {render_pred(pred)}{_at(ctx)}"
                )
        return Cmp(pred.op, left, right)
    if isinstance(pred, InSet):
        expr, sort = infer_expr(pred.expr, ctx)
        known = sort_literals(sort)
        for lit in pred.literals:
            if lit not in known:
                raise BindError(
                    f"{lit} is not a literal of {sort} in {render_pred(pred)}{_at(ctx)}"
                )
        return InSet(expr, pred.literals)
    if isinstance(pred, InBase):
        expr, sort = infer_expr(pred.expr, ctx)
        if not isinstance(sort, ExtSort):
            raise BindError(
                f"`in nat` needs an extended sort, got {sort}{_at(ctx)}"
            )
        return InBase(expr)
    if isinstance(pred, Not):
        return Not(bind_pred(pred.arg, ctx))
    if isinstance(pred, And):
        return And(tuple(bind_pred(q, ctx) for q in pred.items))
    if isinstance(pred, Or):
        return Or(tuple(bind_pred(q, ctx) for q in pred.items))
    if isinstance(pred, Implies):
        return Implies(bind_pred(pred.left, ctx), bind_pred(pred.right, ctx))
    if isinstance(pred, Exists):
        inner = ctx.child(dict(pred.bound))
        return Exists(pred.bound, bind_pred(pred.body, inner))
    raise BindError(f"cannot bind predicate {pred!r}{_at(ctx)}")


def _at(ctx: Ctx) -> str:
    return f" (in {ctx.where})" if ctx.where else ""


# ---------------------------------------------------------------------------
# whole-model validation

def state_result_sort(model: Model) -> Sort:
    sorts = tuple(s for _, s in model.schema.vars)
    return sorts[0] if len(sorts) == 1 else TupleSort(sorts)


def state_ctx(model: Model, where: str = "") -> Ctx:
    return Ctx(
        dict(model.schema.vars),
        dict(model.constants),
        {op.name: op for op in model.operators},
        where,
    )


def ext_ctx(model: Model, where: str = "") -> Ctx:
    ctx = state_ctx(model, where)
    return ctx.child({"e": TIME, "x": model.input_sort})


def validate_model(model: Model, bounds: Bounds | None = None) -> tuple[Model, ValidationReport]:
    """Re-bind and check a whole model.

    Returns the rebound model (identical modulo resolved names) and a
    report.  The model is usable only when the report carries no errors.
    With bounds, also samples guard coverage: states where no case of a
    transition function matches (non-exhaustive) or several do (overlap,
    resolved by first-match order but worth knowing about).
    """
    report = ValidationReport()
    report.ext_cases = len(model.delta_ext)
    report.int_cases = len(model.delta_int)
    report.out_cases = len(model.output_fn)

    operators = _bind_operators(model, report)
    model = replace(model, operators=operators)

    result_sort = state_result_sort(model)
    dext = _bind_cases(model, model.delta_ext, ext_ctx(model), result_sort, "dext", report)
    dint = _bind_cases(model, model.delta_int, state_ctx(model), result_sort, "dint", report)
    lam = _bind_cases(model, model.output_fn, state_ctx(model), model.output_sort, "lambda", report)

    ta = model.ta
    if ta is None:
        report.errors.append("missing ta expression")
    else:
        try:
            ta = check_expr(ta, state_ctx(model, "ta"), TIME)
        except BindError as err:
            report.errors.append(str(err))

    bound = replace(model, delta_ext=dext, delta_int=dint, output_fn=lam, ta=ta)
    _suggest_time_vars(bound, report)
    if bounds is not None and report.usable:
        _dynamic_checks(bound, bounds, report)
    return bound, report


def _bind_operators(model: Model, report: ValidationReport) -> tuple[OperatorDef, ...]:
    seen: set[str] = set()
    out: list[OperatorDef] = []
    for op in model.operators:
        if op.name in seen:
            report.errors.append(f"duplicate operator {op.name}")
            continue
        seen.add(op.name)
        ctx = Ctx(dict(op.params), dict(model.constants),
                  {o.name: o for o in model.operators}, f"operator {op.name}")
        cases: list[GuardedCase] = []
        for case in op.cases:
            try:
                guard = bind_pred(case.guard, ctx)
                result = check_expr(case.result, ctx, op.result)
                cases.append(replace(case, guard=guard, result=result))
            except BindError as err:
                report.errors.append(str(err))
                cases.append(case)
        out.append(replace(op, cases=tuple(cases)))
    _check_operator_cycles(out, report)
    return tuple(out)


def _check_operator_cycles(ops: list[OperatorDef], report: ValidationReport) -> None:
    calls: dict[str, set[str]] = {}
    for op in ops:
        used: set[str] = set()
        for case in op.cases:
            for node in _expr_nodes(case.result):
                if isinstance(node, Apply):
                    used.add(node.op)
        calls[op.name] = used
    seen: dict[str, int] = {}  # 0 visiting, 1 done

    def visit(name: str, trail: list[str]) -> None:
        if seen.get(name) == 1:
            return
        if seen.get(name) == 0:
            report.errors.append(
                "recursive operator definitions: " + " -> ".join(trail + [name])
            )
            return
        seen[name] = 0
        for callee in sorted(calls.get(name, ())):
            if callee in calls:
                visit(callee, trail + [name])
        seen[name] = 1

    for name in calls:
        visit(name, [])


def _bind_cases(model, cases, ctx, result_sort, fn, report) -> tuple[GuardedCase, ...]:
    seen_ids: set[int] = set()
    otherwise_seen = False
    out: list[GuardedCase] = []
    for i, case in enumerate(cases):
        where = f"{fn} case {case.id}"
        if case.id in seen_ids:
            report.errors.append(f"duplicate case id {case.id} in {fn}")
        seen_ids.add(case.id)
        if case.is_otherwise:
            if otherwise_seen:
                report.errors.append(f"more than one otherwise case in {fn}")
            otherwise_seen = True
            if i != len(cases) - 1:
                report.errors.append(f"otherwise case of {fn} must come last")
        try:
            cctx = Ctx(ctx.vars, ctx.consts, ctx.operators, where)
            guard = case.guard if case.is_otherwise else bind_pred(case.guard, cctx)
            result = check_expr(case.result, cctx, result_sort)
            out.append(replace(case, guard=guard, result=result))
        except BindError as err:
            report.errors.append(str(err))
            out.append(case)
    return tuple(out)


def _expr_nodes(expr: Expr):
    yield expr
    if isinstance(expr, BinOp):
        yield from _expr_nodes(expr.left)
        yield from _expr_nodes(expr.right)
    elif isinstance(expr, Neg):
        yield from _expr_nodes(expr.arg)
    elif isinstance(expr, MinOp):
        for a in expr.args:
            yield from _expr_nodes(a)
    elif isinstance(expr, TupleExpr):
        for a in expr.items:
            yield from _expr_nodes(a)
    elif isinstance(expr, Proj):
        yield from _expr_nodes(expr.base)
    elif isinstance(expr, Apply):
        for a in expr.args:
            yield from _expr_nodes(a)


def _suggest_time_vars(model: Model, report: ValidationReport) -> None:
    """Non-binding hint: variables that look time-interacting but carry no
    @time annotation.  Looks for atoms mixing a state variable with the
    elapsed time and for variables feeding the time advance."""
    suspects: set[str] = set(expr_vars(model.ta)) if model.ta is not None else set()
    state_names = set(model.schema.names())
    for case in model.delta_ext:
        for atom in _atoms_of(case.guard):
            vs = expr_vars(atom.left) | expr_vars(atom.right)
            if "e" in vs:
                suspects |= vs & state_names
        for node in _expr_nodes(case.result):
            if isinstance(node, BinOp):
                vs = expr_vars(node)
                if "e" in vs:
                    suspects |= vs & state_names
    missing = sorted(suspects & state_names - set(model.schema.time_vars))
    if missing:
        report.notes.append(
            "variables that appear time-interacting but lack @time: "
            + ", ".join(missing)
        )


def _atoms_of(pred: Predicate):
    if isinstance(pred, Cmp):
        yield pred
    elif isinstance(pred, (And, Or)):
        for q in pred.items:
            yield from _atoms_of(q)
    elif isinstance(pred, Not):
        yield from _atoms_of(pred.arg)
    elif isinstance(pred, Implies):
        yield from _atoms_of(pred.left)
        yield from _atoms_of(pred.right)


_COVERAGE_BUDGET = 400


def _dynamic_checks(model: Model, bounds: Bounds, report: ValidationReport) -> None:
    consts = const_env(bounds, model)
    space = schema_space(model.schema, bounds)
    ext_space = space + [
        ("e", time_points(bounds)),
        ("x", sort_grid(bounds, model.input_sort, "x")),
    ]
    _coverage(model, model.delta_ext, ext_space, consts, "dext", report)
    _coverage(model, model.delta_int, space, consts, "dint", report)
    _coverage(model, model.output_fn, space, consts, "lambda", report)
    # ta totality over sampled states
    for env in _strided(space, _COVERAGE_BUDGET // 4):
        try:
            v = eval_expr(model.ta, {**consts, **env}, model)
        except EvalError as err:
            report.warnings.append(f"ta failed on a sampled state: {err}")
            break
        if not (isinstance(v, (Num, Inf)) and (isinstance(v, Inf) or v.value >= 0)):
            report.warnings.append("ta produced a non-time value on a sampled state")
            break


def _coverage(model, cases, space, consts, fn, report) -> None:
    if not cases:
        report.warnings.append(f"{fn} has no cases")
        return
    gap_seen = overlap_seen = False
    for env in _strided(space, _COVERAGE_BUDGET):
        full = {**consts, **env}
        hits = []
        for case in cases:
            try:
                if case.is_otherwise or eval_pred(case.guard, full, model):
                    hits.append(case.id)
            except EvalError:
                continue
        if not hits and not gap_seen:
            gap_seen = True
            report.warnings.append(
                f"{fn} is not exhaustive within bounds, e.g. "
                + _render_env(env)
            )
        if len(hits) > 1 and not overlap_seen:
            overlap_seen = True
            report.warnings.append(
                f"{fn} cases {hits[0]} and {hits[1]} overlap (first match wins), e.g. "
                + _render_env(env)
            )
        if gap_seen and overlap_seen:
            break


def _strided(space, budget: int):
    """Deterministic stratified sample of a mixed-radix product space."""
    sizes = [len(grid) for _, grid in space]
    total = prod(sizes)
    if total == 0:
        return
    take = min(total, budget)
    for i in range(take):
        idx = i * total // take
        env = {}
        for (name, grid), size in zip(reversed(space), reversed(sizes)):
            env[name] = grid[idx % size]
            idx //= size
        yield env


def _render_env(env) -> str:
    return ", ".join(f"{k}={render_value(v)}" for k, v in sorted(env.items()))
