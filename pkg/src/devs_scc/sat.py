"""Bounded satisfiability and witness search.

The search runs depth-first over the declared variable order with each
variable's grid ascending, so the first witness found is the
lexicographically least satisfying assignment — reproducible across
runs and platforms.  Conjuncts are checked as soon as all their
variables are bound, which prunes most of the product space for the
conjunction-shaped predicates the criteria produce.  A verdict of
"unsat" always means: no witness within the supplied bounds.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bounds import Bounds, const_env, var_grid
from .evaluator import eval_pred
from .model import Model
from .syntax import (
    Exists,
    FALSE,
    Predicate,
    conj,
    conjuncts,
    normalize,
    pred_vars,
)
from .values import EvalError, Sort, Value

Space = list[tuple[str, list[Value]]]


class BudgetExhausted(Exception):
    pass


@dataclass
class SatResult:
    status: str  # "sat" | "unsat" | "unknown"
    witness: dict[str, Value] | None = None
    attempts: int = 0

    @property
    def sat(self) -> bool:
        return self.status == "sat"


@dataclass
class _Budget:
    limit: int
    used: int = 0

    def spend(self) -> None:
        self.used += 1
        if self.used > self.limit:
            raise BudgetExhausted()


def satisfiable(
    pred: Predicate,
    space: Space,
    bounds: Bounds,
    model: Model | None = None,
    base_env: dict[str, Value] | None = None,
) -> SatResult:
    """Least witness over `space`, or unsat-within-bounds, or unknown when
    the attempt budget runs out."""
    env = dict(base_env) if base_env else {}
    if model is not None:
        env = {**const_env(bounds, model), **env}
    budget = _Budget(bounds.max_attempts)
    try:
        witness = _search(pred, space, env, bounds, model, budget)
    except BudgetExhausted:
        return SatResult("unknown", attempts=budget.used)
    if witness is None:
        return SatResult("unsat", attempts=budget.used)
    return SatResult("sat", witness=witness, attempts=budget.used)


def _search(pred, space, base_env, bounds, model, budget):
    norm = normalize(pred)
    if norm == FALSE:
        return None
    names = [n for n, _ in space]
    order = {n: i for i, n in enumerate(names)}
    pre: list[Predicate] = []
    per_depth: list[list[Predicate]] = [[] for _ in names]
    for c in conjuncts(norm):
        touched = [order[v] for v in pred_vars(c) if v in order]
        if touched:
            per_depth[max(touched)].append(c)
        else:
            pre.append(c)
    for c in pre:
        budget.spend()
        if not _holds(c, base_env, model, bounds):
            return None

    env = dict(base_env)

    def dfs(depth: int):
        if depth == len(space):
            return {n: env[n] for n in names}
        name, grid = space[depth]
        for v in grid:
            budget.spend()
            env[name] = v
            if all(_holds(c, env, model, bounds) for c in per_depth[depth]):
                found = dfs(depth + 1)
                if found is not None:
                    return found
        env.pop(name, None)
        return None

    return dfs(0)


def _holds(pred, env, model, bounds) -> bool:
    try:
        return eval_pred(pred, env, model, bounds)
    except EvalError:
        return False


def iter_witnesses(
    pred: Predicate,
    space: Space,
    bounds: Bounds,
    model: Model | None = None,
    base_env: dict[str, Value] | None = None,
    limit: int = 1_000_000,
):
    """All witnesses in lexicographic order (up to an attempt limit)."""
    env = dict(base_env) if base_env else {}
    if model is not None:
        env = {**const_env(bounds, model), **env}
    norm = normalize(pred)
    if norm == FALSE:
        return
    names = [n for n, _ in space]
    order = {n: i for i, n in enumerate(names)}
    pre: list[Predicate] = []
    per_depth: list[list[Predicate]] = [[] for _ in names]
    for c in conjuncts(norm):
        touched = [order[v] for v in pred_vars(c) if v in order]
        if touched:
            per_depth[max(touched)].append(c)
        else:
            pre.append(c)
    if not all(_holds(c, env, model, bounds) for c in pre):
        return
    budget = _Budget(limit)

    def dfs(depth: int):
        if depth == len(space):
            yield {n: env[n] for n in names}
            return
        name, grid = space[depth]
        for v in grid:
            try:
                budget.spend()
            except BudgetExhausted:
                return
            env[name] = v
            if all(_holds(c, env, model, bounds) for c in per_depth[depth]):
                yield from dfs(depth + 1)
        env.pop(name, None)

    yield from dfs(0)


# ---------------------------------------------------------------------------
# existential projection

def project_exists(
    pred: Predicate,
    drop: list[tuple[str, Sort]],
    bounds: Bounds,
    model: Model | None = None,
) -> Predicate:
    """Project a predicate onto the variables outside `drop`.

    Conjuncts free of the dropped variables are hoisted unchanged.
    Conjuncts that touch them are clustered by the dropped variables they
    share; a cluster whose remaining free variables are all dropped or
    constant is decided by bounded search (a found witness discharges it
    to true), and any cluster that cannot be discharged stays behind a
    first-class existential whose membership tests enumerate the bounds.
    """
    drop_sorts = dict(drop)
    drop_order = [n for n, _ in drop]
    keep: list[Predicate] = []
    clusters: list[tuple[set[str], list[Predicate]]] = []
    for c in conjuncts(normalize(pred)):
        mine = pred_vars(c) & drop_sorts.keys()
        if not mine:
            keep.append(c)
            continue
        merged_vars = set(mine)
        merged_preds = [c]
        rest: list[tuple[set[str], list[Predicate]]] = []
        for vars_, preds in clusters:
            if vars_ & merged_vars:
                merged_vars |= vars_
                merged_preds = preds + merged_preds
            else:
                rest.append((vars_, preds))
        rest.append((merged_vars, merged_preds))
        clusters = rest

    const_names = set()
    if model is not None:
        const_names = {n for n, _ in model.constants}
    for vars_, preds in clusters:
        body = conj(preds)
        bound = [(n, drop_sorts[n]) for n in drop_order if n in vars_]
        free_outside = pred_vars(body) - vars_ - const_names
        if not free_outside:
            space = [(n, var_grid(bounds, n, s)) for n, s in bound]
            verdict = satisfiable(body, space, bounds, model)
            if verdict.sat:
                continue  # inhabited: contributes nothing to the projection
        keep.append(Exists(tuple(bound), body))
    return normalize(conj(keep))
