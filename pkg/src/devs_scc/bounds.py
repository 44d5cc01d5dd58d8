"""Enumeration bounds: the finite grids behind every satisfiability answer.

Unbounded emptiness is undecidable for the predicates the criteria build,
so every check runs over per-sort grids declared in a bounds file.  An
"unsat" verdict is therefore always qualified: no witness within these
grids.  The time grid is a sample set that by default contains zero, the
declared constants, midpoints between consecutive constants and one point
beyond the largest, which is exactly the shape the time criterion needs
(t<a, t=a, a<t<b, t=b, t>b all have inhabitants).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .model import Model, StateSchema
from .values import (
    INF,
    TAU,
    EnumSort,
    ExtSort,
    IntSort,
    Lit,
    NatSort,
    Num,
    RatSort,
    Sort,
    TimeSort,
    Tup,
    TupleSort,
    Value,
    ext_base,
    ext_literals,
)

DEFAULT_NAT = (0, 5)
DEFAULT_INT = (-5, 5)
DEFAULT_RAT = (Fraction(0), Fraction(5), Fraction(1))  # lo, hi, step


class BoundsError(Exception):
    pass


@dataclass
class Bounds:
    nat_ranges: dict[str, tuple[int, int]] = field(default_factory=dict)
    int_ranges: dict[str, tuple[int, int]] = field(default_factory=dict)
    rat_grids: dict[str, tuple[Fraction, Fraction, Fraction]] = field(default_factory=dict)
    value_sets: dict[str, list[Value]] = field(default_factory=dict)
    time_samples: list[Fraction] | None = None
    const_values: dict[str, Value] = field(default_factory=dict)
    max_attempts: int = 200_000

    def validate(self) -> None:
        for name, (lo, hi) in {**self.nat_ranges, **self.int_ranges}.items():
            if lo > hi:
                raise BoundsError(f"empty range for {name or 'default'}: {lo}..{hi}")
        if self.time_samples is not None:
            if Fraction(0) not in self.time_samples:
                raise BoundsError("time sample set must contain 0")

    def times(self) -> list[Fraction]:
        """Finite time samples, ascending."""
        if self.time_samples is not None:
            return sorted(set(self.time_samples))
        consts = sorted(
            v.value
            for v in self.const_values.values()
            if isinstance(v, Num) and v.value >= 0
        )
        samples = {Fraction(0), *consts}
        for a, b in itertools.pairwise(consts):
            samples.add((a + b) / 2)
        if consts:
            samples.add(consts[-1] + 1)
        else:
            samples.update(Fraction(k) for k in range(1, 4))
        return sorted(samples)


def const_env(bounds: Bounds, model: Model) -> dict[str, Value]:
    """Concrete bindings for the model's symbolic constants."""
    env: dict[str, Value] = {}
    for name, _sort in model.constants:
        if name not in bounds.const_values:
            raise BoundsError(f"bounds file does not bind constant {name}")
        env[name] = bounds.const_values[name]
    return env


def var_grid(bounds: Bounds, name: str, sort: Sort) -> list[Value]:
    """Deterministic ascending domain for one variable."""
    if name in bounds.value_sets:
        return list(bounds.value_sets[name])
    return sort_grid(bounds, sort, name)


def sort_grid(bounds: Bounds, sort: Sort, name: str = "") -> list[Value]:
    if isinstance(sort, NatSort):
        lo, hi = bounds.nat_ranges.get(name) or bounds.nat_ranges.get("") or DEFAULT_NAT
        return [Num(Fraction(k)) for k in range(max(lo, 0), hi + 1)]
    if isinstance(sort, IntSort):
        lo, hi = bounds.int_ranges.get(name) or bounds.int_ranges.get("") or DEFAULT_INT
        return [Num(Fraction(k)) for k in range(lo, hi + 1)]
    if isinstance(sort, RatSort):
        lo, hi, step = (
            bounds.rat_grids.get(name) or bounds.rat_grids.get("") or DEFAULT_RAT
        )
        out = []
        v = lo
        while v <= hi:
            out.append(Num(v))
            v += step
        return out
    if isinstance(sort, TimeSort):
        return [Num(v) for v in bounds.times()] + [INF]
    if isinstance(sort, EnumSort):
        return [Lit(n) for n in sort.literals]
    if isinstance(sort, ExtSort):
        base = sort_grid(bounds, ext_base(sort), name)
        return base + [Lit(n) for n in ext_literals(sort)]
    if isinstance(sort, TupleSort):
        parts = [sort_grid(bounds, s, name) for s in sort.items]
        return [Tup(tuple(combo)) for combo in itertools.product(*parts)]
    raise BoundsError(f"no grid for sort {sort}")


def time_points(bounds: Bounds) -> list[Value]:
    """Grid for the input-pair time t and the elapsed time e (finite only)."""
    return [Num(v) for v in bounds.times()]


def input_grid(bounds: Bounds, model: Model, with_tau: bool) -> list[Value]:
    grid = sort_grid(bounds, model.input_sort, "x")
    return grid + [TAU] if with_tau else grid


def state_space(model: Model, bounds: Bounds) -> list[tuple[str, list[Value]]]:
    """Ordered (name, domain) pairs for the state variables."""
    return [
        (name, var_grid(bounds, name, sort)) for name, sort in model.schema.vars
    ]


def pair_space(model: Model, bounds: Bounds) -> list[tuple[str, list[Value]]]:
    """Domains for an input pair (x, t) including the no-event marker."""
    return [("x", input_grid(bounds, model, with_tau=True)), ("t", time_points(bounds))]


def joint_space(model: Model, bounds: Bounds) -> list[tuple[str, list[Value]]]:
    """Domains for a whole configuration.  The pair comes first so that
    executability constraints (t bounded by each timer) can prune the
    state search at the depth of the timer variables."""
    return pair_space(model, bounds) + state_space(model, bounds)


def schema_space(schema: StateSchema, bounds: Bounds) -> list[tuple[str, list[Value]]]:
    return [(name, var_grid(bounds, name, sort)) for name, sort in schema.vars]
