"""Combining classes by intersection and pruning the empty results.

Intersecting two classes conjoins their state predicates and their
input-pair predicates.  Normalization flattens and orders conjuncts, so
intersection is commutative and associative up to structural equality.
Empty intersections (unsatisfiable within bounds) are dropped while the
base classes are always retained; a combination whose emptiness could
not be decided within the attempt budget is kept and flagged rather than
silently losing coverage.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace

from .bounds import Bounds, pair_space, state_space
from .model import Model
from .sat import satisfiable
from .scc import SCC, make_scc
from .syntax import conj, conjuncts


@dataclass(frozen=True)
class CombinationPlan:
    groups: tuple[tuple[int, ...], ...] = ()
    all_pairs: bool = False
    max_arity: int = 2
    budget: int = 1000

    def __post_init__(self) -> None:
        if self.max_arity < 2:
            raise ValueError("max_arity must be at least 2")


@dataclass
class CombineReport:
    attempted: int = 0
    kept: int = 0
    dropped: int = 0
    unknown: int = 0
    budget_exhausted: bool = False
    notes: list[str] = field(default_factory=list)


def intersect(a: SCC, b: SCC) -> SCC:
    """Class intersection: conjunction on both components, ancestry is the
    sorted union of the operands' ancestries."""
    ancestry = tuple(sorted(set(a.ancestry()) | set(b.ancestry())))
    joint = None
    if a.joint is not None or b.joint is not None:
        left = a.joint if a.joint is not None else conj([a.init_states, a.input_pairs])
        right = b.joint if b.joint is not None else conj([b.init_states, b.input_pairs])
        joint = conj(conjuncts(left) + conjuncts(right))
    out = make_scc(
        conj([a.init_states, b.init_states]),
        conj([a.input_pairs, b.input_pairs]),
        "combined",
        "+".join(str(i) for i in ancestry),
        joint=joint,
    )
    return replace(out, combined_from=ancestry)


def combine_and_prune(
    base: list[SCC], plan: CombinationPlan, model: Model, bounds: Bounds
) -> tuple[list[SCC], CombineReport]:
    """Run a combination plan over a base catalog.

    Returns the full catalog (all base classes followed by the kept
    combinations, renumbered after the last base id) and the counts.
    """
    report = CombineReport()
    by_id = {s.id: s for s in base}
    groups: list[tuple[int, ...]] = [tuple(g) for g in plan.groups]
    if plan.all_pairs:
        groups.extend(itertools.combinations(sorted(by_id), 2))

    sspace = state_space(model, bounds)
    pspace = pair_space(model, bounds)
    kept: list[SCC] = []
    seen: set[tuple[int, ...]] = set()
    for group in groups:
        if len(group) < 2 or len(group) > plan.max_arity:
            report.notes.append(
                f"group {group}: size outside 2..{plan.max_arity}, skipped"
            )
            continue
        missing = [i for i in group if i not in by_id]
        if missing:
            report.notes.append(f"group {group}: unknown ids {missing}, skipped")
            continue
        if report.attempted >= plan.budget:
            report.budget_exhausted = True
            report.notes.append("combination budget exhausted; partial result")
            break
        report.attempted += 1
        members = sorted(group)
        key = tuple(members)
        if key in seen:
            continue
        seen.add(key)
        combo = by_id[members[0]]
        for i in members[1:]:
            combo = intersect(combo, by_id[i])
        init_ok = satisfiable(combo.init_states, sspace, bounds, model)
        pairs_ok = satisfiable(combo.input_pairs, pspace, bounds, model)
        if init_ok.status == "unsat" or pairs_ok.status == "unsat":
            report.dropped += 1
            continue
        if init_ok.status == "unknown" or pairs_ok.status == "unknown":
            report.unknown += 1
            report.notes.append(
                f"combination {combo.target}: emptiness unknown within budget, kept"
            )
        report.kept += 1
        kept.append(combo)

    next_id = max((s.id for s in base), default=0)
    catalog = list(base)
    for combo in sorted(kept, key=lambda s: s.combined_from):
        next_id += 1
        catalog.append(replace(combo, id=next_id))
    return catalog, report
