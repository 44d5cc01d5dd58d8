"""Simulation configuration classes.

A class pairs a predicate over the state variables (which initial states
belong to it) with a predicate over an input pair (x, t), where x ranges
over the input events plus the no-event marker tau and t over time.
Classes produced by the cases criterion also carry a joint predicate
linking state and input through the original guard, so a representative
can be picked consistently.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .syntax import Predicate, normalize, render_pred


@dataclass(frozen=True)
class SCC:
    id: int
    init_states: Predicate
    input_pairs: Predicate
    criterion: str
    target: str
    combined_from: tuple[int, ...] = ()
    joint: Predicate | None = None

    def key(self) -> tuple[str, str]:
        return (render_pred(self.init_states), render_pred(self.input_pairs))

    def ancestry(self) -> tuple[int, ...]:
        return self.combined_from if self.combined_from else (self.id,)


def make_scc(
    init_states: Predicate,
    input_pairs: Predicate,
    criterion: str,
    target: str,
    joint: Predicate | None = None,
    id: int = 0,
) -> SCC:
    return SCC(
        id=id,
        init_states=normalize(init_states),
        input_pairs=normalize(input_pairs),
        criterion=criterion,
        target=target,
        joint=normalize(joint) if joint is not None else None,
    )


def assign_ids(sccs: list[SCC], start: int = 1) -> tuple[list[SCC], int]:
    """Renumber sequentially, dropping duplicates within each criterion.

    A criterion re-deriving the same class twice (the partition table
    applied to sibling cases of one occurrence, say) is noise and is
    removed.  The same shape arriving from two different criteria is
    kept under both provenances, the way the worked catalogs count them;
    `shape_overlaps` reports those.
    """
    out: list[SCC] = []
    seen: set[tuple[str, str, str]] = set()
    dropped = 0
    for scc in sccs:
        k = (scc.criterion, *scc.key())
        if k in seen:
            dropped += 1
            continue
        seen.add(k)
        out.append(replace(scc, id=start + len(out)))
    return out, dropped


def shape_overlaps(sccs: list[SCC]) -> list[str]:
    """Structurally equal classes produced by different criteria."""
    by_shape: dict[tuple[str, str], list[SCC]] = {}
    for scc in sccs:
        by_shape.setdefault(scc.key(), []).append(scc)
    notes = []
    for group in by_shape.values():
        if len({s.criterion for s in group}) > 1:
            ids = ", ".join(str(s.id) for s in group)
            notes.append(
                f"classes {ids} share one shape under different criteria"
            )
    return notes


def scc_to_json(scc: SCC) -> dict:
    record = {
        "id": scc.id,
        "init_states": render_pred(scc.init_states),
        "input_pairs": render_pred(scc.input_pairs),
        "criterion": scc.criterion,
        "target": scc.target,
    }
    if scc.combined_from:
        record["combined_from"] = list(scc.combined_from)
    if scc.joint is not None:
        record["joint"] = render_pred(scc.joint)
    return record
