"""The surprise exam puzzle, three-day version.

The teacher likes exactly one of Wednesday, Thursday, Friday and announces
day by day whether they like it; the students should never know the liked
day in advance.  The world has one open root ("now") and one leaf per day,
so none of p1, p2, p3 is settled at the root: the teacher's choice is still
free.  The backward argument the students attempt needs "p3 is not satisfied"
to entail "not-p3 is satisfied", which fails here: both p3 and ~p3 are
unsettled at the root.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .beth import validate_beth
from .dynamic import BethKripkeModel, announce, satisfies
from .formula import And, Formula, Or, parse_formula


@dataclass(frozen=True)
class SepBundle:
    model: BethKripkeModel
    p1: Formula
    p2: Formula
    p3: Formula
    phi0: Formula
    phi1: Formula
    phi2: Formula
    phi3: Formula


def build_sep() -> SepBundle:
    world = validate_beth(
        nodes=("now", "wed", "thu", "fri"),
        order=(("now", "wed"), ("now", "thu"), ("now", "fri")),
        root="now",
        val={"wed": {"p1"}, "thu": {"p2"}, "fri": {"p3"}},
    )
    model = BethKripkeModel({"s": world}, ("student",), {"student": {("s", "s")}})
    return SepBundle(
        model=model,
        p1=parse_formula("p1"),
        p2=parse_formula("p2"),
        p3=parse_formula("p3"),
        phi0=parse_formula("(p1|p2|p3) & ~(p1&p2) & ~(p1&p3) & ~(p2&p3)"),
        phi1=parse_formula("<p1>top & ~K{student}p1"),
        phi2=parse_formula("<~p1><p2>top & <~p1>~K{student}p2"),
        phi3=parse_formula("<~p1><~p2><p3>top & <~p1><~p2>~K{student}p3"),
    )


@dataclass
class SepStep:
    step: int
    title: str
    facts: dict[str, bool]
    world_nodes: tuple[str, ...]
    commentary: tuple[str, ...]


def run_sep(step: Optional[int] = None) -> list[SepStep]:
    """Evaluate the puzzle; ``step`` limits the report to one stage."""
    bundle = build_sep()
    m = bundle.model
    steps: list[SepStep] = []

    if step in (None, 0):
        teacher = And(bundle.phi0, Or(Or(bundle.phi1, bundle.phi2), bundle.phi3))
        facts = {
            "phi0 & (phi1 | phi2 | phi3)": satisfies(m, "s", teacher).value,
            "phi0": satisfies(m, "s", bundle.phi0).value,
            "phi1": satisfies(m, "s", bundle.phi1).value,
            "phi2": satisfies(m, "s", bundle.phi2).value,
            "phi3": satisfies(m, "s", bundle.phi3).value,
            "p3": satisfies(m, "s", bundle.p3).value,
            "~p3": satisfies(m, "s", parse_formula("~p3")).value,
        }
        steps.append(SepStep(
            0, "the teacher's announcement holds, yet nothing is settled",
            facts, m.worlds["s"].node_order,
            (
                "The announcement phi0 & (phi1 | phi2 | phi3) is satisfied.",
                "Neither p3 nor ~p3 is satisfied at the root: the exam day is "
                "not predetermined.",
                "The backward argument needs 'p3 fails' to yield '~p3 holds'; "
                "here both fail, so it cannot start.",
            ),
        ))

    m1 = announce(m, parse_formula("~p1"))
    if step in (None, 1):
        facts = {
            "<p2>top": satisfies(m1, "s", parse_formula("<p2>top")).value,
            "~K{student}p2": satisfies(m1, "s", parse_formula("~K{student}p2")).value,
            "K{student}p2": satisfies(m1, "s", parse_formula("K{student}p2")).value,
        }
        steps.append(SepStep(
            1, "after announcing ~p1: Thursday still open, still unknown",
            facts, m1.worlds["s"].node_order,
            (
                "Announcing ~p1 removes the Wednesday branch.",
                "p2 is still announce-able and still not known in advance.",
            ),
        ))

    if step in (None, 2):
        m2 = announce(m1, parse_formula("~p2"))
        facts = {
            "K{student}p3": satisfies(m2, "s", parse_formula("K{student}p3")).value,
            "~K{student}p3": satisfies(m2, "s", parse_formula("~K{student}p3")).value,
            "phi3": satisfies(m, "s", bundle.phi3).value,
        }
        steps.append(SepStep(
            2, "after announcing ~p2: Friday is forced and known",
            facts, m2.worlds["s"].node_order,
            (
                "Only the root and the Friday leaf survive, so every "
                "remaining node forces p3 and the student knows it.",
                "Hence the in-advance-surprise claim phi3 is false in the "
                "original model, but that never made p3's negation true "
                "there, so the students' regress never gets going.",
            ),
        ))
    return steps
