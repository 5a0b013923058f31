"""Beth-Kripke models: worlds are pointed Beth models, knowledge quantifies
over accessible worlds, and announcements update the whole model.

Announcing φ removes the nodes of each world where φ can never become
settled (the nodes forcing ¬φ), drops worlds whose root already forces ¬φ,
and restricts the accessibility relations to the surviving worlds.  The
announcement operators are root-anchored: every node of a world agrees on
[φ]ψ and <φ>ψ, which refer to the world's root before and after the update.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from . import beth
from .beth import BethModel, validate_beth
from .formula import (
    And, Announce, Atom, Bot, Diamond, Formula, Imp, Know, Neg, Or, Top,
    is_propositional, print_formula,
)


class UnknownWorld(beth.ModelError):
    def __init__(self, world: str):
        super().__init__(f"unknown world {world!r}")
        self.world = world


class UnknownAgent(beth.ModelError):
    def __init__(self, agent: str):
        super().__init__(f"unknown agent {agent!r}")
        self.agent = agent


class BethKripkeModel:
    """Named pointed Beth models plus per-agent accessibility between world
    names.  Immutable; evaluation results are memoized per instance, so a
    restricted model never shares caches with its parent."""

    def __init__(self, worlds: Mapping[str, BethModel], agents: Iterable[str],
                 access: Mapping[str, Iterable[tuple[str, str]]]):
        self.worlds = dict(sorted(worlds.items()))
        self.world_order = tuple(self.worlds)
        self.agents = frozenset(agents)
        self.access: dict[str, frozenset[tuple[str, str]]] = {a: frozenset() for a in self.agents}
        for agent, pairs in access.items():
            if agent not in self.agents:
                raise UnknownAgent(agent)
            pairs = frozenset(pairs)
            for s, t in pairs:
                if s not in self.worlds:
                    raise UnknownWorld(s)
                if t not in self.worlds:
                    raise UnknownWorld(t)
            self.access[agent] = pairs
        self._succ: dict[tuple[str, str], tuple[str, ...]] = {}
        self._memo: dict[tuple[str, str, Formula], bool] = {}
        self._announce: dict[Formula, "BethKripkeModel"] = {}
        self._s5: Optional[bool] = None

    def world(self, s: str) -> BethModel:
        try:
            return self.worlds[s]
        except KeyError:
            raise UnknownWorld(s) from None

    def successors(self, agent: str, s: str) -> tuple[str, ...]:
        if agent not in self.agents:
            raise UnknownAgent(agent)
        key = (agent, s)
        hit = self._succ.get(key)
        if hit is None:
            hit = tuple(sorted(t for (u, t) in self.access[agent] if u == s))
            self._succ[key] = hit
        return hit

    @property
    def is_empty(self) -> bool:
        return not self.worlds

    @property
    def is_s5(self) -> bool:
        """Every agent's accessibility is an equivalence relation."""
        if self._s5 is None:
            self._s5 = all(report.equivalence for report in check_s5(self).values())
        return self._s5

    def __repr__(self) -> str:
        return f"BethKripkeModel(worlds={self.world_order!r}, agents={sorted(self.agents)!r})"


@dataclass
class Trace:
    """One evaluation step: which clause fired, where, and with what outcome.
    ``note`` carries the exhibited bar/path/up-set evidence."""
    world: str
    node: str
    formula: Formula
    rule: str
    value: bool
    note: str = ""
    children: tuple["Trace", ...] = ()


@dataclass
class EvalResult:
    value: bool
    trace: Optional[Trace] = None

    def __bool__(self) -> bool:
        return self.value


def _eval(m: BethKripkeModel, s: str, node: str, f: Formula) -> bool:
    # Propositional formulas force exactly as in the bare Beth model.
    if is_propositional(f):
        return beth.forces_prop(m.world(s), node, f)
    key = (s, node, f)
    hit = m._memo.get(key)
    if hit is not None:
        return hit
    w = m.world(s)
    w.ensure_node(node)
    match f:
        case And(x, y):
            value = _eval(m, s, node, x) and _eval(m, s, node, y)
        case Or(x, y):
            value = beth.is_bar(w, node, (b for b in w.up[node]
                                          if _eval(m, s, b, x) or _eval(m, s, b, y)))
        case Imp(x, y):
            value = all(_eval(m, s, b, y) for b in w.up[node] if _eval(m, s, b, x))
        case Neg(x):
            value = not any(_eval(m, s, b, x) for b in w.up[node])
        case Know(agent, body):
            value = all(
                _eval(m, t, b, body)
                for t in m.successors(agent, s)
                for b in m.world(t).node_order
            )
        case Announce(ann, body):
            value = (not _announceable(m, s, ann)) or _eval_after(m, s, ann, body)
        case Diamond(ann, body):
            value = _announceable(m, s, ann) and _eval_after(m, s, ann, body)
        case _:
            raise TypeError(f"not a formula: {f!r}")
    m._memo[key] = value
    return value


def _announceable(m: BethKripkeModel, s: str, ann: Formula) -> bool:
    root = m.world(s).root
    return not _eval(m, s, root, Neg(ann))


def _eval_after(m: BethKripkeModel, s: str, ann: Formula, body: Formula) -> bool:
    updated = announce(m, ann)
    return _eval(updated, s, updated.world(s).root, body)


def forces(m: BethKripkeModel, s: str, node: str, f: Formula,
           explain: bool = False, max_items: int = 8) -> EvalResult:
    """Node-level satisfaction; with ``explain`` the result carries an
    evaluation tree justifying the verdict."""
    value = _eval(m, s, node, f)
    trace = _explain(m, s, node, f, max_items) if explain else None
    return EvalResult(value, trace)


def satisfies(m: BethKripkeModel, s: str, f: Formula,
              explain: bool = False, max_items: int = 8) -> EvalResult:
    """Model-level satisfaction: forcing at the world's root."""
    return forces(m, s, m.world(s).root, f, explain=explain, max_items=max_items)


def restrict_world(m: BethKripkeModel, s: str, ann: Formula) -> Optional[BethModel]:
    """Keep the nodes of world ``s`` that do not force ¬ann (computed in the
    original model); None when the root itself is dropped."""
    w = m.world(s)
    neg = Neg(ann)
    keep = [n for n in w.node_order if not _eval(m, s, n, neg)]
    if w.root not in keep:
        return None
    kept = set(keep)
    order = [(a, b) for (a, b) in w.leq_pairs if a != b and a in kept and b in kept]
    val = {n: w.val[n] for n in keep}
    return validate_beth(keep, order, w.root, val, atoms=w.atoms)


def announce(m: BethKripkeModel, ann: Formula) -> BethKripkeModel:
    """The updated model: surviving worlds restricted, accessibility
    intersected.  An empty result is a value, not an error; evaluating
    anything on it raises UnknownWorld."""
    cached = m._announce.get(ann)
    if cached is not None:
        return cached
    survivors: dict[str, BethModel] = {}
    for s in m.world_order:
        restricted = restrict_world(m, s, ann)
        if restricted is not None:
            survivors[s] = restricted
    access = {
        agent: frozenset((a, b) for (a, b) in pairs if a in survivors and b in survivors)
        for agent, pairs in m.access.items()
    }
    updated = BethKripkeModel(survivors, m.agents, access)
    m._announce[ann] = updated
    return updated


@dataclass
class RelationReport:
    """Per-agent accessibility diagnosis; each failed property carries a
    witness pair."""
    reflexive: bool
    transitive: bool
    euclidean: bool
    equivalence: bool
    witnesses: dict[str, tuple[str, str]] = field(default_factory=dict)


def check_s5(m: BethKripkeModel) -> dict[str, RelationReport]:
    reports: dict[str, RelationReport] = {}
    for agent in sorted(m.agents):
        rel = m.access[agent]
        witnesses: dict[str, tuple[str, str]] = {}
        reflexive = True
        for s in m.world_order:
            if (s, s) not in rel:
                reflexive = False
                witnesses["reflexive"] = (s, s)
                break
        transitive = True
        for (a, b) in sorted(rel):
            for (b2, c) in sorted(rel):
                if b == b2 and (a, c) not in rel:
                    transitive = False
                    witnesses["transitive"] = (a, c)
                    break
            if not transitive:
                break
        euclidean = True
        for (a, b) in sorted(rel):
            for (a2, c) in sorted(rel):
                if a == a2 and (b, c) not in rel:
                    euclidean = False
                    witnesses["euclidean"] = (b, c)
                    break
            if not euclidean:
                break
        reports[agent] = RelationReport(
            reflexive, transitive, euclidean,
            reflexive and transitive and euclidean, witnesses,
        )
    return reports


# ---------------------------------------------------------------------------
# Explanation traces

def _fmt_nodes(nodes: Iterable[str], max_items: int) -> str:
    nodes = sorted(nodes)
    if len(nodes) > max_items:
        return "{" + ", ".join(nodes[:max_items]) + ", ...}"
    return "{" + ", ".join(nodes) + "}"


def _explain(m: BethKripkeModel, s: str, node: str, f: Formula, max_items: int) -> Trace:
    w = m.world(s)
    value = _eval(m, s, node, f)

    def sub(n: str, g: Formula) -> Trace:
        return _explain(m, s, n, g, max_items)

    match f:
        case Top() | Bot():
            return Trace(s, node, f, "constant", value)
        case Atom(name):
            candidate = {b for b in w.up[node] if name in w.val[b]}
            if value:
                note = f"bar {_fmt_nodes(candidate, max_items)} settles the atom"
            else:
                miss = next(p for p in beth.maximal_paths(w, node)
                            if not candidate.intersection(p))
                note = f"path {list(miss)} never carries the atom"
            return Trace(s, node, f, "atom-bar", value, note)
        case And(x, y):
            return Trace(s, node, f, "and", value, children=(sub(node, x), sub(node, y)))
        case Or(x, y):
            candidate = {b for b in w.up[node]
                         if _eval(m, s, b, x) or _eval(m, s, b, y)}
            if value:
                note = f"bar {_fmt_nodes(candidate, max_items)} settles a disjunct"
            else:
                miss = next(p for p in beth.maximal_paths(w, node)
                            if not candidate.intersection(p))
                note = f"path {list(miss)} settles neither disjunct"
            return Trace(s, node, f, "or-bar", value, note,
                         children=(sub(node, x), sub(node, y)))
        case Imp(x, y):
            for b in w.up[node]:
                if _eval(m, s, b, x) and not _eval(m, s, b, y):
                    return Trace(s, node, f, "implies", value,
                                 f"fails above at {b!r}", (sub(b, x), sub(b, y)))
            return Trace(s, node, f, "implies", value,
                         f"holds at every node of {_fmt_nodes(w.up[node], max_items)}")
        case Neg(x):
            for b in w.up[node]:
                if _eval(m, s, b, x):
                    return Trace(s, node, f, "not", value,
                                 f"body forced above at {b!r}", (sub(b, x),))
            return Trace(s, node, f, "not", value,
                         f"body fails at every node of {_fmt_nodes(w.up[node], max_items)}")
        case Know(agent, body):
            succ = m.successors(agent, s)
            for t in succ:
                for b in m.world(t).node_order:
                    if not _eval(m, t, b, body):
                        return Trace(s, node, f, "knows", value,
                                     f"fails in accessible world {t!r} at {b!r}",
                                     (_explain(m, t, b, body, max_items),))
            return Trace(s, node, f, "knows", value,
                         f"holds at every node of accessible worlds {_fmt_nodes(succ, max_items)}"
                         if succ else "no accessible worlds")
        case Announce(ann, body) | Diamond(ann, body):
            dual = isinstance(f, Diamond)
            rule = "diamond" if dual else "announce"
            ok = _announceable(m, s, ann)
            if not ok:
                note = "announcement not executable: root forces the negation"
                return Trace(s, node, f, rule, value, note,
                             (sub(w.root, Neg(ann)),))
            updated = announce(m, ann)
            dropped = sorted(set(w.node_order) - set(updated.world(s).node_order))
            note = (f"announcement executable; dropped nodes {_fmt_nodes(dropped, max_items)}"
                    if dropped else "announcement executable; no node dropped")
            return Trace(s, node, f, rule, value, note,
                         (_explain(updated, s, updated.world(s).root, body, max_items),))
    raise TypeError(f"not a formula: {f!r}")


def render_trace(trace: Trace, indent: int = 0) -> str:
    pad = "  " * indent
    head = (f"{pad}{'true ' if trace.value else 'false'} {trace.rule:<9} "
            f"{print_formula(trace.formula)}  @ {trace.world}/{trace.node}")
    if trace.note:
        head += f"  [{trace.note}]"
    lines = [head]
    for child in trace.children:
        lines.append(render_trace(child, indent + 1))
    return "\n".join(lines)
