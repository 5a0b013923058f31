"""Finite rooted Beth models: poset machinery, bars, and propositional forcing.

A model is a finite poset with a designated root below every node and a
monotone valuation (atoms true at a node stay true above it).  Truth at a
node is *forcing*: an atom or disjunction holds when a bar (a set of nodes
met by every maximal ascending path) settles it.  On finite models every
path ends in a leaf, where forcing is classical over the leaf's valuation;
consequently a node forces an atom iff every leaf above it carries the atom,
even when the node itself does not.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .formula import (
    And, Announce, Atom, Bot, Diamond, Formula, Imp, Know, Neg, Or, Top,
    BOT, TOP,
)


class ModelError(ValueError):
    pass


class NotAPartialOrder(ModelError):
    def __init__(self, witness: tuple[str, str]):
        super().__init__(f"order has a cycle through {witness[0]!r} and {witness[1]!r}")
        self.witness = witness


class NoRoot(ModelError):
    def __init__(self, witness: tuple[str, str]):
        super().__init__(f"declared root {witness[0]!r} is not below node {witness[1]!r}")
        self.witness = witness


class NonMonotoneValuation(ModelError):
    def __init__(self, lower: str, upper: str, atom: str):
        super().__init__(f"atom {atom!r} holds at {lower!r} but not at {upper!r} above it")
        self.witness = (lower, upper, atom)


class UnknownNode(ModelError):
    def __init__(self, node: str):
        super().__init__(f"unknown node {node!r}")
        self.node = node


class NodeOutsideUpSet(ModelError):
    def __init__(self, node: str, anchor: str):
        super().__init__(f"node {node!r} is not above the anchor {anchor!r}")


class NonPropositionalFormula(ModelError):
    def __init__(self, f: Formula):
        super().__init__(f"formula is not propositional: {f}")


def transitive_closure(nodes: Iterable[str], pairs: Iterable[tuple[str, str]]) -> frozenset[tuple[str, str]]:
    """Reflexive-transitive closure of a relation over the given nodes."""
    nodes = list(nodes)
    reach: dict[str, set[str]] = {a: {a} for a in nodes}
    for a, b in pairs:
        reach[a].add(b)
    changed = True
    while changed:
        changed = False
        for a in nodes:
            extra = set()
            for b in reach[a]:
                extra |= reach[b]
            if not extra <= reach[a]:
                reach[a] |= extra
                changed = True
    return frozenset((a, b) for a in nodes for b in reach[a])


class BethModel:
    """Validated finite rooted Beth model.  Immutable after construction;
    build instances through :func:`validate_beth`."""

    def __init__(self, nodes: tuple[str, ...], leq: frozenset[tuple[str, str]],
                 root: str, val: Mapping[str, frozenset[str]], atoms: frozenset[str]):
        self.node_order = nodes                      # sorted, deterministic iteration
        self.nodes = frozenset(nodes)
        self.leq_pairs = leq                         # reflexive-transitive closure
        self.root = root
        self.val = dict(val)
        self.atoms = atoms
        self.up: dict[str, frozenset[str]] = {
            a: frozenset(b for b in nodes if (a, b) in leq) for a in nodes
        }
        self.covers: dict[str, tuple[str, ...]] = {}
        for a in nodes:
            above = [b for b in self.up[a] if b != a]
            self.covers[a] = tuple(sorted(
                b for b in above
                if not any(c != b and (c, b) in leq for c in above)
            ))
        self.leaves = frozenset(a for a in nodes if not self.covers[a])
        self._paths: dict[str, tuple[tuple[str, ...], ...]] = {}
        self._memo: dict[tuple[str, Formula], bool] = {}
        self._memo_shortcut: dict[tuple[str, Formula], bool] = {}

    def leq(self, a: str, b: str) -> bool:
        return (a, b) in self.leq_pairs

    def ensure_node(self, a: str) -> None:
        if a not in self.nodes:
            raise UnknownNode(a)

    def __repr__(self) -> str:
        return f"BethModel(nodes={self.node_order!r}, root={self.root!r})"


@dataclass(frozen=True)
class PointedBeth:
    model: BethModel
    point: str

    def __post_init__(self):
        self.model.ensure_node(self.point)


def validate_beth(nodes: Iterable[str], order: Iterable[tuple[str, str]], root: str,
                  val: Mapping[str, Iterable[str]] | None = None,
                  atoms: Iterable[str] = ()) -> BethModel:
    """Check a raw model description and return the validated model.

    ``order`` may list covering edges only; the stored relation is the
    reflexive-transitive closure.  Raises NotAPartialOrder, NoRoot,
    NonMonotoneValuation, or UnknownNode.
    """
    node_tuple = tuple(sorted(set(nodes)))
    if not node_tuple:
        raise ModelError("a model needs at least one node")
    node_set = set(node_tuple)
    order = list(order)
    for a, b in order:
        if a not in node_set:
            raise UnknownNode(a)
        if b not in node_set:
            raise UnknownNode(b)
    if root not in node_set:
        raise UnknownNode(root)
    closed = transitive_closure(node_tuple, order)
    for a, b in closed:
        if a != b and (b, a) in closed:
            raise NotAPartialOrder((a, b))
    for b in node_tuple:
        if (root, b) not in closed:
            raise NoRoot((root, b))
    valuation: dict[str, frozenset[str]] = {a: frozenset() for a in node_tuple}
    if val:
        for a, atoms_at in val.items():
            if a not in node_set:
                raise UnknownNode(a)
            valuation[a] = frozenset(atoms_at)
    for a, b in closed:
        if a != b:
            missing = valuation[a] - valuation[b]
            if missing:
                raise NonMonotoneValuation(a, b, sorted(missing)[0])
    universe = frozenset(atoms) | frozenset().union(*valuation.values())
    return BethModel(node_tuple, closed, root, valuation, universe)


def up_set(m: BethModel, a: str) -> frozenset[str]:
    m.ensure_node(a)
    return m.up[a]


def maximal_paths(m: BethModel, a: str) -> tuple[tuple[str, ...], ...]:
    """All maximal ascending chains starting at ``a`` (each ends in a leaf)."""
    m.ensure_node(a)
    cached = m._paths.get(a)
    if cached is not None:
        return cached
    out: list[tuple[str, ...]] = []

    def walk(prefix: list[str], node: str) -> None:
        succ = m.covers[node]
        if not succ:
            out.append(tuple(prefix))
            return
        for nxt in succ:
            prefix.append(nxt)
            walk(prefix, nxt)
            prefix.pop()

    walk([a], a)
    result = tuple(out)
    m._paths[a] = result
    return result


def is_bar(m: BethModel, a: str, bar: Iterable[str]) -> bool:
    """True iff every maximal path from ``a`` meets ``bar`` (bar must sit
    inside the anchor's up-set)."""
    bar = frozenset(bar)
    outside = bar - up_set(m, a)
    if outside:
        raise NodeOutsideUpSet(sorted(outside)[0], a)
    return all(bar.intersection(path) for path in maximal_paths(m, a))


def forces_prop(m: BethModel, a: str, f: Formula) -> bool:
    """Propositional forcing at a node, clause by clause: atoms and ∨ through
    bars, → and ¬ by quantifying over the up-set."""
    m.ensure_node(a)
    key = (a, f)
    hit = m._memo.get(key)
    if hit is not None:
        return hit
    match f:
        case Top():
            value = True
        case Bot():
            value = False
        case Atom(name):
            value = is_bar(m, a, (b for b in m.up[a] if name in m.val[b]))
        case And(x, y):
            value = forces_prop(m, a, x) and forces_prop(m, a, y)
        case Or(x, y):
            value = is_bar(m, a, (b for b in m.up[a]
                                  if forces_prop(m, b, x) or forces_prop(m, b, y)))
        case Imp(x, y):
            value = all(forces_prop(m, b, y) for b in m.up[a] if forces_prop(m, b, x))
        case Neg(x):
            value = not any(forces_prop(m, b, x) for b in m.up[a])
        case Know() | Announce() | Diamond():
            raise NonPropositionalFormula(f)
        case _:
            raise TypeError(f"not a formula: {f!r}")
    m._memo[key] = value
    return value


def leaf_shortcut_forces(m: BethModel, a: str, f: Formula) -> bool:
    """Same contract as :func:`forces_prop`, computed through the finite-model
    shortcut: bar conditions for persistent properties reduce to "all leaves
    above the node satisfy it"."""
    m.ensure_node(a)
    key = (a, f)
    hit = m._memo_shortcut.get(key)
    if hit is not None:
        return hit
    leaves = m.up[a] & m.leaves
    match f:
        case Top():
            value = True
        case Bot():
            value = False
        case Atom(name):
            value = all(name in m.val[leaf] for leaf in leaves)
        case And(x, y):
            value = leaf_shortcut_forces(m, a, x) and leaf_shortcut_forces(m, a, y)
        case Or(x, y):
            value = all(leaf_shortcut_forces(m, leaf, x) or leaf_shortcut_forces(m, leaf, y)
                        for leaf in leaves)
        case Imp(x, y):
            value = all(leaf_shortcut_forces(m, b, y)
                        for b in m.up[a] if leaf_shortcut_forces(m, b, x))
        case Neg(x):
            value = not any(leaf_shortcut_forces(m, b, x) for b in m.up[a])
        case Know() | Announce() | Diamond():
            raise NonPropositionalFormula(f)
        case _:
            raise TypeError(f"not a formula: {f!r}")
    m._memo_shortcut[key] = value
    return value


def equivalent_up_to_depth(x: PointedBeth, y: PointedBeth, d: int,
                           atoms: Iterable[str]) -> Optional[Formula]:
    """Search for a propositional formula of depth <= d over ``atoms`` whose
    forcing differs between the two pointed models; None if the models agree
    on every such formula.

    Candidates are explored breadth-first by depth with duplicate pruning by
    semantic fingerprint (truth at every node of both models), so the search
    space stays small even at generous depths.
    """
    atoms = sorted(set(atoms))

    def fingerprint(f: Formula) -> tuple:
        return (
            tuple(forces_prop(x.model, n, f) for n in x.model.node_order),
            tuple(forces_prop(y.model, n, f) for n in y.model.node_order),
        )

    def distinguishes(f: Formula) -> bool:
        return forces_prop(x.model, x.point, f) != forces_prop(y.model, y.point, f)

    seen: set[tuple] = set()
    reps: list[Formula] = []            # one representative per fingerprint class
    frontier: list[Formula] = [Atom(a) for a in atoms] + [TOP, BOT]
    for current_depth in range(d + 1):
        new_reps: list[Formula] = []
        for f in frontier:
            fp = fingerprint(f)
            if fp in seen:
                continue
            seen.add(fp)
            if distinguishes(f):
                return f
            new_reps.append(f)
        reps.extend(new_reps)
        # A layer without fresh classes cannot seed a distinguishing deeper one.
        if current_depth == d or not new_reps:
            break
        frontier = [Neg(r) for r in reps]
        frontier += [ctor(a, b) for ctor in (And, Or, Imp) for a in reps for b in reps]
    return None
