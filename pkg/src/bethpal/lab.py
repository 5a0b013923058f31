"""Randomized validity lab: model generators, exhaustive small-model
enumeration, schema validity trials, the announcement-reduction experiment,
a cache-free reference evaluator, and the non-translatability witness.

Everything here is reproducible: a generator consumes one seeded RNG in a
fixed order, and per-trial seeds are split deterministically, so parallel
and serial runs of a suite see the same models.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, replace
from typing import Iterable, Iterator, Optional, Union

from . import beth, dynamic, modeldoc
from .beth import BethModel, validate_beth
from .dynamic import BethKripkeModel
from .formula import (
    And, Announce, Atom, Bot, Diamond, Formula, Imp, Know, Neg, Or, Top,
    BOT, TOP, metavariables, print_formula, subformulas, substitute,
)

ATOM_NAMES = ("p", "q", "r", "s", "u", "v", "w", "x", "y", "z")
AGENT_NAMES = ("a", "b", "c", "d", "e", "f")

_M64 = (1 << 64) - 1


def split_seed(seed: int, index: int) -> int:
    """Deterministic 64-bit stream split (splitmix64 step)."""
    z = (seed + (index + 1) * 0x9E3779B97F4A7C15) & _M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class GenParams:
    max_nodes_per_world: int = 4
    max_worlds: int = 3
    num_agents: int = 2
    atom_count: int = 2
    seed: int = 0
    s5: bool = True

    def __post_init__(self):
        if min(self.max_nodes_per_world, self.max_worlds, self.num_agents, self.atom_count) < 1:
            raise ValueError("all generation bounds must be >= 1")


def random_beth(rng: random.Random, max_nodes: int, atoms: Iterable[str]) -> BethModel:
    """Random rooted poset (random DAG plus a fresh root below everything)
    with a random monotone valuation."""
    atoms = tuple(atoms)
    extra = rng.randint(0, max_nodes - 1)
    names = [f"m{i}" for i in range(extra + 1)]
    edges = [("m0", names[j]) for j in range(1, extra + 1)]
    for i in range(1, extra + 1):
        for j in range(i + 1, extra + 1):
            if rng.random() < 0.4:
                edges.append((names[i], names[j]))
    # Nodes are indexed in topological order, so inheriting along direct
    # edges is enough to make the valuation monotone.
    val: dict[str, set[str]] = {}
    for name in names:
        inherited: set[str] = set()
        for a, b in edges:
            if b == name:
                inherited |= val[a]
        fresh = {atom for atom in atoms if rng.random() < 0.3}
        val[name] = inherited | fresh
    return validate_beth(names, edges, "m0", val, atoms)


def random_model(p: GenParams) -> BethKripkeModel:
    """Reproducible random Beth-Kripke model; s5=True draws each agent's
    relation directly as a random partition of the worlds, s5=False draws a
    random irreflexive relation."""
    rng = random.Random(p.seed)
    atoms = ATOM_NAMES[:p.atom_count]
    agents = AGENT_NAMES[:p.num_agents]
    world_names = [f"w{i}" for i in range(rng.randint(1, p.max_worlds))]
    worlds = {name: random_beth(rng, p.max_nodes_per_world, atoms) for name in world_names}
    access: dict[str, frozenset[tuple[str, str]]] = {}
    for agent in agents:
        if p.s5:
            blocks: list[list[str]] = []
            for name in world_names:
                k = rng.randrange(len(blocks) + 1)
                if k == len(blocks):
                    blocks.append([name])
                else:
                    blocks[k].append(name)
            access[agent] = frozenset(
                (x, y) for blk in blocks for x in blk for y in blk)
        else:
            access[agent] = frozenset(
                (x, y) for x in world_names for y in world_names
                if x != y and rng.random() < 0.35)
    return BethKripkeModel(worlds, agents, access)


_DEFAULT_WEIGHTS = {
    "atom": 5, "top": 1, "bot": 1,
    "neg": 3, "and": 3, "or": 3, "imp": 3,
    "know": 3, "announce": 1, "diamond": 1,
}


def random_formula(rng: random.Random, max_depth: int, atoms: Iterable[str],
                   agents: Iterable[str] = (), allow_know: bool = False,
                   allow_announce: bool = False,
                   weights: Optional[dict[str, int]] = None) -> Formula:
    """Grammar-directed sampling with per-connective weights and a hard
    depth cap."""
    atoms = tuple(atoms)
    agents = tuple(agents)
    weights = dict(_DEFAULT_WEIGHTS if weights is None else weights)
    if not (allow_know and agents):
        weights.pop("know", None)
    if not allow_announce:
        weights.pop("announce", None)
        weights.pop("diamond", None)

    def gen(d: int) -> Formula:
        if d == 0:
            kinds, ws = zip(*[(k, weights.get(k, 1)) for k in ("atom", "top", "bot")])
        else:
            kinds, ws = zip(*sorted(weights.items()))
        kind = rng.choices(kinds, ws)[0]
        if kind == "atom":
            return Atom(rng.choice(atoms))
        if kind == "top":
            return TOP
        if kind == "bot":
            return BOT
        if kind == "neg":
            return Neg(gen(d - 1))
        if kind == "and":
            return And(gen(d - 1), gen(d - 1))
        if kind == "or":
            return Or(gen(d - 1), gen(d - 1))
        if kind == "imp":
            return Imp(gen(d - 1), gen(d - 1))
        if kind == "know":
            return Know(rng.choice(agents), gen(d - 1))
        if kind == "announce":
            return Announce(gen(d - 1), gen(d - 1))
        return Diamond(gen(d - 1), gen(d - 1))

    return gen(max_depth)


# ---------------------------------------------------------------------------
# Exhaustive small-model enumeration

class BoundTooLarge(ValueError):
    pass


def _close_int_relation(n: int, rel: frozenset[tuple[int, int]]) -> frozenset[tuple[int, int]]:
    reach = {i: {i} for i in range(n)}
    for a, b in rel:
        reach[a].add(b)
    changed = True
    while changed:
        changed = False
        for a in range(n):
            extra = set().union(*(reach[b] for b in reach[a]))
            if not extra <= reach[a]:
                reach[a] |= extra
                changed = True
    return frozenset((a, b) for a in range(n) for b in reach[a] if a != b)


def _rooted_posets(n: int) -> list[frozenset[tuple[int, int]]]:
    """All strict orders on 0..n-1 with 0 below everything, one representative
    per isomorphism class, in a deterministic order."""
    if n == 1:
        return [frozenset()]
    upper = range(1, n)
    optional = [(i, j) for i in upper for j in upper if i < j]
    base = frozenset((0, j) for j in upper)
    seen: set[tuple] = set()
    out: list[frozenset[tuple[int, int]]] = []
    for bits in range(1 << len(optional)):
        chosen = frozenset(optional[k] for k in range(len(optional)) if bits >> k & 1)
        closed = _close_int_relation(n, base | chosen)
        canon = min(
            tuple(sorted((perm[a], perm[b]) for a, b in closed))
            for p in itertools.permutations(upper)
            for perm in [{0: 0, **dict(zip(upper, p))}]
        )
        if canon not in seen:
            seen.add(canon)
            out.append(closed)
    return out


def _up_closed_subsets(n: int, closed: frozenset[tuple[int, int]]) -> list[frozenset[int]]:
    subsets = []
    for bits in range(1 << n):
        s = frozenset(i for i in range(n) if bits >> i & 1)
        if all(j in s for i in s for j in range(n) if (i, j) in closed):
            subsets.append(s)
    return subsets


def enumerate_small_beth(max_nodes: int, atoms: Iterable[str]) -> Iterator[BethModel]:
    """All non-isomorphic rooted posets up to ``max_nodes`` nodes, each paired
    with every monotone valuation over ``atoms``, in a deterministic order."""
    if not 1 <= max_nodes <= 4:
        raise BoundTooLarge(f"can enumerate up to 4 nodes, not {max_nodes}")
    atoms = tuple(sorted(set(atoms)))
    for n in range(1, max_nodes + 1):
        names = [f"n{i}" for i in range(n)]
        for rel in _rooted_posets(n):
            order = [(names[a], names[b]) for a, b in sorted(rel)]
            upsets = _up_closed_subsets(n, rel)
            for combo in itertools.product(upsets, repeat=len(atoms)):
                val = {
                    names[i]: {atoms[k] for k in range(len(atoms)) if i in combo[k]}
                    for i in range(n)
                }
                yield validate_beth(names, order, "n0", val, atoms)


# ---------------------------------------------------------------------------
# Validity trials

@dataclass(frozen=True)
class NoCounterexample:
    trials: int


@dataclass
class Counterexample:
    model: BethKripkeModel
    world: str
    instance: Formula

    def verify(self) -> bool:
        """A counterexample must re-check false under the evaluator."""
        return not dynamic.satisfies(self.model, self.world, self.instance).value


Verdict = Union[NoCounterexample, Counterexample]


@dataclass(frozen=True)
class SchemaInstanceSpace:
    """Instantiation space for a schema: propositional formulas up to
    ``depth`` over ``atoms`` for the formula metavariables, the model's own
    agents for the agent metavariables."""
    schema: Formula
    depth: int = 1
    atoms: tuple[str, ...] = ("p", "q")


def propositional_pool(atoms: Iterable[str], depth: int) -> list[Formula]:
    """Every propositional formula up to the given depth, deterministic order."""
    pool: list[Formula] = [Atom(a) for a in sorted(set(atoms))] + [TOP, BOT]
    seen: set[Formula] = set(pool)
    for _ in range(depth):
        prev = list(pool)
        fresh: list[Formula] = [Neg(f) for f in prev]
        fresh += [ctor(a, b) for ctor in (And, Or, Imp) for a in prev for b in prev]
        for f in fresh:
            if f not in seen:
                seen.add(f)
                pool.append(f)
    return pool


def _semantic_reps(m: BethKripkeModel, pool: Iterable[Formula]) -> list[Formula]:
    """One representative per truth-vector over every (world, node) of the
    model.  Sound for announcement-free contexts: such clauses only consult
    subformula truth at the model's own points."""
    reps: dict[tuple, Formula] = {}
    for f in pool:
        vec = tuple(
            dynamic.forces(m, s, n, f).value
            for s in m.world_order for n in m.worlds[s].node_order
        )
        reps.setdefault(vec, f)
    return list(reps.values())


def _agent_metavariables(schema: Formula) -> tuple[str, ...]:
    return tuple(sorted({g.agent for g in subformulas(schema) if isinstance(g, Know)}))


def test_validity(space: SchemaInstanceSpace, gen: GenParams, trials: int) -> Verdict:
    """Draw ``trials`` models; check every (deduplicated) schema instance at
    every world.  First failure wins."""
    pool = propositional_pool(space.atoms, space.depth)
    fvars = sorted(metavariables(space.schema))
    avars = _agent_metavariables(space.schema)
    for t in range(trials):
        m = random_model(replace(gen, seed=split_seed(gen.seed, t)))
        reps = _semantic_reps(m, pool)
        agents = sorted(m.agents)
        for agent_choice in itertools.product(agents, repeat=len(avars)):
            binding: dict[str, Formula] = {
                v: Atom(a) for v, a in zip(avars, agent_choice)
            }
            for formula_choice in itertools.product(reps, repeat=len(fvars)):
                binding.update(zip(fvars, formula_choice))
                instance = substitute(space.schema, binding)
                for s in m.world_order:
                    if not dynamic.satisfies(m, s, instance).value:
                        return Counterexample(m, s, instance)
    return NoCounterexample(trials)


# ---------------------------------------------------------------------------
# Announcement-reduction experiment
#
# Whether [phi]psi <-> (phi -> psi) is valid over finite S5 models is an open
# hypothesis here, not a regression: the experiment reports whatever it finds.

@dataclass
class HypothesisReport:
    """Line-delimited experiment log plus a summary block.

    Each record is ``trial=<n> seed=<n> model=<digest> world=<name>
    phi=<text> psi=<text> box=<bool> imp=<bool> bicond=<bool>`` where
    ``bicond`` is whether the world forces [phi]psi <-> (phi -> psi).
    Identical inputs render byte-identical reports.
    """
    verdict: Verdict
    records: tuple[str, ...]
    trials: int
    instances: int
    divergent: int
    seed: int
    depth: int
    include_announcements: bool

    def render(self) -> str:
        lines = list(self.records)
        lines.append("-- announcement-hypothesis summary --")
        lines.append("schema: [phi]psi <-> (phi -> psi)")
        lines.append(
            f"trials={self.trials} instances={self.instances} "
            f"divergent={self.divergent} seed={self.seed} depth={self.depth} "
            f"nested_announcements={str(self.include_announcements).lower()}")
        if isinstance(self.verdict, NoCounterexample):
            lines.append("verdict: NO-COUNTEREXAMPLE")
        else:
            lines.append(
                f"verdict: COUNTEREXAMPLE world={self.verdict.world} "
                f"instance={print_formula(self.verdict.instance)}")
            lines.append("counterexample model:")
            lines.append(modeldoc.serialize_model(self.verdict.model).rstrip())
        return "\n".join(lines) + "\n"


def test_announcement_hypothesis(gen: GenParams, trials: int, depth: int = 2,
                                 include_announcements: bool = False,
                                 instances_per_trial: int = 4) -> HypothesisReport:
    """Sample (phi, psi) pairs of bounded depth and test whether every world
    forces the biconditional [phi]psi <-> (phi -> psi)."""
    if not gen.s5:
        raise ValueError("the hypothesis is about S5 models; set s5=True")
    records: list[str] = []
    divergent = 0
    instances = 0
    first: Optional[Counterexample] = None
    for t in range(trials):
        seed_t = split_seed(gen.seed, t)
        m = random_model(replace(gen, seed=seed_t))
        digest = modeldoc.model_digest(m)
        rng = random.Random(split_seed(gen.seed ^ 0xA11CE, t))
        agents = sorted(m.agents)
        for _ in range(instances_per_trial):
            phi = random_formula(rng, depth, ATOM_NAMES[:gen.atom_count], agents,
                                 allow_know=True, allow_announce=include_announcements)
            psi = random_formula(rng, depth, ATOM_NAMES[:gen.atom_count], agents,
                                 allow_know=True, allow_announce=include_announcements)
            box = Announce(phi, psi)
            cond = Imp(phi, psi)
            bicond = And(Imp(box, cond), Imp(cond, box))
            instances += 1
            for s in m.world_order:
                lhs = dynamic.satisfies(m, s, box).value
                rhs = dynamic.satisfies(m, s, cond).value
                holds = dynamic.satisfies(m, s, bicond).value
                records.append(
                    f"trial={t} seed={seed_t} model={digest} world={s} "
                    f"phi={print_formula(phi)!r} psi={print_formula(psi)!r} "
                    f"box={lhs} imp={rhs} bicond={holds}")
                if not holds:
                    divergent += 1
                    if first is None:
                        first = Counterexample(m, s, bicond)
    verdict: Verdict = first if first is not None else NoCounterexample(trials)
    return HypothesisReport(verdict, tuple(records), trials, instances,
                            divergent, gen.seed, depth, include_announcements)


# ---------------------------------------------------------------------------
# Cache-free reference evaluator (independent oracle)

def _naive_up(w: BethModel, node: str) -> list[str]:
    return [b for b in w.node_order if (node, b) in w.leq_pairs]


def _naive_paths(w: BethModel, node: str) -> list[tuple[str, ...]]:
    strict = [b for b in _naive_up(w, node) if b != node]
    minimal = [b for b in strict
               if not any(c != b and (c, b) in w.leq_pairs for c in strict)]
    if not minimal:
        return [(node,)]
    return [(node,) + rest for b in minimal for rest in _naive_paths(w, b)]


def _naive_bar(w: BethModel, node: str, members: set[str]) -> bool:
    return all(members.intersection(path) for path in _naive_paths(w, node))


def naive_forces(m: BethKripkeModel, s: str, node: str, f: Formula) -> bool:
    """Same semantics as dynamic.forces, recomputed from scratch on every call
    (no memo tables, paths enumerated at each step)."""
    w = m.world(s)
    w.ensure_node(node)
    match f:
        case Top():
            return True
        case Bot():
            return False
        case Atom(name):
            return _naive_bar(w, node, {b for b in _naive_up(w, node) if name in w.val[b]})
        case And(x, y):
            return naive_forces(m, s, node, x) and naive_forces(m, s, node, y)
        case Or(x, y):
            return _naive_bar(w, node, {
                b for b in _naive_up(w, node)
                if naive_forces(m, s, b, x) or naive_forces(m, s, b, y)})
        case Imp(x, y):
            return all(naive_forces(m, s, b, y)
                       for b in _naive_up(w, node) if naive_forces(m, s, b, x))
        case Neg(x):
            return not any(naive_forces(m, s, b, x) for b in _naive_up(w, node))
        case Know(agent, body):
            return all(
                naive_forces(m, t, b, body)
                for t in m.successors(agent, s)
                for b in m.world(t).node_order)
        case Announce(ann, body):
            if naive_forces(m, s, w.root, Neg(ann)):
                return True
            updated = _naive_announce(m, ann)
            return naive_forces(updated, s, updated.world(s).root, body)
        case Diamond(ann, body):
            if naive_forces(m, s, w.root, Neg(ann)):
                return False
            updated = _naive_announce(m, ann)
            return naive_forces(updated, s, updated.world(s).root, body)
    raise TypeError(f"not a formula: {f!r}")


def _naive_announce(m: BethKripkeModel, ann: Formula) -> BethKripkeModel:
    neg = Neg(ann)
    survivors: dict[str, BethModel] = {}
    for s in m.world_order:
        w = m.worlds[s]
        keep = [n for n in w.node_order if not naive_forces(m, s, n, neg)]
        if w.root not in keep:
            continue
        kept = set(keep)
        order = [(a, b) for (a, b) in w.leq_pairs if a != b and a in kept and b in kept]
        survivors[s] = validate_beth(keep, order, w.root,
                                     {n: w.val[n] for n in keep}, w.atoms)
    access = {
        agent: frozenset((a, b) for (a, b) in pairs if a in survivors and b in survivors)
        for agent, pairs in m.access.items()
    }
    return BethKripkeModel(survivors, m.agents, access)


# ---------------------------------------------------------------------------
# Non-translatability witness

@dataclass
class WitnessReport:
    diamond_at_root: bool          # expected True
    bare_leaf_forces_atom: bool    # expected False
    models_checked: int
    classes_checked: int
    max_depth: int
    equivalent: Optional[Formula]

    def render(self) -> str:
        lines = [
            "witness model: root below one leaf carrying p and one bare leaf",
            f"root forces <p>top: {self.diamond_at_root}",
            f"bare leaf forces p: {self.bare_leaf_forces_atom}",
            f"searched propositional formulas over {{p}} up to depth {self.max_depth}: "
            f"{self.classes_checked} semantic classes over {self.models_checked} models",
        ]
        if self.equivalent is None:
            lines.append("no propositional equivalent of <p>top found")
        else:
            lines.append(f"UNEXPECTED equivalent found: {print_formula(self.equivalent)}")
        return "\n".join(lines) + "\n"


def nontranslatability_witness(max_depth: int = 4) -> WitnessReport:
    """Materialize the witness model for '<p>top has no propositional
    equivalent' and search the depth-bounded propositional fragment over {p}
    for an equivalent, deduplicating by semantic fingerprint."""
    witness = validate_beth(
        ("a", "b", "c"), (("a", "b"), ("a", "c")), "a", {"b": {"p"}}, ("p",))
    wrapped = BethKripkeModel({"w": witness}, (), {})
    diamond = Diamond(Atom("p"), TOP)
    diamond_at_root = dynamic.satisfies(wrapped, "w", diamond).value
    bare_leaf = dynamic.forces(wrapped, "w", "c", Atom("p")).value

    models = list(enumerate_small_beth(3, ("p",)))
    wrapped_models = [BethKripkeModel({"w": m}, (), {}) for m in models]
    target = tuple(dynamic.satisfies(bk, "w", diamond).value for bk in wrapped_models)

    def node_vec(f: Formula) -> tuple:
        return tuple(beth.forces_prop(m, n, f)
                     for m in models for n in m.node_order)

    def root_vec(f: Formula) -> tuple:
        return tuple(beth.forces_prop(m, m.root, f) for m in models)

    seen: set[tuple] = set()
    reps: list[Formula] = []
    equivalent: Optional[Formula] = None
    classes = 0
    frontier: list[Formula] = [Atom("p"), TOP, BOT]
    for level in range(max_depth + 1):
        fresh: list[Formula] = []
        for f in frontier:
            fp = node_vec(f)
            if fp in seen:
                continue
            seen.add(fp)
            classes += 1
            if equivalent is None and root_vec(f) == target:
                equivalent = f
            fresh.append(f)
        reps.extend(fresh)
        if level == max_depth or not fresh:
            break
        frontier = [Neg(r) for r in reps]
        frontier += [ctor(a, b) for ctor in (And, Or, Imp) for a in reps for b in reps]
    return WitnessReport(diamond_at_root, bare_leaf, len(models), classes,
                         max_depth, equivalent)
