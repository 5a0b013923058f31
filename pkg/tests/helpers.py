"""Independent reference implementations used as oracles by the tests.

These deliberately avoid the library's own poset/forcing machinery: chains
are enumerated from subsets, classical truth is a direct table walk.
"""
from __future__ import annotations

import itertools

from bethpal.formula import And, Atom, Bot, Formula, Imp, Neg, Or, Top


def brute_maximal_chains(nodes, leq_pairs, anchor):
    """All maximal linearly ordered subsets of the anchor's up-set that
    contain the anchor, found by filtering every subset."""
    up = [b for b in nodes if (anchor, b) in leq_pairs]
    chains = []
    for r in range(1, len(up) + 1):
        for combo in itertools.combinations(up, r):
            if anchor not in combo:
                continue
            if all((a, b) in leq_pairs or (b, a) in leq_pairs
                   for a, b in itertools.combinations(combo, 2)):
                chains.append(frozenset(combo))
    maximal = [c for c in chains if not any(c < d for d in chains)]
    return {
        tuple(sorted(c, key=lambda x: sum((x, b) in leq_pairs for b in c), reverse=True))
        for c in maximal
    }


def classical_eval(true_atoms: frozenset[str] | set[str], f: Formula) -> bool:
    """Truth-table evaluation, for the single-node collapse."""
    match f:
        case Atom(name):
            return name in true_atoms
        case Top():
            return True
        case Bot():
            return False
        case Neg(x):
            return not classical_eval(true_atoms, x)
        case And(x, y):
            return classical_eval(true_atoms, x) and classical_eval(true_atoms, y)
        case Or(x, y):
            return classical_eval(true_atoms, x) or classical_eval(true_atoms, y)
        case Imp(x, y):
            return (not classical_eval(true_atoms, x)) or classical_eval(true_atoms, y)
    raise TypeError(f"not propositional: {f!r}")
