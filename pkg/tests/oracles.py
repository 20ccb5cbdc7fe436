"""Brute-force reference implementations the real modules are tested
against.  Everything here works on raw word tuples — no graph indices,
no shared arithmetic with the library — and enumerates instead of
optimizing, so a bug in the package can't hide in its own oracle.
Sized for small tables (at most a few dozen nodes)."""

from __future__ import annotations

import itertools
from fractions import Fraction

Word = tuple[int, ...]


def brute_simple_cycles(d: int, k: int,
                        value_of: dict[Word, Fraction],
                        ) -> list[tuple[Fraction, tuple[Word, ...]]]:
    """Every node-simple cycle of the depth-k window graph, as (mean,
    edge words).  Nodes are the (k-1)-words; an edge is a k-word read
    as source-prefix plus appended symbol."""
    if d ** (k - 1) > 64:
        raise ValueError("brute cycle enumeration is for at most 64 nodes")
    nodes = sorted(itertools.product(range(d), repeat=k - 1))
    cycles: list[tuple[Fraction, tuple[Word, ...]]] = []

    for start in nodes:
        # only cycles whose smallest node is `start`
        path: list[Word] = []
        visited = {start}

        def walk(u: Word) -> None:
            for a in range(d):
                edge = u + (a,)
                t = edge[1:]
                if t < start:
                    continue
                if t == start:
                    cyc = tuple(path) + (edge,)
                    mean = sum(value_of[e] for e in cyc) / len(cyc)
                    cycles.append((mean, cyc))
                elif t not in visited:
                    visited.add(t)
                    path.append(edge)
                    walk(t)
                    path.pop()
                    visited.remove(t)

        walk(start)
    return cycles


def brute_max_mean(d: int, k: int,
                   value_of: dict[Word, Fraction]) -> Fraction:
    return max(mean for mean, _ in brute_simple_cycles(d, k, value_of))


def brute_argmax_cycles(d: int, k: int,
                        value_of: dict[Word, Fraction],
                        ) -> list[tuple[Word, ...]]:
    cycles = brute_simple_cycles(d, k, value_of)
    m = max(mean for mean, _ in cycles)
    return [cyc for mean, cyc in cycles if mean == m]


def brute_critical_edge_words(d: int, k: int,
                              value_of: dict[Word, Fraction]) -> frozenset[Word]:
    return frozenset(e for cyc in brute_argmax_cycles(d, k, value_of) for e in cyc)


def brute_critical_node_words(d: int, k: int,
                              value_of: dict[Word, Fraction]) -> frozenset[Word]:
    return frozenset(e[:-1] for cyc in brute_argmax_cycles(d, k, value_of)
                     for e in cyc)


def brute_best_permutation_cost(cost: list[list[Fraction]]) -> Fraction:
    """Minimal coupling cost over permutations, as the plain average —
    the reference value for uniform-marginal transport."""
    p = len(cost)
    best = min(sum(cost[i][perm[i]] for i in range(p))
               for perm in itertools.permutations(range(p)))
    return Fraction(best, p)


def orbit_average(word: Word, value_of: dict[Word, Fraction]) -> Fraction:
    """Mean of a depth-k table along the periodic orbit spelled by
    `word` (windows wrap around)."""
    k = len(next(iter(value_of)))
    p = len(word)
    total = sum(value_of[tuple(word[(i + t) % p] for t in range(k))]
                for i in range(p))
    return Fraction(total, p)
