"""Stable graphs of genus g with n legs.

A graph is stored as vertex genera, an edge list (self-loops as ``(v, v)``) and
``legs[i]`` = vertex carrying marking ``i``.  Graphs returned by
:func:`enumerate_stable_graphs` are in canonical form, so two isomorphic graphs
compare equal.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Iterator

from .errors import check_stable

__all__ = [
    "StableGraph",
    "enumerate_stable_graphs",
    "automorphism_count",
    "even_subset",
    "canonicalize",
]


@dataclass(frozen=True)
class StableGraph:
    genera: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    legs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "genera", tuple(self.genera))
        object.__setattr__(
            self, "edges", tuple(sorted(tuple(sorted(e)) for e in self.edges))
        )
        object.__setattr__(self, "legs", tuple(self.legs))

    @classmethod
    def smooth(cls, g: int, n: int) -> "StableGraph":
        return cls((g,), (), (0,) * n)

    @property
    def num_vertices(self) -> int:
        return len(self.genera)

    @property
    def n(self) -> int:
        return len(self.legs)

    @cached_property
    def valences(self) -> tuple[int, ...]:
        val = [0] * self.num_vertices
        for v in self.legs:
            val[v] += 1
        for a, b in self.edges:
            val[a] += 1
            val[b] += 1
        return tuple(val)

    def valence(self, v: int) -> int:
        return self.valences[v]

    @property
    def h1(self) -> int:
        return len(self.edges) - self.num_vertices + 1

    @property
    def genus(self) -> int:
        return sum(self.genera) + self.h1

    def legs_at(self, v: int) -> list[int]:
        return [i for i, w in enumerate(self.legs) if w == v]

    def is_connected(self) -> bool:
        if not self.genera:
            return False
        seen = {0}
        stack = [0]
        adj: dict[int, set[int]] = {v: set() for v in range(self.num_vertices)}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        while stack:
            v = stack.pop()
            for w in adj[v] - seen:
                seen.add(w)
                stack.append(w)
        return len(seen) == self.num_vertices

    def is_stable(self) -> bool:
        return all(2 * g - 2 + n > 0 for g, n in zip(self.genera, self.valences))

    def is_valid(self, g: int | None = None, n: int | None = None) -> bool:
        ok = (
            all(x >= 0 for x in self.genera)
            and all(0 <= v < self.num_vertices for v in self.legs)
            and all(0 <= a < self.num_vertices and 0 <= b < self.num_vertices for a, b in self.edges)
            and self.is_connected()
            and self.is_stable()
        )
        if g is not None:
            ok = ok and self.genus == g
        if n is not None:
            ok = ok and self.n == n
        return ok

    def to_json(self) -> dict:
        return {
            "vertices": list(self.genera),
            "edges": [list(e) for e in self.edges],
            "legs": list(self.legs),
            "aut": automorphism_count(self),
        }

    @classmethod
    def from_json(cls, data: dict) -> "StableGraph":
        return cls(tuple(data["vertices"]), tuple(tuple(e) for e in data["edges"]), tuple(data["legs"]))


# ---------------------------------------------------------------------------
# canonical labeling


def _refined_classes(graph: StableGraph) -> list:
    """Labeling-independent vertex colors, refined by neighbourhoods."""
    nv = graph.num_vertices
    loops = Counter(a for a, b in graph.edges if a == b)
    mult: dict[int, Counter] = {v: Counter() for v in range(nv)}
    for a, b in graph.edges:
        if a != b:
            mult[a][b] += 1
            mult[b][a] += 1
    colors: list = [
        (graph.genera[v], tuple(graph.legs_at(v)), loops[v], graph.valences[v])
        for v in range(nv)
    ]
    while True:
        keys = [
            (colors[v], tuple(sorted((colors[w], m) for w, m in mult[v].items())))
            for v in range(nv)
        ]
        ranking = {k: i for i, k in enumerate(sorted(set(keys)))}
        new = [ranking[k] for k in keys]
        if len(ranking) == len(set(colors)):
            return new
        colors = new


def _relabel(graph: StableGraph, perm: dict[int, int]):
    genera = [0] * graph.num_vertices
    for v, g in enumerate(graph.genera):
        genera[perm[v]] = g
    edges = tuple(sorted(tuple(sorted((perm[a], perm[b]))) for a, b in graph.edges))
    legs = tuple(perm[v] for v in graph.legs)
    return (tuple(genera), legs, edges)


def _class_respecting_perms(colors: list[tuple]) -> Iterator[dict[int, int]]:
    groups: dict[tuple, list[int]] = {}
    for v, c in enumerate(colors):
        groups.setdefault(c, []).append(v)
    ordered = [groups[c] for c in sorted(groups)]
    slots = []
    start = 0
    for grp in ordered:
        slots.append(list(range(start, start + len(grp))))
        start += len(grp)
    for choice in itertools.product(*(itertools.permutations(s) for s in slots)):
        perm = {}
        for grp, targets in zip(ordered, choice):
            for v, t in zip(grp, targets):
                perm[v] = t
        yield perm


def _canonical_data(graph: StableGraph) -> tuple[tuple, int]:
    colors = _refined_classes(graph)
    best = None
    count = 0
    for perm in _class_respecting_perms(colors):
        form = _relabel(graph, perm)
        if best is None or form < best:
            best, count = form, 1
        elif form == best:
            count += 1
    return best, count


def canonicalize(graph: StableGraph) -> StableGraph:
    form, _ = _canonical_data(graph)
    genera, legs, edges = form
    return StableGraph(genera, edges, legs)


@lru_cache(maxsize=None)
def automorphism_count(graph: StableGraph) -> int:
    """Order of Aut(graph); legs are fixed pointwise.

    Vertex automorphisms times the half-edge symmetries: permutations of
    parallel edges and flips of self-loops.
    """
    _, vertex_auts = _canonical_data(graph)
    edge_mult = Counter(graph.edges)
    factor = 1
    for (a, b), m in edge_mult.items():
        factor *= math.factorial(m)
        if a == b:
            factor *= 2**m
    return vertex_auts * factor


# ---------------------------------------------------------------------------
# enumeration


def _degenerations(graph: StableGraph) -> Iterator[StableGraph]:
    """All graphs with one more edge that contract back onto ``graph``."""
    nv = graph.num_vertices
    for v in range(nv):
        gv = graph.genera[v]
        if gv >= 1:
            genera = list(graph.genera)
            genera[v] -= 1
            yield StableGraph(tuple(genera), graph.edges + ((v, v),), graph.legs)

        # split v into v and a new vertex w = nv joined by a new edge
        w = nv
        half = []  # ("leg", i) | ("edge", index, side)
        for i, x in enumerate(graph.legs):
            if x == v:
                half.append(("leg", i, 0))
        for k, (a, b) in enumerate(graph.edges):
            if a == v:
                half.append(("edge", k, 0))
            if b == v:
                half.append(("edge", k, 1))
        for side_choice in itertools.product((v, w), repeat=len(half)):
            legs = list(graph.legs)
            edges = [list(e) for e in graph.edges]
            for (kind, k, s), target in zip(half, side_choice):
                if kind == "leg":
                    legs[k] = target
                else:
                    edges[k][s] = target
            edges.append([v, w])
            n_v = sum(1 for t in side_choice if t == v) + 1
            n_w = len(half) - n_v + 2
            for g1 in range(gv + 1):
                g2 = gv - g1
                if 2 * g1 - 2 + n_v <= 0 or 2 * g2 - 2 + n_w <= 0:
                    continue
                genera = list(graph.genera) + [g2]
                genera[v] = g1
                yield StableGraph(tuple(genera), tuple(tuple(e) for e in edges), tuple(legs))


def _sort_key(graph: StableGraph):
    return (len(graph.edges), graph.num_vertices, graph.genera, graph.edges, graph.legs)


@lru_cache(maxsize=None)
def _enumerate(g: int, n: int) -> tuple[StableGraph, ...]:
    level = {canonicalize(StableGraph.smooth(g, n))}
    found = set(level)
    while level:
        nxt = set()
        for graph in level:
            for deg in _degenerations(graph):
                c = canonicalize(deg)
                if c not in found:
                    found.add(c)
                    nxt.add(c)
        level = nxt
    return tuple(sorted(found, key=_sort_key))


def enumerate_stable_graphs(g: int, n: int) -> list[StableGraph]:
    """All stable graphs of genus ``g`` with ``n`` legs, up to isomorphism.

    Every stable graph with ``k + 1`` edges contracts (along any edge) to one
    with ``k`` edges, so repeatedly degenerating the smooth graph reaches all of
    them.  Output order is deterministic: by edge count, then canonical form.
    """
    check_stable(g, n)
    return list(_enumerate(g, n))


def even_subset(graphs: Iterable[StableGraph]) -> list[StableGraph]:
    """Graphs whose every vertex has even valence."""
    return [gr for gr in graphs if all(x % 2 == 0 for x in gr.valences)]
