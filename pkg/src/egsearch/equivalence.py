"""Essential-graph machinery: v-structures, orientation closure, extensions."""
from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from .graph import Dag, MixedGraph, has_directed_cycle


class CyclicRejection(RuntimeError):
    """Orientation produced a directed cycle (the pinwheel case); the candidate is discarded."""


class NoExtension(RuntimeError):
    """The partially directed graph admits no consistent DAG extension."""


def _pair(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


def v_structures(g: MixedGraph) -> set[tuple[int, int, int]]:
    """Unshielded colliders ``x -> y <- z`` as triples with ``x < z``."""
    parents: dict[int, list[int]] = {}
    for a, b in g.directed:
        parents.setdefault(b, []).append(a)
    out = set()
    for y, ps in parents.items():
        ps = sorted(ps)
        for i, x in enumerate(ps):
            for z in ps[i + 1:]:
                if not g.is_adjacent(x, z):
                    out.add((x, y, z))
    return out


def orient_v_structures(
    skel: MixedGraph,
    sepsets: Mapping[tuple[int, int], frozenset[int]],
    order: Sequence[int],
) -> MixedGraph:
    """Orient ``x - y - z`` as ``x -> y <- z`` whenever ``y`` is not in ``sepset(x, z)``.

    Triples are visited in the sequence induced by ``order``. A head that would
    make an already oriented edge double-headed is dropped, so the earlier
    orientation wins.
    """
    n = skel.n_nodes
    rank = {v: i for i, v in enumerate(order)}
    adj: list[set[int]] = [set() for _ in range(n)]
    for a, b in skel.skeleton_pairs():
        adj[a].add(b)
        adj[b].add(a)

    triples = []
    for y in range(n):
        nbrs = sorted(adj[y], key=rank.__getitem__)
        for i, x in enumerate(nbrs):
            for z in nbrs[i + 1:]:
                if z not in adj[x]:
                    triples.append((x, y, z))
    triples.sort(key=lambda t: (rank[t[0]], rank[t[1]], rank[t[2]]))

    directed: set[tuple[int, int]] = set(skel.directed)
    for x, y, z in triples:
        sep = sepsets.get(_pair(x, z))
        if sep is None or y in sep:
            continue
        for tail in (x, z):
            if (y, tail) in directed:
                continue
            directed.add((tail, y))
    undirected = skel.skeleton_pairs() - {_pair(a, b) for a, b in directed}
    return MixedGraph(n, frozenset(directed), frozenset(undirected))


def meek_closure(g: MixedGraph) -> MixedGraph:
    """Apply the two orientation rules until nothing changes.

    Rule (a): ``a -> b - c`` with ``a``, ``c`` non-adjacent orients ``b -> c``.
    Rule (b): ``a - b`` with a directed path from ``a`` to ``b`` orients ``a -> b``.

    Raises :class:`CyclicRejection` when the directed part is, or becomes, cyclic.
    """
    if has_directed_cycle(g):
        raise CyclicRejection("input graph has a directed cycle")
    n = g.n_nodes
    directed = set(g.directed)
    undirected = set(g.undirected)
    adj: list[set[int]] = [set() for _ in range(n)]
    for a, b in directed | undirected:
        adj[a].add(b)
        adj[b].add(a)

    changed = True
    while changed:
        changed = False
        for u, v in sorted(undirected):
            for b, c in ((u, v), (v, u)):
                if any((a, b) in directed and c not in adj[a] for a in adj[b] if a != c):
                    undirected.discard((u, v))
                    directed.add((b, c))
                    changed = True
                    break
            if changed:
                break
        if changed:
            continue
        for u, v in sorted(undirected):
            for a, b in ((u, v), (v, u)):
                if _has_directed_path(directed, n, a, b):
                    undirected.discard((u, v))
                    directed.add((a, b))
                    changed = True
                    break
            if changed:
                break

    out = MixedGraph(n, frozenset(directed), frozenset(undirected))
    if has_directed_cycle(out):
        raise CyclicRejection("orientation closure created a directed cycle")
    return out


def _has_directed_path(directed: set[tuple[int, int]], n: int, src: int, dst: int) -> bool:
    succ: list[list[int]] = [[] for _ in range(n)]
    for a, b in directed:
        succ[a].append(b)
    seen = {src}
    stack = [src]
    while stack:
        v = stack.pop()
        for w in succ[v]:
            if w == dst:
                return True
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return False


def consistent_extension(g: MixedGraph, rng: np.random.Generator) -> Dag:
    """Randomly orient the undirected edges of ``g`` into a DAG.

    Repeatedly removes a node, picked uniformly among the valid sinks, after
    orienting its undirected edges inward. A node is a valid sink when it has
    no outgoing directed edge and each undirected neighbour is adjacent to
    every other node adjacent to it. The result keeps the skeleton, the
    directed edges and the v-structures of ``g``; it is not uniform over all
    extensions.
    """
    n = g.n_nodes
    alive = set(range(n))
    out_dir: list[set[int]] = [set() for _ in range(n)]
    in_dir: list[set[int]] = [set() for _ in range(n)]
    undir: list[set[int]] = [set() for _ in range(n)]
    for a, b in g.directed:
        out_dir[a].add(b)
        in_dir[b].add(a)
    for a, b in g.undirected:
        undir[a].add(b)
        undir[b].add(a)

    directed = set(g.directed)
    while alive:
        candidates = []
        for x in sorted(alive):
            if out_dir[x]:
                continue
            adj_x = in_dir[x] | undir[x]
            if all(adj_x - {y} <= (in_dir[y] | out_dir[y] | undir[y]) for y in undir[x]):
                candidates.append(x)
        if not candidates:
            raise NoExtension("no consistent DAG extension exists")
        x = candidates[int(rng.integers(len(candidates)))]
        for y in undir[x]:
            directed.add((y, x))
            undir[y].discard(x)
        for y in in_dir[x]:
            out_dir[y].discard(x)
        undir[x] = set()
        in_dir[x] = set()
        alive.discard(x)
    return Dag(n, directed)


def dag_to_essential(d: MixedGraph) -> MixedGraph:
    """Skeleton of ``d`` with only its v-structures oriented, then closed under the two rules."""
    directed = set()
    for x, y, z in v_structures(d):
        directed.add((x, y))
        directed.add((z, y))
    undirected = d.skeleton_pairs() - {_pair(a, b) for a, b in directed}
    return meek_closure(MixedGraph(d.n_nodes, frozenset(directed), frozenset(undirected)))


def markov_equivalent(a: MixedGraph, b: MixedGraph) -> bool:
    return a.skeleton_pairs() == b.skeleton_pairs() and v_structures(a) == v_structures(b)


def canonical_encoding(g: MixedGraph) -> str:
    d = ";".join(f"{a}>{b}" for a, b in sorted(g.directed))
    u = ";".join(f"{a}-{b}" for a, b in sorted(g.undirected))
    return f"{g.n_nodes}|{d}|{u}"
