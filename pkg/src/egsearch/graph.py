"""Mixed graph representation shared by DAGs, skeletons, PDAGs and essential graphs.

Nodes are positional integers; variable names live outside the graph and are
only attached when reading or writing the text format.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence


class CycleError(ValueError):
    """Raised when a :class:`Dag` is constructed from cyclic edges."""


class GraphFormatError(ValueError):
    pass


Edge = tuple[int, int]


@dataclass(frozen=True, eq=False)
class MixedGraph:
    """Node count plus a set of directed and a set of undirected edges.

    Undirected edges are stored as ``(min, max)`` pairs. A pair of nodes may
    appear at most once across both sets, so double-headed edges cannot be
    represented.
    """

    n_nodes: int
    directed: frozenset[Edge] = field(default_factory=frozenset)
    undirected: frozenset[Edge] = field(default_factory=frozenset)

    def __post_init__(self):
        directed = frozenset((int(a), int(b)) for a, b in self.directed)
        undirected = frozenset(
            (min(int(a), int(b)), max(int(a), int(b))) for a, b in self.undirected
        )
        seen: set[Edge] = set()
        for a, b in list(directed) + list(undirected):
            if a == b:
                raise ValueError(f"self-loop on node {a}")
            if not (0 <= a < self.n_nodes and 0 <= b < self.n_nodes):
                raise ValueError(f"edge ({a}, {b}) out of range for {self.n_nodes} nodes")
            key = (min(a, b), max(a, b))
            if key in seen:
                raise ValueError(f"pair {key} appears more than once")
            seen.add(key)
        object.__setattr__(self, "directed", directed)
        object.__setattr__(self, "undirected", undirected)

    # --- equality / hashing -------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, MixedGraph):
            return NotImplemented
        return (
            self.n_nodes == other.n_nodes
            and self.directed == other.directed
            and self.undirected == other.undirected
        )

    def __hash__(self):
        return hash((self.n_nodes, self.directed, self.undirected))

    def __repr__(self):
        d = ", ".join(f"{a}->{b}" for a, b in sorted(self.directed))
        u = ", ".join(f"{a}--{b}" for a, b in sorted(self.undirected))
        return f"{type(self).__name__}(n={self.n_nodes}; {d}; {u})"

    # --- queries --------------------------------------------------------------
    @classmethod
    def empty(cls, n_nodes: int) -> "MixedGraph":
        return cls(n_nodes)

    @classmethod
    def complete_undirected(cls, n_nodes: int) -> "MixedGraph":
        return cls(
            n_nodes,
            undirected=frozenset((a, b) for a in range(n_nodes) for b in range(a + 1, n_nodes)),
        )

    def has_directed(self, a: int, b: int) -> bool:
        return (a, b) in self.directed

    def has_undirected(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.undirected

    def is_adjacent(self, a: int, b: int) -> bool:
        return (
            (a, b) in self.directed
            or (b, a) in self.directed
            or (min(a, b), max(a, b)) in self.undirected
        )

    def adjacencies(self, x: int) -> set[int]:
        return adjacencies(self, x)

    def parents(self, x: int) -> set[int]:
        return {a for a, b in self.directed if b == x}

    def children(self, x: int) -> set[int]:
        return {b for a, b in self.directed if a == x}

    def neighbors(self, x: int) -> set[int]:
        """Nodes joined to ``x`` by an undirected edge."""
        return {b if a == x else a for a, b in self.undirected if x in (a, b)}

    def skeleton_pairs(self) -> frozenset[Edge]:
        return frozenset((min(a, b), max(a, b)) for a, b in self.directed) | self.undirected

    def n_edges(self) -> int:
        return len(self.directed) + len(self.undirected)

    def is_dag(self) -> bool:
        return not self.undirected and not has_directed_cycle(self)


class Dag(MixedGraph):
    """A fully directed, acyclic :class:`MixedGraph`."""

    def __init__(self, n_nodes: int, directed: Iterable[Edge] = ()):
        super().__init__(n_nodes, frozenset(directed), frozenset())

    def __post_init__(self):
        super().__post_init__()
        if self.undirected:
            raise ValueError("a Dag cannot hold undirected edges")
        if has_directed_cycle(self):
            raise CycleError("edges contain a directed cycle")

    def parent_lists(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.n_nodes)]
        for a, b in sorted(self.directed):
            out[b].append(a)
        return out

    @classmethod
    def from_graph(cls, g: MixedGraph) -> "Dag":
        if g.undirected:
            raise ValueError("graph still has undirected edges")
        return cls(g.n_nodes, g.directed)


def _successors(g: MixedGraph) -> list[list[int]]:
    succ: list[list[int]] = [[] for _ in range(g.n_nodes)]
    for a, b in sorted(g.directed):
        succ[a].append(b)
    return succ


def has_directed_cycle(g: MixedGraph) -> bool:
    """True iff the directed edges of ``g`` contain a cycle; undirected edges are ignored."""
    succ = _successors(g)
    indeg = [0] * g.n_nodes
    for _, b in g.directed:
        indeg[b] += 1
    stack = [v for v in range(g.n_nodes) if indeg[v] == 0]
    removed = 0
    while stack:
        v = stack.pop()
        removed += 1
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                stack.append(w)
    return removed != g.n_nodes


def skeleton(g: MixedGraph) -> MixedGraph:
    return MixedGraph(g.n_nodes, undirected=g.skeleton_pairs())


def topological_order(d: MixedGraph) -> list[int]:
    """Kahn ordering of the directed part, smallest available index first."""
    import heapq

    succ = _successors(d)
    indeg = [0] * d.n_nodes
    for _, b in d.directed:
        indeg[b] += 1
    heap = [v for v in range(d.n_nodes) if indeg[v] == 0]
    heapq.heapify(heap)
    out = []
    while heap:
        v = heapq.heappop(heap)
        out.append(v)
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(heap, w)
    if len(out) != d.n_nodes:
        raise CycleError("graph has a directed cycle")
    return out


def adjacencies(g: MixedGraph, x: int) -> set[int]:
    out = set()
    for a, b in g.directed:
        if a == x:
            out.add(b)
        elif b == x:
            out.add(a)
    for a, b in g.undirected:
        if a == x:
            out.add(b)
        elif b == x:
            out.add(a)
    return out


def reachable_from(g: MixedGraph, src: int) -> set[int]:
    """Nodes reachable from ``src`` along directed edges (excluding ``src`` unless on a cycle)."""
    succ = _successors(g)
    seen: set[int] = set()
    stack = list(succ[src])
    while stack:
        v = stack.pop()
        if v in seen:
            continue
        seen.add(v)
        stack.extend(succ[v])
    return seen


# --- text format -------------------------------------------------------------

def write_graph(g: MixedGraph, names: Sequence[str]) -> str:
    if len(names) != g.n_nodes:
        raise GraphFormatError(f"{len(names)} names for {g.n_nodes} nodes")
    lines = ["nodes: " + ",".join(names)]
    lines += [f"{names[a]} -> {names[b]}" for a, b in sorted(g.directed)]
    lines += [f"{names[a]} -- {names[b]}" for a, b in sorted(g.undirected)]
    return "\n".join(lines) + "\n"


def read_graph(text: str) -> tuple[MixedGraph, list[str]]:
    names: list[str] | None = None
    directed: list[Edge] = []
    undirected: list[Edge] = []
    pending: list[tuple[str, str, str, int]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.lower().startswith("nodes:"):
            if names is not None:
                raise GraphFormatError(f"line {lineno}: duplicate nodes header")
            names = [s.strip() for s in line[6:].split(",") if s.strip()]
            if len(set(names)) != len(names):
                raise GraphFormatError(f"line {lineno}: duplicate node names")
            continue
        for sep in ("->", "--"):
            if sep in line:
                a, b = (s.strip() for s in line.split(sep, 1))
                if not a or not b:
                    raise GraphFormatError(f"line {lineno}: malformed edge {raw!r}")
                pending.append((a, sep, b, lineno))
                break
        else:
            raise GraphFormatError(f"line {lineno}: cannot parse {raw!r}")
    if names is None:
        raise GraphFormatError("missing 'nodes:' header")
    index = {name: i for i, name in enumerate(names)}
    for a, sep, b, lineno in pending:
        if a not in index or b not in index:
            raise GraphFormatError(f"line {lineno}: unknown node in {a} {sep} {b}")
        (directed if sep == "->" else undirected).append((index[a], index[b]))
    try:
        g = MixedGraph(len(names), frozenset(directed), frozenset(undirected))
    except ValueError as exc:
        raise GraphFormatError(str(exc)) from exc
    return g, names
