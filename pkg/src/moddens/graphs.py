"""Undirected simple graphs, modularity-density arithmetic and a brute-force oracle.

The central quantity is the per-community contribution

    f(C) = (4 * |E(C)| - sum of degrees in C) / |C|

which equals (2 * internal - cut) / |C|.  The partition score D is the sum
of the contributions of its communities.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence


class GraphError(ValueError):
    """Base class for graph construction and scoring errors."""


class TooFewVertices(GraphError):
    pass


class VertexOutOfRange(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class DuplicateEdge(GraphError):
    pass


class EmptyCommunity(GraphError):
    pass


class InvalidPartition(GraphError):
    pass


class NoEdges(GraphError):
    pass


class GraphTooLarge(GraphError):
    pass


@dataclass(frozen=True)
class Graph:
    """Immutable undirected simple graph on vertices 0..n-1."""

    n: int
    edges: tuple[tuple[int, int], ...]
    degree: tuple[int, ...]
    # adjacency bitmask per vertex; bit j of adj_mask[i] set iff {i,j} is an edge
    adj_mask: tuple[int, ...] = field(repr=False)

    @property
    def m(self) -> int:
        return len(self.edges)

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self.adj_mask[i] >> j & 1)

    def internal_edge_count(self, members: Iterable[int]) -> int:
        mask = 0
        for v in members:
            mask |= 1 << v
        total = 0
        mm = mask
        while mm:
            v = (mm & -mm).bit_length() - 1
            total += (self.adj_mask[v] & mask).bit_count()
            mm &= mm - 1
        return total // 2

    def degree_sum(self, members: Iterable[int]) -> int:
        return sum(self.degree[v] for v in members)


def graph_from_edges(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    """Build a validated Graph from an edge list.

    Rejects self-loops, duplicate edges (in either orientation) and endpoints
    outside 0..n-1.
    """
    if n < 2:
        raise TooFewVertices(f"need at least 2 vertices, got {n}")
    norm: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    degree = [0] * n
    adj = [0] * n
    for e in edges:
        i, j = e
        if not (0 <= i < n) or not (0 <= j < n):
            raise VertexOutOfRange(f"edge {e!r} has an endpoint outside 0..{n - 1}")
        if i == j:
            raise SelfLoop(f"self-loop at vertex {i}")
        a, b = (i, j) if i < j else (j, i)
        if (a, b) in seen:
            raise DuplicateEdge(f"duplicate edge {{{a},{b}}}")
        seen.add((a, b))
        norm.append((a, b))
        degree[a] += 1
        degree[b] += 1
        adj[a] |= 1 << b
        adj[b] |= 1 << a
    return Graph(n=n, edges=tuple(norm), degree=tuple(degree), adj_mask=tuple(adj))


@dataclass(frozen=True)
class Community:
    """A vertex subset together with its cached contribution value."""

    members: frozenset[int]
    contribution: float

    @classmethod
    def from_members(cls, g: Graph, members: Iterable[int]) -> "Community":
        ms = frozenset(members)
        return cls(members=ms, contribution=contribution(g, ms))

    def __contains__(self, v: int) -> bool:
        return v in self.members

    def sorted_members(self) -> tuple[int, ...]:
        return tuple(sorted(self.members))


@dataclass(frozen=True)
class Partition:
    """A set of pairwise-disjoint, covering, non-empty communities."""

    communities: tuple[Community, ...]

    @classmethod
    def from_blocks(cls, g: Graph, blocks: Iterable[Iterable[int]]) -> "Partition":
        comms = tuple(Community.from_members(g, b) for b in blocks)
        p = cls(communities=comms)
        validate_partition(g, p)
        return p

    def __len__(self) -> int:
        return len(self.communities)

    def blocks(self) -> list[tuple[int, ...]]:
        return [c.sorted_members() for c in self.communities]

    def membership(self, n: int) -> list[int]:
        """Community index per vertex."""
        out = [-1] * n
        for k, c in enumerate(self.communities):
            for v in c.members:
                out[v] = k
        return out


def validate_partition(g: Graph, p: Partition) -> None:
    seen: set[int] = set()
    for c in p.communities:
        if not c.members:
            raise InvalidPartition("empty community")
        if seen & c.members:
            raise InvalidPartition("overlapping communities")
        seen |= c.members
    if seen != set(range(g.n)):
        raise InvalidPartition("communities do not cover every vertex")


def contribution(g: Graph, members: Iterable[int]) -> float:
    """Contribution of a vertex subset: (4*internal - degree sum) / size."""
    ms = frozenset(members)
    if not ms:
        raise EmptyCommunity("community must be non-empty")
    for v in ms:
        if not (0 <= v < g.n):
            raise VertexOutOfRange(f"vertex {v} outside 0..{g.n - 1}")
    internal = g.internal_edge_count(ms)
    return (4.0 * internal - g.degree_sum(ms)) / len(ms)


def modularity_density(g: Graph, p: Partition) -> float:
    """Sum of community contributions over a valid partition."""
    validate_partition(g, p)
    return sum(contribution(g, c.members) for c in p.communities)


def modularity(g: Graph, p: Partition) -> float:
    """Classic null-model modularity of a partition (reporting utility)."""
    validate_partition(g, p)
    m = g.m
    if m == 0:
        raise NoEdges("modularity is undefined on a graph with no edges")
    q = 0.0
    for c in p.communities:
        internal = g.internal_edge_count(c.members)
        dsum = g.degree_sum(c.members)
        q += internal / m - (dsum / (2.0 * m)) ** 2
    return q


def brute_force_optimum(g: Graph, max_n: int = 12) -> tuple[Partition, float]:
    """Exhaustive optimum of the density score over all partitions.

    Enumerates restricted-growth strings in lexicographic order; among
    score ties the last maximizer (the lexicographically largest string,
    i.e. the finest such partition) is kept, so an edgeless graph yields
    all singletons.
    """
    if g.n > max_n:
        raise GraphTooLarge(f"n={g.n} exceeds brute-force cap {max_n}")
    n = g.n
    adj = g.adj_mask
    deg = g.degree

    # per-block running state: bitmask, internal edge count, degree sum, size
    masks = [0] * n
    internals = [0] * n
    degsums = [0] * n
    sizes = [0] * n
    assign = [0] * n

    best_d = -float("inf")
    best_assign: list[int] | None = None

    def rec(v: int, nblocks: int, dsum: float) -> None:
        nonlocal best_d, best_assign
        if v == n:
            if dsum >= best_d:
                best_d = dsum
                best_assign = assign[:]
            return
        bit = 1 << v
        for k in range(nblocks + 1):
            new_block = k == nblocks
            add_int = 0 if new_block else (adj[v] & masks[k]).bit_count()
            old_term = (
                0.0
                if new_block
                else (4.0 * internals[k] - degsums[k]) / sizes[k]
            )
            masks[k] |= bit
            internals[k] += add_int
            degsums[k] += deg[v]
            sizes[k] += 1
            new_term = (4.0 * internals[k] - degsums[k]) / sizes[k]
            assign[v] = k
            rec(v + 1, nblocks + (1 if new_block else 0), dsum - old_term + new_term)
            sizes[k] -= 1
            degsums[k] -= deg[v]
            internals[k] -= add_int
            masks[k] &= ~bit

    rec(0, 0, 0.0)
    assert best_assign is not None
    nblocks = max(best_assign) + 1
    blocks: list[list[int]] = [[] for _ in range(nblocks)]
    for v, k in enumerate(best_assign):
        blocks[k].append(v)
    part = Partition.from_blocks(g, blocks)
    return part, modularity_density(g, part)
