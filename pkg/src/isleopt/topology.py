"""Directed migration topologies and their generators.

A topology is a simple directed graph over island indices: no self-loops,
no duplicate edges. The classic deterministic layouts (ring, fully
connected, hypercube, wheel rim) and three random models (Barabasi-Albert
preferential attachment, Watts-Strogatz rewired lattice, Erdos-Renyi
G(n, p)) are generated here; all random generators are deterministic given
their seed.
"""

from __future__ import annotations

import numpy as np

from .core import make_rng

__all__ = [
    "TOPOLOGIES",
    "Topology",
    "barabasi_albert",
    "custom",
    "edgeless",
    "erdos_renyi",
    "fully_connected",
    "hypercube",
    "load_edge_list",
    "rim",
    "ring",
    "watts_strogatz",
]


class Topology:
    """Directed graph over ``n`` island indices."""

    def __init__(self, n: int, edges=(), generator_tag: str = "custom", seed: int = 0):
        if n < 0:
            raise ValueError("node count must be non-negative")
        self.n = int(n)
        self.generator_tag = generator_tag
        self.seed = int(seed)
        self._edges = set()
        for src, dst in edges:
            self.add_edge(src, dst)

    @property
    def edges(self):
        """Set of directed (src, dst) pairs."""
        return set(self._edges)

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    def _check_node(self, i: int) -> int:
        i = int(i)
        if not 0 <= i < self.n:
            raise ValueError(f"node {i} out of range [0, {self.n})")
        return i

    def add_node(self) -> int:
        """Append an isolated node; returns its index."""
        self.n += 1
        return self.n - 1

    def add_edge(self, src: int, dst: int) -> None:
        """Insert a directed edge; duplicates are a no-op, self-loops an error."""
        src, dst = self._check_node(src), self._check_node(dst)
        if src == dst:
            raise ValueError(f"self-loop at node {src} not allowed")
        self._edges.add((src, dst))

    def add_undirected(self, a: int, b: int) -> None:
        self.add_edge(a, b)
        self.add_edge(b, a)

    def has_edge(self, src: int, dst: int) -> bool:
        return (src, dst) in self._edges

    def neighbors_out(self, i: int):
        """Sorted successor list of node i."""
        self._check_node(i)
        return sorted(dst for src, dst in self._edges if src == i)

    def neighbors_in(self, i: int):
        self._check_node(i)
        return sorted(src for src, dst in self._edges if dst == i)

    def is_symmetric(self) -> bool:
        return all((b, a) in self._edges for a, b in self._edges)

    def to_edge_list(self) -> str:
        """Plain-text export: node count, then one ``src dst`` line per edge."""
        lines = [str(self.n)]
        lines += [f"{a} {b}" for a, b in sorted(self._edges)]
        return "\n".join(lines) + "\n"

    def __repr__(self) -> str:
        return f"Topology({self.generator_tag!r}, n={self.n}, edges={len(self._edges)})"


def load_edge_list(text: str) -> Topology:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    t = Topology(int(lines[0]))
    for ln in lines[1:]:
        a, b = ln.split()
        t.add_edge(int(a), int(b))
    return t


def custom(n: int = 0) -> Topology:
    return Topology(n, generator_tag="custom")


def edgeless(n: int) -> Topology:
    """n isolated islands: no migration routes at all."""
    return Topology(n, generator_tag="edgeless")


def ring(n: int) -> Topology:
    """Bidirectional cycle; degenerates to a single pair for n=2."""
    t = Topology(n, generator_tag="ring")
    if n >= 2:
        for i in range(n):
            t.add_undirected(i, (i + 1) % n)
    return t


def fully_connected(n: int) -> Topology:
    t = Topology(n, generator_tag="fully_connected")
    for i in range(n):
        for j in range(i + 1, n):
            t.add_undirected(i, j)
    return t


def hypercube(n: int) -> Topology:
    """Binary hypercube truncated to the first n vertices.

    Nodes are adjacent iff their indices differ in exactly one bit; for
    non-powers of two the missing vertices are simply absent.
    """
    t = Topology(n, generator_tag="hypercube")
    for i in range(n):
        for j in range(i + 1, n):
            if (i ^ j).bit_count() == 1:
                t.add_undirected(i, j)
    return t


def rim(n: int) -> Topology:
    """Wheel rim: bidirectional ring of nodes 1..n-1 plus a hub (node 0)
    connected to every ring node; fully connected for n <= 2."""
    t = Topology(n, generator_tag="rim")
    if n <= 2:
        return fully_connected(n) if n == 2 else t
    for i in range(1, n):
        t.add_undirected(0, i)
    outer = list(range(1, n))
    if len(outer) >= 2:
        for k, node in enumerate(outer):
            t.add_undirected(node, outer[(k + 1) % len(outer)])
    return t


def barabasi_albert(n: int, m: int, seed: int) -> Topology:
    """Preferential attachment: a fully connected core of m+1 nodes, then
    each new node links (bidirectionally) to m distinct existing nodes
    chosen with probability proportional to their current degree."""
    if m < 1 or m >= n:
        raise ValueError(f"need 1 <= m < n, got m={m}, n={n}")
    rng = make_rng(seed)
    t = Topology(n, generator_tag="barabasi_albert", seed=seed)
    degree = np.zeros(n)
    for i in range(m + 1):
        for j in range(i + 1, m + 1):
            t.add_undirected(i, j)
            degree[i] += 1
            degree[j] += 1
    for new in range(m + 1, n):
        targets: list[int] = []
        weights = degree[:new].copy()
        while len(targets) < m:
            cumulative = np.cumsum(weights)
            pick = int(np.searchsorted(cumulative, rng.random() * cumulative[-1], side="right"))
            targets.append(pick)
            weights[pick] = 0.0  # enforce distinct targets
        for dst in targets:
            t.add_undirected(new, dst)
            degree[new] += 1
            degree[dst] += 1
    return t


def watts_strogatz(n: int, k: int, beta: float, seed: int) -> Topology:
    """Ring lattice with k/2 neighbours per side, each lattice edge rewired
    with probability beta to a uniform non-duplicate, non-self target."""
    if k < 2 or k % 2 != 0:
        raise ValueError("k must be even and >= 2")
    if n <= k:
        raise ValueError(f"need n > k, got n={n}, k={k}")
    if not 0.0 <= beta <= 1.0:
        raise ValueError("beta must be in [0, 1]")
    rng = make_rng(seed)
    adjacency = [set() for _ in range(n)]
    for u in range(n):
        for j in range(1, k // 2 + 1):
            v = (u + j) % n
            adjacency[u].add(v)
            adjacency[v].add(u)
    for u in range(n):
        for j in range(1, k // 2 + 1):
            v = (u + j) % n
            if rng.random() < beta and v in adjacency[u]:
                if len(adjacency[u]) >= n - 1:
                    continue  # u already adjacent to everyone
                w = int(rng.integers(0, n))
                while w == u or w in adjacency[u]:
                    w = int(rng.integers(0, n))
                adjacency[u].discard(v)
                adjacency[v].discard(u)
                adjacency[u].add(w)
                adjacency[w].add(u)
    t = Topology(n, generator_tag="watts_strogatz", seed=seed)
    for u in range(n):
        for v in adjacency[u]:
            t.add_edge(u, v)
    return t


def erdos_renyi(n: int, p: float, seed: int) -> Topology:
    """G(n, p): each unordered pair linked bidirectionally with probability p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be in [0, 1]")
    rng = make_rng(seed)
    t = Topology(n, generator_tag="erdos_renyi", seed=seed)
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                t.add_undirected(i, j)
    return t


TOPOLOGIES = {
    "ring": ring,
    "fully_connected": fully_connected,
    "hypercube": hypercube,
    "rim": rim,
    "barabasi_albert": barabasi_albert,
    "watts_strogatz": watts_strogatz,
    "erdos_renyi": erdos_renyi,
    "edgeless": edgeless,
}
