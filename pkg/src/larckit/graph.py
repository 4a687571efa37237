"""Coupling graph of the controls in the drift eigenbasis.

Vertices are drift eigenvector indices (0-based).  An edge joins v and w
when some control has a matrix element ``<phi_v, H_l phi_w>`` above the edge
tolerance.  For a degenerate drift the vertices are eigenspaces and the
edge test uses the largest entry of the cross block.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .linop import ControlSystem, dagger


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True


@dataclass(frozen=True)
class Edge:
    v: int
    w: int
    control: int  # 1-based control label
    alpha: complex

    def to_json(self) -> dict:
        return {"v": self.v, "w": self.w, "control": self.control,
                "alpha": [self.alpha.real, self.alpha.imag]}


@dataclass(frozen=True)
class CouplingGraph:
    n_vertices: int
    edges: tuple[Edge, ...]
    edge_tol: float
    degenerate: bool = False
    near_threshold: tuple[tuple[int, int, int, float], ...] = ()

    def pairs(self) -> set[tuple[int, int]]:
        return {(e.v, e.w) for e in self.edges}

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for e in self.edges:
            adj[e.v].append(e.w)
            adj[e.w].append(e.v)
        return [sorted(a) for a in adj]

    def to_edge_list(self) -> str:
        """One ``v w l re(alpha) im(alpha)`` line per edge."""
        lines = [f"{e.v} {e.w} {e.control} {e.alpha.real:.17g} {e.alpha.imag:.17g}" for e in self.edges]
        return "\n".join(lines) + ("\n" if lines else "")

    def to_json(self) -> dict:
        return {"n_vertices": self.n_vertices, "edge_tol": self.edge_tol,
                "degenerate": self.degenerate, "edges": [e.to_json() for e in self.edges],
                "near_threshold": [list(x) for x in self.near_threshold]}


def default_edge_tol(controls) -> float:
    norms = [float(np.linalg.norm(h, 2)) for h in controls]
    return 1e-12 * max(norms, default=0.0)


def build_graph(system: ControlSystem, edge_tol: float | None = None) -> CouplingGraph:
    """Edges ``(v, w)``, ``v < w``, witnessed by the control with the largest
    coupling.  Elements within a factor 100 above the threshold are listed
    in ``near_threshold``."""
    if edge_tol is None:
        edge_tol = default_edge_tol(system.controls)
    spec = system.drift
    v = spec.vectors
    mats = [dagger(v) @ h @ v for h in system.controls]
    sl = spec.slices()
    n = spec.n_levels
    edges, near = [], []
    for a in range(n):
        for b in range(a + 1, n):
            best = None
            for l, m in enumerate(mats, start=1):
                blk = m[sl[a], sl[b]]
                i, j = np.unravel_index(np.argmax(np.abs(blk)), blk.shape)
                alpha = complex(blk[i, j])
                mag = abs(alpha)
                if mag > edge_tol:
                    if mag < 100 * edge_tol:
                        near.append((a, b, l, mag))
                    if best is None or mag > abs(best[1]):
                        best = (l, alpha)
            if best is not None:
                edges.append(Edge(a, b, best[0], best[1]))
    return CouplingGraph(n, tuple(edges), float(edge_tol), spec.is_degenerate, tuple(near))


def graph_from_edges(n: int, pairs, edge_tol: float = 0.0) -> CouplingGraph:
    """Plain graph without matrix witnesses (control label 0, alpha 1)."""
    edges = set()
    for a, b in pairs:
        if a == b:
            continue
        if not (0 <= a < n and 0 <= b < n):
            raise IndexError(f"edge ({a}, {b}) out of range for {n} vertices")
        edges.add((min(a, b), max(a, b)))
    return CouplingGraph(n, tuple(Edge(a, b, 0, 1 + 0j) for a, b in sorted(edges)), edge_tol)


def is_connected(graph: CouplingGraph) -> tuple[bool, list[list[int]]]:
    """Connectivity by union-find; components sorted by their least vertex."""
    uf = UnionFind(graph.n_vertices)
    for e in graph.edges:
        uf.union(e.v, e.w)
    groups: dict[int, list[int]] = {}
    for x in range(graph.n_vertices):
        groups.setdefault(uf.find(x), []).append(x)
    comps = sorted(groups.values(), key=lambda c: c[0])
    return len(comps) <= 1, comps


def bfs_path(graph: CouplingGraph, src: int, dst: int) -> list[int] | None:
    """Shortest path from ``src`` to ``dst`` (inclusive), ``None`` if unreachable.
    Neighbours are visited in ascending order, so the result is deterministic."""
    if src == dst:
        return [src]
    adj = graph.adjacency()
    prev = {src: None}
    queue = deque([src])
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if y not in prev:
                prev[y] = x
                if y == dst:
                    path = [y]
                    while prev[path[-1]] is not None:
                        path.append(prev[path[-1]])
                    return path[::-1]
                queue.append(y)
    return None


def edge_witness(graph: CouplingGraph, v: int, w: int) -> Edge | None:
    key = (min(v, w), max(v, w))
    for e in graph.edges:
        if (e.v, e.w) == key:
            return e
    return None
