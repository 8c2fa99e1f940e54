"""Connectivity analytics for finite directed graphs.

A graph is n-connected when every ordered pair of vertices is joined by a
path of length exactly n, i.e. the n-th boolean power of the vertex matrix
is all-positive.  A finite graph is n-connected for some n exactly when it
is strongly connected with period 1; :func:`min_connectivity_exponent`
finds the least such n using the explicit bound m + 2r, where every
return length >= m occurs at a base vertex and r is the diameter.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from math import gcd
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np


class NotStronglyConnected(ValueError):
    pass


class CapExceeded(RuntimeError):
    """The exponent search hit its cap before the constructive bound."""


@dataclass(frozen=True, eq=False)
class DirectedGraph:
    """``adjacency[u, v]`` is True when some edge runs from u to v."""
    num_vertices: int
    adjacency: np.ndarray
    multiplicity: Optional[np.ndarray] = None
    labels: Optional[Tuple[str, ...]] = None

    @classmethod
    def from_edges(cls, num_vertices: int, edges: Iterable[Tuple[int, int]],
                   labels: Optional[Sequence[str]] = None) -> "DirectedGraph":
        mult = np.zeros((num_vertices, num_vertices), dtype=np.int64)
        for u, v in edges:
            if not (0 <= u < num_vertices and 0 <= v < num_vertices):
                raise ValueError(f"edge ({u}, {v}) out of range")
            mult[u, v] += 1
        return cls(num_vertices, mult > 0, mult,
                   tuple(labels) if labels is not None else None)

    @classmethod
    def from_matrix(cls, matrix) -> "DirectedGraph":
        m = np.asarray(matrix, dtype=np.int64)
        return cls(m.shape[0], m > 0, m)

    def vertex_matrix(self) -> np.ndarray:
        if self.multiplicity is not None:
            return self.multiplicity
        return self.adjacency.astype(np.int64)

    def successors(self, u: int) -> List[int]:
        return np.flatnonzero(self.adjacency[u]).tolist()


def parse_edge_list(text: str) -> DirectedGraph:
    """One ``src dst`` pair per line; ``#`` starts a comment.

    Vertex names are arbitrary tokens, numbered in sorted order (numerically
    when every token is an integer).  Repeated lines are parallel edges.
    """
    pairs = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'src dst', got {line!r}")
        pairs.append((parts[0], parts[1]))
    names = {x for p in pairs for x in p}
    if all(x.lstrip("-").isdigit() for x in names):
        ordered = sorted(names, key=int)
    else:
        ordered = sorted(names)
    index = {x: i for i, x in enumerate(ordered)}
    return DirectedGraph.from_edges(len(ordered), [(index[a], index[b]) for a, b in pairs],
                                    ordered)


def _reach(adj: np.ndarray, start: int) -> np.ndarray:
    seen = np.zeros(len(adj), dtype=bool)
    seen[start] = True
    todo = [start]
    while todo:
        u = todo.pop()
        for v in np.flatnonzero(adj[u] & ~seen):
            seen[v] = True
            todo.append(int(v))
    return seen


def is_strongly_connected(g: DirectedGraph) -> bool:
    if g.num_vertices == 0:
        return False
    return bool(_reach(g.adjacency, 0).all() and _reach(g.adjacency.T, 0).all())


def _bool_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (a.astype(np.int64) @ b.astype(np.int64)) > 0


def bool_power(adj: np.ndarray, n: int) -> np.ndarray:
    """n-th boolean power by repeated squaring."""
    result = np.eye(len(adj), dtype=bool)
    base = adj.astype(bool)
    while n:
        if n & 1:
            result = _bool_matmul(result, base)
        base = _bool_matmul(base, base)
        n >>= 1
    return result


def is_n_connected(g: DirectedGraph, n: int) -> bool:
    if n < 1:
        raise ValueError("path length must be >= 1")
    if g.num_vertices == 0:
        return False
    return bool(bool_power(g.adjacency, n).all())


def vertex_period(g: DirectedGraph, v: int, exclude_loops: bool = False) -> Optional[int]:
    """gcd of the lengths of closed paths at v, or None if there are none.

    Uses BFS levels inside v's strongly connected component: the gcd of
    level(x) + 1 - level(y) over edges x -> y of the component.

    ``exclude_loops`` drops length-1 return paths from the set.  The gcd is
    unchanged by this: if 1 is a return length then so are 2 and 3.
    """
    adj = g.adjacency
    comp = _reach(adj, v) & _reach(adj.T, v)
    level = {v: 0}
    queue = deque([v])
    while queue:
        x = queue.popleft()
        for y in np.flatnonzero(adj[x] & comp):
            y = int(y)
            if y not in level:
                level[y] = level[x] + 1
                queue.append(y)
    p = 0
    for x in level:
        for y in np.flatnonzero(adj[x] & comp):
            p = gcd(p, level[x] + 1 - level[int(y)])
    if p == 0:
        return None
    # exclude_loops gives the same answer; see docstring
    return abs(p)


def graph_period(g: DirectedGraph) -> Optional[int]:
    """Common period of a strongly connected graph (None for a single
    vertex without a loop)."""
    if not is_strongly_connected(g):
        raise NotStronglyConnected("period of a graph needs strong connectivity")
    return vertex_period(g, 0)


def distances_from(g: DirectedGraph, v: int) -> List[Optional[int]]:
    dist: List[Optional[int]] = [None] * g.num_vertices
    dist[v] = 0
    queue = deque([v])
    while queue:
        x = queue.popleft()
        for y in g.successors(x):
            if dist[y] is None:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def diameter(g: DirectedGraph) -> Optional[int]:
    """Largest shortest-path distance, or None if some pair is unreachable."""
    best = 0
    for v in range(g.num_vertices):
        d = distances_from(g, v)
        if any(x is None for x in d):
            return None
        best = max(best, max(d))
    return best


def return_threshold(g: DirectedGraph, v: int, cap: int) -> int:
    """Least m such that every length >= m is a return length at v.

    Assumes v lies in an aperiodic component.  Once a run of consecutive
    return lengths is as long as the shortest return length, every later
    length is reached by adding that shortest loop.
    """
    row = np.zeros(g.num_vertices, dtype=bool)
    row[v] = True
    adj = g.adjacency.astype(np.int64)
    shortest = None
    run_start, run = None, 0
    for k in range(1, cap + 1):
        row = (row.astype(np.int64) @ adj) > 0
        if row[v]:
            if shortest is None:
                shortest = k
            if run == 0:
                run_start = k
            run += 1
            if run >= shortest:
                return run_start
        else:
            run = 0
    raise CapExceeded(f"no stable run of return lengths within {cap} steps")


def min_connectivity_exponent(g: DirectedGraph, cap: Optional[int] = None) -> Optional[int]:
    """Least n with g n-connected, or None if there is none.

    Searches n = 1 .. m + 2r.  Raises :class:`CapExceeded` when that bound
    is larger than ``cap`` (default 4 V^2) and nothing was found below cap.
    """
    V = g.num_vertices
    if cap is None:
        cap = 4 * V * V
    if not is_strongly_connected(g) or graph_period(g) != 1:
        return None
    m = return_threshold(g, 0, cap)
    r = diameter(g)
    bound = m + 2 * r
    power = np.eye(V, dtype=bool)
    for k in range(1, min(bound, cap) + 1):
        power = _bool_matmul(power, g.adjacency)
        if power.all():
            return k
    if bound > cap:
        raise CapExceeded(f"bound {bound} exceeds cap {cap}")
    raise AssertionError(f"graph not {bound}-connected despite period 1")
