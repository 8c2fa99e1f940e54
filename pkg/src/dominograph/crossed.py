"""The red graph as a Z-graph and its crossed product 2-graph.

For n >= 2 the vertex rotation sigma lifts to a permutation sigma1 of the
red edges (red edges are determined by their endpoints), and the action of Z
generated by (sigma^-1, sigma1^-1) on the red graph has a crossed product
2-graph.  Its skeleton is built here directly from that action and compared
with the domino skeleton through the coloured-graph map phi.

Ids in the crossed skeleton: vertex (v, 0) has id v, blue edge (v, 1) has id
v, red edge (e, 0) has id e.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .domino import (DEFAULT_VERTEX_LIMIT, BasicData, PathRect, _check_limit,
                     build_skeleton, red_edge, sigma, sigma_order,
                     sigma_permutation, vertices)
from .twograph import (ColouredGraphMorphism, Skeleton, check_axioms,
                       is_isomorphism)


class HypothesisViolation(ValueError):
    """The construction needs n >= 2."""


def _require_n2(data: BasicData) -> None:
    if data.n < 2:
        raise HypothesisViolation(f"crossed-product construction needs n >= 2, got {data}")


def _is_permutation(p: np.ndarray, size: int) -> bool:
    if len(p) != size:
        return False
    if size == 0:
        return True
    if p.min() < 0 or p.max() >= size:
        return False
    return bool(np.all(np.bincount(p, minlength=size) == 1))


@dataclass(frozen=True, eq=False)
class GraphAutomorphism:
    vertex_perm: np.ndarray
    edge_perm: np.ndarray

    def is_valid(self, base: Skeleton) -> bool:
        vp, ep = self.vertex_perm, self.edge_perm
        bij = _is_permutation(vp, base.num_vertices) and _is_permutation(ep, base.num_red)
        return bool(bij
                    and np.array_equal(base.red_src[ep], vp[base.red_src])
                    and np.array_equal(base.red_rng[ep], vp[base.red_rng]))

    def inverse(self) -> "GraphAutomorphism":
        vi = np.empty_like(self.vertex_perm)
        vi[self.vertex_perm] = np.arange(len(vi))
        ei = np.empty_like(self.edge_perm)
        ei[self.edge_perm] = np.arange(len(ei))
        return GraphAutomorphism(vi, ei)

    def power(self, m: int) -> "GraphAutomorphism":
        """alpha^m for any integer m, reducing m modulo the order first."""
        m %= self.order()
        vp = np.arange(len(self.vertex_perm))
        ep = np.arange(len(self.edge_perm))
        for _ in range(m):
            vp = self.vertex_perm[vp]
            ep = self.edge_perm[ep]
        return GraphAutomorphism(vp, ep)

    def vertex_order(self) -> int:
        ident_v = np.arange(len(self.vertex_perm))
        vp = self.vertex_perm
        k = 1
        while not np.array_equal(vp, ident_v):
            vp = self.vertex_perm[vp]
            k += 1
        return k

    def order(self, base: Optional[Skeleton] = None, known_valid: bool = False) -> int:
        """Order of the pair (vertex_perm, edge_perm).

        With ``base`` given, a valid automorphism of a graph without parallel
        edges has the order of its vertex part: edges are pinned down by
        their endpoints.  Otherwise edge powers are checked explicitly.
        """
        kv = self.vertex_order()
        if (base is not None and (known_valid or self.is_valid(base))
                and not _has_parallel_red(base)):
            return kv
        k = kv
        while not _is_identity(_perm_power(self.edge_perm, k)):
            k += kv
        return k


def _perm_power(p: np.ndarray, k: int) -> np.ndarray:
    result = np.arange(len(p), dtype=p.dtype)
    base = p
    while k:
        if k & 1:
            result = base[result]
        k >>= 1
        if k:
            base = base[base]
    return result


def _has_parallel_red(base: Skeleton) -> bool:
    N = base.num_vertices
    codes = base.red_rng.astype(np.int64) * N + base.red_src
    seen = np.zeros(N * N, dtype=bool)
    seen[codes] = True
    return int(np.count_nonzero(seen)) != base.num_red


def _is_identity(p: np.ndarray) -> bool:
    return bool(np.array_equal(p, np.arange(len(p), dtype=p.dtype)))


@dataclass(frozen=True, eq=False)
class CrossedSkeleton:
    base: Skeleton
    alpha: GraphAutomorphism
    derived: Skeleton


def red_graph(data: BasicData, limit: Optional[int] = DEFAULT_VERTEX_LIMIT) -> Skeleton:
    """The red 1-graph: complete directed graph with loops, red id = r*N + s."""
    _check_limit(data, limit)
    N = data.num_vertices
    ids = np.arange(N, dtype=np.int32)
    empty = np.zeros(0, dtype=np.int32)
    return Skeleton(N, empty, empty, np.tile(ids, N), np.repeat(ids, N),
                    empty, empty, empty, empty)


def sigma1_edge(data: BasicData, e: PathRect) -> PathRect:
    """The red edge from sigma(s(e)) to sigma(r(e))."""
    _require_n2(data)
    return red_edge(data, sigma(data, e.range()), sigma(data, e.source()))


def sigma1(data: BasicData, base: Skeleton, sig: np.ndarray) -> np.ndarray:
    """Red edge from sigma(s(e)) to sigma(r(e)), for every red edge e.

    Found by lookup in the red graph's endpoint table, not by id arithmetic.
    """
    _require_n2(data)
    N = base.num_vertices
    sig = sig.astype(np.int32)
    table = np.full(N * N, -1, dtype=np.int32)
    table[base.red_rng * np.int32(N) + base.red_src] = np.arange(base.num_red, dtype=np.int32)
    out = table[sig[base.red_rng] * np.int32(N) + sig[base.red_src]]
    if np.any(out < 0):
        raise AssertionError("red graph is not complete")
    return out


def build_automorphism(data: BasicData, limit: Optional[int] = DEFAULT_VERTEX_LIMIT,
                       base: Optional[Skeleton] = None) -> GraphAutomorphism:
    """Generator (sigma^-1, sigma1^-1) of the Z-action on the red graph."""
    _require_n2(data)
    if base is None:
        base = red_graph(data, limit)
    return _sigma_pair(data, limit, base).inverse()


def _sigma_pair(data: BasicData, limit: Optional[int], base: Skeleton) -> GraphAutomorphism:
    sig = sigma_permutation(data, limit)
    return GraphAutomorphism(sig.astype(np.int32), sigma1(data, base, sig))


def build_crossed_product(data: BasicData,
                          limit: Optional[int] = DEFAULT_VERTEX_LIMIT) -> CrossedSkeleton:
    """Skeleton of the crossed product of the red graph by alpha.

    Blue edge (v, 1) runs from alpha^-1(v) to v, red edges (e, 0) keep their
    endpoints, and the square (rho, 1) has factorisations
    (rho, 0)(s(rho), 1) = (r(rho), 1)(alpha^-1(rho), 0).
    """
    _require_n2(data)
    base = red_graph(data, limit)
    # alpha^-1 is (sigma, sigma1) itself
    a_inv = _sigma_pair(data, limit, base)
    alpha = a_inv.inverse()
    N = base.num_vertices
    ids = np.arange(N, dtype=np.int32)
    derived = Skeleton(
        N,
        blue_src=a_inv.vertex_perm, blue_rng=ids,
        red_src=base.red_src, red_rng=base.red_rng,
        sq_g=base.red_rng, sq_h=a_inv.edge_perm,
        sq_e=np.arange(base.num_red, dtype=np.int32), sq_f=base.red_src,
        labels=tuple(f"({w},0)" for w in vertices(data, limit)),
    )
    return CrossedSkeleton(base, alpha, derived)


def phi(data: BasicData, domino_skeleton: Skeleton) -> ColouredGraphMorphism:
    """v -> (v, 0), blue beta -> (r(beta), 1), red rho -> (rho, 0)."""
    _require_n2(data)
    sk = domino_skeleton
    return ColouredGraphMorphism(
        vertex_map=np.arange(sk.num_vertices),
        blue_map=sk.blue_rng,
        red_map=np.arange(sk.num_red),
    )


@dataclass
class IsoReport:
    data: BasicData
    status: str  # "ok", "failed", "skipped"
    note: str = ""
    vertices: int = 0
    blue_edges: int = 0
    red_edges: int = 0
    squares: int = 0
    crossed_axioms_ok: Optional[bool] = None
    automorphism_ok: Optional[bool] = None
    automorphism_order: Optional[int] = None
    isomorphism_ok: Optional[bool] = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["data"] = [self.data.n, self.data.q, self.data.t]
        return d


def verify_iso(data: BasicData, limit: Optional[int] = DEFAULT_VERTEX_LIMIT,
               compute_order: bool = True,
               check_derived_axioms: bool = False) -> IsoReport:
    """Check that phi is a 2-graph isomorphism onto the crossed product.

    The derived skeleton's own axiom check is optional: once phi is an
    isomorphism it follows from the axioms of the domino skeleton.
    """
    if data.n < 2:
        return IsoReport(data, "skipped", "needs n >= 2")
    if (data.n, data.q, data.t) == (2, 2, 0):
        # sigma is trivial here; the graph is the product K1 x K2
        return IsoReport(data, "skipped",
                         "degenerate case (2,2,0): sigma is the identity, "
                         "product graph K1 x K2")
    sk = build_skeleton(data, limit, labels=False)
    cp = build_crossed_product(data, limit)
    rep = IsoReport(data, "failed", vertices=sk.num_vertices, blue_edges=sk.num_blue,
                    red_edges=sk.num_red, squares=sk.num_squares)
    rep.automorphism_ok = cp.alpha.is_valid(cp.base)
    if compute_order:
        rep.automorphism_order = cp.alpha.order(cp.base, known_valid=rep.automorphism_ok)
    if check_derived_axioms:
        rep.crossed_axioms_ok = check_axioms(cp.derived).ok
    rep.isomorphism_ok = is_isomorphism(phi(data, sk), sk, cp.derived)
    order_ok = (not compute_order) or rep.automorphism_order == sigma_order(data)
    if (rep.automorphism_ok and rep.isomorphism_ok and order_ok
            and rep.crossed_axioms_ok is not False):
        rep.status = "ok"
    return rep
