"""Finite 2-graph skeletons: bicoloured graphs plus commuting squares.

A :class:`Skeleton` keeps its edges and squares in flat integer arrays so
that skeletons with tens of millions of red edges can be checked without
Python-level loops.  Edge ids are array positions.  A square is stored as
its blue-red factorisation ``g h`` (the key) together with its red-blue
factorisation ``e f``; the red-blue direction is never stored separately.

Orientation conventions: an edge runs from its source to its range, and in a
factorisation ``g h`` the range of the path is ``r(g)`` and ``s(g) = r(h)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

DEFAULT_DEGREE_BOUND = (4, 4)


class DegreeOutOfRange(ValueError):
    pass


def _frozen(a, dtype=np.int32) -> np.ndarray:
    arr = np.ascontiguousarray(np.asarray(a, dtype=dtype))
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Skeleton:
    num_vertices: int
    blue_src: np.ndarray
    blue_rng: np.ndarray
    red_src: np.ndarray
    red_rng: np.ndarray
    # squares: blue-red key (sq_g, sq_h) paired with red-blue value (sq_e, sq_f)
    sq_g: np.ndarray
    sq_h: np.ndarray
    sq_e: np.ndarray
    sq_f: np.ndarray
    labels: Optional[Tuple[str, ...]] = field(default=None)

    def __post_init__(self):
        for name in ("blue_src", "blue_rng", "red_src", "red_rng",
                     "sq_g", "sq_h", "sq_e", "sq_f"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    @classmethod
    def from_edges(cls, num_vertices: int,
                   blue: Sequence[Tuple[int, int]],
                   red: Sequence[Tuple[int, int]],
                   squares: Dict[Tuple[int, int], Tuple[int, int]],
                   labels: Optional[Sequence[str]] = None) -> "Skeleton":
        """Build from ``(source, range)`` edge lists and a ``{(g, h): (e, f)}`` map."""
        blue = list(blue)
        red = list(red)
        keys = list(squares)
        vals = [squares[k] for k in keys]
        return cls(
            num_vertices,
            [s for s, _ in blue], [r for _, r in blue],
            [s for s, _ in red], [r for _, r in red],
            [g for g, _ in keys], [h for _, h in keys],
            [e for e, _ in vals], [f for _, f in vals],
            tuple(labels) if labels is not None else None,
        )

    @property
    def num_blue(self) -> int:
        return len(self.blue_src)

    @property
    def num_red(self) -> int:
        return len(self.red_src)

    @property
    def num_squares(self) -> int:
        return len(self.sq_g)

    def label(self, v: int) -> str:
        return self.labels[v] if self.labels is not None else str(v)

    def square_map(self) -> Dict[Tuple[int, int], Tuple[int, int]]:
        return {(int(g), int(h)): (int(e), int(f)) for g, h, e, f in
                zip(self.sq_g, self.sq_h, self.sq_e, self.sq_f)}

    def red_blue_map(self) -> Dict[Tuple[int, int], Tuple[int, int]]:
        """Inverse direction of the square bijection, derived on demand."""
        return {v: k for k, v in self.square_map().items()}

    def blue_red_coder(self) -> "_PairCoder":
        # cached: edges are immutable
        if "_br_coder" not in self.__dict__:
            object.__setattr__(self, "_br_coder",
                               _PairCoder(self.blue_src, self.red_rng, self.num_vertices))
        return self.__dict__["_br_coder"]

    def red_blue_coder(self) -> "_PairCoder":
        if "_rb_coder" not in self.__dict__:
            object.__setattr__(self, "_rb_coder",
                               _PairCoder(self.red_src, self.blue_rng, self.num_vertices))
        return self.__dict__["_rb_coder"]

    def with_squares(self, sq_g, sq_h, sq_e, sq_f) -> "Skeleton":
        return Skeleton(self.num_vertices, self.blue_src, self.blue_rng,
                        self.red_src, self.red_rng, sq_g, sq_h, sq_e, sq_f,
                        self.labels)


# ---------------------------------------------------------------------------
# axiom checking

@dataclass
class AxiomReport:
    ok: bool
    violations: List[str]
    counts: Dict[str, int]

    def to_dict(self) -> dict:
        return {"ok": self.ok, "violations": list(self.violations),
                "counts": dict(self.counts)}


def _rank_within_groups(keys: np.ndarray, num_groups: int):
    """Position of each element among the elements sharing its key."""
    sizes = np.bincount(keys, minlength=num_groups)
    starts = np.zeros(num_groups + 1, dtype=np.int64)
    np.cumsum(sizes, out=starts[1:])
    if len(keys) < 2 or bool(np.all(keys[1:] >= keys[:-1])):
        # already grouped: skip the sort
        return np.arange(len(keys), dtype=np.int64) - starts[keys], sizes
    order = np.argsort(keys, kind="stable")
    rank = np.empty(len(keys), dtype=np.int64)
    rank[order] = np.arange(len(keys), dtype=np.int64) - starts[keys[order]]
    return rank, sizes


class _PairCoder:
    """Dense codes for composable pairs (x, y) with ``s(x) == r(y)``.

    The composable pairs are numbered 0..total-1 without sorting pairs:
    x contributes a block of size indeg_y(s(x)) and y its rank among the
    y-edges sharing its range.
    """

    def __init__(self, x_src: np.ndarray, y_rng: np.ndarray, nv: int):
        y_rank, y_indeg = _rank_within_groups(y_rng, nv)
        block = y_indeg[x_src]
        x_offset = np.zeros(len(x_src), dtype=np.int64)
        if len(x_src) > 1:
            np.cumsum(block[:-1], out=x_offset[1:])
        self.total = int(block.sum())
        # narrower codes halve the memory traffic on large skeletons
        dtype = np.int32 if self.total < 2**31 else np.int64
        self.y_rank = y_rank.astype(dtype)
        self.x_offset = x_offset.astype(dtype)

    def code(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return self.x_offset[x] + self.y_rank[y]


def _out_of_range(arr: np.ndarray, size: int) -> bool:
    return len(arr) > 0 and (int(arr.min()) < 0 or int(arr.max()) >= size)


def check_axioms(sk: Skeleton, max_examples: int = 5) -> AxiomReport:
    """Exhaustively check that the squares form a valid factorisation rule.

    Every edge endpoint must be a vertex, every key g h and value e f must
    be composable with matching outer endpoints, and each composable
    blue-red pair and each composable red-blue pair must occur exactly once.
    """
    nv = sk.num_vertices
    violations: List[str] = []
    counts: Dict[str, int] = {}

    def flag(name: str, n: int, detail=None):
        if n:
            counts[name] = counts.get(name, 0) + int(n)
            msg = f"{name} ({int(n)})"
            if detail is not None:
                msg += f": e.g. {detail}"
            violations.append(msg)

    for name, arrs in (("blue", (sk.blue_src, sk.blue_rng)),
                       ("red", (sk.red_src, sk.red_rng))):
        flag(f"{name} edge endpoint out of range",
             sum(int(np.count_nonzero((a < 0) | (a >= nv)))
                 for a in arrs if _out_of_range(a, nv)))
    if violations:
        return AxiomReport(False, violations, counts)

    nb, nr = sk.num_blue, sk.num_red
    g, h, e, f = sk.sq_g, sk.sq_h, sk.sq_e, sk.sq_f
    if (_out_of_range(g, nb) or _out_of_range(f, nb)
            or _out_of_range(h, nr) or _out_of_range(e, nr)):
        bad = ((g < 0) | (g >= nb) | (f < 0) | (f >= nb)
               | (h < 0) | (h >= nr) | (e < 0) | (e >= nr))
        flag("square references unknown edge", np.count_nonzero(bad))
        return AxiomReport(False, violations, counts)

    def examples(mask):
        idx = np.flatnonzero(mask)[:max_examples]
        return [(int(g[i]), int(h[i]), int(e[i]), int(f[i])) for i in idx]

    def check_equal(name, lhs, rhs):
        ok = lhs == rhs
        del lhs, rhs
        n_bad = len(ok) - int(np.count_nonzero(ok))
        if n_bad:
            flag(name, n_bad, examples(~ok))
            return ok
        return None  # all fine; no mask needed

    key_mask = check_equal("blue-red key not composable", sk.blue_src[g], sk.red_rng[h])
    val_mask = check_equal("red-blue value not composable", sk.red_src[e], sk.blue_rng[f])
    ends_ok = sk.blue_rng[g] == sk.red_rng[e]
    ends_ok &= sk.red_src[h] == sk.blue_src[f]
    n_bad = len(ends_ok) - int(np.count_nonzero(ends_ok))
    if n_bad:
        flag("square endpoint mismatch", n_bad, examples(~ends_ok))
    del ends_ok

    def exactly_once(coder, xs, ys, mask, what, kind):
        if mask is not None:
            xs, ys = xs[mask], ys[mask]
        hits = np.bincount(coder.code(xs, ys), minlength=coder.total)
        if len(hits) and hits.max() > 1:
            flag(f"duplicate {what} {kind}", int(np.maximum(hits - 1, 0).sum()))
        flag(f"missing {what} {kind}", coder.total - int(np.count_nonzero(hits)))

    exactly_once(sk.blue_red_coder(), g, h, key_mask, "blue-red", "key")
    exactly_once(sk.red_blue_coder(), e, f, val_mask, "red-blue", "value")

    return AxiomReport(not violations, violations, counts)


# ---------------------------------------------------------------------------
# morphisms

@dataclass(frozen=True, eq=False)
class ColouredGraphMorphism:
    vertex_map: np.ndarray
    blue_map: np.ndarray
    red_map: np.ndarray

    def __post_init__(self):
        for name in ("vertex_map", "blue_map", "red_map"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    @classmethod
    def identity(cls, sk: Skeleton) -> "ColouredGraphMorphism":
        return cls(np.arange(sk.num_vertices), np.arange(sk.num_blue),
                   np.arange(sk.num_red))


def compose_morphisms(second: ColouredGraphMorphism,
                      first: ColouredGraphMorphism) -> ColouredGraphMorphism:
    """``second`` after ``first``."""
    return ColouredGraphMorphism(second.vertex_map[first.vertex_map],
                                 second.blue_map[first.blue_map],
                                 second.red_map[first.red_map])


def invert_morphism(m: ColouredGraphMorphism) -> ColouredGraphMorphism:
    def inv(p):
        out = np.empty_like(p)
        out[p] = np.arange(len(p))
        return out
    return ColouredGraphMorphism(inv(m.vertex_map), inv(m.blue_map), inv(m.red_map))


def _is_bijection(p: np.ndarray, size: int) -> bool:
    if len(p) != size:
        return False
    if size == 0:
        return True
    if p.min() < 0 or p.max() >= size:
        return False
    return bool(np.all(np.bincount(p, minlength=size) == 1))


def is_isomorphism(m: ColouredGraphMorphism, src: Skeleton, dst: Skeleton) -> bool:
    """Bijective on each colour, intertwines r and s, and maps squares to squares."""
    if not (_is_bijection(m.vertex_map, dst.num_vertices)
            and len(m.vertex_map) == src.num_vertices
            and _is_bijection(m.blue_map, dst.num_blue)
            and len(m.blue_map) == src.num_blue
            and _is_bijection(m.red_map, dst.num_red)
            and len(m.red_map) == src.num_red
            and src.num_squares == dst.num_squares):
        return False
    vm = m.vertex_map
    if not (np.array_equal(dst.blue_src[m.blue_map], vm[src.blue_src])
            and np.array_equal(dst.blue_rng[m.blue_map], vm[src.blue_rng])
            and np.array_equal(dst.red_src[m.red_map], vm[src.red_src])
            and np.array_equal(dst.red_rng[m.red_map], vm[src.red_rng])):
        return False
    if src.num_squares == 0:
        return True
    # mapped keys are composable in dst because the maps intertwine r and s
    coder = dst.blue_red_coder()
    where = np.full(coder.total, -1, dtype=np.int64 if dst.num_squares >= 2**31 else np.int32)
    where[coder.code(dst.sq_g, dst.sq_h)] = np.arange(dst.num_squares, dtype=where.dtype)
    idx = where[coder.code(m.blue_map[src.sq_g], m.red_map[src.sq_h])]
    if np.any(idx < 0):
        return False
    return bool(np.array_equal(dst.sq_e[idx], m.red_map[src.sq_e])
                and np.array_equal(dst.sq_f[idx], m.blue_map[src.sq_f]))


# ---------------------------------------------------------------------------
# rectangles by square pasting

@dataclass(frozen=True)
class Rectangle:
    """Edge data of a pasted path of degree (m1, m2).

    ``blue[j][i]`` is the blue edge in row j, column i (range at column i);
    ``red[i][j]`` the red edge in column i, row j (range at row j).
    Vertex (0, 0) is the range of the path.
    """
    blue: Tuple[Tuple[int, ...], ...]
    red: Tuple[Tuple[int, ...], ...]


def _by_range(rng: np.ndarray, nv: int) -> List[List[int]]:
    out: List[List[int]] = [[] for _ in range(nv)]
    for eid, r in enumerate(rng.tolist()):
        out[r].append(eid)
    return out


def _edge_paths(by_range, src, start, length):
    paths = [((), start)]
    for _ in range(length):
        paths = [(p + (x,), int(src[x])) for p, end in paths for x in by_range[end]]
    return paths


def enumerate_rectangles(sk: Skeleton, degree: Tuple[int, int], v: int,
                         order: str = "blue-red",
                         bound: Tuple[int, int] = DEFAULT_DEGREE_BOUND
                         ) -> List[Rectangle]:
    """All paths of the given degree with range v, built by pasting squares.

    ``order="blue-red"`` starts from the bottom blue row and the right red
    column and pastes with the blue-red -> red-blue direction of the square
    map; ``order="red-blue"`` starts from the left red column and top blue row
    and uses the inverse direction.
    """
    m1, m2 = degree
    if m1 < 0 or m2 < 0 or m1 > bound[0] or m2 > bound[1]:
        raise DegreeOutOfRange(f"degree {degree} outside bound {bound}")
    nv = sk.num_vertices
    blue_in = _by_range(sk.blue_rng, nv)
    red_in = _by_range(sk.red_rng, nv)
    rects = []
    if order == "blue-red":
        fwd = sk.square_map()
        for bottom, corner in _edge_paths(blue_in, sk.blue_src, v, m1):
            for right, _ in _edge_paths(red_in, sk.red_src, corner, m2):
                blue = [list(bottom)] + [[None] * m1 for _ in range(m2)]
                red = [[None] * m2 for _ in range(m1)] + [list(right)]
                ok = True
                for j in range(m2):
                    for i in range(m1 - 1, -1, -1):
                        pair = fwd.get((blue[j][i], red[i + 1][j]))
                        if pair is None:
                            ok = False
                            break
                        red[i][j], blue[j + 1][i] = pair
                    if not ok:
                        break
                if ok:
                    rects.append(Rectangle(tuple(map(tuple, blue)),
                                           tuple(map(tuple, red))))
    elif order == "red-blue":
        back = sk.red_blue_map()
        for left, corner in _edge_paths(red_in, sk.red_src, v, m2):
            for top, _ in _edge_paths(blue_in, sk.blue_src, corner, m1):
                blue = [[None] * m1 for _ in range(m2)] + [list(top)]
                red = [list(left)] + [[None] * m2 for _ in range(m1)]
                ok = True
                for j in range(m2 - 1, -1, -1):
                    for i in range(m1):
                        pair = back.get((red[i][j], blue[j + 1][i]))
                        if pair is None:
                            ok = False
                            break
                        blue[j][i], red[i + 1][j] = pair
                    if not ok:
                        break
                if ok:
                    rects.append(Rectangle(tuple(map(tuple, blue)),
                                           tuple(map(tuple, red))))
    else:
        raise ValueError(f"unknown pasting order {order!r}")
    return rects


def count_paths(sk: Skeleton, degree: Tuple[int, int], v: int,
                order: str = "blue-red",
                bound: Tuple[int, int] = DEFAULT_DEGREE_BOUND) -> int:
    return len(enumerate_rectangles(sk, degree, v, order, bound))


# ---------------------------------------------------------------------------
# export

def _dot_id(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(sk: Skeleton, name: str = "skeleton") -> str:
    """Graphviz source: blue edges solid, red edges dashed."""
    lines = [f"digraph {_dot_id(name)} {{"]
    for v in range(sk.num_vertices):
        lines.append(f"  v{v} [label={_dot_id(sk.label(v))}];")
    for s, r in zip(sk.blue_src.tolist(), sk.blue_rng.tolist()):
        lines.append(f"  v{s} -> v{r} [color=blue, style=solid];")
    for s, r in zip(sk.red_src.tolist(), sk.red_rng.tolist()):
        lines.append(f"  v{s} -> v{r} [color=red, style=dashed];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_json_dict(sk: Skeleton) -> dict:
    return {
        "vertices": [{"id": v, "label": sk.label(v)} for v in range(sk.num_vertices)],
        "blue_edges": [{"id": i, "source": s, "range": r} for i, (s, r) in
                       enumerate(zip(sk.blue_src.tolist(), sk.blue_rng.tolist()))],
        "red_edges": [{"id": i, "source": s, "range": r} for i, (s, r) in
                      enumerate(zip(sk.red_src.tolist(), sk.red_rng.tolist()))],
        "squares": [{"blue_red": [g, h], "red_blue": [e, f]} for g, h, e, f in
                    zip(sk.sq_g.tolist(), sk.sq_h.tolist(),
                        sk.sq_e.tolist(), sk.sq_f.tolist())],
    }


def to_json(sk: Skeleton) -> str:
    return json.dumps(to_json_dict(sk), indent=1) + "\n"


def from_json_dict(doc: dict) -> Skeleton:
    blue = [(e["source"], e["range"]) for e in sorted(doc["blue_edges"], key=lambda e: e["id"])]
    red = [(e["source"], e["range"]) for e in sorted(doc["red_edges"], key=lambda e: e["id"])]
    squares = {tuple(s["blue_red"]): tuple(s["red_blue"]) for s in doc["squares"]}
    verts = sorted(doc["vertices"], key=lambda v: v["id"])
    return Skeleton.from_edges(len(verts), blue, red, squares,
                               [v["label"] for v in verts])
