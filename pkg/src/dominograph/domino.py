"""Domino 2-graphs Lambda(n, q, t).

Vertices are words of length n over Z/q with trace t.  A path of degree
(m1, m2) is an (m1 + n) x (m2 + 1) grid of residues in which every
horizontal length-n window sums to t.  Grid cell (i, j) is column i, row j,
with (0, 0) the lower-left cell; the range vertex is row 0 columns 0..n-1
and the source vertex is row m2 columns m1..m1+n-1.

Composition pastes the two factors into a larger grid and fills the gaps by
repeatedly solving windows with a single unknown cell.  The same filling
schedule is available in vectorised form (:func:`compose_arrays`) for the
exhaustive checks, where whole batches share one hole pattern.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .twograph import Skeleton
from .words import (Word, check_parameters, count_lyndon,
                    divisors)

DEFAULT_VERTEX_LIMIT = 4096
HOLE = None

Degree = Tuple[int, int]


class SizeLimitExceeded(RuntimeError):
    pass


class NotAVertex(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


class CompletionError(ValueError):
    kind = "ERROR"


class Inconsistent(CompletionError):
    kind = "INCONSISTENT"


class Stuck(CompletionError):
    kind = "STUCK"


class NotComposable(ValueError):
    pass


@dataclass(frozen=True)
class BasicData:
    n: int
    q: int
    t: int

    def __post_init__(self):
        check_parameters(self.n, self.q, self.t)

    @property
    def num_vertices(self) -> int:
        return self.q ** (self.n - 1)

    def __str__(self):
        return f"({self.n},{self.q},{self.t})"


def _check_limit(data: BasicData, limit: Optional[int]) -> None:
    if limit is not None and data.num_vertices > limit:
        raise SizeLimitExceeded(
            f"{data} has {data.q}^{data.n - 1} = {data.num_vertices} vertices, "
            f"above the limit {limit}")


# ---------------------------------------------------------------------------
# grids

@dataclass(frozen=True)
class PathRect:
    """A filled grid; ``rows[j][i]`` is cell (i, j)."""
    data: BasicData
    degree: Degree
    rows: Tuple[Tuple[int, ...], ...]

    @property
    def width(self) -> int:
        return self.degree[0] + self.data.n

    def cell(self, i: int, j: int) -> int:
        return self.rows[j][i]

    def range(self) -> Word:
        return Word(self.rows[0][: self.data.n], self.data.q)

    def source(self) -> Word:
        m1, m2 = self.degree
        return Word(self.rows[m2][m1: m1 + self.data.n], self.data.q)

    def sub(self, offset: Degree, degree: Degree) -> "PathRect":
        """The restriction to T(degree) + offset, shifted back to the origin."""
        o1, o2 = offset
        w = degree[0] + self.data.n
        rows = tuple(tuple(self.rows[o2 + j][o1: o1 + w]) for j in range(degree[1] + 1))
        return PathRect(self.data, degree, rows)

    def to_text(self) -> str:
        return format_grid(self.rows, self.data.q)


@dataclass(frozen=True)
class PartialRect:
    data: BasicData
    degree: Degree
    rows: Tuple[Tuple[Optional[int], ...], ...]

    @classmethod
    def empty(cls, data: BasicData, degree: Degree) -> "PartialRect":
        w = degree[0] + data.n
        return cls(data, degree, tuple((HOLE,) * w for _ in range(degree[1] + 1)))


def _check_dims(data: BasicData, degree: Degree, rows) -> None:
    m1, m2 = degree
    if m1 < 0 or m2 < 0:
        raise DimensionMismatch(f"negative degree {degree}")
    if len(rows) != m2 + 1 or any(len(r) != m1 + data.n for r in rows):
        raise DimensionMismatch(
            f"grid shape does not match degree {degree} with n={data.n}")


def validate_path(pr: PathRect) -> bool:
    """True iff every horizontal length-n window sums to t mod q."""
    _check_dims(pr.data, pr.degree, pr.rows)
    n, q, t = pr.data.n, pr.data.q, pr.data.t
    for row in pr.rows:
        if any(not 0 <= x < q for x in row):
            return False
        for l1 in range(pr.degree[0] + 1):
            if sum(row[l1: l1 + n]) % q != t:
                return False
    return True


def validate_shift_window(grid: Sequence[Sequence[int]], q: int, n: int) -> bool:
    """Finite-window test for the trace-zero shift: every full horizontal
    length-n window of ``grid`` sums to 0 mod q."""
    if any(len(row) < n for row in grid):
        raise DimensionMismatch(f"grid rows must have width >= n = {n}")
    for row in grid:
        for l1 in range(len(row) - n + 1):
            if sum(row[l1: l1 + n]) % q:
                return False
    return True


def _fill_schedule(mask: np.ndarray, n: int) -> List[Tuple[int, int, List[int]]]:
    """Order in which holes are determined by single-hole windows.

    ``mask[j, i]`` is True for holes.  Returns ``(j, i, others)`` triples
    where ``others`` are the columns of the window's remaining cells.
    Raises :class:`Stuck` if some hole is never forced.
    """
    rows, width = mask.shape
    holes = mask.copy()
    windows = [(j, l1) for j in range(rows) for l1 in range(width - n + 1)]
    missing = {w: int(holes[w[0], w[1]: w[1] + n].sum()) for w in windows}
    by_cell: Dict[Tuple[int, int], List[Tuple[int, int]]] = {}
    for j, l1 in windows:
        for i in range(l1, l1 + n):
            by_cell.setdefault((j, i), []).append((j, l1))
    work = [w for w in windows if missing[w] == 1]
    schedule = []
    while work:
        j, l1 = work.pop()
        if missing[(j, l1)] != 1:
            continue
        cols = range(l1, l1 + n)
        i = next(c for c in cols if holes[j, c])
        schedule.append((j, i, [c for c in cols if c != i]))
        holes[j, i] = False
        for w in by_cell[(j, i)]:
            missing[w] -= 1
            if missing[w] == 1:
                work.append(w)
    if holes.any():
        j, i = map(int, np.argwhere(holes)[0])
        raise Stuck(f"no single-hole window determines cell ({i}, {j})")
    return schedule


def complete_path(pr: PartialRect) -> PathRect:
    """Fill every hole from windows with one unknown; the completion is unique."""
    data = pr.data
    _check_dims(data, pr.degree, pr.rows)
    n, q, t = data.n, data.q, data.t
    mask = np.array([[x is HOLE for x in row] for row in pr.rows], dtype=bool)
    grid = [[0 if x is HOLE else int(x) for x in row] for row in pr.rows]

    def check_full_windows(holes):
        for j, row in enumerate(grid):
            for l1 in range(len(row) - n + 1):
                if not holes[j, l1: l1 + n].any() and sum(row[l1: l1 + n]) % q != t:
                    raise Inconsistent(
                        f"window at ({l1}, {j}) sums to {sum(row[l1: l1 + n]) % q}, "
                        f"expected {t}")

    check_full_windows(mask)
    for j, i, others in _fill_schedule(mask, n):
        grid[j][i] = (t - sum(grid[j][c] for c in others)) % q
    check_full_windows(np.zeros_like(mask))
    return PathRect(data, pr.degree, tuple(tuple(r) for r in grid))


def identity_path(data: BasicData, v: Word) -> PathRect:
    _require_vertex(data, v)
    return PathRect(data, (0, 0), (tuple(v.symbols),))


def compose(mu: PathRect, nu: PathRect) -> PathRect:
    """The unique path restricting to mu on T(d(mu)) and to nu on T(d(nu)) + d(mu)."""
    if mu.data != nu.data:
        raise NotComposable("paths belong to different domino graphs")
    if mu.source() != nu.range():
        raise NotComposable(f"s(mu)={mu.source()} differs from r(nu)={nu.range()}")
    data = mu.data
    (m1, m2), (p1, p2) = mu.degree, nu.degree
    deg = (m1 + p1, m2 + p2)
    grid = [[HOLE] * (deg[0] + data.n) for _ in range(deg[1] + 1)]
    for j, row in enumerate(mu.rows):
        grid[j][: len(row)] = row
    for j, row in enumerate(nu.rows):
        grid[m2 + j][m1: m1 + len(row)] = row
    return complete_path(PartialRect(data, deg, tuple(map(tuple, grid))))


def factorize(lam: PathRect, m: Degree) -> Tuple[PathRect, PathRect]:
    d1, d2 = lam.degree
    m1, m2 = m
    if not (0 <= m1 <= d1 and 0 <= m2 <= d2):
        raise DimensionMismatch(f"cannot factor degree {lam.degree} at {m}")
    return lam.sub((0, 0), m), lam.sub(m, (d1 - m1, d2 - m2))


# ---------------------------------------------------------------------------
# text fixtures

def format_grid(rows: Sequence[Sequence[int]], q: int) -> str:
    """One line per row, top row first."""
    sep = "" if q <= 10 else ","
    return "\n".join(sep.join(str(x) for x in row) for row in reversed(rows)) + "\n"


def parse_grid(text: str, q: int) -> Tuple[Tuple[int, ...], ...]:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if q <= 10:
        rows = [tuple(int(c) for c in ln) for ln in lines]
    else:
        rows = [tuple(int(c) for c in ln.split(",")) for ln in lines]
    return tuple(reversed(rows))


def path_from_text(text: str, data: BasicData) -> PathRect:
    rows = parse_grid(text, data.q)
    degree = (len(rows[0]) - data.n, len(rows) - 1)
    _check_dims(data, degree, rows)
    return PathRect(data, degree, rows)


# ---------------------------------------------------------------------------
# vertices, sigma and the blue cycles

def _require_vertex(data: BasicData, v: Word) -> None:
    if v.q != data.q or len(v) != data.n or sum(v.symbols) % data.q != data.t:
        raise NotAVertex(f"{v} is not a vertex of Lambda{data}")


def vertices(data: BasicData, limit: Optional[int] = DEFAULT_VERTEX_LIMIT) -> List[Word]:
    _check_limit(data, limit)
    n, q, t = data.n, data.q, data.t
    out = []
    for prefix in itertools.product(range(q), repeat=n - 1):
        out.append(Word(prefix + ((t - sum(prefix)) % q,), q))
    return out


def vertex_index(data: BasicData, v: Word) -> int:
    """Position of v in the lexicographic vertex list."""
    _require_vertex(data, v)
    idx = 0
    for s in v.symbols[:-1]:
        idx = idx * data.q + s
    return idx


def vertex_array(data: BasicData, limit: Optional[int] = DEFAULT_VERTEX_LIMIT) -> np.ndarray:
    """``(q**(n-1), n)`` array of vertex words in lexicographic order."""
    _check_limit(data, limit)
    n, q, t = data.n, data.q, data.t
    N = data.num_vertices
    V = np.empty((N, n), dtype=np.int64)
    idx = np.arange(N, dtype=np.int64)
    for k in range(n - 2, -1, -1):
        V[:, k] = idx % q
        idx //= q
    V[:, n - 1] = (t - V[:, : n - 1].sum(axis=1)) % q
    return V


def _prefix_index(W: np.ndarray, q: int) -> np.ndarray:
    idx = np.zeros(len(W), dtype=np.int64)
    for k in range(W.shape[1] - 1):
        idx = idx * q + W[:, k]
    return idx


def blue_edge(data: BasicData, v: Word) -> PathRect:
    """The unique degree-(1, 0) path with range v."""
    _require_vertex(data, v)
    partial = PartialRect(data, (1, 0), (tuple(v.symbols) + (HOLE,),))
    return complete_path(partial)


def red_edge(data: BasicData, rng: Word, src: Word) -> PathRect:
    """The degree-(0, 1) path from src to rng (one exists for every pair)."""
    _require_vertex(data, rng)
    _require_vertex(data, src)
    return PathRect(data, (0, 1), (tuple(rng.symbols), tuple(src.symbols)))


def sigma(data: BasicData, v: Word) -> Word:
    """Source of the unique blue edge with range v."""
    return blue_edge(data, v).source()


def sigma_permutation(data: BasicData,
                      limit: Optional[int] = DEFAULT_VERTEX_LIMIT) -> np.ndarray:
    """Vertex index of sigma(v) for every vertex index v.

    Vectorised form of :func:`sigma`: the blue edge with range v has the
    extra cell t - (v_1 + ... + v_{n-1}), and its source is cells 1..n.
    """
    V = vertex_array(data, limit)
    q, t, n = data.q, data.t, data.n
    ext = (t - V[:, 1:].sum(axis=1)) % q
    src = np.concatenate([V[:, 1:], ext[:, None]], axis=1)
    assert src.shape[1] == n
    return _prefix_index(src, q)


def sigma_order(data: BasicData) -> int:
    if data.n == 1 or (data.n, data.q, data.t) == (2, 2, 0):
        return 1
    return data.n


def sigma_cycles(data: BasicData,
                 limit: Optional[int] = DEFAULT_VERTEX_LIMIT) -> List[List[int]]:
    """Cycles of sigma (equivalently the blue cycles), by walking orbits."""
    perm = sigma_permutation(data, limit).tolist()
    seen = [False] * len(perm)
    cycles = []
    for v in range(len(perm)):
        if seen[v]:
            continue
        cyc = []
        while not seen[v]:
            seen[v] = True
            cyc.append(v)
            v = perm[v]
        cycles.append(cyc)
    return cycles


def blue_cycle_counts(data: BasicData) -> Dict[int, int]:
    """Number h_d of blue cycles of each length d dividing n (closed form).

    A cycle of length d is a necklace with Lyndon subword b of length d and
    (n/d) * trace(b) = t, so h_d sums Lyndon counts over those traces.
    """
    n, q, t = data.n, data.q, data.t
    return {d: sum(count_lyndon(d, q, s) for s in range(q) if ((n // d) * s - t) % q == 0)
            for d in divisors(n)}


def blue_cycle_counts_by_orbits(data: BasicData,
                                limit: Optional[int] = DEFAULT_VERTEX_LIMIT) -> Dict[int, int]:
    lengths = Counter(len(c) for c in sigma_cycles(data, limit))
    return {d: lengths.get(d, 0) for d in divisors(data.n)}


def is_product_graph(data: BasicData) -> Tuple[bool, Optional[str]]:
    """Whether Lambda(n, q, t) is a product of two 1-graphs.

    This happens exactly when sigma is the identity, i.e. every vertex
    carries a blue loop, i.e. every vertex is a constant word.  Then the
    graph is K1 x K_N with N the vertex count.
    """
    n, q, t = data.n, data.q, data.t
    constant_vertices = sum(1 for a in range(q) if (n * a - t) % q == 0)
    if constant_vertices != data.num_vertices:
        return False, None
    return True, f"K1 x K{data.num_vertices}"


# ---------------------------------------------------------------------------
# the skeleton

def build_skeleton(data: BasicData,
                   limit: Optional[int] = DEFAULT_VERTEX_LIMIT,
                   labels: bool = True) -> Skeleton:
    """Skeleton of Lambda(n, q, t) with its commuting squares.

    Vertex and blue-edge ids are lexicographic vertex indices (blue edge v
    has range v).  The red edge with range a and source b has id a*N + b.
    The square on red edge (a <- b) is the degree-(1,1) grid whose rows are
    a and b extended by one cell: its factorisations are
    blue(a) . red(sigma a <- sigma b)  =  red(a <- b) . blue(b).
    """
    N = data.num_vertices
    _check_limit(data, limit)
    # int32 keeps the N^2-sized arrays small; ids stay below 2^31 at any sane limit
    sig = sigma_permutation(data, limit).astype(np.int32)
    ids = np.arange(N, dtype=np.int32)
    a = np.repeat(ids, N)
    b = np.tile(ids, N)
    NN = np.int32(N)
    names = tuple(str(w) for w in vertices(data, limit)) if labels else None
    return Skeleton(
        N,
        blue_src=sig, blue_rng=ids,
        red_src=b, red_rng=a,
        sq_g=a, sq_h=sig[a] * NN + sig[b],
        sq_e=a * NN + b, sq_f=b,
        labels=names,
    )


def red_edge_id(data: BasicData, rng: int, src: int) -> int:
    return rng * data.num_vertices + src


def square_of_path(lam: PathRect) -> Tuple[int, int, int, int]:
    """Skeleton ids (g, h, e, f) of the two factorisations of a degree-(1,1) path."""
    if lam.degree != (1, 1):
        raise DimensionMismatch("commuting squares have degree (1, 1)")
    data = lam.data
    g, h = factorize(lam, (1, 0))
    e, f = factorize(lam, (0, 1))

    def red_id(p):
        return red_edge_id(data, vertex_index(data, p.range()),
                           vertex_index(data, p.source()))

    return (vertex_index(data, g.range()), red_id(h),
            red_id(e), vertex_index(data, f.range()))


# ---------------------------------------------------------------------------
# batched path algebra for exhaustive checks

def enumerate_paths_array(data: BasicData, degree: Degree,
                          limit: Optional[int] = DEFAULT_VERTEX_LIMIT) -> np.ndarray:
    """Every path of the given degree as a ``(count, rows, width)`` array.

    Each row is seeded with a vertex in its first n cells; the remaining
    cells are filled by the window schedule.
    """
    m1, m2 = degree
    n, q, t = data.n, data.q, data.t
    V = vertex_array(data, limit)
    N = len(V)
    width = m1 + n
    choice = np.array(list(itertools.product(range(N), repeat=m2 + 1)),
                      dtype=np.int64).reshape(-1, m2 + 1)
    out = np.zeros((len(choice), m2 + 1, width), dtype=np.int64)
    mask = np.ones((m2 + 1, width), dtype=bool)
    for j in range(m2 + 1):
        out[:, j, :n] = V[choice[:, j]]
        mask[j, :n] = False
    _apply_schedule(out, mask, n, q, t)
    return out


def _apply_schedule(grids: np.ndarray, mask: np.ndarray, n: int, q: int, t: int) -> None:
    for j, i, others in _fill_schedule(mask, n):
        grids[:, j, i] = (t - grids[:, j, others].sum(axis=1)) % q


def validate_arrays(grids: np.ndarray, data: BasicData) -> np.ndarray:
    """Per-grid window check for a ``(count, rows, width)`` batch."""
    n, q, t = data.n, data.q, data.t
    width = grids.shape[2]
    ok = np.all((grids >= 0) & (grids < q), axis=(1, 2))
    for l1 in range(width - n + 1):
        ok &= np.all(grids[:, :, l1: l1 + n].sum(axis=2) % q == t, axis=1)
    return ok


def factorize_arrays(grids: np.ndarray, n: int, m: Degree):
    m1, m2 = m
    mu = grids[:, : m2 + 1, : m1 + n]
    nu = grids[:, m2:, m1:]
    return mu, nu


def compose_arrays(mus: np.ndarray, nus: np.ndarray, data: BasicData) -> np.ndarray:
    """Batch composition of aligned pairs (caller guarantees composability)."""
    n = data.n
    count, r1, w1 = mus.shape
    _, r2, w2 = nus.shape
    m1, m2 = w1 - n, r1 - 1
    deg = (m1 + w2 - n, m2 + r2 - 1)
    out = np.zeros((count, deg[1] + 1, deg[0] + n), dtype=np.int64)
    mask = np.ones(out.shape[1:], dtype=bool)
    out[:, : r1, : w1] = mus
    mask[: r1, : w1] = False
    out[:, m2:, m1:] = nus
    mask[m2:, m1:] = False
    _apply_schedule(out, mask, n, data.q, data.t)
    return out


def source_index_arrays(grids: np.ndarray, data: BasicData) -> np.ndarray:
    rows, width = grids.shape[1:]
    m1 = width - data.n
    return _prefix_index(grids[:, rows - 1, m1:], data.q)


def range_index_arrays(grids: np.ndarray, data: BasicData) -> np.ndarray:
    return _prefix_index(grids[:, 0, : data.n], data.q)


def _sorted_grid_codes(grids: np.ndarray, q: int) -> np.ndarray:
    """Exact integer codes of a batch of grids, rows sorted lexicographically.

    Cells are packed base q into as many int64 columns as needed.
    """
    flat = grids.reshape(len(grids), -1)
    per_chunk = max(1, int(62 // np.log2(q)))
    cols = []
    for start in range(0, flat.shape[1], per_chunk):
        code = np.zeros(len(flat), dtype=np.int64)
        for k in range(start, min(start + per_chunk, flat.shape[1])):
            code = code * q + flat[:, k]
        cols.append(code)
    codes = np.stack(cols, axis=1)
    order = np.lexsort(codes.T[::-1])
    return codes[order]


DEFAULT_PATH_LIMIT = 2**18


def path_count(data: BasicData, degree: Degree) -> int:
    """Paths of a degree: each of the m2 + 1 rows is fixed by its first n cells."""
    return data.num_vertices ** (degree[1] + 1)


def check_unique_factorisation(data: BasicData, max_degree: Degree = (2, 2),
                               limit: Optional[int] = 64,
                               path_limit: Optional[int] = DEFAULT_PATH_LIMIT
                               ) -> Dict[str, int]:
    """Exhaustive factorisation check for every degree up to ``max_degree``.

    For each degree d and each m <= d: every path splits into valid
    factors that compose back to it, and composing every composable pair of
    degrees (m, d - m) yields each path of degree d exactly once.
    Returns counts of checked paths and failures.
    """
    _check_limit(data, limit)
    biggest = path_count(data, max_degree)
    if path_limit is not None and biggest > path_limit:
        raise SizeLimitExceeded(
            f"{biggest} paths of degree {max_degree} in {data} exceed the path limit {path_limit}")
    stats = Counter()
    cache: Dict[Degree, np.ndarray] = {}

    def paths(deg):
        if deg not in cache:
            cache[deg] = enumerate_paths_array(data, deg, limit)
        return cache[deg]

    n = data.n
    for d in itertools.product(range(max_degree[0] + 1), range(max_degree[1] + 1)):
        lam = paths(d)
        stats["paths"] += len(lam)
        if not validate_arrays(lam, data).all():
            stats["invalid_enumerated"] += 1
        for m in itertools.product(range(d[0] + 1), range(d[1] + 1)):
            rest = (d[0] - m[0], d[1] - m[1])
            mu, nu = factorize_arrays(lam, n, m)
            stats["factorisations"] += len(lam)
            if not (validate_arrays(mu, data).all() and validate_arrays(nu, data).all()):
                stats["invalid_factor"] += 1
            if not np.array_equal(compose_arrays(mu, nu, data), lam):
                stats["compose_factorize_mismatch"] += 1
            # uniqueness: composable pairs biject onto paths of degree d
            left, right = paths(m), paths(rest)
            s_left = source_index_arrays(left, data)
            r_right = range_index_arrays(right, data)
            order = np.argsort(r_right, kind="stable")
            counts = np.bincount(r_right, minlength=data.num_vertices)
            starts = np.concatenate([[0], np.cumsum(counts)])
            li = np.repeat(np.arange(len(left)), counts[s_left])
            offs = np.arange(len(li)) - np.repeat(
                np.concatenate([[0], np.cumsum(counts[s_left])[:-1]]), counts[s_left])
            ri = order[starts[s_left[li]] + offs]
            if len(li) != len(lam):
                stats["pair_count_mismatch"] += 1
                continue
            prod = compose_arrays(left[li], right[ri], data)
            got = _sorted_grid_codes(prod, data.q)
            if (np.any(np.all(got[1:] == got[:-1], axis=1))
                    or not np.array_equal(got, _sorted_grid_codes(lam, data.q))):
                stats["non_unique_factorisation"] += 1
            back_mu, back_nu = factorize_arrays(prod, n, m)
            if not (np.array_equal(back_mu, left[li]) and np.array_equal(back_nu, right[ri])):
                stats["factorize_compose_mismatch"] += 1
    return dict(stats)


