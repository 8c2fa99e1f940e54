import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dominograph.domino import BasicData, build_skeleton
from dominograph.twograph import (ColouredGraphMorphism, DegreeOutOfRange, Skeleton,
                                  check_axioms, compose_morphisms, count_paths,
                                  enumerate_rectangles, from_json_dict, invert_morphism,
                                  is_isomorphism, to_dot, to_json, to_json_dict)


def sk320():
    return build_skeleton(BasicData(3, 2, 0))


def torus():
    """One vertex, one blue loop, one red loop, one square."""
    return Skeleton.from_edges(1, [(0, 0)], [(0, 0)], {(0, 0): (0, 0)})


def relabel(sk, vp, bp, rp):
    """Transport sk along vertex/blue/red permutations (new id = p[old id])."""
    vp, bp, rp = map(np.asarray, (vp, bp, rp))
    bi, ri = np.argsort(bp), np.argsort(rp)
    return Skeleton(
        sk.num_vertices,
        blue_src=vp[sk.blue_src[bi]], blue_rng=vp[sk.blue_rng[bi]],
        red_src=vp[sk.red_src[ri]], red_rng=vp[sk.red_rng[ri]],
        sq_g=bp[sk.sq_g], sq_h=rp[sk.sq_h], sq_e=rp[sk.sq_e], sq_f=bp[sk.sq_f])


def test_domino_skeleton_passes():
    rep = check_axioms(sk320())
    assert rep.ok and rep.violations == []


def test_torus_passes():
    assert check_axioms(torus()).ok


def test_deleted_square_is_missing_key():
    sk = sk320()
    keep = np.arange(1, sk.num_squares)
    bad = sk.with_squares(sk.sq_g[keep], sk.sq_h[keep], sk.sq_e[keep], sk.sq_f[keep])
    rep = check_axioms(bad)
    assert not rep.ok
    assert "missing blue-red key" in rep.counts
    assert "missing red-blue value" in rep.counts


def test_swapped_squares_mismatch_endpoints():
    sk = sk320()
    # swap the red-blue values of two squares whose keys start at different vertices
    i = 0
    j = int(np.flatnonzero(sk.blue_rng[sk.sq_g] != sk.blue_rng[sk.sq_g[0]])[0])
    e, f = sk.sq_e.copy(), sk.sq_f.copy()
    e[[i, j]] = e[[j, i]]
    f[[i, j]] = f[[j, i]]
    rep = check_axioms(sk.with_squares(sk.sq_g, sk.sq_h, e, f))
    assert not rep.ok
    assert "square endpoint mismatch" in rep.counts


def test_duplicate_key_reported():
    sk = sk320()
    h = sk.sq_h.copy()
    # reuse square 1's key in square 0 (both keys start at vertex 0)
    h[0] = h[1]
    rep = check_axioms(sk.with_squares(sk.sq_g, h, sk.sq_e, sk.sq_f))
    assert "duplicate blue-red key" in rep.counts
    assert "missing blue-red key" in rep.counts


def test_out_of_range_references():
    sk = sk320()
    g = sk.sq_g.copy()
    g[3] = 99
    rep = check_axioms(sk.with_squares(g, sk.sq_h, sk.sq_e, sk.sq_f))
    assert rep.counts == {"square references unknown edge": 1}
    bad_edge = Skeleton.from_edges(1, [(0, 1)], [(0, 0)], {})
    assert not check_axioms(bad_edge).ok


def test_report_to_dict_is_json():
    rep = check_axioms(sk320())
    assert json.loads(json.dumps(rep.to_dict())) == {"ok": True, "violations": [],
                                                     "counts": {}}


def test_identity_is_isomorphism():
    for sk in (sk320(), torus(), build_skeleton(BasicData(2, 3, 1))):
        assert is_isomorphism(ColouredGraphMorphism.identity(sk), sk, sk)


def test_non_injective_vertex_map_rejected():
    sk = sk320()
    m = ColouredGraphMorphism(np.zeros(sk.num_vertices, dtype=int),
                              np.arange(sk.num_blue), np.arange(sk.num_red))
    assert not is_isomorphism(m, sk, sk)


def test_square_scrambling_detected():
    sk = sk320()
    other = sk.with_squares(sk.sq_g, sk.sq_h, sk.sq_e[::-1].copy(), sk.sq_f[::-1].copy())
    assert not is_isomorphism(ColouredGraphMorphism.identity(sk), sk, other)


def _random_perm(data, size):
    return np.asarray(data.draw(st.permutations(list(range(size)))))


@settings(max_examples=30)
@given(st.data())
def test_relabellings_compose_and_invert(data):
    base = build_skeleton(BasicData(*data.draw(st.sampled_from(
        [(3, 2, 0), (3, 2, 1), (2, 3, 2), (4, 2, 1)]))))
    perms = []
    sks = [base]
    for _ in range(2):
        vp = _random_perm(data, base.num_vertices)
        # blue edges and red edges must follow the vertices; pick edge ids freely
        bp = _random_perm(data, base.num_blue)
        rp = _random_perm(data, base.num_red)
        perms.append(ColouredGraphMorphism(vp, bp, rp))
        sks.append(relabel(sks[-1], vp, bp, rp))
    m1, m2 = perms
    assert is_isomorphism(m1, sks[0], sks[1])
    assert is_isomorphism(m2, sks[1], sks[2])
    assert is_isomorphism(compose_morphisms(m2, m1), sks[0], sks[2])
    assert is_isomorphism(invert_morphism(m1), sks[1], sks[0])
    assert check_axioms(sks[2]).ok


@pytest.mark.parametrize("params", [(3, 2, 0), (2, 3, 1), (4, 2, 1), (1, 3, 2)])
def test_count_paths_small_degrees(params):
    d = BasicData(*params)
    sk = build_skeleton(d)
    N = d.num_vertices
    for v in range(N):
        assert count_paths(sk, (0, 0), v) == 1
        assert count_paths(sk, (1, 0), v) == 1
        assert count_paths(sk, (0, 1), v) == N


@pytest.mark.parametrize("params", [(3, 2, 0), (3, 2, 1), (2, 3, 0), (2, 2, 0), (1, 2, 1)])
def test_pasting_order_independent(params):
    d = BasicData(*params)
    sk = build_skeleton(d)
    for deg in [(1, 1), (2, 1), (1, 2), (2, 2), (3, 1)]:
        for v in range(sk.num_vertices):
            a = set(enumerate_rectangles(sk, deg, v, "blue-red"))
            b = set(enumerate_rectangles(sk, deg, v, "red-blue"))
            assert a == b
            # every rectangle is fixed by its range and one vertex per extra red row
            assert len(a) == d.num_vertices ** deg[1]


def test_rectangle_edges_are_coherent():
    sk = sk320()
    for rect in enumerate_rectangles(sk, (2, 2), 1):
        for j, row in enumerate(rect.blue):
            for i in range(len(row) - 1):
                assert sk.blue_src[row[i]] == sk.blue_rng[row[i + 1]]
        for col in rect.red:
            for j in range(len(col) - 1):
                assert sk.red_src[col[j]] == sk.red_rng[col[j + 1]]


def test_degree_bound():
    with pytest.raises(DegreeOutOfRange):
        count_paths(sk320(), (5, 0), 0)
    with pytest.raises(DegreeOutOfRange):
        count_paths(sk320(), (5, 0), 0, bound=(4, 4))
    assert count_paths(sk320(), (5, 0), 0, bound=(5, 5)) == 1


def test_dot_export_styles():
    dot = to_dot(build_skeleton(BasicData(1, 2, 0)))
    assert dot.count("style=solid") == 1
    assert dot.count("style=dashed") == 1
    assert dot.startswith("digraph") and dot.rstrip().endswith("}")


def test_json_round_trip():
    sk = build_skeleton(BasicData(3, 3, 2))
    doc = json.loads(to_json(sk))
    assert set(doc) >= {"vertices", "blue_edges", "red_edges", "squares"}
    back = from_json_dict(doc)
    assert back.square_map() == sk.square_map()
    assert to_json_dict(back) == to_json_dict(sk)
    assert check_axioms(back).ok
