from __future__ import annotations

import json
import math

import numpy as np
import pytest
from scipy.spatial import cKDTree

import oracles
from quasiperc.errors import InvalidParameterError, ResourceLimitError
from quasiperc.lattice import (
    Family,
    LatticePatch,
    build_ammann_beenker,
    build_patch,
    build_penrose,
    build_square,
    center_vertex,
    classify_vertices,
    hop_distances,
    interior_classes,
    is_connected,
    make_zone,
)

# frozen from the independent substitution oracle in tests/oracles.py
AB_COUNTS = {0: (25, 40), 1: (113, 200), 2: (601, 1144), 3: (3361, 6584), 4: (19257, 38184)}
PENROSE_COUNTS = {0: (11, 15), 1: (21, 30), 2: (51, 85), 3: (126, 220), 4: (306, 565), 5: (766, 1460)}
SILVER = 1 + math.sqrt(2)
PHI = (1 + math.sqrt(5)) / 2


def _all_patches():
    yield build_square(7)
    for it in range(4):
        yield build_ammann_beenker(it)
    for it in range(6):
        yield build_penrose(it)


# --- square ------------------------------------------------------------------

@pytest.mark.parametrize("n, verts, edges", [(1, 1, 0), (2, 4, 4), (3, 9, 12), (65, 4225, 8320)])
def test_square_counts(n, verts, edges):
    p = build_square(n)
    assert (p.n_vertices, p.n_edges) == (verts, edges)
    assert p.n_edges == 2 * n * (n - 1)


@pytest.mark.parametrize("n", [0, -3])
def test_square_rejects_nonpositive(n):
    with pytest.raises(InvalidParameterError):
        build_square(n)


def test_square_positions_are_integer_grid():
    p = build_square(4)
    assert np.array_equal(p.positions, np.round(p.positions))
    assert set(map(tuple, p.positions.astype(int).tolist())) == {(x, y) for x in range(4) for y in range(4)}


# --- substitution tilings ------------------------------------------------------

@pytest.mark.parametrize("it", range(4))
def test_ab_counts_match_oracle(it):
    assert oracles.ab_counts(it) == AB_COUNTS[it]
    p = build_ammann_beenker(it)
    assert (p.n_vertices, p.n_edges) == AB_COUNTS[it]


@pytest.mark.parametrize("it", range(6))
def test_penrose_counts_match_oracle(it):
    assert oracles.penrose_counts(it) == PENROSE_COUNTS[it]
    p = build_penrose(it)
    assert (p.n_vertices, p.n_edges) == PENROSE_COUNTS[it]


def test_penrose_seed_is_sun():
    assert oracles.sun_counts() == (11, 15)
    p = build_penrose(0)
    assert (p.n_vertices, p.n_edges) == (11, 15)
    assert sorted(p.degrees.tolist()).count(5) == 1


def _same_point_sets(a: np.ndarray, b: np.ndarray) -> bool:
    if len(a) != len(b):
        return False
    d, _ = cKDTree(b).query(a)
    return bool(d.max() < 1e-6)


def test_ab_positions_match_oracle():
    assert _same_point_sets(build_ammann_beenker(2).positions,
                            oracles.points_from_segments(oracles.ab_segments(2)))


def test_penrose_positions_match_oracle():
    assert _same_point_sets(build_penrose(3).positions,
                            oracles.points_from_segments(oracles.penrose_segments(3)))


@pytest.mark.parametrize("patch", list(_all_patches()), ids=lambda p: f"{p.family.value}-{p.n_vertices}")
def test_patch_invariants(patch):
    lengths = patch.edge_lengths()
    assert np.max(np.abs(lengths - 1.0)) < 1e-6
    assert np.all(patch.edges[:, 0] < patch.edges[:, 1])
    assert len({tuple(e) for e in patch.edges.tolist()}) == patch.n_edges
    pairs = cKDTree(patch.positions).query_pairs(1e-6)
    assert not pairs
    assert is_connected(patch)
    assert np.all(hop_distances(patch, 0) >= 0)


@pytest.mark.parametrize("build, lo, hi, its", [
    (build_ammann_beenker, 3, 8, range(4)),
    (build_penrose, 3, 7, range(6)),
])
def test_interior_degree_bounds(build, lo, hi, its):
    for it in its:
        for c in classify_vertices(build(it)):
            if c.interior:
                assert lo <= c.degree <= hi


def test_square_interior_degree_is_four():
    for c in classify_vertices(build_square(6)):
        if c.interior:
            assert c.degree == 4


@pytest.mark.parametrize("build, ratio, its", [
    (build_ammann_beenker, SILVER, range(3)),
    (build_penrose, PHI, range(5)),
])
def test_substitution_nesting(build, ratio, its):
    for it in its:
        small, big = build(it), build(it + 1)
        d, _ = big.kdtree.query(small.positions * ratio)
        assert d.max() < 1e-6


def test_iteration_caps():
    with pytest.raises(ResourceLimitError):
        build_ammann_beenker(3, max_iterations=2)
    with pytest.raises(ResourceLimitError):
        build_penrose(20)
    with pytest.raises(InvalidParameterError):
        build_ammann_beenker(-1)


def test_generation_params_recorded():
    p = build_ammann_beenker(1)
    assert p.generation_params["iterations"] == 1
    assert p.generation_params["dedup_tol"] == 1e-6
    assert build_patch("penrose", iterations=2).generation_params["seed"] == "penrose-sun"


def test_family_aliases():
    assert Family.parse("AB") is Family.AMMANN_BEENKER
    assert Family.parse("ammann_beenker") is Family.AMMANN_BEENKER
    with pytest.raises(ValueError):
        Family.parse("hexagonal")


# --- classification ----------------------------------------------------------

def test_classify_square_3():
    p = build_square(3)
    classes = classify_vertices(p)
    assert classes[4].degree == 4 and classes[4].interior
    assert classes[4].label == "SQ:d4:s(90,90,90,90)"
    for corner in (0, 2, 6, 8):
        assert classes[corner].degree == 2
        assert classes[corner].label == "boundary:2"
    assert list(interior_classes(classes)) == ["SQ:d4:s(90,90,90,90)"]


@pytest.mark.parametrize("build, it, oracle", [
    (build_ammann_beenker, 2, oracles.ab_interior_signatures),
    (build_ammann_beenker, 3, oracles.ab_interior_signatures),
    (build_penrose, 3, oracles.penrose_interior_signatures),
    (build_penrose, 5, oracles.penrose_interior_signatures),
])
def test_interior_signatures_match_oracle(build, it, oracle):
    classes = classify_vertices(build(it))
    ours = {c.star_signature for c in classes if c.interior}
    assert ours == oracle(it)
    assert len(interior_classes(classes)) == len(ours)


def test_classify_invariants_and_determinism():
    p = build_penrose(4)
    a, b = classify_vertices(p), classify_vertices(p)
    assert a == b
    by_sig: dict = {}
    for c in a:
        assert c.degree == len(c.star_signature)
        assert sum(c.star_signature) == 360 or c.degree <= 1
        if c.interior:
            by_sig.setdefault(c.star_signature, set()).add(c.label)
            assert c.label.startswith("P:")
        else:
            assert c.label == f"boundary:{c.degree}"
    assert all(len(labels) == 1 for labels in by_sig.values())


def test_ab_label_format():
    labels = interior_classes(classify_vertices(build_ammann_beenker(3)))
    assert "AB:d8:s(45,45,45,45,45,45,45,45)" in labels
    assert "AB:d5:s(45,45,90,90,90)" in labels


# --- hop zones -----------------------------------------------------------------

def test_hop_path_graph():
    p = LatticePatch(Family.SQUARE, [[0, 0], [1, 0], [2, 0]], [[0, 1], [1, 2]])
    assert hop_distances(p, 0).tolist() == [0, 1, 2]


def test_hop_square_corner():
    p = build_square(5)
    assert hop_distances(p, 12)[0] == 4


@pytest.mark.parametrize("origin", [0, 17, 63, 125])
def test_hop_matches_naive_bfs(origin):
    p = build_penrose(3)
    assert hop_distances(p, origin).tolist() == oracles.naive_bfs(p.n_vertices, p.edges, origin)


def test_hop_adjacent_differ_by_at_most_one():
    p = build_ammann_beenker(2)
    d = hop_distances(p, center_vertex(p))
    assert np.all(np.abs(d[p.edges[:, 0]] - d[p.edges[:, 1]]) <= 1)


def test_zone_radius_zero_and_diameter():
    p = build_square(6)
    z0 = make_zone(p, 14, 0)
    assert z0.size == 1 and z0.inside[14]
    assert make_zone(p, 14, 10).size == p.n_vertices


def test_zone_100_radius_40_matches_bfs():
    p = build_square(100)
    v = center_vertex(p)
    ref = np.array(oracles.naive_bfs(p.n_vertices, p.edges, v))
    zone = make_zone(p, v, 40)
    assert zone.size == int(np.sum(ref <= 40))
    assert np.array_equal(zone.inside, ref <= 40)


def test_zone_monotone_on_shortest_paths():
    p = build_penrose(4)
    v = center_vertex(p)
    zone = make_zone(p, v, 5)
    d = hop_distances(p, v)
    # every inside vertex other than the origin has an inside neighbour one hop closer
    for w in np.flatnonzero(zone.inside):
        if w != v:
            assert any(zone.inside[u] and d[u] == d[w] - 1 for u in p.neighbors[w])


def test_zone_rejects_negative_radius():
    with pytest.raises(InvalidParameterError):
        make_zone(build_square(3), 0, -1)


def test_zone_is_read_only():
    z = make_zone(build_square(3), 4, 1)
    with pytest.raises(ValueError):
        z.inside[0] = True


# --- center ----------------------------------------------------------------------

def test_center_square_and_single():
    assert center_vertex(build_square(3)) == 4
    assert center_vertex(build_square(1)) == 0


def test_center_square_tie_lowest_id():
    # 2x2: all four vertices are equidistant from the centroid
    assert center_vertex(build_square(2)) == 0


@pytest.mark.parametrize("build, it, degree", [(build_ammann_beenker, 3, 8), (build_penrose, 4, 5)])
def test_center_of_symmetric_patches(build, it, degree):
    p = build(it)
    v = center_vertex(p)
    centroid = p.positions.mean(axis=0)
    assert np.linalg.norm(p.positions[v] - centroid) < 1e-9
    assert np.allclose(p.positions[v], 0.0, atol=1e-9)
    assert p.degrees[v] == degree


# --- JSON --------------------------------------------------------------------------

@pytest.mark.parametrize("patch", [build_square(4), build_ammann_beenker(2), build_penrose(3)],
                         ids=["square", "ab", "penrose"])
def test_json_round_trip_bit_exact(patch):
    labels = [c.label for c in classify_vertices(patch)]
    text = patch.to_json(labels)
    doc = json.loads(text)
    assert set(doc) == {"family", "generation_params", "vertices", "edges", "classes"}
    assert doc["classes"] == labels
    back = LatticePatch.from_json(text)
    assert back.family is patch.family
    assert np.array_equal(back.positions.view(np.uint64), patch.positions.view(np.uint64))
    assert np.array_equal(back.edges, patch.edges)
    assert back.generation_params == patch.generation_params
    assert back.to_json(labels) == text
