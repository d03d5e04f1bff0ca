import math

import pytest

from oneturn import (
    CapabilityError,
    Cell,
    GeneralizedNeighborhood,
    GeometryError,
    HalfPlane,
    InputError,
    LINE_SPACING,
    OrientedArc,
    Partition,
    PartitionError,
    PreconditionError,
    StandardQuadraticDomain,
    Strip,
    partition_from_json,
    partition_to_json,
    product_partition,
    pullback_partition,
    regularity_report,
    repartition_uniform,
    standard_partition,
    strip_partition_from_levels,
    translation,
    trivial_partition,
)
from oneturn.partitions import METRIC_BALL, line_height

from .corpus import clustered_partition


def _poly(arc_id, pts, left="L", right="R"):
    return OrientedArc(arc_id, left, right, "polyline", points=tuple(pts))


def _poly_partition(arcs, singular, eps0=10.0):
    return Partition(
        total_domain=HalfPlane(-1e9),
        cells=(Cell("L"), Cell("R")),
        arcs=tuple(arcs),
        singular_points=tuple(singular),
        neighborhood=GeneralizedNeighborhood(eps0, METRIC_BALL),
        kind="polyline",
    )


def test_standard_partition_layout():
    p = standard_partition(0.0)
    assert p.kind == "strips"
    assert len(p.arcs) == 16
    assert len(p.cells) == 17
    assert p.uniformity_constant() == math.inf
    ys = sorted(a.y for a in p.arcs)
    assert abs(ys[8] - LINE_SPACING) < 1e-15
    assert abs(ys[7] + LINE_SPACING) < 1e-15
    assert line_height(2) == 2 * LINE_SPACING
    with pytest.raises(InputError):
        line_height(0)


def test_standard_partition_cell_queries():
    p = standard_partition(1.0)
    assert p.cell_of(5 + 0j) == "strip_0"
    assert p.cell_of(5 + 1j * (LINE_SPACING * 1.5)) == "strip_1"
    assert p.cell_of(5 - 1j * (LINE_SPACING * 1.5)) == "strip_-1"
    assert p.cell_of(5 + 1j * LINE_SPACING) is None
    near = LINE_SPACING + 0.1 * LINE_SPACING
    assert p.cell_contains("strip_0", 5 + 1j * near, eps=0.2 * LINE_SPACING)
    with pytest.raises(InputError):
        p.cell_contains("strip_0", 5.0, eps=10 * LINE_SPACING)


def test_strip_levels_validation():
    dom = HalfPlane(0.0)
    assert strip_partition_from_levels(dom, [], 0.5).kind == "trivial"
    with pytest.raises(PartitionError):
        strip_partition_from_levels(dom, [1.0, 1.0], 0.5)
    p = strip_partition_from_levels(dom, [2.0, -2.0], 0.5)
    assert [a.arc_id for a in p.arcs] == ["y_0", "y_1"]
    assert p.cell_of(0.5 + 0j) == "strip_0"


def test_trivial_partition_basics():
    p = trivial_partition(HalfPlane(2.0))
    assert p.cell_of(100 + 50j) == "whole"
    assert p.boundary_distance(3 + 0j) == math.inf


def test_product_of_strip_partitions():
    dom = HalfPlane(0.0)
    p = strip_partition_from_levels(dom, [1.0], 0.5)
    q = strip_partition_from_levels(dom, [-1.0, 1.0 + 1e-15], 0.5)
    prod = product_partition(p, q)
    assert len(prod.arcs) == 2  # the near-duplicate level merges
    assert product_partition(p, trivial_partition(dom)) is p
    with pytest.raises(PartitionError):
        product_partition(p, strip_partition_from_levels(HalfPlane(5.0), [1.0], 0.5))


def test_product_rejects_polyline_families():
    poly = _poly_partition([_poly("a", [0, 1 + 1j])], [])
    with pytest.raises(PartitionError):
        product_partition(poly, poly)


def test_partition_validation():
    with pytest.raises(PartitionError):
        Partition(total_domain=HalfPlane(0.0), cells=(), arcs=())
    with pytest.raises(PartitionError):
        Partition(
            total_domain=HalfPlane(0.0),
            cells=(Cell("a"), Cell("a")),
            arcs=(),
        )
    with pytest.raises(PartitionError):
        Partition(
            total_domain=HalfPlane(0.0),
            cells=(Cell("a"),),
            arcs=(_poly("arc", [0, 1], left="a", right="missing"),),
        )


def test_arc_geometry():
    ray = OrientedArc("r", "L", "R", "hline", x_start=2.0, y=1.0)
    assert ray.point(0.0) == 2 + 1j
    assert ray.point(0.5) == 3 + 1j
    assert ray.unbounded
    with pytest.raises(InputError):
        ray.point(1.0)
    assert abs(ray.distance_to(5 + 3j) - 2.0) < 1e-12

    seg = _poly("s", [0, 2, 2 + 2j])
    assert seg.point(0.25) == 1 + 0j
    assert seg.point(1.0) == 2 + 2j
    assert abs(seg.distance_to(1 + 1j) - 1.0) < 1e-12

    circ = OrientedArc("c", "L", "R", "circle", center=1j, radius=2.0)
    assert abs(circ.point(0.0) - (2 + 1j)) < 1e-12
    assert abs(circ.distance_to(1j) - 2.0) < 1e-12


def test_arc_validation():
    with pytest.raises(InputError):
        OrientedArc("x", "L", "R", "polyline", points=(1 + 0j,))
    with pytest.raises(InputError):
        OrientedArc("x", "L", "R", "circle", radius=0.0)
    with pytest.raises(InputError):
        OrientedArc("x", "L", "R", "mapped")
    with pytest.raises(InputError):
        OrientedArc("x", "L", "R", "banana")
    with pytest.raises(InputError):
        GeneralizedNeighborhood(0.0)
    with pytest.raises(InputError):
        GeneralizedNeighborhood(1.0, rule="other")


def test_pullback_through_translation():
    base = _poly_partition([_poly("a", [0, 4 + 0j])], [0j, 4 + 0j])
    moved = pullback_partition(base, translation(2 + 1j))
    assert moved.kind == "mapped"
    # forward maps new coordinates onto base ones, so points shift by -b
    assert abs(moved.arcs[0].point(0.0) - (-2 - 1j)) < 1e-12
    assert abs(moved.singular_points[1] - (2 - 1j)) < 1e-12
    with pytest.raises(CapabilityError):
        moved.cell_of(0j)
    again = pullback_partition(moved, translation(1 + 0j))
    assert again.base_partition is base


def test_pullback_rejects_broken_chart():
    from oneturn import Biholo

    base = standard_partition(0.0)
    bad = Biholo(forward=lambda z: z * z, inverse=lambda w: w / 3, name="bad")
    with pytest.raises(InputError):
        pullback_partition(base, bad)


def test_repartition_returns_input_when_uniform():
    p = _poly_partition([_poly("a", [0, 5])], [0j, 5 + 0j])
    assert repartition_uniform(p, 1.0) is p
    with pytest.raises(InputError):
        repartition_uniform(p, 0.0)


def test_repartition_requires_polylines():
    p = Partition(
        total_domain=HalfPlane(0.0),
        cells=(Cell("L"), Cell("R")),
        arcs=(OrientedArc("h", "L", "R", "hline", x_start=0.0, y=0.0),),
        singular_points=(0j, 0.01 + 0j),
        neighborhood=GeneralizedNeighborhood(5.0, METRIC_BALL),
        kind="polyline",
    )
    with pytest.raises(PreconditionError):
        repartition_uniform(p, 1.0)


def test_repartition_merges_one_cluster():
    eps = 0.6
    s1, s2 = 0.02 + 0.01j, 0.05 - 0.01j
    arcs = [
        _poly("a1", [s1, s1 + 1 + 1j]),
        _poly("a2", [s2, s2 + 1 - 1j]),
        _poly("far", [3 + 0j, 4 + 0j]),
    ]
    p = _poly_partition(arcs, [s1, s2, 3.5 + 2j])
    out = repartition_uniform(p, eps)
    assert len(out.singular_points) == 2
    assert out.uniformity_constant() >= eps / 3
    # the far arc is untouched, including its id
    assert out.arc("far").points == (3 + 0j, 4 + 0j)
    # every surviving original vertex stays; new vertices sit within
    # eps/6 of the old boundary
    old_arcs = p.arcs
    for arc in out.arcs:
        for v in arc.points:
            assert min(a.distance_to(v) for a in old_arcs) <= eps / 6 + 1e-12
    # the merged vertex is an endpoint of the rerouted pieces
    merged = [s for s in out.singular_points if abs(s - 3.5 - 2j) > 1]
    assert len(merged) == 1
    touching = [
        arc
        for arc in out.arcs
        if any(abs(pt - merged[0]) < 1e-12 for pt in (arc.points[0], arc.points[-1]))
    ]
    assert len(touching) >= 2


def test_repartition_oversized_cluster_refused():
    s1, s2 = 0j, 0.3 + 0j
    p = _poly_partition([_poly("a", [s1, s2])], [s1, s2])
    with pytest.raises(GeometryError):
        repartition_uniform(p, 1.0)


def test_repartition_clustered_corpus_postconditions():
    p, _ = clustered_partition(n_points=120, eps=0.5, seed=3)
    out = repartition_uniform(p, 0.5)
    assert out.uniformity_constant() >= 0.5 / 3
    assert len(out.singular_points) == 30


def test_regularity_report_on_standard_partition():
    p = standard_partition(0.0)
    rep = regularity_report(p, 0.5)
    assert rep.multiplicity == 1
    assert rep.regular
    assert rep.uniformity_constant == math.inf
    assert rep.line_density(2.0) <= rep.line_density(10.0)
    assert rep.line_density_constant >= 0.0
    assert rep.to_json()["uniformity_constant"] == "inf"
    with pytest.raises(InputError):
        regularity_report(p, -1.0)


def test_regularity_multiplicity_counts_meeting_arcs():
    cross = _poly_partition(
        [_poly("v", [-1j, 1j]), _poly("h", [-1, 1])],
        [0j],
    )
    rep = regularity_report(cross, 0.25)
    assert rep.multiplicity == 2


def test_json_roundtrip_strips():
    p = standard_partition(1.5)
    doc = partition_to_json(p)
    back = partition_from_json(doc)
    assert back.kind == "strips"
    assert [a.arc_id for a in back.arcs] == [a.arc_id for a in p.arcs]
    assert all(b.y == a.y and b.x_start == a.x_start for a, b in zip(p.arcs, back.arcs))
    assert back.cell_of(5 + 0j) == "strip_0"


def test_json_roundtrip_polyline_and_mapped_sampling():
    p = _poly_partition([_poly("a", [0, 1 + 1j, 2])], [0j])
    back = partition_from_json(partition_to_json(p))
    assert back.arc("a").points == (0j, 1 + 1j, 2 + 0j)
    assert back.singular_points == (0j,)

    moved = pullback_partition(p, translation(1 + 0j))
    doc = partition_to_json(moved, samples_per_arc=9)
    assert doc["arcs"][0]["sampled_from"] == "mapped"
    back2 = partition_from_json(doc)
    assert back2.arcs[0].kind == "polyline"
    assert len(back2.arcs[0].points) == 9


def test_json_quadratic_domain_roundtrip():
    p = trivial_partition(StandardQuadraticDomain(2.5))
    back = partition_from_json(partition_to_json(p))
    assert isinstance(back.total_domain, StandardQuadraticDomain)
    assert back.total_domain.C == 2.5
