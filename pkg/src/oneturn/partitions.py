"""Partition geometry: cells, oriented boundary arcs, and their metrics.

A partition splits a half-plane or standard quadratic domain into cells
separated by oriented arcs; walking an arc in the direction of increasing
parameter keeps its left cell on the left.  Four arc shapes are
supported:

  * ``hline``    - a horizontal ray {x + i*y : x >= x_start}, the shape
                   of every boundary line of the standard partition;
  * ``polyline`` - finitely many straight segments, the implemented
                   scope of the repartitioning surgery;
  * ``circle``   - a full counterclockwise circle (used for compact
                   calibration contours);
  * ``mapped``   - the preimage of a base arc under an invertible chart,
                   produced by pullbacks.

The two operations with real geometric content are ``repartition_uniform``
(local surgery that merges clusters of singular points until any two are
at least eps/3 apart, changing the boundary only inside disks of radius
below eps/6 around old singular points) and ``regularity_report``
(multiplicity, uniformity constant, argument-variation and line-density
measurements).
"""

from __future__ import annotations

import cmath
import json
import math
import random
import zlib
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Union

from .domains import Biholo, HalfPlane, StandardQuadraticDomain, Strip
from .errors import (
    CapabilityError,
    GeometryError,
    InputError,
    PartitionError,
    PreconditionError,
)

LINE_SPACING = 0.75 * math.pi

STRIP_WIDENING = "strip-widening"
METRIC_BALL = "metric-ball"

#: probe offsets along each arc used by sampled geometry queries
_ARC_SAMPLE_TS = (0.05, 0.2, 0.35, 0.5, 0.65, 0.8, 0.95)

_WINDING_THRESHOLD = 16.0 * math.pi


@dataclass(frozen=True)
class GeneralizedNeighborhood:
    """Enlargement rule for cells: the eps-neighborhood family U_eps.

    ``strip-widening`` widens horizontal strips vertically by eps on both
    sides; ``metric-ball`` is the metric enlargement B_eps(U).  eps0 caps
    the eps for which the rule is declared valid.
    """

    eps0: float
    rule: str = STRIP_WIDENING

    def __post_init__(self) -> None:
        if not self.eps0 > 0:
            raise InputError("neighborhood eps0 must be positive")
        if self.rule not in (STRIP_WIDENING, METRIC_BALL):
            raise InputError(f"unknown neighborhood rule {self.rule!r}")


@dataclass(frozen=True)
class Cell:
    cell_id: str
    description: str = ""
    strip: Optional[Strip] = None


@dataclass(frozen=True)
class OrientedArc:
    """One boundary arc with its two adjacent cell ids.

    The parametrization runs over t in [0, 1); rays use the chart
    t -> x_start + t/(1-t) so t=1 is the point at infinity.
    """

    arc_id: str
    left_cell: str
    right_cell: str
    kind: str
    points: tuple = ()
    x_start: float = 0.0
    y: float = 0.0
    center: complex = 0j
    radius: float = 0.0
    base: Optional["OrientedArc"] = None
    chart: Optional[Biholo] = None

    def __post_init__(self) -> None:
        if self.kind not in ("hline", "polyline", "circle", "mapped"):
            raise InputError(f"unknown arc kind {self.kind!r}")
        if self.kind == "polyline":
            if len(self.points) < 2:
                raise InputError("polyline arc needs at least two points")
        if self.kind == "circle" and not self.radius > 0:
            raise InputError("circle arc needs a positive radius")
        if self.kind == "mapped" and (self.base is None or self.chart is None):
            raise InputError("mapped arc needs a base arc and a chart")

    @property
    def unbounded(self) -> bool:
        if self.kind == "hline":
            return True
        if self.kind == "mapped":
            return self.base.unbounded
        return False

    def point(self, t: float) -> complex:
        if self.kind == "hline":
            if not 0.0 <= t < 1.0:
                raise InputError("ray parameter must lie in [0, 1)")
            return complex(self.x_start + t / (1.0 - t), self.y)
        if self.kind == "polyline":
            t = min(max(t, 0.0), 1.0)
            n = len(self.points) - 1
            s = t * n
            i = min(int(s), n - 1)
            p, q = self.points[i], self.points[i + 1]
            return p + (s - i) * (q - p)
        if self.kind == "circle":
            return self.center + self.radius * cmath.exp(2j * math.pi * t)
        return self.chart.inverse(self.base.point(t))

    def sample(self, ts=_ARC_SAMPLE_TS) -> tuple:
        return tuple(self.point(t) for t in ts)

    def distance_to(self, z: complex) -> float:
        """Distance from z to the arc (sampled for mapped arcs)."""
        z = complex(z)
        if self.kind == "hline":
            if z.real >= self.x_start:
                return abs(z.imag - self.y)
            return math.hypot(z.real - self.x_start, z.imag - self.y)
        if self.kind == "polyline":
            return min(
                _segment_distance(z, p, q)
                for p, q in zip(self.points, self.points[1:])
            )
        if self.kind == "circle":
            return abs(abs(z - self.center) - self.radius)
        return min(abs(z - w) for w in self.sample())

    def left_normal_at(self, z: complex) -> complex:
        """Unit normal pointing into the left cell at a point on the arc."""
        z = complex(z)
        if self.kind == "hline":
            return 1j
        if self.kind == "polyline":
            best, normal = math.inf, 1j
            for p, q in zip(self.points, self.points[1:]):
                d = _segment_distance(z, p, q)
                if d < best and q != p:
                    best = d
                    normal = 1j * (q - p) / abs(q - p)
            return normal
        if self.kind == "circle":
            r = z - self.center
            return -r / abs(r) if r != 0 else 1j
        # tangent by a small parameter step around the nearest sample
        ts = _ARC_SAMPLE_TS
        t0 = min(ts, key=lambda t: abs(self.point(t) - z))
        h = 1e-5
        tangent = self.point(min(t0 + h, 0.999999)) - self.point(max(t0 - h, 0.0))
        return 1j * tangent / abs(tangent)

    def reversed_orientation(self) -> "OrientedArc":
        swapped = replace(self, left_cell=self.right_cell, right_cell=self.left_cell)
        if self.kind == "polyline":
            swapped = replace(swapped, points=tuple(reversed(self.points)))
        return swapped


def _segment_distance(z: complex, p: complex, q: complex) -> float:
    d = q - p
    L2 = (d * d.conjugate()).real
    if L2 == 0.0:
        return abs(z - p)
    t = ((z - p) * d.conjugate()).real / L2
    t = min(max(t, 0.0), 1.0)
    return abs(z - (p + t * d))


Domain = Union[HalfPlane, StandardQuadraticDomain]


@dataclass(frozen=True)
class Partition:
    """Cells, oriented arcs, and singular points of one partition.

    ``kind`` records which family the partition belongs to: "strips"
    (horizontal-strip cells with hline arcs), "polyline", "trivial"
    (one cell, no boundary), or "mapped" (a pullback; geometry lives in
    the chart's source coordinates while ``total_domain`` is kept in
    base coordinates).
    """

    total_domain: Domain
    cells: tuple
    arcs: tuple
    singular_points: tuple = ()
    neighborhood: GeneralizedNeighborhood = GeneralizedNeighborhood(1.0)
    kind: str = "polyline"
    chart: Optional[Biholo] = None
    base_partition: Optional["Partition"] = None

    def __post_init__(self) -> None:
        if not self.cells:
            raise PartitionError("a partition needs at least one cell")
        ids = [c.cell_id for c in self.cells]
        if len(set(ids)) != len(ids):
            raise PartitionError("cell ids must be unique")
        known = set(ids)
        for arc in self.arcs:
            if arc.left_cell not in known or arc.right_cell not in known:
                raise PartitionError(
                    f"arc {arc.arc_id} references a cell that is not in the partition"
                )

    def cell(self, cell_id: str) -> Cell:
        for c in self.cells:
            if c.cell_id == cell_id:
                return c
        raise InputError(f"no cell named {cell_id!r}")

    def arc(self, arc_id: str) -> OrientedArc:
        for a in self.arcs:
            if a.arc_id == arc_id:
                return a
        raise InputError(f"no arc named {arc_id!r}")

    def cell_of(self, zeta: complex) -> Optional[str]:
        """Id of the open cell containing zeta, None on the boundary.

        Only strip-family and trivial partitions know their cell
        geometry exactly.
        """
        zeta = complex(zeta)
        if self.kind == "trivial":
            return self.cells[0].cell_id
        if self.kind == "strips":
            for c in self.cells:
                if c.strip is not None and c.strip.contains(zeta):
                    return c.cell_id
            return None
        if self.kind == "mapped":
            raise CapabilityError(
                "cell membership for mapped partitions goes through the chart; "
                "query the base partition at chart.forward(zeta)"
            )
        raise CapabilityError("polyline partitions carry no cell geometry")

    def cell_contains(self, cell_id: str, zeta: complex, eps: float) -> bool:
        """Membership of zeta in the eps-enlargement of the cell."""
        if eps > self.neighborhood.eps0:
            raise InputError("eps exceeds the neighborhood's declared eps0")
        c = self.cell(cell_id)
        zeta = complex(zeta)
        if self.kind == "trivial":
            return _domain_contains(self.total_domain, zeta)
        if c.strip is None:
            raise CapabilityError(
                f"cell {cell_id!r} carries no geometry for enlargement queries"
            )
        widened = Strip(c.strip.index, c.strip.lower, c.strip.upper, eps)
        return widened.contains(zeta, widened=True) and _domain_contains(
            self.total_domain, zeta
        )

    def boundary_distance(self, zeta: complex) -> float:
        if not self.arcs:
            return math.inf
        return min(arc.distance_to(zeta) for arc in self.arcs)

    def uniformity_constant(self) -> float:
        """Minimal pairwise distance between singular points (+inf if < 2)."""
        pts = self.singular_points
        if len(pts) < 2:
            return math.inf
        return min(
            abs(pts[i] - pts[j])
            for i in range(len(pts))
            for j in range(i + 1, len(pts))
        )


def _domain_contains(dom: Domain, zeta: complex) -> bool:
    if isinstance(dom, HalfPlane):
        return dom.contains(zeta)
    # quadratic domain: membership through the inverse map
    from .domains import psi_invert

    try:
        z = psi_invert(dom, zeta, 1e-9)
    except Exception:
        return False
    return z.real > 0


# -- constructors -------------------------------------------------------------


def line_height(n: int) -> float:
    """Height of boundary line n of the standard partition."""
    if n == 0:
        raise InputError("the standard partition has no line at index 0")
    return LINE_SPACING * n


def standard_partition(
    a: float, n_lines: int = 8, eps0: float = 0.5 * LINE_SPACING
) -> Partition:
    """Partition of {Re > a} by the lines Im = (3/4)*pi*n, 0 < |n| <= n_lines.

    The strip containing the real axis spans Im in (-3pi/4, 3pi/4); strip
    k >= 1 spans ((3/4)pi*k, (3/4)pi*(k+1)) and symmetrically below.  The
    outermost two cells are half-infinite.  Parallel lines never meet, so
    there are no singular points.
    """
    if n_lines < 1:
        raise InputError("n_lines must be at least 1")
    cells = []
    for k in range(-n_lines, n_lines + 1):
        lower, upper = _strip_bounds(k, n_lines)
        cells.append(
            Cell(
                cell_id=f"strip_{k}",
                description=f"horizontal strip {lower:.6g} < Im < {upper:.6g}",
                strip=Strip(k, lower, upper, eps0),
            )
        )
    arcs = []
    for n in [i for i in range(-n_lines, n_lines + 1) if i != 0]:
        above = f"strip_{n}" if n > 0 else f"strip_{n + 1}"
        below = f"strip_{n - 1}" if n > 0 else f"strip_{n}"
        arcs.append(
            OrientedArc(
                arc_id=f"line_{n}",
                left_cell=above,
                right_cell=below,
                kind="hline",
                x_start=a,
                y=line_height(n),
            )
        )
    return Partition(
        total_domain=HalfPlane(a),
        cells=tuple(cells),
        arcs=tuple(arcs),
        singular_points=(),
        neighborhood=GeneralizedNeighborhood(eps0, STRIP_WIDENING),
        kind="strips",
    )


def _strip_bounds(k: int, n_lines: int) -> tuple:
    if k == 0:
        return -LINE_SPACING, LINE_SPACING
    if k > 0:
        upper = LINE_SPACING * (k + 1) if k < n_lines else math.inf
        return LINE_SPACING * k, upper
    lower = LINE_SPACING * (k - 1) if k > -n_lines else -math.inf
    return lower, LINE_SPACING * k


def trivial_partition(dom: Domain) -> Partition:
    return Partition(
        total_domain=dom,
        cells=(Cell("whole", "the whole domain"),),
        arcs=(),
        neighborhood=GeneralizedNeighborhood(1e6, STRIP_WIDENING),
        kind="trivial",
    )


def strip_partition_from_levels(
    dom: HalfPlane, levels, eps0: float
) -> Partition:
    """Strip partition of a half-plane with boundary lines at the given heights."""
    ys = sorted(levels)
    if not ys:
        return trivial_partition(dom)
    for y0, y1 in zip(ys, ys[1:]):
        if y1 - y0 < 1e-12:
            raise PartitionError("strip levels must be separated")
    # index cells so that the one containing the real axis, if any, is 0
    bounds = [(-math.inf, ys[0])] + list(zip(ys, ys[1:])) + [(ys[-1], math.inf)]
    zero_pos = next(
        (i for i, (lo, up) in enumerate(bounds) if lo < 0.0 < up), None
    )
    cells = []
    for i, (lo, up) in enumerate(bounds):
        k = i - zero_pos if zero_pos is not None else i
        cells.append(
            Cell(
                cell_id=f"strip_{k}",
                description=f"horizontal strip {lo:.6g} < Im < {up:.6g}",
                strip=Strip(k, lo, up, eps0),
            )
        )
    arcs = []
    for i, y in enumerate(ys):
        below, above = cells[i].cell_id, cells[i + 1].cell_id
        arcs.append(
            OrientedArc(
                arc_id=f"y_{i}",
                left_cell=above,
                right_cell=below,
                kind="hline",
                x_start=dom.a,
                y=y,
            )
        )
    return Partition(
        total_domain=dom,
        cells=tuple(cells),
        arcs=tuple(arcs),
        neighborhood=GeneralizedNeighborhood(eps0, STRIP_WIDENING),
        kind="strips",
    )


# -- product ------------------------------------------------------------------


def product_partition(p: Partition, q: Partition) -> Partition:
    """Common refinement with cells U * V = U intersect V.

    Enlargements intersect: (U * V)_eps = U_eps intersect V_eps, which for
    strip widening is again strip widening of the intersected strip.  The
    exact product is implemented for the strip families (and for trivial
    factors, which act as identity); other combinations are rejected
    because their intersection cells' boundary analyticity is not
    certified here.
    """
    if not _same_domain(p.total_domain, q.total_domain):
        raise PartitionError("product requires the same total domain")
    if p.kind == "trivial":
        return q
    if q.kind == "trivial":
        return p
    if p.kind == "strips" and q.kind == "strips":
        levels = _merged_levels(
            [a.y for a in p.arcs], [a.y for a in q.arcs]
        )
        eps0 = min(p.neighborhood.eps0, q.neighborhood.eps0)
        return strip_partition_from_levels(p.total_domain, levels, eps0)
    raise PartitionError(
        "product outside the strip families is not supported: the "
        "intersection cells' boundary analyticity cannot be certified"
    )


def _merged_levels(ys1, ys2) -> list:
    ys = sorted(list(ys1) + list(ys2))
    out = []
    for y in ys:
        if not out or y - out[-1] > 1e-12:
            out.append(y)
    return out


def _same_domain(d1: Domain, d2: Domain) -> bool:
    if isinstance(d1, HalfPlane) and isinstance(d2, HalfPlane):
        return d1.a == d2.a
    if isinstance(d1, StandardQuadraticDomain) and isinstance(
        d2, StandardQuadraticDomain
    ):
        return d1.C == d2.C
    return False


# -- pullback -----------------------------------------------------------------


def pullback_partition(p: Partition, rho: Biholo) -> Partition:
    """Pullback along rho: new cells are {z : rho.forward(z) in U}.

    Arcs are reparametrized lazily through the chart (their points are
    rho.inverse of base points), so sampled points of a pulled-back arc
    land on the base arcs under rho.forward.  Pulling back twice composes
    the charts.
    """
    if rho is None:
        raise InputError("pullback needs a biholomorphism handle")
    if rho.name == "id":
        return p
    if p.kind == "mapped":
        base = p.base_partition
        chart = rho.then(p.chart)
    else:
        base, chart = p, rho
    # verify invertibility near the domain's anchor points; a chart that
    # fails to round-trip is not a biholomorphism between these domains
    for probe in _domain_probes(base.total_domain):
        try:
            z = chart.inverse(probe)
            back = chart.forward(z)
        except Exception as exc:
            raise InputError(
                f"chart {chart.name or '<unnamed>'} is not invertible at {probe}: {exc}"
            ) from exc
        if abs(back - probe) > 1e-6 * (1 + abs(probe)):
            raise InputError(
                f"chart {chart.name or '<unnamed>'} does not round-trip at {probe}"
            )
    arcs = tuple(
        OrientedArc(
            arc_id=a.arc_id,
            left_cell=a.left_cell,
            right_cell=a.right_cell,
            kind="mapped",
            base=a,
            chart=chart,
        )
        for a in base.arcs
    )
    singulars = tuple(chart.inverse(s) for s in base.singular_points)
    return Partition(
        total_domain=base.total_domain,
        cells=base.cells,
        arcs=arcs,
        singular_points=singulars,
        neighborhood=base.neighborhood,
        kind="mapped",
        chart=chart,
        base_partition=base,
    )


def _domain_probes(dom: Domain) -> tuple:
    if isinstance(dom, HalfPlane):
        x = dom.a
        return (complex(x + 2, 0.5), complex(x + 5, -1.0), complex(x + 9, 2.0))
    return (complex(6, 0.5), complex(11, -1.0), complex(21, 2.0))


# -- repartitioning surgery ---------------------------------------------------


def _enclosing_circle(points, rng: random.Random) -> tuple:
    """Smallest circle containing the points: (center, radius).

    Incremental Welzl walk; the shuffle is seeded by the caller so the
    result is deterministic for a given partition.
    """
    pts = list(points)
    if len(pts) == 1:
        return pts[0], 0.0
    rng.shuffle(pts)
    c, r = pts[0], 0.0

    def _inside(z):
        return abs(z - c) <= r * (1 + 1e-12) + 1e-300

    for i, pnt in enumerate(pts):
        if _inside(pnt):
            continue
        c, r = pnt, 0.0
        for j in range(i):
            if _inside(pts[j]):
                continue
            c = (pnt + pts[j]) / 2
            r = abs(pnt - pts[j]) / 2
            for k in range(j):
                if _inside(pts[k]):
                    continue
                cc = _circumcenter(pnt, pts[j], pts[k])
                if cc is None:
                    # collinear triple: the two farthest points define the circle
                    far = max(
                        ((u, v) for u in (pnt, pts[j], pts[k]) for v in (pnt, pts[j], pts[k])),
                        key=lambda uv: abs(uv[0] - uv[1]),
                    )
                    cc = (far[0] + far[1]) / 2
                    c, r = cc, abs(far[0] - far[1]) / 2
                else:
                    c, r = cc, abs(pnt - cc)
    return c, r


def _circumcenter(a: complex, b: complex, c: complex):
    d = 2 * ((a - c) * (b - c).conjugate()).imag
    if abs(d) < 1e-14 * max(abs(a - c), abs(b - c), 1.0) ** 2:
        return None
    w = abs(a - c) ** 2 * (b - c) - abs(b - c) ** 2 * (a - c)
    return c + 1j * w / d


def _geometry_seed(p: Partition) -> int:
    parts = [f"{s.real:.12e},{s.imag:.12e}" for s in sorted(
        p.singular_points, key=lambda z: (z.real, z.imag)
    )]
    return zlib.crc32(";".join(parts).encode())


def repartition_uniform(p: Partition, eps: float) -> Partition:
    """Merge clusters of singular points so any two survivors are >= eps/3 apart.

    Surgery is local: each cluster is enclosed in a disk that stays inside
    the eps/6-neighborhood of the cluster's own points; boundary arcs are
    clipped at the disk and rerouted straight to the cluster's merged
    vertex, so the boundary is unchanged outside those disks and every new
    point is within eps/6 of an old arc.  Clusters whose extent is too
    large for a disk of radius below eps/6 raise GeometryError (the
    tiling argument of the underlying theorem is not implemented for
    arbitrarily chained inputs).
    """
    if not eps > 0:
        raise InputError("eps must be positive")
    sep = p.uniformity_constant()
    if sep >= eps / 3:
        return p
    if any(a.kind != "polyline" for a in p.arcs):
        raise PreconditionError(
            "repartitioning surgery is implemented for polyline arcs only"
        )

    pts = list(p.singular_points)
    n = len(pts)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj

    for i in range(n):
        for j in range(i + 1, n):
            if abs(pts[i] - pts[j]) < eps / 3:
                union(i, j)

    rng = random.Random(_geometry_seed(p))

    def cluster_map():
        groups = {}
        for i in range(n):
            groups.setdefault(find(i), []).append(i)
        return list(groups.values())

    # grow clusters until all merged vertices are genuinely >= eps/3 apart
    for _ in range(n + 1):
        clusters = cluster_map()
        centers = []
        for members in clusters:
            c, r = _enclosing_circle([pts[i] for i in members], rng)
            m = min(abs(pts[i] - c) for i in members)
            if r + m >= eps / 6 * (1 - 1e-9):
                raise GeometryError(
                    f"a cluster of {len(members)} singular points has extent "
                    f"{r:.6g}, too large for local surgery at eps={eps:.6g}"
                )
            centers.append((members, c, r, m))
        offender = None
        for i in range(len(centers)):
            for j in range(i + 1, len(centers)):
                if abs(centers[i][1] - centers[j][1]) < eps / 3:
                    offender = (centers[i][0][0], centers[j][0][0])
                    break
            if offender:
                break
        if offender is None:
            break
        union(*offender)
    else:  # pragma: no cover - the loop strictly decreases cluster count
        raise GeometryError("cluster merging did not stabilize")

    # choose surgery radii; retry with jittered shrink factors when a
    # vertex or singular point falls exactly on a disk boundary
    surgical = [(members, c, r, m) for members, c, r, m in centers if len(members) > 1]
    disks = None
    for attempt in range(32):
        trial = []
        ok = True
        for members, c, r, m in surgical:
            lo, hi = r, eps / 6 - m
            R = (lo + hi) / 2
            if attempt:
                R = lo + (hi - lo) * (0.25 + 0.5 * rng.random())
            if not lo < R < hi:
                ok = False
                break
            trial.append((c, R))
        if ok and not _degenerate_disks(trial, p, pts):
            disks = trial
            break
    if disks is None:
        raise GeometryError(
            "no admissible surgery radii found after 32 seeded retries"
        )

    new_arcs = []
    for arc in p.arcs:
        new_arcs.extend(_clip_polyline(arc, disks))
    kept = [
        pts[members[0]]
        for members, _, _, _ in centers
        if len(members) == 1
    ]
    merged = [c for c, _ in disks]
    return Partition(
        total_domain=p.total_domain,
        cells=p.cells,
        arcs=tuple(new_arcs),
        singular_points=tuple(kept + merged),
        neighborhood=p.neighborhood,
        kind="polyline",
    )


def _degenerate_disks(disks, p: Partition, pts) -> bool:
    for c, R in disks:
        for s in pts:
            if abs(abs(s - c) - R) < 1e-9 * R:
                return True
        for arc in p.arcs:
            for v in arc.points:
                if abs(abs(v - c) - R) < 1e-9 * R:
                    return True
    return False


def _clip_polyline(arc: OrientedArc, disks) -> list:
    """Split one polyline at the surgery disks, rerouting through centers.

    Every crossing of a disk boundary ends the current piece with a
    straight spoke to the disk's center and starts the next piece there,
    so the merged vertex becomes a common endpoint of all pieces that
    used to run through the disk.
    """

    def disk_of(z):
        for idx, (c, R) in enumerate(disks):
            if abs(z - c) < R:
                return idx
        return None

    pieces = []
    current = []
    inside = disk_of(arc.points[0])
    if inside is None:
        current = [arc.points[0]]
    for p0, p1 in zip(arc.points, arc.points[1:]):
        events = []
        for idx, (c, R) in enumerate(disks):
            for t in _segment_circle_crossings(p0, p1, c, R):
                events.append((t, idx))
        events.sort()
        for t, idx in events:
            x = p0 + t * (p1 - p0)
            if inside is None:
                # entering disk idx: spoke from the crossing to the center
                current.append(x)
                current.append(disks[idx][0])
                if len(current) >= 2:
                    pieces.append(current)
                current = []
                inside = idx
            elif inside == idx:
                current = [disks[idx][0], x]
                inside = None
        if inside is None:
            current.append(p1)
    if inside is None and len(current) >= 2:
        pieces.append(current)

    out = []
    for k, piece in enumerate(pieces):
        cleaned = [piece[0]]
        for z in piece[1:]:
            if abs(z - cleaned[-1]) > 1e-15:
                cleaned.append(z)
        if len(cleaned) < 2:
            continue
        out.append(
            OrientedArc(
                arc_id=f"{arc.arc_id}_p{k}" if len(pieces) > 1 else arc.arc_id,
                left_cell=arc.left_cell,
                right_cell=arc.right_cell,
                kind="polyline",
                points=tuple(cleaned),
            )
        )
    return out


def _segment_circle_crossings(p0: complex, p1: complex, c: complex, R: float):
    d = p1 - p0
    f = p0 - c
    a = (d * d.conjugate()).real
    if a == 0.0:
        return []
    b = 2 * (f * d.conjugate()).real
    cc = (f * f.conjugate()).real - R * R
    disc = b * b - 4 * a * cc
    if disc <= 0:
        return []
    root = math.sqrt(disc)
    out = [t for t in ((-b - root) / (2 * a), (-b + root) / (2 * a)) if 0.0 < t < 1.0]
    return sorted(out)


# -- regularity metrics -------------------------------------------------------


@dataclass(frozen=True)
class RegularityReport:
    probe_radius: float
    multiplicity: int
    uniformity_constant: float
    line_density: Callable[[float], float] = field(compare=False)
    line_density_constant: float = 0.0
    section_sums: tuple = ()
    J_values: dict = field(default_factory=dict, compare=False)
    winding_violations: tuple = ()

    @property
    def regular(self) -> bool:
        return not self.winding_violations

    def to_json(self) -> dict:
        return {
            "probe_radius": self.probe_radius,
            "multiplicity": self.multiplicity,
            "uniformity_constant": "inf"
            if math.isinf(self.uniformity_constant)
            else self.uniformity_constant,
            "line_density_constant": self.line_density_constant,
            "section_sums": [[a, s] for a, s in self.section_sums],
            "winding_violations": list(self.winding_violations),
            "regular": self.regular,
        }


def regularity_report(p: Partition, d: float, sections=None) -> RegularityReport:
    """Measure multiplicity, singular separation, winding, and line density.

    Multiplicity is the largest number of distinct arcs meeting one open
    ball of radius d, maximized over sampled centers (singular points,
    arc samples, and midpoints of nearby arc pairs); it is exact for the
    shipped arc families whose mutual distances are realized at those
    centers.  An arc ending at a singular point whose direction angle
    varies by more than 16*pi in total is reported as a winding
    violation rather than raised.
    """
    if not d > 0:
        raise InputError("probe radius must be positive")

    centers = list(p.singular_points)
    arc_samples = []
    for arc in p.arcs:
        samples = arc.sample()
        arc_samples.append(samples)
        centers.extend(samples)
    for i in range(len(p.arcs)):
        for j in range(i + 1, len(p.arcs)):
            best = None
            for u in arc_samples[i]:
                for v in arc_samples[j]:
                    dist = abs(u - v)
                    if best is None or dist < best[0]:
                        best = (dist, (u + v) / 2)
            if best is not None and best[0] < 2 * d + 1e-12:
                centers.append(best[1])

    multiplicity = 0
    for c in centers:
        count = sum(1 for arc in p.arcs if arc.distance_to(c) < d)
        multiplicity = max(multiplicity, count)

    winding = []
    for arc in p.arcs:
        if arc.kind == "hline":
            continue
        terminal = any(
            min(abs(arc.point(t) - s) for t in (0.0, 0.999999)) < 1e-9
            for s in p.singular_points
        ) if p.singular_points else False
        if not terminal:
            continue
        if _argument_variation(arc) > _WINDING_THRESHOLD:
            winding.append(arc.arc_id)

    if sections is None:
        sections = _default_sections(p)
    J_values: dict = {}
    sums = []
    for a in sections:
        total = 0.0
        for arc in p.arcs:
            for J in _section_J(arc, a):
                J_values.setdefault(arc.arc_id, []).append((a, J))
                total += J
        sums.append((a, total))

    base = max((s for _, s in sums), default=0.0)
    c1 = max(
        (s / max(a, 1.0) ** 2 for a, s in sums), default=0.0
    ) * (1 + 1e-12)

    def envelope(a: float, _c1=c1) -> float:
        return _c1 * max(a, 1.0) ** 2

    return RegularityReport(
        probe_radius=d,
        multiplicity=multiplicity,
        uniformity_constant=p.uniformity_constant(),
        line_density=envelope,
        line_density_constant=c1,
        section_sums=tuple(sums),
        J_values=J_values,
        winding_violations=tuple(winding),
    )


def _argument_variation(arc: OrientedArc) -> float:
    if arc.kind == "polyline":
        pts = arc.points
    else:
        pts = arc.sample(tuple(i / 64 for i in range(65)))
    total = 0.0
    prev = None
    for p0, p1 in zip(pts, pts[1:]):
        if p1 == p0:
            continue
        ang = cmath.phase(p1 - p0)
        if prev is not None:
            delta = ang - prev
            while delta > math.pi:
                delta -= 2 * math.pi
            while delta < -math.pi:
                delta += 2 * math.pi
            total += abs(delta)
        prev = ang
    return total


def _default_sections(p: Partition) -> tuple:
    if isinstance(p.total_domain, HalfPlane):
        x0 = p.total_domain.a
    else:
        x0 = p.total_domain.C
    return tuple(x0 + k for k in (1.0, 2.0, 3.0, 4.0, 5.0))


def _section_J(arc: OrientedArc, a: float):
    """|gamma'| at crossings of the vertical Re = a, parametrized by Re.

    A locally vertical boundary makes the reparametrization impossible;
    such crossings report J = inf, signalling a need to repartition.
    """
    out = []
    if arc.kind == "hline":
        if a >= arc.x_start:
            out.append(1.0)
        return out
    if arc.kind == "polyline":
        pts = arc.points
    elif arc.kind == "circle":
        pts = arc.sample(tuple(i / 128 for i in range(129)))
    else:
        pts = arc.sample(tuple(i / 128 for i in range(129)))
    for p0, p1 in zip(pts, pts[1:]):
        lo, hi = sorted((p0.real, p1.real))
        if lo <= a < hi or (lo < a <= hi and p1.real < p0.real):
            run = abs(p1.real - p0.real)
            length = abs(p1 - p0)
            out.append(math.inf if run < 1e-15 * length else length / run)
        elif lo == hi == a:
            out.append(math.inf)
    return out


# -- serialization ------------------------------------------------------------


def partition_to_json(p: Partition, samples_per_arc: int = 65) -> dict:
    """JSON document with cells, arcs as point lists, and singular points.

    Mapped arcs are emitted as sampled polylines, so a round-trip through
    this format is exact for hline/polyline/circle partitions and a
    declared sampling for pullbacks.
    """
    dom = p.total_domain
    if isinstance(dom, HalfPlane):
        dom_doc = {"type": "half_plane", "a": dom.a}
    else:
        dom_doc = {"type": "quadratic_domain", "C": dom.C}
    arcs = []
    for a in p.arcs:
        doc = {"id": a.arc_id, "left": a.left_cell, "right": a.right_cell}
        if a.kind == "hline":
            doc.update(kind="hline", x_start=a.x_start, y=a.y)
        elif a.kind == "circle":
            doc.update(
                kind="circle",
                center=[a.center.real, a.center.imag],
                radius=a.radius,
            )
        elif a.kind == "polyline":
            doc.update(kind="polyline", points=[[z.real, z.imag] for z in a.points])
        else:
            ts = tuple(i / (samples_per_arc - 1) * 0.999999 for i in range(samples_per_arc))
            doc.update(
                kind="polyline",
                points=[[z.real, z.imag] for z in (a.point(t) for t in ts)],
                sampled_from="mapped",
            )
        arcs.append(doc)
    cells = []
    for c in p.cells:
        doc = {"id": c.cell_id, "description": c.description}
        if c.strip is not None:
            doc["strip"] = {
                "index": c.strip.index,
                "lower": None if math.isinf(c.strip.lower) else c.strip.lower,
                "upper": None if math.isinf(c.strip.upper) else c.strip.upper,
            }
        cells.append(doc)
    return {
        "total_domain": dom_doc,
        "kind": p.kind if p.kind != "mapped" else "polyline",
        "cells": cells,
        "arcs": arcs,
        "singular_points": [[s.real, s.imag] for s in p.singular_points],
        "neighborhood": {"eps0": p.neighborhood.eps0, "rule": p.neighborhood.rule},
    }


def partition_from_json(doc: dict) -> Partition:
    dd = doc["total_domain"]
    if dd["type"] == "half_plane":
        dom: Domain = HalfPlane(dd["a"])
    elif dd["type"] == "quadratic_domain":
        dom = StandardQuadraticDomain(dd["C"])
    else:
        raise InputError(f"unknown domain type {dd['type']!r}")
    cells = []
    for c in doc["cells"]:
        strip = None
        if "strip" in c:
            s = c["strip"]
            strip = Strip(
                s["index"],
                -math.inf if s["lower"] is None else s["lower"],
                math.inf if s["upper"] is None else s["upper"],
                doc["neighborhood"]["eps0"],
            )
        cells.append(Cell(c["id"], c.get("description", ""), strip))
    arcs = []
    for a in doc["arcs"]:
        if a["kind"] == "hline":
            arcs.append(
                OrientedArc(a["id"], a["left"], a["right"], "hline",
                            x_start=a["x_start"], y=a["y"])
            )
        elif a["kind"] == "circle":
            arcs.append(
                OrientedArc(a["id"], a["left"], a["right"], "circle",
                            center=complex(*a["center"]), radius=a["radius"])
            )
        else:
            arcs.append(
                OrientedArc(a["id"], a["left"], a["right"], "polyline",
                            points=tuple(complex(x, y) for x, y in a["points"]))
            )
    return Partition(
        total_domain=dom,
        cells=tuple(cells),
        arcs=tuple(arcs),
        singular_points=tuple(complex(x, y) for x, y in doc["singular_points"]),
        neighborhood=GeneralizedNeighborhood(
            doc["neighborhood"]["eps0"], doc["neighborhood"]["rule"]
        ),
        kind=doc["kind"],
    )
