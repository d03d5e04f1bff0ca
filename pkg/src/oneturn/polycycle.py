"""Combinatorial polycycles and their return maps.

A polycycle is a cyclic word of vertices, each a hyperbolic saddle (H)
or a semihyperbolic saddle crossed in the centre direction (SC) or the
hyperbolic direction (SH), together with optional Dulac correction
series at the vertices and regular transition maps on the edges.  This
module classifies the combinatorics (depth profile, balanced, one-turn,
superreal, height) and assembles the return map as an expression in the
composition grammar of :mod:`oneturn.expr`.

The sign convention for the depth profile is fixed here once: an SC
step counts -1 and an SH step +1, so the reference ten-vertex profile
reads [-1,-2,-2,-2,-2,-3,-3,-2,-1,0].  Every classifier consumes only
|depth|, so flipping the convention cannot change balanced, one_turn,
or height; the constant exists so the choice is explicit rather than
scattered.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError, ParseError, PreconditionError
from .expr import Affine, Compose, Exp, Log, NC
from .series import DulacSeries, parse_series

VERTEX_KINDS = ("H", "SC", "SH")

# Depth step per vertex kind; see module docstring for the convention.
DEPTH_STEP = {"H": 0, "SC": -1, "SH": +1}


@dataclass(frozen=True)
class Vertex:
    """One polycycle vertex: kind, superreal attestation, optional map.

    The superreal flag is an input attestation for SC/SH vertices (it
    asserts the semihyperbolic saddle's transition map reduces to
    exp/log composed with a Dulac correction); it is meaningless for H
    vertices and ignored there.
    """

    kind: str
    superreal: bool = False
    map: DulacSeries | None = None

    def __post_init__(self):
        if self.kind not in VERTEX_KINDS:
            raise InputError(
                f"unknown vertex kind {self.kind!r}; expected one of {VERTEX_KINDS}"
            )
        if self.map is not None and self.map.c0 != 0:
            raise InputError(
                f"vertex map must have zero constant term, got c0={self.map.c0}"
            )


@dataclass(frozen=True)
class Polycycle:
    """Cyclic vertex word with optional edge transition maps and flanks.

    ``edge_maps[i]`` is the regular transition map along the edge
    leaving ``vertices[i]``; None means the identity.  The affine
    flanks are applied outside the whole cycle (left flank last).
    """

    vertices: tuple
    edge_maps: tuple = ()
    affine_left: Affine = Affine(1, 0)
    affine_right: Affine = Affine(1, 0)

    def __post_init__(self):
        verts = tuple(self.vertices)
        if not verts:
            raise InputError("polycycle needs at least one vertex")
        edges = tuple(self.edge_maps)
        if edges and len(edges) != len(verts):
            raise InputError(
                f"{len(edges)} edge maps for {len(verts)} vertices; "
                "provide one per vertex or none"
            )
        if not edges:
            edges = (None,) * len(verts)
        for em in edges:
            if em is not None and em.c0 != 0:
                raise InputError(
                    f"edge map must have zero constant term, got c0={em.c0}"
                )
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edge_maps", edges)


@dataclass(frozen=True)
class ClassifyResult:
    depth_profile: tuple
    balanced: bool
    one_turn: bool
    superreal: bool
    height: int
    turn_start_index: int | None
    corollary_applies: bool

    def report(self) -> dict:
        """Classification report in the documented JSON shape."""
        return {
            "balanced": self.balanced,
            "one_turn": self.one_turn,
            "superreal": self.superreal,
            "height": self.height,
            "depth_profile": list(self.depth_profile),
            "corollary_applies": self.corollary_applies,
        }


def depth_profile(p: Polycycle, start: int = 0) -> tuple:
    """Cumulative depth after each vertex, from the chosen basepoint.

    The basepoint sits on the edge entering ``vertices[start]``; the
    profile is re-based at 0 there, so entry i is the depth after
    crossing the i-th vertex of the rotated word.
    """
    n = len(p.vertices)
    out = []
    d = 0
    for i in range(n):
        d += DEPTH_STEP[p.vertices[(start + i) % n].kind]
        out.append(d)
    return tuple(out)


def _one_turn_start(vertices) -> int | None:
    """Smallest rotation putting every SC before every SH, if any."""
    n = len(vertices)
    kinds = [v.kind for v in vertices]
    if "SC" not in kinds or "SH" not in kinds:
        return 0
    for start in range(n):
        rotated = [kinds[(start + i) % n] for i in range(n)]
        last_sc = max(i for i, k in enumerate(rotated) if k == "SC")
        first_sh = min(i for i, k in enumerate(rotated) if k == "SH")
        if last_sc < first_sh:
            return start
    return None


def classify(p: Polycycle) -> ClassifyResult:
    """Combinatorial classification of the polycycle.

    balanced: the depth profile returns to 0 (equivalently #SC = #SH,
    for every basepoint at once).  one_turn: some cyclic basepoint
    makes all SC crossings precede all SH crossings.  superreal: every
    SC/SH vertex carries the attestation flag.  height: max |depth|
    along the profile, taken from the one-turn basepoint when one
    exists (it is basepoint-dependent otherwise; the document order is
    used then, and no downstream consumer reads it in that case).
    """
    kinds = [v.kind for v in p.vertices]
    balanced = kinds.count("SC") == kinds.count("SH")
    start = _one_turn_start(p.vertices)
    one_turn = start is not None
    superreal = all(v.superreal for v in p.vertices if v.kind in ("SC", "SH"))
    profile = depth_profile(p, start if one_turn else 0)
    height = max((abs(d) for d in profile), default=0)
    return ClassifyResult(
        depth_profile=depth_profile(p, 0),
        balanced=balanced,
        one_turn=one_turn,
        superreal=superreal,
        height=height,
        turn_start_index=start,
        corollary_applies=balanced and one_turn and superreal,
    )


def assemble_return_map(p: Polycycle):
    """Return map of the polycycle as a grammar expression.

    Only defined when ``classify(p).corollary_applies``: the map is
    read off at the one-turn basepoint, each vertex contributing its
    correction series at the current depth followed by its chart change
    (Exp for SC, Log for SH, none for H), each edge its transition map
    at the new depth.  The affine flanks wrap the whole cycle.  With
    that basepoint the depth runs down to -height and monotonically
    back, so ``expr_normalize`` of the result has peak depth equal to
    the height with no extra padding.
    """
    c = classify(p)
    if not c.corollary_applies:
        missing = [
            name
            for name, ok in (
                ("balanced", c.balanced),
                ("one-turn", c.one_turn),
                ("superreal", c.superreal),
            )
            if not ok
        ]
        raise PreconditionError(
            "return-map assembly requires a balanced, one-turn, superreal "
            f"polycycle; this one is not {', '.join(missing)}"
        )
    n = len(p.vertices)
    start = c.turn_start_index

    app = []
    if not p.affine_right.is_identity:
        app.append(p.affine_right)
    for i in range(n):
        j = (start + i) % n
        v = p.vertices[j]
        app.append(NC(v.map if v.map is not None else DulacSeries.identity()))
        if v.kind == "SC":
            app.append(Exp)
        elif v.kind == "SH":
            app.append(Log)
        em = p.edge_maps[j]
        if em is not None:
            app.append(NC(em))
    if not p.affine_left.is_identity:
        app.append(p.affine_left)
    return Compose(tuple(reversed(app)))


def _parse_affine(raw, where: str) -> Affine:
    if not isinstance(raw, list) or len(raw) != 2:
        raise ParseError("expected a two-element array [alpha, beta]", location=where)
    try:
        vals = [Fraction(v) if isinstance(v, int) else Fraction(str(v)) for v in raw]
    except (ValueError, TypeError):
        raise ParseError(f"non-numeric affine entry {raw!r}", location=where) from None
    try:
        return Affine(vals[0], vals[1])
    except Exception as exc:
        raise ParseError(str(exc), location=where) from None


def _parse_map(raw, where: str) -> DulacSeries:
    if not isinstance(raw, str):
        raise ParseError("series literal must be a string", location=where)
    try:
        ser = parse_series(raw)
    except ParseError as exc:
        raise ParseError(f"bad series literal: {exc}", location=where) from None
    if ser.c0 != 0:
        raise ParseError(
            f"series must have zero constant term, got {ser.c0}", location=where
        )
    return ser


def parse_polycycle(document: str) -> Polycycle:
    """Parse the TOML polycycle document format.

    Each ``[[vertex]]`` table needs ``kind`` ("H", "SC", "SH"); SC/SH
    vertices must carry an explicit ``superreal`` boolean.  Optional
    per-vertex keys: ``map`` (series literal for the correction at the
    vertex) and ``edge`` (series literal for the transition map on the
    outgoing edge).  An optional ``[options]`` table takes
    ``affine_left``/``affine_right`` as ``[alpha, beta]`` pairs.
    """
    try:
        import tomllib  # py311+
    except ModuleNotFoundError:  # pragma: no cover
        import tomli as tomllib
    try:
        doc = tomllib.loads(document)
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(f"not valid TOML: {exc}") from None

    known_top = {"vertex", "options"}
    for key in doc:
        if key not in known_top:
            raise ParseError(f"unknown top-level table {key!r}", location=key)

    raw_vertices = doc.get("vertex")
    if not raw_vertices:
        raise ParseError("document defines no [[vertex]] tables")

    vertices = []
    edges = []
    for idx, table in enumerate(raw_vertices):
        where = f"vertex {idx}"
        if not isinstance(table, dict):
            raise ParseError("vertex entry is not a table", location=where)
        unknown = set(table) - {"kind", "superreal", "map", "edge"}
        if unknown:
            raise ParseError(
                f"unknown vertex keys {sorted(unknown)}", location=where
            )
        kind = table.get("kind")
        if kind not in VERTEX_KINDS:
            raise ParseError(
                f"unknown vertex kind {kind!r}; expected one of {VERTEX_KINDS}",
                location=where,
            )
        superreal = table.get("superreal")
        if kind in ("SC", "SH"):
            if not isinstance(superreal, bool):
                raise ParseError(
                    f"{kind} vertex requires an explicit boolean 'superreal' key",
                    location=where,
                )
        else:
            superreal = bool(superreal) if superreal is not None else False
        vmap = _parse_map(table["map"], where) if "map" in table else None
        vertices.append(Vertex(kind=kind, superreal=superreal, map=vmap))
        edges.append(_parse_map(table["edge"], where) if "edge" in table else None)

    options = doc.get("options", {})
    if not isinstance(options, dict):
        raise ParseError("[options] is not a table", location="options")
    unknown = set(options) - {"affine_left", "affine_right"}
    if unknown:
        raise ParseError(f"unknown option keys {sorted(unknown)}", location="options")
    aff_l = (
        _parse_affine(options["affine_left"], "options.affine_left")
        if "affine_left" in options
        else Affine(1, 0)
    )
    aff_r = (
        _parse_affine(options["affine_right"], "options.affine_right")
        if "affine_right" in options
        else Affine(1, 0)
    )

    return Polycycle(
        vertices=tuple(vertices),
        edge_maps=tuple(edges),
        affine_left=aff_l,
        affine_right=aff_r,
    )


def figure_one_polycycle(superreal: bool = True) -> Polycycle:
    """The reference ten-vertex, height-3, one-turn balanced polycycle."""
    kinds = ["SC", "SC", "H", "H", "H", "SC", "H", "SH", "SH", "SH"]
    return Polycycle(
        vertices=tuple(
            Vertex(kind=k, superreal=superreal if k != "H" else False) for k in kinds
        )
    )
