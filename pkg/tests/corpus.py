"""Shared corpora for the test suite.

Builders only; every test that consumes these freezes its own expected
values.  The expression corpus is seeded, so its 50 members and their
verdict classes never change between runs.
"""

import cmath
import math
import random
from fractions import Fraction

from oneturn.cochains import jumps_from_config, nc_witness_cochain, synthesize_simple
from oneturn.expr import NC, Affine, Compose, Exp, Log
from oneturn.partitions import (
    Cell,
    GeneralizedNeighborhood,
    METRIC_BALL,
    OrientedArc,
    Partition,
)
from oneturn.domains import HalfPlane
from oneturn.series import DulacSeries, conj_affine_by_exp, parse_series

Y1 = 0.75 * math.pi


# -- synthesized cochains --------------------------------------------------------


def pair_entries(coef: float, n: int = 1) -> list:
    """Config entries for the conjugate jump pair on lines +-n.

    The literal is adapted to its line so the certificate
    |delta| <= coef * exp(-exp(Re tau)) holds with equality there.
    """
    y = Y1 * n
    return [
        {"n": n, "expr": f"{coef!r} * exp(-exp(t - {y!r}j))", "C": coef, "Cprime": 1.0},
        {"n": -n, "expr": f"-{coef!r} * exp(-exp(t + {y!r}j))", "C": coef, "Cprime": 1.0},
    ]


def unit_pair_jumps():
    """The acceptance corpus jumps: modulus exactly exp(-exp(Re tau))."""
    return jumps_from_config(
        {"entries": pair_entries(1.0), "real_symmetric": True}
    )


def acceptance_cochain():
    """Simple cochain with jump exp(-exp(Re tau)) on the line Im = 3pi/4."""
    return synthesize_simple(0.0, parse_series("z", order=8), unit_pair_jumps())


def witness_family():
    """Accumulation cochains whose real-axis deviation is known exactly.

    Returns (cochain, deviation) pairs; the deviation lambda*exp(-exp(x))
    is the optional global perturbation, zero for the unperturbed ones.
    """
    out = []
    for lam, coef, series_text in (
        (0.0, 0.05, "z"),
        (0.0, 0.5, "z + E^-1"),
        (1e-3, 0.05, "z + 1/2*E^-1 - 3*E^-2"),
        (1e-6, 1.0, "z"),
    ):
        jumps = jumps_from_config(
            {"entries": pair_entries(coef), "real_symmetric": True}
        )
        f = nc_witness_cochain(
            0.0, parse_series(series_text, order=8), jumps, perturbation=lam
        )

        def dev(x: float, lam=lam) -> float:
            return lam * math.exp(-math.exp(x)) if lam else 0.0

        out.append((f, dev))
    return out


# -- clustered polyline partitions ------------------------------------------------


def clustered_partition(n_points: int = 1000, eps: float = 0.5, seed: int = 7):
    """Polyline partition with n_points singular points in tight clusters.

    Four points per cluster, each cluster within eps/40 of its center;
    centers sit on a jittered grid with spacing 3*eps so no two clusters
    interact.  Every singular point anchors one bent spoke arc of length
    about 0.8*eps, so the repartition surgery has boundary to reroute.
    Returns (partition, cluster_of_arc) where cluster_of_arc maps arc ids
    to cluster indices for locality-aware comparisons.
    """
    if n_points % 4:
        raise ValueError("n_points must be a multiple of 4")
    rng = random.Random(seed)
    n_clusters = n_points // 4
    side = math.ceil(math.sqrt(n_clusters))
    arcs = []
    singular = []
    cluster_of_arc = {}
    k = 0
    for i in range(side):
        for j in range(side):
            if k >= n_clusters:
                break
            cx = 3.0 * eps * i + eps * 0.25 * (rng.random() - 0.5)
            cy = 3.0 * eps * j + eps * 0.25 * (rng.random() - 0.5)
            center = complex(cx, cy)
            for s in range(4):
                r = eps / 40.0 * rng.random()
                phi = 2.0 * math.pi * rng.random()
                p = center + cmath.rect(r, phi)
                singular.append(p)
                out_dir = 2.0 * math.pi * rng.random()
                bend = out_dir + 0.6 * (rng.random() - 0.5)
                mid = p + cmath.rect(0.45 * eps, out_dir)
                end = mid + cmath.rect(0.35 * eps, bend)
                arc_id = f"c{k}_s{s}"
                arcs.append(
                    OrientedArc(
                        arc_id=arc_id,
                        left_cell="L",
                        right_cell="R",
                        kind="polyline",
                        points=(p, mid, end),
                    )
                )
                cluster_of_arc[arc_id] = k
            k += 1
    part = Partition(
        total_domain=HalfPlane(-1e9),
        cells=(Cell("L"), Cell("R")),
        arcs=tuple(arcs),
        singular_points=tuple(singular),
        neighborhood=GeneralizedNeighborhood(10.0 * eps, METRIC_BALL),
        kind="polyline",
    )
    return part, cluster_of_arc


# -- polycycle documents -----------------------------------------------------------


FIGURE_ONE_KINDS = ("SC", "SC", "H", "H", "H", "SC", "H", "SH", "SH", "SH")


def figure_one_toml(superreal: bool = True, edits: dict | None = None) -> str:
    """TOML document for the ten-vertex reference polycycle.

    `edits` maps vertex index to extra key lines, e.g. {0: 'map = "z + E^-1"'}.
    """
    blocks = []
    for idx, kind in enumerate(FIGURE_ONE_KINDS):
        lines = ["[[vertex]]", f'kind = "{kind}"']
        if kind != "H":
            lines.append(f"superreal = {'true' if superreal else 'false'}")
        if edits and idx in edits:
            lines.append(edits[idx])
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def unbalanced_toml() -> str:
    return "\n".join(
        [
            "[[vertex]]",
            'kind = "SC"',
            "superreal = true",
            "",
            "[[vertex]]",
            'kind = "H"',
            "",
        ]
    )


def ch_document_toml(coef: float = 0.05) -> str:
    y = Y1
    return "\n".join(
        [
            "a = 0.0",
            "eps = 0.3",
            "n_lines = 8",
            "",
            "[series]",
            'literal = "z + E^-1"',
            "",
            "[jumps]",
            "real_symmetric = true",
            "",
            "[[jumps.entries]]",
            "n = 1",
            f'expr = "{coef!r} * exp(-exp(t - {y!r}j))"',
            f"C = {coef!r}",
            "Cprime = 1.0",
            "",
            "[[jumps.entries]]",
            "n = -1",
            f'expr = "-{coef!r} * exp(-exp(t + {y!r}j))"',
            f"C = {coef!r}",
            "Cprime = 1.0",
            "",
        ]
    )


# -- expression corpus --------------------------------------------------------------


def _random_series(rng: random.Random, order: int = 6, min_terms: int = 1):
    coeffs = {}
    n_terms = rng.randint(min_terms, 3)
    idxs = rng.sample(range(1, order + 1), n_terms)
    for n in idxs:
        num = rng.randint(-8, 8)
        if num == 0:
            num = 1
        coeffs[n] = Fraction(num, rng.randint(1, 4))
    return DulacSeries(0, coeffs, order)


def _wrap(depth: int, *inner):
    """Conjugate the inner factors down `depth` exponential levels."""
    return Compose(tuple([Log] * depth) + tuple(inner) + tuple([Exp] * depth))


def expression_corpus():
    """50 seeded expressions at depth at most 3, tagged by expected class.

    Returns a list of (tag, expression) with tag one of "identity",
    "fpf", "refused".  Mix: 12 exact identities (some dressed, two with
    declared jump scales on identity series), 33 fixed-point-free
    (affine-decisive and series-decisive at depths 1 to 3), 5 refused
    (inexact log-of-rational shifts from affine conjugation).
    """
    rng = random.Random(20260815)
    corpus = []

    zero6 = DulacSeries(0, {}, 6)
    identities = [
        Compose((Affine(1, 0),)),
        NC(zero6),
        Compose((Log, Exp)),
        Compose((Log, Log, Exp, Exp)),
        Compose((Log, Log, Log, Exp, Exp, Exp)),
        Compose((Log, NC(zero6), Exp)),
        Compose((Affine(Fraction(1, 2), Fraction(-3, 2)), Affine(2, 3))),
        Compose((Affine(Fraction(1, 3), Fraction(5, 3)), Log, Exp, Affine(3, -5))),
        Compose((Log, Log, NC(zero6), Exp, Exp)),
        Compose((NC(zero6), Log, NC(zero6), Exp)),
        Compose((NC(zero6, 1e-9),)),
        Compose((Log, NC(zero6, 2e-8), Exp)),
    ]
    corpus.extend(("identity", e) for e in identities)

    fpf = [
        Compose((Affine(1, Fraction(3, 7)),)),
        Compose((Affine(2, 0),)),
        Compose((Affine(Fraction(1, 2), 5),)),
        Compose((Affine(1, -2), Log, Exp)),
        Compose((Log, Exp, Affine(Fraction(5, 4), Fraction(1, 3)))),
    ]
    while len(fpf) < 10:
        a = Fraction(rng.randint(1, 5), rng.randint(1, 5))
        b = Fraction(rng.randint(-6, 6), rng.randint(1, 3))
        if a == 1 and b == 0:
            continue
        fpf.append(Compose((Affine(a, b),)))
    for depth in (1, 2, 3):
        for _ in range(6):
            s = _random_series(rng)
            fpf.append(_wrap(depth, NC(s)))
    # interleaved towers: series at two different depths
    for _ in range(5):
        s1 = _random_series(rng)
        s2 = _random_series(rng)
        fpf.append(
            Compose((Log, NC(s1), Log, NC(s2), Exp, Exp))
        )
    corpus.extend(("fpf", e) for e in fpf)

    refused = [
        _wrap(1, NC(conj_affine_by_exp(2, 0, 6))),
        _wrap(1, NC(conj_affine_by_exp(3, 1, 6))),
        _wrap(2, NC(conj_affine_by_exp(Fraction(1, 2), 0, 6))),
        _wrap(1, NC(conj_affine_by_exp(5, Fraction(2, 3), 6))),
        _wrap(3, NC(conj_affine_by_exp(2, -1, 6))),
    ]
    corpus.extend(("refused", e) for e in refused)

    assert len(corpus) == 50
    return corpus
