"""Cauchy kernel integrals over partition boundaries and their estimates.

The central object is the transform

    c(f)(zeta) = sum over arcs (1/2 pi i) integral of df(tau)/(tau - zeta)

where df is the oriented coboundary (left component minus right).  Each
geometric arc is integrated once, which realizes the half-weighted sum
over ordered cell pairs.  Unbounded arcs are truncated where the decay
certificate |df| <= C exp(-C' exp(Re tau)) pushes the tail below the
tolerance; arcs without a certificate must be bounded.

Side values of the transform on the boundary itself are never computed
by principal values: `jump_residual` and `trivialization_residual`
approach the arc along the normal and extrapolate the analytic limit in
the offset, which is the same one-sided-limit notion the jump relations
are stated in.

The module deliberately avoids importing cochain classes; every function
works through the small surface it needs (``partition``, ``jumps``,
``evaluate``), so the cochain layer can build its components on top of
the kernels here without an import cycle.
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass
from typing import Callable, Optional

from scipy.integrate import quad

from .errors import (
    CapabilityError,
    ConvergenceError,
    InputError,
    PreconditionError,
    QuadratureError,
)
from .partitions import OrientedArc, Partition

_TWO_PI = 2.0 * math.pi

#: extrapolation offsets used for one-sided boundary limits
_ETA_LADDER = tuple(0.1 / 2**k for k in range(6))

#: arguments of exp() beyond this would overflow a double
_EXP_OVERFLOW = 700.0


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances for the adaptive contour quadrature.

    tail_threshold is the fraction of tol granted to the truncated tail;
    eta_min is the closest allowed approach of an evaluation point to
    the contour.
    """

    tol: float = 1e-10
    tail_threshold: float = 0.1
    eta_min: float = 1e-3
    max_subdivisions: int = 200

    def __post_init__(self) -> None:
        if not (self.tol > 0 and self.eta_min > 0):
            raise InputError("tol and eta_min must be positive")
        if not 0 < self.tail_threshold <= 1:
            raise InputError("tail_threshold must lie in (0, 1]")
        if self.max_subdivisions < 10:
            raise InputError("max_subdivisions must be at least 10")


DEFAULT_QUADRATURE = QuadratureConfig()


@dataclass(frozen=True)
class CHResult:
    value: complex
    error_estimate: float
    truncation_point: float

    def __post_init__(self) -> None:
        if self.error_estimate < 0:
            raise InputError("error estimate must be nonnegative")


def _quad_real(fn, a, b, cfg: QuadratureConfig, points=None):
    kwargs = {
        "limit": cfg.max_subdivisions,
        "epsabs": cfg.tol * 0.05,
        "epsrel": 1e-11,
        "full_output": 1,
    }
    pts = [p for p in (points or ()) if a < p < b]
    if pts:
        kwargs["points"] = pts
    out = quad(fn, a, b, **kwargs)
    value, abserr = out[0], out[1]
    if len(out) == 4 and abserr > cfg.tol:
        info = out[2]
        last = info.get("last", 0)
        if last:
            elist = info["elist"][:last]
            worst = max(range(last), key=lambda i: elist[i])
            interval = (info["alist"][worst], info["blist"][worst])
        else:
            interval = (a, b)
        raise QuadratureError(
            f"quadrature did not converge below {cfg.tol:g} "
            f"(estimate {abserr:.3g}); worst subinterval {interval}"
        )
    return value, abserr


def _quad_complex(fn, a, b, cfg: QuadratureConfig, points=None):
    re, err_re = _quad_real(lambda t: fn(t).real, a, b, cfg, points)
    im, err_im = _quad_real(lambda t: fn(t).imag, a, b, cfg, points)
    return complex(re, im), err_re + err_im


def tail_bound(C: float, Cprime: float, T: float) -> float:
    """Bound for the integral of C exp(-C' exp(t)) over [T, infinity)."""
    if C == 0.0:
        return 0.0
    u = Cprime * math.exp(min(T, _EXP_OVERFLOW))
    if u > _EXP_OVERFLOW:
        return 0.0
    return C * math.exp(-u) / u


def truncation_point(
    C: float, Cprime: float, x0: float, re_zeta: float, cfg: QuadratureConfig
) -> tuple:
    """Abscissa T past which the certified tail is below the tail budget.

    The tail of the kernel integral beyond T >= max(Re zeta + 1, x0 + 1)
    is at most the tail of the plain |jump| integral, since the kernel
    distance is then at least 1.
    """
    if not (C > 0 and Cprime > 0):
        raise PreconditionError(
            "decay certificate missing: unbounded arcs need C, C' > 0"
        )
    target = cfg.tol * cfg.tail_threshold
    T = max(re_zeta + 1.0, x0 + 1.0)
    for _ in range(200):
        bound = tail_bound(C, Cprime, T)
        if bound < target:
            return T, bound
        T += 0.5
    raise QuadratureError(
        f"certified tail never drops below {target:g} (C={C:g}, C'={Cprime:g})"
    )


def _arc_of(partition: Partition, arc_id: str) -> OrientedArc:
    return partition.arc(arc_id)


def _entry_kernel_integral(
    partition: Partition,
    entry,
    zeta: complex,
    cfg: QuadratureConfig,
    kernel_power: int = 1,
    factor: float = 1.0,
):
    """One declared jump's contribution (1/2 pi i) int delta/(tau-zeta)^p dtau.

    Returns (value, error_estimate, truncation_point).
    """
    arc = _arc_of(partition, entry.arc_id)
    fn = entry.fn
    if arc.kind == "hline":
        T, tail = truncation_point(entry.C, entry.Cprime, arc.x_start, zeta.real, cfg)
        y = arc.y

        def integrand(t: float) -> complex:
            tau = complex(t, y)
            return factor * fn(tau) / (tau - zeta) ** kernel_power

        val, err = _quad_complex(
            integrand, arc.x_start, T, cfg, points=[zeta.real]
        )
        # the kernel distance beyond T is at least 1, so the jump tail bounds it
        return val / (2j * math.pi), (err + tail * abs(factor)) / _TWO_PI, T
    if arc.kind == "circle":
        c, r = arc.center, arc.radius

        def integrand(t: float) -> complex:
            tau = c + r * cmath.exp(2j * math.pi * t)
            dtau = 2j * math.pi * r * cmath.exp(2j * math.pi * t)
            return factor * fn(tau) * dtau / (tau - zeta) ** kernel_power

        rel = zeta - c
        pts = None
        if abs(abs(rel) - r) < r:
            t_near = (cmath.phase(rel) / _TWO_PI) % 1.0
            pts = [t_near]
        val, err = _quad_complex(integrand, 0.0, 1.0, cfg, points=pts)
        return val / (2j * math.pi), err / _TWO_PI, 0.0
    if arc.kind == "polyline":
        total = 0j
        err_total = 0.0
        for p0, p1 in zip(arc.points, arc.points[1:]):
            seg = p1 - p0

            def integrand(s: float, p0=p0, seg=seg) -> complex:
                tau = p0 + s * seg
                return factor * fn(tau) * seg / (tau - zeta) ** kernel_power

            val, err = _quad_complex(integrand, 0.0, 1.0, cfg)
            total += val
            err_total += err
        return total / (2j * math.pi), err_total / _TWO_PI, 0.0
    raise CapabilityError(
        "declared-jump transforms over mapped arcs are not supported; "
        "evaluate in the base chart instead"
    )


def transform_from_jumps(
    partition: Partition,
    entries,
    zeta: complex,
    cfg: QuadratureConfig,
    kernel_power: int = 1,
    factor: float = 1.0,
) -> CHResult:
    """Plain transform value from declared jump entries (no side logic)."""
    total = 0j
    err = 0.0
    Tmax = 0.0
    for entry in entries:
        if _entry_is_zero(entry):
            continue
        val, e, T = _entry_kernel_integral(
            partition, entry, zeta, cfg, kernel_power, factor
        )
        total += val
        err += e
        Tmax = max(Tmax, T)
    return CHResult(total, err, Tmax)


def _entry_is_zero(entry) -> bool:
    return getattr(entry, "is_zero", False)


def entry_boundary_value(
    partition: Partition,
    entry,
    zeta: complex,
    cfg: QuadratureConfig,
    side: int,
):
    """Value of one hline entry's integral with the singularity split off.

    Writing pr for the projection of zeta onto the line, the integral
    splits as

        int (delta(tau) - delta(pr))/(tau - zeta) dtau  +  delta(pr) * K

    whose first part has a removable singularity and whose kernel factor
    K has the closed form log(T + iy - zeta) - log(x0 + iy - zeta).  On
    the line itself the second logarithm's branch is resolved by `side`
    (+1 approaches from above, -1 from below), which yields the one-sided
    boundary value without extrapolation.  Valid whenever Re zeta is
    interior to the truncated ray; other positions fall back to the
    plain kernel integral.
    """
    arc = _arc_of(partition, entry.arc_id)
    if arc.kind != "hline":
        raise CapabilityError("regularized boundary values exist for hline arcs only")
    if side not in (1, -1):
        raise InputError("side must be +1 (above) or -1 (below)")
    y = arc.y
    x0 = arc.x_start
    u = zeta.real
    v = zeta.imag - y
    T, tail = truncation_point(entry.C, entry.Cprime, x0, u, cfg)
    if not x0 + 1e-3 < u < T - 0.5:
        if abs(v) < cfg.eta_min:
            raise CapabilityError(
                "boundary value near the ray's endpoint is not regularizable"
            )
        return _entry_kernel_integral(partition, entry, zeta, cfg)[:2]
    fn = entry.fn
    d_pr = fn(complex(u, y))

    def integrand(t: float) -> complex:
        tau = complex(t, y)
        return (fn(tau) - d_pr) / (tau - zeta)

    val, err = _quad_complex(integrand, x0, T, cfg, points=[u])
    if abs(v) < 1e-13:
        log_left = complex(math.log(u - x0), -math.pi * side)
        log_right = complex(math.log(T - u), 0.0)
    else:
        log_left = cmath.log(complex(x0 - u, -v))
        log_right = cmath.log(complex(T - u, -v))
    K = log_right - log_left
    total = (val + d_pr * K) / (2j * math.pi)
    return total, (err + tail) / _TWO_PI


def _resolve_arc(f, arc) -> OrientedArc:
    if isinstance(arc, str):
        return f.partition.arc(arc)
    return arc


def _declared_entries(f):
    jumps = getattr(f, "jumps", None)
    if jumps is None:
        return None
    return tuple(jumps.entries)


def ch_transform(f, zeta: complex, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> CHResult:
    """Transform of the cochain's coboundary at an off-boundary point.

    Declared jumps drive the integration when the cochain carries them;
    otherwise the coboundary is sampled per arc, arcs that sample to zero
    contribute exactly zero, and a nonzero coboundary on an unbounded arc
    without a certificate is refused.
    """
    zeta = complex(zeta)
    entries = _declared_entries(f)
    if entries is not None:
        live = [e for e in entries if not _entry_is_zero(e)]
        if not live:
            return CHResult(0j, 0.0, 0.0)
        dist = f.partition.boundary_distance(zeta)
        if dist < cfg.eta_min:
            raise PreconditionError(
                f"evaluation point within {cfg.eta_min:g} of the boundary; "
                "side values come from the extrapolating residual routines"
            )
        return transform_from_jumps(f.partition, live, zeta, cfg)

    from .cochains import coboundary_eval

    dist = f.partition.boundary_distance(zeta)
    if f.partition.arcs and dist < cfg.eta_min:
        raise PreconditionError(
            f"evaluation point within {cfg.eta_min:g} of the boundary"
        )
    total = 0j
    err = 0.0
    for arc in f.partition.arcs:
        ts = (0.06, 0.18, 0.31, 0.44, 0.56, 0.69, 0.81, 0.94)
        samples = [coboundary_eval(f, arc, arc.point(t)) for t in ts]
        scale = 1.0 + max(abs(s) for s in samples)
        if all(abs(s) < 1e-14 * scale for s in samples):
            continue
        if arc.unbounded:
            raise PreconditionError(
                f"arc {arc.arc_id} has a nonzero coboundary but no decay "
                "certificate; the transform tail cannot be truncated"
            )
        if arc.kind == "circle":
            c, r = arc.center, arc.radius

            def integrand(t: float) -> complex:
                tau = c + r * cmath.exp(2j * math.pi * t)
                dtau = 2j * math.pi * r * cmath.exp(2j * math.pi * t)
                return coboundary_eval(f, arc, tau) * dtau / (tau - zeta)

            val, e = _quad_complex(integrand, 0.0, 1.0, cfg)
        else:
            val = 0j
            e = 0.0
            for p0, p1 in zip(arc.points, arc.points[1:]):
                seg = p1 - p0

                def integrand(s: float, p0=p0, seg=seg) -> complex:
                    tau = p0 + s * seg
                    return coboundary_eval(f, arc, tau) * seg / (tau - zeta)

                v2, e2 = _quad_complex(integrand, 0.0, 1.0, cfg)
                val += v2
                e += e2
        total += val / (2j * math.pi)
        err += e / _TWO_PI
    return CHResult(total, err, 0.0)


def _neville_to_zero(etas, values):
    """Polynomial extrapolation of (eta, value) data to eta = 0.

    Returns (limit, diagonal history).  The one-sided values are analytic
    in the offset with a convergence radius set by the distance to the
    next boundary component, so the diagonal settles geometrically; a
    growing diagonal signals a point where no analytic limit exists.
    """
    n = len(values)
    tab = list(values)
    history = [tab[0]]
    for level in range(1, n):
        new = []
        for i in range(n - level):
            xi, xj = etas[i], etas[i + level]
            new.append((xj * tab[i] - xi * tab[i + 1]) / (xj - xi))
        tab = new
        history.append(tab[0])
    return tab[0], history


def _extrapolate(sampler: Callable[[float], complex], scale: float):
    values = [sampler(eta) for eta in _ETA_LADDER]
    limit, history = _neville_to_zero(_ETA_LADDER, values)
    diffs = [abs(b - a) for a, b in zip(history, history[1:])]
    if len(diffs) >= 2 and diffs[-1] > 10 * diffs[0] and diffs[-1] > 1e-9 * scale:
        raise ConvergenceError(
            "one-sided limit extrapolation diverges", residual=diffs[-1]
        )
    return limit


def jump_residual(
    f, arc, z: complex, cfg: QuadratureConfig = DEFAULT_QUADRATURE
) -> float:
    """|extrapolated transform jump across the arc - measured coboundary|.

    The transform's one-sided limits are reached along the arc's normal
    with offsets 0.1, 0.05, ...; their difference must reproduce the
    coboundary exactly in the limit, so the residual is a direct check
    of the jump relations against an independent evaluation route.
    """
    from .cochains import coboundary_eval

    arc = _resolve_arc(f, arc)
    z = complex(z)
    if arc.distance_to(z) > 1e-9 * (1.0 + abs(z)):
        raise InputError("z must lie on the arc")
    normal = arc.left_normal_at(z)

    def sided_jump(eta: float) -> complex:
        up = ch_transform(f, z + eta * normal, cfg).value
        down = ch_transform(f, z - eta * normal, cfg).value
        return up - down

    delta = coboundary_eval(f, arc, z)
    limit = _extrapolate(sided_jump, scale=1.0 + abs(delta))
    return abs(limit - delta)


def trivialization_residual(
    f, z: complex, cfg: QuadratureConfig = DEFAULT_QUADRATURE
) -> float:
    """Mismatch of f - c(f) across the arc through z.

    The transform's jump equals the cochain's coboundary exactly when
    the difference f - c(f) glues to one analytic function near the arc;
    the returned value extrapolates |(f_left - c) - (f_right - c)| to
    the arc and is zero precisely in the gluing case.
    """
    z = complex(z)
    candidates = [a for a in f.partition.arcs if a.distance_to(z) < 1e-9 * (1 + abs(z))]
    if not candidates:
        raise InputError("z does not lie on any arc of the partition")
    arc = candidates[0]
    normal = arc.left_normal_at(z)
    left = f.components[arc.left_cell]
    right = f.components[arc.right_cell]

    def glued_gap(eta: float) -> complex:
        zl = z + eta * normal
        zr = z - eta * normal
        a = left.value(zl) - ch_transform(f, zl, cfg).value
        b = right.value(zr) - ch_transform(f, zr, cfg).value
        return a - b

    scale = 1.0 + abs(left.value(z + 0.1 * normal))
    return abs(_extrapolate(glued_gap, scale=scale))


def integral_of_abs_jump(partition: Partition, entry, cfg: QuadratureConfig):
    """Integral of |delta| along the entry's arc, certified truncation."""
    arc = _arc_of(partition, entry.arc_id)
    fn = entry.fn
    if arc.kind == "hline":
        T, tail = truncation_point(entry.C, entry.Cprime, arc.x_start, arc.x_start, cfg)
        y = arc.y
        val, err = _quad_real(
            lambda t: abs(fn(complex(t, y))), arc.x_start, T, cfg
        )
        return val + tail, err
    if arc.kind == "circle":
        c, r = arc.center, arc.radius
        val, err = _quad_real(
            lambda t: abs(fn(c + r * cmath.exp(2j * math.pi * t))) * _TWO_PI * r,
            0.0,
            1.0,
            cfg,
        )
        return val, err
    if arc.kind == "polyline":
        total = 0.0
        err_total = 0.0
        for p0, p1 in zip(arc.points, arc.points[1:]):
            seg = abs(p1 - p0)
            val, err = _quad_real(
                lambda s, p0=p0, p1=p1, seg=seg: abs(fn(p0 + s * (p1 - p0))) * seg,
                0.0,
                1.0,
                cfg,
            )
            total += val
            err_total += err
        return total, err_total
    raise CapabilityError("cannot integrate |jump| over mapped arcs")


def _sup_entry_on_segment(entry, arc: OrientedArc, x_left: float) -> float:
    """Certified upper bound for |delta| on the arc beyond Re = x_left."""
    if arc.kind == "hline":
        u = entry.Cprime * math.exp(min(x_left, _EXP_OVERFLOW))
        if u > _EXP_OVERFLOW:
            return 0.0
        return entry.C * math.exp(-u)
    samples = arc.sample(tuple(i / 32 for i in range(33)))
    return max(abs(entry.fn(s)) for s in samples) * (1 + 1e-9)


def uniform_ch_bound(
    f,
    zeta0: complex,
    d: float,
    L: float,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    corrected: bool = False,
) -> float:
    """The uniform transform estimate around a disk of radius d.

    Returns [ sum over arcs (1/2 pi) int |df| + L * sup over the closed
    disk of |df| ] / (2 pi d), following the stated normalization; the
    `corrected` flag divides by d only, the normalization suggested by
    the underlying proof's volume estimate.  The disk must not contain
    singular points.
    """
    zeta0 = complex(zeta0)
    if not d > 0:
        raise InputError("d must be positive")
    for s in f.partition.singular_points:
        if abs(s - zeta0) <= d:
            raise PreconditionError(
                f"singular point {s} inside the closed ball of radius {d:g}"
            )
    entries = _declared_entries(f)
    if entries is None:
        raise PreconditionError(
            "the uniform estimate needs declared jumps so the boundary "
            "integral and disk sup are certifiable"
        )
    agg = 0.0
    sup_ball = 0.0
    for entry in entries:
        if _entry_is_zero(entry):
            continue
        arc = _arc_of(f.partition, entry.arc_id)
        val, _ = integral_of_abs_jump(f.partition, entry, cfg)
        agg += val / _TWO_PI
        if arc.kind == "hline":
            dy = abs(zeta0.imag - arc.y)
            if dy <= d:
                half = math.sqrt(max(d * d - dy * dy, 0.0))
                seg_left = zeta0.real - half
                if seg_left < arc.x_start:
                    seg_left = arc.x_start
                if zeta0.real + half >= arc.x_start:
                    sup_ball = max(
                        sup_ball, _sup_entry_on_segment(entry, arc, seg_left)
                    )
        else:
            if arc.distance_to(zeta0) <= d:
                sup_ball = max(
                    sup_ball, _sup_entry_on_segment(entry, arc, zeta0.real - d)
                )
    denom = d if corrected else _TWO_PI * d
    return (agg + L * sup_ball) / denom


def global_sup_bound(
    f, boundary_sup: float, C_part: float, cfg: QuadratureConfig = DEFAULT_QUADRATURE
) -> float:
    """Maximum-modulus style bound: boundary sup plus the coboundary load.

    Returns boundary_sup + C_part * (int |df| + sup |df|), valid for
    bounded cochains on uniformly regular partitions; the caller vouches
    for boundedness, the partition's singular separation is checked here.
    """
    if boundary_sup < 0 or C_part < 0:
        raise InputError("boundary_sup and C_part must be nonnegative")
    if f.partition.singular_points and f.partition.uniformity_constant() <= 0:
        raise PreconditionError(
            "partition is not uniformly regular: coincident singular points"
        )
    entries = _declared_entries(f)
    if entries is None:
        raise PreconditionError(
            "the sup bound needs declared jumps to certify the coboundary terms"
        )
    total = 0.0
    sup_jump = 0.0
    for entry in entries:
        if _entry_is_zero(entry):
            continue
        arc = _arc_of(f.partition, entry.arc_id)
        val, _ = integral_of_abs_jump(f.partition, entry, cfg)
        total += val
        x_left = arc.x_start if arc.kind == "hline" else -math.inf
        sup_jump = max(sup_jump, _sup_entry_on_segment(entry, arc, x_left))
    return boundary_sup + C_part * (total + sup_jump)


def ch_trace_csv(
    f, zeta: complex, path: str, cfg: QuadratureConfig = DEFAULT_QUADRATURE, n: int = 200
) -> None:
    """Write (Re tau, |coboundary|, kernel integrand magnitude) rows.

    One block per declared entry, sampled uniformly up to the entry's
    truncation point; rows are exact reproductions of the integrand the
    transform sees, for plotting and regression diffs.
    """
    entries = _declared_entries(f)
    if entries is None:
        raise PreconditionError("trace output needs declared jumps")
    zeta = complex(zeta)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["arc_id", "re_tau", "abs_coboundary", "integrand_magnitude"])
        for entry in entries:
            arc = _arc_of(f.partition, entry.arc_id)
            if arc.kind == "hline":
                T, _ = truncation_point(
                    entry.C, entry.Cprime, arc.x_start, zeta.real, cfg
                )
                for i in range(n):
                    t = arc.x_start + (T - arc.x_start) * i / (n - 1)
                    tau = complex(t, arc.y)
                    dv = abs(entry.fn(tau))
                    kern = dv / (abs(tau - zeta) * _TWO_PI)
                    writer.writerow(
                        [entry.arc_id, repr(t), repr(dv), repr(kern)]
                    )
            else:
                for i in range(n):
                    t = i / (n - 1) * 0.999999
                    tau = arc.point(t)
                    dv = abs(entry.fn(tau))
                    kern = dv / (abs(tau - zeta) * _TWO_PI)
                    writer.writerow(
                        [entry.arc_id, repr(tau.real), repr(dv), repr(kern)]
                    )
