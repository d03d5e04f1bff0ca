"""Inductive fixed-point dichotomy for normalized return maps.

The engine peels a normalized expression one exponential level at a
time.  At each level it strips the right affine flank by conjugacy
(fixed points survive conjugation), tests the merged leading affine,
merges the two depth-0 correction blocks into a single boundary series
g1 = v o u, and tests that series for exact identity.  A non-identity
affine or series is decisive: the map is fixed-point free near +infty,
and the witness records which level forced it.  Exact identity at
every level down to the peak yields the Identity verdict.  Series
carrying an inexact shift ln(alpha), alpha != 1, make the identity
test undecidable in exact arithmetic, so the engine refuses rather
than guessing.

Perturbation budgets: an NC node may carry a certified bound
``jump_scale`` for corrections neglected in its own chart; a node at
depth d then contributes |jump_scale| * exp(-exp^{d+1}(x)) at the base
scale (one exponential level below its own series terms).  The numeric
threshold x0 attached to a fixed-point-free verdict is the smallest
probe x whose decisive deviation exceeds twice the total budget; with
no certified jumps the budget is zero and x0 is the first probe point
with a nonzero deviation sign.

``fixed_point_scan`` cross-validates a verdict numerically: exact
deviation signs on a grid, bisection-refined fixed points, the minimum
gap, and for each requested mu whether |g(x) - x| < exp(-mu exp^n(x))
holds across the grid.  It accepts either a grammar expression (exact
tower arithmetic, with a plain high-precision fallback where the
additive tower state cannot represent an intermediate) or a raw
callable.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass

import mpmath
from mpmath import mpf

from .errors import CertificateRefused, EvalDomainError, EvalRangeError
from .expr import (
    NC,
    Affine,
    Compose,
    MapExpr,
    deviation,
    expr_eval,
    expr_normalize,
    flatten,
    max_series_order,
)
from .series import DulacSeries, format_series, series_compose
from .towers import Tln, TReal

IDENTITY = "Identity"
FIXED_POINT_FREE = "FixedPointFree"
REFUSED = "Refused"

# Probe grid for the x0 threshold attached to decisive verdicts.
_X0_PROBE = tuple(range(1, 11))


@dataclass(frozen=True)
class LevelRecord:
    """What one reduction level saw and decided."""

    level: int
    stripped_b: Affine
    leading_affine: Affine
    boundary_series: DulacSeries
    is_identity: bool
    decisive: str | None = None  # None | "affine" | "series"

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "stripped_b": [str(self.stripped_b.alpha), str(self.stripped_b.beta)],
            "leading_affine": [
                str(self.leading_affine.alpha),
                str(self.leading_affine.beta),
            ],
            "boundary_series": format_series(self.boundary_series),
            "is_identity": self.is_identity,
            "decisive": self.decisive,
        }


@dataclass(frozen=True)
class ReductionTrace:
    levels: tuple

    def to_json(self) -> dict:
        return {"levels": [rec.to_json() for rec in self.levels]}


@dataclass(frozen=True)
class Verdict:
    kind: str
    level: int | None = None
    witness_affine: Affine | None = None
    witness_series: DulacSeries | None = None
    x0: float | None = None
    reason: str | None = None

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == FIXED_POINT_FREE:
            out["level"] = self.level
            if self.witness_affine is not None:
                out["witness_affine"] = [
                    str(self.witness_affine.alpha),
                    str(self.witness_affine.beta),
                ]
            if self.witness_series is not None:
                out["witness_series"] = format_series(self.witness_series)
            out["x0"] = self.x0
        if self.kind == REFUSED:
            out["reason"] = self.reason
        return out


def _merge_affine(second: Affine, first: Affine) -> Affine:
    return Affine(
        second.alpha * first.alpha, second.alpha * first.beta + second.beta
    )


def _flagged_shift(norm) -> DulacSeries | None:
    for f in flatten(norm):
        if isinstance(f, NC) and f.series.shift_inexact:
            return f.series
    return None


def reduce_step(e) -> tuple:
    """One level of the reduction: (LevelRecord, inner expression or None).

    The input is normalized first (a no-op if already normal).  The
    right affine b is stripped by conjugating with it, which merges it
    into the leading affine a = b o AffL; a != id is decisive, else the
    boundary blocks are merged to g1 = v o u and tested; if that too is
    identity the A-level is unwrapped and the depth-reduced inner
    expression returned for recursion.
    """
    norm, form = expr_normalize(e)
    flagged = _flagged_shift(norm)
    if flagged is not None:
        raise CertificateRefused(
            "boundary series carries the inexact shift "
            f"ln({flagged.shift_log_arg}); exact identity is undecidable",
            failing_hypothesis="exact rational series data",
        )
    factors = norm.factors
    b = factors[-1]
    a = _merge_affine(b, factors[0])
    n = form.peak
    if n == 0:
        g1 = factors[1]
        inner = None
    else:
        # v0 sits right after the left affine, u0 right before b
        g1 = _merge_nc_blocks(factors[1], factors[-2])
        inner = Compose(factors[3:-3])
    ident = g1.series.is_identity
    if not a.is_identity:
        decisive = "affine"
    elif not ident:
        decisive = "series"
    else:
        decisive = None
    rec = LevelRecord(
        level=-1,  # filled by the driver, which knows the absolute level
        stripped_b=b,
        leading_affine=a,
        boundary_series=g1.series,
        is_identity=ident and a.is_identity,
        decisive=decisive,
    )
    return rec, (inner if decisive is None else None)


def _merge_nc_blocks(v: NC, u: NC):
    fv, fu = v.series, u.series
    if fv.is_identity:
        merged = fu
    elif fu.is_identity:
        merged = fv
    else:
        merged = series_compose(fv, fu, min(fv.order, fu.order))
    if v.jump_scale is None and u.jump_scale is None:
        js = None
    else:
        js = (v.jump_scale or 0.0) + (u.jump_scale or 0.0)
    return NC(merged, js)


def _node_depths(norm, form):
    """(depth, NC) pairs for the normalized factor list, slot order."""
    ncs = [f for f in flatten(norm) if isinstance(f, NC)]
    return list(zip(form.depths, ncs))


def _perturbation_budget(norm, form, x: mpf) -> TReal:
    """Sum of certified correction bounds at the base scale."""
    total = TReal.zero()
    for depth, node in _node_depths(norm, form):
        if node.jump_scale:
            t = Tln.tower(depth + 1, x).neg()
            t = t.add(Tln.from_mpf(mpmath.log(abs(mpf(node.jump_scale)))))
            total = total.add(TReal.from_ln(1, t))
    return total


def _threshold_x0(e, guard: float, floor: float | None = None) -> float | None:
    norm, form = expr_normalize(e)
    if floor is None:
        probes = [float(x) for x in _X0_PROBE]
    else:
        probes = [float(x) for x in _X0_PROBE if x > floor]
        if not probes:
            probes = [floor]
    # look well past the last candidate: a deviation root hiding just
    # beyond the grid edge would otherwise sit inside the scan window
    probes += [probes[-1] + 2.0, probes[-1] + 6.0, probes[-1] + 12.0]
    seen = []
    for x in probes:
        try:
            dev = deviation(norm, mpf(x), guard)
        except (EvalDomainError, EvalRangeError):
            continue
        if dev.sign == 0:
            seen.append((x, 0, False))
            continue
        budget = _perturbation_budget(norm, form, mpf(x)).mul_mpf(mpf(2))
        ok = budget.sign == 0 or dev.cmp_magnitude(budget) > 0
        seen.append((x, dev.sign, ok))
    for i, (x, sign, ok) in enumerate(seen):
        if sign == 0 or not ok:
            continue
        # a later probe with a different sign, or an exact zero, means
        # the deviation still crosses a root somewhere past x
        if all(s == sign for _, s, _ in seen[i + 1 :]):
            return x
    return None


def dichotomy_verdict(e, guard: float = 1.0) -> tuple:
    """Full reduction: (Verdict, ReductionTrace).

    Identity only when every level reduced to exact identity;
    FixedPointFree carries the first decisive level, its witness, and
    the numeric threshold x0; an inexact shift anywhere yields Refused.
    """
    records = []
    current = e
    level = 0
    while True:
        try:
            rec, inner = reduce_step(current)
        except CertificateRefused as r:
            return (
                Verdict(kind=REFUSED, level=level, reason=str(r)),
                ReductionTrace(tuple(records)),
            )
        rec = dataclasses.replace(rec, level=level)
        records.append(rec)
        if rec.decisive == "affine":
            aff = rec.leading_affine
            floor = None
            if level == 0 and aff.alpha != 1:
                # the deviation vanishes at the affine's own fixed point
                # beta/(1-alpha); a threshold below that root would be
                # falsified by any scan that crosses it
                floor = float(aff.beta / (1 - aff.alpha)) + 1.0
            verdict = Verdict(
                kind=FIXED_POINT_FREE,
                level=level,
                witness_affine=aff,
                x0=_threshold_x0(e, guard, floor),
            )
            return verdict, ReductionTrace(tuple(records))
        if rec.decisive == "series":
            verdict = Verdict(
                kind=FIXED_POINT_FREE,
                level=level,
                witness_series=rec.boundary_series,
                x0=_threshold_x0(e, guard),
            )
            return verdict, ReductionTrace(tuple(records))
        if inner is None:
            return Verdict(kind=IDENTITY), ReductionTrace(tuple(records))
        current = inner
        level += 1


# --- numeric cross-validation ------------------------------------------


@dataclass(frozen=True)
class ScanPoint:
    x: float
    sign: int | None  # -1/0/+1, or None when unresolved
    gap: object  # mpf when materializable, else None
    gap_text: str  # exact description, e.g. "-exp(-exp^1(...))"


@dataclass(frozen=True)
class MuCheck:
    mu: float
    holds: bool
    first_violation: float | None


@dataclass(frozen=True)
class ScanReport:
    points: tuple
    sign_pattern: str
    fixed_points: tuple
    min_gap: object  # mpf or None
    min_gap_text: str
    mu_checks: tuple
    n: int
    partial: bool

    def to_json(self) -> dict:
        return {
            "sign_pattern": self.sign_pattern,
            "fixed_points": [float(fp) for fp in self.fixed_points],
            "min_gap": _num_text(self.min_gap) if self.min_gap is not None else None,
            "min_gap_text": self.min_gap_text,
            "mu_checks": [
                {
                    "mu": c.mu,
                    "holds": c.holds,
                    "first_violation": c.first_violation,
                }
                for c in self.mu_checks
            ],
            "n": self.n,
            "partial": self.partial,
        }

    def csv_rows(self):
        yield ("x", "gap", "sign")
        for pt in self.points:
            s = {1: "+", -1: "-", 0: "0", None: "?"}[pt.sign]
            yield (_num_text(mpf(pt.x)), pt.gap_text, s)


def _num_text(v) -> str:
    return mpmath.nstr(mpf(v), 17, strip_zeros=False)


def _tower_ln(n: int, x: mpf) -> Tln:
    """Tln of exp^n(x) for n >= 0 (n = 0 means x itself)."""
    if n == 0:
        return Tln.from_mpf(x)
    return Tln.tower(n, x)


class _ExprProbe:
    """Evaluates g(x) - x for a grammar expression, exact-first.

    Each probe returns (sign, gap, text, dev_ln): gap is an mpf when
    the deviation materializes, else None with dev_ln carrying its
    exact log magnitude; sign None marks a point the engine could not
    resolve at all.
    """

    def __init__(self, e, guard: float):
        self.norm, self.form = expr_normalize(e)
        self.guard = guard
        # Near-cancelling blocks leave residuals around exp(-(N+1)x);
        # resolving their sign in the plain fallback needs the working
        # precision to grow with the scan window.
        self.order = max(max_series_order(self.norm), 1)

    def prec_for(self, x_hi: float) -> int:
        return max(96, int((self.order + 1) * x_hi * 1.45) + 80)

    def gap(self, x: mpf):
        try:
            dev = deviation(self.norm, x, self.guard)
        except EvalRangeError:
            return self._direct_gap(x)
        ln = dev.lnmag if dev.sign != 0 else None
        return dev.sign, dev.to_mpf(), dev.describe(), ln

    def _direct_gap(self, x: mpf):
        # The additive tower state collapsed (an order-one contraction
        # amplified past the payload granularity); plain evaluation
        # still resolves the gap.  Its cost scales with the digit count
        # of the largest exponential argument, whose log is
        # exp^{peak-2}(x), so bail out once that passes 4e6.
        ln_arg = x
        for _ in range(max(self.form.peak - 2, 0)):
            if ln_arg > 4 * 10**6:
                break
            ln_arg = mpmath.exp(ln_arg)
        if ln_arg > 4 * 10**6:
            return None, None, "unresolved", None
        g = expr_eval(self.norm, x, self.guard)
        gap = g - x
        sign = 0 if gap == 0 else (1 if gap > 0 else -1)
        return sign, gap, _num_text(gap), None


class _CallableProbe:
    def __init__(self, fn):
        self.fn = fn

    def prec_for(self, x_hi: float) -> int:
        return max(96, int(2 * x_hi * 1.45) + 80)

    def gap(self, x: mpf):
        gap = mpf(self.fn(x)) - x
        sign = 0 if gap == 0 else (1 if gap > 0 else -1)
        return sign, gap, _num_text(gap), None


def _mu_holds(sign, gap, dev_ln: Tln | None, mu: float, n: int, x: mpf) -> bool:
    """Whether |gap| < exp(-mu exp^n(x)), using logs throughout."""
    if sign == 0:
        return True
    bound_ln = _tower_ln(n, x).scale(mpf(mu)).neg()
    if dev_ln is not None:
        return dev_ln.cmp(bound_ln) < 0
    if gap is None:
        return False
    return Tln.from_mpf(mpmath.log(abs(gap))).cmp(bound_ln) < 0


def fixed_point_scan(
    e,
    x0: float,
    x1: float,
    grid: int = 41,
    mu_list=(1.0,),
    n: int | None = None,
    guard: float = 1.0,
) -> ScanReport:
    """Numeric scan of g(x) - x on [x0, x1].

    ``e`` is a grammar expression or a plain callable.  The report
    records the sign at each grid point, bisection-refined fixed points
    satisfying |g(x*) - x*| < 1e-13, the minimal gap, and for each mu
    whether |g(x) - x| < exp(-mu exp^n(x)) held at every resolved grid
    point (n defaults to one level above the expression's peak depth,
    or to 1 for a callable).  A guard violation truncates the scan and
    flags the report partial instead of raising.
    """
    if not x0 < x1:
        raise ValueError("scan needs x0 < x1")
    if grid < 2:
        raise ValueError("grid needs at least two points")
    if isinstance(e, MapExpr):
        probe = _ExprProbe(e, guard)
        # The smallness hypothesis lives one exponential level above the
        # peak: a non-identity series at depth d contributes a gap no
        # smaller than exp(-C exp^d(x)), so only the (peak+1)-level
        # threshold separates identity from everything else.
        n_used = probe.form.peak + 1 if n is None else n
    else:
        probe = _CallableProbe(e)
        n_used = 1 if n is None else n

    xs = [mpf(x0) + (mpf(x1) - mpf(x0)) * i / (grid - 1) for i in range(grid)]
    points = []
    partial = False
    mu_state = {mu: [True, None] for mu in mu_list}
    min_gap = None  # (ln magnitude, gap, text) of the smallest nonzero gap

    with mpmath.workprec(probe.prec_for(x1)):
        for x in xs:
            try:
                sign, gap, text, dev_ln = probe.gap(x)
            except (EvalDomainError, ValueError, ZeroDivisionError, OverflowError):
                partial = True
                break
            except EvalRangeError:
                sign, gap, text, dev_ln = None, None, "unresolved", None
            points.append(ScanPoint(float(x), sign, gap, text))
            if sign is None:
                continue
            for mu in mu_list:
                if mu_state[mu][0] and not _mu_holds(sign, gap, dev_ln, mu, n_used, x):
                    mu_state[mu][0] = False
                    mu_state[mu][1] = float(x)
            if sign != 0:
                cand_ln = dev_ln
                if cand_ln is None and gap is not None and gap != 0:
                    cand_ln = Tln.from_mpf(mpmath.log(abs(gap)))
                if cand_ln is not None and (
                    min_gap is None or cand_ln.cmp(min_gap[0]) < 0
                ):
                    min_gap = (cand_ln, gap, text)

        fixed = []
        for pt in points:
            if pt.sign == 0:
                fixed.append(pt.x)
        for left, right in zip(points, points[1:]):
            if (
                left.sign is not None
                and right.sign is not None
                and left.sign * right.sign < 0
            ):
                star = _bisect(probe, mpf(left.x), mpf(right.x), guard)
                if star is not None:
                    fixed.append(star)

    if any(pt.sign == 0 for pt in points):
        min_text = "0"
        min_val = mpf(0)
    elif min_gap is not None:
        min_val, min_text = min_gap[1], min_gap[2]
    else:
        min_val, min_text = None, "unresolved"

    return ScanReport(
        points=tuple(points),
        sign_pattern="".join(
            {1: "+", -1: "-", 0: "0", None: "?"}[pt.sign] for pt in points
        ),
        fixed_points=tuple(sorted(set(fixed))),
        min_gap=min_val,
        min_gap_text=min_text,
        mu_checks=tuple(
            MuCheck(mu=float(mu), holds=st[0], first_violation=st[1])
            for mu, st in mu_state.items()
        ),
        n=n_used,
        partial=partial,
    )


def _bisect(probe, lo: mpf, hi: mpf, guard: float) -> float | None:
    try:
        s_lo, _, _, _ = probe.gap(lo)
    except (EvalDomainError, EvalRangeError):
        return None
    if s_lo is None:
        return None
    for _ in range(200):
        mid = (lo + hi) / 2
        try:
            s_mid, gap_mid, _, _ = probe.gap(mid)
        except (EvalDomainError, EvalRangeError):
            return None
        if s_mid is None:
            return None
        if s_mid == 0 or (gap_mid is not None and abs(gap_mid) < mpf(10) ** -13):
            return float(mid)
        if s_mid == s_lo:
            lo = mid
        else:
            hi = mid
        if hi - lo < mpf(10) ** -15:
            return None
    return None


def verdict_report_json(verdict: Verdict, trace: ReductionTrace) -> str:
    doc = {"verdict": verdict.to_json(), "trace": trace.to_json()}
    return json.dumps(doc, indent=2, sort_keys=True)
