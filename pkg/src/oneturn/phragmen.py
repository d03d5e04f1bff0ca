"""Quantitative interior decay bounds for bounded cochains.

A boundary-data profile packages envelopes for the partition geometry
(L), the jump sizes (M), the chart growth (rho, sigma), a cutoff psi,
and a rate reserve delta_tilde.  From a profile the module computes the
decay rate lambda, the tail integral I_rho, and assembles a certified
interior bound: a positive decreasing function dominating |f(x)| on the
real axis beyond a validity threshold x_min.

Hypotheses are analytic statements a numeric library cannot prove.
They are checked by sampling on a grid the caller declares; a sampled
violation refuses the certificate or raises, naming the failed
hypothesis, while a clean pass only means "not falsified here".

The specialized constructor for the double-exponential jump class takes
the three measured constants (jump rate C3, sup of the cochain, the
partition constant) and produces the explicit bound

    exp(-q(x) * x/3) * (C4 + C5 * q(x) * (x^2/4 + 1)),
    q(x) = C3*exp(x/2) - 4/x - 1,

together with a simplified dominating form C * exp(-C' * x * exp(x/2))
and its half-plane-chart corollary C * exp(-2C' * x * ln x).  The
dichotomy check then compares real-axis samples against a certificate:
a sample above the bound (plus any certified measurement tolerance)
proves the decay hypothesis fails; otherwise the data is consistent
with the zero function.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import scipy.integrate
import scipy.optimize

from .cauchy_heine import DEFAULT_QUADRATURE, QuadratureConfig
from .errors import (
    CertificateRefused,
    HypothesisViolation,
    InputError,
    NotYetPositive,
    QuadratureError,
)

__all__ = [
    "Envelope",
    "PLProfile",
    "BoundCertificate",
    "decay_lemma_profile",
    "compute_lambda",
    "compute_I_rho",
    "pl_cochain_certificate",
    "simple_cochain_certificate",
    "chart_change_certificate",
    "decay_dichotomy_check",
    "classical_pl_check",
    "certificate_rows",
    "certificate_csv",
    "certificate_json",
]


@dataclass(frozen=True)
class Envelope:
    """Scalar function handle with optional exact derivative data.

    `df` is the plain derivative; `dlog` the logarithmic derivative
    f'/f, which stays finite where f itself underflows (the deep tail
    of a double-exponential envelope).  Missing derivatives fall back
    to central differences.
    """

    f: Callable[[float], float]
    df: Optional[Callable[[float], float]] = None
    dlog: Optional[Callable[[float], float]] = None
    label: str = ""

    def __call__(self, x: float) -> float:
        return float(self.f(x))

    def deriv(self, x: float) -> float:
        if self.df is not None:
            return float(self.df(x))
        if self.dlog is not None:
            return float(self.dlog(x)) * float(self.f(x))
        h = 1e-6 * max(1.0, abs(x))
        return (float(self.f(x + h)) - float(self.f(x - h))) / (2 * h)

    def log_deriv(self, x: float) -> float:
        if self.dlog is not None:
            return float(self.dlog(x))
        v = float(self.f(x))
        if v == 0.0:
            raise HypothesisViolation(
                f"envelope {self.label or 'f'} vanishes at {x}; "
                "logarithmic derivative undefined"
            )
        return self.deriv(x) / v


def _const_envelope(c: float, label: str) -> Envelope:
    return Envelope(f=lambda _x, c=c: c, df=lambda _x: 0.0, label=label)


@dataclass(frozen=True)
class PLProfile:
    """Declared envelopes and attestations for the interior-bound theorem.

    L: increasing positive C1 envelope of the boundary-line density.
    M: decreasing envelope of sup |delta f| beyond Re = a.
    rho: increasing with positive derivative, bounds the chart's real
        part on verticals; sigma bounds the inverse chart from below.
    psi: cutoff growing to +infinity, below the chart on the reals.
    delta_tilde: positive rate reserve, eventually below lambda.
    re_phi_gap: certified lower bound for Re(chart(x)) - psi(x) at real
        x; the shipped charts attest x/3 for the near-identity case.
    grid: declared hypothesis-check abscissas (in the envelope variable).
    closed_form_lambda: exact decay rate, for profiles whose infimum is
        attained at the left endpoint; cross-checked against the
        envelope route at sigma(a).
    rho_growth_slope: certified linear lower bound on the growth of rho
        beyond sigma(grid[0]); needed to truncate the tail integral.
    m_vanishes: the M == 0 degenerate limit (no jump data), where the
        bracket term drops and lambda must come from the closed form.
    safety_margin: subtracted from a sampled-infimum lambda.
    """

    L: Envelope
    M: Envelope
    rho: Envelope
    sigma: Envelope
    psi: Envelope
    delta_tilde: Envelope
    re_phi_gap: Envelope
    grid: tuple
    closed_form_lambda: Optional[Callable[[float], float]] = None
    rho_growth_slope: Optional[float] = None
    m_vanishes: bool = False
    safety_margin: float = 0.0
    label: str = ""

    def __post_init__(self):
        if len(self.grid) < 2:
            raise InputError("hypothesis grid needs at least two points")
        if any(b >= c for b, c in zip(self.grid, self.grid[1:])):
            raise InputError("hypothesis grid must be strictly increasing")
        if self.safety_margin < 0:
            raise InputError("safety margin must be nonnegative")


def profile_hypothesis_log(p: PLProfile) -> tuple:
    """Sampled falsification pass over the declared grid.

    Returns (name, ok, detail) triples; never raises.  A False entry
    means the hypothesis was violated at some grid point, and the
    certificate constructors refuse on it.
    """
    results = []
    g = p.grid

    def check(name, ok, detail=""):
        results.append((name, bool(ok), detail))

    Lv = [p.L(b) for b in g]
    check("L positive", all(v > 0 for v in Lv))
    check(
        "L increasing",
        all(w >= v * (1 - 1e-12) for v, w in zip(Lv, Lv[1:])),
    )
    Mv = [p.M(b) for b in g]
    if p.m_vanishes:
        check("M vanishes", all(v == 0.0 for v in Mv))
    else:
        check("M positive", all(v > 0 for v in Mv))
        check(
            "M decreasing",
            all(w <= v * (1 + 1e-12) for v, w in zip(Mv, Mv[1:])),
        )
    rv = [p.rho(b) for b in g]
    check("rho positive", all(v > 0 for v in rv))
    check(
        "rho derivative positive",
        all(p.rho.deriv(b) > 0 for b in g),
    )
    pv = [p.psi(b) for b in g]
    check("psi increasing", all(w > v for v, w in zip(pv, pv[1:])))
    check("delta_tilde positive", all(p.delta_tilde(b) > 0 for b in g))
    if p.rho_growth_slope is not None:
        s = p.rho_growth_slope
        ok = s > 0 and all(
            p.rho(c) - p.rho(b) >= s * (c - b) * (1 - 1e-9) - 1e-12
            for b, c in zip(g, g[1:])
        )
        check("rho growth slope", ok, f"declared {s}")
    return tuple(results)


def _require_hypotheses(p: PLProfile) -> tuple:
    log = profile_hypothesis_log(p)
    for name, ok, detail in log:
        if not ok:
            raise CertificateRefused(
                f"profile hypothesis falsified on the declared grid: {name}"
                + (f" ({detail})" if detail else ""),
                failing_hypothesis=name,
            )
    return tuple(f"{name}: ok" for name, _ok, _d in log)


def _sampled_rate(p: PLProfile, b: float) -> float:
    return -(p.M.log_deriv(b) + p.L.log_deriv(b)) / p.rho.deriv(b)


def _first_positive_abscissa(p: PLProfile) -> Optional[float]:
    for a in p.grid:
        try:
            v = (
                float(p.closed_form_lambda(a))
                if p.closed_form_lambda is not None
                else _sampled_rate(p, p.sigma(a)) - p.safety_margin
            )
        except (ArithmeticError, HypothesisViolation):
            continue
        if v > 0:
            return a
    return None


def compute_lambda(p: PLProfile, a: float, grid: Sequence = ()) -> float:
    """Decay rate at abscissa a: the infimum of -(M'/M + L'/L)/rho'.

    Uses the profile's closed form when declared (cross-checked against
    the envelope route at sigma(a)), otherwise the sampled infimum over
    the given grid (default: the profile grid beyond sigma(a)) minus the
    declared safety margin.  Exactly zero is returned as is (constant
    envelopes carry no decay); a negative rate raises NotYetPositive
    with the first grid abscissa where the rate turns positive.
    """
    sa = float(p.sigma(a))
    if p.closed_form_lambda is not None:
        val = float(p.closed_form_lambda(a))
        if not p.m_vanishes and p.M(sa) > 0.0:
            sampled = _sampled_rate(p, sa)
            if abs(sampled - val) > 1e-8 * (1 + abs(val)):
                raise CertificateRefused(
                    f"closed-form rate {val!r} disagrees with the envelope "
                    f"route {sampled!r} at b = sigma(a) = {sa!r}",
                    failing_hypothesis="lambda closed form",
                )
    else:
        bs = [b for b in (grid or p.grid) if b >= sa - 1e-12]
        if not bs:
            raise InputError(
                f"no grid points beyond sigma(a) = {sa!r} to sample the rate"
            )
        val = min(_sampled_rate(p, b) for b in bs) - p.safety_margin
    if val < 0:
        raise NotYetPositive(
            f"decay rate {val!r} still negative at a = {a!r}",
            first_positive=_first_positive_abscissa(p),
        )
    return val


def compute_I_rho(
    p: PLProfile, a: float, cfg: QuadratureConfig = DEFAULT_QUADRATURE
) -> float:
    """Tail integral of exp(-delta_tilde(a) * (rho(s) - rho(sigma(a)))).

    Truncated where the certified tail bound (from the declared linear
    growth of rho) drops below the quadrature tolerance; a missing or
    falsified growth declaration means the integral cannot be certified
    finite and raises HypothesisViolation.
    """
    sa = float(p.sigma(a))
    d = float(p.delta_tilde(a))
    if d <= 0:
        raise HypothesisViolation(f"delta_tilde({a!r}) = {d!r} is not positive")
    slope = p.rho_growth_slope
    if slope is None or slope <= 0:
        raise HypothesisViolation(
            "tail integral not certifiably finite: rho growth slope "
            "missing or nonpositive"
        )
    rho_sa = p.rho(sa)
    rate = d * slope
    T = sa + max(1.0, math.log(10.0 / (cfg.tol * rate)) / rate)
    for s in (sa + 0.25 * (T - sa), sa + 0.5 * (T - sa), T):
        if p.rho(s) - rho_sa < slope * (s - sa) * (1 - 1e-9) - 1e-12:
            raise HypothesisViolation(
                f"declared rho growth slope {slope!r} falsified at s = {s!r}"
            )

    def integrand(s: float) -> float:
        u = d * (p.rho(s) - rho_sa)
        return math.exp(-u) if u < 745.0 else 0.0

    val, abserr = scipy.integrate.quad(
        integrand, sa, T, epsabs=cfg.tol * 0.05, epsrel=1e-11,
        limit=cfg.max_subdivisions,
    )
    tail = math.exp(-rate * (T - sa)) / rate
    if abserr + tail > cfg.tol * (1.0 + abs(val)):
        raise QuadratureError(
            f"tail integral uncertain: quad error {abserr!r} + tail bound "
            f"{tail!r} exceeds tolerance {cfg.tol!r}"
        )
    return float(val)


@dataclass(frozen=True)
class BoundCertificate:
    """Certified interior bound |f(x)| <= bound(x) for x >= x_min.

    The handle is kept in log form so deep double-exponential decay
    neither overflows nor collapses prematurely; bound() exponentiates
    with a clean underflow to zero.  `simplified`, when present, holds
    (log_C, Cprime) of a dominating form C * exp(-Cprime * x * exp(x/2))
    in the log chart, or C * exp(-Cprime * x * ln x) after a chart
    change (see `chart`).
    """

    log_bound: Callable[[float], float]
    x_min: float
    constants: Mapping[str, float]
    hypothesis_log: tuple = ()
    simplified: Optional[tuple] = None
    chart: str = "log"
    label: str = ""

    def bound(self, x: float) -> float:
        lb = float(self.log_bound(float(x)))
        if lb == -math.inf or lb < -745.0:
            return 0.0
        return math.exp(lb)

    def __call__(self, x: float) -> float:
        return self.bound(x)


def _verify_positive_decreasing(
    log_bound: Callable[[float], float],
    x_min: float,
    span: float,
    n: int = 100,
) -> None:
    xs = [x_min + span * i / (n - 1) for i in range(n)]
    vals = []
    for x in xs:
        v = float(log_bound(x))
        if math.isnan(v):
            raise CertificateRefused(
                f"certificate undefined at x = {x!r}",
                failing_hypothesis="bound defined beyond x_min",
            )
        vals.append(v)
    # strictly decreasing in log form implies positive decreasing bound
    bad = [x for x, v, w in zip(xs, vals, vals[1:]) if w >= v + 1e-12]
    if bad:
        raise CertificateRefused(
            f"certificate fails to decrease beyond x_min at x = {bad[0]!r}",
            failing_hypothesis="monotone decay beyond x_min",
        )


def pl_cochain_certificate(
    p: PLProfile,
    sup_f: float,
    C_part: float,
    x_grid: Sequence = (),
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
) -> BoundCertificate:
    """Assemble the general interior bound from a declared profile.

        |f(x)| <= exp(-[lambda(psi(x)) - delta_tilde(psi(x))] * gap(x))
                  * (sup_f + C_part * M(sigma(psi(x)))
                     * [L(sigma(psi(x))) * I_rho(psi(x)) + 1])

    with gap the certified lower bound for Re(chart(x)) - psi(x).  The
    threshold x_min is the first scan-grid point where the rate margin
    lambda - delta_tilde is positive; the assembled bound is then
    verified positive and decreasing on a 100-point grid past x_min.
    """
    if sup_f < 0:
        raise InputError("sup_f must be nonnegative")
    if C_part <= 0:
        raise InputError("the partition constant must be positive")
    hyp = _require_hypotheses(p)
    xs = tuple(x_grid) if x_grid else tuple(2.0 + 0.5 * i for i in range(77))

    lam_cache: dict = {}
    irho_cache: dict = {}

    def margin(x: float) -> float:
        a = p.psi(x)
        if a not in lam_cache:
            lam_cache[a] = compute_lambda(p, a)
        return lam_cache[a] - p.delta_tilde(a)

    def log_bound(x: float) -> float:
        x = float(x)
        m = margin(x)
        if m <= 0:
            return math.inf
        gap = p.re_phi_gap(x)
        if gap < 0:
            raise CertificateRefused(
                f"declared chart gap negative at x = {x!r}",
                failing_hypothesis="psi below the chart on the reals",
            )
        a = p.psi(x)
        if p.m_vanishes:
            bracket = 0.0
        else:
            spsi = p.sigma(a)
            mv = p.M(spsi)
            if mv == 0.0:
                bracket = 0.0
            else:
                if a not in irho_cache:
                    irho_cache[a] = compute_I_rho(p, a, cfg)
                bracket = mv * (p.L(spsi) * irho_cache[a] + 1.0)
        pref = sup_f + C_part * bracket
        if pref <= 0.0:
            raise CertificateRefused(
                "vacuous certificate: sup_f and the jump bracket both vanish",
                failing_hypothesis="nonzero prefactor",
            )
        return -m * gap + math.log(pref)

    x_min = None
    for x in xs:
        try:
            if margin(x) > 0:
                x_min = x
                break
        except NotYetPositive:
            continue
    if x_min is None:
        raise CertificateRefused(
            "rate margin lambda - delta_tilde never positive on the scan grid",
            failing_hypothesis="delta_tilde eventually below lambda",
        )
    span = max(6.0, (xs[-1] - x_min) if xs[-1] > x_min else 6.0)
    _verify_positive_decreasing(log_bound, x_min, span)
    constants = {"sup_f": float(sup_f), "C_part": float(C_part)}
    return BoundCertificate(
        log_bound=log_bound,
        x_min=float(x_min),
        constants=constants,
        hypothesis_log=hyp + (f"monotone decay beyond x_min: ok ({x_min!r})",),
        label=p.label or "profile certificate",
    )


def decay_lemma_profile(
    C1: float = 1.0, C2: float = 1.0, C3: float = 1.0, grid: Sequence = ()
) -> PLProfile:
    """Profile of the double-exponential jump class on the log chart.

    L = C1*a^2, M = C2*exp(-C3*e^a), rho = sigma = id, delta_tilde = 1,
    psi(x) = x/2, chart gap x/3.  The rate infimum is attained at the
    left endpoint, giving the closed form lambda(a) = C3*e^a - 2/a.
    The default hypothesis grid stops before M underflows.
    """
    if min(C1, C2, C3) <= 0:
        raise InputError("C1, C2, C3 must be positive")
    if not grid:
        top = min(6.5, math.log(700.0 / C3) * 0.98)
        grid = tuple(0.5 + (top - 0.5) * i / 39 for i in range(40))

    def m_f(b: float) -> float:
        if b > 700.0:
            return 0.0
        u = C3 * math.exp(b)
        return C2 * math.exp(-u) if u < 745.0 else 0.0

    return PLProfile(
        L=Envelope(
            f=lambda b: C1 * b * b,
            df=lambda b: 2 * C1 * b,
            label="C1*a^2",
        ),
        M=Envelope(
            f=m_f,
            dlog=lambda b: -C3 * math.exp(b),
            label="C2*exp(-C3*e^a)",
        ),
        rho=Envelope(f=lambda b: b, df=lambda _b: 1.0, label="id"),
        sigma=Envelope(f=lambda b: b, df=lambda _b: 1.0, label="id"),
        psi=Envelope(f=lambda x: 0.5 * x, df=lambda _x: 0.5, label="x/2"),
        delta_tilde=_const_envelope(1.0, "1"),
        re_phi_gap=Envelope(f=lambda x: x / 3.0, label="x/3"),
        grid=tuple(grid),
        closed_form_lambda=lambda a: C3 * math.exp(a) - 2.0 / a,
        rho_growth_slope=1.0,
        label="double-exponential jump profile",
    )


def simple_cochain_certificate(
    C3: float, sup_f: float, C_part: float
) -> BoundCertificate:
    """Explicit certificate for the double-exponential jump class.

        |f(x)| <= exp(-q(x) * x/3) * (C4 + C5 * q(x) * (x^2/4 + 1)),
        q(x) = C3*exp(x/2) - 4/x - 1,  C4 = sup_f,  C5 = C_part.

    x_min is the root of q pushed right until the assembled bound is
    decreasing through the scan window.  `simplified` dominates the
    certificate by C * exp(-Cprime * x * exp(x/2)) with Cprime = C3/6,
    anchored at max(x_min, 10).
    """
    if not C3 > 0:
        raise InputError("C3 must be positive")
    if sup_f < 0:
        raise InputError("sup_f must be nonnegative")
    if C_part < 0:
        raise InputError("the partition constant must be nonnegative")
    if sup_f == 0.0 and C_part == 0.0:
        raise CertificateRefused(
            "vacuous certificate: sup_f and the partition constant both zero",
            failing_hypothesis="nonzero prefactor",
        )
    C4, C5 = float(sup_f), float(C_part)

    def q(x: float) -> float:
        # past x = 1418 the exponential overflows binary64; the capped
        # value keeps q finite and preserves its sign for brackets
        if 0.5 * x > 709.0:
            return C3 * 8.2e307 - 4.0 / x - 1.0
        return C3 * math.exp(0.5 * x) - 4.0 / x - 1.0

    def log_bound(x: float) -> float:
        x = float(x)
        qx = q(x)
        if qx <= 0:
            return math.inf
        pref = C4 + C5 * qx * (0.25 * x * x + 1.0)
        return -qx * x / 3.0 + math.log(pref)

    # q is strictly increasing with range all of R, so the root exists
    # and is unique; the bracket adapts because either endpoint sign
    # can be wrong for C3 far from 1
    lo, hi = 0.25, 20.0
    while q(lo) >= 0.0 and lo > 1e-12:
        lo /= 2.0
    if q(lo) >= 0.0:
        raise InputError(
            f"C3 = {C3:g} puts the certificate onset below {lo:g}; "
            "rescale the data instead"
        )
    for _ in range(60):
        if q(hi) > 0.0:
            break
        hi *= 2.0
    else:
        raise CertificateRefused(
            "decay exponent never turns positive on the representable axis",
            failing_hypothesis="positive decay margin",
        )
    q_root = float(scipy.optimize.brentq(q, lo, hi, xtol=1e-13))
    # push x_min right until the log bound decreases through the window
    scan = [q_root + 1e-9 + 12.0 * i / 2000 for i in range(2001)]
    vals = [log_bound(x) for x in scan]
    x_min = None
    ok_from = len(vals) - 1
    for i in range(len(vals) - 2, -1, -1):
        if vals[i] > vals[i + 1] + 1e-15:
            ok_from = i
        else:
            break
    if ok_from < len(vals) - 1:
        x_min = scan[ok_from]
    if x_min is None:
        raise CertificateRefused(
            "bound never settles into decay on the scan window",
            failing_hypothesis="monotone decay beyond x_min",
        )
    _verify_positive_decreasing(log_bound, x_min, 12.0)

    cprime = C3 / 6.0
    anchor = max(x_min, 10.0)
    log_c = None
    for i in range(301):
        x = anchor + (40.0 - anchor) * i / 300 if anchor < 40.0 else anchor + i * 0.1
        cand = log_bound(x) + cprime * x * math.exp(0.5 * x)
        if log_c is None or cand > log_c:
            log_c = cand
    log_c += 1e-9
    constants = {
        "C3": float(C3),
        "C4": C4,
        "C5": C5,
        "q_root": q_root,
        "simplified_log_C": log_c,
        "simplified_Cprime": cprime,
        "simplified_anchor": anchor,
    }
    hyp = (
        "q positive beyond x_min: ok",
        "monotone decay beyond x_min: ok (100-point scan)",
        f"simplified form anchored at x = {anchor!r}: ok",
    )
    return BoundCertificate(
        log_bound=log_bound,
        x_min=float(x_min),
        constants=constants,
        hypothesis_log=hyp,
        simplified=(log_c, cprime),
        label="double-exponential jump certificate",
    )


def chart_change_certificate(cert: BoundCertificate) -> BoundCertificate:
    """Half-plane-chart corollary of a simplified certificate.

    Composing with doubling-after-log turns the dominating form
    C * exp(-Cprime * x * exp(x/2)) into C * exp(-2*Cprime * z * ln z),
    valid for z >= exp(x_min / 2): smaller than every exponential, the
    rigidity input on the half-plane chart.
    """
    if cert.simplified is None:
        raise InputError("certificate carries no simplified dominating form")
    log_c, cprime = cert.simplified
    z_min = math.exp(0.5 * cert.x_min)

    def log_bound(z: float) -> float:
        z = float(z)
        if z <= 1.0:
            return math.inf
        return log_c - 2.0 * cprime * z * math.log(z)

    _verify_positive_decreasing(log_bound, max(z_min, 1.0 + 1e-9), 12.0)
    constants = dict(cert.constants)
    constants["chart_log_C"] = float(log_c)
    constants["chart_Cprime"] = 2.0 * cprime
    return BoundCertificate(
        log_bound=log_bound,
        x_min=float(z_min),
        constants=constants,
        hypothesis_log=cert.hypothesis_log
        + ("chart change z = exp(x/2): ok",),
        simplified=None,
        chart="half-plane",
        label=(cert.label + ", half-plane chart").strip(", "),
    )


def decay_dichotomy_check(samples, cert: BoundCertificate, tolerance=0.0) -> str:
    """Verdict on real-axis decay data against a certificate.

    tolerance is a number or a callable x -> number giving the certified
    measurement fuzz of each sample (for kernel-synthesized cochains,
    the transform-tail bound: such samples can never witness a genuine
    excess).  A sample above bound + tolerance proves the decay
    hypothesis fails ("exceeds-certificate"); otherwise the data is
    "consistent-with-zero".
    """
    pairs = [(float(x), float(v)) for x, v in samples]
    if not pairs:
        raise InputError("no samples given")
    below = [x for x, _v in pairs if x < cert.x_min]
    if below:
        raise InputError(
            f"sample at x = {below[0]!r} lies below the certificate "
            f"threshold x_min = {cert.x_min!r}"
        )
    tol_fn = tolerance if callable(tolerance) else (lambda _x, t=tolerance: t)
    for x, v in pairs:
        if v < 0:
            raise InputError("samples are absolute values; negative given")
        if v > cert.bound(x) + float(tol_fn(x)):
            return "exceeds-certificate"
    return "consistent-with-zero"


def classical_pl_check(
    f: Callable[[complex], complex],
    boundary_sup: float,
    samples: Sequence[complex],
) -> bool:
    """Directly check the classical interior-bound conclusion on C+.

    For an analytic function bounded by boundary_sup on the boundary
    (and of admissible growth, attested by the caller), no interior
    sample may exceed the boundary sup.  Returns False on the first
    violation instead of raising: the harness is a falsifier.
    """
    if boundary_sup < 0:
        raise InputError("boundary_sup must be nonnegative")
    for z in samples:
        z = complex(z)
        if z.real < 0:
            raise InputError(f"sample {z!r} outside the right half-plane")
        if abs(f(z)) > boundary_sup * (1 + 1e-12):
            return False
    return True


def certificate_rows(cert: BoundCertificate, xs: Sequence[float]):
    return [(float(x), cert.bound(x)) for x in xs]


def certificate_csv(cert: BoundCertificate, xs: Sequence[float]) -> str:
    lines = ["x,bound"]
    for x, b in certificate_rows(cert, xs):
        lines.append(f"{x!r},{b!r}")
    return "\n".join(lines) + "\n"


def certificate_json(cert: BoundCertificate) -> str:
    doc = {
        "chart": cert.chart,
        "constants": {k: float(v) for k, v in cert.constants.items()},
        "hypothesis_log": list(cert.hypothesis_log),
        "label": cert.label,
        "x_min": cert.x_min,
    }
    if cert.simplified is not None:
        doc["simplified"] = {
            "log_C": cert.simplified[0],
            "Cprime": cert.simplified[1],
        }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"
