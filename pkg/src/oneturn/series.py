"""Exact compositional algebra of truncated Dulac series.

A series here is the germ

    zeta  |->  zeta + c0 + ln(Q) + sum_{n=1}^{order} a_n * exp(-n*zeta),

with c0, Q and every a_n exact rationals (Q > 0).  The shift splits into
a rational part c0 and an exact-logarithm part ln(Q); the pair keeps
identity testing decidable with no tolerance: c0 + ln(Q) = 0 forces
c0 = 0 and Q = 1, because ln of a rational other than 1 is irrational
(Lindemann), hence never cancels a rational.  Series whose shift enters
through Q are flagged `shift_inexact` since the numeric shift value
ln(Q) is not itself rational.

Composition and inversion are computed in the graded algebra of
polynomials in u = exp(-zeta): substituting an inner series g into
exp(-n*zeta) produces u^n * Q_g^{-n} * exp(-n*G(u)) with G the tail of
g, and the truncated exponential keeps every coefficient rational.
This is also why the inner series must have c0 = 0: a nonzero rational
inner shift would multiply coefficients by the transcendental factor
exp(-n*c0), leaving the exact field (ExactnessError).

>>> f = DulacSeries(0, {1: 1}, order=3)
>>> print(format_series(series_compose(f, f, 3)))
z + 2*E^-1 - 1*E^-2 + 1/2*E^-3
>>> print(format_series(series_invert(f, 3)))
z - 1*E^-1 - 1*E^-2 - 3/2*E^-3
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Union

import mpmath

from .errors import ExactnessError, OrderError, ParseError, PreconditionError

MAX_ORDER = 512

RationalLike = Union[int, Fraction, str, float]


def _frac(x: RationalLike) -> Fraction:
    # Fraction(float) is exact for binary floats, so no value is ever rounded here.
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


def _check_order(n: int) -> int:
    n = int(n)
    if n < 0 or n > MAX_ORDER:
        raise OrderError(f"truncation order {n} outside [0, {MAX_ORDER}]")
    return n


@dataclass(frozen=True)
class DulacSeries:
    """Immutable exact series; see the module docstring for semantics.

    `coeffs` may be given as a mapping {n: a_n} or a pair sequence; it
    is normalized to a sorted tuple of nonzero entries with
    1 <= n <= order.
    """

    c0: Fraction = Fraction(0)
    coeffs: tuple[tuple[int, Fraction], ...] = field(default_factory=tuple)
    order: int = 0
    shift_log_arg: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        object.__setattr__(self, "c0", _frac(self.c0))
        q = _frac(self.shift_log_arg)
        if q <= 0:
            raise ValueError("shift_log_arg must be a positive rational")
        object.__setattr__(self, "shift_log_arg", q)
        object.__setattr__(self, "order", _check_order(self.order))
        raw = self.coeffs.items() if isinstance(self.coeffs, Mapping) else self.coeffs
        norm = []
        for n, a in raw:
            n = int(n)
            a = _frac(a)
            if a == 0:
                continue
            if n < 1:
                raise ValueError(f"exponential index must be >= 1, got {n}")
            if n > self.order:
                raise OrderError(
                    f"coefficient at E^-{n} exceeds the stated order {self.order}"
                )
            norm.append((n, a))
        norm.sort()
        if len({n for n, _ in norm}) != len(norm):
            raise ValueError("duplicate exponential index in coefficients")
        object.__setattr__(self, "coeffs", tuple(norm))

    # -- inspection ---------------------------------------------------------

    @property
    def shift_inexact(self) -> bool:
        """True when the shift includes the non-rational value ln(Q), Q != 1."""
        return self.shift_log_arg != 1

    @property
    def is_identity(self) -> bool:
        return self.c0 == 0 and self.shift_log_arg == 1 and not self.coeffs

    def coeff(self, n: int) -> Fraction:
        for m, a in self.coeffs:
            if m == n:
                return a
        return Fraction(0)

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self.coeffs)

    def leading(self) -> tuple[int, Fraction] | None:
        """Smallest-index nonzero exponential term, or None."""
        return self.coeffs[0] if self.coeffs else None

    def with_order(self, order: int) -> "DulacSeries":
        """Same series viewed at a different truncation order.

        Raising the order treats absent coefficients as exact zeros
        (literal semantics); lowering below an existing term is an
        OrderError rather than silent truncation.
        """
        order = _check_order(order)
        if self.coeffs and self.coeffs[-1][0] > order:
            raise OrderError(
                f"cannot view a series with an E^-{self.coeffs[-1][0]} term at order {order}"
            )
        return DulacSeries(self.c0, self.coeffs, order, self.shift_log_arg)

    @classmethod
    def identity(cls, order: int = MAX_ORDER) -> "DulacSeries":
        return cls(Fraction(0), (), order, Fraction(1))

    def __str__(self) -> str:
        if self.shift_inexact:
            return f"<series with exact-log shift ln({self.shift_log_arg}), order {self.order}>"
        return format_series(self)


def is_identity(f: DulacSeries) -> bool:
    """Exact identity test: zero shift (both channels) and no tail terms."""
    return f.is_identity


# -- numeric evaluation -----------------------------------------------------


def series_eval(f: DulacSeries, zeta):
    """Numeric value of the truncated series at zeta.

    Arithmetic follows the input type: float/complex inputs use the
    C math library, mpmath inputs use the current mpmath precision
    (needed when the tail terms are far below double-precision range).
    """
    if isinstance(zeta, (mpmath.mpf, mpmath.mpc)):
        val = zeta + mpmath.mpf(f.c0.numerator) / f.c0.denominator
        if f.shift_log_arg != 1:
            val += mpmath.log(
                mpmath.mpf(f.shift_log_arg.numerator) / f.shift_log_arg.denominator
            )
        for n, a in f.coeffs:
            val += (mpmath.mpf(a.numerator) / a.denominator) * mpmath.exp(-n * zeta)
        return val
    if isinstance(zeta, complex):
        val = zeta + complex(f.c0)
        if f.shift_log_arg != 1:
            val += math.log(f.shift_log_arg)
        for n, a in f.coeffs:
            val += float(a) * cmath.exp(-n * zeta)
        return val
    x = float(zeta)
    val = x + float(f.c0)
    if f.shift_log_arg != 1:
        val += math.log(f.shift_log_arg)
    for n, a in f.coeffs:
        ex = -n * x
        if ex > -745.0:  # exp underflows to 0 beyond this in binary64
            val += float(a) * math.exp(ex)
    return val


def series_eval_derivative(f: DulacSeries, zeta):
    """d/dzeta of the truncated series: 1 - sum n*a_n*exp(-n*zeta)."""
    if isinstance(zeta, (mpmath.mpf, mpmath.mpc)):
        val = mpmath.mpf(1)
        for n, a in f.coeffs:
            val -= n * (mpmath.mpf(a.numerator) / a.denominator) * mpmath.exp(-n * zeta)
        return val
    z = complex(zeta)
    val = 1 + 0j
    for n, a in f.coeffs:
        val -= n * float(a) * cmath.exp(-n * z)
    return val if isinstance(zeta, complex) else val.real


# -- graded polynomial helpers (dict degree -> Fraction, degrees 1..N) -------


def _poly_mul(a: dict[int, Fraction], b: dict[int, Fraction], N: int) -> dict[int, Fraction]:
    out: dict[int, Fraction] = {}
    for i, ai in a.items():
        if i > N:
            continue
        for j, bj in b.items():
            d = i + j
            if d > N:
                continue
            out[d] = out.get(d, Fraction(0)) + ai * bj
    return {d: c for d, c in out.items() if c != 0}


def _poly_exp(t: dict[int, Fraction], N: int) -> dict[int, Fraction]:
    # exp of a series with valuation >= 1, truncated at degree N; the loop
    # terminates because each power raises the valuation.
    out: dict[int, Fraction] = {0: Fraction(1)}
    term: dict[int, Fraction] = {0: Fraction(1)}
    for k in range(1, N + 1):
        term = _poly_mul(term, t, N)
        if not term:
            break
        for d, c in term.items():
            out[d] = out.get(d, Fraction(0)) + c / math.factorial(k)
    return out


def _substitute_tail(
    tail: tuple[tuple[int, Fraction], ...],
    g: DulacSeries,
    N: int,
) -> dict[int, Fraction]:
    """Coefficients of sum a_n exp(-n*g(w)) as a polynomial in u = exp(-w).

    Requires g.c0 == 0; g's exact-log shift ln(Q) contributes the
    rational factor Q^{-n} per term.
    """
    if g.c0 != 0:
        raise ExactnessError(
            "inner series has a nonzero rational shift; exp(-n*c0) is not rational"
        )
    qinv = 1 / g.shift_log_arg
    gtail = {n: a for n, a in g.coeffs}
    p1 = _poly_exp({n: -a for n, a in gtail.items()}, N)
    out: dict[int, Fraction] = {}
    power = {0: Fraction(1)}  # p1**n, updated incrementally
    qn = Fraction(1)
    prev = 0
    for n, a in tail:
        if n > N:
            break
        for _ in range(n - prev):
            power = _poly_mul(power, p1, N)
            qn *= qinv
        prev = n
        for d, c in power.items():
            deg = d + n
            if deg <= N:
                out[deg] = out.get(deg, Fraction(0)) + a * qn * c
    return out


def series_compose(f: DulacSeries, g: DulacSeries, N: int) -> DulacSeries:
    """Exact coefficients of f∘g in the graded algebra, to order N.

    N may not exceed either operand's represented order (the substituted
    expansion would otherwise depend on unknown coefficients).
    """
    N = _check_order(N)
    if N > min(f.order, g.order):
        raise OrderError(
            f"order {N} exceeds the operands' represented orders "
            f"({f.order}, {g.order})"
        )
    if g.is_identity:
        return DulacSeries(f.c0, [(n, a) for n, a in f.coeffs if n <= N], N, f.shift_log_arg)
    if f.is_identity:
        return DulacSeries(g.c0, [(n, a) for n, a in g.coeffs if n <= N], N, g.shift_log_arg)
    out = {n: a for n, a in g.coeffs if n <= N}
    for d, c in _substitute_tail(f.coeffs, g, N).items():
        out[d] = out.get(d, Fraction(0)) + c
    return DulacSeries(
        f.c0 + g.c0,
        out,
        N,
        f.shift_log_arg * g.shift_log_arg,
    )


def series_invert(f: DulacSeries, N: int) -> DulacSeries:
    """Compositional inverse to order N via graded fixed-point iteration.

    Solves f(g(w)) = w by iterating g <- id - s - tail(f)∘g, where s is
    f's shift; each round fixes one more order, so N+1 rounds suffice
    and the result verifies exactly under series_compose.  Requires
    c0 = 0 (the class invariant for invertible elements here).
    """
    N = _check_order(N)
    if f.c0 != 0:
        raise PreconditionError("series_invert requires c0 = 0")
    if N > f.order:
        raise OrderError(f"order {N} exceeds the operand's represented order {f.order}")
    qinv = 1 / f.shift_log_arg
    g = DulacSeries(0, (), N, qinv)
    for _ in range(N + 1):
        d = _substitute_tail(f.coeffs, g, N)
        g = DulacSeries(0, {n: -c for n, c in d.items()}, N, qinv)
    return g


def conj_affine_by_exp(alpha: RationalLike, beta: RationalLike, N: int) -> DulacSeries:
    """Series of zeta -> ln(alpha*e^zeta + beta), truncated at N.

    Expansion: zeta + ln(alpha) + sum (-1)^{n+1} (beta/alpha)^n / n * E^-n.
    The ln(alpha) shift is stored exactly through the log channel and
    flagged inexact whenever alpha != 1.
    """
    N = _check_order(N)
    a = _frac(alpha)
    if a <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    b = _frac(beta)
    r = b / a
    coeffs = {}
    rn = Fraction(1)
    for n in range(1, N + 1):
        rn *= r
        coeffs[n] = (1 if n % 2 else -1) * rn / n
    return DulacSeries(0, coeffs, N, a)


# -- literal syntax ----------------------------------------------------------

_TERM_SPLIT = re.compile(r"(?<!\^)([+-])")
_EXP_TERM = re.compile(
    r"^(?:(?P<coef>\d+(?:/\d+)?)\s*\*\s*)?E\^-(?P<n>\d+)$"
)
_CONST_TERM = re.compile(r"^\d+(?:/\d+)?$")


def parse_series(text: str, order: int | None = None) -> DulacSeries:
    """Parse a series literal like "z + 1/2*E^-1 - 3*E^-2".

    The leading "z" is mandatory; a bare "E^-n" means coefficient 1; a
    constant term sets the rational shift c0.  When `order` is omitted
    the result's order is the largest index present.
    """
    s = text.strip()
    if not s:
        raise ParseError("empty series literal")
    pieces = _TERM_SPLIT.split(s)
    # pieces = [term0, sign1, term1, sign2, term2, ...]
    terms: list[tuple[int, str]] = []
    first = pieces[0].strip()
    if first:
        terms.append((1, first))
    elif len(pieces) == 1:
        raise ParseError("empty series literal")
    for i in range(1, len(pieces), 2):
        sign = 1 if pieces[i] == "+" else -1
        body = pieces[i + 1].strip()
        if not body:
            raise ParseError(f"dangling '{pieces[i]}' in series literal", text)
        terms.append((sign, body))

    seen_z = False
    c0 = Fraction(0)
    coeffs: dict[int, Fraction] = {}
    for sign, body in terms:
        if body == "z":
            if seen_z:
                raise ParseError("duplicate 'z' term", text)
            if sign < 0:
                raise ParseError("the 'z' term cannot be negated", text)
            seen_z = True
            continue
        m = _EXP_TERM.match(body)
        if m:
            n = int(m.group("n"))
            if n < 1:
                raise ParseError(f"exponential index must be >= 1 in '{body}'", text)
            coef = Fraction(m.group("coef")) if m.group("coef") else Fraction(1)
            coeffs[n] = coeffs.get(n, Fraction(0)) + sign * coef
            continue
        if _CONST_TERM.match(body):
            c0 += sign * Fraction(body)
            continue
        raise ParseError(f"unrecognized term '{body}'", text)
    if not seen_z:
        raise ParseError("series literal must contain the leading 'z' term", text)
    max_n = max(coeffs, default=0)
    if order is None:
        order = max_n
    elif order < max_n:
        raise OrderError(f"literal has an E^-{max_n} term but order {order} was requested")
    return DulacSeries(c0, coeffs, order)


def format_series(f: DulacSeries) -> str:
    """Literal form of a series; inverse of parse_series.

    Series with an exact-log shift have no literal form (the syntax has
    no token for ln(Q)); formatting one raises ValueError.
    """
    if f.shift_inexact:
        raise ValueError("series with an exact-log shift has no literal form")
    parts = ["z"]
    if f.c0 != 0:
        parts.append(f"+ {f.c0}" if f.c0 > 0 else f"- {-f.c0}")
    for n, a in f.coeffs:
        parts.append(f"+ {a}*E^-{n}" if a > 0 else f"- {-a}*E^-{n}")
    return " ".join(parts)
