"""Composition grammar for return-map expressions.

An expression is a tree over five node kinds:

    Affine(alpha, beta)   x -> alpha*x + beta, alpha > 0, exact rationals
    Exp / Log             the exponential chart changes
    NC(series)            a Dulac series with zero rational shift
    Compose([e1, .., ek]) e1 o e2 o ... o ek  (outermost first)

`expr_normalize` rewrites any such tree into the single-peak normal form

    Aff o <NC> o Log o <NC> o ... o <NC-peak> o ... o Exp o <NC> o Aff

with identity blocks inserted where padding is needed, or raises
GrammarError when the tree is not exactly expressible in that shape
(interior affine maps between same-depth NC factors, unbalanced or
multi-peak exp/log nesting).

Evaluation comes in two flavors.  `expr_eval` computes the value
directly in mpmath arithmetic and works for complex arguments; it
refuses once an intermediate exponential leaves the cheaply
representable range.  For real arguments on normalized expressions the
level-index path (`eval_state`, `deviation`) tracks the value as

    exp^k(r) + p

where r is the exact affine-chain base, k counts pending exponentials,
and p is a signed perturbation carried in log space (towers.TReal).
The base r is never touched by Exp/Log/NC nodes, so an identity
expression yields deviation exactly zero, and a deviation of size
exp(-exp(exp(x))) keeps its exact sign even though no float could
represent it.  This is what the fixed-point scans consume.

>>> import mpmath
>>> e = Compose((Log, Affine(1, 1), Exp))
>>> mpmath.nstr(expr_eval(e, mpmath.mpf(5)), 8)
'5.0067153'
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mpf

from .errors import EvalDomainError, EvalRangeError, GrammarError
from .series import DulacSeries, conj_affine_by_exp, format_series, series_compose
from .towers import Tln, TReal

# Largest argument fed to a bare exponential: the result's exponent is
# a bigint with ~log10(arg) digits, so exp of an argument near exp(1e7)
# already costs seconds and anything much past it stops terminating.
_EXP_CAP_LN = mpf(10) ** 7
_EXP_CAP_VALUE = None

_DEFAULT_CONJ_ORDER = 8


def _exp_cap() -> mpf:
    global _EXP_CAP_VALUE
    if _EXP_CAP_VALUE is None:
        _EXP_CAP_VALUE = mpmath.exp(_EXP_CAP_LN)
    return _EXP_CAP_VALUE


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    raise TypeError(f"expected an exact rational or float, got {type(x).__name__}")


def _fr_mpf(fr: Fraction) -> mpf:
    return mpf(fr.numerator) / fr.denominator


@dataclass(frozen=True)
class Affine:
    """x -> alpha*x + beta with alpha > 0, held as exact rationals."""

    alpha: Fraction
    beta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "alpha", _frac(self.alpha))
        object.__setattr__(self, "beta", _frac(self.beta))
        if self.alpha <= 0:
            raise GrammarError(f"affine scale must be positive, got {self.alpha}")

    @property
    def is_identity(self) -> bool:
        return self.alpha == 1 and self.beta == 0

    def __str__(self) -> str:
        return f"Affine({self.alpha}, {self.beta})"


class _Exp:
    __slots__ = ()

    def __repr__(self) -> str:
        return "Exp"


class _Log:
    __slots__ = ()

    def __repr__(self) -> str:
        return "Log"


Exp = _Exp()
Log = _Log()


@dataclass(frozen=True)
class NC:
    """A Dulac-series element; the rational shift must vanish.

    The series may still carry a log-of-rational shift (the exact image
    of ln(alpha) under affine lowering); such nodes are flagged inexact
    for identity purposes.  `jump_scale`, when given, is the certified
    magnitude of cochain corrections attached to this element and feeds
    the scan's perturbation budget.
    """

    series: DulacSeries
    jump_scale: float | None = None

    def __post_init__(self):
        if self.series.c0 != 0:
            raise GrammarError(
                "NC element requires zero rational shift; "
                "move constant shifts into an Affine factor"
            )

    def __str__(self) -> str:
        if self.series.shift_inexact:
            q = self.series.shift_log_arg
            tail = DulacSeries(0, self.series.coeffs, self.series.order)
            return f"NC({format_series(tail)} + ln({q}))"
        return f"NC({format_series(self.series)})"


@dataclass(frozen=True)
class Compose:
    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise GrammarError("composition list must be nonempty")
        for f in self.factors:
            if not isinstance(f, (Affine, _Exp, _Log, NC, Compose)):
                raise GrammarError(f"not a grammar node: {f!r}")

    def __str__(self) -> str:
        return "Compose[" + ", ".join(node_label(f) for f in self.factors) + "]"


MapExpr = (Affine, _Exp, _Log, NC, Compose)


def node_label(node) -> str:
    return repr(node) if isinstance(node, (_Exp, _Log)) else str(node)


def flatten(e) -> tuple:
    """Primitive factors of e, outermost first."""
    if isinstance(e, Compose):
        out = []
        for f in e.factors:
            out.extend(flatten(f))
        return tuple(out)
    if isinstance(e, MapExpr):
        return (e,)
    raise GrammarError(f"not a grammar node: {e!r}")


def _app_order(e) -> list:
    # Application order: innermost factor acts first.
    return list(reversed(flatten(e)))


@dataclass(frozen=True)
class GrammarForm:
    """Depth bookkeeping of a normalized expression.

    `depths` lists the exp/log nesting depth of every NC factor in
    composition order; for a normal form it rises 0..peak then falls
    back to 0.
    """

    depths: tuple
    peak: int


def sum_jump_scales(e) -> float:
    return sum(abs(f.jump_scale) for f in flatten(e) if isinstance(f, NC) and f.jump_scale)


def max_series_order(e) -> int:
    orders = [f.series.order for f in flatten(e) if isinstance(f, NC)]
    return max(orders) if orders else 0


def _merge_nc(second: NC, first: NC) -> NC:
    """Composite of two adjacent NC factors: second o first."""
    f, g = second.series, first.series
    if f.is_identity:
        merged = g
    elif g.is_identity:
        merged = f
    else:
        merged = series_compose(f, g, min(f.order, g.order))
    if second.jump_scale is None and first.jump_scale is None:
        js = None
    else:
        js = (second.jump_scale or 0.0) + (first.jump_scale or 0.0)
    return NC(merged, js)


def _rewrite_fixpoint(seq: list, conj_order: int) -> list:
    changed = True
    while changed:
        changed = False
        out = []
        i = 0
        while i < len(seq):
            node = seq[i]
            nxt = seq[i + 1] if i + 1 < len(seq) else None
            # Identity affines are dropped; identity NC factors and
            # exp/log adjacencies are NOT: the normal form preserves the
            # written depth structure (a polycycle of height 3 with
            # identity vertex maps must normalize to peak 3, not 0).
            if isinstance(node, Affine) and node.is_identity:
                i += 1
                changed = True
                continue
            if isinstance(node, NC) and isinstance(nxt, NC):
                out.append(_merge_nc(nxt, node))
                i += 2
                changed = True
                continue
            if isinstance(node, Affine) and isinstance(nxt, Affine):
                out.append(
                    Affine(nxt.alpha * node.alpha, nxt.alpha * node.beta + nxt.beta)
                )
                i += 2
                changed = True
                continue
            # affine applied right after an exponential sinks below it:
            # alpha*e^u + beta = e^(u + ln alpha + ln(1 + (beta/alpha)e^(-u)))
            if isinstance(node, _Exp) and isinstance(nxt, Affine):
                out.append(NC(conj_affine_by_exp(nxt.alpha, nxt.beta, conj_order)))
                out.append(Exp)
                i += 2
                changed = True
                continue
            # affine applied right before a logarithm sinks below it:
            # ln(alpha*u + beta) = conj(ln u)
            if isinstance(node, Affine) and isinstance(nxt, _Log):
                out.append(Log)
                out.append(NC(conj_affine_by_exp(node.alpha, node.beta, conj_order)))
                i += 2
                changed = True
                continue
            out.append(node)
            i += 1
        seq = out
    return seq


def expr_normalize(e) -> tuple:
    """Equivalent single-peak normal form and its GrammarForm.

    >>> norm, form = expr_normalize(NC(DulacSeries(0, [(1, 1)], 4)))
    >>> form.peak
    0
    >>> norm, form = expr_normalize(Compose((Log, NC(DulacSeries(0, [(1, 1)], 4)), Exp)))
    >>> form.peak, form.depths
    (1, (0, 1, 0))
    """
    seq = _rewrite_fixpoint(_app_order(e), max(max_series_order(e), _DEFAULT_CONJ_ORDER))

    aff_right = seq.pop(0) if seq and isinstance(seq[0], Affine) else Affine(1, 0)
    aff_left = seq.pop() if seq and isinstance(seq[-1], Affine) else Affine(1, 0)

    depth = 0
    rising = True
    slots = {}
    for node in seq:
        if isinstance(node, Affine):
            raise GrammarError(
                "affine factor trapped between same-depth NC elements; "
                "not exactly expressible in the normal form"
            )
        if isinstance(node, _Exp):
            if not rising:
                raise GrammarError(
                    "second ascent after a descent (multi-peak nesting); "
                    "not expressible in the single-peak normal form"
                )
            depth += 1
        elif isinstance(node, _Log):
            if depth == 0:
                raise GrammarError("log below the base chart (negative nesting depth)")
            rising = False
            depth -= 1
        else:
            key = (depth, rising)
            if key in slots:
                slots[key] = _merge_nc(node, slots[key])
            else:
                slots[key] = node
    if depth != 0:
        raise GrammarError("unbalanced exp/log nesting (expression does not return to depth 0)")

    peak = sum(1 for n in seq if isinstance(n, _Exp))

    def slot(d: int, on_rise: bool) -> NC:
        got = slots.get((d, on_rise))
        return got if got is not None else NC(DulacSeries.identity(0))

    factors = [aff_left]
    for d in range(peak + 1):
        factors.append(slot(d, False) if d < peak else slot(peak, True))
        if d < peak:
            factors.append(Log)
    for d in range(peak - 1, -1, -1):
        factors.append(Exp)
        factors.append(slot(d, True))
    factors.append(aff_right)

    depths = tuple(list(range(peak + 1)) + list(range(peak - 1, -1, -1)))
    return Compose(tuple(factors)), GrammarForm(depths, peak)


def _to_mp(x):
    if isinstance(x, (mpmath.mpc, complex)):
        return mpmath.mpc(x)
    return mpf(x)


def _direct_apply(node, v, guard, pos: int):
    if isinstance(node, Affine):
        return _fr_mpf(node.alpha) * v + _fr_mpf(node.beta)
    if isinstance(node, _Exp):
        if abs(mpmath.re(v)) > _exp_cap():
            raise EvalRangeError(
                f"exponential argument beyond representable range at position {pos}"
            )
        return mpmath.exp(v)
    if isinstance(node, _Log):
        if not mpmath.re(v) > guard:
            raise EvalDomainError(
                f"log input {mpmath.nstr(v, 8)} not above guard {guard}",
                node=f"factor {pos}: Log",
            )
        return mpmath.log(v)
    ser = node.series
    out = v
    if ser.shift_log_arg != 1:
        out = out + mpmath.log(_fr_mpf(ser.shift_log_arg))
    for n, a in ser.coeffs:
        arg = -n * v
        re_arg = mpmath.re(arg)
        if re_arg > _exp_cap():
            raise EvalRangeError(
                f"series term explodes beyond representable range at position {pos}"
            )
        if re_arg < 0 and -re_arg > _exp_cap():
            continue  # term below exp(-exp(2e5)): invisible at any output scale
        out = out + _fr_mpf(a) * mpmath.exp(arg)
    return out


def expr_eval(e, x, guard: float = 1.0):
    """Value of the expression at x, innermost factor first.

    Returns an mpf/mpc at the ambient working precision.  For real x on
    a balanced expression whose intermediate towers overflow the direct
    arithmetic, evaluation transparently reruns through the level-index
    path and materializes the result.
    """
    seq = list(reversed(flatten(e)))
    v = _to_mp(x)
    try:
        for pos, node in enumerate(seq):
            v = _direct_apply(node, v, guard, pos)
        return v
    except EvalRangeError as exc:
        if isinstance(_to_mp(x), mpmath.mpc):
            raise
        try:
            k, r, p = eval_state(e, x, guard)
        except GrammarError:
            raise exc
        if k != 0:
            raise exc
        pm = p.to_mpf()
        return r + (pm if pm is not None else mpf(0))


def eval_with_derivative(e, x, guard: float = 1.0):
    """(value, derivative) by forward-mode differentiation, direct path."""
    seq = list(reversed(flatten(e)))
    v = _to_mp(x)
    dv = mpf(1)
    for pos, node in enumerate(seq):
        if isinstance(node, Affine):
            dv = _fr_mpf(node.alpha) * dv
        elif isinstance(node, _Exp):
            new_v = _direct_apply(node, v, guard, pos)
            dv = new_v * dv
            v = new_v
            continue
        elif isinstance(node, _Log):
            new_v = _direct_apply(node, v, guard, pos)  # validates the guard first
            dv = dv / v
            v = new_v
            continue
        else:
            d = mpf(1)
            for n, a in node.series.coeffs:
                arg = -n * v
                if mpmath.re(arg) < 0 and mpmath.log(-mpmath.re(arg)) > _EXP_CAP_LN:
                    continue
                d = d - n * _fr_mpf(a) * mpmath.exp(arg)
            dv = d * dv
        v = _direct_apply(node, v, guard, pos)
    return v, dv


def _ln_of_tower(k: int, r: mpf) -> Tln:
    """Tln of ln(exp^k(r)) = exp^(k-1)(r), for k >= 1."""
    if k == 1:
        return Tln.from_mpf(r)
    return Tln.tower(k - 1, r)


def _exp_step(k: int, r: mpf, p: TReal, pos: int) -> TReal:
    # value' = exp^{k+1}(r) * e^p; perturbation becomes V'*(e^p - 1)
    if p.is_zero:
        return p
    ln_vnew = _ln_of_tower(k + 1, r)
    pm = p.to_mpf()
    if pm is None:
        if p.lnmag.s > 0:
            # p itself is at tower scale; e^p - 1 = e^p up to a relative
            # error e^{-p}, so the factor's log is just p's value
            if p.sign < 0:
                raise EvalRangeError(
                    f"tower-scale negative perturbation under exponential (position {pos})"
                )
            return TReal.from_ln(1, ln_vnew.add(p.value_tln()))
        return p.mul_ln(ln_vnew)  # first-order e^p - 1 = p for tiny p
    if pm > 10**6:
        # e^pm - 1 = e^pm up to a factor 1 - e^{-pm} that no payload
        # granularity below could hold anyway
        return TReal.from_ln(1, ln_vnew.add(Tln.from_mpf(pm)))
    if pm <= -(10**6):
        raise EvalRangeError(
            f"perturbation cancels the tower scale under exponential (position {pos})"
        )
    f = mpmath.expm1(pm)
    if f == -1:
        raise EvalRangeError(
            f"perturbation cancels the tower scale under exponential (position {pos})"
        )
    if f == 0:
        return TReal.zero()
    out = TReal.from_mpf(f).mul_ln(ln_vnew)
    # A factor slightly above -1 whose log correction rounds away in the
    # payload leaves V' + p' indistinguishable from exact zero; the
    # additive split cannot carry the value, so refuse.
    if f < 0 and out.lnmag.cmp(ln_vnew) == 0:
        raise EvalRangeError(
            f"perturbation cancels the tower scale under exponential (position {pos})"
        )
    return out


def _log_step(k: int, r: mpf, p: TReal, guard, pos: int) -> TReal:
    # value = exp^k(r) + p = V(1 + rho); value' = exp^(k-1)(r) + log1p(rho)
    ln_v = _ln_of_tower(k, r)
    if p.is_zero:
        new_p = TReal.zero()
        ln_value = ln_v
    else:
        rho = p.mul_ln(ln_v.neg())
        rho_m = rho.to_mpf()
        if rho_m is None:
            if rho.lnmag.s > 0:
                # ratio at tower scale: ln(V + p) = ln V + ln rho up to
                # a relative error 1/rho, itself beyond every scale here
                if rho.sign < 0:
                    raise EvalDomainError(
                        "value driven non-positive before log",
                        node=f"factor {pos}: Log",
                    )
                new_p = TReal.from_tln(rho.lnmag)
                ln_value = ln_v.add(rho.lnmag)
            else:
                new_p = rho  # log1p(rho) = rho to beyond working precision
                ln_value = ln_v
        else:
            if rho_m <= -1:
                raise EvalDomainError(
                    "value driven non-positive before log",
                    node=f"factor {pos}: Log",
                )
            lp = mpmath.log1p(rho_m)
            new_p = TReal.from_mpf(lp)
            ln_value = ln_v.add(Tln.from_mpf(lp))
    lng = mpmath.log(mpf(guard)) if guard > 0 else None
    if lng is None or ln_value.cmp(Tln.from_mpf(lng)) <= 0:
        if lng is not None:
            raise EvalDomainError(
                f"log input at or below guard {guard}",
                node=f"factor {pos}: Log",
            )
        raise EvalDomainError("guard must be positive", node=f"factor {pos}: Log")
    return new_p


def _nc_step(k: int, r: mpf, p: TReal, node: NC, pos: int) -> TReal:
    ser = node.series
    if ser.shift_log_arg != 1:
        p = p.add(TReal.from_mpf(mpmath.log(_fr_mpf(ser.shift_log_arg))))
    if not ser.coeffs:
        return p
    pm = p.to_mpf()
    if k == 0:
        base = r + (pm if pm is not None else mpf(0))
        for n, a in ser.coeffs:
            arg = -n * base
            if abs(arg) > _exp_cap():
                raise EvalRangeError(f"series term out of range at position {pos}")
            p = p.add(TReal.from_mpf(_fr_mpf(a) * mpmath.exp(arg)))
        return p
    ptln = p.value_tln() if pm is None else None
    lead = None
    for n, a in sorted(ser.coeffs):
        t = _ln_of_tower(k + 1, r).scale(mpf(-n))  # ln e^{-n exp^k(r)}
        if pm is not None and pm != 0:
            t = t.add(Tln.from_mpf(-n * pm))
        elif ptln is not None:
            t = t.add(ptln.scale(mpf(-n)))
        # a tiny non-materializable p would shift the term by a factor
        # exp(-n*p) = 1 beyond working precision: dropped
        am = _fr_mpf(a)
        t = t.add(Tln.from_mpf(mpmath.log(abs(am))))
        if lead is None:
            lead = t
        elif t.cmp(lead) == 0:
            # the tower argument is too coarse to register the spacing
            # between consecutive exponents, so this term's true ratio
            # to the leading one, exp(-(n - n0) exp^k(r)), is below any
            # representable ulp; adding it would spuriously cancel or
            # double the payload instead of perturbing it
            continue
        p = p.add(TReal.from_ln(1 if a > 0 else -1, t))
    return p


def eval_state(e, x, guard: float = 1.0) -> tuple:
    """Run the level-index machine; returns (k, r, p) with value exp^k(r)+p.

    The expression is normalized first, so exponential depth rises to a
    single peak and returns to zero; r is touched only by affine
    factors and is exact whenever they are dyadic.
    """
    norm, _ = expr_normalize(e)
    seq = list(reversed(norm.factors))
    r = mpf(x)
    p = TReal.zero()
    k = 0
    for pos, node in enumerate(seq):
        if isinstance(node, Affine):
            if k != 0:
                raise GrammarError("affine factor above base depth after normalization")
            r = _fr_mpf(node.alpha) * r + _fr_mpf(node.beta)
            p = p.mul_mpf(_fr_mpf(node.alpha))
        elif isinstance(node, _Exp):
            p = _exp_step(k, r, p, pos)
            k += 1
        elif isinstance(node, _Log):
            p = _log_step(k, r, p, guard, pos)
            k -= 1
        else:
            p = _nc_step(k, r, p, node, pos)
    return k, r, p


def deviation(e, x, guard: float = 1.0) -> TReal:
    """g(x) - x as a signed level-index real, exact at unbounded depth.

    The plain part r - x is an exact mpf difference (r is the affine
    chain applied to x); tower-scale contributions ride the
    perturbation channel with their signs intact.
    """
    k, r, p = eval_state(e, x, guard)
    if k != 0:
        raise GrammarError("expression does not return to base depth")
    return TReal.from_mpf(r - mpf(x)).add(p)
