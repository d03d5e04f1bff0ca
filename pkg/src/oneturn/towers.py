"""Level-index arithmetic for quantities at iterated-exponential scales.

The fixed-point analysis compares deviations like exp(-exp(exp(x)))
against thresholds exp(-mu*exp^n(x)).  An mpf stores such a number only
while its exponent integer stays small; at tower height three the
exponent would need ~10^{10^6} digits, and mpmath's exp overflows long
before that.  This module represents

    positive magnitude  M = exp^m(q)        (a "tower", q an mpf payload)
    signed log value    ln|x| = s*exp^m(q)  (class Tln)
    signed real         x = sign*exp(Tln)   (class TReal)

with all arithmetic done on payloads.  Canonical towers satisfy
q in (RMAT, exp(RMAT)] when m >= 1, so distinct levels occupy disjoint
value bands and comparison is lexicographic in (m, q).

Additions use the dominant term plus a multiplicative correction
1 + ratio; the ratio is materialized only when its log is above the
drop threshold (working precision plus margin), otherwise the smaller
term is provably below one ulp of the result and is dropped.  At levels
m >= 2 two canonical payloads are either identical or their towers
differ by a factor far beyond the drop threshold, so cancellation there
is exact-or-droppable; genuine near-cancellation happens only at plain
mpf scale, where ordinary mpf arithmetic resolves it.  Consequently a
TReal carries its sign exactly and its magnitude to working precision
whenever that magnitude is resolvable at all, which is what sign scans
and threshold comparisons consume.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
from mpmath import mpf

RMAT = mpf(10) ** 6  # payload band edge: level-m payloads lie in (RMAT, exp(RMAT)]
_MATERIALIZE_LN_MAX = mpf(10) ** 9  # exp(q) is a cheap mpf while |q| stays below this


def _drop_threshold() -> mpf:
    # Corrections with log-ratio below -(prec*ln2 + 80) are under one ulp
    # of the dominant term with margin to spare.
    return mpf(mpmath.mp.prec) * mpmath.ln(2) + 80


def _canonical(m: int, q: mpf) -> tuple[int, mpf]:
    # A non-positive payload is legal at level >= 1: the first lowering
    # exp makes it positive.  Only a level-0 magnitude must be positive.
    while m >= 1 and q <= RMAT:
        q = mpmath.exp(q)
        m -= 1
    if not q > 0:
        raise ValueError("tower magnitude must be positive")
    while q > RMAT and mpmath.log(q) > RMAT:
        q = mpmath.log(q)
        m += 1
    return m, q


def _tower_cmp(m1: int, q1: mpf, m2: int, q2: mpf) -> int:
    """Compare exp^{m1}(q1) with exp^{m2}(q2); inputs canonical."""
    if m1 != m2:
        return 1 if m1 > m2 else -1
    if q1 == q2:
        return 0
    return 1 if q1 > q2 else -1


def _tower_ln_ratio(ma: int, qa: mpf, mb: int, qb: mpf) -> mpf | None:
    """ln(B/A) as a plain mpf for canonical towers with A >= B.

    Returns None when the ratio is below the drop threshold (B is then
    negligible against A at working precision).
    """
    # Align B to A's level; payload logs stay positive for canonical input.
    while mb < ma:
        if qb <= 1:
            return None
        qb = mpmath.log(qb)
        mb += 1
    if ma == 0:
        delta = mpmath.log(qb) - mpmath.log(qa)
    elif ma == 1:
        delta = qb - qa
    else:
        # Distinct payloads at level >= 2 differ by a factor beyond any
        # working precision; equality is the only non-dropped case.
        delta = mpf(0) if qb == qa else None
    if delta is None or delta < -_drop_threshold():
        return None
    return delta if delta <= 0 else mpf(0)


def _tower_absorb(m: int, q: mpf, c: mpf) -> mpf:
    """Payload q' with exp^m(q') = exp^m(q) + c, dropping sub-ulp dust.

    The addend c must be modest (|c| bounded by a few thousand); at
    canonical levels m >= 1 it is always sub-ulp and q is returned
    unchanged, which is exactly the contract the callers rely on.
    """
    if m == 0:
        return q + c
    return q


@dataclass(frozen=True)
class Tln:
    """Signed level-index real: value = s * exp^m(q); s = 0 encodes zero."""

    s: int
    m: int
    q: mpf

    @classmethod
    def zero(cls) -> "Tln":
        return cls(0, 0, mpf(1))

    @classmethod
    def from_mpf(cls, x) -> "Tln":
        x = mpf(x) if not isinstance(x, mpf) else x
        if x == 0:
            return cls.zero()
        m, q = _canonical(0, abs(x))
        return cls(1 if x > 0 else -1, m, q)

    @classmethod
    def tower(cls, height: int, base: mpf, sign: int = 1) -> "Tln":
        """exp^height(base) with base > 0, as a signed tower."""
        m, q = _canonical(height, mpf(base))
        return cls(sign, m, q)

    @property
    def is_zero(self) -> bool:
        return self.s == 0

    def neg(self) -> "Tln":
        return Tln(-self.s, self.m, self.q)

    def magnitude_mpf(self) -> mpf | None:
        """|value| as an mpf when cheaply representable, else None."""
        if self.s == 0:
            return mpf(0)
        if self.m == 0:
            return self.q
        if self.m == 1 and self.q <= _MATERIALIZE_LN_MAX:
            return mpmath.exp(self.q)
        return None

    def to_mpf(self) -> mpf | None:
        mag = self.magnitude_mpf()
        return None if mag is None else self.s * mag

    def cmp(self, other: "Tln") -> int:
        if self.s != other.s:
            return 1 if self.s > other.s else -1
        if self.s == 0:
            return 0
        c = _tower_cmp(self.m, self.q, other.m, other.q)
        return c * self.s

    def scale(self, c) -> "Tln":
        """Multiply by a plain mpf factor c."""
        c = mpf(c)
        if c == 0 or self.s == 0:
            return Tln.zero()
        sign = self.s * (1 if c > 0 else -1)
        c = abs(c)
        if self.m == 0:
            m, q = _canonical(0, self.q * c)
        else:
            # exp^m(q)*c = exp(exp^{m-1}(q) + ln c); absorb one level down.
            m, q = _canonical(self.m, _tower_absorb(self.m - 1, self.q, mpmath.log(c)))
        return Tln(sign, m, q)

    def add(self, other: "Tln") -> "Tln":
        if self.s == 0:
            return other
        if other.s == 0:
            return self
        c = _tower_cmp(self.m, self.q, other.m, other.q)
        if c == 0:
            if self.s == other.s:
                return self._scale_magnitude(mpf(2))
            return Tln.zero()  # exact cancellation at working precision
        big, small = (self, other) if c > 0 else (other, self)
        lr = _tower_ln_ratio(big.m, big.q, small.m, small.q)
        if lr is None:
            return big
        factor = 1 + (1 if big.s == small.s else -1) * mpmath.exp(lr)
        if factor == 0:
            return Tln.zero()
        return big._scale_magnitude(factor)

    def sub(self, other: "Tln") -> "Tln":
        return self.add(other.neg())

    def _scale_magnitude(self, factor: mpf) -> "Tln":
        # factor is positive and of moderate size by construction.
        if self.m == 0:
            m, q = _canonical(0, self.q * factor)
        else:
            m, q = _canonical(
                self.m, _tower_absorb(self.m - 1, self.q, mpmath.log(factor))
            )
        return Tln(self.s, m, q)

    def describe(self) -> str:
        """Deterministic compact rendering, e.g. '-exp^2(3.26901e+6)'."""
        if self.s == 0:
            return "0"
        sign = "-" if self.s < 0 else ""
        if self.m == 0:
            return f"{sign}{mpmath.nstr(self.q, 17)}"
        return f"{sign}exp^{self.m}({mpmath.nstr(self.q, 17)})"


@dataclass(frozen=True)
class TReal:
    """Signed real carried through log space: x = sign * exp(lnmag).

    Built for perturbation channels whose magnitude may be anywhere
    from exp(-exp(exp(x))) to exp(+exp(x)); the sign is exact, the
    magnitude is held to working precision whenever resolvable.
    """

    sign: int
    lnmag: Tln

    @classmethod
    def zero(cls) -> "TReal":
        return cls(0, Tln.zero())

    @classmethod
    def from_mpf(cls, x) -> "TReal":
        x = mpf(x) if not isinstance(x, mpf) else x
        if x == 0:
            return cls.zero()
        return cls(1 if x > 0 else -1, Tln.from_mpf(mpmath.log(abs(x))))

    @classmethod
    def from_ln(cls, sign: int, lnmag: Tln) -> "TReal":
        return cls.zero() if sign == 0 else cls(sign, lnmag)

    @classmethod
    def from_tln(cls, t: Tln) -> "TReal":
        """The real number t.s * exp^{t.m}(t.q) as a TReal."""
        if t.s == 0:
            return cls.zero()
        if t.m == 0:
            return cls.from_mpf(t.s * t.q)
        return cls(t.s, Tln.tower(t.m - 1, t.q))

    def value_tln(self) -> Tln | None:
        """This value as a positive-side Tln, or None when |self| <= 1.

        Used to splice a tower-scale perturbation into an exponent sum;
        values at most 1 contribute sub-ulp there and have no Tln form.
        """
        if self.sign == 0 or self.lnmag.s <= 0:
            return None
        m, q = _canonical(self.lnmag.m + 1, self.lnmag.q)
        return Tln(self.sign, m, q)

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    def neg(self) -> "TReal":
        return TReal(-self.sign, self.lnmag)

    def mul_ln(self, ln_factor: Tln) -> "TReal":
        """Multiply by the positive factor exp(ln_factor)."""
        if self.sign == 0:
            return self
        return TReal(self.sign, self.lnmag.add(ln_factor))

    def mul_mpf(self, c) -> "TReal":
        c = mpf(c)
        if self.sign == 0 or c == 0:
            return TReal.zero()
        out = self.mul_ln(Tln.from_mpf(mpmath.log(abs(c))))
        return out if c > 0 else out.neg()

    def to_mpf(self) -> mpf | None:
        """Materialize when the log magnitude is a plain, cheap mpf."""
        if self.sign == 0:
            return mpf(0)
        ln = self.lnmag.to_mpf()
        if ln is None or abs(ln) > _MATERIALIZE_LN_MAX:
            return None
        return self.sign * mpmath.exp(ln)

    def add(self, other: "TReal") -> "TReal":
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        a, b = self.to_mpf(), other.to_mpf()
        if a is not None and b is not None:
            return TReal.from_mpf(a + b)  # plain scale: let mpf resolve cancellation
        c = self.lnmag.cmp(other.lnmag)
        if c == 0:
            if self.sign == other.sign:
                return TReal(self.sign, self.lnmag.add(Tln.from_mpf(mpmath.ln(2))))
            return TReal.zero()  # cancellation beyond working precision
        big, small = (self, other) if c > 0 else (other, self)
        # Relative size of the small term; below drop threshold it is sub-ulp.
        ratio_ln = small.lnmag.sub(big.lnmag)
        rl = ratio_ln.to_mpf()
        if rl is None or rl < -_drop_threshold():
            return big
        factor = 1 + (1 if big.sign == small.sign else -1) * mpmath.exp(rl)
        if factor == 0:
            return TReal.zero()
        out = TReal(big.sign, big.lnmag.add(Tln.from_mpf(mpmath.log(abs(factor)))))
        return out if factor > 0 else out.neg()

    def cmp_magnitude(self, other: "TReal") -> int:
        """Compare |self| with |other|; zeros compare below everything."""
        if self.sign == 0:
            return 0 if other.sign == 0 else -1
        if other.sign == 0:
            return 1
        return self.lnmag.cmp(other.lnmag)

    def describe(self) -> str:
        if self.sign == 0:
            return "0"
        v = self.to_mpf()
        if v is not None and abs(self.lnmag.to_mpf() or mpf(0)) <= 5e4:
            return mpmath.nstr(v, 17)
        return f"{'-' if self.sign < 0 else ''}exp({self.lnmag.describe()})"
