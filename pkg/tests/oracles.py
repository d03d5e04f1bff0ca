"""Independent numeric oracles and frozen reference values.

Every frozen constant below was produced by one of the derivation
routines in this module (rerun them with ``python3 -m tests.oracles``);
the tests compare library outputs against the frozen numbers so a
regression in the library cannot silently re-derive its own expectation.
The routines deliberately avoid the library's quadrature and series
code: integrals use a plain composite trapezoid rule, roots come from
mpmath bisection, and special functions come straight from mpmath.
"""

import cmath
import math
from fractions import Fraction

import mpmath

# first boundary line of the standard half-plane partition
Y1 = 0.75 * math.pi

TWO_PI_I = 2j * math.pi


# -- kernel transform oracle ---------------------------------------------------


def pair_jump(coef: float):
    """Callables for the conjugate jump pair on the lines Im = +-Y1.

    The literal on the upper line is coef * exp(-exp(tau - i*Y1)), whose
    modulus on that line is exactly coef * exp(-exp(Re tau)); the lower
    line carries the anti-conjugate partner, as reality requires.
    """

    def upper(tau: complex) -> complex:
        return coef * cmath.exp(-cmath.exp(tau - 1j * Y1))

    def lower(tau: complex) -> complex:
        return -coef * cmath.exp(-cmath.exp(tau + 1j * Y1))

    return upper, lower


def trapezoid_transform(zeta: complex, coef: float = 1.0, t_hi: float = 9.0,
                        n: int = 300_000) -> complex:
    """Composite-trapezoid kernel transform over the +-Y1 jump pair.

    (1/2 pi i) * sum over the two lines of the integral of
    delta(tau)/(tau - zeta) dtau, lines traversed left to right from
    Re = 0.  Beyond t_hi the integrand is below exp(-exp(9)) ~ 1e-3520,
    so truncation is irrelevant at this accuracy.
    """
    upper, lower = pair_jump(coef)
    h = t_hi / n
    total = 0j
    for fn, y in ((upper, Y1), (lower, -Y1)):
        acc = 0j
        for k in range(n + 1):
            t = k * h
            tau = complex(t, y)
            w = fn(tau) / (tau - zeta)
            acc += w if 0 < k < n else 0.5 * w
        total += acc * h
    return total / TWO_PI_I


def modulus_tail_envelope(x: float, coef: float = 1.0, t_hi: float = 9.0,
                          n: int = 20_000) -> float:
    """Upper envelope for |transform| at real x: the modulus integral.

    (1/2 pi) * sum of integral |delta| / |tau - x|; inflated by 5 percent
    to absorb the trapezoid error, it certifies a measurement tolerance
    for real-axis samples of a synthesized cochain.
    """
    h = t_hi / n
    acc = 0.0
    for k in range(n + 1):
        t = k * h
        w = coef * math.exp(-math.exp(t)) / math.hypot(t - x, Y1)
        acc += w if 0 < k < n else 0.5 * w
    # the two lines contribute identical moduli
    return 1.05 * 2.0 * acc * h / (2.0 * math.pi)


# -- series oracles ------------------------------------------------------------


def compose_numeric_residual(outer_eval, inner_eval, combined_eval, x: float,
                             dps: int = 60) -> float:
    """|combined(x) - outer(inner(x))| at dps digits; evals take mpf."""
    with mpmath.workdps(dps):
        xx = mpmath.mpf(x)
        direct = outer_eval(inner_eval(xx))
        return float(abs(combined_eval(xx) - direct))


def a_conj_coefficient(n: int, c: Fraction) -> Fraction:
    """Closed form for ln(exp(z) + c) - z = sum (-1)^{n+1} c^n / n e^{-nz}."""
    return Fraction((-1) ** (n + 1)) * Fraction(c) ** n / n


# -- special-function values ---------------------------------------------------


def derive_special_values() -> dict:
    with mpmath.workdps(40):
        vals = {
            # integral of exp(-exp(t)) over [0, inf): substitute u = e^t
            "ABS_JUMP_INTEGRAL": mpmath.e1(1),
            # integral of exp(-(s^2 - 1)) over [1, inf)
            "I_RHO_SQUARE": mpmath.e * mpmath.sqrt(mpmath.pi) / 2 * mpmath.erfc(1),
            "LAMBDA_AT_1": mpmath.e - 2,
            "LAMBDA_AT_3": mpmath.e**3 - mpmath.mpf(2) / 3,
            # root of exp(a) - 2/a (first positive decay margin, C3 = 1)
            "LAMBDA_ROOT": mpmath.findroot(
                lambda a: mpmath.exp(a) - 2 / a, mpmath.mpf("0.9")
            ),
            # root of q(x) = exp(x/2) - 4/x - 1 (certificate onset, C3 = 1)
            "Q_ROOT": mpmath.findroot(
                lambda x: mpmath.exp(x / 2) - 4 / x - 1, mpmath.mpf("2.1")
            ),
        }
    return {k: float(v) for k, v in vals.items()}


def simple_logbound_direct(C3: float, C4: float, C5: float, x: float) -> float:
    """The displayed certificate exponent, evaluated at 40 digits."""
    with mpmath.workdps(40):
        q = C3 * mpmath.exp(mpmath.mpf(x) / 2) - 4 / mpmath.mpf(x) - 1
        pref = C4 + C5 * q * (mpmath.mpf(x) ** 2 / 4 + 1)
        return float(-q * x / 3 + mpmath.log(pref))


# -- iterated-exponential comparisons -------------------------------------------


def ln_gap_violates(ln_gap: float, n: int, x: float, mu: float = 1.0) -> bool:
    """Whether |gap| >= exp(-mu * exp^n(x)), given ln|gap|.

    Computed in logs; once the tower overflows binary64 the bound
    underflows to zero and any nonzero gap violates it.
    """
    t = float(x)
    for _ in range(n):
        if t > 709.0:
            return True
        t = math.exp(t)
    return ln_gap >= -mu * t


# -- frozen values --------------------------------------------------------------

# trapezoid_transform(3+0j, coef=1.0): pure-real by conjugate symmetry
PIN_TRANSFORM_AT_3 = -0.013787762620765516

# derive_special_values() output, frozen
PIN_ABS_JUMP_INTEGRAL = 0.21938393439552029
PIN_I_RHO_SQUARE = 0.37893607807065605
PIN_LAMBDA_AT_1 = 0.7182818284590452
PIN_LAMBDA_AT_3 = 19.418870256521
PIN_LAMBDA_ROOT = 0.8526055020137255
PIN_Q_ROOT = 2.1201806397864207

# simple_logbound_direct(1, 1, 1, 10.0), frozen
PIN_SIMPLE_LOGBOUND_10 = -481.7949834512743


if __name__ == "__main__":
    print("TRANSFORM_AT_3", repr(trapezoid_transform(3.0 + 0j)))
    for k, v in derive_special_values().items():
        print(k, repr(v))
    print("SIMPLE_LOGBOUND_10", repr(simple_logbound_direct(1.0, 1.0, 1.0, 10.0)))
