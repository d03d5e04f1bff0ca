"""Half-planes, horizontal strips, and standard quadratic domains.

The standard quadratic domain with shape constant C > 0 is the image of
the right half-plane under

    Psi(zeta) = zeta + C*sqrt(zeta + 1),

where the square root takes the branch with positive real part (cut
along (-inf, -1]).  `psi_map` and `psi_invert` realize the map and its
numeric inverse; `sqd_boundary` evaluates the closed-form boundary
parametrization Psi(i*t).

>>> psi_map(StandardQuadraticDomain(1.0), 3)
(5+0j)
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

from .errors import BranchCutError, ConvergenceError

_NEWTON_MAX_ITER = 50


@dataclass(frozen=True)
class HalfPlane:
    """The open half-plane { zeta : Re zeta > a }."""

    a: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.a):
            raise ValueError("half-plane edge must be finite")

    def contains(self, zeta: complex) -> bool:
        return zeta.real > self.a


@dataclass(frozen=True)
class Strip:
    """Horizontal strip lower < Im zeta < upper, with widening margin eps.

    The widened strip spans lower - eps < Im zeta < upper + eps; either
    bound may be infinite for the outermost cells of a truncated
    partition.
    """

    index: int
    lower: float
    upper: float
    eps: float = 0.0

    def __post_init__(self) -> None:
        if not self.lower < self.upper:
            raise ValueError("strip requires lower < upper")
        if self.eps < 0:
            raise ValueError("widening must be nonnegative")

    def contains(self, zeta: complex, widened: bool = False) -> bool:
        e = self.eps if widened else 0.0
        return self.lower - e < zeta.imag < self.upper + e


@dataclass(frozen=True)
class StandardQuadraticDomain:
    """Shape data for Psi(zeta) = zeta + C*sqrt(zeta + 1)."""

    C: float

    def __post_init__(self) -> None:
        if not self.C > 0:
            raise ValueError("shape constant C must be positive")


def _sqrt_positive_real(z: complex) -> complex:
    # cmath.sqrt returns Re >= 0 with the cut on the negative axis; the
    # only ambiguity is the cut itself, which callers must exclude.
    w = cmath.sqrt(z)
    if w.real < 0:  # pragma: no cover - cmath should not produce this
        w = -w
    return w


def psi_map(dom: StandardQuadraticDomain, zeta: complex) -> complex:
    """Evaluate Psi(zeta) = zeta + C*sqrt(zeta+1), Re sqrt > 0.

    Raises BranchCutError when zeta + 1 lies on (-inf, 0], where the
    positive branch is undefined.
    """
    zeta = complex(zeta)
    s = zeta + 1
    if s.imag == 0 and s.real <= 0:
        raise BranchCutError(f"zeta + 1 = {s} lies on the branch cut (-inf, 0]")
    return zeta + dom.C * _sqrt_positive_real(s)


def psi_invert(dom: StandardQuadraticDomain, w: complex, tol: float = 1e-12) -> complex:
    """Solve Psi(zeta) = w by damped Newton iteration.

    The initial guess zeta0 = w - C*sqrt(w) is already accurate far to
    the right; steps are halved whenever the residual grows, which
    guards the region near the branch point where Psi' is not close
    to 1.  Raises ConvergenceError (with the last residual) if the
    residual is still above tol after 50 iterations.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    w = complex(w)
    C = dom.C
    zeta = w - C * cmath.sqrt(w) if w != 0 else complex(0.0)
    if (zeta + 1).imag == 0 and (zeta + 1).real <= 0:
        zeta = complex(-0.5, 0.0)
    res = abs(psi_map(dom, zeta) - w)
    for _ in range(_NEWTON_MAX_ITER):
        if res < tol:
            return zeta
        root = _sqrt_positive_real(zeta + 1)
        deriv = 1 + C / (2 * root)
        step = (psi_map(dom, zeta) - w) / deriv
        # Damping: halve until the residual decreases (or give up the halving).
        for _ in range(30):
            cand = zeta - step
            if (cand + 1).imag == 0 and (cand + 1).real <= 0:
                step /= 2
                continue
            cand_res = abs(psi_map(dom, cand) - w)
            if cand_res < res:
                zeta, res = cand, cand_res
                break
            step /= 2
        else:
            break
    if res < tol:
        return zeta
    raise ConvergenceError(
        f"psi_invert did not reach tol={tol} in {_NEWTON_MAX_ITER} iterations",
        residual=res,
    )


def sqd_boundary(dom: StandardQuadraticDomain, t: float) -> complex:
    """Boundary point Psi(i*t) from the closed half-angle formulas.

    With r = sqrt(1+t^2), the positive-branch root of 1 + i*t is
    sqrt((r+1)/2) + i*sgn(t)*sqrt((r-1)/2), so

        Psi(i*t) = C*sqrt((r+1)/2) + i*(C*sgn(t)*sqrt((r-1)/2) + t).

    The imaginary part is computed as t/sqrt(2(r+1)), the same quantity
    written without the r - 1 subtraction that loses every digit for
    small t.
    """
    t = float(t)
    r = math.hypot(1.0, t)
    p = math.sqrt((r + 1.0) / 2.0)
    q = t / math.sqrt(2.0 * (r + 1.0))
    return complex(dom.C * p, dom.C * q + t)


@dataclass(frozen=True)
class Biholo:
    """Invertible analytic map handle between two planar domains.

    `forward` maps the new domain onto the base domain; `inverse` is its
    two-sided inverse.  Pullback operations apply `inverse` to base
    points, so preimage cells {z : forward(z) in U} are traced by
    mapping U's geometry through `inverse`.
    """

    forward: Callable[[complex], complex]
    inverse: Callable[[complex], complex]
    name: str = ""

    def then(self, outer: "Biholo") -> "Biholo":
        """Composite handle z -> outer.forward(self.forward(z))."""
        return Biholo(
            forward=lambda z: outer.forward(self.forward(z)),
            inverse=lambda w: self.inverse(outer.inverse(w)),
            name=f"{outer.name or 'outer'}∘{self.name or 'inner'}",
        )


IDENTITY_MAP = Biholo(forward=lambda z: z, inverse=lambda z: z, name="id")


def translation(b: complex) -> Biholo:
    return Biholo(forward=lambda z: z + b, inverse=lambda z: z - b, name=f"t{b}")


def psi_biholo(dom: StandardQuadraticDomain, tol: float = 1e-13) -> Biholo:
    """Handle for Psi itself (forward = Psi, inverse numeric)."""
    return Biholo(
        forward=lambda z: psi_map(dom, z),
        inverse=lambda w: psi_invert(dom, w, tol),
        name=f"Psi(C={dom.C})",
    )


def psi_inverse_biholo(dom: StandardQuadraticDomain, tol: float = 1e-13) -> Biholo:
    """Handle whose forward direction is Psi^{-1}.

    Pulling a partition back along this handle carries cells of the
    half-plane onto their Psi-images inside the quadratic domain.
    """
    return Biholo(
        forward=lambda w: psi_invert(dom, w, tol),
        inverse=lambda z: psi_map(dom, z),
        name=f"Psi^-1(C={dom.C})",
    )
