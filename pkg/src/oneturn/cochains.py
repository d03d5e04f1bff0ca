"""Cochain values: per-cell analytic components and their algebra.

A cochain assigns to every cell of a partition a function analytic on
the cell's eps-enlargement.  Components come in a few closed shapes:

  * ExpPolyComponent  - c0 + b*zeta + sum of a_n * exp(-n*zeta), the
                        exact form of truncated Dulac series;
  * CallableComponent - a user or synthesis supplied numeric handle;
  * CHComponent       - the kernel transform of declared boundary jumps,
                        analytically continued to the widened strip;
  * Sum/Product/Const/Pullback wrappers.

The synthesis constructors build the two ends of the decay dichotomy:
`synthesize_simple` realizes prescribed Stokes jumps through the kernel
transform (its components differ from the base series by a slowly
decaying transform tail on the real axis), while `nc_witness_cochain`
assembles components from strip-centered double-exponential bumps whose
differences ARE the jumps, so its real-axis component equals the base
series up to an exactly known bump and the jump bound is witnessed with
double-exponential accuracy.

A caution about jump literals: a certificate |delta| <= C exp(-C' exp(Re tau))
constrains the values ON the arc.  The same formula written in tau, like
exp(-exp(t)), grows double-exponentially on lines where cos(Im tau) < 0;
certifiable entire representatives must be adapted to their line, e.g.
exp(-exp(t - i*y_n)) whose modulus on Im tau = y_n is exactly exp(-exp(Re tau)).
"""

from __future__ import annotations

import ast
import cmath
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Mapping, Optional

from .cauchy_heine import (
    DEFAULT_QUADRATURE,
    QuadratureConfig,
    entry_boundary_value,
    transform_from_jumps,
)
from .domains import Biholo, HalfPlane
from .errors import (
    CapabilityError,
    EvalDomainError,
    EvalRangeError,
    InputError,
    PartitionError,
)
from .partitions import (
    Cell,
    GeneralizedNeighborhood,
    OrientedArc,
    Partition,
    product_partition,
    pullback_partition,
    standard_partition,
)
from .series import DulacSeries, series_eval

#: complex-step size for analytic numeric handles
_COMPLEX_STEP = 1e-20

#: central-difference step for handles without complex support
_CENTRAL_STEP = 1e-6

#: closest approach of derivative kernel evaluations to their lines
_KERNEL_DERIVATIVE_BAND = 0.05


class Component:
    """Evaluation interface shared by all component shapes."""

    def value(self, zeta: complex) -> complex:
        raise NotImplementedError

    def derivative(self) -> "Component":
        raise NotImplementedError

    #: evaluation-margin cost of differentiating this component
    numeric_step: float = 0.0


@dataclass(frozen=True)
class ConstComponent(Component):
    c: complex = 0j

    def value(self, zeta: complex) -> complex:
        return self.c

    def derivative(self) -> Component:
        return ConstComponent(0j)


@dataclass(frozen=True)
class ExpPolyComponent(Component):
    """c0 + linear*zeta + sum of coeff*exp(-n*zeta), differentiable exactly."""

    c0: complex = 0j
    linear: complex = 0j
    terms: tuple = ()

    def value(self, zeta: complex) -> complex:
        zeta = complex(zeta)
        out = self.c0 + self.linear * zeta
        for n, coeff in self.terms:
            w = -n * zeta
            if w.real < -745.0:
                continue
            out += coeff * cmath.exp(w)
        return out

    def derivative(self) -> Component:
        return ExpPolyComponent(
            c0=self.linear,
            linear=0j,
            terms=tuple((n, -n * coeff) for n, coeff in self.terms),
        )


def series_component(S: DulacSeries) -> ExpPolyComponent:
    c0 = float(S.c0)
    if S.shift_log_arg != 1:
        c0 += math.log(float(S.shift_log_arg))
    return ExpPolyComponent(
        c0=complex(c0),
        linear=1 + 0j,
        terms=tuple((n, complex(float(a))) for n, a in S.coeffs),
    )


@dataclass(frozen=True)
class CallableComponent(Component):
    """Numeric handle; derivatives by complex step when the values allow.

    The complex step Im f(x + i h)/h is exact to machine precision but
    only valid where f is real on the real axis; elsewhere a central
    difference with the declared step is used, which costs evaluation
    margin.
    """

    fn: Callable[[complex], complex] = None
    real_on_real: bool = False
    label: str = ""
    numeric_step: float = _CENTRAL_STEP

    def value(self, zeta: complex) -> complex:
        return self.fn(complex(zeta))

    def derivative(self) -> Component:
        fn = self.fn
        if self.real_on_real:

            def dfn(zeta: complex) -> complex:
                zeta = complex(zeta)
                if zeta.imag == 0.0:
                    probe = fn(complex(zeta.real, _COMPLEX_STEP))
                    base = fn(zeta)
                    if abs(base.imag) < 1e-14 * (1 + abs(base)):
                        return complex(probe.imag / _COMPLEX_STEP, 0.0)
                h = _CENTRAL_STEP
                return (fn(zeta + h) - fn(zeta - h)) / (2 * h)

        else:

            def dfn(zeta: complex) -> complex:
                h = _CENTRAL_STEP
                zeta = complex(zeta)
                return (fn(zeta + h) - fn(zeta - h)) / (2 * h)

        return CallableComponent(
            fn=dfn, real_on_real=False, label=f"d/dz {self.label}".strip()
        )


@dataclass(frozen=True)
class SumComponent(Component):
    parts: tuple = ()

    def value(self, zeta: complex) -> complex:
        return sum((p.value(zeta) for p in self.parts), 0j)

    def derivative(self) -> Component:
        return SumComponent(tuple(p.derivative() for p in self.parts))

    @property
    def numeric_step(self) -> float:
        return max((p.numeric_step for p in self.parts), default=0.0)


@dataclass(frozen=True)
class ProductComponent(Component):
    left: Component = None
    right: Component = None

    def value(self, zeta: complex) -> complex:
        return self.left.value(zeta) * self.right.value(zeta)

    def derivative(self) -> Component:
        return SumComponent(
            (
                ProductComponent(self.left.derivative(), self.right),
                ProductComponent(self.left, self.right.derivative()),
            )
        )

    @property
    def numeric_step(self) -> float:
        return max(self.left.numeric_step, self.right.numeric_step)


@dataclass(frozen=True)
class PullbackComponent(Component):
    base: Component = None
    chart: Biholo = None
    numeric_step: float = _CENTRAL_STEP

    def value(self, zeta: complex) -> complex:
        return self.base.value(self.chart.forward(complex(zeta)))

    def derivative(self) -> Component:
        def dfn(zeta: complex) -> complex:
            h = _CENTRAL_STEP
            zeta = complex(zeta)
            return (self.value(zeta + h) - self.value(zeta - h)) / (2 * h)

        return CallableComponent(fn=dfn, label="pullback derivative")


@dataclass(frozen=True)
class JumpEntry:
    """One arc's declared jump with its decay certificate.

    The certificate asserts |fn(tau)| <= C * exp(-Cprime * exp(Re tau))
    along the arc; unbounded arcs require C, Cprime > 0 before any tail
    is truncated.  `literal` keeps the parseable source text when the
    entry came from a config file.
    """

    arc_id: str
    fn: Callable[[complex], complex] = field(compare=False)
    C: float = 0.0
    Cprime: float = 0.0
    literal: str = ""

    @property
    def is_zero(self) -> bool:
        return self.C == 0.0 and self.Cprime == 0.0 and self.literal == "0"


@dataclass(frozen=True)
class JumpSpec:
    entries: tuple = ()
    real_symmetric: bool = False

    def entries_for(self, arc_id: str) -> tuple:
        return tuple(e for e in self.entries if e.arc_id == arc_id)


_LINE_PREFIX = "line_"


def _line_index(arc_id: str) -> int:
    if not arc_id.startswith(_LINE_PREFIX):
        raise InputError(f"arc {arc_id!r} is not a line of a standard partition")
    return int(arc_id[len(_LINE_PREFIX):])


def _strip_above_line(strip_index: int, line_index: int) -> bool:
    if line_index > 0:
        return strip_index >= line_index
    return strip_index >= line_index + 1


@dataclass(frozen=True)
class CHComponent(Component):
    """Kernel transform of declared jumps, continued into one strip's margin.

    Off the boundary lines the value is the plain transform.  Crossing
    the strip's own bounding line (allowed inside the eps-enlargement)
    continues the transform analytically by adding the jump with the
    strip's sign, and points on a line evaluate the genuine one-sided
    boundary value through a singularity-subtracted kernel rather than
    offset extrapolation, so coboundary measurements stay an independent
    route from the residual extrapolators.
    """

    partition: Partition = None
    entries: tuple = ()
    strip_index: int = 0
    cfg: QuadratureConfig = DEFAULT_QUADRATURE
    kernel_power: int = 1
    factor: float = 1.0

    @property
    def numeric_step(self) -> float:
        return _KERNEL_DERIVATIVE_BAND

    def value(self, zeta: complex) -> complex:
        zeta = complex(zeta)
        if self.kernel_power > 1:
            for entry in self.entries:
                arc = self.partition.arc(entry.arc_id)
                if arc.distance_to(zeta) < _KERNEL_DERIVATIVE_BAND:
                    raise CapabilityError(
                        "derivative kernels are evaluable only at distance "
                        f">= {_KERNEL_DERIVATIVE_BAND} from the boundary lines"
                    )
            return transform_from_jumps(
                self.partition, self.entries, zeta, self.cfg,
                self.kernel_power, self.factor,
            ).value
        total = 0j
        for entry in self.entries:
            arc = self.partition.arc(entry.arc_id)
            n = _line_index(entry.arc_id)
            above = _strip_above_line(self.strip_index, n)
            own_side = 1 if above else -1
            v = zeta.imag - arc.y
            if abs(v) < 1.0 and arc.x_start + 1e-3 < zeta.real:
                val, _ = entry_boundary_value(
                    self.partition, entry, zeta, self.cfg,
                    side=own_side if abs(v) < 1e-13 else (1 if v > 0 else -1),
                )
                total += val
                if abs(v) >= 1e-13 and (v > 0) != above:
                    # continuation across the strip's line picks up the jump
                    total += own_side * entry.fn(zeta)
            else:
                val = transform_from_jumps(
                    self.partition, (entry,), zeta, self.cfg
                ).value
                total += val
                if abs(v) >= 1e-13 and abs(v) < 1.5 and (v > 0) != above:
                    total += own_side * entry.fn(zeta)
        return total

    def derivative(self) -> Component:
        return replace(
            self,
            kernel_power=self.kernel_power + 1,
            factor=self.factor * self.kernel_power,
        )


@dataclass(frozen=True, eq=False)
class Cochain:
    """Per-cell components over a partition, with extension margin eps.

    `jumps` optionally declares the coboundary in closed form with decay
    certificates; the transform and estimate routines use the declaration
    when present, and the synthesis constructors guarantee it matches the
    measured coboundary.
    """

    partition: Partition
    eps: float
    components: Mapping
    jumps: Optional[JumpSpec] = None
    component_kind: str = "expression"
    label: str = ""

    def __post_init__(self) -> None:
        if not self.eps > 0:
            raise InputError("extension margin eps must be positive")
        if self.eps >= self.partition.neighborhood.eps0:
            raise InputError(
                "eps must stay below the neighborhood rule's eps0 "
                f"({self.partition.neighborhood.eps0:g})"
            )
        cell_ids = {c.cell_id for c in self.partition.cells}
        comp_ids = set(self.components.keys())
        if comp_ids != cell_ids:
            missing = cell_ids - comp_ids
            extra = comp_ids - cell_ids
            raise InputError(
                f"components must cover the cells exactly; missing={sorted(missing)}, "
                f"unknown={sorted(extra)}"
            )

    def evaluate(self, cell_id: str, zeta: complex) -> complex:
        return self.components[cell_id].value(complex(zeta))


def _in_enlargement(f: Cochain, cell_id: str, tau: complex) -> bool:
    p = f.partition
    if p.kind == "mapped":
        base = p.base_partition
        image = p.chart.forward(complex(tau))
        return base.cell_contains(cell_id, image, f.eps)
    if p.kind in ("strips", "trivial"):
        return p.cell_contains(cell_id, tau, f.eps)
    # generic polyline partitions carry no cell geometry; membership is
    # the caller's responsibility there
    return True


def coboundary_eval(f: Cochain, arc, tau: complex) -> complex:
    """f_left(tau) - f_right(tau) for tau on the arc.

    Orientation is the arc's own: reversing it negates the value.
    """
    if isinstance(arc, str):
        arc = f.partition.arc(arc)
    tau = complex(tau)
    if arc.distance_to(tau) > 1e-9 * (1.0 + abs(tau)):
        raise EvalDomainError("tau does not lie on the arc")
    for cell_id in (arc.left_cell, arc.right_cell):
        if not _in_enlargement(f, cell_id, tau):
            raise EvalDomainError(
                f"tau is outside the eps-enlargement of cell {cell_id!r}"
            )
    return f.evaluate(arc.left_cell, tau) - f.evaluate(arc.right_cell, tau)


def _strip_sample_point(p: Partition, cell: Cell) -> complex:
    if cell.strip is None:
        if isinstance(p.total_domain, HalfPlane):
            return complex(p.total_domain.a + 1.37, 0.0)
        return complex(7.31, 0.0)
    lo, hi = cell.strip.lower, cell.strip.upper
    if math.isinf(lo):
        mid = hi - 1.0
    elif math.isinf(hi):
        mid = lo + 1.0
    else:
        mid = 0.5 * (lo + hi)
    x = p.total_domain.a + 1.37 if isinstance(p.total_domain, HalfPlane) else 7.31
    return complex(x, mid)


def _merge_sum_jumps(f: Cochain, g: Cochain, part: Partition) -> Optional[JumpSpec]:
    f_ok = f.jumps is not None or not f.partition.arcs
    g_ok = g.jumps is not None or not g.partition.arcs
    if not (f_ok and g_ok):
        return None

    def level_entries(c: Cochain, y: float):
        if c.jumps is None:
            return []
        out = []
        for e in c.jumps.entries:
            arc = c.partition.arc(e.arc_id)
            if arc.kind == "hline" and abs(arc.y - y) < 1e-12:
                out.append(e)
        return out

    entries = []
    for arc in part.arcs:
        if arc.kind != "hline":
            return None
        here = level_entries(f, arc.y) + level_entries(g, arc.y)
        if not here:
            continue
        if len(here) == 1:
            e = here[0]
            entries.append(replace(e, arc_id=arc.arc_id))
        else:
            fns = tuple(e.fn for e in here)
            summed = lambda tau, fns=fns: sum(fn(tau) for fn in fns)
            entries.append(
                JumpEntry(
                    arc_id=arc.arc_id,
                    fn=summed,
                    C=sum(e.C for e in here),
                    Cprime=min(e.Cprime for e in here),
                    literal="",
                )
            )
    sym = (
        (f.jumps.real_symmetric if f.jumps else True)
        and (g.jumps.real_symmetric if g.jumps else True)
    )
    return JumpSpec(tuple(entries), real_symmetric=sym)


def cochain_combine(f: Cochain, g: Cochain, mode: str) -> Cochain:
    """Sum or product on the common refinement of the two partitions."""
    if mode not in ("sum", "product"):
        raise InputError("mode must be 'sum' or 'product'")
    part = product_partition(f.partition, g.partition)
    eps = min(f.eps, g.eps)
    components = {}
    for cell in part.cells:
        probe = _strip_sample_point(part, cell)
        fc = f.components[f.partition.cell_of(probe)]
        gc = g.components[g.partition.cell_of(probe)]
        if mode == "sum":
            components[cell.cell_id] = SumComponent((fc, gc))
        else:
            components[cell.cell_id] = ProductComponent(fc, gc)
    jumps = _merge_sum_jumps(f, g, part) if mode == "sum" else None
    return Cochain(
        partition=part,
        eps=eps,
        components=components,
        jumps=jumps,
        component_kind="mixed",
        label=f"({f.label or 'f'} {'+' if mode == 'sum' else '*'} {g.label or 'g'})",
    )


def cochain_derivative(f: Cochain) -> Cochain:
    """Componentwise derivative on the same partition.

    Exact components keep the full margin; numeric and kernel components
    pay their declared evaluation band, and the margin must survive.
    """
    step = max((c.numeric_step for c in f.components.values()), default=0.0)
    eps = f.eps - step
    if eps <= 0:
        raise CapabilityError(
            f"differentiation consumes the whole extension margin "
            f"(eps={f.eps:g}, step cost={step:g})"
        )
    return Cochain(
        partition=f.partition,
        eps=eps,
        components={k: c.derivative() for k, c in f.components.items()},
        jumps=None,
        component_kind=f.component_kind,
        label=f"d/dz {f.label}".strip(),
    )


def cochain_pullback(f: Cochain, rho: Biholo) -> Cochain:
    """Precompose every component with the chart; pull the partition back."""
    part = pullback_partition(f.partition, rho)
    if part is f.partition:
        return f
    chart = part.chart
    components = {
        k: PullbackComponent(base=c, chart=chart) for k, c in f.components.items()
    }
    jumps = None
    if f.jumps is not None:
        entries = tuple(
            JumpEntry(
                arc_id=e.arc_id,
                fn=(lambda tau, fn=e.fn: fn(chart.forward(complex(tau)))),
                C=0.0,
                Cprime=0.0,
                literal="",
            )
            for e in f.jumps.entries
        )
        jumps = JumpSpec(entries, real_symmetric=False)
    return Cochain(
        partition=part,
        eps=f.eps,
        components=components,
        jumps=jumps,
        component_kind=f.component_kind + "-pulled",
        label=f"{f.label}∘{rho.name}" if f.label else f"pullback by {rho.name}",
    )


def _validate_jumps(partition: Partition, jumps: JumpSpec) -> None:
    for entry in jumps.entries:
        arc = partition.arc(entry.arc_id)
        if arc.unbounded and not (entry.C > 0 and entry.Cprime > 0):
            raise InputError(
                f"entry on unbounded arc {entry.arc_id} lacks a decay "
                "certificate (C, Cprime > 0 required)"
            )
    if jumps.real_symmetric:
        _check_real_symmetry(partition, jumps)


def _check_real_symmetry(partition: Partition, jumps: JumpSpec) -> None:
    """Sampled check of delta_{-n}(conj tau) = -conj(delta_n(tau))."""
    by_line = {}
    for entry in jumps.entries:
        n = _line_index(entry.arc_id)
        by_line.setdefault(n, []).append(entry)
    for n, group in by_line.items():
        if n < 0:
            continue
        mirror = by_line.get(-n)
        if mirror is None:
            raise InputError(
                f"real-symmetric jump family needs a partner for line {n}"
            )
        arc = partition.arc(group[0].arc_id)
        for dx in (1.0, 2.5, 4.0):
            tau = complex(arc.x_start + dx, arc.y)
            up = sum(e.fn(tau) for e in group)
            down = sum(e.fn(tau.conjugate()) for e in mirror)
            scale = 1.0 + abs(up)
            if abs(down + up.conjugate()) > 1e-10 * scale:
                raise InputError(
                    "jump family is not conjugate-symmetric: "
                    f"delta_-{n}(conj tau) != -conj(delta_{n}(tau)) at {tau}"
                )


def synthesize_simple(
    a: float,
    S: DulacSeries,
    jumps: JumpSpec,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    eps: float = 0.3,
    n_lines: int = 8,
) -> Cochain:
    """Cochain with prescribed Stokes jumps via the kernel transform.

    Component on strip k:  series_eval(S, .) + transform of the jumps,
    analytically continued from strip k.  The jump relations make the
    measured coboundary equal the declared jumps, so the output is a
    ground-truth instance of the double-exponential jump class; note its
    real-axis deviation from the bare series decays only like the
    transform kernel, not double-exponentially.
    """
    partition = standard_partition(a, n_lines=n_lines)
    _validate_jumps(partition, jumps)
    base = series_component(S)
    components = {}
    for cell in partition.cells:
        k = cell.strip.index
        if jumps.entries:
            components[cell.cell_id] = SumComponent(
                (
                    base,
                    CHComponent(
                        partition=partition,
                        entries=jumps.entries,
                        strip_index=k,
                        cfg=cfg,
                    ),
                )
            )
        else:
            components[cell.cell_id] = base
    return Cochain(
        partition=partition,
        eps=eps,
        components=components,
        jumps=jumps,
        component_kind="ch-synthesized",
        label="simple cochain (kernel synthesis)",
    )


def nc_witness_cochain(
    a: float,
    S: DulacSeries,
    jumps: JumpSpec,
    perturbation: float = 0.0,
    eps: float = 0.3,
    n_lines: int = 8,
) -> Cochain:
    """Cochain with the same prescribed jumps, accumulated across strips.

    Strip k's component adds the signed jump functions of every line
    crossed between the real-axis strip and strip k (jump functions are
    entire, so they continue off their lines; only their values ON each
    line carry decay certificates, see the module note on line-adapted
    literals).  The coboundary then equals the declared jumps exactly
    while the real-axis component is the bare series, so |f - S| along
    the reals is zero, or exactly the optional global perturbation
    `perturbation * exp(-exp(zeta))`, which shifts every component alike
    and leaves the coboundary untouched.
    """
    partition = standard_partition(a, n_lines=n_lines)
    _validate_jumps(partition, jumps)
    by_line = {}
    for entry in jumps.entries:
        by_line.setdefault(_line_index(entry.arc_id), []).append(entry)
    base = series_component(S)
    perturb = None
    if perturbation != 0.0:
        lam = perturbation

        def bump(z: complex, lam=lam) -> complex:
            w = cmath.exp(complex(z))
            if w.real > 709.0:
                return 0j
            if w.real < -700.0:
                raise EvalRangeError(
                    "witness perturbation overflows away from the reals"
                )
            return lam * cmath.exp(-w)

        perturb = CallableComponent(fn=bump, real_on_real=True, label="bump")
    components = {}
    for cell in partition.cells:
        k = cell.strip.index
        parts = [base]
        if k > 0:
            crossed = [(n, +1) for n in range(1, k + 1)]
        elif k < 0:
            crossed = [(n, -1) for n in range(-1, k - 1, -1)]
        else:
            crossed = []
        for n, sign in crossed:
            for entry in by_line.get(n, ()):  # lines without jumps add nothing
                parts.append(
                    CallableComponent(
                        fn=(lambda z, fn=entry.fn, s=sign: s * fn(complex(z))),
                        label=f"jump {n}",
                    )
                )
        if perturb is not None:
            parts.append(perturb)
        components[cell.cell_id] = parts[0] if len(parts) == 1 else SumComponent(
            tuple(parts)
        )
    return Cochain(
        partition=partition,
        eps=eps,
        components=components,
        jumps=jumps,
        component_kind="nc-witness",
        label="simple cochain (accumulated jumps)",
    )


def perturb_component(f: Cochain, cell_id: str, shift: complex) -> Cochain:
    """Shift one component by a constant, keeping everything else.

    Declared jumps are left as they were, so the declaration no longer
    matches the measured coboundary; the trivialization residual detects
    exactly this kind of non-gluing.
    """
    if cell_id not in f.components:
        raise InputError(f"no cell named {cell_id!r}")
    components = dict(f.components)
    components[cell_id] = SumComponent(
        (components[cell_id], ConstComponent(complex(shift)))
    )
    return Cochain(
        partition=f.partition,
        eps=f.eps,
        components=components,
        jumps=f.jumps,
        component_kind=f.component_kind,
        label=f"{f.label} perturbed at {cell_id}",
    )


def calibration_cochain(radius: float = 1.0, jump_value: complex = 1.0) -> Cochain:
    """Unit-circle contour with a constant declared jump, for calibration.

    The transform of a constant jump over a counterclockwise circle is
    the Cauchy integral: jump_value inside, 0 outside.
    """
    if not radius > 0:
        raise InputError("radius must be positive")
    arc = OrientedArc(
        arc_id="circle_0",
        left_cell="inside",
        right_cell="outside",
        kind="circle",
        center=0j,
        radius=radius,
    )
    partition = Partition(
        total_domain=HalfPlane(-1e9),
        cells=(Cell("inside", "open disk"), Cell("outside", "disk complement")),
        arcs=(arc,),
        neighborhood=GeneralizedNeighborhood(radius, "metric-ball"),
        kind="polyline",
    )
    w = complex(jump_value)
    spec = JumpSpec(
        entries=(
            JumpEntry(
                arc_id="circle_0", fn=(lambda tau, w=w: w), C=0.0, Cprime=0.0,
                literal=repr(jump_value),
            ),
        )
    )
    components = {"inside": ConstComponent(0j), "outside": ConstComponent(0j)}
    return Cochain(
        partition=partition,
        eps=radius / 2,
        components=components,
        jumps=spec,
        component_kind="expression",
        label="calibration circle",
    )


# -- jump literal parsing ------------------------------------------------------

def _guarded_exp(w: complex) -> complex:
    w = complex(w)
    # cmath.exp raises OverflowError near Re w = 710; refuse with context
    if w.real > 700.0:
        raise EvalRangeError(
            f"jump literal exp() overflow at Re w = {w.real:.3g}"
        )
    return cmath.exp(w)


_ALLOWED_CALLS = {
    "exp": _guarded_exp,
    "sin": cmath.sin,
    "cos": cmath.cos,
    "sqrt": cmath.sqrt,
    "log": cmath.log,
}

_ALLOWED_NAMES = {"t", "tau"}


def _check_literal_node(node: ast.AST) -> None:
    if isinstance(node, ast.Expression):
        _check_literal_node(node.body)
    elif isinstance(node, ast.BinOp):
        if not isinstance(node.op, (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)):
            raise InputError("jump literals allow only + - * / ** arithmetic")
        _check_literal_node(node.left)
        _check_literal_node(node.right)
    elif isinstance(node, ast.UnaryOp):
        if not isinstance(node.op, (ast.USub, ast.UAdd)):
            raise InputError("jump literals allow only unary +/-")
        _check_literal_node(node.operand)
    elif isinstance(node, ast.Call):
        if not (isinstance(node.func, ast.Name) and node.func.id in _ALLOWED_CALLS):
            raise InputError(
                f"jump literals may call only {sorted(_ALLOWED_CALLS)}"
            )
        if node.keywords or len(node.args) != 1:
            raise InputError("jump literal calls take exactly one argument")
        _check_literal_node(node.args[0])
    elif isinstance(node, ast.Name):
        if node.id not in _ALLOWED_NAMES:
            raise InputError(f"unknown name {node.id!r} in jump literal")
    elif isinstance(node, ast.Constant):
        if not isinstance(node.value, (int, float, complex)):
            raise InputError("jump literal constants must be numbers")
    else:
        raise InputError(
            f"disallowed syntax in jump literal: {type(node).__name__}"
        )


def parse_jump_literal(text: str) -> Callable[[complex], complex]:
    """Compile a whitelisted arithmetic expression in t (or tau).

    Both names refer to the full complex point on the arc; complex
    constants (Python j-suffix syntax) are accepted, so line-adapted
    densities like exp(-exp(t - 2.356194490192345j)) can be written
    directly.
    """
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise InputError(f"unparseable jump literal {text!r}: {exc}") from exc
    _check_literal_node(tree)
    code = compile(tree, "<jump literal>", "eval")

    def fn(tau: complex) -> complex:
        tau = complex(tau)
        env = {"t": tau, "tau": tau, **_ALLOWED_CALLS}
        return complex(eval(code, {"__builtins__": {}}, env))

    return fn


def jumps_from_config(doc) -> JumpSpec:
    """Build a JumpSpec from config entries {n, expr, C, Cprime}.

    `doc` is either the entry list itself or a mapping with an "entries"
    list and an optional "real_symmetric" flag, matching the TOML block
    the command line reads.
    """
    if isinstance(doc, Mapping):
        raw_entries = doc.get("entries", [])
        symmetric = bool(doc.get("real_symmetric", False))
    else:
        raw_entries = doc
        symmetric = False
    entries = []
    for item in raw_entries:
        try:
            n = int(item["n"])
            expr = str(item["expr"])
            C = float(item["C"])
            Cprime = float(item["Cprime"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed jump entry {item!r}: {exc}") from exc
        if n == 0:
            raise InputError("jump entries live on lines n != 0")
        entries.append(
            JumpEntry(
                arc_id=f"line_{n}",
                fn=parse_jump_literal(expr),
                C=C,
                Cprime=Cprime,
                literal=expr,
            )
        )
    return JumpSpec(tuple(entries), real_symmetric=symmetric)
