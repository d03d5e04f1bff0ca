import cmath
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oneturn import (
    Biholo,
    BranchCutError,
    ConvergenceError,
    HalfPlane,
    IDENTITY_MAP,
    StandardQuadraticDomain,
    Strip,
    psi_biholo,
    psi_inverse_biholo,
    psi_invert,
    psi_map,
    sqd_boundary,
    translation,
)


def test_psi_map_exact_on_real_axis():
    dom = StandardQuadraticDomain(1.0)
    assert psi_map(dom, 3) == 5 + 0j
    assert psi_map(dom, 0) == 1 + 0j
    dom2 = StandardQuadraticDomain(2.0)
    assert psi_map(dom2, 8) == 8 + 2 * 3.0


def test_psi_map_branch_positive_real_part():
    dom = StandardQuadraticDomain(0.7)
    for zeta in (1 + 5j, -0.5 - 3j, 100j, -0.9):
        root = (psi_map(dom, zeta) - zeta) / dom.C
        assert root.real > 0


def test_psi_map_rejects_branch_cut():
    dom = StandardQuadraticDomain(1.0)
    with pytest.raises(BranchCutError):
        psi_map(dom, -1)
    with pytest.raises(BranchCutError):
        psi_map(dom, -2.5)


def test_boundary_parametrization_matches_map():
    dom = StandardQuadraticDomain(1.3)
    for t in (-40.0, -7.5, -1.0, -1e-8, 0.0, 1e-8, 0.25, 3.0, 50.0):
        via_map = psi_map(dom, 1j * t) if t != 0 else psi_map(dom, 0)
        assert abs(sqd_boundary(dom, t) - via_map) < 1e-12


def test_boundary_at_zero_is_real():
    dom = StandardQuadraticDomain(4.0)
    assert sqd_boundary(dom, 0.0) == 4.0 + 0j


def test_invert_roundtrip_far_right():
    dom = StandardQuadraticDomain(1.0)
    zeta = 40 + 3j
    w = psi_map(dom, zeta)
    assert abs(psi_invert(dom, w) - zeta) < 1e-10


def test_invert_near_branch_point():
    dom = StandardQuadraticDomain(2.0)
    zeta = -0.97 + 0.01j
    w = psi_map(dom, zeta)
    back = psi_invert(dom, w, tol=1e-12)
    assert abs(psi_map(dom, back) - w) < 1e-12


@settings(max_examples=60, deadline=None)
@given(
    re=st.floats(-0.8, 60.0),
    im=st.floats(-60.0, 60.0),
    C=st.floats(0.1, 5.0),
)
def test_invert_solves_to_tolerance(re, im, C):
    dom = StandardQuadraticDomain(C)
    w = psi_map(dom, complex(re, im))
    zeta = psi_invert(dom, w, tol=1e-11)
    assert abs(psi_map(dom, zeta) - w) < 1e-11


def test_invert_rejects_bad_tol():
    with pytest.raises(ValueError):
        psi_invert(StandardQuadraticDomain(1.0), 5.0, tol=0.0)


def test_convergence_error_carries_residual():
    err = ConvergenceError("stalled", residual=0.25)
    assert err.residual == 0.25


def test_half_plane_membership():
    hp = HalfPlane(2.0)
    assert hp.contains(2.0001)
    assert hp.contains(3 + 100j)
    assert not hp.contains(2.0)
    assert not hp.contains(-5)
    with pytest.raises(ValueError):
        HalfPlane(math.inf)


def test_strip_membership_and_widening():
    s = Strip(index=0, lower=-1.0, upper=1.0, eps=0.5)
    assert s.contains(0.0)
    assert not s.contains(1.2j)
    assert s.contains(1.2j, widened=True)
    assert not s.contains(1.6j, widened=True)
    unbounded = Strip(index=3, lower=2.0, upper=math.inf)
    assert unbounded.contains(1e9 * 1j + 7)


def test_strip_validation():
    with pytest.raises(ValueError):
        Strip(index=0, lower=1.0, upper=1.0)
    with pytest.raises(ValueError):
        Strip(index=0, lower=0.0, upper=1.0, eps=-0.1)


def test_domain_shape_constant_must_be_positive():
    with pytest.raises(ValueError):
        StandardQuadraticDomain(0.0)
    with pytest.raises(ValueError):
        StandardQuadraticDomain(-1.0)


def test_biholo_composition_and_identity():
    """then() chains in application order and inverts in reverse."""
    t = translation(2 + 1j)
    dbl = Biholo(forward=lambda z: 2 * z, inverse=lambda z: z / 2, name="x2")
    comp = t.then(dbl)
    z = 3 - 4j
    assert comp.forward(z) == 2 * (z + 2 + 1j)
    assert abs(comp.inverse(comp.forward(z)) - z) == 0
    assert IDENTITY_MAP.forward(z) == z
    assert IDENTITY_MAP.inverse(z) == z


def test_psi_biholo_directions():
    dom = StandardQuadraticDomain(1.5)
    fwd = psi_biholo(dom)
    inv = psi_inverse_biholo(dom)
    z = 6 + 2j
    w = fwd.forward(z)
    assert cmath.isclose(fwd.inverse(w), z, abs_tol=1e-10)
    # the inverse handle runs Psi^{-1} forward, so the pair cancels
    assert abs(inv.forward(w) - z) < 1e-10
    assert abs(inv.inverse(z) - w) == 0
