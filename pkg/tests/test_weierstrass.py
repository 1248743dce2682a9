import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tpms.errors import ContinuationError, ParameterDomainError, SingularPointError
from tpms.weierstrass import (
    anchor_state,
    continue_along,
    continue_polyline,
    curve_specs,
    eval_dh,
    eval_g,
    g_upper,
    involution_table_check,
    make_params,
    phi_forms,
)

P = make_params(0.47, 0.85, 0.68)


def rhs(p, z):
    a, b, x = p.as_tuple()
    return z * (1 - a * z) / (z - a) * ((b - z) / (b * z - 1)) ** 2 * ((z + x) / (x * z + 1)) ** 2


@pytest.mark.parametrize("abx", [(0.47, 0.85, 0.68), (0.65, 0.89, 0.69), (0.15, 0.8, 0.74)])
def test_make_params_accepts_paper_triples(abx):
    assert make_params(*abx).as_tuple() == abx


@pytest.mark.parametrize(
    "abx, broken",
    [
        ((0.5, 0.5, 0.5), "a < b"),
        ((0.0, 0.5, 0.5), "0 < a"),
        ((0.3, 1.0, 0.5), "b < 1"),
        ((0.3, 0.6, 0.0), "0 < x"),
        ((0.3, 0.6, 1.2), "x < 1"),
    ],
)
def test_make_params_names_violated_inequality(abx, broken):
    with pytest.raises(ParameterDomainError, match=broken):
        make_params(*abx)


def test_anchor_g_at_one():
    z = complex(math.cos(1e-6), math.sin(1e-6))
    assert abs(anchor_state(P, z).g - 1.0) < 1e-5


@st.composite
def upper_points(draw):
    r = draw(st.floats(0.05, 0.98))
    t = draw(st.floats(0.02, math.pi - 0.02))
    return r * cmath.exp(1j * t)


@settings(max_examples=200, deadline=None)
@given(upper_points())
def test_g4_relation(z):
    g = complex(g_upper(P, z))
    r = rhs(P, z)
    assert abs(g**4 - r) <= 1e-12 * abs(r)


@settings(max_examples=50, deadline=None)
@given(upper_points(), upper_points())
def test_continuation_matches_closed_form(z0, z1):
    # within the open upper half-plane the continued branch is the closed-form one
    s = continue_along(P, anchor_state(P, z0), z1)
    assert abs(s.g - complex(g_upper(P, z1))) <= 1e-10 * max(1.0, abs(s.g))
    assert abs(s.g**4 - rhs(P, z1)) <= 1e-12 * abs(rhs(P, z1))


@pytest.mark.parametrize("centre, h", [(0.3 + 0.4j, 0.1), (-0.5 + 0.2j, 0.05), (0.7 + 0.1j, 0.05)])
def test_contractible_square_loop_monodromy(centre, h):
    s0 = anchor_state(P, centre - h - 1j * h)
    corners = [centre + h - 1j * h, centre + h + 1j * h, centre - h + 1j * h, centre - h - 1j * h]
    s1 = continue_polyline(P, s0, corners)
    assert abs(s1.g - s0.g) <= 1e-10
    assert max(abs(u - v) for u, v in zip(s1.args, s0.args)) <= 1e-10


def test_loop_around_branch_point_changes_sheet():
    # a loop around z = b alone multiplies g by e^{i pi}: the factor (b - z)^(1/2) flips
    b = P.b
    r = 0.05
    pts = [b + r * cmath.exp(1j * (math.pi / 2 + 2 * math.pi * k / 32)) for k in range(1, 33)]
    s0 = anchor_state(P, pts[-1])
    s1 = continue_polyline(P, s0, pts)
    assert abs(s1.g + s0.g) <= 1e-10


def test_eval_g_step_too_large():
    s = anchor_state(P, 0.5j)
    with pytest.raises(ContinuationError):
        eval_g(P, s, -0.9 + 0.05j)


def test_eval_g_on_locus():
    s = anchor_state(P, P.b + 0.01j)
    with pytest.raises(SingularPointError):
        eval_g(P, s, complex(P.b))


@pytest.mark.parametrize("t", np.linspace(0.05, math.pi - 0.05, 9))
def test_unit_modulus_on_gamma(t):
    assert abs(abs(complex(g_upper(P, cmath.exp(1j * t)))) - 1.0) <= 1e-12


def test_dh_on_gamma_at_quarter_turn():
    # dh/dt = dh/dz * i z
    z = 1j
    dt = eval_dh(P, z) * 1j * z
    assert abs(abs(dt) - 1 / math.sqrt(P.a + 1 / P.a)) <= 1e-12
    assert abs(dt.real) <= 1e-12


@pytest.mark.parametrize("t", np.linspace(0.1, math.pi - 0.1, 7))
def test_dh_pullback_on_gamma(t):
    z = cmath.exp(1j * t)
    dt = eval_dh(P, z) * 1j * z
    assert abs(dt.real) <= 1e-12
    assert abs(abs(dt) - 1 / math.sqrt(P.a + 1 / P.a - 2 * math.cos(t))) <= 1e-12


@pytest.mark.parametrize("t", [0.5, 0.6, 0.75, 0.84])
def test_dh_real_positive_on_a_b(t):
    d = eval_dh(P, complex(t))
    assert abs(d.imag) <= 1e-12 * abs(d)
    assert abs(d.real - 1 / (t * math.sqrt(P.a + 1 / P.a - t - 1 / t))) <= 1e-12 * abs(d)


@pytest.mark.parametrize("t", [0.05, 0.2, 0.4])
def test_dh_imaginary_on_0_a(t):
    d = eval_dh(P, complex(t))
    assert abs(d.real) <= 1e-12 * abs(d)


def test_dh_singular_points():
    for z in (0.0, P.a, 1 / P.a):
        with pytest.raises(SingularPointError):
            eval_dh(P, z)


@pytest.mark.parametrize("t", np.linspace(0.2, math.pi - 0.2, 5))
def test_phi3_on_gamma_has_no_real_part(t):
    z = cmath.exp(1j * t)
    phi = phi_forms(P, anchor_state(P, z))
    assert phi[2] == pytest.approx(eval_dh(P, z), abs=1e-13)
    assert abs((phi[2] * 1j * z).real) <= 1e-12


@pytest.mark.parametrize("t", [0.87, 0.92, 0.97])
def test_phi2_imaginary_on_b_1(t):
    s = anchor_state(P, complex(t))
    phi2 = phi_forms(P, s)[1]
    assert abs(phi2.real) <= 1e-10 * abs(phi2)


def test_phi_substitution_g_equal_i():
    # g = i: phi1 = (1/2)(-i - i) d = -i d
    from tpms.weierstrass import phi_from

    d = 0.7 + 0.0j
    phi = phi_from(np.array(1j), np.array(d))
    assert complex(phi[0]) == pytest.approx(-1j * d)
    assert complex(phi[1]) == pytest.approx(0.0)


@pytest.mark.parametrize("name", ["delta", "sigma1", "sigma2"])
def test_curve_spec_phase_and_modulus(name):
    spec = curve_specs(P)[name]
    lo, hi = spec.t_range
    t = np.linspace(lo, hi, 41)[1:-1]
    g = np.array([complex(g_upper(P, complex(z) + 1e-300j)) for z in spec.z_of_t(t)])
    assert np.max(np.abs(g - spec.g_phase * spec.absg_of_t(t))) <= 1e-10


def test_curve_spec_gamma():
    spec = curve_specs(P)["gamma"]
    t = np.linspace(0.1, 3.0, 20)
    assert np.max(np.abs(np.abs(spec.g_of_t(t)) - spec.absg_of_t(t))) <= 1e-12


@pytest.mark.parametrize("abx", [(0.47, 0.8440840234245828, 0.31978644507573567), (0.15, 0.8, 0.74), (0.3, 0.6, 0.2)])
def test_involution_table(abx):
    rep = involution_table_check(make_params(*abx))
    assert rep.ok, [r for r in rep.rows if not r["ok"]]
    assert len(rep.rows) == 6


def test_conjugation_symmetry():
    # row 5: g is real on (b, 1) so g(conj z) = conj g(z) continues across it
    for z in (0.9 + 0.01j, 0.95 + 0.02j):
        s = anchor_state(P, z)
        below = continue_along(P, s, z.conjugate())
        assert abs(below.g - s.g.conjugate()) <= 1e-10
