"""Invariant suite run by ``tpms verify``: one (name, status, worst) triple per check.

Status is "pass", "fail" or "erratum"; the last marks a formula that is checked
as printed in the source and known not to hold, which does not fail the suite.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from . import periods
from .quadrature import SingularitySpec, integrate
from .weierstrass import involution_table_check, make_params

ADDITIVITY_FACTOR = 3.0
_GRID = np.linspace(0.1, 0.9, 5)
_FD_STEP = 1e-5


def check_involutions():
    worst = 0.0
    ok = True
    for a, b, x in ((0.47, 0.8440840243880724, 0.3197864471479262), (0.15, 0.8, 0.74), (0.3, 0.6, 0.2)):
        rep = involution_table_check(make_params(a, b, x))
        worst = max(worst, rep.worst)
        ok &= rep.ok
    return [("involution_table", "pass" if ok else "fail", worst)]


def check_identities():
    rep = periods.lemma_identities_check()
    out = []
    for c in rep.checks:
        status = "erratum" if c.get("erratum") else ("pass" if c["ok"] else "fail")
        out.append((f"identity_{c['name']}", status, float(c["worst"])))
    return out


def check_quadrature():
    s_lo = SingularitySpec("lower", -0.75)
    r1 = integrate(lambda t, lo, hi: lo ** -0.75, (0.0, 1.0), (s_lo, None), 1e-13, 1e-13, offsets=True)
    e1 = abs(r1.value - 4.0)
    r2 = integrate(
        lambda t, lo, hi: (lo * hi) ** -0.5,
        (0.0, 1.0),
        (SingularitySpec("lower", -0.5), SingularitySpec("upper", -0.5)),
        1e-13,
        1e-13,
        offsets=True,
    )
    e2 = abs(r2.value - math.pi)
    r3 = integrate(lambda t: np.exp(t), (0.0, 1.0), abs_tol=1e-14, rel_tol=1e-14)
    e3 = abs(r3.value - (math.e - 1))
    worst = max(e1, e2, e3)
    return [("quadrature_selftest", "pass" if worst <= 1e-11 else "fail", worst)]


def random_triples(n: int = 125, seed: int = 20240501):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        a = float(rng.uniform(0.02, 0.95))
        b = float(rng.uniform(a + 1e-3, 1 - 1e-3))
        x = float(rng.uniform(0.01, 0.99))
        if a + 1e-3 < b < 1 - 1e-3:
            out.append((a, b, x))
    return out


def additivity_defects(n: int = 125, seed: int = 20240501, residual_fn: Callable = None):
    fn = residual_fn or (lambda a, b, x: periods.residuals(make_params(a, b, x)))
    return [abs(fn(a, b, x).additivity_defect) for a, b, x in random_triples(n, seed)]


def check_additivity(residual_fn: Callable = None):
    d = additivity_defects(residual_fn=residual_fn)
    tol = ADDITIVITY_FACTOR * periods.QUAD_ABS
    worst = max(d)
    return [("additivity", "pass" if worst <= tol else "fail", worst)]


def monotonicity_grid(h: float = _FD_STEP):
    """Finite-difference slopes of I_gamma on a 5 x 5 x 5 grid of (a, b, x).

    b and x are placed at the same relative positions inside (a, 1) and (0, 1).
    Returns (worst d/dx, worst -d/db); both must be positive.
    """
    worst_x = worst_b = math.inf
    for a in _GRID:
        for fb in _GRID:
            b = a + fb * (1 - a)
            for x in _GRID:
                gx = periods.i_gamma(make_params(a, b, x + h)) - periods.i_gamma(make_params(a, b, x - h))
                gb = periods.i_gamma(make_params(a, b - h, x)) - periods.i_gamma(make_params(a, b + h, x))
                worst_x = min(worst_x, gx / (2 * h))
                worst_b = min(worst_b, gb / (2 * h))
    return worst_x, worst_b


def sign_grid():
    """Worst values of I_gamma at (b, x) = (1, 1) and at (b, x) = (a, 0) over nine a."""
    a_vals = np.linspace(0.1, 0.9, 9)
    s1 = min(periods.i_gamma_limit_b1(float(a), 1.0) for a in a_vals)
    s2 = min(periods.i_gamma_limit_ba(float(a), 0.0) for a in a_vals)
    return s1, s2


def check_signs():
    s1, s2 = sign_grid()
    wx, wb = monotonicity_grid()
    return [
        ("sign_b1_x1", "pass" if s1 > 0 else "fail", s1),
        ("sign_ba_x0", "pass" if s2 > 0 else "fail", s2),
        ("monotone_in_x", "pass" if wx > 0 else "fail", wx),
        ("monotone_in_b", "pass" if wb > 0 else "fail", wb),
    ]


def check_alpha():
    al = periods.alpha()
    v = periods.i_gamma_limit_b1(0.5, 0.0)
    return [
        ("alpha", "pass" if 0.5 < al < 1 else "fail", al),
        ("lemma_b1_half_negative", "pass" if v < 0 else "fail", v),
    ]


def check_limits():
    from .cli import limit_schedules
    from .limits import hw_gap, is_monotone_decreasing, scherk_gap

    sch, hw = limit_schedules()
    term = periods.terminal_point()
    gs = [scherk_gap(q) for q in sch]
    gh = [hw_gap(q, terminal=term) for q in hw]
    return [
        ("scherk_trend", "pass" if is_monotone_decreasing(gs) else "fail", gs[-1]),
        ("hw_trend", "pass" if is_monotone_decreasing(gh) else "fail", gh[-1]),
    ]


def check_surface():
    from .surface import build_surface

    q = periods.curve_point_at(0.47)
    b = build_surface(q.params, 16)
    worst_loop = max(c.residual for c in b.loops)
    ok = (
        b.quality.euler_characteristic == -12
        and b.quality.census.get("vertical_planar") == 8
        and b.quality.census.get("horizontal_planar") == 4
        and b.quality.seam_mismatch <= 1e-6
        and worst_loop <= 1e-6
    )
    return [("surface_closure", "pass" if ok else "fail", max(b.quality.seam_mismatch, worst_loop))]


SUITE = (
    check_involutions,
    check_identities,
    check_quadrature,
    check_additivity,
    check_signs,
    check_alpha,
    check_limits,
    check_surface,
)


def run_all():
    out = []
    for fn in SUITE:
        out.extend(fn())
    return out
