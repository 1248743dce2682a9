"""Period integrals, the special values alpha and x_a, and the solution curve.

Conventions (all integrands are the positive-orientation pullbacks of phi_2):

* I_gamma = int_0^pi Re g(e^{it}) |dh|        (the oriented period along gamma,
  t: 0 -> pi, equals -I_gamma);
* I_delta = 1/2 int_a^b (1/|g| - |g|) |dh|;
* I_sigma = J1 - J2 with J1 = 1/2 int_0^x (1/|g| - |g|)|dh| on z = -t and
  J2 = sqrt(2)/4 int_0^a (1/|g| + |g|)|dh| on z = t.

The three satisfy I_delta - I_gamma = I_sigma.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from ._parallel import pmap
from .errors import DomainError, NoRootError, TraceError
from .quadrature import SingularitySpec, integrate
from .weierstrass import SurfaceParams, g_upper, make_params

QUAD_ABS = 1e-12
QUAD_REL = 1e-12
DEFAULT_TOL = 1e-10

_S = SingularitySpec


@dataclass(frozen=True)
class PeriodResidual:
    i_gamma: float
    i_delta: float
    i_sigma: float

    @property
    def oriented_gamma(self) -> float:
        """Re of the integral of phi_2 along gamma traversed t: 0 -> pi."""
        return -self.i_gamma

    @property
    def additivity_defect(self) -> float:
        """Re int_delta phi_2 + Re int_gamma phi_2 - Re int_sigma phi_2 (zero in exact arithmetic)."""
        return self.oriented_gamma + self.i_delta - self.i_sigma


@dataclass(frozen=True)
class FamilyCurvePoint:
    s: float
    params: SurfaceParams
    residual: PeriodResidual


def _quad(f, lo, hi, sing=(None, None), offsets=False):
    return integrate(f, (lo, hi), sing, abs_tol=QUAD_ABS, rel_tol=QUAD_REL, offsets=offsets).value


# ---------------------------------------------------------------------------
# gamma


def _circle_weight(a, t):
    return 1.0 / np.sqrt(a + 1.0 / a - 2.0 * np.cos(t))


def _gamma_breaks(b: float, x: float) -> list[float]:
    # the integrand has boundary layers near t = 0 when b -> 1 and near t = pi when x -> 1
    pts = [0.0]
    w0 = 1.0 - b
    if w0 < 0.2:
        pts += [w0 * k for k in (1.0, 4.0, 16.0) if w0 * k < 1.0]
    w1 = 1.0 - x
    if w1 < 0.2:
        pts += [math.pi - w1 * k for k in (16.0, 4.0, 1.0) if w1 * k < 1.0]
    pts.append(math.pi)
    return sorted(set(pts))


def _i_gamma_raw(a: float, b: float, x: float) -> float:
    p = SurfaceParams(a, b, x, limit=True)

    def f(t):
        return g_upper(p, np.exp(1j * t)).real * _circle_weight(a, t)

    br = _gamma_breaks(b, x)
    return math.fsum(_quad(f, br[k], br[k + 1]) for k in range(len(br) - 1))


def i_gamma(params: SurfaceParams) -> float:
    """int_0^pi Re g(e^{it}) dt / sqrt(a + 1/a - 2 cos t)."""
    return _i_gamma_raw(params.a, params.b, params.x)


def _uarg_circle(c1, c0, z):
    ang = np.angle(c1 * z + c0)
    if c1 > 0:
        return np.where(ang < -0.5 * np.pi, ang + 2 * np.pi, np.maximum(ang, 0.0))
    return np.where(ang > 0.5 * np.pi, ang - 2 * np.pi, np.minimum(ang, 0.0))


def _limit_core(a, x, t, flip):
    """z^{1/4} * M^{1/4} * sqrt((z+x)/(xz+1)) on z = e^{it}, continuous from t = 0.

    M = (1-az)/(z-a) for flip=False (b = 1), (z-a)/(1-az) for flip=True (b = a).
    """
    z = np.exp(1j * t)
    arg_m = _uarg_circle(-a, 1.0, z) - _uarg_circle(1.0, -a, z)
    if flip:
        arg_m = -arg_m
    m = np.abs((1 - a * z) / (z - a))
    if flip:
        m = 1.0 / m
    arg_w = _uarg_circle(1.0, x, z) - (_uarg_circle(x, 1.0, z) if x > 0 else 0.0)
    w = np.abs((z + x) / (x * z + 1))
    phase = 0.25 * t + 0.25 * arg_m + 0.5 * arg_w
    return m ** 0.25 * np.sqrt(w) * np.exp(1j * phase)


def i_gamma_limit_b1(a: float, x: float) -> float:
    """I_gamma at b = 1: -int_0^pi Im{...} dt / sqrt(a + 1/a - 2 cos t)."""
    _check_limit_args(a, x)

    def f(t):
        return -_limit_core(a, x, t, False).imag * _circle_weight(a, t)

    br = _gamma_breaks(0.5, x)
    return math.fsum(_quad(f, br[k], br[k + 1]) for k in range(len(br) - 1))


def i_gamma_limit_ba(a: float, x: float) -> float:
    """I_gamma at b = a: int_0^pi Re{...} dt / sqrt(a + 1/a - 2 cos t)."""
    _check_limit_args(a, x)

    def f(t):
        return _limit_core(a, x, t, True).real * _circle_weight(a, t)

    br = _gamma_breaks(0.5, x)
    return math.fsum(_quad(f, br[k], br[k + 1]) for k in range(len(br) - 1))


def _check_limit_args(a, x):
    if not (0 < a < 1):
        raise DomainError(f"a must satisfy 0 < a < 1, got {a}")
    if not (0 <= x <= 1):
        raise DomainError(f"x must satisfy 0 <= x <= 1, got {x}")


# ---------------------------------------------------------------------------
# delta and sigma


def _i_delta_raw(a: float, b: float, x: float) -> float:
    def f(t, dlo, dhi):
        # dlo = t - a, dhi = b - t
        g = (t * (1 - a * t) / dlo) ** 0.25 * (dhi / (1 - b * t)) ** 0.5 * ((t + x) / (x * t + 1)) ** 0.5
        # a + 1/a - t - 1/t = (t - a)(1/a - t)/t
        dh = 1.0 / (t * np.sqrt(dlo * (1.0 / a - t) / t))
        return 0.5 * (1.0 / g - g) * dh

    return _quad(f, a, b, (_S("lower", -0.75), _S("upper", -0.5)), offsets=True)


def i_delta(params: SurfaceParams) -> float:
    """1/2 int_a^b (1/|g| - |g|) |dh| along z = t."""
    return _i_delta_raw(params.a, params.b, params.x)


def _j1_raw(a, b, x):
    if x == 0:
        return 0.0

    def f(t, dlo, dhi):
        # z = -t; dlo = t, dhi = x - t
        g = (t * (1 + a * t) / (t + a)) ** 0.25 * ((b + t) / (1 + b * t)) ** 0.5 * (dhi / (1 - x * t)) ** 0.5
        dh = 1.0 / (t * np.sqrt(a + 1.0 / a + t + 1.0 / t))
        return 0.5 * (1.0 / g - g) * dh

    return _quad(f, 0.0, x, (_S("lower", -0.75), _S("upper", -0.5)), offsets=True)


def _j2_raw(a, b, x):
    def f(t, dlo, dhi):
        # dhi = a - t; t + 1/t - a - 1/a = (a - t)(1/a - t)/t
        g = (t * (1 - a * t) / dhi) ** 0.25 * ((b - t) / (1 - b * t)) ** 0.5 * ((t + x) / (x * t + 1)) ** 0.5
        dh = 1.0 / (t * np.sqrt(dhi * (1.0 / a - t) / t))
        return (math.sqrt(2.0) / 4.0) * (1.0 / g + g) * dh

    return _quad(f, 0.0, a, (_S("lower", -0.75), _S("upper", -0.75)), offsets=True)


def j_parts(params: SurfaceParams) -> tuple[float, float]:
    """(J1, J2) of the split sigma = sigma1 + sigma2."""
    return _j1_raw(*params.as_tuple()), _j2_raw(*params.as_tuple())


def i_sigma(params: SurfaceParams) -> float:
    j1, j2 = j_parts(params)
    return j1 - j2


def _residual_raw(a: float, b: float, x: float) -> PeriodResidual:
    ig = _i_gamma_raw(a, b, x)
    idl = _i_delta_raw(a, b, x)
    if x == 0.0:
        # sigma1 collapses and J2 diverges like t^(-5/4); J1 - J2 stays finite and
        # equals its additivity value, which is what is reported at x = 0
        return PeriodResidual(ig, idl, idl - ig)
    return PeriodResidual(ig, idl, _j1_raw(a, b, x) - _j2_raw(a, b, x))


def residuals(params: SurfaceParams) -> PeriodResidual:
    return _residual_raw(params.a, params.b, params.x)


def dh_scale(params: SurfaceParams) -> float:
    """int_0^pi |dh| along gamma; a natural size for I_gamma."""
    a = params.a
    return _quad(lambda t: _circle_weight(a, t), 0.0, math.pi)


# ---------------------------------------------------------------------------
# roots


def _root(fun, lo, hi, flo=None, fhi=None, xtol=1e-15):
    flo = fun(lo) if flo is None else flo
    fhi = fun(hi) if fhi is None else fhi
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise NoRootError(f"no sign change on [{lo}, {hi}]", flo, fhi)
    return brentq(fun, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200)


def solve_b(a: float, x: float, tol: float = DEFAULT_TOL) -> float:
    """The unique b in (a, 1) with I_gamma(a, b, x) = 0.

    The bracket uses the closed limit forms at b = a (always positive) and b = 1
    (negative exactly when x < x_a).
    """
    if not (0 < a < 1 and 0 <= x < 1):
        raise DomainError(f"(a, x) = ({a}, {x}) outside 0 < a < 1, 0 <= x < 1")
    lo_val = i_gamma_limit_ba(a, x)
    hi_val = i_gamma_limit_b1(a, x)
    if not (lo_val > 0 and hi_val < 0):
        raise NoRootError(
            f"(a, x) = ({a}, {x}) is outside the region R: I_gamma is {lo_val:+.6g} at b = a "
            f"and {hi_val:+.6g} at b = 1",
            lo_val,
            hi_val,
        )
    fun = lambda b: _i_gamma_raw(a, b, x)  # noqa: E731
    # pull the bracket inside the open interval, keeping the signs of the limits
    eps = 1e-3 * (1 - a)
    lo, hi = a + eps, 1 - eps
    flo, fhi = fun(lo), fun(hi)
    while flo <= 0 and eps > 1e-14:
        eps *= 0.1
        lo = a + eps
        flo = fun(lo)
    eps = 1e-3 * (1 - a)
    while fhi >= 0 and eps > 1e-14:
        eps *= 0.1
        hi = 1 - eps
        fhi = fun(hi)
    b = _root(fun, lo, hi, flo, fhi)
    res = fun(b)
    if abs(res) > tol:
        raise NoRootError(f"root at b = {b} leaves residual {res:.3g} > {tol:.3g}", flo, fhi)
    return b


_ALPHA_CACHE: dict[float, float] = {}


def alpha(tol: float = 1e-12) -> float:
    """The unique root in (0, 1) of a -> I_gamma at (b, x) = (1, 0)."""
    if tol in _ALPHA_CACHE:
        return _ALPHA_CACHE[tol]
    fun = lambda a: i_gamma_limit_b1(a, 0.0)  # noqa: E731
    lo, hi = 0.5, 0.999
    flo, fhi = fun(lo), fun(hi)
    if not (flo < 0 < fhi):
        raise RuntimeError(f"alpha bracket failed: {flo} at 0.5, {fhi} at 0.999")
    val = brentq(fun, lo, hi, xtol=min(tol, 1e-8), rtol=4 * np.finfo(float).eps, maxiter=200)
    _ALPHA_CACHE[tol] = val
    return val


def x_a(a: float, tol: float = 1e-12) -> float:
    """The unique x in (0, 1) with I_gamma(a, 1, x) = 0; defined for 0 < a < alpha."""
    if not (0 < a < 1):
        raise DomainError(f"a must lie in (0, alpha), got {a}")
    fun = lambda x: i_gamma_limit_b1(a, x)  # noqa: E731
    f0 = fun(0.0)
    if f0 >= 0:
        raise DomainError(f"a = {a} >= alpha: I_gamma at b = 1 is positive for every x")
    f1 = fun(1.0)
    return brentq(fun, 0.0, 1.0, xtol=min(tol, 1e-8), rtol=4 * np.finfo(float).eps, maxiter=200)


# ---------------------------------------------------------------------------
# solution curve


def _curve_residual(a: float, x: float) -> float:
    """I_delta on graph(b) at (a, x); zero exactly on the solution curve."""
    b = solve_b(a, x)
    return _i_delta_raw(a, b, x)


@functools.lru_cache(maxsize=None)
def _terminal_a(tol: float) -> float:
    """a* with I_delta(a*, b(a*, 0), 0) = 0."""
    al = alpha()
    grid = [0.05 + k * (al - 0.05) / 16 for k in range(16)] + [al - 1e-4]
    vals = [_curve_residual(a, 0.0) for a in grid]
    for k in range(len(grid) - 1):
        if (vals[k] > 0) != (vals[k + 1] > 0):
            return brentq(lambda a: _curve_residual(a, 0.0), grid[k], grid[k + 1], xtol=1e-14, rtol=1e-15)
    raise TraceError("no sign change of I_delta along x = 0 inside (0, alpha)")


def _solve_x(a: float, x_guess: float, x_hi: float) -> float:
    """x in (0, x_hi) with I_delta = 0 on graph(b), bracketed around the guess."""
    fun = lambda x: _curve_residual(a, x)  # noqa: E731
    h = max(1e-3, 0.02 * x_hi)
    lo = max(0.0, x_guess - h)
    hi = min(x_hi, x_guess + h)
    flo, fhi = fun(lo), fun(hi)
    for _ in range(40):
        if (flo > 0) != (fhi > 0):
            break
        h *= 2
        if lo > 0:
            lo = max(0.0, x_guess - h)
            flo = fun(lo)
        if hi < x_hi:
            hi = min(x_hi, x_guess + h)
            fhi = fun(hi)
        if lo == 0.0 and hi == x_hi and (flo > 0) == (fhi > 0):
            break
    if (flo > 0) == (fhi > 0):
        raise NoRootError(f"lost the sign change of I_delta at a = {a}", flo, fhi)
    return brentq(fun, lo, hi, xtol=1e-14, rtol=1e-15)


def _solve_a(x: float, a_guess: float, a_bounds: tuple[float, float]) -> float:
    fun = lambda a: _curve_residual(a, x)  # noqa: E731
    h = 1e-3
    lo, hi = max(a_bounds[0], a_guess - h), min(a_bounds[1], a_guess + h)
    flo, fhi = fun(lo), fun(hi)
    for _ in range(40):
        if (flo > 0) != (fhi > 0):
            break
        h *= 2
        lo, hi = max(a_bounds[0], a_guess - h), min(a_bounds[1], a_guess + h)
        flo, fhi = fun(lo), fun(hi)
    if (flo > 0) == (fhi > 0):
        raise NoRootError(f"lost the sign change of I_delta at x = {x}", flo, fhi)
    return brentq(fun, lo, hi, xtol=1e-14, rtol=1e-15)


@dataclass
class _Node:
    a: float
    b: float
    x: float

    def vec(self):
        return np.array([self.a, self.b, self.x])


def _chord(nodes) -> np.ndarray:
    v = np.array([n.vec() for n in nodes])
    seg = np.linalg.norm(np.diff(v, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    return s / s[-1]


def trace_family_curve(
    n_points: int,
    tol: float = 1e-8,
    a_min: float = 1e-3,
) -> list[FamilyCurvePoint]:
    """Trace the curve where I_gamma = I_delta = 0 from a = a_min to the x = 0 endpoint.

    A coarse continuation in a (switching to x as the continuation variable where
    x changes faster) gives a chord-length parametrisation; the requested points
    are then placed at equal chord length and corrected.  s = 0 is the end nearest
    (0, 1, 1), s = 1 is the terminal point (a*, b*, 0).
    """
    if n_points < 2:
        raise ValueError("n_points must be at least 2")
    a_star = _terminal_a(tol)
    b_star = solve_b(a_star, 0.0)

    # coarse pass: geometric in a near 0, uniform further out
    sched = sorted(set(
        [a_min * (0.15 / a_min) ** (k / 8) for k in range(9)]
        + [0.15 + k * (a_star - 0.15) / 10 for k in range(1, 10)]
    ))
    nodes: list[_Node] = []
    x_guess = 0.87
    last_good = None
    for a in sched:
        try:
            xa = x_a(a)
            x = _solve_x(a, min(x_guess, xa * (1 - 1e-9)), xa * (1 - 1e-9))
        except Exception as exc:  # noqa: BLE001
            raise TraceError(f"continuation failed at a = {a}: {exc}", last_good=last_good) from exc
        nodes.append(_Node(a, solve_b(a, x), x))
        last_good = nodes[-1]
        if len(nodes) >= 2:
            n1, n2 = nodes[-2], nodes[-1]
            x_guess = max(0.0, n2.x + (n2.x - n1.x) * 0.5)
        else:
            x_guess = x
    nodes.append(_Node(a_star, b_star, 0.0))
    s_coarse = _chord(nodes)
    vecs = np.array([n.vec() for n in nodes])

    targets = np.linspace(0.0, 1.0, n_points)

    def correct(s):
        if s <= 0.0:
            return nodes[0]
        if s >= 1.0:
            return nodes[-1]
        pred = np.array([np.interp(s, s_coarse, vecs[:, k]) for k in range(3)])
        k = int(np.searchsorted(s_coarse, s)) - 1
        k = min(max(k, 0), len(nodes) - 2)
        da = abs(vecs[k + 1, 0] - vecs[k, 0])
        dx = abs(vecs[k + 1, 2] - vecs[k, 2])
        if da >= dx:
            a = float(pred[0])
            xa = x_a(a)
            x = _solve_x(a, min(float(pred[2]), xa * (1 - 1e-9)), xa * (1 - 1e-9))
        else:
            x = float(pred[2])
            lo = float(min(vecs[k, 0], vecs[k + 1, 0]))
            hi = float(max(vecs[k, 0], vecs[k + 1, 0]))
            a = _solve_a(x, float(pred[0]), (max(a_min * 0.5, lo - 0.05), min(a_star, hi + 0.05)))
        return _Node(a, solve_b(a, x), x)

    try:
        fine = pmap(correct, list(targets))
    except Exception as exc:  # noqa: BLE001
        raise TraceError(f"correction failed: {exc}", last_good=nodes[-1]) from exc

    # drop any non-monotone stretch (loops are lopped)
    mono = [fine[0]]
    for nd in fine[1:]:
        if nd.a > mono[-1].a or nd.x < mono[-1].x:
            mono.append(nd)
    s_vals = _chord(mono)

    def finish(item):
        s, nd = item
        if nd.x == 0.0:
            p = SurfaceParams(nd.a, nd.b, 0.0, limit=True)
        else:
            p = make_params(nd.a, nd.b, nd.x)
        res = _residual_raw(p.a, p.b, p.x)
        if max(abs(res.i_gamma), abs(res.i_delta)) > tol:
            raise TraceError(f"residual {res} exceeds {tol} at s = {s}", last_good=nd)
        return FamilyCurvePoint(float(s), p, res)

    return pmap(finish, list(zip(s_vals, mono)))


def in_region(a: float, x: float) -> bool:
    """Membership of (a, x) in the region {a < alpha, x <= x_a(a)} where b(a, x) exists."""
    if not (0 < a < 1 and 0 <= x <= 1):
        return False
    if a >= alpha():
        return False
    return x <= x_a(a)


def terminal_point() -> FamilyCurvePoint:
    """The x = 0 end (a*, b*, 0) of the solution curve, at s = 1."""
    a = _terminal_a(1e-12)
    p = SurfaceParams(a, solve_b(a, 0.0), 0.0, limit=True)
    return FamilyCurvePoint(1.0, p, _residual_raw(p.a, p.b, 0.0))


def curve_point_at(a: float, x_guess: float | None = None, tol: float = 1e-8) -> FamilyCurvePoint:
    """The point of the solution curve with the given a (s is left as NaN).

    Raises NoRootError when a lies beyond the terminal value a*.
    """
    xa = x_a(a)
    x_hi = xa * (1 - 1e-9)
    guess = x_hi * 0.95 if x_guess is None else min(x_guess, x_hi)
    x = _solve_x(a, guess, x_hi)
    p = make_params(a, solve_b(a, x), x)
    res = residuals(p)
    if max(abs(res.i_gamma), abs(res.i_delta)) > tol:
        raise TraceError(f"residual {res} exceeds {tol} at a = {a}")
    return FamilyCurvePoint(float("nan"), p, res)


def curve_point_at_x(x: float, tol: float = 1e-8) -> FamilyCurvePoint:
    """The point of the solution curve with the given x, near the x = 0 end (s is NaN)."""
    a_star = _terminal_a(1e-12)
    a = _solve_a(x, a_star, (1e-6, a_star))
    p = make_params(a, solve_b(a, x), x)
    res = residuals(p)
    if max(abs(res.i_gamma), abs(res.i_delta)) > tol:
        raise TraceError(f"residual {res} exceeds {tol} at x = {x}")
    return FamilyCurvePoint(float("nan"), p, res)


def resolve_s(s: float, points: list, tol: float = 1e-8) -> FamilyCurvePoint:
    """Curve point at parameter s, interpolated from a trace and corrected onto the curve."""
    if not (0.0 <= s <= 1.0):
        raise ValueError(f"s must lie in [0, 1], got {s}")
    ss = np.array([q.s for q in points])
    for q in points:
        if q.s == s:
            return q
    k = int(np.clip(np.searchsorted(ss, s) - 1, 0, len(points) - 2))
    p0, p1 = points[k].params, points[k + 1].params
    w = (s - ss[k]) / (ss[k + 1] - ss[k])
    a = p0.a + w * (p1.a - p0.a)
    x = p0.x + w * (p1.x - p0.x)
    if abs(p1.a - p0.a) >= abs(p1.x - p0.x):
        xa = x_a(a)
        x = _solve_x(a, min(x, xa * (1 - 1e-9)), xa * (1 - 1e-9))
    else:
        lo, hi = sorted((p0.a, p1.a))
        a = _solve_a(x, a, (max(lo - 0.05, 1e-6), min(hi + 0.05, _terminal_a(1e-12))))
    p = make_params(a, solve_b(a, x), x)
    res = residuals(p)
    if max(abs(res.i_gamma), abs(res.i_delta)) > tol:
        raise TraceError(f"residual {res} exceeds {tol} at s = {s}")
    return FamilyCurvePoint(float(s), p, res)


def extrapolated_start() -> tuple[float, float, float]:
    """The degenerate endpoint the curve approaches as a -> 0."""
    return (0.0, 1.0, 1.0)


# ---------------------------------------------------------------------------
# auxiliary identities


@dataclass
class IdentityReport:
    checks: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        """All checks except those flagged as a misprinted formula."""
        return all(c["ok"] for c in self.checks if not c.get("erratum"))


def eq11_sides(a: float, t: float) -> tuple[float, float]:
    """tan Arg{z(1 - az)/(z - a)} on z = e^{it} and the right-hand side as printed.

    The printed right-hand side 2 sin t (a cos t - 1)/(a + 1/a) is not an identity;
    see ``eq11_corrected_sides``.
    """
    z = complex(math.cos(t), math.sin(t))
    w = z * (1 - a * z) / (z - a)
    return w.imag / w.real, 2 * math.sin(t) * (a * math.cos(t) - 1) / (a + 1 / a)


def eq11_corrected_sides(a: float, t: float) -> tuple[float, float]:
    """Same left side against 2 sin t (a cos t - 1)/(1/a - 2 cos t + a cos 2t).

    On the unit circle z(1 - az)/(z - a) = (1 - az)^2/|z - a|^2, whose tangent of
    argument is the double-angle expression above.
    """
    z = complex(math.cos(t), math.sin(t))
    w = z * (1 - a * z) / (z - a)
    rhs = 2 * math.sin(t) * (a * math.cos(t) - 1) / (1 / a - 2 * math.cos(t) + a * math.cos(2 * t))
    return w.imag / w.real, rhs


def eq12_sides(a: float, t: float) -> tuple[float, float]:
    """Im{z^3 (1/a - z)/(z/a - 1)} on z = e^{it} against its trigonometric closed form.

    The denominator is |z/a - 1|^2 = (cos t/a - 1)^2 + sin^2 t/a^2.
    """
    z = complex(math.cos(t), math.sin(t))
    lhs = (z ** 3 * (1 / a - z) / (z / a - 1)).imag
    return lhs, eq12_numerator(a, t) / ((math.cos(t) / a - 1) ** 2 + math.sin(t) ** 2 / a ** 2)


def eq12_numerator(a: float, t: float) -> float:
    return math.sin(2 * t) / a ** 2 - 2 * math.sin(3 * t) / a + math.sin(4 * t)


def eq12_numerator_half(t: float) -> tuple[float, float]:
    """At a = 1/2 the numerator equals 4 sin t (1 - cos t)(2 cos t - cos 2t)."""
    closed = 4 * math.sin(t) * (1 - math.cos(t)) * (2 * math.cos(t) - math.cos(2 * t))
    return eq12_numerator(0.5, t), closed


T0 = math.acos((1 - math.sqrt(3)) / 2)


def lemma_identities_check(n: int = 100, seed: int = 20240501, tol: float = 1e-10) -> IdentityReport:
    rng = np.random.default_rng(seed)
    rep = IdentityReport()
    worst11 = worst11c = worst12 = 0.0
    for _ in range(n):
        a = float(rng.uniform(0.02, 0.98))
        t = float(rng.uniform(0.01, math.pi - 0.01))
        l, r = eq11_sides(a, t)
        worst11 = max(worst11, abs(l - r) / max(1.0, abs(r)))
        l, r = eq11_corrected_sides(a, t)
        # tan blows up where Re w = 0; compare sin/cos-free via relative form
        worst11c = max(worst11c, abs(l - r) / max(1.0, abs(r)))
        l, r = eq12_sides(a, t)
        worst12 = max(worst12, abs(l - r) / max(1.0, abs(r)))
    rep.checks.append({"name": "eq11_printed", "worst": worst11, "ok": worst11 <= tol, "erratum": True})
    rep.checks.append({"name": "eq11", "worst": worst11c, "ok": worst11c <= tol})
    rep.checks.append({"name": "eq12", "worst": worst12, "ok": worst12 <= tol})
    worst_num = 0.0
    for t in np.linspace(0.01, math.pi - 0.01, 50):
        l, r = eq12_numerator_half(float(t))
        worst_num = max(worst_num, abs(l - r))
    rep.checks.append({"name": "eq12_numerator_a_half", "worst": worst_num, "ok": worst_num <= tol})
    l, r = eq12_sides(0.5, math.pi / 2)
    d = max(abs(l - 0.8), abs(r - 0.8))
    rep.checks.append({"name": "eq12_at_half_pi", "worst": d, "ok": d <= tol, "lhs": l, "rhs": r})
    z0 = 2 * math.cos(T0) - math.cos(2 * T0)
    rep.checks.append({"name": "t0_zero", "worst": abs(z0), "ok": abs(z0) <= 1e-15})
    # uniqueness of the zero of 2cos t - cos 2t in (0, pi)
    ts = np.linspace(1e-6, math.pi - 1e-6, 20001)
    vals = 2 * np.cos(ts) - np.cos(2 * ts)
    changes = int(np.sum(np.sign(vals[1:]) != np.sign(vals[:-1])))
    rep.checks.append({"name": "t0_unique", "worst": float(changes - 1), "ok": changes == 1})
    return rep
