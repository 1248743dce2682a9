"""Weierstrass data of the family on the z-plane model.

The Gauss map is defined implicitly by

    g^4 = z * (1 - a z)/(z - a) * [(b - z)/(b z - 1)]^2 * [(z + x)/(x z + 1)]^2

and the height differential by dh = i dz / (z * sqrt(z + 1/z - a - 1/a)).

Values are carried factor by factor: each of the four Moebius factors keeps its
own continuously unwrapped argument, so the fourth root never jumps sheets when
the argument of the product crosses the negative real axis.  The branch is
anchored by g -> 1 as z -> 1 along the unit circle.  The square root v/z is
anchored so that dh is real and positive on (a, 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ContinuationError, ParameterDomainError, SingularPointError

EXCLUSION_RADIUS = 1e-9
_HALF_PI = 0.5 * math.pi


@dataclass(frozen=True)
class SurfaceParams:
    """One member (a, b, x) of the family.

    ``limit=True`` admits the closed boundary values x = 0 and b = 1 used by the
    degenerate endpoints of the solution curve; everything else requires the
    strict inequalities.
    """

    a: float
    b: float
    x: float
    limit: bool = field(default=False, compare=False, repr=False)

    def __post_init__(self):
        a, b, x = self.a, self.b, self.x
        for name, v in (("a", a), ("b", b), ("x", x)):
            if not math.isfinite(v):
                raise ParameterDomainError(f"{name} must be finite, got {v!r}")
        if self.limit:
            checks = [
                (0 < a, "0 < a"),
                (a < b, "a < b"),
                (b <= 1, "b <= 1"),
                (0 <= x, "0 <= x"),
                (x <= 1, "x <= 1"),
            ]
        else:
            checks = [
                (0 < a, "0 < a"),
                (a < b, "a < b"),
                (b < 1, "b < 1"),
                (0 < x, "0 < x"),
                (x < 1, "x < 1"),
            ]
        for ok, text in checks:
            if not ok:
                raise ParameterDomainError(
                    f"inequality {text} violated by (a, b, x) = ({a}, {b}, {x})"
                )

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.a, self.b, self.x)

    def branch_locus(self) -> np.ndarray:
        """Real points where g or v/z branch, plus the corners z = +-1 of the half-disk."""
        a, b, x = self.a, self.b, self.x
        pts = [0.0, 1.0, -1.0, a, 1.0 / a, b, 1.0 / b]
        if x > 0:
            pts += [-x, -1.0 / x]
        return np.array(sorted(set(pts)))


def make_params(a: float, b: float, x: float) -> SurfaceParams:
    """Validated constructor; raises ParameterDomainError naming the broken inequality."""
    return SurfaceParams(float(a), float(b), float(x))


# ---------------------------------------------------------------------------
# closed forms on the closed upper half-plane


def _uarg(c1: float, c0: float, z):
    """Argument of c1*z + c0 (c1 real, nonzero) continuous on the closed upper half-plane."""
    w = c1 * z + c0
    ang = np.angle(w)
    if c1 > 0:
        # image stays in the closed upper half-plane: arg in [0, pi]; roundoff
        # below the axis is folded back to the nearer end
        ang = np.where(ang < -_HALF_PI, ang + 2 * np.pi, np.maximum(ang, 0.0))
    else:
        ang = np.where(ang > _HALF_PI, ang - 2 * np.pi, np.minimum(ang, 0.0))
    return ang


def factor_values(p: SurfaceParams, z):
    """The four Moebius factors of the Gauss-map relation at z."""
    a, b, x = p.a, p.b, p.x
    f1 = z
    f2 = (1 - a * z) / (z - a)
    f3 = (b - z) / (b * z - 1)
    f4 = (z + x) / (x * z + 1)
    return f1, f2, f3, f4


def upper_args(p: SurfaceParams, z):
    """Continuous arguments of the four factors on the closed upper half-plane.

    Each vanishes at z = 1, so the anchor g(1) = 1 is built in.
    """
    a, b, x = p.a, p.b, p.x
    z = np.asarray(z, dtype=complex)
    # make -0.0 imaginary parts read as the upper side
    z = np.where(z.imag == 0, z.real + 0j, z)
    A1 = _uarg(1.0, 0.0, z)
    A2 = _uarg(-a, 1.0, z) - _uarg(1.0, -a, z)
    if b < 1:
        A3 = _uarg(-1.0, b, z) - _uarg(b, -1.0, z) + 2 * np.pi
    else:
        # b = 1: the factor is the constant -1 with argument pi away from z = 1
        A3 = np.full(z.shape, np.pi)
    A4 = _uarg(1.0, x, z) - (_uarg(x, 1.0, z) if x > 0 else 0.0)
    return A1, A2, A3, A4


def q_upper_arg(p: SurfaceParams, z):
    """Argument of Q = z + 1/z - a - 1/a = (z - a)(z - 1/a)/z on the closed upper half-plane."""
    a = p.a
    z = np.asarray(z, dtype=complex)
    z = np.where(z.imag == 0, z.real + 0j, z)
    return _uarg(1.0, -a, z) + _uarg(1.0, -1.0 / a, z) - _uarg(1.0, 0.0, z)


def _g_from(p: SurfaceParams, z, args):
    f1, f2, f3, f4 = factor_values(p, z)
    mod = np.abs(f1 * f2) ** 0.25 * np.abs(f3 * f4) ** 0.5
    ph = 0.25 * (args[0] + args[1]) + 0.5 * (args[2] + args[3])
    return mod * np.exp(1j * ph)


def _q(p: SurfaceParams, z):
    return z + 1.0 / z - p.a - 1.0 / p.a


def g_upper(p: SurfaceParams, z):
    """Gauss map on the closed upper half-disk (vectorised)."""
    z = np.asarray(z, dtype=complex)
    return _g_from(p, z, upper_args(p, z))


def sqrt_q_upper(p: SurfaceParams, z):
    """v/z = sqrt(z + 1/z - a - 1/a) on the closed upper half-disk."""
    z = np.asarray(z, dtype=complex)
    return np.sqrt(np.abs(_q(p, z))) * np.exp(0.5j * q_upper_arg(p, z))


def dh_upper(p: SurfaceParams, z):
    """Density dh/dz on the closed upper half-disk."""
    z = np.asarray(z, dtype=complex)
    return 1j / (z * sqrt_q_upper(p, z))


def phi_from(g, dh):
    """Stack ((1/g - g)/2, i(1/g + g)/2, 1) * dh along a new leading axis."""
    ginv = 1.0 / g
    return np.stack([0.5 * (ginv - g) * dh, 0.5j * (ginv + g) * dh, dh + 0j * g])


def phi_upper(p: SurfaceParams, z):
    z = np.asarray(z, dtype=complex)
    return phi_from(g_upper(p, z), dh_upper(p, z))


def _linear_factors(p: SurfaceParams):
    """(c1, c0, exponent in g, exponent in v/z) for every linear factor c1*z + c0."""
    a, b, x = p.a, p.b, p.x
    return (
        (1.0, 0.0, 0.25, -0.5),  # z
        (-a, 1.0, 0.25, 0.0),  # 1 - a z
        (1.0, -a, -0.25, 0.5),  # z - a
        (-1.0, b, 0.5, 0.0),  # b - z
        (b, -1.0, -0.5, 0.0),  # b z - 1
        (1.0, x, 0.5, 0.0),  # z + x
        (x, 1.0, -0.5, 0.0),  # x z + 1
        (1.0, -1.0 / a, 0.0, 0.5),  # z - 1/a
    )


def g_sqrt_upper(p: SurfaceParams, z, root=None, delta=None):
    """g and v/z on the closed upper half-disk from the linear factors.

    If ``root`` is given, ``delta`` must equal z - root exactly; the factor that
    vanishes at ``root`` is then evaluated as c1*delta, which avoids cancellation
    next to a branch point.
    """
    z = np.asarray(z, dtype=complex)
    z = np.where(z.imag == 0, z.real + 0j, z)
    log_g = np.zeros(z.shape, dtype=complex)
    log_v = np.zeros(z.shape, dtype=complex)
    for c1, c0, eg, ev in _linear_factors(p):
        if c1 == 0:
            continue
        if root is not None and abs(c1 * root + c0) <= 1e-15 * max(1.0, abs(c0)):
            w = c1 * np.asarray(delta, dtype=complex)
        else:
            w = c1 * z + c0
        ang = np.angle(w)
        if c1 > 0:
            ang = np.where(ang < -_HALF_PI, ang + 2 * np.pi, np.maximum(ang, 0.0))
        else:
            ang = np.where(ang > _HALF_PI, ang - 2 * np.pi, np.minimum(ang, 0.0))
        lw = np.log(np.abs(w)) + 1j * ang
        if eg:
            log_g += eg * lw
        if ev:
            log_v += ev * lw
    # the factor (b - z)^(1/2) (bz - 1)^(-1/2) contributes exp(i pi) at z = 1, cancelled here
    g = np.exp(log_g + 1j * np.pi)
    v = np.exp(log_v)
    return g, v


def phi_upper_exact(p: SurfaceParams, z, root=None, delta=None):
    """(phi1, phi2, phi3) per dz, accurate next to the branch point ``root`` (see g_sqrt_upper)."""
    g, v = g_sqrt_upper(p, z, root, delta)
    z = np.asarray(z, dtype=complex)
    if root is not None and root == 0.0:
        zz = np.asarray(delta, dtype=complex)
    else:
        zz = z
    return phi_from(g, 1j / (zz * v))


# ---------------------------------------------------------------------------
# branch tracking


@dataclass(frozen=True)
class BranchState:
    """A point z with continued factor arguments; ``g`` caches the resulting value.

    ``q_arg`` is the continued argument of Q = z + 1/z - a - 1/a, which fixes the
    sheet of v/z.
    """

    z: complex
    args: tuple[float, float, float, float]
    g: complex
    q_arg: float


def _distance_to_locus(p: SurfaceParams, z: complex) -> float:
    return float(np.min(np.abs(p.branch_locus() - z)))


def anchor_state(p: SurfaceParams, z: complex = 0.5j) -> BranchState:
    """Branch state at a point of the closed upper half-plane, consistent with g(1) = 1."""
    z = complex(z)
    if z.imag < 0:
        raise ValueError("anchor point must lie in the closed upper half-plane")
    if _distance_to_locus(p, z) <= EXCLUSION_RADIUS:
        raise SingularPointError(f"anchor {z} lies on the branch locus")
    args = tuple(float(np.asarray(v)) for v in upper_args(p, z))
    g = complex(_g_from(p, z, args))
    return BranchState(z, args, g, float(q_upper_arg(p, z)))


def _step_deltas(p: SurfaceParams, z0: complex, z1):
    """Argument increments of the four factors and of Q from z0 to z1 (principal, per factor)."""
    f0 = factor_values(p, z0)
    f1 = factor_values(p, z1)
    d = [np.angle(b_ / a_) for a_, b_ in zip(f0, f1)]
    dq = np.angle(_q(p, z1) / _q(p, z0))
    return d, dq


def eval_g(p: SurfaceParams, state: BranchState, z_next: complex) -> BranchState:
    """Continue the branch from ``state`` to ``z_next`` in one step.

    The step is accepted only when every factor argument (and that of Q) changes
    by less than pi/2 and the segment keeps clear of the branch locus; otherwise
    ContinuationError asks the caller to subdivide.
    """
    z_next = complex(z_next)
    dist = _distance_to_locus(p, z_next)
    if dist <= EXCLUSION_RADIUS:
        raise SingularPointError(f"z = {z_next} is within {EXCLUSION_RADIUS} of the branch locus")
    step = abs(z_next - state.z)
    if step >= 0.9 * min(dist, _distance_to_locus(p, state.z)):
        raise ContinuationError(
            f"step {state.z} -> {z_next} passes too close to a branch point; subdivide"
        )
    d, dq = _step_deltas(p, state.z, z_next)
    worst = max(abs(float(v)) for v in (*d, dq))
    if worst >= _HALF_PI:
        raise ContinuationError(
            f"argument jump {worst:.3g} >= pi/2 on step {state.z} -> {z_next}; subdivide"
        )
    args = tuple(float(s + v) for s, v in zip(state.args, d))
    g = complex(_g_from(p, z_next, args))
    return BranchState(z_next, args, g, float(state.q_arg + dq))


def continue_along(
    p: SurfaceParams, state: BranchState, z_next: complex, max_depth: int = 40
) -> BranchState:
    """Continue to ``z_next`` along a straight segment, bisecting steps as needed."""
    z_next = complex(z_next)
    stack = [z_next]
    cur = state
    depth = 0
    while stack:
        target = stack[-1]
        try:
            cur = eval_g(p, cur, target)
            stack.pop()
            depth = max(0, depth - 1)
        except ContinuationError:
            depth += 1
            if depth > max_depth or len(stack) > max_depth:
                raise
            stack.append(0.5 * (cur.z + target))
    return cur


def continue_polyline(p: SurfaceParams, state: BranchState, points) -> BranchState:
    for z in points:
        state = continue_along(p, state, z)
    return state


def state_values(p: SurfaceParams, state: BranchState, z):
    """g and v/z at points near ``state.z`` (relative arguments must stay below pi)."""
    z = np.asarray(z, dtype=complex)
    d, dq = _step_deltas(p, state.z, z)
    args = [s + v for s, v in zip(state.args, d)]
    g = _g_from(p, z, args)
    sq = np.sqrt(np.abs(_q(p, z))) * np.exp(0.5j * (state.q_arg + dq))
    return g, sq


def eval_dh(p: SurfaceParams, z: complex, branch_sign: int = 1) -> complex:
    """dh/dz at z on the anchored sheet (closed-form branch, upper half-plane convention).

    For Im z < 0 the value is the Schwarz reflection of the upper-half-plane branch,
    which is the analytic continuation across (a, 1).
    """
    z = complex(z)
    if branch_sign not in (1, -1):
        raise ValueError("branch_sign must be +1 or -1")
    for s in (0.0, p.a, 1.0 / p.a):
        if abs(z - s) <= EXCLUSION_RADIUS:
            raise SingularPointError(f"dh is singular at z = {s}")
    if z.imag >= 0:
        val = complex(dh_upper(p, z))
    else:
        val = complex(np.conj(dh_upper(p, np.conj(z))))
    return branch_sign * val


def dh_from_state(p: SurfaceParams, state: BranchState, branch_sign: int = 1) -> complex:
    sq = math.sqrt(abs(complex(_q(p, state.z)))) * complex(math.cos(0.5 * state.q_arg), math.sin(0.5 * state.q_arg))
    return branch_sign * 1j / (state.z * sq)


def phi_forms(p: SurfaceParams, state: BranchState, branch_sign: int = 1):
    """Densities (phi1, phi2, phi3) per dz at the state's point; phi3 is exactly dh/dz."""
    if branch_sign not in (1, -1):
        raise ValueError("branch_sign must be +1 or -1")
    dh = dh_from_state(p, state, branch_sign)
    g = state.g
    return (0.5 * (1 / g - g) * dh, 0.5j * (1 / g + g) * dh, dh)


# ---------------------------------------------------------------------------
# symmetry curves


@dataclass(frozen=True)
class CurveSpec:
    name: str
    t_range: tuple[float, float]
    z_of_t: Callable
    absg_of_t: Callable
    absdh_of_t: Callable
    g_phase: Optional[complex]
    g_of_t: Optional[Callable] = None


def curve_specs(p: SurfaceParams) -> dict[str, CurveSpec]:
    """Closed-form pullbacks on the four symmetry curves gamma, delta, sigma1, sigma2.

    |dh| is given per unit dt.  On gamma the phase of g varies, so ``g_phase`` is
    None and ``g_of_t`` holds the full closed form.
    """
    a, b, x = p.a, p.b, p.x
    c = a + 1.0 / a

    def gamma_g(t):
        return g_upper(p, np.exp(1j * np.asarray(t, dtype=float)))

    def absg_delta(t):
        t = np.asarray(t, dtype=float)
        return (t * (1 - a * t) / (t - a)) ** 0.25 * ((b - t) / (1 - b * t)) ** 0.5 * (
            (t + x) / (x * t + 1)
        ) ** 0.5

    def absg_sigma1(t):
        t = np.asarray(t, dtype=float)
        return (t * (1 + a * t) / (t + a)) ** 0.25 * ((b + t) / (1 + b * t)) ** 0.5 * (
            (x - t) / (1 - x * t)
        ) ** 0.5

    def absg_sigma2(t):
        t = np.asarray(t, dtype=float)
        return (t * (1 - a * t) / (a - t)) ** 0.25 * ((b - t) / (1 - b * t)) ** 0.5 * (
            (t + x) / (x * t + 1)
        ) ** 0.5

    return {
        "gamma": CurveSpec(
            "gamma",
            (0.0, math.pi),
            lambda t: np.exp(1j * np.asarray(t, dtype=float)),
            lambda t: np.ones_like(np.asarray(t, dtype=float)),
            lambda t: 1.0 / np.sqrt(c - 2 * np.cos(t)),
            None,
            gamma_g,
        ),
        "delta": CurveSpec(
            "delta",
            (a, b),
            lambda t: np.asarray(t, dtype=float) + 0j,
            absg_delta,
            lambda t: 1.0 / (t * np.sqrt(c - t - 1.0 / t)),
            1j,
        ),
        "sigma1": CurveSpec(
            "sigma1",
            (0.0, x),
            lambda t: -np.asarray(t, dtype=float) + 0j,
            absg_sigma1,
            lambda t: 1.0 / (t * np.sqrt(c + t + 1.0 / t)),
            1j,
        ),
        "sigma2": CurveSpec(
            "sigma2",
            (0.0, a),
            lambda t: np.asarray(t, dtype=float) + 0j,
            absg_sigma2,
            lambda t: 1.0 / (t * np.sqrt(t + 1.0 / t - c)),
            complex(math.cos(math.pi / 4), math.sin(math.pi / 4)),
        ),
    }


# ---------------------------------------------------------------------------
# involution table

# (label, z-sampler, expected class of g, expected class of dh along the curve)
_TABLE_ROWS = (
    ("row1 -1<z<-x", "real", "real"),
    ("row2 -x<z<0", "imag", "real"),
    ("row3 0<z<a", "diag", "imag"),
    ("row4 a<z<b", "imag", "real"),
    ("row5 b<z<1", "real", "real"),
    ("row6 |z|=1", "circle", "imag"),
)


@dataclass
class TableReport:
    rows: list[dict]

    @property
    def ok(self) -> bool:
        return all(r["ok"] for r in self.rows)

    @property
    def worst(self) -> float:
        return max(r["worst"] for r in self.rows)


def _class_defect(kind: str, w: np.ndarray) -> np.ndarray:
    w = np.asarray(w, dtype=complex)
    m = np.abs(w)
    if kind == "real":
        return np.abs(w.imag) / m
    if kind == "imag":
        return np.abs(w.real) / m
    if kind == "diag":
        # w in e^{+-i pi/4} R  <=>  w^2 purely imaginary
        return np.abs((w * w).real) / (m * m)
    if kind == "circle":
        return np.abs(m - 1.0)
    raise ValueError(kind)


def involution_table_check(p: SurfaceParams, n: int = 64, tol: float = 1e-10) -> TableReport:
    """Sample the real segments and the unit circle; check where g and dh(z') land.

    For row 3 the observed sign of the e^{+-i pi/4} phase is reported, not asserted.
    """
    a, b, x = p.a, p.b, p.x
    u = (np.arange(n) + 0.5) / n
    segs = {
        "row1 -1<z<-x": (-1.0 + (1 - x) * u, 1.0),
        "row2 -x<z<0": (-x + x * u, 1.0),
        "row3 0<z<a": (a * u, 1.0),
        "row4 a<z<b": (a + (b - a) * u, 1.0),
        "row5 b<z<1": (b + (1 - b) * u, 1.0),
    }
    rows = []
    for label, gkind, dkind in _TABLE_ROWS:
        if label.startswith("row6"):
            t = math.pi * u
            z = np.exp(1j * t)
            zdot = 1j * z
        else:
            z = segs[label][0] + 0j
            zdot = np.ones_like(z)
        g = g_upper(p, z)
        dh = dh_upper(p, z) * zdot
        dg = _class_defect(gkind, g)
        dd = _class_defect(dkind, dh)
        worst = float(max(dg.max(), dd.max()))
        row = {"row": label, "g_class": gkind, "dh_class": dkind, "worst": worst, "ok": worst <= tol}
        if gkind == "diag":
            row["observed_phase"] = float(np.median(np.angle(g)))
        if worst > tol:
            k = int(np.argmax(np.maximum(dg, dd)))
            row["offending_sample"] = complex(z[k])
        rows.append(row)
    return TableReport(rows)
