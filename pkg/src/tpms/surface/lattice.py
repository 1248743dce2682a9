"""Lattice generators and their cross-check against loop periods.

A closed z-plane loop, traversed until the sheet returns to the starting one,
is a closed curve on the compact quotient, so its period Re loop-integral of
(phi1, phi2, phi3) must be an integer combination of the translation lattice.
Loops are integrated with the branch tracked step by step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ClosureError
from ..weierstrass import (
    SurfaceParams,
    _distance_to_locus,
    anchor_state,
    eval_g,
    phi_from,
    state_values,
)
from .types import SurfaceMesh

LATTICE_TOL = 1e-6
_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
_STEP_FRACTION = 0.25


def lattice_vectors(piece: SurfaceMesh) -> np.ndarray:
    """The three generators of the translation group, as rows."""
    if piece.lattice is None:
        raise ValueError("mesh carries no lattice; assemble it first")
    return piece.lattice


def _walk(p: SurfaceParams, state, z_end: complex, sheet: int):
    """Integrate phi from state.z to z_end along a straight segment, tracking the branch."""
    total = np.zeros(3, dtype=complex)
    rot, sgn = 1j**sheet, (-1) ** sheet
    while True:
        rem = z_end - state.z
        if rem == 0:
            return total, state
        d = _distance_to_locus(p, state.z)
        h = _STEP_FRACTION * d
        z1 = z_end if abs(rem) <= h else state.z + rem * (h / abs(rem))
        nodes = state.z + 0.5 * (z1 - state.z) * (_GL_X + 1.0)
        g, sq = state_values(p, state, nodes)
        phi = phi_from(rot * g, sgn * 1j / (nodes * sq))
        total += (phi * _GL_W).sum(axis=1) * 0.5 * (z1 - state.z)
        state = eval_g(p, state, z1)


def loop_period(p: SurfaceParams, loop, sheet: int = 0, max_turns: int = 8) -> tuple[np.ndarray, int]:
    """Re of the loop integral of (phi1, phi2, phi3), repeated until the branch closes.

    ``loop`` is a closed polyline (first point repeated at the end) starting in the
    closed upper half-plane.  Returns (period, number of turns).
    """
    pts = [complex(z) for z in loop]
    if abs(pts[0] - pts[-1]) > 0:
        pts.append(pts[0])
    start = anchor_state(p, pts[0])
    state = start
    total = np.zeros(3, dtype=complex)
    for turn in range(1, max_turns + 1):
        for z in pts[1:]:
            part, state = _walk(p, state, z, sheet)
            total += part
        same_g = abs(state.g - start.g) <= 1e-9 * max(1.0, abs(start.g))
        dq = (state.q_arg - start.q_arg) / (4 * math.pi)
        if same_g and abs(dq - round(dq)) < 1e-9:
            return total.real, turn
    raise ClosureError(f"branch did not close after {max_turns} turns of the loop")


def _circle(c: complex, r: float, n: int = 64):
    t = 0.5 * math.pi + 2 * math.pi * np.arange(n + 1) / n
    return c + r * np.exp(1j * t)


def probe_loops(p: SurfaceParams) -> dict:
    """Representative closed loops around groups of branch points."""
    a, b, x = p.a, p.b, p.x
    loops = {}
    big = 0.5 * (1.0 + min(1.0 / b, 1.0 / x if x > 0 else math.inf))
    loops["unit_circle"] = _circle(0j, big)
    gap = min(x, b - a) if x > 0 else b - a
    loops["around_0_a"] = _circle(0.5 * a + 0j, 0.5 * a + 0.5 * gap)
    # loops pairing a branch point with its mirror image in the unit circle cross gamma
    eps = 0.5 * min(b - a, 1.0 / a - 1.0 / b)
    loops["around_b_1/b"] = _circle(0.5 * (b + 1.0 / b) + 0j, 0.5 * (1.0 / b - b) + eps)
    loops["around_a_1/a"] = _circle(0.5 * (a + 1.0 / a) + 0j, 0.5 * (1.0 / a - a) + 0.5 * a)
    rb = 0.5 * min(b - a, 1.0 - b)
    loops["around_b"] = _circle(b + 0j, rb)
    loops["around_a_b"] = _circle(0.5 * (a + b) + 0j, 0.5 * (b - a) + 0.5 * min(a, 1.0 - b))
    if x > 0:
        r0 = 0.5 * min(a, x)
        loops["around_0"] = _circle(0j, r0)
        loops["around_mx_0"] = _circle(-0.5 * x + 0j, 0.5 * x + 0.5 * min(a, 1.0 - x))
        loops["around_mx_0_a"] = _circle(
            0.5 * (a - x) + 0j, 0.5 * (a + x) + 0.5 * min(b - a, 1.0 - x)
        )
        loops["around_mx_1/x"] = _circle(
            -0.5 * (x + 1.0 / x) + 0j, 0.5 * (1.0 / x - x) + 0.5 * min(x, a)
        )
        r = 0.4 * min(x, a, b - a, 1.0 - b, 1.0 - x)
        loops["dumbbell_mx_b"] = np.array([
            -x + r + 1j * r, b - r + 1j * r, b - r - 1j * r, b + r - 1j * r,
            b + r + 2j * r, -x - r + 2j * r, -x - r - 1j * r, -x + r - 1j * r,
            -x + r + 1j * r,
        ])
    return loops


@dataclass
class LoopCheck:
    name: str
    sheet: int
    turns: int
    period: np.ndarray  # in the normalised frame of the piece
    coefficients: np.ndarray
    residual: float


def check_loop_periods(piece: SurfaceMesh, params: SurfaceParams, tol: float = LATTICE_TOL) -> list:
    """Every probe loop period must be an integer combination of the generators."""
    L = lattice_vectors(piece)
    frame = piece.info["frame"]
    shortest = float(np.min(np.linalg.norm(L, axis=1)))
    out = []
    for name, loop in probe_loops(params).items():
        for sheet in range(4):
            per, turns = loop_period(params, loop, sheet)
            per = frame.linear @ per
            coef = np.linalg.solve(L.T, per)
            res = float(np.linalg.norm(per - L.T @ np.round(coef)))
            out.append(LoopCheck(name, sheet, turns, per, coef, res / shortest))
    bad = [c for c in out if c.residual > tol]
    if bad:
        c = bad[0]
        raise ClosureError(
            f"loop {c.name} (sheet {c.sheet}) has period {c.period} outside the lattice "
            f"(relative residual {c.residual:.3g})"
        )
    return out
