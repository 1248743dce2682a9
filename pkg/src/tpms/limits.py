"""Degeneration limits of the family along the solution curve.

Near s = 0 the substitution z = a u/(u - 1) turns the data into Scherk's doubly
periodic surface: g^4 -> u and dh/sqrt(a) -> 4 dg/g/(g^2 - 1/g^2).  Near s = 1
(x -> 0) the Gauss map tends to the genus-5 data
g^4 = z^3 (1 - a* z)/(z - a*) [(b* - z)/(b* z - 1)]^2 with dh at a = a*.
All comparisons are made between single-valued quantities (g^4 and dh^2), so no
fourth-root sheet has to be matched.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._parallel import pmap
from .errors import DependencyError, DomainError
from .periods import FamilyCurvePoint

SCHERK_MIN_DIST = 0.3  # samples keep |u - 1| >= this
HW_MIN_ABS = 0.1  # samples keep |z| >= this


@dataclass
class LimitProbe:
    which: str  # "scherk" or "hoffman_wohlgemuth"
    params: tuple
    samples: np.ndarray
    gaps: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def gap(self) -> float:
        return float(np.max(self.gaps)) if self.gaps.size else 0.0


def g4(a: float, b: float, x: float, z):
    """The single-valued right-hand side of the Gauss-map relation."""
    z = np.asarray(z, dtype=complex)
    return z * (1 - a * z) / (z - a) * ((b - z) / (b * z - 1)) ** 2 * ((z + x) / (x * z + 1)) ** 2


def default_scherk_samples() -> np.ndarray:
    """Grid of {|u| <= 2, |u - 1| >= 0.3}."""
    re, im = np.meshgrid(np.linspace(-2, 2, 17), np.linspace(-2, 2, 17))
    u = (re + 1j * im).ravel()
    return u[(np.abs(u) <= 2) & (np.abs(u - 1) >= SCHERK_MIN_DIST)]


def default_hw_samples() -> np.ndarray:
    """Points of |z| = 1/2 with Im z >= 0.1."""
    t0 = np.arcsin(0.2)
    t = np.linspace(t0, np.pi - t0, 33)
    return 0.5 * np.exp(1j * t)


def scherk_probe(point: FamilyCurvePoint, samples=None) -> LimitProbe:
    """Per-sample deviations from Scherk's data in the chart z = a u/(u - 1).

    The density comparison uses u (u - 1)^2 (dh/du)^2 / a, which equals 1 for the
    limit data dh/sqrt(a) = 4 dg/g/(g^2 - 1/g^2) with g^4 = u.
    """
    u = default_scherk_samples() if samples is None else np.asarray(samples, dtype=complex).ravel()
    if np.any(np.abs(u - 1) < SCHERK_MIN_DIST):
        bad = u[np.abs(u - 1) < SCHERK_MIN_DIST][0]
        raise DomainError(f"sample u = {bad} is closer than {SCHERK_MIN_DIST} to u = 1")
    a, b, x = point.params.as_tuple()

    def one(uu):
        z = a * uu / (uu - 1)
        gap_g = abs(complex(g4(a, b, x, z)) - uu)
        # u (u-1)^2 (dh/du)^2 / a simplifies to -1/((u - 1)(z^2 - (a + 1/a) z + 1))
        dens = -1.0 / ((uu - 1) * (z * z - (a + 1 / a) * z + 1))
        return gap_g + abs(dens - 1.0)

    gaps = np.array(pmap(one, list(u)))
    return LimitProbe("scherk", point.params.as_tuple(), u, gaps)


def scherk_gap(point: FamilyCurvePoint, samples=None) -> float:
    """Max over samples of |g^4 - u| + |density ratio - 1| in the Scherk chart."""
    return scherk_probe(point, samples).gap


def hw_probe(point: FamilyCurvePoint, samples=None, terminal=None) -> LimitProbe:
    """Per-sample deviations from the genus-5 data at the traced terminal (a*, b*)."""
    if terminal is None:
        raise DependencyError("terminal point (a*, b*) unavailable: trace the curve to x = 0 first")
    if isinstance(terminal, FamilyCurvePoint):
        a_s, b_s = terminal.params.a, terminal.params.b
    else:
        a_s, b_s = float(terminal[0]), float(terminal[1])
    z = default_hw_samples() if samples is None else np.asarray(samples, dtype=complex).ravel()
    if np.any(np.abs(z) < HW_MIN_ABS) or np.any(z.imag <= 0) or np.any(np.abs(z) >= 1):
        raise DomainError("HW samples must lie in the half-disk with |z| >= 0.1")
    a, b, x = point.params.as_tuple()
    lim = z**3 * (1 - a_s * z) / (z - a_s) * ((b_s - z) / (b_s * z - 1)) ** 2
    gap_g = np.abs(g4(a, b, x, z) - lim)
    # dh^2 = -dz^2 / (z^2 Q(z)); the ratio against a = a* is Q_{a*}/Q_a
    q = z + 1 / z - a - 1 / a
    q_s = z + 1 / z - a_s - 1 / a_s
    gap_dh = np.abs(q_s / q - 1.0)
    return LimitProbe("hoffman_wohlgemuth", point.params.as_tuple(), z, gap_g + gap_dh)


def hw_gap(point: FamilyCurvePoint, samples=None, terminal=None) -> float:
    """Max over samples of |g^4 - limit| + |dh^2 ratio - 1| against (a*, b*)."""
    return hw_probe(point, samples, terminal).gap


def is_monotone_decreasing(values) -> bool:
    v = list(values)
    return all(v2 < v1 for v1, v2 in zip(v[:-1], v[1:]))
