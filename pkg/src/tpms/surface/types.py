"""Mesh and symmetry containers for the surface builder."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

VERTICAL = "vertical_planar"
HORIZONTAL = "horizontal_planar"


@dataclass(frozen=True)
class SymmetryElement:
    """An isometry x -> linear @ x + shift of R^3."""

    kind: str  # reflection_plane, rotation_axis, translation, identity or composite
    linear: np.ndarray
    shift: np.ndarray

    def __post_init__(self):
        lin = np.asarray(self.linear, dtype=float)
        if lin.shape != (3, 3):
            raise ValueError("linear part must be 3x3")
        if np.max(np.abs(lin @ lin.T - np.eye(3))) > 1e-9:
            raise ValueError("linear part is not orthogonal")
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "shift", np.asarray(self.shift, dtype=float).reshape(3))

    @staticmethod
    def identity() -> "SymmetryElement":
        return SymmetryElement("identity", np.eye(3), np.zeros(3))

    @staticmethod
    def reflection(normal, offset: float, snap_tol: float = 1e-12) -> "SymmetryElement":
        """Reflection in the plane normal . x = offset.

        Normals within ``snap_tol`` of a coordinate axis or of a two-axis diagonal
        are snapped; the linear part is then a signed permutation, so composing the
        reflection with itself gives the identity bit for bit.
        """
        n = np.asarray(normal, dtype=float)
        n = n / np.linalg.norm(n)
        s = _snap_normal(n, snap_tol)
        if s is None:
            return SymmetryElement("reflection_plane", np.eye(3) - 2.0 * np.outer(n, n), 2.0 * offset * n)
        sign, support = s
        lin = np.eye(3)
        if len(support) == 1:
            k = support[0]
            lin[k, k] = -1.0
            n = np.zeros(3)
            n[k] = sign[k]
        else:
            i, j = support
            lin[i, i] = lin[j, j] = 0.0
            lin[i, j] = lin[j, i] = -sign[i] * sign[j]
            n = np.zeros(3)
            n[i], n[j] = sign[i] * _RSQRT2, sign[j] * _RSQRT2
        return SymmetryElement("reflection_plane", lin, 2.0 * offset * n)

    @staticmethod
    def half_turn(point, direction) -> "SymmetryElement":
        """Rotation by 180 degrees about the line through ``point`` along ``direction``."""
        d = np.asarray(direction, dtype=float)
        d = d / np.linalg.norm(d)
        q = np.asarray(point, dtype=float)
        lin = 2.0 * np.outer(d, d) - np.eye(3)
        return SymmetryElement("rotation_axis", lin, q - lin @ q)

    @staticmethod
    def translation(vector) -> "SymmetryElement":
        return SymmetryElement("translation", np.eye(3), vector)

    @property
    def determinant(self) -> float:
        return float(np.linalg.det(self.linear))

    def apply(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        return pts @ self.linear.T + self.shift

    def compose(self, other: "SymmetryElement") -> "SymmetryElement":
        """self o other (apply ``other`` first)."""
        return SymmetryElement(
            "composite", self.linear @ other.linear, self.linear @ other.shift + self.shift
        )

    def inverse(self) -> "SymmetryElement":
        lt = self.linear.T
        return SymmetryElement(self.kind, lt, -(lt @ self.shift))


_RSQRT2 = 1.0 / np.sqrt(2.0)


def _snap_normal(n: np.ndarray, tol: float):
    """(signs, support) when n is an axis or a two-axis diagonal up to tol, else None."""
    sign = np.where(n < 0, -1.0, 1.0)
    m = np.abs(n)
    order = np.argsort(-m, kind="stable")
    if m[order[1]] <= tol and m[order[2]] <= tol:
        return sign, (int(order[0]),)
    i, j = sorted(int(v) for v in order[:2])
    if m[order[2]] <= tol and abs(m[i] - m[j]) <= tol:
        return sign, (i, j)
    return None


@dataclass
class BoundaryCurve:
    curve_id: int
    cls: str  # VERTICAL, HORIZONTAL or "unclassified"
    vertices: np.ndarray  # ordered vertex indices
    normal: np.ndarray
    offset: float
    planarity: float  # max distance of the vertices from the fitted plane


@dataclass
class SurfaceMesh:
    """Triangle mesh with boundary tags and, once assembled, the lattice of translations."""

    vertices: np.ndarray
    faces: np.ndarray
    boundary_tags: list = field(default_factory=list)
    lattice: Optional[np.ndarray] = None
    # parameter-space provenance: z value of every vertex and named arcs (patch only)
    vertex_z: Optional[np.ndarray] = None
    arcs: dict = field(default_factory=dict)
    info: dict = field(default_factory=dict)

    @property
    def diameter(self) -> float:
        v = self.vertices
        return float(np.linalg.norm(v.max(axis=0) - v.min(axis=0)))

    def transformed(self, iso: SymmetryElement) -> "SurfaceMesh":
        faces = self.faces if iso.determinant > 0 else self.faces[:, ::-1].copy()
        return SurfaceMesh(
            iso.apply(self.vertices),
            faces,
            list(self.boundary_tags),
            None if self.lattice is None else self.lattice @ iso.linear.T,
            self.vertex_z,
            dict(self.arcs),
            dict(self.info),
        )


def fit_plane(pts) -> tuple[np.ndarray, float, float]:
    """Least-squares plane (unit normal, offset, max deviation)."""
    pts = np.asarray(pts, dtype=float)
    c = pts.mean(axis=0)
    _, _, vt = np.linalg.svd(pts - c)
    n = vt[-1]
    # fixed sign convention so results are reproducible
    k = int(np.argmax(np.abs(n)))
    if n[k] < 0:
        n = -n
    dev = float(np.max(np.abs((pts - c) @ n)))
    return n, float(n @ c), dev


def fit_line(pts) -> tuple[np.ndarray, np.ndarray, float]:
    """Least-squares line (point, unit direction, max deviation)."""
    pts = np.asarray(pts, dtype=float)
    c = pts.mean(axis=0)
    _, _, vt = np.linalg.svd(pts - c)
    d = vt[0]
    k = int(np.argmax(np.abs(d)))
    if d[k] < 0:
        d = -d
    r = pts - c
    perp = r - np.outer(r @ d, d)
    return c, d, float(np.max(np.linalg.norm(perp, axis=1)))
