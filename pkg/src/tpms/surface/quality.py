"""Numerical diagnostics of an assembled piece."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..weierstrass import SurfaceParams, phi_upper
from .types import HORIZONTAL, VERTICAL, SurfaceMesh

EXPECTED_CHI = -12  # genus 7


@dataclass
class QualityReport:
    planarity: float  # worst boundary-curve deviation from its plane, relative to diameter
    census: dict  # tag -> count
    mean_curvature_median: float
    mean_curvature_max: float
    interior_vertices: int
    euler_characteristic: int
    cells: tuple  # (V, E, F) of the closed-up quotient
    diameter: float
    circulation: float
    seam_mismatch: float  # relative to diameter

    def lines(self) -> list:
        return [
            f"diameter {self.diameter:.12g}",
            f"boundary census vertical={self.census.get(VERTICAL, 0)} "
            f"horizontal={self.census.get(HORIZONTAL, 0)}",
            f"boundary planarity {self.planarity:.3e} (relative)",
            f"seam mismatch {self.seam_mismatch:.3e} (relative)",
            f"cell circulation {self.circulation:.3e} (relative)",
            f"mean curvature median {self.mean_curvature_median:.3e} max {self.mean_curvature_max:.3e} "
            f"over {self.interior_vertices} interior vertices",
            f"euler characteristic {self.euler_characteristic} (V={self.cells[0]} E={self.cells[1]} "
            f"F={self.cells[2]}, expected {EXPECTED_CHI})",
        ]


def boundary_vertices(faces: np.ndarray) -> np.ndarray:
    e = np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]])
    e.sort(axis=1)
    uniq, counts = np.unique(e, axis=0, return_counts=True)
    return np.unique(uniq[counts == 1])


def mean_curvature(vertices: np.ndarray, faces: np.ndarray) -> np.ndarray:
    """|H| per vertex from the cotangent Laplacian with barycentric areas."""
    V, F = vertices, faces
    lap = np.zeros_like(V)
    area = np.zeros(V.shape[0])
    for k in range(3):
        i, j, l = F[:, k], F[:, (k + 1) % 3], F[:, (k + 2) % 3]
        u, w = V[j] - V[i], V[l] - V[i]
        cr = np.linalg.norm(np.cross(u, w), axis=1)
        cot = np.einsum("ij,ij->i", u, w) / np.maximum(cr, 1e-300)
        # the angle at i weighs the opposite edge (j, l)
        d = V[l] - V[j]
        np.add.at(lap, j, cot[:, None] * d)
        np.add.at(lap, l, -cot[:, None] * d)
        np.add.at(area, i, cr / 6.0)
    return np.linalg.norm(lap, axis=1) / np.maximum(4.0 * area, 1e-300)


def conformality_defect(params: SurfaceParams, samples=None) -> float:
    """Worst deviation from isothermal coordinates at interior sample points."""
    if samples is None:
        r = np.linspace(0.1, 0.95, 7)
        t = np.linspace(0.2, np.pi - 0.2, 7)
        samples = (r[:, None] * np.exp(1j * t[None, :])).ravel()
    phi = phi_upper(params, np.asarray(samples, dtype=complex))
    xu = phi.real  # dX along Re z
    xv = -phi.imag  # dX along Im z
    nu = np.linalg.norm(xu, axis=0)
    nv = np.linalg.norm(xv, axis=0)
    ortho = np.abs(np.einsum("ij,ij->j", xu, xv)) / (nu * nv)
    ratio = np.abs(nu / nv - 1.0)
    return float(max(ortho.max(), ratio.max()))


def quality_report(mesh: SurfaceMesh) -> QualityReport:
    rep = mesh.info["assembly"]
    diam = rep.diameter
    census = {}
    for c in mesh.boundary_tags:
        census[c.cls] = census.get(c.cls, 0) + 1
    plan = max((c.planarity for c in mesh.boundary_tags), default=0.0) / diam
    H = mean_curvature(mesh.vertices, mesh.faces)
    interior = np.setdiff1d(np.arange(mesh.vertices.shape[0]), boundary_vertices(mesh.faces))
    Hi = H[interior]
    return QualityReport(
        planarity=plan,
        census=census,
        mean_curvature_median=float(np.median(Hi)),
        mean_curvature_max=float(np.max(Hi)),
        interior_vertices=int(interior.size),
        euler_characteristic=rep.chi,
        cells=rep.cells,
        diameter=diam,
        circulation=float(mesh.info.get("circulation") or 0.0),
        seam_mismatch=rep.seam_mismatch / diam,
    )
