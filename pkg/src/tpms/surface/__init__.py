"""Surface builder: patch immersion, fundamental piece, lattice and mesh export."""

from __future__ import annotations

from dataclasses import dataclass

from ..weierstrass import SurfaceParams
from .assemble import assemble_fundamental_piece, euler_characteristic, sheet_shifts
from .io import export_mesh, read_obj, replicate
from .lattice import LoopCheck, check_loop_periods, lattice_vectors, loop_period, probe_loops
from .patch import edge_integrals, mesh_patch
from .quality import QualityReport, conformality_defect, mean_curvature, quality_report
from .types import HORIZONTAL, VERTICAL, BoundaryCurve, SurfaceMesh, SymmetryElement

__all__ = [
    "BoundaryCurve",
    "HORIZONTAL",
    "LoopCheck",
    "QualityReport",
    "SurfaceBuild",
    "SurfaceMesh",
    "SymmetryElement",
    "VERTICAL",
    "assemble_fundamental_piece",
    "build_surface",
    "check_loop_periods",
    "conformality_defect",
    "edge_integrals",
    "euler_characteristic",
    "export_mesh",
    "lattice_vectors",
    "loop_period",
    "mean_curvature",
    "mesh_patch",
    "probe_loops",
    "quality_report",
    "read_obj",
    "replicate",
    "sheet_shifts",
]


@dataclass
class SurfaceBuild:
    patch: SurfaceMesh
    piece: SurfaceMesh
    quality: QualityReport
    loops: list


def build_surface(params: SurfaceParams, resolution: int = 64, check_loops: bool = True) -> SurfaceBuild:
    """Patch, fundamental piece, quality report and (optionally) the loop-period check.

    Raises ClosureError when seams or loop periods do not close.
    """
    patch = mesh_patch(params, resolution)
    piece = assemble_fundamental_piece(patch, params)
    loops = check_loop_periods(piece, params) if check_loops else []
    return SurfaceBuild(patch, piece, quality_report(piece), loops)
