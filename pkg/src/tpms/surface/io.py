"""ASCII OBJ and PLY export of assembled pieces and their lattice translates."""

from __future__ import annotations

import itertools
from pathlib import Path

import numpy as np

from ..errors import MeshIOError
from .types import HORIZONTAL, VERTICAL, BoundaryCurve, SurfaceMesh

TAG_CODES = {None: 0, VERTICAL: 1, HORIZONTAL: 2}
FORMATS = ("obj", "ply")


def _fmt(v: float) -> str:
    return "%.17g" % v


def replicate(mesh: SurfaceMesh, copies=(1, 1, 1)) -> SurfaceMesh:
    """The mesh repeated over lattice translates i*L0 + j*L1 + k*L2, i < n1, j < n2, k < n3."""
    n = tuple(int(c) for c in copies)
    if len(n) != 3 or min(n) < 1:
        raise ValueError(f"copies must be three integers >= 1, got {copies!r}")
    if n == (1, 1, 1):
        return mesh
    if mesh.lattice is None:
        raise ValueError("replication needs a lattice")
    nv = mesh.vertices.shape[0]
    verts, faces, tags = [], [], []
    for c, (i, j, k) in enumerate(itertools.product(range(n[0]), range(n[1]), range(n[2]))):
        t = i * mesh.lattice[0] + j * mesh.lattice[1] + k * mesh.lattice[2]
        verts.append(mesh.vertices + t)
        faces.append(mesh.faces + c * nv)
        for b in mesh.boundary_tags:
            tags.append(
                BoundaryCurve(len(tags), b.cls, b.vertices + c * nv, b.normal, b.offset + float(b.normal @ t), b.planarity)
            )
    return SurfaceMesh(np.concatenate(verts), np.concatenate(faces), tags, mesh.lattice, info=mesh.info)


def vertex_tags(mesh: SurfaceMesh) -> np.ndarray:
    tags = np.zeros(mesh.vertices.shape[0], dtype=int)
    for b in mesh.boundary_tags:
        tags[b.vertices] = TAG_CODES.get(b.cls, 0)
    return tags


def obj_text(mesh: SurfaceMesh) -> str:
    out = ["# triply periodic minimal surface piece"]
    if mesh.lattice is not None:
        for k, v in enumerate(mesh.lattice):
            out.append(f"# lattice {k} " + " ".join(_fmt(c) for c in v))
    out += ["v " + " ".join(_fmt(c) for c in row) for row in mesh.vertices]
    out += ["f " + " ".join(str(int(i) + 1) for i in row) for row in mesh.faces]
    for b in mesh.boundary_tags:
        out.append(f"#tag {b.curve_id} {b.cls} " + " ".join(str(int(i) + 1) for i in b.vertices))
    return "\n".join(out) + "\n"


def ply_text(mesh: SurfaceMesh) -> str:
    tags = vertex_tags(mesh)
    out = [
        "ply",
        "format ascii 1.0",
        "comment tag 0 = interior, 1 = vertical planar boundary, 2 = horizontal planar boundary",
        f"element vertex {mesh.vertices.shape[0]}",
        "property double x",
        "property double y",
        "property double z",
        "property int tag",
        f"element face {mesh.faces.shape[0]}",
        "property list uchar int vertex_indices",
        "end_header",
    ]
    out += [" ".join(_fmt(c) for c in row) + f" {t}" for row, t in zip(mesh.vertices, tags)]
    out += ["3 " + " ".join(str(int(i)) for i in row) for row in mesh.faces]
    return "\n".join(out) + "\n"


def export_mesh(mesh: SurfaceMesh, path, fmt: str = "obj", copies=(1, 1, 1)) -> Path:
    """Write the mesh (replicated over ``copies`` lattice translates) as ASCII OBJ or PLY."""
    fmt = fmt.lower()
    if fmt not in FORMATS:
        raise ValueError(f"unknown mesh format {fmt!r}; expected one of {FORMATS}")
    m = replicate(mesh, copies)
    text = obj_text(m) if fmt == "obj" else ply_text(m)
    path = Path(path)
    try:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise MeshIOError(f"cannot write mesh ({exc.strerror or exc})", path) from exc
    return path


def read_obj(path) -> SurfaceMesh:
    """Read vertices, triangles and boundary tags written by export_mesh."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="ascii").splitlines()
    except OSError as exc:
        raise MeshIOError(f"cannot read mesh ({exc.strerror or exc})", path) from exc
    verts, faces, tags, lattice = [], [], [], []
    for ln in lines:
        parts = ln.split()
        if not parts:
            continue
        if parts[0] == "v":
            verts.append([float(c) for c in parts[1:4]])
        elif parts[0] == "f":
            faces.append([int(c.split("/")[0]) - 1 for c in parts[1:4]])
        elif parts[0] == "#tag":
            idx = np.array([int(c) - 1 for c in parts[3:]], dtype=int)
            tags.append(BoundaryCurve(int(parts[1]), parts[2], idx, np.zeros(3), 0.0, 0.0))
        elif parts[:2] == ["#", "lattice"]:
            lattice.append([float(c) for c in parts[3:6]])
    return SurfaceMesh(
        np.array(verts, dtype=float).reshape(-1, 3),
        np.array(faces, dtype=np.int64).reshape(-1, 3),
        tags,
        np.array(lattice) if len(lattice) == 3 else None,
    )
