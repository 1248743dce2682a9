"""Fundamental piece from symmetry copies of the half-disk patch.

Over a point of the upper half-disk the compact quotient has sheets labelled
(s, r): s in 0..3 multiplies g by i**s (and dh by (-1)**s), r in {U, L} selects
the upper or the conjugated lower half-plane, and the outer labels UO, LO are
the images under z -> 1/conj(z).  As maps from the half-disk every copy is an
isometric image of the base patch, X_(s,r) = M**s B_r X + t.

Crossing a real segment where g = |g| exp(i psi) leads from (s, U) to
(s + 4 psi/pi, L); the shift is read off the Gauss map at the segment midpoint.
The fundamental piece consists of the eight copies (s, U|L) glued along the
images of (0, a), (a, b), (b, 1) and (-1, -x).  Its boundary consists of the
images of (-x, 0) and of the unit-circle arc.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from ..errors import ClosureError
from ..weierstrass import SurfaceParams, g_upper
from .types import (
    HORIZONTAL,
    VERTICAL,
    BoundaryCurve,
    SurfaceMesh,
    SymmetryElement,
    fit_line,
    fit_plane,
)

SEGMENT_ARCS = ("m1mx", "mx0", "0a", "ab", "b1")
INTERIOR_ARCS = ("0a", "ab", "b1", "m1mx")  # seams inside the fundamental piece
BOUNDARY_ARCS = ("mx0", "gamma")
SEAM_TOL = 1e-6
PLANARITY_TOL = 1e-6

_M = np.array([[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, -1.0]])
_B = {
    "U": np.eye(3),
    "L": np.diag([1.0, -1.0, 1.0]),
    "UO": np.diag([1.0, 1.0, -1.0]),
    "LO": np.diag([1.0, -1.0, -1.0]),
}
PIECE_LABELS = tuple((s, r) for r in ("U", "L") for s in range(4))
ALL_LABELS = tuple((s, r) for r in ("U", "L", "UO", "LO") for s in range(4))


def linear_part(label) -> np.ndarray:
    """Orthogonal part M**s B_r of the copy (s, r)."""
    s, r = label
    return np.linalg.matrix_power(_M, s) @ _B[r]


def _arc_mid(p: SurfaceParams, arc: str) -> float:
    a, b, x = p.a, p.b, p.x
    return {
        "m1mx": -0.5 * (1 + x),
        "mx0": -0.5 * x,
        "0a": 0.5 * a,
        "ab": 0.5 * (a + b),
        "b1": 0.5 * (b + 1),
    }[arc]


def sheet_shifts(p: SurfaceParams) -> dict:
    """Sheet shift k per real segment: crossing it maps (s, U) to (s + k, L)."""
    out = {}
    for arc in SEGMENT_ARCS:
        if arc in ("mx0", "m1mx") and p.x == 0:
            out[arc] = {"mx0": 2, "m1mx": 0}[arc]
            continue
        g = complex(g_upper(p, _arc_mid(p, arc) + 0j))
        k = 4.0 * math.atan2(g.imag, g.real) / math.pi
        kr = round(k)
        if abs(k - kr) > 1e-6:
            raise ClosureError(f"Gauss map phase on {arc} is not a multiple of pi/4 (k = {k})")
        out[arc] = kr % 4
    return out


def neighbour(label, arc: str, shifts: dict):
    """Copy across ``arc`` from ``label``; the same half-disk vertex lies on both sides."""
    s, r = label
    if arc == "gamma":
        return (s, {"U": "UO", "UO": "U", "L": "LO", "LO": "L"}[r])
    k = shifts[arc]
    if r in ("U", "UO"):
        return ((s + k) % 4, "L" if r == "U" else "LO")
    return ((s - k) % 4, "U" if r == "L" else "UO")


@dataclass
class ArcSymmetries:
    planes: dict  # arc -> (normal, offset, deviation)
    line: tuple  # (point, direction, deviation) for the image of (0, a)
    elements: dict  # arc -> SymmetryElement for the interior generators


def detect_symmetries(patch: SurfaceMesh) -> ArcSymmetries:
    """Least-squares planes and the line through the boundary images of the patch."""
    V = patch.vertices
    planes = {}
    for arc in ("ab", "b1", "m1mx", "mx0", "gamma"):
        idx = patch.arcs[arc]
        if len(idx) >= 3:
            planes[arc] = fit_plane(V[idx])
    line = fit_line(V[patch.arcs["0a"]])
    elements = {
        "0a": SymmetryElement.half_turn(line[0], line[1]),
        "ab": SymmetryElement.reflection(planes["ab"][0], planes["ab"][1]),
        "b1": SymmetryElement.reflection(planes["b1"][0], planes["b1"][1]),
    }
    return ArcSymmetries(planes, line, elements)


def copy_isometries(sym: ArcSymmetries, shifts: dict, generators=("0a", "ab")) -> tuple[dict, float]:
    """Isometries of the eight piece copies by breadth-first search over the generators.

    Returns the isometries and the worst disagreement between linear parts found
    along different paths or against the algebraic sheet structure.
    """
    base = (0, "U")
    iso = {base: SymmetryElement.identity()}
    queue = deque([base])
    defect = 0.0
    while queue:
        c = queue.popleft()
        for arc in generators:
            d = neighbour(c, arc, shifts)
            cand = iso[c].compose(sym.elements[arc])
            if d not in iso:
                iso[d] = cand
                queue.append(d)
            else:
                defect = max(defect, float(np.max(np.abs(cand.linear - iso[d].linear))))
    for lab, e in iso.items():
        defect = max(defect, float(np.max(np.abs(e.linear - linear_part(lab)))))
    return iso, defect


def _seam_pairs(labels, arcs, shifts, patch):
    """Pairs of (copy, vertex) node ids identified across the given arcs."""
    index = {lab: i for i, lab in enumerate(labels)}
    nv = patch.vertices.shape[0]
    rows, cols = [], []
    for lab in labels:
        for arc in arcs:
            d = neighbour(lab, arc, shifts)
            if d not in index:
                continue
            v = np.asarray(patch.arcs[arc])
            rows.append(index[lab] * nv + v)
            cols.append(index[d] * nv + v)
    return np.concatenate(rows), np.concatenate(cols)


def _classes(n_nodes, rows, cols):
    g = coo_matrix((np.ones(rows.size), (rows, cols)), shape=(n_nodes, n_nodes))
    _, lab = connected_components(g, directed=False)
    # renumber by first occurrence so numbering is deterministic
    _, first, inv = np.unique(lab, return_index=True, return_inverse=True)
    order = np.argsort(first)
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size)
    return rank[inv], order.size


def euler_characteristic(patch: SurfaceMesh, shifts: dict) -> tuple[int, int, int, int]:
    """V - E + F of the closed quotient: 16 copies glued by provenance, not geometry."""
    labels = ALL_LABELS
    nv = patch.vertices.shape[0]
    rows, cols = _seam_pairs(labels, SEGMENT_ARCS + ("gamma",), shifts, patch)
    cls, V = _classes(len(labels) * nv, rows, cols)
    faces = np.concatenate([patch.faces + i * nv for i in range(len(labels))])
    f = cls[faces]
    e = np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]])
    e.sort(axis=1)
    E = np.unique(e, axis=0).shape[0]
    F = faces.shape[0]
    return V - E + F, V, E, F


@dataclass
class AssemblyReport:
    seam_mismatch: float  # max over interior seams, absolute
    seam_detail: dict
    linear_defect: float
    conjugation_defect: float
    diameter: float
    chi: int
    cells: tuple
    boundary_edges_match: bool
    symmetry_elements: list = field(default_factory=list)


def _normalising_frame(sym: ArcSymmetries, patch: SurfaceMesh, p: SurfaceParams) -> SymmetryElement:
    """Rotation about the vertical axis putting the (0, a) axis along x1, X(a) at the origin."""
    d = sym.line[1].copy()
    d[2] = 0.0
    d /= np.linalg.norm(d)
    rot = np.array([[d[0], d[1], 0.0], [-d[1], d[0], 0.0], [0.0, 0.0, 1.0]])
    ia = int(np.argmin(np.abs(patch.vertex_z - p.a)))
    xa = patch.vertices[ia]
    return SymmetryElement("composite", rot, -(rot @ xa))


def _snap(v, tol=1e-9):
    """Snap a unit vector to a coordinate axis when it is within tol of one."""
    v = np.asarray(v, dtype=float)
    k = int(np.argmax(np.abs(v)))
    if np.all(np.abs(np.delete(v, k)) < tol):
        out = np.zeros(3)
        out[k] = math.copysign(1.0, v[k])
        return out
    return v


def assemble_fundamental_piece(
    patch: SurfaceMesh, params: SurfaceParams, seam_tol: float = SEAM_TOL, strict: bool = True
) -> SurfaceMesh:
    """Glue the eight copies into the fundamental piece, normalise and tag its boundary.

    With ``strict`` a seam mismatch above seam_tol * diameter raises ClosureError.
    """
    shifts = sheet_shifts(params)
    sym = detect_symmetries(patch)
    iso, lin_defect = copy_isometries(sym, shifts)
    if set(iso) != set(PIECE_LABELS):
        raise ClosureError(f"symmetry orbit has {len(iso)} copies, expected 8")
    frame = _normalising_frame(sym, patch, params)
    iso = {lab: frame.compose(e) for lab, e in iso.items()}
    labels = PIECE_LABELS
    V0 = patch.vertices
    copies = [iso[lab].apply(V0) for lab in labels]
    allv = np.concatenate(copies)
    diam = float(np.linalg.norm(allv.max(axis=0) - allv.min(axis=0)))

    # seams: the same half-disk vertex seen from both sides
    seam = {}
    for lab in labels:
        for arc in INTERIOR_ARCS:
            d = neighbour(lab, arc, shifts)
            v = patch.arcs[arc]
            dev = float(np.max(np.linalg.norm(iso[lab].apply(V0[v]) - iso[d].apply(V0[v]), axis=1)))
            seam[arc] = max(seam.get(arc, 0.0), dev)
    worst = max(seam.values())
    if strict and worst > seam_tol * diam:
        raise ClosureError(
            f"seam mismatch {worst:.3g} exceeds {seam_tol:g} * diameter ({diam:.4g}); "
            f"per arc: {', '.join(f'{k}={v:.2e}' for k, v in seam.items())}; "
            "parameters are off the solution curve or a branch is wrong"
        )

    # reflecting the patch in the (b, 1) plane must agree with the conjugated copy
    refl = sym.elements["b1"].apply(V0)
    conj = V0 @ _B["L"].T
    conj += (refl - conj)[patch.arcs["b1"][0]]
    conj_defect = float(np.max(np.linalg.norm(refl - conj, axis=1)))

    # merge vertices across interior seams
    nv = V0.shape[0]
    rows, cols = _seam_pairs(labels, INTERIOR_ARCS, shifts, patch)
    cls, nmerged = _classes(len(labels) * nv, rows, cols)
    first = np.full(nmerged, -1)
    node = np.arange(cls.size)
    # representative = smallest node id of each class
    order = np.argsort(cls, kind="stable")
    starts = np.concatenate([[True], cls[order][1:] != cls[order][:-1]])
    first[cls[order][starts]] = node[order][starts]
    verts = allv[first]
    faces = []
    for i, lab in enumerate(labels):
        f = patch.faces + i * nv
        if np.linalg.det(iso[lab].linear) < 0:
            f = f[:, ::-1]
        faces.append(cls[f])
    faces = np.concatenate(faces)

    # boundary edges of the merged mesh must be exactly the provenance boundary arcs
    e = np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]])
    e.sort(axis=1)
    uniq, counts = np.unique(e, axis=0, return_counts=True)
    bset = {tuple(r) for r in uniq[counts == 1]}
    arc_edges = set()
    for i, lab in enumerate(labels):
        for arc in BOUNDARY_ARCS:
            v = cls[np.asarray(patch.arcs[arc]) + i * nv]
            for u, w in zip(v[:-1], v[1:]):
                arc_edges.add((min(u, w), max(u, w)))
    bmatch = bset == arc_edges

    curves = _boundary_curves(patch, params, labels, cls, nv, verts)
    chi, Vq, Eq, Fq = euler_characteristic(patch, shifts)

    # symmetry elements of the piece in the normalised frame
    elems = []
    for lab in labels:
        for arc in ("ab", "b1", "mx0", "gamma"):
            if arc not in sym.planes:
                continue
            n, c, _ = sym.planes[arc]
            e_ = iso[lab]
            n2 = _snap(e_.linear @ n)
            q = e_.apply(c * n)
            elems.append((lab, arc, SymmetryElement.reflection(n2, float(n2 @ q))))
        q, d, _ = sym.line
        e_ = iso[lab]
        elems.append((lab, "0a", SymmetryElement.half_turn(e_.apply(q), _snap(e_.linear @ d))))

    report = AssemblyReport(
        seam_mismatch=worst,
        seam_detail=seam,
        linear_defect=lin_defect,
        conjugation_defect=conj_defect,
        diameter=diam,
        chi=chi,
        cells=(Vq, Eq, Fq),
        boundary_edges_match=bmatch,
        symmetry_elements=elems,
    )
    mesh = SurfaceMesh(
        vertices=verts,
        faces=faces,
        boundary_tags=curves,
        info={
            "params": params.as_tuple(),
            "resolution": patch.info.get("resolution"),
            "circulation": patch.info.get("circulation"),
            "assembly": report,
            "copy_isometries": iso,
            "frame": frame,
            "shifts": shifts,
        },
    )
    mesh.lattice = lattice_from_planes(mesh)
    return mesh


def _vertical_points(p: SurfaceParams) -> list:
    """Zeros and poles of g on the real axis: points where the normal is vertical."""
    pts = [0.0, p.a, p.b]
    if p.x > 0:
        pts.append(-p.x)
    return pts


def _boundary_curves(patch, p, labels, cls, nv, verts) -> list:
    """Chain boundary arc-sides into planar curves, splitting where the normal is vertical."""
    vpts = _vertical_points(p)
    zs = patch.vertex_z
    sides = []  # (merged vertex chain, copy index, arc)
    for i, lab in enumerate(labels):
        for arc in BOUNDARY_ARCS:
            idx = np.asarray(patch.arcs[arc])
            if idx.size < 2:
                continue
            sides.append([list(cls[idx + i * nv]), idx])
    # endpoint -> sides that end there (only through non-vertical points)
    def breakable(vz):
        return any(abs(vz - q) <= 1e-14 for q in vpts)

    ends = {}
    for k, (chain, idx) in enumerate(sides):
        for pos, v in ((0, chain[0]), (-1, chain[-1])):
            if not breakable(zs[idx[pos]]):
                ends.setdefault(v, []).append(k)
    used = [False] * len(sides)
    curves = []
    for k in range(len(sides)):
        if used[k]:
            continue
        used[k] = True
        chain = list(sides[k][0])
        # extend forward and backward through joinable endpoints
        for _ in range(2):
            while True:
                tail = chain[-1]
                nxt = [j for j in ends.get(tail, []) if not used[j]]
                if not nxt:
                    break
                j = nxt[0]
                used[j] = True
                c2 = sides[j][0]
                chain.extend(c2[1:] if c2[0] == tail else c2[::-1][1:])
            chain.reverse()
        if len(chain) > 1 and chain[0] == chain[-1]:
            chain = chain[:-1]
        n, off, dev = fit_plane(verts[chain])
        if abs(n[2]) < PLANARITY_TOL:
            kind = VERTICAL
        elif abs(abs(n[2]) - 1.0) < PLANARITY_TOL:
            kind = HORIZONTAL
        else:
            kind = "unclassified"
        curves.append(BoundaryCurve(len(curves), kind, np.array(chain), n, off, dev))
    return curves


def _cluster(values, tol):
    values = np.sort(np.asarray(values))
    out = [values[0]]
    for v in values[1:]:
        if v - out[-1] > tol:
            out.append(v)
    return np.array(out)


def lattice_from_planes(piece: SurfaceMesh) -> np.ndarray:
    """Three translations, each twice the gap between parallel symmetry planes.

    Rows are ordered: the two horizontal generators (along x1 and x2 after
    normalisation) and the vertical one.
    """
    rep: AssemblyReport = piece.info["assembly"]
    diam = rep.diameter
    groups = []  # (normal, offsets)
    for _, _, el in rep.symmetry_elements:
        if el.kind != "reflection_plane":
            continue
        lin = el.linear
        # recover unit normal and offset from x -> x - 2 (n.x - c) n
        w, vecs = np.linalg.eigh(lin)
        n = vecs[:, int(np.argmin(w))]
        n = _snap(n)
        k = int(np.argmax(np.abs(n)))
        if n[k] < 0:
            n = -n
        c = 0.5 * float(n @ el.shift)
        for g in groups:
            if abs(abs(g[0] @ n) - 1.0) < 1e-9:
                g[1].append(c if g[0] @ n > 0 else -c)
                break
        else:
            groups.append((n, [c]))
    vecs = []
    for n, offs in groups:
        cl = _cluster(offs, 1e-6 * diam)
        if cl.size < 2:
            continue
        gap = float(np.min(np.diff(cl)))
        vecs.append(2.0 * gap * n)
    if len(vecs) != 3:
        raise ClosureError(f"found {len(vecs)} independent plane pairs, expected 3")
    vecs.sort(key=lambda v: int(np.argmax(np.abs(v))))
    L = np.array(vecs)
    if abs(np.linalg.det(L)) <= 1e-12 * diam**3:
        raise ClosureError("lattice generators are linearly dependent")
    return L
