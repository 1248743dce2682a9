import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tpms import periods
from tpms.errors import ClosureError, MeshIOError
from tpms.surface import (
    HORIZONTAL,
    VERTICAL,
    SurfaceMesh,
    SymmetryElement,
    assemble_fundamental_piece,
    build_surface,
    conformality_defect,
    export_mesh,
    lattice_vectors,
    loop_period,
    mean_curvature,
    mesh_patch,
    read_obj,
    replicate,
)
from tpms.surface.types import fit_line, fit_plane
from tpms.weierstrass import make_params


@pytest.fixture(scope="module")
def patch16(curve_point):
    return mesh_patch(curve_point.params, 16)


# ---------------------------------------------------------------------------
# patch


def test_circulation(patch16):
    assert patch16.info["circulation"] <= 1e-8


def test_gamma_image_is_horizontal(patch16):
    v = patch16.vertices[patch16.arcs["gamma"]]
    assert np.ptp(v[:, 2]) <= 1e-8 * patch16.diameter


def test_segment_0a_is_straight(patch16):
    _, _, dev = fit_line(patch16.vertices[patch16.arcs["0a"]])
    assert dev <= 1e-8 * patch16.diameter


@pytest.mark.parametrize("arc", ["ab", "b1", "mx0", "m1mx"])
def test_real_segments_are_planar(patch16, arc):
    _, _, dev = fit_plane(patch16.vertices[patch16.arcs[arc]])
    assert dev <= 1e-8 * patch16.diameter


def test_mesh_patch_deterministic(curve_point, patch16):
    again = mesh_patch(curve_point.params, 16)
    assert np.array_equal(again.vertices, patch16.vertices)
    assert np.array_equal(again.faces, patch16.faces)


def test_conformality(curve_point):
    assert conformality_defect(curve_point.params) <= 1e-6


# ---------------------------------------------------------------------------
# fundamental piece


@pytest.mark.parametrize("fixture", ["build16", "build64"])
def test_piece_closure(request, fixture):
    b = request.getfixturevalue(fixture)
    q = b.quality
    assert q.census == {VERTICAL: 8, HORIZONTAL: 4}
    assert q.euler_characteristic == -12
    assert q.seam_mismatch <= 1e-6
    assert q.planarity <= 1e-6
    assert b.piece.info["assembly"].boundary_edges_match


def test_boundary_tags_orientation(build16):
    for c in build16.piece.boundary_tags:
        if c.cls == VERTICAL:
            assert abs(c.normal[2]) <= 1e-9
        else:
            assert abs(abs(c.normal[2]) - 1) <= 1e-9


def test_conjugation_copy(build16):
    rep = build16.piece.info["assembly"]
    assert rep.conjugation_defect <= 1e-8 * rep.diameter


def test_symmetry_elements_are_isometries(build16):
    for _, _, e in build16.piece.info["assembly"].symmetry_elements:
        assert np.max(np.abs(e.linear @ e.linear.T - np.eye(3))) <= 1e-12
        want = -1.0 if e.kind == "reflection_plane" else 1.0
        assert e.determinant == pytest.approx(want, abs=1e-12)


def test_double_reflection_is_identity(build16):
    V = build16.piece.vertices
    for c in build16.piece.boundary_tags:
        r = SymmetryElement.reflection(c.normal, c.offset)
        assert np.array_equal(r.compose(r).apply(V), V)
        assert np.max(np.abs(r.apply(r.apply(V)) - V)) <= 1e-14 * build16.piece.diameter


def test_boundary_planes_are_symmetries(build16):
    # each boundary curve's plane maps its own curve onto itself
    V = build16.piece.vertices
    for c in build16.piece.boundary_tags:
        r = SymmetryElement.reflection(c.normal, c.offset)
        pts = V[c.vertices]
        assert np.max(np.abs(r.apply(pts) - pts)) <= 1e-9 * build16.piece.diameter


def test_off_curve_params_fail_closure():
    p = make_params(0.47, 0.85, 0.68)
    patch = mesh_patch(p, 16)
    with pytest.raises(ClosureError, match="seam mismatch"):
        assemble_fundamental_piece(patch, p)


def test_scherk_regime_piece():
    q = periods.curve_point_at(0.15)
    b = build_surface(q.params, 16, check_loops=False)
    assert b.quality.euler_characteristic == -12
    assert b.quality.census == {VERTICAL: 8, HORIZONTAL: 4}


def test_mean_curvature_refinement(curve_point, build16):
    b32 = build_surface(curve_point.params, 32, check_loops=False)
    assert build16.quality.mean_curvature_median / b32.quality.mean_curvature_median >= 1.5


def test_mean_curvature_plane_is_zero():
    x, y = np.meshgrid(np.linspace(0, 1, 6), np.linspace(0, 1, 6))
    V = np.column_stack([x.ravel(), y.ravel(), np.zeros(36)])
    F = []
    for i in range(5):
        for j in range(5):
            k = 6 * i + j
            F += [[k, k + 1, k + 7], [k, k + 7, k + 6]]
    H = mean_curvature(V, np.array(F)).reshape(6, 6)
    assert np.max(H[1:-1, 1:-1]) <= 1e-12


def test_mean_curvature_sphere():
    # a unit sphere has |H| = 1 (mean of principal curvatures)
    from scipy.spatial import ConvexHull

    rng = np.random.default_rng(1)
    P = rng.normal(size=(3000, 3))
    P /= np.linalg.norm(P, axis=1)[:, None]
    H = mean_curvature(P, ConvexHull(P).simplices)
    assert abs(np.median(H) - 1.0) < 0.05


# ---------------------------------------------------------------------------
# lattice


def test_lattice_rank(build64):
    L = lattice_vectors(build64.piece)
    scale = build64.piece.diameter
    assert L.shape == (3, 3)
    assert np.linalg.det(L @ L.T) > 1e-12 * scale**6


def test_loop_periods_in_lattice(build64):
    assert len(build64.loops) >= 40
    assert max(c.residual for c in build64.loops) <= 1e-6


def test_contractible_loop_has_zero_period(curve_point):
    t = np.linspace(0, 2 * np.pi, 33)
    loop = 0.3 + 0.5j + 0.1 * np.exp(1j * t)
    per, turns = loop_period(curve_point.params, loop)
    assert turns == 1
    assert np.max(np.abs(per)) <= 1e-8


def test_lattice_needs_assembly(patch16):
    with pytest.raises(ValueError):
        lattice_vectors(patch16)


# ---------------------------------------------------------------------------
# symmetry elements


unit = st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)).filter(
    lambda v: np.linalg.norm(v) > 0.1
)


@settings(max_examples=100, deadline=None)
@given(unit, st.floats(-5, 5))
def test_reflection_properties(n, c):
    r = SymmetryElement.reflection(n, c)
    assert r.determinant == pytest.approx(-1.0)
    nn = np.asarray(n) / np.linalg.norm(n)
    p = np.array([0.3, -1.2, 2.0])
    q = r.apply(p)
    # the midpoint lies on the plane and the displacement is along the normal
    assert abs(nn @ (0.5 * (p + q)) - c) <= 1e-12
    assert np.linalg.norm(np.cross(q - p, nn)) <= 1e-12
    assert np.allclose(r.compose(r).apply(p), p, atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(unit, st.tuples(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3)))
def test_half_turn_properties(d, q):
    h = SymmetryElement.half_turn(q, d)
    assert h.determinant == pytest.approx(1.0)
    assert np.allclose(h.apply(np.asarray(q)), q)
    assert np.allclose(h.compose(h).linear, np.eye(3), atol=1e-12)
    assert np.allclose(h.inverse().apply(h.apply([1.0, 2.0, 3.0])), [1.0, 2.0, 3.0], atol=1e-12)


def test_symmetry_element_rejects_non_orthogonal():
    with pytest.raises(ValueError):
        SymmetryElement("composite", 2 * np.eye(3), np.zeros(3))


# ---------------------------------------------------------------------------
# export


def _triangle():
    V = np.array([[0.1, 1.0 / 3.0, np.pi], [np.e, -2.0 / 7.0, 1e-300], [123456.789, 5e-324, -0.0]])
    return SurfaceMesh(V, np.array([[0, 1, 2]]))


def test_obj_round_trip(tmp_path):
    m = _triangle()
    path = export_mesh(m, tmp_path / "t.obj")
    back = read_obj(path)
    assert np.array_equal(back.vertices, m.vertices)
    assert np.array_equal(back.faces, m.faces)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(*[st.floats(-1e6, 1e6, allow_nan=False)] * 3), min_size=3, max_size=12))
def test_obj_round_trip_property(tmp_path_factory, pts):
    V = np.array(pts)
    F = np.array([[0, i, i + 1] for i in range(1, len(pts) - 1)])
    path = export_mesh(SurfaceMesh(V, F), tmp_path_factory.mktemp("rt") / "m.obj")
    back = read_obj(path)
    assert np.array_equal(back.vertices, V)


def test_piece_round_trip_with_tags(build16, tmp_path):
    path = export_mesh(build16.piece, tmp_path / "p.obj")
    back = read_obj(path)
    assert np.array_equal(back.vertices, build16.piece.vertices)
    assert np.array_equal(back.lattice, build16.piece.lattice)
    assert [(t.cls, list(t.vertices)) for t in back.boundary_tags] == [
        (t.cls, list(t.vertices)) for t in build16.piece.boundary_tags
    ]


@pytest.mark.parametrize("copies, ratio", [((2, 1, 1), 2), ((1, 2, 1), 2), ((2, 2, 2), 8)])
def test_replication_counts(build16, copies, ratio):
    m = replicate(build16.piece, copies)
    assert m.vertices.shape[0] == ratio * build16.piece.vertices.shape[0]
    assert m.faces.shape[0] == ratio * build16.piece.faces.shape[0]
    assert len(m.boundary_tags) == ratio * 12


def test_replication_translates(build16):
    m = replicate(build16.piece, (2, 1, 1))
    n = build16.piece.vertices.shape[0]
    assert np.allclose(m.vertices[n:] - m.vertices[:n], build16.piece.lattice[0])


def test_ply_layout(build16, tmp_path):
    path = export_mesh(build16.piece, tmp_path / "p.ply", fmt="ply")
    lines = path.read_text().splitlines()
    end = lines.index("end_header")
    assert lines[0] == "ply" and lines[1] == "format ascii 1.0"
    nv = build16.piece.vertices.shape[0]
    assert f"element vertex {nv}" in lines
    assert "property int tag" in lines
    tags = {int(ln.split()[-1]) for ln in lines[end + 1 : end + 1 + nv]}
    assert tags == {0, 1, 2}
    assert lines[end + 1 + nv].startswith("3 ")


def test_export_io_error(build16, tmp_path):
    bad = tmp_path / "missing" / "p.obj"
    with pytest.raises(MeshIOError) as exc:
        export_mesh(build16.piece, bad)
    assert exc.value.path == bad


def test_export_rejects_bad_copies(build16, tmp_path):
    with pytest.raises(ValueError):
        export_mesh(build16.piece, tmp_path / "p.obj", copies=(0, 1, 1))
