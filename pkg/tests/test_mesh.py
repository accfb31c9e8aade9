import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from metaori import mesh as msh
from metaori.errors import EmptyMesh, OpenCavity, ParseError, TruncatedFile


def test_cube_validates():
    cube = msh.make_box()
    rep = msh.validate_mesh(cube)
    assert rep.closed_manifold
    assert rep.winding_consistent
    assert rep.signed_volume_mm3 == pytest.approx(1.0, abs=1e-12)
    assert rep.euler_characteristic == 2
    assert rep.self_intersections == 0
    assert rep.degenerate_triangles == 0


def test_cube_missing_triangle_has_boundary():
    cube = msh.make_box()
    broken = msh.TriMesh(cube.vertices, cube.triangles[:-1])
    rep = msh.validate_mesh(broken, check_self_intersections=False)
    assert not rep.closed_manifold
    assert rep.boundary_edges == 3


def test_hex_prism_volume():
    poly = msh.regular_polygon(6, 20.0)
    prism = msh.make_prism(poly, 0.0, 10.0)
    rep = msh.validate_mesh(prism)
    assert rep.closed_manifold and rep.winding_consistent
    expected = 1.5 * np.sqrt(3.0) * 400.0 * 10.0   # 10392.304845413263
    assert rep.signed_volume_mm3 == pytest.approx(expected, rel=1e-6)


def test_self_intersection_detected():
    cube = msh.make_box()
    # a free-floating triangle stabbing through the cube
    extra = np.array([[-0.5, 0.5, 0.5], [1.5, 0.4, 0.5], [1.5, 0.7, 0.5]])
    verts = np.vstack([cube.vertices, extra])
    tris = np.vstack([cube.triangles, [[8, 9, 10]]])
    # make it a (degenerately bounded) soup: the validator still reports
    rep = msh.validate_mesh(msh.TriMesh(verts, tris))
    assert rep.self_intersections >= 2


def test_stl_export_size_and_roundtrip():
    cube = msh.make_box()
    blob = msh.export_mesh(cube, "stl-binary")
    assert len(blob) == 80 + 4 + 12 * 50 == 684
    back = msh.read_mesh(blob, "stl-binary")
    assert back.n_triangles == 12
    assert back.signed_volume() == pytest.approx(1.0, abs=1e-9)
    blob2 = msh.export_mesh(back, "stl-binary")
    assert blob == blob2


def test_stl_truncated():
    blob = msh.export_mesh(msh.make_box(), "stl-binary")
    with pytest.raises(TruncatedFile):
        msh.read_mesh(blob[:-10], "stl-binary")
    with pytest.raises(TruncatedFile):
        msh.read_mesh(blob[:50], "stl-binary")


def test_empty_mesh_export():
    empty = msh.TriMesh(np.zeros((0, 3)), np.zeros((0, 3), dtype=int))
    with pytest.raises(EmptyMesh):
        msh.export_mesh(empty, "stl-binary")


def test_obj_roundtrip_bit_exact():
    cube = msh.make_box(size=(1.37, 2.41, 0.93), origin=(-0.2, 0.1, 7.3))
    blob = msh.export_mesh(cube, "obj-ascii")
    back = msh.read_mesh(blob, "obj-ascii")
    # %.17g text keeps doubles exact, welding restores the index structure
    assert np.array_equal(np.sort(back.vertices, axis=0),
                          np.sort(cube.vertices, axis=0))
    assert back.triangle_corners().sum() == pytest.approx(
        cube.triangle_corners().sum(), abs=0.0)


def test_obj_bad_index_names_line():
    text = b"v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n"
    with pytest.raises(ParseError) as ei:
        msh.read_mesh(text, "obj-ascii")
    assert ei.value.line == 4


def test_obj_bad_vertex_line():
    with pytest.raises(ParseError):
        msh.read_mesh(b"v 0 0\nf 1 1 1\n", "obj-ascii")


def test_enclosed_volume_requires_closed():
    cube = msh.make_box()
    with pytest.raises(OpenCavity):
        msh.enclosed_volume_ml(cube.vertices, cube.triangles[:-1])
    assert msh.enclosed_volume_ml(cube.vertices, cube.triangles) == \
        pytest.approx(0.001)


def test_weld_first_occurrence_wins():
    pts = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [5e-8, 0.0, 0.0]])
    verts, imap = msh.weld_vertices(pts)
    assert len(verts) == 2
    assert imap[2] == imap[0]
    assert np.array_equal(verts[0], pts[0])


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.floats(-50, 50), st.floats(-50, 50),
                          st.floats(0.1, 40)), min_size=1, max_size=4),
       st.floats(0.1, 30))
def test_stl_roundtrip_random_boxes(origins, size):
    meshes = [msh.make_box(size=(size, size, size), origin=(3 * size * i, o[1], o[2]))
              for i, o in enumerate(origins)]
    merged = msh.merge_meshes(*meshes)
    blob = msh.export_mesh(merged, "stl-binary", validate=False)
    back = msh.read_mesh(blob)
    blob2 = msh.export_mesh(back, "stl-binary", validate=False)
    assert blob == blob2


def test_export_rejects_invalid_mesh():
    from metaori.errors import InvalidMesh
    cube = msh.make_box()
    broken = msh.TriMesh(cube.vertices, cube.triangles[:-1])
    with pytest.raises(InvalidMesh):
        msh.export_mesh(broken, "stl-binary")
