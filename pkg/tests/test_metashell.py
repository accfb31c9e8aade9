import numpy as np
import pytest

from metaori import metashell as ms
from metaori.errors import GeometryConflict, OutOfDomain, WrapFailure
from metaori.mesh import validate_mesh

PAPER_PF = 0.925647835432707


def test_beam_profile_values():
    assert ms.beam_profile(0.0, 9.40, 22.50) == pytest.approx(0.0, abs=1e-12)
    assert ms.beam_profile(-11.25, 9.40, 22.50) == pytest.approx(9.40)
    assert ms.beam_profile(-5.625, 9.40, 22.50) == pytest.approx(4.70)


def test_beam_profile_domain():
    with pytest.raises(OutOfDomain):
        ms.beam_profile(1.0, 9.4, 22.5)
    with pytest.raises(OutOfDomain):
        ms.beam_profile(-12.0, 9.4, 22.5)


def test_cell_pitch_from_paper_dims():
    out = ms.build_unit_cell_outline(ms.MetashellParams())
    assert out.pitch == pytest.approx(35.00)
    assert not out.zero_clearance


def test_zero_clearance_flagged():
    out = ms.build_unit_cell_outline(ms.MetashellParams(delta=0.0))
    assert out.zero_clearance
    assert out.polygon.area > 0


def test_thickness_conflict():
    with pytest.raises(GeometryConflict):
        ms.MetashellParams(t=9.4, h=9.4)


def test_excess_clearance_conflict():
    with pytest.raises(GeometryConflict):
        ms.MetashellParams(delta=10.0)


def test_fillet_overlap_conflict():
    with pytest.raises(GeometryConflict):
        ms.MetashellParams(r=12.0)


def test_paper_preset_heights():
    p = ms.MetashellParams()
    assert p.open_height == pytest.approx(42.50)
    assert p.row_height == pytest.approx(17.50)
    assert p.closed_height < p.open_height


def test_paper_preset_diameters():
    p = ms.MetashellParams(pitch_factor=PAPER_PF)
    assert 2 * p.outer_radius == pytest.approx(46.25, rel=0.03)
    assert 2 * p.inner_radius == pytest.approx(36.25, rel=0.03)


def test_assembled_shell_watertight(paper):
    solid = ms.assemble_metashell(paper.metashell)
    rep = validate_mesh(solid.mesh, check_self_intersections=False)
    assert rep.closed_manifold and rep.winding_consistent
    assert rep.signed_volume_mm3 > 0
    assert rep.n_components == 1
    windows = ms.expected_window_count(paper.metashell)
    assert rep.euler_characteristic == 2 - 2 * (windows + 1)


def test_two_rows_stack_and_validate():
    p = ms.MetashellParams(rows=2, infill_per_row=(0.99, 0.60))
    assert p.open_height == pytest.approx(42.50 + 17.50)
    solid = ms.assemble_metashell(p)
    rep = validate_mesh(solid.mesh, check_self_intersections=False)
    assert rep.closed_manifold and rep.winding_consistent
    assert rep.euler_characteristic == 2 - 2 * (ms.expected_window_count(p) + 1)


def test_cyclic_symmetry():
    p = ms.MetashellParams()
    mesh = ms.assemble_metashell(p).mesh
    ang = 2 * np.pi / p.cols
    rot = np.array([[np.cos(ang), -np.sin(ang), 0],
                    [np.sin(ang), np.cos(ang), 0], [0, 0, 1]])
    from scipy.spatial import cKDTree
    dd, _ = cKDTree(mesh.vertices).query(mesh.vertices @ rot.T)
    assert dd.max() <= 1e-6


def test_cell_mirror_symmetry():
    import shapely.affinity
    p = ms.MetashellParams()
    out = ms.build_unit_cell_outline(p)
    m = shapely.affinity.scale(out.polygon, xfact=-1.0, yfact=1.0,
                               origin=(p.pitch / 2.0, 0.0))
    sym_diff = m.symmetric_difference(out.polygon)
    assert sym_diff.area <= 1e-6 * out.polygon.area


def test_wrapped_arc_is_isometric_without_compression():
    p = ms.MetashellParams(pitch_factor=1.0)
    # mid-surface arc of one cell pitch = angle * R_mid
    arc = (2 * np.pi / p.cols) * p.mid_radius
    assert arc == pytest.approx(p.pitch, abs=1e-6)


def test_wrap_failure_on_thick_shell():
    with pytest.raises(WrapFailure):
        p = ms.MetashellParams(cols=2, depth=25.0)
        ms.assemble_metashell(p)


def test_determinism_bit_identical():
    p = ms.MetashellParams()
    m1 = ms.assemble_metashell(p).mesh
    m2 = ms.assemble_metashell(p).mesh
    assert np.array_equal(m1.vertices, m2.vertices)
    assert np.array_equal(m1.triangles, m2.triangles)
