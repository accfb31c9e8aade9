import numpy as np
import pytest

from metaori import mesh as msh
from metaori.errors import FitError
from metaori.integrate import IntegrationParams, component_solids, integrate
from metaori.kresling import KreslingParams
from metaori.metashell import MetashellParams, expected_window_count


def test_paper_assembly_valid(paper_assembly, paper):
    rep = paper_assembly.report
    assert rep.closed_manifold and rep.winding_consistent
    assert rep.signed_volume_mm3 > 0
    assert rep.degenerate_triangles == 0
    assert rep.self_intersections <= 10
    assert rep.n_components == 1
    windows = expected_window_count(paper.metashell)
    assert rep.euler_characteristic == 2 - 2 * windows


def test_paper_assembly_cavity_positive(paper_assembly, paper):
    # sealed variant separates the cavity as its own closed shell
    sealed = integrate(paper.metashell, paper.kresling,
                       IntegrationParams(port_diameter=0.0), validate=False)
    assert not sealed.inflatable
    comps = msh.connected_components(sealed.mesh)
    assert len(comps) == 2
    cavity = min(comps, key=lambda c: c.n_triangles)
    rep = msh.validate_mesh(cavity, check_self_intersections=False)
    assert rep.euler_characteristic == 2
    assert abs(rep.signed_volume_mm3) > 0


def test_fit_error_wide_origami(paper):
    wide = KreslingParams(a=15.0, b=19.0, theta=1.1, t_face=1.2, levels=2)
    with pytest.raises(FitError):
        integrate(paper.metashell, wide, paper.integration)


def test_fit_error_tall_origami(paper):
    tall = KreslingParams(levels=3)   # 6 halves x 10.6 >> 42.5
    with pytest.raises(FitError):
        integrate(paper.metashell, tall, paper.integration)


def test_volume_additivity(paper, paper_assembly):
    parts = component_solids(paper.metashell, paper.kresling, paper.integration)
    total = 0.0
    for mesh in parts.values():
        rep = msh.validate_mesh(mesh, check_self_intersections=False)
        assert rep.closed_manifold and rep.winding_consistent
        total += rep.signed_volume_mm3
    merged = paper_assembly.mesh.signed_volume()
    assert merged == pytest.approx(total, rel=1e-3)


def test_assembly_exports_and_roundtrips(paper_assembly):
    blob = msh.export_mesh(paper_assembly.mesh, "stl-binary")
    back = msh.read_mesh(blob, "stl-binary")
    blob2 = msh.export_mesh(back, "stl-binary", validate=False)
    assert blob == blob2
    assert back.n_triangles == paper_assembly.mesh.n_triangles


def test_assembly_heights(paper_assembly, paper):
    h = paper_assembly.heights
    assert h["shell"] == pytest.approx(42.5)
    assert h["assembly"] == pytest.approx(42.5 + 2 * paper.integration.lid_thickness)
    assert h["origami_rest"] == pytest.approx(42.5, abs=1e-6)
