import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from metaori import kresling as kr
from metaori.errors import (ClosureFailure, DegeneratePattern, InfeasibleFold,
                            InfeasibleHeight, InvalidParams)
from metaori.mesh import validate_mesh


def params(**kw):
    base = dict(a=25.0, b=20.0, theta=np.pi / 3, alpha=2.2, t_face=1.0, levels=1)
    base.update(kw)
    return kr.KreslingParams(**base)


# --- flat pattern -----------------------------------------------------------

def test_pattern_right_angle():
    pat = kr.build_flat_pattern(params(theta=np.pi / 2))
    assert pat.f1[2] == pytest.approx([0.0, 25.0])


def test_pattern_60_degrees():
    pat = kr.build_flat_pattern(params())
    assert pat.f1[2] == pytest.approx([12.5, 21.650635094610966])


def test_pattern_degenerate():
    with pytest.raises(DegeneratePattern):
        kr.KreslingParams(a=25, b=20, theta=0.0, alpha=2.0, t_face=1.0, levels=1)


def test_pattern_crease_assignment():
    pat = kr.build_flat_pattern(params())
    assert pat.crease_assignment["P0-P2"] == "mountain"
    assert pat.crease_assignment["P2-P4"] == "valley"
    labels = set(pat.crease_assignment.values())
    assert labels == {"mountain", "valley", "boundary"}


def test_thickness_must_be_below_shortest_edge():
    with pytest.raises(InvalidParams):
        params(t_face=30.0)


# --- folding ----------------------------------------------------------------

def test_fold_flat_identity():
    pat = kr.build_flat_pattern(params())
    unit = kr.fold_basic_unit(pat, np.pi, 1.0)
    assert np.max(np.abs(unit.vertices[:, 2])) == pytest.approx(0.0, abs=1e-12)
    assert unit.dihedral == pytest.approx(np.pi, abs=1e-9)


def test_fold_right_angle_dihedral():
    pat = kr.build_flat_pattern(params())
    unit = kr.fold_basic_unit(pat, np.pi / 2, 1.0)
    assert unit.dihedral == pytest.approx(np.pi / 2, abs=1e-9)


def test_fold_apex_height_matches_rotation_oracle():
    # frozen from an independent axis-angle computation (scipy Rotation):
    # P4 folded about the a-diagonal by pi/3 sits 15.0 mm out of the F1 plane
    pat = kr.build_flat_pattern(params())
    unit = kr.fold_basic_unit(pat, 2 * np.pi / 3, 1.0)
    v = unit.vertices
    n = np.cross(v[1] - v[0], v[2] - v[0])
    n /= np.linalg.norm(n)
    dist = abs((v[3] - v[0]) @ n)
    assert dist == pytest.approx(15.0, abs=1e-9)


def test_fold_preserves_edge_lengths():
    pat = kr.build_flat_pattern(params())
    p3 = np.column_stack([np.vstack([pat.f1, pat.f2[1]])[:, :2],
                          np.zeros(4)])  # P0 P1 P2 P4 flat
    flat = np.vstack([np.column_stack([pat.f1, np.zeros(3)]),
                      np.array([[*pat.f2[1], 0.0]])])
    unit = kr.fold_basic_unit(pat, 2.0, 1.0)
    for i in range(4):
        for j in range(i + 1, 4):
            if (i, j) == (1, 3):
                continue  # P1-P4 crosses the fold, not an edge
            d0 = np.linalg.norm(flat[i] - flat[j])
            d1 = np.linalg.norm(unit.vertices[i] - unit.vertices[j])
            assert d1 == pytest.approx(d0, rel=1e-9)


def test_fold_interpenetration_limit():
    pat = kr.build_flat_pattern(params())
    with pytest.raises(InfeasibleFold):
        kr.fold_basic_unit(pat, 0.02, t_face=4.0)


# --- mirroring ---------------------------------------------------------------

def test_mirror_is_isometry_and_flips_chirality():
    pat = kr.build_flat_pattern(params())
    unit = kr.fold_basic_unit(pat, 2.0, 1.0)
    lower, upper = kr.mirror_and_stack(unit)
    assert upper.chirality == "left"
    for i in range(4):
        for j in range(i + 1, 4):
            d0 = np.linalg.norm(lower.vertices[i] - lower.vertices[j])
            d1 = np.linalg.norm(upper.vertices[i] - upper.vertices[j])
            assert d1 == pytest.approx(d0, rel=1e-12)


def test_mirror_interface_vertices_coincide():
    pat = kr.build_flat_pattern(params())
    unit = kr.fold_basic_unit(pat, 2.0, 1.0)
    lower, upper = kr.mirror_and_stack(unit)
    # top edge vertices (P2, P4) lie in the mirror plane
    assert np.max(np.abs(lower.vertices[2] - upper.vertices[2])) < 1e-12
    assert np.max(np.abs(lower.vertices[3] - upper.vertices[3])) < 1e-12


# --- ring assembly -----------------------------------------------------------

def sixfold_residual(state):
    pts = state.rings.reshape(-1, 3)
    ang = 2 * np.pi / state.params.n
    rot = np.array([[np.cos(ang), -np.sin(ang), 0],
                    [np.sin(ang), np.cos(ang), 0], [0, 0, 1]])
    rotated = pts @ rot.T
    from scipy.spatial import cKDTree
    dd, _ = cKDTree(pts).query(rotated)
    return float(dd.max())


def test_assemble_sixfold_symmetry_and_alignment():
    p = kr.KreslingParams()
    state, faces, realized = kr.assemble_origami(p)
    assert sixfold_residual(state) <= 1e-6
    assert abs(state.net_twist()) <= 1e-9
    assert len(faces) == p.levels * 2 * p.n * 2
    assert 0.0 < realized < np.pi


def test_assemble_levels_one_alignment():
    p = params(levels=1)
    state, faces, _ = kr.assemble_origami(p)
    # top polygon twist relative to bottom is zero for a single mirrored pair
    assert abs(state.net_twist()) <= 1e-9
    top = state.rings[-1]
    bot = state.rings[0]
    assert np.max(np.abs(top[:, :2] - bot[:, :2])) <= 1e-9


def test_assemble_reports_realized_alpha():
    p = kr.KreslingParams()
    _, _, realized = kr.assemble_origami(p)
    assert realized == pytest.approx(p.alpha, abs=1e-5)


def test_closure_failure():
    # long shallow diagonals: |a^2 - c^2| exceeds what any twist can span
    with pytest.raises(ClosureFailure):
        kr.assemble_origami(params(a=30.0, b=10.0, theta=0.2, t_face=0.5))


def test_bar_lengths_at_rest_are_exact():
    p = kr.KreslingParams()
    H, phi, _ = kr.rest_state(p)
    la, lc = kr.bar_lengths(p.circumradius, p.n, H, phi)
    assert la == pytest.approx(p.a, rel=1e-9)
    assert lc == pytest.approx(p.c, rel=1e-9)


# --- kinematics ---------------------------------------------------------------

def test_kinematic_flat_state():
    p = kr.KreslingParams()
    st_ = kr.kinematic_state(p, [0.0] * p.levels)
    assert np.ptp(st_.rings[..., 2]) == pytest.approx(0.0, abs=1e-12)
    assert kr.cavity_volume_ml(st_) == pytest.approx(0.0, abs=1e-9)


def test_kinematic_stress_free_height():
    p = kr.KreslingParams()
    H, phi, _ = kr.rest_state(p)
    st_ = kr.kinematic_state(p, [2 * H] * p.levels)
    assert abs(st_.half_twists[0]) == pytest.approx(abs(phi), abs=1e-6)
    u = kr.half_energy(p, H, st_.half_twists[0], 1.0, 1.0)
    assert u == pytest.approx(0.0, abs=1e-12)


def test_kinematic_twist_matches_grid_search():
    p = kr.KreslingParams()
    rng = np.random.default_rng(42)
    lo, hi = kr.feasible_band(p)
    for H in rng.uniform(0.3 * hi, 0.95 * hi, size=4):
        phi, _ = kr.min_twist(p, H)
        grid = np.linspace(0.0, np.pi, 31416)
        vals = kr.half_energy(p, H, grid, 1.0, 1.0) if np.ndim(
            kr.half_energy(p, H, 0.1, 1.0, 1.0)) else \
            np.array([kr.half_energy(p, H, g, 1.0, 1.0) for g in grid])
        best = grid[int(np.argmin(vals))]
        assert abs(abs(phi) - best) <= 1e-4


def test_kinematic_infeasible_height():
    p = kr.KreslingParams()
    with pytest.raises(InfeasibleHeight):
        kr.min_twist(p, min(p.a, p.c) + 1.0)


def test_feasible_band_is_single_interval():
    p = kr.KreslingParams()
    lo, hi = kr.feasible_band(p)
    ok = []
    for H in np.linspace(lo, hi + 2.0, 60):
        try:
            kr.min_twist(p, H)
            ok.append(True)
        except InfeasibleHeight:
            ok.append(False)
    flips = sum(1 for a, b in zip(ok, ok[1:]) if a != b)
    assert flips <= 1


# --- solidification ------------------------------------------------------------

def test_thicken_single_triangle_is_prism():
    verts = np.array([[0.0, 0.0, 0.0], [10.0, 0.0, 0.0], [0.0, 10.0, 0.0]])
    solid = kr.thicken_faces(verts, np.array([[0, 1, 2]]), 1.0)
    assert solid.cavity_mesh is None
    assert solid.outer_mesh.n_triangles == 8
    rep = validate_mesh(solid.outer_mesh)
    assert rep.closed_manifold and rep.winding_consistent
    assert rep.signed_volume_mm3 == pytest.approx(50.0, rel=1e-9)


def test_solidify_nesting_and_validity(paper):
    state, faces, _ = kr.assemble_origami(paper.kresling)
    solid = kr.solidify(state)
    rep_o = validate_mesh(solid.outer_mesh)
    rep_c = validate_mesh(solid.cavity_mesh)
    assert rep_o.ok and rep_c.ok
    assert rep_o.signed_volume_mm3 > rep_c.signed_volume_mm3 > 0


def test_determinism_bit_identical():
    p = kr.KreslingParams()
    s1, f1, _ = kr.assemble_origami(p)
    s2, f2, _ = kr.assemble_origami(p)
    assert np.array_equal(s1.rings, s2.rings)
    m1 = kr.solidify(s1).outer_mesh
    m2 = kr.solidify(s2).outer_mesh
    assert np.array_equal(m1.vertices, m2.vertices)
    assert np.array_equal(m1.triangles, m2.triangles)


# --- isometry property ----------------------------------------------------------

@settings(max_examples=20, deadline=None)
@given(st.floats(10.0, 30.0), st.floats(8.0, 25.0), st.floats(0.6, 2.2))
def test_fold_isometry_property(a, b, theta):
    try:
        p = kr.KreslingParams(a=a, b=b, theta=theta, alpha=2.0, t_face=0.3,
                              levels=1)
    except InvalidParams:
        return
    pat = kr.build_flat_pattern(p)
    unit = kr.fold_basic_unit(pat, 2.0, 0.3)
    flat = np.vstack([np.column_stack([pat.f1, np.zeros(3)]),
                      np.array([[*pat.f2[1], 0.0]])])
    for (i, j) in ((0, 1), (0, 2), (1, 2), (0, 3), (2, 3)):
        d0 = np.linalg.norm(flat[i] - flat[j])
        d1 = np.linalg.norm(unit.vertices[i] - unit.vertices[j])
        assert abs(d1 - d0) <= 1e-9 * max(1.0, d0)
