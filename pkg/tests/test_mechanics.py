import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import trapezoid

from metaori import kresling as kr
from metaori import mechanics as mech
from metaori import mesh as msh
from metaori.errors import (DomainMismatch, ModelDomain, NotBistable,
                            OutOfDomain)
from metaori.metashell import MetashellParams


# --- metashell force-displacement ------------------------------------------

def test_paper_Q():
    assert MetashellParams().Q == pytest.approx(7.52)


def test_paper_fd_has_three_zero_crossings(paper_meta_fd):
    fd = paper_meta_fd
    signs = np.sign(fd.F)
    crossings = 1 if abs(fd.F[0]) < 1e-9 else 0   # the start
    for i in range(1, len(fd.F) - 1):
        if signs[i] != 0 and signs[i + 1] != 0 and signs[i] != signs[i + 1]:
            crossings += 1
    assert crossings == 3
    stable = mech.stable_zero_crossings(fd)
    assert len(stable) == 2
    assert stable[1] == pytest.approx(mech.second_stable_displacement(
        MetashellParams()), abs=1e-2)


def test_fd_linear_in_modulus(paper):
    p = paper.metashell
    f1 = mech.metashell_fd(p, mech.MaterialParams(E=12.0))
    f2 = mech.metashell_fd(p, mech.MaterialParams(E=24.0))
    assert np.allclose(f2.F, 2.0 * f1.F, rtol=1e-12)
    z1 = mech.stable_zero_crossings(f1)
    z2 = mech.stable_zero_crossings(f2)
    assert z1 == pytest.approx(z2)


def test_shallow_beam_monotonic():
    p = MetashellParams(h=1.26, t=1.25, delta=0.2, r=0.5, block_margin=1.0)
    fd = mech.metashell_fd(p, mech.MaterialParams())
    assert np.all(np.diff(fd.F) > 0)
    assert not mech.is_bistable(p)
    with pytest.raises(ModelDomain):
        mech.metashell_fd(p, mech.MaterialParams(), assert_bistable=True)


def test_fd_continuity(paper_meta_fd):
    fd = paper_meta_fd
    jumps = np.abs(np.diff(fd.F))
    step = fd.d[1] - fd.d[0]
    secant = np.maximum.reduce([jumps, np.roll(jumps, 1), np.roll(jumps, -1)])
    assert np.all(jumps <= 5.0 * np.maximum(secant, 1e-9) + 1e-9)


# --- elastica oracle ----------------------------------------------------------

def test_oracle_zero_at_rest(paper):
    F = mech.elastica_oracle(paper.metashell, paper.material, 0.0)
    assert abs(F) < 1e-6


def test_oracle_near_zero_at_mirror_state(paper, paper_meta_fd):
    peak = float(np.max(np.abs(paper_meta_fd.F)))
    F = mech.elastica_oracle(paper.metashell, paper.material,
                             2.0 * paper.metashell.h)
    assert abs(F) < 0.02 * peak


def test_oracle_sign_agreement_50_samples(paper, paper_meta_fd):
    p = paper.metashell
    d2 = mech.second_stable_displacement(p)
    d_s = np.linspace(0.0, d2, 50)
    F_or = mech.elastica_oracle(p, paper.material, d_s)
    F_rom = paper_meta_fd.interp(d_s)
    peak = float(np.max(np.abs(F_rom)))
    floor = 0.02 * peak
    both = (np.abs(F_or) > floor) & (np.abs(F_rom) > floor)
    assert both.sum() >= 40
    assert np.all(np.sign(F_or[both]) == np.sign(F_rom[both]))
    rms = float(np.sqrt(np.mean((F_or - F_rom) ** 2)))
    assert rms <= 0.10 * peak


def test_oracle_requires_200_segments(paper):
    with pytest.raises(ModelDomain):
        mech.ElasticaOracle(paper.metashell, paper.material, n_segments=100)


# --- origami force-displacement -------------------------------------------------

def test_origami_zero_force_at_rest(paper):
    ori = mech.origami_fd(paper.kresling, paper.material, n_samples=31,
                          d_max=10.0)
    assert abs(ori.F[0]) < 1e-6


def test_origami_monotonic_and_softer_than_shell(paper, paper_meta_fd):
    ori = mech.origami_fd(paper.kresling, paper.material, n_samples=61,
                          d_max=float(paper_meta_fd.d[-1]))
    slope_ori = np.max(np.abs(np.gradient(ori.F, ori.d)))
    slope_meta = np.max(np.abs(np.gradient(paper_meta_fd.F, paper_meta_fd.d)))
    assert np.all(np.diff(ori.F) > -1e-9)
    assert slope_ori < slope_meta


def test_origami_linear_in_bar_stiffness(paper):
    m1 = mech.MaterialParams(bar_area=0.72)
    m2 = mech.MaterialParams(bar_area=1.44)
    f1 = mech.origami_fd(paper.kresling, m1, n_samples=21, d_max=8.0)
    f2 = mech.origami_fd(paper.kresling, m2, n_samples=21, d_max=8.0)
    assert np.allclose(f2.F, 2.0 * f1.F, rtol=1e-6, atol=1e-9)


def test_origami_energy_force_consistency(paper):
    kp, mat = paper.kresling, paper.material
    ori = mech.origami_fd(kp, mat, n_samples=201, d_max=18.0)
    H_rest = mech.origami_rest_height(kp)
    a_i, b_i = 20, 180
    integral = trapezoid(ori.F[a_i:b_i + 1], ori.d[a_i:b_i + 1])
    dU = (mech.origami_energy(kp, mat, H_rest - ori.d[b_i])
          - mech.origami_energy(kp, mat, H_rest - ori.d[a_i]))
    assert integral == pytest.approx(dU, rel=0.01)


def test_energy_derivative_second_order(paper):
    kp, mat = paper.kresling, paper.material
    H0 = mech.origami_rest_height(kp) - 7.0

    def diff(step):
        return (mech.origami_energy(kp, mat, H0 + step)
                - mech.origami_energy(kp, mat, H0 - step)) / (2 * step)

    d1, d2, d3 = diff(0.2), diff(0.1), diff(0.05)
    order = np.log2(abs(d1 - d2) / abs(d2 - d3))
    assert 1.8 <= order <= 2.2


# --- superposition ---------------------------------------------------------------

def test_combined_with_zero_origami(paper_meta_fd):
    zero = mech.FDCurve(d=paper_meta_fd.d.copy(), F=np.zeros_like(paper_meta_fd.F),
                        role="F_ori")
    comb = mech.combined_fd(paper_meta_fd, zero)
    assert np.array_equal(comb.F, paper_meta_fd.F)


def test_combined_is_exact_pointwise_sum(paper_eval):
    meta, ori, comb = (paper_eval["fd_meta"], paper_eval["fd_ori"],
                       paper_eval["fd_combined"])
    expected = meta.interp(comb.d) + ori.interp(comb.d)
    assert np.array_equal(comb.F, expected)


def test_combined_remains_nonmonotonic(paper_eval):
    F = paper_eval["fd_combined"].F
    assert np.any(np.diff(F) < 0)
    assert F.min() < 0


def test_sum_of_increasing_is_increasing():
    d = np.linspace(0, 5, 50)
    a = mech.FDCurve(d=d, F=2 * d + 1, role="F_meta")
    b = mech.FDCurve(d=d, F=d ** 2, role="F_ori")
    comb = mech.combined_fd(a, b)
    assert np.all(np.diff(comb.F) > 0)


def test_combined_domain_mismatch():
    a = mech.FDCurve(d=np.linspace(0, 1, 5), F=np.zeros(5))
    b = mech.FDCurve(d=np.linspace(5, 6, 5), F=np.zeros(5))
    with pytest.raises(DomainMismatch):
        mech.combined_fd(a, b)


# --- cavity volume ----------------------------------------------------------------

def test_cavity_volume_flat_zero(paper):
    state = kr.kinematic_state(paper.kresling, [0.0] * paper.kresling.levels)
    assert mech.cavity_volume(state) == pytest.approx(0.0, abs=1e-9)


def test_cavity_volume_hex_prism():
    poly = msh.regular_polygon(6, 20.0)
    prism = msh.make_prism(poly, 0.0, 10.0)
    assert mech.cavity_volume(prism) == pytest.approx(10.392304845413264,
                                                      rel=1e-9)


def test_cavity_volume_unit_cube():
    assert mech.cavity_volume(msh.make_box()) == pytest.approx(0.001)


# --- pressure-volume ------------------------------------------------------------

def test_pv_zero_force_gives_zero_pressure(paper):
    H = np.linspace(30.0, 42.0, 20)
    V = np.linspace(10.0, 20.0, 20)
    zero = mech.FDCurve(d=np.linspace(0, 15, 10), F=np.zeros(10), role="F_el")
    pv = mech.pv_curve(zero, 42.0, H, V)
    assert np.allclose(pv.P, 0.0)


def test_pv_paper_negative_region_and_peak(paper_eval):
    pv = paper_eval["pv"]
    assert np.any(pv.P < -1e-6)
    assert 50.0 <= float(np.max(pv.P)) <= 450.0


def test_pv_degenerate_volume_map():
    H = np.linspace(0, 1, 10)
    V = np.full(10, 5.0)
    f = mech.FDCurve(d=np.linspace(0, 1, 10), F=np.ones(10))
    with pytest.raises(mech.DegenerateVolumeMap):
        mech.pv_curve(f, 1.0, H, V)


# --- event detection -------------------------------------------------------------

def test_events_monotone_curve_empty():
    d = np.linspace(0, 1, 30)
    c = mech.FDCurve(d=d, F=d * 2.0)
    assert mech.detect_events(c) == []
    assert not mech.is_bistable_curve(c)


def test_events_cubic_extrema():
    V = np.linspace(0, 4, 4001)
    P = (V - 1) * (V - 2) * (V - 3)
    pv = mech.PVCurve(V=V, P=P)
    evs = mech.detect_events(pv)
    assert len(evs) == 2
    xs = sorted(ev.x for ev in evs)
    assert xs[0] == pytest.approx(2 - 1 / np.sqrt(3), abs=2e-3)
    assert xs[1] == pytest.approx(2 + 1 / np.sqrt(3), abs=2e-3)
    assert mech.is_bistable_curve(pv)


def test_events_paper_pv(paper_eval):
    evs = paper_eval["pv"].events
    kinds = {e.kind for e in evs}
    assert "pressure_max" in kinds and "pressure_min" in kinds


# --- sequencing --------------------------------------------------------------------

def _first_positive_peak(res, segment):
    evs = [e for e in res.events
           if e.branch == "inflation" and e.kind == "pressure_max"
           and e.segment == segment and e.y > 0]
    assert evs, f"no positive inflation peak for segment {segment}"
    return min(evs, key=lambda e: e.x)


def test_sequence_soft_segment_snaps_first(biseg_sequence):
    soft = _first_positive_peak(biseg_sequence, 1)   # 0.60 infill (top)
    stiff = _first_positive_peak(biseg_sequence, 0)  # 0.99 infill (bottom)
    assert soft.y < stiff.y
    assert soft.x < stiff.x


def test_sequence_swap_reverses_order(biseg):
    segs = [biseg.segments[1], biseg.segments[0]]
    res = mech.simulate_sequence(segs, biseg.material, n_steps=300)
    soft = _first_positive_peak(res, 0)
    stiff = _first_positive_peak(res, 1)
    assert soft.y < stiff.y and soft.x < stiff.x


def test_sequence_identical_segments_simultaneous(biseg):
    segs = [biseg.segments[0], biseg.segments[0]]
    res = mech.simulate_sequence(segs, biseg.material, n_steps=200)
    e0 = _first_positive_peak(res, 0)
    e1 = _first_positive_peak(res, 1)
    dV = res.V[1] - res.V[0]
    assert abs(e0.x - e1.x) <= dV + 1e-12
    assert np.max(np.abs(res.H[:, 0] - res.H[:, 1])) < 1e-6


@settings(max_examples=6, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.05, 0.95))
def test_snap_pressure_monotone_in_infill(paper, s1, s2):
    if abs(s1 - s2) < 0.05:
        return
    lo, hi = sorted((s1, s2))
    mat = paper.material
    scale_lo = mech.force_scale(paper.metashell, mat, lo)
    scale_hi = mech.force_scale(paper.metashell, mat, hi)
    # snap force (and with a shared transmitter the snap pressure) scales with s
    assert scale_lo < scale_hi


# --- elongation --------------------------------------------------------------------

def test_elongation_within_paper_band(paper):
    e = mech.predict_elongation(paper.metashell, paper.material,
                                paper.integration.lid_thickness)
    assert 28.0 <= e <= 58.0


def test_elongation_not_bistable():
    p = MetashellParams(h=1.26, t=1.25, delta=0.2, r=0.5, block_margin=1.0)
    with pytest.raises(NotBistable):
        mech.predict_elongation(p)


def test_elongation_decreases_with_wall_height(paper):
    base = mech.predict_elongation(paper.metashell)
    taller = MetashellParams(**{**paper.metashell.__dict__,
                                "wall_height": 25.0})
    assert mech.predict_elongation(taller) < base


# --- truss reduction ------------------------------------------------------------

def test_truss_model_invariants(paper):
    truss = mech.build_truss(paper.kresling, paper.material,
                             [10.0] * paper.kresling.levels)
    assert truss.bars.min() >= 0
    assert truss.bars.max() < len(truss.nodes)
    assert np.all(truss.stiffness > 0)
    assert np.all(truss.rest_lengths > 0)
    # facet set closes the cavity for volume purposes
    from metaori.mesh import TriMesh, _edge_incidence
    inc = _edge_incidence(TriMesh(truss.nodes, truss.facets))
    assert all(len(v) == 2 for v in inc.values())
