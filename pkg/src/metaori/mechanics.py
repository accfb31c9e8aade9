"""Reduced-order quasi-static mechanics of the Meta-Ori actuator.

Force-displacement curves use d = axial compression from the open (printed)
state in mm and F = compressive holding force in N. Pressure-volume curves
report mL and mbar (1 N/mm^2 = 1e4 mbar).

The metashell beam model is the classical shallow clamped-clamped cosine-beam
reduction: a cubic single-mode branch coupled to the axial force, capped by
the constant-load branch of the next symmetric buckling mode wherever the
axial compression would exceed that mode's critical load. The antisymmetric
mode is suppressed by the paired-beam cell, so the relevant cap is mode 3.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.interpolate import CubicSpline
from scipy.linalg import eigh
from scipy.optimize import brentq

from .errors import (DegenerateVolumeMap, DomainMismatch, InfeasibleHeight,
                     ModelDomain, NoConvergence, NoEquilibrium, NotBistable)
from .kresling import (KreslingParams, cavity_facets, kinematic_state,
                       feasible_band, min_twist, rest_state)
from .mesh import enclosed_volume_ml
from .metashell import MetashellParams

PI4 = math.pi ** 4
MBAR_PER_MPA = 1.0e4
Q_BISTABLE = 4.0 / math.sqrt(3.0)   # rise/thickness threshold for bistability


@dataclass
class MaterialParams:
    """Material and calibration constants."""

    E: float = 12.0          # elastic modulus, MPa (TPU default; documented, not measured)
    s_min: float = 0.3       # infill-to-stiffness map intercept
    bar_area: float | None = None   # origami bar cross-section, mm^2; None = t_face*b/2
    hinge_k: float = 0.0     # crease rotational spring, N*mm/rad per crease

    def __post_init__(self):
        if not (self.E > 0):
            raise ModelDomain("E must be > 0")
        if not (0.0 < self.s_min <= 1.0):
            raise ModelDomain("s_min must be in (0, 1]")

    def stiffness_scale(self, infill: float) -> float:
        """s(infill) = s_min + (1 - s_min) * infill, monotone in (0, 1]."""
        return self.s_min + (1.0 - self.s_min) * infill


@dataclass
class Event:
    """Snap event: a strict local extremum of the controlled response."""

    kind: str        # 'pressure_max' | 'pressure_min' | 'force_max' | 'force_min'
    branch: str      # 'inflation' | 'deflation' | '-'
    x: float
    y: float
    segment: int = -1

    def record(self) -> str:
        seg = f" segment={self.segment}" if self.segment >= 0 else ""
        return f"{self.kind} branch={self.branch} x={self.x:.9g} y={self.y:.9g}{seg}"


@dataclass
class FDCurve:
    d: np.ndarray
    F: np.ndarray
    role: str = "F_el"

    def __post_init__(self):
        self.d = np.asarray(self.d, dtype=np.float64)
        self.F = np.asarray(self.F, dtype=np.float64)
        if np.any(np.diff(self.d) <= 0):
            raise DomainMismatch("displacement samples must be strictly increasing")

    def interp(self, d):
        return np.interp(d, self.d, self.F)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("d_mm,F_N\n")
        for d, f in zip(self.d, self.F):
            buf.write(f"{d:.9g},{f:.9g}\n")
        return buf.getvalue()


@dataclass
class PVCurve:
    V: np.ndarray                 # mL, strictly increasing along the sweep
    P: np.ndarray                 # mbar
    H: np.ndarray = None          # mm, parametric bookkeeping
    events: list = field(default_factory=list)

    def __post_init__(self):
        self.V = np.asarray(self.V, dtype=np.float64)
        self.P = np.asarray(self.P, dtype=np.float64)
        if self.H is not None:
            self.H = np.asarray(self.H, dtype=np.float64)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("V_mL,P_mbar\n")
        for v, p in zip(self.V, self.P):
            buf.write(f"{v:.9g},{p:.9g}\n")
        return buf.getvalue()


# ---------------------------------------------------------------------------
# metashell force-displacement (analytical beam reduction)
# ---------------------------------------------------------------------------

def beam_fd_normalized(delta: np.ndarray, Q: float) -> np.ndarray:
    """Normalized force F*l^3/(EIh) at normalized displacement delta = d/h.

    Single-mode branch: 2 pi^4 D + (3 pi^4 Q^2 / 2) D (1-D) (2-D).
    Where the implied axial load reaches the third-mode critical value
    (|1 - D| <= 2 sqrt(disc), disc = 1/4 - 4/(3 Q^2)), the response rides the
    constant-load branch pi^4 (8 - 6 D).
    """
    delta = np.asarray(delta, dtype=np.float64)
    cubic = 2.0 * PI4 * delta + 1.5 * PI4 * Q * Q * delta * (1.0 - delta) * (2.0 - delta)
    disc = 0.25 - 4.0 / (3.0 * Q * Q)
    if disc <= 0.0:
        return cubic
    half_width = 2.0 * math.sqrt(disc)
    line = PI4 * (8.0 - 6.0 * delta)
    on_line = np.abs(1.0 - delta) <= half_width
    return np.where(on_line, line, cubic)


def beam_unit_force(params: MetashellParams, mat: MaterialParams) -> float:
    """Dimensional force scale EIh/l^3 of one beam, N."""
    I = params.depth * params.t ** 3 / 12.0
    return mat.E * I * params.h / params.l ** 3


def force_scale(params: MetashellParams, mat: MaterialParams, infill: float) -> float:
    """2 beams/cell x cols cells in parallel x stiffness scale."""
    return 2.0 * params.cols * mat.stiffness_scale(infill) * beam_unit_force(params, mat)


def metashell_fd(params: MetashellParams, mat: MaterialParams,
                 n_samples: int = 801, d_max: float | None = None,
                 assert_bistable: bool = False, row: int = 0) -> FDCurve:
    """Force-displacement of one shell row under axial compression."""
    Q = params.Q
    if assert_bistable and Q <= Q_BISTABLE:
        raise ModelDomain(
            f"Q = h/t = {Q:.3f} below the bistability threshold {Q_BISTABLE:.3f}")
    if d_max is None:
        d_max = 2.0 * params.h
    d = np.linspace(0.0, d_max, n_samples)
    scale = force_scale(params, mat, params.infill_per_row[row])
    F = scale * beam_fd_normalized(d / params.h, Q)
    return FDCurve(d=d, F=F, role="F_meta")


def is_bistable(params: MetashellParams) -> bool:
    return params.Q > Q_BISTABLE


def second_stable_displacement(params: MetashellParams) -> float:
    """Displacement of the second zero-force stable state (analytic root)."""
    disc = 0.25 - 4.0 / (3.0 * params.Q ** 2)
    if disc <= 0.0:
        raise NotBistable(f"Q = {params.Q:.3f} <= {Q_BISTABLE:.3f}")
    return (1.5 + math.sqrt(disc)) * params.h


def stable_zero_crossings(curve: FDCurve, floor: float = 1e-9) -> list[float]:
    """Displacements where F crosses zero with positive slope (plus d = 0 if
    the curve starts at zero and rises)."""
    d, F = curve.d, curve.F
    out = []
    if abs(F[0]) <= floor and F[1] > F[0]:
        out.append(float(d[0]))
    s = np.sign(F)
    for i in range(len(d) - 1):
        if s[i] < 0 and s[i + 1] >= 0:
            t = F[i] / (F[i] - F[i + 1])
            out.append(float(d[i] + t * (d[i + 1] - d[i])))
    return out


# ---------------------------------------------------------------------------
# elastica oracle: shallow inextensible bending chain, exact KKT solve
# ---------------------------------------------------------------------------

class ElasticaOracle:
    """Independent check of the beam model by direct energy minimization.

    The beam axis is inextensible (quadratic arc-length functional held at its
    rest value), bending energy is quadratic in curvature change from the rest
    cosine shape, ends are clamped, the apex height is imposed, and the
    antisymmetric mode is suppressed by mirror symmetry, matching the paired
    beam cell. The stationarity system (K + 2p B) y = K ybar is linear in y,
    so each displacement solves by a 1-D root find on the axial multiplier p:
    a quasi-Newton path with machine-accurate gradients.
    """

    def __init__(self, params: MetashellParams, mat: MaterialParams,
                 n_segments: int = 240):
        if n_segments < 200:
            raise ModelDomain("oracle requires >= 200 segments")
        if n_segments % 2:
            n_segments += 1
        self.params = params
        self.mat = mat
        self.n = n_segments
        l, h = params.l, params.h
        EI = mat.E * params.depth * params.t ** 3 / 12.0
        N = self.n
        dx = l / N
        x = np.linspace(0.0, l, N + 1)
        self.ybar = (h / 2.0) * (1.0 - np.cos(2.0 * np.pi * x / l))

        # bending stiffness K: reflected-ghost curvature stencils, trapezoid ends
        D = np.zeros((N + 1, N + 1))
        w = np.ones(N + 1)
        w[0] = w[N] = 0.5
        D[0, 0], D[0, 1] = -2.0, 2.0
        D[N, N], D[N, N - 1] = -2.0, 2.0
        for i in range(1, N):
            D[i, i - 1], D[i, i], D[i, i + 1] = 1.0, -2.0, 1.0
        D /= dx * dx
        self.K = EI * dx * (D.T * w) @ D

        # arc-length functional B: g(y) = y^T B y - ybar^T B ybar
        G = np.zeros((N, N + 1))
        for i in range(N):
            G[i, i], G[i, i + 1] = -1.0, 1.0
        G /= dx
        self.B = dx * G.T @ G
        self.Cbar = float(self.ybar @ self.B @ self.ybar)

        # symmetry reduction y_i = q_{min(i, N-i)}; fixed: q_0 = 0, q_{N/2} = apex
        half = N // 2
        self.half = half
        n_q = half + 1
        S = np.zeros((N + 1, n_q))
        for i in range(N + 1):
            S[i, min(i, N - i)] = 1.0
        self.S = S
        self.free = np.arange(1, half)          # q indices free
        self.fixed = np.array([0, half])

        Kq = S.T @ self.K @ S
        Bq = S.T @ self.B @ S
        self.Kff = Kq[np.ix_(self.free, self.free)]
        self.Bff = Bq[np.ix_(self.free, self.free)]
        self.Kfc = Kq[np.ix_(self.free, self.fixed)]
        self.Bfc = Bq[np.ix_(self.free, self.fixed)]
        self.Bcc = Bq[np.ix_(self.fixed, self.fixed)]
        self.Kb_ybar_f = (S.T @ self.K @ self.ybar)[self.free]
        # generalized spectrum: Kff v = lam Bff v with V^T Bff V = I, so the
        # stationarity system diagonalizes and g(p) is a closed-form rational
        lam, V = eigh(self.Kff, self.Bff)
        self.lam = lam
        self.V = V

    def _assemble(self, z: np.ndarray, apex: float) -> np.ndarray:
        q = np.zeros(self.half + 1)
        q[self.free] = self.V @ z
        q[self.half] = apex
        return self.S @ q

    def solve(self, d: float):
        """Force (N, one beam) and deflected shape at apex displacement d.

        The constrained stationarity system diagonalizes in the generalized
        eigenbasis; the axial multiplier p is the root of the monotone
        rational g(p). When the rest shape does not excite the lowest
        pinned-apex mode (the symmetric bifurcation), p sits exactly at the
        stability limit and the free mode amplitude closes the arc-length
        constraint (trust-region hard case).
        """
        apex = self.params.h - d
        qc = np.array([0.0, apex])
        r0 = self.Kb_ybar_f - self.Kfc @ qc
        w = self.V.T @ (self.Bfc @ qc)
        u0 = self.V.T @ r0
        lam = self.lam
        beta = u0 + lam * w          # mode excitations: z_i + w_i = beta_i/(lam_i + 2p)
        C2 = float(qc @ self.Bcc @ qc) - self.Cbar - float(w @ w)
        p_lo = -0.5 * lam[0]

        def g(p):
            s = beta / (lam + 2.0 * p)
            return float(s @ s) + C2

        def z_of(p):
            return beta / (lam + 2.0 * p) - w

        scale = max(1.0, abs(p_lo))
        g_lim = float(np.sum((beta[1:] / (lam[1:] - lam[0])) ** 2)) + C2
        hard = abs(beta[0]) <= 1e-9 * max(1.0, float(np.linalg.norm(beta)))
        if hard and g_lim <= 0.0:
            # symmetric bifurcation: p at the stability limit, the free mode
            # amplitude closes the arc-length constraint (sign fixed + branch)
            z = z_of(p_lo + 1.0)  # placeholder shape; mode 1 overwritten below
            z = beta / np.where(lam - lam[0] == 0.0, 1.0, lam - lam[0]) - w
            z[0] = -w[0] + math.sqrt(-g_lim)
            p = p_lo
        else:
            if C2 >= 0.0:
                raise NoConvergence(
                    "arc-length constraint cannot be met at any tension",
                    residual=C2)
            if hard:
                lo = p_lo + scale * 1e-9
            else:
                target = 10.0 * max(1.0, abs(C2), abs(g_lim))
                lo = p_lo + min(scale, abs(beta[0]) / (2.0 * math.sqrt(target)))
            for _ in range(60):
                if g(lo) > 0.0:
                    break
                lo = p_lo + (lo - p_lo) / 8.0
            else:
                raise NoConvergence("could not bracket the axial multiplier (low)",
                                    iterations=60)
            hi = max(lo + scale, scale)
            for _ in range(400):
                if g(hi) < 0.0:
                    break
                hi *= 2.0
            else:
                raise NoConvergence("could not bracket the axial multiplier",
                                    iterations=400)
            p = brentq(g, lo, hi, xtol=1e-13 * scale, rtol=8.9e-16, maxiter=300)
            z = z_of(p)
        y = self._assemble(z, apex)
        # force = d(min energy)/dd = -(stationarity residual at the apex node)
        r = self.K @ (y - self.ybar) + 2.0 * p * (self.B @ y)
        grad_free = (self.S.T @ r)[self.free]
        gn = float(np.max(np.abs(grad_free))) if len(grad_free) else 0.0
        if gn > 1e-8 * max(1.0, float(np.max(np.abs(r)))):
            raise NoConvergence("stationarity residual above tolerance",
                                residual=gn)
        mid = self.n // 2
        return -float(r[mid]), y


def elastica_oracle(params: MetashellParams, mat: MaterialParams, d,
                    n_segments: int = 240, row: int = 0,
                    scaled: bool = True) -> np.ndarray:
    """Oracle force at imposed apex displacement(s) d, scaled like metashell_fd."""
    oracle = ElasticaOracle(params, mat, n_segments)
    ds = np.atleast_1d(np.asarray(d, dtype=np.float64))
    out = np.array([oracle.solve(x)[0] for x in ds])
    if scaled:
        out = out * 2.0 * params.cols * mat.stiffness_scale(params.infill_per_row[row])
    return out if np.ndim(d) else float(out[0])


# ---------------------------------------------------------------------------
# origami: bar-and-hinge reduction
# ---------------------------------------------------------------------------

@dataclass
class TrussModel:
    """Bar-and-hinge reduction of the origami at one kinematic state."""

    nodes: np.ndarray
    bars: np.ndarray          # (m, 2) node indices
    rest_lengths: np.ndarray
    stiffness: np.ndarray     # k = E A / L0, N/mm
    hinge_k: float
    facets: np.ndarray        # (f, 3) cavity-closing triangles


def build_truss(params: KreslingParams, mat: MaterialParams, heights) -> TrussModel:
    """Truss of the stack at imposed per-level heights."""
    A = mat.bar_area if mat.bar_area is not None else params.t_face * params.b / 2.0
    k_a = mat.E * A / params.a
    k_c = mat.E * A / params.c
    state = kinematic_state(params, heights, k_a, k_c)
    mesh = cavity_facets(state)
    n = params.n
    rings = state.rings
    n_rings = rings.shape[0]
    bars = []
    rest = []
    stiff = []
    for r in range(n_rings - 1):
        mirrored = r % 2 == 1
        for i in range(n):
            lo = r * n + i
            if not mirrored:
                bars.append((lo, (r + 1) * n + i))            # a-bar
                bars.append((lo, (r + 1) * n + (i - 1) % n))  # c-bar
            else:
                bars.append(((r + 1) * n + i, lo))
                bars.append(((r + 1) * n + i, r * n + (i - 1) % n))
            rest.extend([params.a, params.c])
            stiff.extend([k_a, k_c])
    return TrussModel(nodes=mesh.vertices, bars=np.asarray(bars),
                      rest_lengths=np.asarray(rest), stiffness=np.asarray(stiff),
                      hinge_k=mat.hinge_k, facets=mesh.triangles)


def _bar_k(params: KreslingParams, mat: MaterialParams) -> tuple[float, float]:
    A = mat.bar_area if mat.bar_area is not None else params.t_face * params.b / 2.0
    return mat.E * A / params.a, mat.E * A / params.c


def origami_rest_height(params: KreslingParams) -> float:
    H, _, _ = rest_state(params)
    return 2.0 * params.levels * H


def origami_energy(params: KreslingParams, mat: MaterialParams, H_total: float) -> float:
    """Minimum bar strain energy at total height H (uniform levels), N*mm."""
    k_a, k_c = _bar_k(params, mat)
    halves = 2 * params.levels
    Hh = H_total / halves
    _, u = min_twist(params, Hh, k_a, k_c)
    if mat.hinge_k > 0.0:
        u += _hinge_energy(params, mat, Hh)
    return halves * u


def _hinge_energy(params: KreslingParams, mat: MaterialParams, Hh: float) -> float:
    """Optional crease rotational springs (a and c creases of one half-level)."""
    from .kresling import _ring_dihedral, bar_lengths  # local import, light helpers
    k_a, k_c = _bar_k(params, mat)
    phi, _ = min_twist(params, Hh, k_a, k_c)
    H0, phi0, _ = rest_state(params)
    dih = _ring_dihedral(params, Hh, abs(phi))
    dih0 = _ring_dihedral(params, H0, abs(phi0))
    return params.n * mat.hinge_k * 0.5 * (dih - dih0) ** 2 * 2.0


def origami_energy_curve(params: KreslingParams, mat: MaterialParams,
                         H_grid: np.ndarray) -> np.ndarray:
    return np.array([origami_energy(params, mat, H) for H in H_grid])


def origami_fd(params: KreslingParams, mat: MaterialParams,
               n_samples: int = 241, d_max: float | None = None) -> FDCurve:
    """F(d) = dU/dd by central differences, d = compression from the rest height."""
    H_rest = origami_rest_height(params)
    lo, hi = feasible_band(params)
    H_min = lo * 2 * params.levels
    if d_max is None:
        d_max = 0.95 * (H_rest - H_min)
    if d_max >= H_rest - H_min:
        raise InfeasibleHeight(
            f"d_max={d_max} exceeds the feasible compression {H_rest - H_min}")
    d = np.linspace(0.0, d_max, n_samples)
    step = 1e-3 * (d[-1] - d[0])
    F = np.empty_like(d)
    for i, di in enumerate(d):
        up = origami_energy(params, mat, H_rest - (di + step))
        um = origami_energy(params, mat, H_rest - (di - step))
        F[i] = (up - um) / (2.0 * step)
    return FDCurve(d=d, F=F, role="F_ori")


def combined_fd(meta: FDCurve, ori: FDCurve) -> FDCurve:
    """Pointwise sum F_el = F_meta + F_ori on the shared displacement domain."""
    lo = max(meta.d[0], ori.d[0])
    hi = min(meta.d[-1], ori.d[-1])
    if hi <= lo:
        raise DomainMismatch(
            f"no overlap: [{meta.d[0]}, {meta.d[-1]}] vs [{ori.d[0]}, {ori.d[-1]}]")
    mask = (meta.d >= lo - 1e-12) & (meta.d <= hi + 1e-12)
    d = meta.d[mask]
    F = meta.F[mask] + ori.interp(d)
    return FDCurve(d=d, F=F, role="F_el")


# ---------------------------------------------------------------------------
# cavity volume and pressure-volume curves
# ---------------------------------------------------------------------------

def cavity_volume(state_or_mesh) -> float:
    """Cavity volume in mL of a KreslingState or a closed facet mesh."""
    if hasattr(state_or_mesh, "rings"):
        mesh = cavity_facets(state_or_mesh)
    else:
        mesh = state_or_mesh
    return enclosed_volume_ml(mesh.vertices, mesh.triangles)


def volume_map(params: KreslingParams, mat: MaterialParams,
               H_grid: np.ndarray) -> np.ndarray:
    """Cavity volume (mL) along imposed total heights (uniform levels)."""
    k_a, k_c = _bar_k(params, mat)
    out = np.empty(len(H_grid))
    halves = 2 * params.levels
    for i, H in enumerate(H_grid):
        state = kinematic_state(params, np.full(params.levels, H / params.levels),
                                k_a, k_c)
        out[i] = cavity_volume(state)
    return out


def pv_curve(combined: FDCurve, H_open: float, H_grid: np.ndarray,
             V_grid: np.ndarray, branch: str = "inflation") -> PVCurve:
    """Parametric (V(H), P(H)) with P = (dU/dH)/(dV/dH) = -F_el(d)/(dV/dH).

    H_grid must be increasing; V in mL; P in mbar.
    """
    H_grid = np.asarray(H_grid, dtype=np.float64)
    V_grid = np.asarray(V_grid, dtype=np.float64)
    dVdH = np.gradient(V_grid, H_grid)          # mL/mm, second-order interior
    if np.any(dVdH < 1e-9):
        raise DegenerateVolumeMap("dV/dH below 1e-9 mL/mm on the band")
    d = H_open - H_grid
    F = combined.interp(d)
    # F [N] / (dV/dH [mm^2]) = MPa; 1 MPa = 1e4 mbar
    P = -(F / (dVdH * 1000.0)) * MBAR_PER_MPA
    curve = PVCurve(V=V_grid, P=P, H=H_grid)
    curve.events = detect_events(curve)
    return curve


def detect_events(curve, noise_floor: float = 1e-6) -> list[Event]:
    """Strict local extrema of the dependent variable (limit points)."""
    if isinstance(curve, PVCurve):
        x, y = curve.V, curve.P
        kinds = ("pressure_max", "pressure_min")
    else:
        x, y = curve.d, curve.F
        kinds = ("force_max", "force_min")
    events = []
    n = len(y)
    if n < 3:
        return events
    for i in range(1, n - 1):
        if y[i] > y[i - 1] and y[i] > y[i + 1]:
            events.append(Event(kind=kinds[0], branch="-", x=float(x[i]), y=float(y[i])))
        elif y[i] < y[i - 1] and y[i] < y[i + 1]:
            events.append(Event(kind=kinds[1], branch="-", x=float(x[i]), y=float(y[i])))
    return events


def is_bistable_curve(curve, noise_floor: float = 1e-6) -> bool:
    """True iff the response crosses zero with a negative excursion beyond the floor."""
    y = curve.P if isinstance(curve, PVCurve) else curve.F
    return bool(np.any(y > noise_floor) and np.any(y < -noise_floor))


# ---------------------------------------------------------------------------
# multi-segment sequencing
# ---------------------------------------------------------------------------

@dataclass
class SegmentSpec:
    """One actuation segment: a shell row slice plus its origami slice."""

    shell: MetashellParams
    kresling: KreslingParams
    infill: float

    def __post_init__(self):
        if not (0.0 < self.infill <= 1.0):
            raise ModelDomain(f"infill must be in (0, 1], got {self.infill}")


class _SegmentModel:
    """Smooth interpolants U(H), V(H) and derivatives for one segment.

    The height domain extends slightly past both stable states (mild shell
    tension and origami over-extension) so the shared-volume solver never
    runs into an artificial wall at a physical equilibrium.
    """

    def __init__(self, spec: SegmentSpec, mat: MaterialParams, n_grid: int = 481):
        shell = MetashellParams(**{**spec.shell.__dict__,
                                   "rows": 1, "infill_per_row": (spec.infill,)})
        self.shell = shell
        self.kresling = spec.kresling
        H_rest = origami_rest_height(spec.kresling)
        self.H_open = H_rest
        halves = 2 * spec.kresling.levels
        band_hi = halves * feasible_band(spec.kresling)[1]
        # extension above rest: origami bars in tension, shell beams pulled
        H_hi = min(H_rest + 0.25 * shell.h, 0.999 * band_hi)
        d_hi = min(2.2 * shell.h, 0.95 * H_rest)
        H_lo = H_rest - d_hi
        self.H_lo = H_lo
        self.H_hi = H_hi
        H = np.linspace(H_lo, H_hi, n_grid)

        scale = force_scale(shell, mat, spec.infill)
        d = H_rest - H[::-1]                  # increasing compression grid
        F_meta = scale * beam_fd_normalized(d / shell.h, shell.Q)
        U_meta_d = cumulative_trapezoid(F_meta, d, initial=0.0)
        U_meta_H = U_meta_d[::-1]
        U_ori_H = origami_energy_curve(spec.kresling, mat, H)
        V_H = volume_map(spec.kresling, mat, H)
        self.U = CubicSpline(H, U_meta_H + U_ori_H)
        self.V = CubicSpline(H, V_H)
        self.dU = self.U.derivative()
        self.d2U = self.U.derivative(2)
        self.dV = self.V.derivative()
        self.d2V = self.V.derivative(2)

    def closed_height(self) -> float:
        """Second stable equilibrium (P = 0): lowest upward zero of dU/dH."""
        H = np.linspace(self.H_lo, self.H_open, 4001)
        g = self.dU(H)
        for i in range(len(H) - 1):
            if g[i] <= 0.0 and g[i + 1] > 0.0:
                return float(brentq(self.dU, H[i], H[i + 1]))
        raise NotBistable("segment has no second stable equilibrium")


@dataclass
class SequenceResult:
    V: np.ndarray                 # total cavity volume, mL
    P: np.ndarray                 # mbar
    H: np.ndarray                 # (steps, segments) mm
    branch: np.ndarray            # 'inflation'/'deflation' per step
    events: list = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        cols = ",".join(f"H{i}_mm" for i in range(self.H.shape[1]))
        buf.write(f"branch,V_mL,P_mbar,{cols}\n")
        for b, v, p, hs in zip(self.branch, self.V, self.P, self.H):
            hh = ",".join(f"{h:.9g}" for h in hs)
            buf.write(f"{b},{v:.9g},{p:.9g},{hh}\n")
        return buf.getvalue()


class _SharedCavity:
    """Total-energy minimization at imposed total volume.

    The volume constraint is eliminated: the last segment's height follows
    from the others through its monotone volume map, so each step is an
    unconstrained minimization over x = H[:-1] inside a feasible box. At a
    minimum, dU_i/dV_i is equal across segments: the shared pressure.
    """

    def __init__(self, models, V_t, mult=None):
        self.models = models
        self.V_t = V_t
        self.m = len(models)
        self.mult = np.ones(self.m) if mult is None else np.asarray(mult, float)

    def _invert(self, md, v_target: float) -> float:
        v_lo, v_hi = float(md.V(md.H_lo)), float(md.V(md.H_open))
        if v_target <= v_lo:
            return md.H_lo
        if v_target >= v_hi:
            return md.H_open
        return float(brentq(lambda H: float(md.V(H)) - v_target,
                            md.H_lo, md.H_open, xtol=1e-12))

    def box(self):
        """Feasible intervals for x keeping the last segment in range."""
        lo, hi = [], []
        v_min = [self.mult[j] * float(md.V(md.H_lo))
                 for j, md in enumerate(self.models)]
        v_max = [self.mult[j] * float(md.V(md.H_open))
                 for j, md in enumerate(self.models)]
        for i, md in enumerate(self.models[:-1]):
            rest_min = sum(v_min[j] for j in range(self.m) if j != i)
            rest_max = sum(v_max[j] for j in range(self.m) if j != i)
            v_lo = max(v_min[i], self.V_t - rest_max) / self.mult[i]
            v_hi = min(v_max[i], self.V_t - rest_min) / self.mult[i]
            lo.append(self._invert(md, v_lo))
            hi.append(self._invert(md, v_hi))
        return np.array(lo), np.array(hi)

    def heights(self, x: np.ndarray) -> np.ndarray:
        v_rest = self.V_t - sum(self.mult[i] * float(md.V(xi))
                                for i, (md, xi) in enumerate(
                                    zip(self.models[:-1], x)))
        return np.append(x, self._invert(self.models[-1],
                                         v_rest / self.mult[-1]))

    def value_grad(self, x: np.ndarray):
        H = self.heights(x)
        mds = self.models
        w = self.mult
        phi = sum(w[i] * float(md.U(Hi)) for i, (md, Hi) in enumerate(zip(mds, H)))
        dU = np.array([float(md.dU(Hi)) for md, Hi in zip(mds, H)])
        dV = np.array([float(md.dV(Hi)) for md, Hi in zip(mds, H)])
        g = w[:-1] * (dU[:-1] - dU[-1] * dV[:-1] / dV[-1])
        return phi, g, H

    def pressure(self, H: np.ndarray) -> float:
        """Shared pressure in mbar: dU/dV with U in N*mm and V in mL is kPa,
        so scale by 10."""
        dU = np.array([float(md.dU(Hi)) for md, Hi in zip(self.models, H)])
        dV = np.array([float(md.dV(Hi)) for md, Hi in zip(self.models, H)])
        return 10.0 * float(dU @ dV / (dV @ dV))


def _minimize_at_volume(models, V_t, H_seed, g_tol=1e-7, max_iter=4000,
                        mult=None):
    """Continuation step: damped Newton seeded at the previous state, with an
    adaptive gradient descent carrying the state through snap transitions.
    Deterministic (fixed tolerances, no randomness)."""
    sys_ = _SharedCavity(models, V_t, mult)
    if sys_.m == 1:
        H = np.array([sys_._invert(models[0], V_t / sys_.mult[0])])
        return H, sys_.pressure(H)
    lo, hi = sys_.box()
    x = np.clip(np.asarray(H_seed[:-1], dtype=np.float64), lo, hi)
    phi, g, H = sys_.value_grad(x)
    eta = 0.05
    n = len(x)
    for it in range(max_iter):
        if _converged_kkt(x, g, lo, hi, g_tol):
            break
        step = None
        if it % 4 == 0:
            # Newton proposal from a finite-difference Hessian of the gradient
            eps = 1e-6 * max(1.0, float(np.max(np.abs(x))))
            Hess = np.zeros((n, n))
            usable = True
            for j in range(n):
                xp = x.copy(); xp[j] = min(x[j] + eps, hi[j])
                xm = x.copy(); xm[j] = max(x[j] - eps, lo[j])
                if xp[j] - xm[j] < eps * 1e-3:
                    usable = False
                    break
                _, gp, _ = sys_.value_grad(xp)
                _, gm, _ = sys_.value_grad(xm)
                Hess[:, j] = (gp - gm) / (xp[j] - xm[j])
            if usable:
                Hess = 0.5 * (Hess + Hess.T)
                if float(np.min(np.linalg.eigvalsh(Hess))) > 1e-9:
                    try:
                        cand = np.linalg.solve(Hess, -g)
                        if float(np.linalg.norm(cand)) < 5.0:
                            step = cand
                    except np.linalg.LinAlgError:
                        step = None
        if step is None:
            step = -eta * g
        t = 1.0
        accepted = False
        for _ in range(60):
            xn = np.clip(x + t * step, lo, hi)
            if np.allclose(xn, x, rtol=0.0, atol=1e-15):
                break
            phin, gn, Hn = sys_.value_grad(xn)
            # monotone energy descent only: mixed acceptance rules can cycle
            if phin <= phi + 1e-12:
                x, phi, g, H = xn, phin, gn, Hn
                accepted = True
                break
            t *= 0.5
        if accepted:
            eta = min(eta * 1.4, 1.0)
        else:
            eta *= 0.5
            if eta < 1e-13:
                break
    if not _converged_kkt(x, g, lo, hi, 1e-4):
        raise NoEquilibrium("relaxation stalled at imposed volume",
                            iterations=max_iter,
                            residual=float(np.max(np.abs(g))))
    return H, sys_.pressure(H)


def _converged_kkt(x, g, lo, hi, tol):
    """Projected-gradient optimality: interior gradients vanish; gradients at
    active box edges may point outward."""
    for i in range(len(x)):
        if abs(g[i]) <= tol:
            continue
        if x[i] <= lo[i] + 1e-12 and g[i] > 0:
            continue
        if x[i] >= hi[i] - 1e-12 and g[i] < 0:
            continue
        return False
    return True


def simulate_sequence(segments: list[SegmentSpec], mat: MaterialParams,
                      n_steps: int = 400, snap_jump: float = 1.0,
                      deflate: bool = True) -> SequenceResult:
    """Quasi-static volume-controlled inflation (and deflation) of the shared
    cavity. At each imposed total volume the segment heights equalize the
    pressure; the path continues from the previous state, which is what
    produces hysteresis. Snap events are the strict pressure extrema of each
    branch, attributed to the segments moving fastest there (plus any
    discontinuous height jumps).
    """
    if not segments:
        raise NoEquilibrium("need at least one segment")
    # identical segments share one group coordinate: the solver follows the
    # symmetric branch exactly, so equal segments snap together
    keys = []
    for s in segments:
        keys.append((tuple(sorted((k, str(v)) for k, v in s.shell.__dict__.items())),
                     tuple(sorted((k, str(v)) for k, v in s.kresling.__dict__.items())),
                     s.infill))
    group_of: dict = {}
    group_members: list[list[int]] = []
    group_specs: list[SegmentSpec] = []
    for i, key in enumerate(keys):
        if key not in group_of:
            group_of[key] = len(group_specs)
            group_specs.append(segments[i])
            group_members.append([])
        group_members[group_of[key]].append(i)
    models = [_SegmentModel(s, mat) for s in group_specs]
    mult = np.array([len(m) for m in group_members], dtype=float)
    H = np.array([md.closed_height() for md in models])
    V_lo = float(mult @ [md.V(H[i]) for i, md in enumerate(models)])
    V_hi = float(mult @ [md.V(md.H_open) for md in models])
    ramp_up = np.linspace(V_lo, V_hi, n_steps)
    ramps = [("inflation", ramp_up)]
    if deflate:
        ramps.append(("deflation", ramp_up[::-1]))

    Vs, Ps, Hs, Bs = [], [], [], []
    events: list[Event] = []
    for branch, ramp in ramps:
        for V_t in ramp:
            H_prev = H.copy()
            H, P = _minimize_at_volume(models, float(V_t), H_prev, mult=mult)
            for gi in range(len(models)):
                if abs(H[gi] - H_prev[gi]) > snap_jump and len(Vs):
                    kind = "pressure_max" if branch == "inflation" else "pressure_min"
                    for seg_i in group_members[gi]:
                        events.append(Event(kind=kind, branch=branch,
                                            x=float(V_t), y=float(P),
                                            segment=seg_i))
            Vs.append(float(V_t))
            Ps.append(float(P))
            full = np.empty(len(segments))
            for gi, members in enumerate(group_members):
                for seg_i in members:
                    full[seg_i] = H[gi]
            Hs.append(full)
            Bs.append(branch)
    res = SequenceResult(V=np.array(Vs), P=np.array(Ps), H=np.array(Hs),
                         branch=np.array(Bs), events=events)
    dV_step = float(ramp_up[1] - ramp_up[0]) if n_steps > 1 else 1.0
    res.events = _dedupe_events(_sequence_events(res) + events, 2.5 * dV_step)
    return res


def _dedupe_events(events: list[Event], v_tol: float) -> list[Event]:
    """Drop events repeating an earlier one of the same signature nearby in V."""
    out: list[Event] = []
    for ev in sorted(events, key=lambda e: (e.branch, e.x, e.segment)):
        dup = any(e.kind == ev.kind and e.branch == ev.branch
                  and e.segment == ev.segment and abs(e.x - ev.x) <= v_tol
                  for e in out)
        if not dup:
            out.append(ev)
    return out


def _sequence_events(res: SequenceResult, prominence: float = 0.5) -> list[Event]:
    """Strict pressure extrema per branch, attributed to the moving segments."""
    out: list[Event] = []
    for branch, kind, sgn in (("inflation", "pressure_max", 1.0),
                              ("deflation", "pressure_min", -1.0)):
        idx = np.nonzero(res.branch == branch)[0]
        if len(idx) < 3:
            continue
        P = sgn * res.P[idx]
        V = res.V[idx]
        Hb = res.H[idx]
        for k in range(1, len(idx) - 1):
            if P[k] > P[k - 1] and P[k] > P[k + 1] and                     P[k] - min(P[k - 1], P[k + 1]) > -1.0:
                # prominence over the neighborhood
                lo = max(0, k - 10)
                hi = min(len(idx), k + 11)
                if P[k] - min(P[lo:hi]) < prominence:
                    continue
                rates = np.abs(Hb[min(k + 1, len(idx) - 1)] - Hb[max(k - 1, 0)])
                top = float(np.max(rates))
                movers = [i for i in range(Hb.shape[1])
                          if rates[i] >= 0.5 * top] or [int(np.argmax(rates))]
                for i in movers:
                    out.append(Event(kind=kind, branch=branch, x=float(V[k]),
                                     y=float(res.P[idx][k]), segment=i))
    return out


# ---------------------------------------------------------------------------
# elongation
# ---------------------------------------------------------------------------

def predict_elongation(params: MetashellParams, mat: MaterialParams | None = None,
                       lid_thickness: float = 2.0) -> float:
    """(open - closed)/closed x 100 for the full assembly (shell + lids).

    The closed height translates every row to its second stable equilibrium,
    clamped to the geometric travel cap (beam pair resting on the row floor).
    """
    stroke_row = min(second_stable_displacement(params), params.travel_cap)
    open_h = params.open_height + 2.0 * lid_thickness
    closed_h = open_h - params.rows * stroke_row
    if closed_h <= 0:
        raise NotBistable("closed height collapsed to zero")
    return (open_h - closed_h) / closed_h * 100.0
