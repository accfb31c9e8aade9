"""Kresling origami generation: flat pattern, folded unit, closed ring stack,
kinematic states, and solidification into printable meshes.

Geometry conventions: millimeters, radians. The ring axis is +z, the bottom
polygon of the stack lies in z = 0 centered on the origin. Right-handed
chirality connects bottom vertex i to top vertex i with a positive twist.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import bisect, minimize_scalar

from .errors import (ClosureFailure, DegeneratePattern, InfeasibleFold,
                     InfeasibleHeight, InvalidParams, SelfIntersection)
from .mesh import TriMesh, enclosed_volume_ml

TWIST_SOLVE_TOL = 1e-10   # rad, ring-closure bisection
GRID_POINTS = 1441        # coarse twist scan resolution


@dataclass
class KreslingParams:
    """Input parameters of the Kresling pattern and stack."""

    n: int = 6                          # polygon side count
    a: float = 11.684653082223877       # inclined crease edge length, mm
    b: float = 14.0                     # polygon edge length, mm
    theta: float = 1.169057460061080    # pattern inclination angle, rad
    alpha: float = 2.380114884708359    # requested initial dihedral angle, rad
    t_face: float = 1.2                 # face thickness, mm
    levels: int = 2                     # mirrored-pair count
    chirality: str = "right"            # {right, left}

    def __post_init__(self):
        self.validate()

    def validate(self):
        if int(self.n) != self.n or self.n < 3:
            raise InvalidParams(f"n must be an integer >= 3, got {self.n}")
        self.n = int(self.n)
        if int(self.levels) != self.levels or self.levels < 1:
            raise InvalidParams(f"levels must be an integer >= 1, got {self.levels}")
        self.levels = int(self.levels)
        for name in ("a", "b", "t_face"):
            if not (getattr(self, name) > 0):
                raise InvalidParams(f"{name} must be > 0")
        if not (0.0 < self.theta < math.pi):
            if abs(self.theta) < 1e-12 or abs(self.theta - math.pi) < 1e-12:
                raise DegeneratePattern(
                    f"theta = {self.theta} collapses the pattern triangles")
            raise InvalidParams(f"theta must be in (0, pi), got {self.theta}")
        if not (0.0 < self.alpha <= math.pi):
            raise InvalidParams(f"alpha must be in (0, pi], got {self.alpha}")
        if self.chirality not in ("right", "left"):
            raise InvalidParams(f"chirality must be 'right' or 'left', got {self.chirality}")
        area = 0.5 * self.a * self.b * math.sin(self.theta)
        if area < 1e-9:
            raise DegeneratePattern(
                f"pattern triangles degenerate (area={area:.3e} mm^2)")
        if self.t_face >= self.shortest_edge:
            raise InvalidParams(
                f"t_face={self.t_face} must be smaller than the shortest "
                f"pattern edge ({self.shortest_edge:.6g})")

    @property
    def c(self) -> float:
        """Third pattern edge length |P1 - P2| (law of cosines)."""
        return math.sqrt(self.a ** 2 + self.b ** 2
                         - 2.0 * self.a * self.b * math.cos(self.theta))

    @property
    def shortest_edge(self) -> float:
        return min(self.a, self.b, self.c)

    @property
    def circumradius(self) -> float:
        """Polygon circumradius (equals b for n = 6)."""
        return self.b / (2.0 * math.sin(math.pi / self.n))


@dataclass
class FlatPattern:
    """Planar pattern unit: triangles F1, F2 sharing the diagonal crease a."""

    f1: np.ndarray            # (3,2): P0, P1, P2
    f2: np.ndarray            # (3,2): P0, P4, P2
    crease_assignment: dict   # edge (as sorted vertex-pair label) -> mountain/valley/boundary
    a: float
    b: float
    theta: float


@dataclass
class FoldedUnit:
    """Folded F1-F2 pair in standing orientation (bottom edge in z=0, top edge level)."""

    vertices: np.ndarray      # (4,3): P0, P1, P2, P4
    dihedral: float
    chirality: str
    t_face: float

    @property
    def height(self) -> float:
        return float(self.vertices[2, 2])


@dataclass
class KreslingState:
    """Kinematic configuration of the full mirrored stack.

    half_heights / half_twists have 2*levels entries (bottom to top); twists
    alternate +phi_k, -phi_k within each mirrored pair so every level has zero
    net rotation. rings holds the 2*levels+1 polygon vertex rings.
    """

    params: KreslingParams
    half_heights: np.ndarray
    half_twists: np.ndarray
    rings: np.ndarray = field(default=None)      # (2L+1, n, 3)

    def __post_init__(self):
        if self.rings is None:
            self.rings = ring_coordinates(self.params, self.half_heights, self.half_twists)

    @property
    def heights(self) -> np.ndarray:
        """Per-level (mirrored pair) heights."""
        hh = self.half_heights
        return hh[0::2] + hh[1::2]

    @property
    def twists(self) -> np.ndarray:
        return self.half_twists

    @property
    def total_height(self) -> float:
        return float(np.sum(self.half_heights))

    @property
    def vertex_coords(self) -> np.ndarray:
        return self.rings.reshape(-1, 3)

    def net_twist(self) -> float:
        return float(np.sum(self.half_twists))


@dataclass
class OrigamiSolid:
    """Thickened origami: watertight outer mesh and enclosed cavity mesh."""

    outer_mesh: TriMesh
    cavity_mesh: TriMesh | None


# ---------------------------------------------------------------------------
# pattern and folding
# ---------------------------------------------------------------------------

def build_flat_pattern(params: KreslingParams) -> FlatPattern:
    """Planar pattern: F1 = (P0, P1, P2), F2 completes the parallelogram with
    sides b and c, split by the mountain diagonal P0-P2 of length a."""
    a, b, th = params.a, params.b, params.theta
    p0 = np.array([0.0, 0.0])
    p1 = np.array([b, 0.0])
    p2 = np.array([a * math.cos(th), a * math.sin(th)])
    p4 = p2 - np.array([b, 0.0])
    u, v = p1 - p0, p2 - p0
    area = 0.5 * abs(u[0] * v[1] - u[1] * v[0])
    if area < 1e-9:
        raise DegeneratePattern(f"triangle area {area:.3e} mm^2 below 1e-9")
    creases = {
        "P0-P1": "boundary",   # bottom polygon edge
        "P1-P2": "boundary",   # right side (length c)
        "P0-P2": "mountain",   # shared diagonal (length a)
        "P2-P4": "valley",     # top polygon edge, interface to the mirrored copy
        "P0-P4": "boundary",   # left side (length c)
    }
    return FlatPattern(f1=np.array([p0, p1, p2]), f2=np.array([p0, p4, p2]),
                       crease_assignment=creases, a=a, b=b, theta=th)


def _rotate_about_axis(points: np.ndarray, origin: np.ndarray, axis: np.ndarray,
                       angle: float) -> np.ndarray:
    """Rodrigues rotation of points about a line (origin, axis)."""
    k = axis / np.linalg.norm(axis)
    p = points - origin
    cos_a, sin_a = math.cos(angle), math.sin(angle)
    rot = (p * cos_a + np.cross(k, p) * sin_a
           + np.outer(p @ k, k) * (1.0 - cos_a))
    return rot + origin


def _dihedral_between(shared0, shared1, off1, off2) -> float:
    """Interior dihedral along edge shared0-shared1 between half-planes
    containing off1 and off2. Flat (coplanar, opposite sides) gives pi."""
    e = shared1 - shared0
    e = e / np.linalg.norm(e)
    w1 = off1 - shared0
    w1 = w1 - (w1 @ e) * e
    w2 = off2 - shared0
    w2 = w2 - (w2 @ e) * e
    n1, n2 = np.linalg.norm(w1), np.linalg.norm(w2)
    cosang = float(np.clip((w1 @ w2) / (n1 * n2), -1.0, 1.0))
    return math.acos(cosang)


def fold_basic_unit(pattern: FlatPattern, alpha: float, t_face: float,
                    chirality: str = "right") -> FoldedUnit:
    """Rotate F2 about the shared a-crease until the F1/F2 dihedral equals alpha.

    alpha = pi reproduces the flat pattern. The result is re-oriented to the
    standing pose: bottom edge P0-P1 along x in z = 0, top edge P4-P2 level.
    """
    if not (0.0 < alpha <= math.pi):
        raise InvalidParams(f"alpha must be in (0, pi], got {alpha}")
    p0 = np.array([*pattern.f1[0], 0.0])
    p1 = np.array([*pattern.f1[1], 0.0])
    p2 = np.array([*pattern.f1[2], 0.0])
    p4 = np.array([*pattern.f2[1], 0.0])

    # interpenetration limit: the two t/2 slabs meet when the fold closes
    # beyond the wedge the thinner face can sweep
    h1 = _point_line_distance(p1, p0, p2)
    h4 = _point_line_distance(p4, p0, p2)
    h_min = min(h1, h4)
    alpha_min = 2.0 * math.asin(min(1.0, t_face / (2.0 * h_min))) if h_min > 0 else math.pi
    if alpha < alpha_min:
        raise InfeasibleFold(
            f"alpha={alpha:.6g} below interpenetration limit {alpha_min:.6g} "
            f"for t_face={t_face}")

    # fold: P4 lifts by pi - alpha about the crease P0->P2 (flat at alpha = pi)
    fold_angle = math.pi - alpha
    sign = 1.0 if chirality == "right" else -1.0
    p4f = _rotate_about_axis(p4[None, :], p0, p2 - p0, sign * fold_angle)[0]

    verts = np.vstack([p0, p1, p2, p4f])
    if abs(fold_angle) > 1e-12:
        verts = _stand_up(verts)
    dihedral = _dihedral_between(verts[0], verts[2], verts[1], verts[3])
    return FoldedUnit(vertices=verts, dihedral=dihedral, chirality=chirality,
                      t_face=t_face)


def _point_line_distance(p, q0, q1) -> float:
    d = q1 - q0
    t = ((p - q0) @ d) / (d @ d)
    return float(np.linalg.norm(p - (q0 + t * d)))


def _stand_up(verts: np.ndarray) -> np.ndarray:
    """Tilt about the bottom edge (x-axis) so P2 and P4 reach equal z > 0."""
    p2, p4 = verts[2], verts[3]
    denom = p2[1] - p4[1]
    if abs(denom) < 1e-15 and abs(p4[2]) < 1e-15:
        return verts
    psi = math.atan2(p4[2], denom) if abs(denom) > 1e-15 else math.pi / 2.0
    out = verts.copy()
    y, z = out[:, 1].copy(), out[:, 2].copy()
    out[:, 1] = y * math.cos(psi) - z * math.sin(psi)
    out[:, 2] = y * math.sin(psi) + z * math.cos(psi)
    if out[2, 2] < 0:
        out[:, 1] = -out[:, 1]
        out[:, 2] = -out[:, 2]
    return out


def mirror_and_stack(unit: FoldedUnit) -> tuple[FoldedUnit, FoldedUnit]:
    """The unit plus its reflection through the horizontal plane at its top.

    The copy has inverted chirality; interface vertices (top edge) coincide.
    """
    z_top = unit.height
    mirrored = unit.vertices.copy()
    mirrored[:, 2] = 2.0 * z_top - mirrored[:, 2]
    other = "left" if unit.chirality == "right" else "right"
    return unit, FoldedUnit(vertices=mirrored, dihedral=unit.dihedral,
                            chirality=other, t_face=unit.t_face)


# ---------------------------------------------------------------------------
# ring closure and assembly
# ---------------------------------------------------------------------------

def bar_lengths(R: float, n: int, H: float, phi: float) -> tuple[float, float]:
    """Current a-bar and c-bar lengths for a half-level at height H, twist phi."""
    psi = 2.0 * math.pi / n
    la = math.sqrt(4.0 * R * R * math.sin(phi / 2.0) ** 2 + H * H)
    lc = math.sqrt(4.0 * R * R * math.sin((phi - psi) / 2.0) ** 2 + H * H)
    return la, lc


def closure_states(params: KreslingParams) -> list[tuple[float, float]]:
    """All stress-free half-level states (H, phi) that close the n-ring with
    exact bar lengths a and c. Solved by bisection to 1e-10 rad."""
    R = params.circumradius
    n = params.n
    psi = 2.0 * math.pi / n
    a2, c2 = params.a ** 2, params.c ** 2

    def g(phi):
        return (4.0 * R * R * (math.sin(phi / 2.0) ** 2
                               - math.sin((phi - psi) / 2.0) ** 2)
                - (a2 - c2))

    # g(phi) = 4 R^2 sin(pi/n) sin(phi - pi/n) - (a^2 - c^2): monotone pieces
    # around phi = pi/n +- pi/2; bracket each root and bisect.
    k = (a2 - c2) / (4.0 * R * R * math.sin(math.pi / n))
    roots = []
    if abs(k) <= 1.0:
        base = math.asin(max(-1.0, min(1.0, k)))
        for cand in (math.pi / n + base, math.pi / n + math.pi - base):
            cand = (cand + math.pi) % (2.0 * math.pi) - math.pi
            lo, hi = cand - 1e-3, cand + 1e-3
            if g(lo) * g(hi) <= 0.0:
                phi = bisect(g, lo, hi, xtol=TWIST_SOLVE_TOL)
            else:
                phi = cand
            h2 = a2 - 4.0 * R * R * math.sin(phi / 2.0) ** 2
            if h2 > 1e-12:
                roots.append((math.sqrt(h2), phi))
    if not roots:
        raise ClosureFailure(
            f"no fold state closes the {n}-ring for a={params.a}, b={params.b}, "
            f"theta={params.theta:.6g}")
    return roots


def rest_state(params: KreslingParams) -> tuple[float, float, float]:
    """Stress-free (H_half, phi, realized dihedral) closest to the requested alpha."""
    best = None
    for H, phi in closure_states(params):
        if params.chirality == "left":
            phi = -phi
        dih = _ring_dihedral(params, H, phi)
        score = abs(dih - params.alpha)
        if best is None or score < best[0]:
            best = (score, H, phi, dih)
    return best[1], best[2], best[3]


def _ring_vertices(params: KreslingParams, H: float, phi: float):
    """Bottom and top polygon vertices of one half-level."""
    R = params.circumradius
    n = params.n
    ang = 2.0 * math.pi * np.arange(n) / n
    bot = np.column_stack([R * np.cos(ang), R * np.sin(ang), np.zeros(n)])
    top = np.column_stack([R * np.cos(ang + phi), R * np.sin(ang + phi),
                           np.full(n, H)])
    return bot, top


def _ring_dihedral(params: KreslingParams, H: float, phi: float) -> float:
    """Dihedral along the a-crease B_0-T_0 between faces F1_0 and F2_0."""
    bot, top = _ring_vertices(params, H, phi)
    return _dihedral_between(bot[0], top[0], bot[1], top[-1])


def half_faces(n: int, bottom_ring: int, top_ring: int, mirrored: bool):
    """Triangle index triplets (ring, vertex) for one half-level.

    For the lower (unmirrored) half: F1 = (B_i, B_{i+1}, T_i),
    F2 = (B_i, T_i, T_{i-1}); the mirrored half swaps ring roles.
    """
    tris = []
    for i in range(n):
        j = (i + 1) % n
        k = (i - 1) % n
        if not mirrored:
            tris.append(((bottom_ring, i), (bottom_ring, j), (top_ring, i)))
            tris.append(((bottom_ring, i), (top_ring, i), (top_ring, k)))
        else:
            tris.append(((top_ring, i), (bottom_ring, i), (top_ring, j)))
            tris.append(((top_ring, i), (bottom_ring, k), (bottom_ring, i)))
    return tris


def ring_coordinates(params: KreslingParams, half_heights, half_twists) -> np.ndarray:
    """(2L+1, n, 3) vertex rings for the given per-half heights and twists."""
    n = params.n
    R = params.circumradius
    half_heights = np.asarray(half_heights, dtype=np.float64)
    half_twists = np.asarray(half_twists, dtype=np.float64)
    nh = len(half_heights)
    z = np.concatenate([[0.0], np.cumsum(half_heights)])
    rot = np.concatenate([[0.0], np.cumsum(half_twists)])
    ang = 2.0 * math.pi * np.arange(n) / n
    rings = np.empty((nh + 1, n, 3))
    for r in range(nh + 1):
        rings[r, :, 0] = R * np.cos(ang + rot[r])
        rings[r, :, 1] = R * np.sin(ang + rot[r])
        rings[r, :, 2] = z[r]
    return rings


def assemble_origami(params: KreslingParams, unit_pair=None):
    """Closed n-fold ring stack at the stress-free fold state.

    Returns (state, faces, realized_alpha). The ring closure is solved from
    the rigid bar lengths; the realized dihedral is reported alongside the
    requested params.alpha.
    """
    H, phi, dihedral = rest_state(params)
    L = params.levels
    hh = np.full(2 * L, H)
    ht = np.empty(2 * L)
    ht[0::2] = phi
    ht[1::2] = -phi
    state = KreslingState(params=params, half_heights=hh, half_twists=ht)
    faces = stack_faces(params)
    return state, faces, dihedral


def stack_faces(params: KreslingParams):
    """All side-sheet faces of the stack as (ring, vertex) index triplets."""
    faces = []
    for half in range(2 * params.levels):
        faces.extend(half_faces(params.n, half, half + 1, mirrored=(half % 2 == 1)))
    return faces


def faces_to_triangles(state: KreslingState, faces) -> tuple[np.ndarray, np.ndarray]:
    """Resolve (ring, vertex) faces against a state's rings -> (verts, tris)."""
    n = state.params.n
    verts = state.rings.reshape(-1, 3)
    tris = np.array([[r * n + i for (r, i) in tri] for tri in faces], dtype=np.int64)
    return verts, tris


def cavity_facets(state: KreslingState, faces=None):
    """Side faces plus bottom/top fans closing the cavity for volume purposes."""
    if faces is None:
        faces = stack_faces(state.params)
    verts, tris = faces_to_triangles(state, faces)
    n = state.params.n
    n_rings = state.rings.shape[0]
    bot_c = state.rings[0].mean(axis=0)
    top_c = state.rings[-1].mean(axis=0)
    verts = np.vstack([verts, bot_c[None, :], top_c[None, :]])
    cb = len(verts) - 2
    ct = len(verts) - 1
    extra = []
    for i in range(n):
        j = (i + 1) % n
        extra.append([cb, j, i])                              # bottom fan, -z
        extra.append([ct, (n_rings - 1) * n + i, (n_rings - 1) * n + j])  # top fan, +z
    tris = np.vstack([tris, np.asarray(extra, dtype=np.int64)])
    mesh = TriMesh(verts, tris)
    if mesh.signed_volume() < 0:
        tris = tris[:, ::-1]
        mesh = TriMesh(verts, tris)
    return mesh


def cavity_volume_ml(state: KreslingState) -> float:
    """Enclosed cavity volume of the mid-surface polyhedron, in mL."""
    mesh = cavity_facets(state)
    return enclosed_volume_ml(mesh.vertices, mesh.triangles)


# ---------------------------------------------------------------------------
# kinematics: twist that minimizes bar strain energy at imposed height
# ---------------------------------------------------------------------------

def feasible_band(params: KreslingParams) -> tuple[float, float]:
    """Height band per half-level: [0, min(a, c)] (beyond it some bar must
    stretch for every twist; below 0 the stack self-intersects)."""
    return 0.0, min(params.a, params.c)


def half_energy(params: KreslingParams, H: float, phi: float,
                k_a: float, k_c: float) -> float:
    """Bar strain energy of one half-level (n a-bars + n c-bars)."""
    la, lc = bar_lengths(params.circumradius, params.n, H, abs(phi))
    return params.n * (0.5 * k_a * (la - params.a) ** 2
                       + 0.5 * k_c * (lc - params.c) ** 2)


def min_twist(params: KreslingParams, H: float, k_a: float = 1.0,
              k_c: float = 1.0) -> tuple[float, float]:
    """(phi*, U*) minimizing half-level bar energy at height H.

    Deterministic: fixed coarse grid scan then bounded Brent refinement.
    """
    lo, hi = feasible_band(params)
    if not (lo - 1e-12 <= H <= hi + 1e-9):
        raise InfeasibleHeight(f"H={H:.6g} outside feasible band [{lo:.6g}, {hi:.6g}]")

    def u(phi):
        return half_energy(params, H, phi, k_a, k_c)

    grid = np.linspace(0.0, math.pi, GRID_POINTS)
    vals = np.array([u(p) for p in grid])
    i = int(np.argmin(vals))
    blo = grid[max(0, i - 1)]
    bhi = grid[min(len(grid) - 1, i + 1)]
    res = minimize_scalar(u, bounds=(blo, bhi), method="bounded",
                          options={"xatol": 1e-12})
    phi = float(res.x)
    if u(phi) > vals[i]:
        phi = float(grid[i])
    sign = 1.0 if params.chirality == "right" else -1.0
    return sign * phi, float(u(phi))


def kinematic_state(params: KreslingParams, heights, k_a: float = 1.0,
                    k_c: float = 1.0) -> KreslingState:
    """State at imposed per-level heights; each mirrored pair splits its height
    symmetrically and the two halves carry opposite twists."""
    heights = np.atleast_1d(np.asarray(heights, dtype=np.float64))
    if len(heights) == 1 and params.levels > 1:
        heights = np.full(params.levels, heights[0])
    if len(heights) != params.levels:
        raise InvalidParams(
            f"expected {params.levels} level heights, got {len(heights)}")
    hh = np.empty(2 * params.levels)
    ht = np.empty(2 * params.levels)
    for k, Hk in enumerate(heights):
        half = Hk / 2.0
        phi, _ = min_twist(params, half, k_a, k_c)
        hh[2 * k] = hh[2 * k + 1] = half
        ht[2 * k] = phi
        ht[2 * k + 1] = -phi
    return KreslingState(params=params, half_heights=hh, half_twists=ht)


# ---------------------------------------------------------------------------
# solidification
# ---------------------------------------------------------------------------

def _vertex_offset_directions(verts: np.ndarray, tris: np.ndarray) -> np.ndarray:
    """Per-vertex offset d with d . n_f ~ 1 for each incident face plane (LSQ).

    Scaling d by t/2 moves every incident face plane outward by ~t/2, which
    miters creases correctly.
    """
    tc = verts[tris]
    fn = np.cross(tc[:, 1] - tc[:, 0], tc[:, 2] - tc[:, 0])
    ln = np.linalg.norm(fn, axis=1)
    ln[ln == 0] = 1.0
    fn = fn / ln[:, None]
    incident: dict[int, list[int]] = {}
    for t, tri in enumerate(tris):
        for v in tri:
            incident.setdefault(int(v), []).append(t)
    out = np.zeros_like(verts)
    for v, faces in incident.items():
        normals = fn[faces]
        # deduplicate nearly-identical planes to keep the LSQ well scaled
        uniq = [normals[0]]
        for nrm in normals[1:]:
            if all(abs(nrm @ u) < 1.0 - 1e-9 for u in uniq):
                uniq.append(nrm)
        N = np.array(uniq)
        sol, *_ = np.linalg.lstsq(N, np.ones(len(N)), rcond=None)
        out[v] = sol
    return out


def thicken_faces(vertices: np.ndarray, faces: np.ndarray, t_face: float,
                  max_miter: float = 6.0) -> OrigamiSolid:
    """Extrude faces symmetrically by t_face/2 along +-face normals.

    Closed input sheet -> outer mesh (outward offset) plus cavity mesh
    (inward offset). Open sheet -> a single closed wedge (both offsets
    stitched with side walls along the boundary); cavity_mesh is None.
    """
    if t_face <= 0:
        raise InvalidParams("t_face must be > 0")
    verts = np.asarray(vertices, dtype=np.float64).reshape(-1, 3)
    tris = np.asarray(faces, dtype=np.int64).reshape(-1, 3)
    d = _vertex_offset_directions(verts, tris)
    lens = np.linalg.norm(d, axis=1)
    bad = np.where(lens > max_miter)[0]
    if len(bad):
        offenders = [int(f) for f in np.nonzero(np.isin(tris, bad).any(axis=1))[0]]
        raise SelfIntersection(
            f"offset blow-up at {len(bad)} crease vertices", faces=offenders)
    outer_v = verts + 0.5 * t_face * d
    inner_v = verts - 0.5 * t_face * d

    # reject offsets that flip any face
    def _check_flip(newv, label):
        tc0 = verts[tris]
        tc1 = newv[tris]
        n0 = np.cross(tc0[:, 1] - tc0[:, 0], tc0[:, 2] - tc0[:, 0])
        n1 = np.cross(tc1[:, 1] - tc1[:, 0], tc1[:, 2] - tc1[:, 0])
        dots = np.einsum("ij,ij->i", n0, n1)
        flipped = np.nonzero(dots <= 0)[0]
        if len(flipped):
            raise SelfIntersection(
                f"{label} offset surface crosses itself", faces=[int(f) for f in flipped])

    _check_flip(outer_v, "outer")
    _check_flip(inner_v, "inner")

    # boundary edges (open sheets get stitched side walls)
    edge_count: dict[tuple[int, int], int] = {}
    for tri in tris:
        a, b, c = (int(x) for x in tri)
        for i, j in ((a, b), (b, c), (c, a)):
            key = (i, j) if i < j else (j, i)
            edge_count[key] = edge_count.get(key, 0) + 1
    boundary = [k for k, v in edge_count.items() if v == 1]

    if not boundary:
        order = tris.copy() if TriMesh(outer_v, tris).signed_volume() > 0 \
            else tris[:, ::-1].copy()
        return OrigamiSolid(outer_mesh=TriMesh(outer_v, order),
                            cavity_mesh=TriMesh(inner_v, order.copy()))

    # open sheet: one closed wedge (outer side + reversed inner side + walls)
    nv = len(verts)
    all_v = np.vstack([outer_v, inner_v])
    parts = [tris, tris[:, ::-1] + nv]
    # orient boundary edges as traversed by their single face
    directed = set()
    for tri in tris:
        a, b, c = (int(x) for x in tri)
        for i, j in ((a, b), (b, c), (c, a)):
            key = (i, j) if i < j else (j, i)
            if edge_count[key] == 1:
                directed.add((i, j))
    walls = []
    for (i, j) in directed:
        walls.append([j, i, i + nv])
        walls.append([j, i + nv, j + nv])
    parts.append(np.asarray(walls, dtype=np.int64))
    solid = TriMesh(all_v, np.vstack(parts))
    if solid.signed_volume() < 0:
        solid = TriMesh(all_v, np.vstack(parts)[:, ::-1])
    return OrigamiSolid(outer_mesh=solid, cavity_mesh=None)


def solidify(state: KreslingState, t_face: float | None = None) -> OrigamiSolid:
    """Thicken the closed stack (side sheet + end caps) into outer + cavity meshes."""
    t = t_face if t_face is not None else state.params.t_face
    mesh = cavity_facets(state)
    return thicken_faces(mesh.vertices, mesh.triangles, t)
