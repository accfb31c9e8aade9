"""Bistable cylindrical metashell generation.

The unit cell is a pair of parallel clamped-clamped cosine beams (rise h,
thickness t, span l) between support columns of width c, joined mid-span by
a block that carries the load to the next row. The planar cell row is wrapped
onto a cylinder and extruded radially.

Unrolled frame: u = circumferential coordinate, v = axial coordinate,
w = radial offset from the mid-surface. One row is (l + c)/2 tall, which
reproduces the published overall dimensions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import shapely
from shapely.geometry import Point, Polygon, box
from shapely.geometry.polygon import orient
from shapely.ops import unary_union

from .errors import GeometryConflict, InvalidParams, OutOfDomain, WrapFailure
from .mesh import TriMesh, weld_vertices

BEAM_SAMPLES = 64      # sample intervals per beam span
FILLET_SEGMENTS = 24
SEGMENT_LEN = 1.8      # max boundary segment length before wrapping, mm


@dataclass
class MetashellParams:
    """Unit-cell and shell dimensions (Fig.-style symbols), mm."""

    c: float = 12.50           # support column width
    l: float = 22.50           # curved beam span
    t: float = 1.25            # beam thickness
    h: float = 9.40            # beam apex rise
    r: float = 7.60            # junction fillet radius
    delta: float = 0.63        # clearance gap between the paired beams
    wall_height: float = 12.5  # extra wall above and below the cell rows
    rows: int = 1
    cols: int = 4
    depth: float = 5.0         # radial shell thickness
    infill_per_row: tuple = (0.99,)
    pitch_factor: float = 1.0  # preset compression to hit published diameters
    block_margin: float = 1.5  # center block height above the upper beam apex

    def __post_init__(self):
        self.infill_per_row = tuple(float(x) for x in np.atleast_1d(self.infill_per_row))
        if len(self.infill_per_row) == 1 and self.rows > 1:
            self.infill_per_row = self.infill_per_row * self.rows
        self.validate()

    def validate(self):
        for name in ("c", "l", "t", "h", "wall_height", "depth"):
            if not (getattr(self, name) > 0):
                raise InvalidParams(f"{name} must be > 0")
        if self.r < 0 or self.delta < 0:
            raise InvalidParams("r and delta must be >= 0")
        if int(self.rows) != self.rows or self.rows < 1:
            raise InvalidParams("rows must be an integer >= 1")
        if int(self.cols) != self.cols or self.cols < 2:
            raise InvalidParams("cols must be an integer >= 2")
        self.rows = int(self.rows)
        self.cols = int(self.cols)
        if self.t >= self.h:
            raise GeometryConflict(f"beam thickness t={self.t} must be below rise h={self.h}")
        if len(self.infill_per_row) != self.rows:
            raise InvalidParams(
                f"infill_per_row needs {self.rows} entries, got {len(self.infill_per_row)}")
        for x in self.infill_per_row:
            if not (0.0 < x <= 1.0):
                raise InvalidParams(f"infill fractions must be in (0, 1], got {x}")
        if 2.0 * self.r >= self.l:
            raise GeometryConflict(f"fillets overlap: 2r={2 * self.r} >= l={self.l}")
        if self.beam_base < self.t / 2.0:
            raise GeometryConflict(
                "cell does not fit: delta >= available clearance "
                f"(beam base {self.beam_base:.3f} < t/2)")
        if not (0.0 < self.pitch_factor <= 1.5):
            raise InvalidParams("pitch_factor must be in (0, 1.5]")

    # --- derived dimensions ---

    @property
    def pitch(self) -> float:
        return self.l + self.c

    @property
    def row_height(self) -> float:
        return self.pitch / 2.0

    @property
    def Q(self) -> float:
        """Rise-to-thickness ratio governing bistability."""
        return self.h / self.t

    @property
    def beam_base(self) -> float:
        """Midline height of the lower beam ends above the row bottom."""
        return (self.row_height - self.block_margin - self.h
                - 1.5 * self.t - self.delta)

    @property
    def travel_cap(self) -> float:
        """Geometric apex travel before the inverted pair rests on the row bottom."""
        return self.row_height - self.block_margin - 2.0 * self.t - self.delta

    @property
    def mid_radius(self) -> float:
        return self.pitch_factor * self.cols * self.pitch / (2.0 * math.pi)

    @property
    def outer_radius(self) -> float:
        return self.mid_radius + self.depth / 2.0

    @property
    def inner_radius(self) -> float:
        return self.mid_radius - self.depth / 2.0

    @property
    def open_height(self) -> float:
        return self.rows * self.row_height + 2.0 * self.wall_height

    @property
    def closed_height(self) -> float:
        """Kinematic closed height with every row at its travel cap."""
        return self.open_height - self.rows * self.travel_cap


@dataclass
class MetashellSolid:
    mesh: TriMesh
    open_height: float
    closed_height: float
    params: MetashellParams = None
    end_rings: dict = field(default_factory=dict)  # integration stitch data


def beam_profile(x: float, h: float, l: float) -> float:
    """Beam midline rise at x in [-l/2, 0]: (h/2)(1 - cos(2 pi x / l))."""
    if not (-l / 2.0 - 1e-12 <= x <= 1e-12):
        raise OutOfDomain(f"x={x} outside [-l/2, 0] = [{-l / 2.0}, 0]")
    return (h / 2.0) * (1.0 - math.cos(2.0 * math.pi * x / l))


def _beam_rise(params: MetashellParams, s: np.ndarray) -> np.ndarray:
    """Rise along the full span, s in [0, l]; mirrored cosine halves."""
    return (params.h / 2.0) * (1.0 - np.cos(2.0 * np.pi * s / params.l))


@dataclass
class CellOutline:
    polygon: Polygon
    pitch: float
    zero_clearance: bool
    beam_base: float
    column_top: float


def _beam_polygon(params: MetashellParams, y_mid_at_ends: float) -> Polygon:
    s = np.linspace(0.0, params.l, BEAM_SAMPLES + 1)
    u = params.c / 2.0 + s
    y = y_mid_at_ends + _beam_rise(params, s)
    up = np.column_stack([u, y + params.t / 2.0])
    dn = np.column_stack([u[::-1], y[::-1] - params.t / 2.0])
    return Polygon(np.vstack([up, dn]))


def _fillet(params: MetashellParams, corner_u: float, corner_v: float,
            side: int) -> Polygon:
    """Concave fillet at a beam-underside / column-face corner.

    side = +1 fills the quadrant at larger u (left column), -1 at smaller u.
    """
    r = params.r
    if r <= 0:
        return None
    cu = corner_u + side * r
    cv = corner_v - r
    sq = box(min(corner_u, cu), cv, max(corner_u, cu), corner_v)
    return sq.difference(Point(cu, cv).buffer(r, quad_segs=FILLET_SEGMENTS))


def _taper(params: MetashellParams, face_u: float, top_v: float, side: int) -> Polygon:
    """Linear widening of the column toward the beam junction, spanning r."""
    extra = params.r / 4.0
    if extra <= 0:
        return None
    return Polygon([(face_u, top_v - params.r), (face_u + side * extra, top_v),
                    (face_u, top_v)])


def cell_solids(params: MetashellParams):
    """Solid pieces of one unit cell in [0, pitch] x [0, row_height]."""
    p = params.pitch
    rh = params.row_height
    t = params.t
    y1 = params.beam_base                  # lower beam end midline
    y2 = y1 + t + params.delta             # upper beam end midline
    col_top = y2 + t / 2.0
    w_blk = params.c / 2.0

    pieces = [
        box(0.0, 0.0, params.c / 2.0, col_top),
        box(p - params.c / 2.0, 0.0, p, col_top),
        _beam_polygon(params, y1),
        _beam_polygon(params, y2),
        box(p / 2.0 - w_blk / 2.0, y1 + params.h - t / 2.0,
            p / 2.0 + w_blk / 2.0, rh),
    ]
    for poly in (_fillet(params, params.c / 2.0, y1 - t / 2.0, +1),
                 _fillet(params, p - params.c / 2.0, y1 - t / 2.0, -1),
                 _taper(params, params.c / 2.0, col_top, +1),
                 _taper(params, p - params.c / 2.0, col_top, -1)):
        if poly is not None:
            pieces.append(poly)
    return pieces, col_top


def build_unit_cell_outline(params: MetashellParams) -> CellOutline:
    """Planar outline of one unit cell (union of columns, beam pair, block,
    fillets and tapers)."""
    pieces, col_top = cell_solids(params)
    poly = unary_union(pieces)
    if poly.geom_type != "Polygon":
        raise GeometryConflict("unit cell pieces do not form a single region")
    return CellOutline(polygon=poly, pitch=params.pitch,
                       zero_clearance=(params.delta == 0.0),
                       beam_base=params.beam_base, column_top=col_top)


def unrolled_outline(params: MetashellParams) -> Polygon:
    """Canonical unrolled cell region: one pitch-wide window of the periodic
    shell (walls, staggered rows, columns, beam pairs).

    Pieces are tiled periodically (copies at u - p and u + p) and clipped to
    [0, pitch] so the cut profiles at both window edges match exactly; the
    full shell is this region replicated cols times.
    """
    p = params.pitch
    rh = params.row_height
    canvas = box(0.0, -params.wall_height, p,
                 params.rows * rh + params.wall_height)
    pieces = [
        box(0.0, -params.wall_height, p, 0.0),
        box(0.0, params.rows * rh, p, params.rows * rh + params.wall_height),
    ]
    base, _ = cell_solids(params)
    for row in range(params.rows):
        du = (row % 2) * (p / 2.0)
        dv = row * rh
        for piece in base:
            moved = shapely.affinity.translate(piece, xoff=du, yoff=dv)
            for shift in (-p, 0.0, p):
                part = shapely.affinity.translate(moved, xoff=shift)
                clipped = part.intersection(canvas)
                if not clipped.is_empty and clipped.area > 1e-12:
                    pieces.append(clipped)
    region = unary_union(pieces)
    if region.geom_type != "Polygon":
        raise GeometryConflict(
            f"shell outline is not a single region ({region.geom_type})")
    return region


def wrap_and_extrude(region: Polygon, params: MetashellParams,
                     open_ends: bool = False):
    """Triangulate the canonical cell, replicate cols times, wrap onto the
    cylinder and extrude radially.

    Cut edges at cell boundaries weld shut after wrapping. With
    open_ends=True the two end annuli are omitted and their boundary rings
    (ordered by angle, at the inner and outer radius) are returned for lid
    stitching.
    """
    R = params.mid_radius
    half_d = params.depth / 2.0
    if half_d >= R:
        raise WrapFailure(f"depth/2 = {half_d} >= mid-surface radius {R:.3f}")
    p = params.pitch
    W = params.cols * p
    v_min = -params.wall_height
    v_max = params.rows * params.row_height + params.wall_height

    # segment length divides the pitch exactly: periodic subdivision
    seg_len = p / math.ceil(p / SEGMENT_LEN)
    region = orient(region.segmentize(seg_len), sign=1.0)
    tri_coll = shapely.constrained_delaunay_triangles(region)
    tris2d = []
    for g in tri_coll.geoms:
        xy = np.asarray(g.exterior.coords)[:3]
        # drop triangles outside the region (CDT fills hole hulls)
        cen = xy.mean(axis=0)
        if not region.contains(Point(cen)):
            continue
        u, v = xy[1] - xy[0], xy[2] - xy[0]
        if u[0] * v[1] - u[1] * v[0] < 0:
            xy = xy[::-1]
        tris2d.append(xy)
    if not tris2d:
        raise GeometryConflict("triangulation produced no faces")
    tris2d = np.asarray(tris2d)

    def to3d(uv, w, du):
        ang = 2.0 * math.pi * (uv[:, 0] + du) / W
        rad = R + w
        return np.column_stack([rad * np.cos(ang), rad * np.sin(ang), uv[:, 1]])

    rings = [np.asarray(region.exterior.coords)]
    rings += [np.asarray(i.coords) for i in region.interiors]
    wall_edges = []      # (a2, b2) with material on the left of a->b
    end_segs = {"bottom": [], "top": []}
    for ring in rings:
        for k in range(len(ring) - 1):
            a2, b2 = ring[k], ring[k + 1]
            on_cut = (abs(a2[0]) < 1e-9 and abs(b2[0]) < 1e-9) or                      (abs(a2[0] - p) < 1e-9 and abs(b2[0] - p) < 1e-9)
            if on_cut:
                continue  # welded to the neighbouring cell copy
            is_bottom = abs(a2[1] - v_min) < 1e-9 and abs(b2[1] - v_min) < 1e-9
            is_top = abs(a2[1] - v_max) < 1e-9 and abs(b2[1] - v_max) < 1e-9
            if open_ends and (is_bottom or is_top):
                end_segs["bottom" if is_bottom else "top"].append((a2[0], b2[0]))
                continue
            wall_edges.append((a2, b2))

    soup = []
    for col in range(params.cols):
        du = col * p
        for xy in tris2d:
            soup.append(to3d(xy, +half_d, du))         # outer skin, CCW -> +r
            soup.append(to3d(xy[::-1], -half_d, du))   # inner skin reversed
        for a2, b2 in wall_edges:
            a_out = to3d(np.array([a2]), +half_d, du)[0]
            a_in = to3d(np.array([a2]), -half_d, du)[0]
            b_out = to3d(np.array([b2]), +half_d, du)[0]
            b_in = to3d(np.array([b2]), -half_d, du)[0]
            soup.append(np.array([a_out, b_in, b_out]))
            soup.append(np.array([a_out, a_in, b_in]))

    soup = np.asarray(soup)
    verts, imap = weld_vertices(soup.reshape(-1, 3))
    mesh = TriMesh(verts, imap.reshape(-1, 3))

    ring_info = {}
    if open_ends:
        for key, segs in end_segs.items():
            us = sorted({round(float(u), 9) for seg in segs for u in seg})
            us = [u for u in us if u < p - 1e-9]
            all_u = [u + col * p for col in range(params.cols) for u in us]
            ring_info[key] = {
                "angles": np.array([2.0 * math.pi * u / W for u in sorted(all_u)]),
                "v": v_min if key == "bottom" else v_max,
            }
    return mesh, ring_info


def assemble_metashell(params: MetashellParams, open_ends: bool = False) -> MetashellSolid:
    """Watertight metashell solid (or open-ended variant for integration)."""
    region = unrolled_outline(params)
    mesh, ring_info = wrap_and_extrude(region, params, open_ends=open_ends)
    return MetashellSolid(mesh=mesh, open_height=params.open_height,
                          closed_height=params.closed_height, params=params,
                          end_rings=ring_info)


def expected_window_count(params: MetashellParams) -> int:
    """Through-window (handle) count of the shell wall: per row one window under
    the beams per cell, two in the split beam gap, one above per pillar gap;
    adjacent rows share the interface band."""
    return params.cols * (3 * params.rows + 1)
