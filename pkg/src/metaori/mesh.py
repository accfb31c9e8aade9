"""Indexed triangle meshes: construction, validation, volume, STL/OBJ I/O.

All coordinates are millimeters. Meshes destined for printing must be closed
2-manifolds with consistent outward winding and positive signed volume.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import EmptyMesh, InvalidMesh, OpenCavity, ParseError, TruncatedFile

WELD_TOL = 1e-6          # vertex merge tolerance, mm
DEGENERATE_AREA = 1e-12  # mm^2
STL_HEADER = b"metaori binary STL export" + b" " * 55  # exactly 80 bytes


@dataclass
class TriMesh:
    """Indexed triangle mesh. vertices: (n,3) float64, triangles: (m,3) int."""

    vertices: np.ndarray
    triangles: np.ndarray

    def __post_init__(self):
        self.vertices = np.ascontiguousarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        self.triangles = np.ascontiguousarray(self.triangles, dtype=np.int64).reshape(-1, 3)

    @property
    def n_vertices(self) -> int:
        return int(self.vertices.shape[0])

    @property
    def n_triangles(self) -> int:
        return int(self.triangles.shape[0])

    def triangle_corners(self) -> np.ndarray:
        """(m,3,3) corner coordinates."""
        return self.vertices[self.triangles]

    def face_normals(self, normalized: bool = True) -> np.ndarray:
        tc = self.triangle_corners()
        n = np.cross(tc[:, 1] - tc[:, 0], tc[:, 2] - tc[:, 0])
        if normalized:
            ln = np.linalg.norm(n, axis=1)
            ln[ln == 0.0] = 1.0
            n = n / ln[:, None]
        return n

    def face_areas(self) -> np.ndarray:
        tc = self.triangle_corners()
        return 0.5 * np.linalg.norm(np.cross(tc[:, 1] - tc[:, 0], tc[:, 2] - tc[:, 0]), axis=1)

    def signed_volume(self) -> float:
        """Signed enclosed volume in mm^3 (divergence theorem over facets)."""
        tc = self.triangle_corners()
        return float(np.einsum("ij,ij->", tc[:, 0], np.cross(tc[:, 1], tc[:, 2])) / 6.0)

    def edges_undirected(self) -> np.ndarray:
        e = np.concatenate([self.triangles[:, [0, 1]], self.triangles[:, [1, 2]],
                            self.triangles[:, [2, 0]]])
        return np.sort(e, axis=1)

    def translated(self, offset) -> "TriMesh":
        return TriMesh(self.vertices + np.asarray(offset, dtype=np.float64), self.triangles.copy())

    def copy(self) -> "TriMesh":
        return TriMesh(self.vertices.copy(), self.triangles.copy())


def weld_vertices(points: np.ndarray, tol: float = WELD_TOL):
    """Merge coincident points (first occurrence wins). Returns (vertices, index_map)."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    keys = np.round(pts / tol).astype(np.int64)
    seen: dict[tuple, int] = {}
    index_map = np.empty(len(pts), dtype=np.int64)
    kept: list[int] = []
    for i, key in enumerate(map(tuple, keys)):
        j = seen.get(key)
        if j is None:
            seen[key] = len(kept)
            index_map[i] = len(kept)
            kept.append(i)
        else:
            index_map[i] = j
    return pts[kept], index_map


def mesh_from_soup(corners: np.ndarray, tol: float = WELD_TOL) -> TriMesh:
    """Build an indexed mesh from an (m,3,3) triangle soup by welding vertices."""
    corners = np.asarray(corners, dtype=np.float64).reshape(-1, 3, 3)
    verts, imap = weld_vertices(corners.reshape(-1, 3), tol)
    tris = imap.reshape(-1, 3)
    return TriMesh(verts, tris)


def merge_meshes(*meshes: TriMesh, weld: bool = True) -> TriMesh:
    """Concatenate meshes, optionally welding coincident vertices at WELD_TOL."""
    verts = []
    tris = []
    offset = 0
    for m in meshes:
        verts.append(m.vertices)
        tris.append(m.triangles + offset)
        offset += m.n_vertices
    v = np.concatenate(verts)
    t = np.concatenate(tris)
    if not weld:
        return TriMesh(v, t)
    vw, imap = weld_vertices(v)
    return TriMesh(vw, imap[t])


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

@dataclass
class MeshReport:
    """Validity report for a triangle mesh."""

    n_vertices: int = 0
    n_triangles: int = 0
    n_edges: int = 0
    closed_manifold: bool = False
    boundary_edges: int = 0
    nonmanifold_edges: int = 0
    winding_consistent: bool = False
    degenerate_triangles: int = 0
    duplicate_triangles: int = 0
    self_intersections: int = -1  # -1 = not checked
    signed_volume_mm3: float = 0.0
    euler_characteristic: int = 0
    n_components: int = 0

    @property
    def ok(self) -> bool:
        return (self.closed_manifold and self.winding_consistent
                and self.degenerate_triangles == 0 and self.signed_volume_mm3 > 0.0
                and (self.self_intersections <= 10))

    def summary(self) -> str:
        lines = [
            f"vertices={self.n_vertices} triangles={self.n_triangles} edges={self.n_edges}",
            f"closed_manifold={self.closed_manifold} boundary_edges={self.boundary_edges} "
            f"nonmanifold_edges={self.nonmanifold_edges}",
            f"winding_consistent={self.winding_consistent} degenerate={self.degenerate_triangles} "
            f"duplicates={self.duplicate_triangles}",
            f"self_intersections={self.self_intersections}",
            f"signed_volume={self.signed_volume_mm3:.6f} mm^3",
            f"euler_characteristic={self.euler_characteristic} components={self.n_components}",
            f"ok={self.ok}",
        ]
        return "\n".join(lines)


def _edge_incidence(mesh: TriMesh):
    """Map undirected edge -> list of (triangle index, direction sign)."""
    inc: dict[tuple[int, int], list[tuple[int, int]]] = {}
    tris = mesh.triangles
    for t in range(len(tris)):
        a, b, c = (int(x) for x in tris[t])
        for i, j in ((a, b), (b, c), (c, a)):
            key = (i, j) if i < j else (j, i)
            sign = 1 if i < j else -1
            inc.setdefault(key, []).append((t, sign))
    return inc


def validate_mesh(mesh: TriMesh, check_self_intersections: bool = True) -> MeshReport:
    """Full validity report. Always returns a report, never raises."""
    rep = MeshReport(n_vertices=mesh.n_vertices, n_triangles=mesh.n_triangles)
    if mesh.n_triangles == 0:
        rep.self_intersections = 0
        return rep

    areas = mesh.face_areas()
    rep.degenerate_triangles = int(np.sum(areas <= DEGENERATE_AREA))

    tri_sorted = np.sort(mesh.triangles, axis=1)
    _, counts = np.unique(tri_sorted, axis=0, return_counts=True)
    rep.duplicate_triangles = int(np.sum(counts > 1))

    inc = _edge_incidence(mesh)
    rep.n_edges = len(inc)
    boundary = sum(1 for lst in inc.values() if len(lst) == 1)
    nonman = sum(1 for lst in inc.values() if len(lst) > 2)
    rep.boundary_edges = boundary
    rep.nonmanifold_edges = nonman
    rep.closed_manifold = boundary == 0 and nonman == 0

    # consistent winding: every interior edge is traversed once per direction
    consistent = True
    for lst in inc.values():
        if len(lst) == 2 and lst[0][1] == lst[1][1]:
            consistent = False
            break
    rep.winding_consistent = consistent and rep.closed_manifold

    # vertices actually referenced (isolated vertices excluded from Euler count)
    used = np.unique(mesh.triangles)
    rep.euler_characteristic = int(len(used) - rep.n_edges + mesh.n_triangles)

    rep.n_components = _count_components(mesh, inc)
    rep.signed_volume_mm3 = mesh.signed_volume()

    if check_self_intersections:
        rep.self_intersections = count_self_intersections(mesh)
    return rep


def _count_components(mesh: TriMesh, inc) -> int:
    n = mesh.n_triangles
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for lst in inc.values():
        if len(lst) >= 2:
            r0 = find(lst[0][0])
            for t, _ in lst[1:]:
                r = find(t)
                if r != r0:
                    parent[r] = r0
    return len({find(t) for t in range(n)})


def connected_components(mesh: TriMesh) -> list[TriMesh]:
    """Split into edge-connected components (each re-indexed)."""
    inc = _edge_incidence(mesh)
    n = mesh.n_triangles
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for lst in inc.values():
        if len(lst) >= 2:
            r0 = find(lst[0][0])
            for t, _ in lst[1:]:
                r = find(t)
                if r != r0:
                    parent[r] = r0
    groups: dict[int, list[int]] = {}
    for t in range(n):
        groups.setdefault(find(t), []).append(t)
    out = []
    for tris in groups.values():
        sub = mesh.triangles[tris]
        used, inv = np.unique(sub, return_inverse=True)
        out.append(TriMesh(mesh.vertices[used], inv.reshape(-1, 3)))
    return out


# ---------------------------------------------------------------------------
# triangle-triangle intersection (exact-sign predicates with Fraction fallback)
# ---------------------------------------------------------------------------

def _orient3d(a, b, c, d) -> int:
    """Sign of det[b-a; c-a; d-a]; exact Fraction fallback near zero."""
    ad = (a[0] - d[0], a[1] - d[1], a[2] - d[2])
    bd = (b[0] - d[0], b[1] - d[1], b[2] - d[2])
    cd = (c[0] - d[0], c[1] - d[1], c[2] - d[2])
    det = (ad[0] * (bd[1] * cd[2] - bd[2] * cd[1])
           - ad[1] * (bd[0] * cd[2] - bd[2] * cd[0])
           + ad[2] * (bd[0] * cd[1] - bd[1] * cd[0]))
    perm = (abs(ad[0]) * (abs(bd[1]) * abs(cd[2]) + abs(bd[2]) * abs(cd[1]))
            + abs(ad[1]) * (abs(bd[0]) * abs(cd[2]) + abs(bd[2]) * abs(cd[0]))
            + abs(ad[2]) * (abs(bd[0]) * abs(cd[1]) + abs(bd[1]) * abs(cd[0])))
    err = 1e-14 * perm
    if det > err:
        return 1
    if det < -err:
        return -1
    # exact arithmetic on the float values (floats are exact rationals)
    fa = [Fraction(x) for x in a]
    fb = [Fraction(x) for x in b]
    fc = [Fraction(x) for x in c]
    fd = [Fraction(x) for x in d]
    ad = [fa[i] - fd[i] for i in range(3)]
    bd = [fb[i] - fd[i] for i in range(3)]
    cd = [fc[i] - fd[i] for i in range(3)]
    det = (ad[0] * (bd[1] * cd[2] - bd[2] * cd[1])
           - ad[1] * (bd[0] * cd[2] - bd[2] * cd[0])
           + ad[2] * (bd[0] * cd[1] - bd[1] * cd[0]))
    return (det > 0) - (det < 0)


def _segment_hits_triangle(p, q, a, b, c) -> bool:
    """Closed-set intersection of segment pq with triangle abc (non-coplanar path)."""
    sp = _orient3d(a, b, c, p)
    sq = _orient3d(a, b, c, q)
    if sp == sq:
        if sp != 0:
            return False
        # both endpoints in the triangle plane: coplanar case handled by caller
        return False
    s1 = _orient3d(p, q, a, b)
    s2 = _orient3d(p, q, b, c)
    s3 = _orient3d(p, q, c, a)
    neg = (s1 < 0) or (s2 < 0) or (s3 < 0)
    pos = (s1 > 0) or (s2 > 0) or (s3 > 0)
    return not (neg and pos)


def _orient2d(a, b, c) -> int:
    det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    perm = abs(b[0] - a[0]) * abs(c[1] - a[1]) + abs(b[1] - a[1]) * abs(c[0] - a[0])
    if det > 1e-14 * perm:
        return 1
    if det < -1e-14 * perm:
        return -1
    det = ((Fraction(b[0]) - Fraction(a[0])) * (Fraction(c[1]) - Fraction(a[1]))
           - (Fraction(b[1]) - Fraction(a[1])) * (Fraction(c[0]) - Fraction(a[0])))
    return (det > 0) - (det < 0)


def _point_in_tri_2d(p, a, b, c) -> bool:
    s1, s2, s3 = _orient2d(a, b, p), _orient2d(b, c, p), _orient2d(c, a, p)
    neg = (s1 < 0) or (s2 < 0) or (s3 < 0)
    pos = (s1 > 0) or (s2 > 0) or (s3 > 0)
    return not (neg and pos)


def _segments_cross_2d(p, q, a, b) -> bool:
    d1, d2 = _orient2d(a, b, p), _orient2d(a, b, q)
    d3, d4 = _orient2d(p, q, a), _orient2d(p, q, b)
    if ((d1 > 0) != (d2 > 0) or d1 == 0 or d2 == 0) and \
       ((d3 > 0) != (d4 > 0) or d3 == 0 or d4 == 0):
        # conservative on collinear touching; refine collinear overlap
        if d1 == d2 == d3 == d4 == 0:
            lo1, hi1 = sorted((p[0], q[0])), None
            # overlap on the dominant axis
            ax = 0 if abs(b[0] - a[0]) >= abs(b[1] - a[1]) else 1
            lo1, hi1 = sorted((p[ax], q[ax]))
            lo2, hi2 = sorted((a[ax], b[ax]))
            return hi1 >= lo2 and hi2 >= lo1
        return True
    return False


def _tri_tri_intersect(t1: np.ndarray, t2: np.ndarray) -> bool:
    """Do two triangles (3x3 float arrays) share any point?"""
    a = [tuple(map(float, v)) for v in t1]
    b = [tuple(map(float, v)) for v in t2]
    sb = [_orient3d(a[0], a[1], a[2], v) for v in b]
    if all(s > 0 for s in sb) or all(s < 0 for s in sb):
        return False
    sa = [_orient3d(b[0], b[1], b[2], v) for v in a]
    if all(s > 0 for s in sa) or all(s < 0 for s in sa):
        return False
    if all(s == 0 for s in sb):
        # coplanar: project on the dominant axis of the common plane
        n = np.cross(t1[1] - t1[0], t1[2] - t1[0])
        k = int(np.argmax(np.abs(n)))
        keep = [i for i in range(3) if i != k]
        a2 = [(v[keep[0]], v[keep[1]]) for v in a]
        b2 = [(v[keep[0]], v[keep[1]]) for v in b]
        for i in range(3):
            for j in range(3):
                if _segments_cross_2d(a2[i], a2[(i + 1) % 3], b2[j], b2[(j + 1) % 3]):
                    return True
        return any(_point_in_tri_2d(p, *b2) for p in a2) or \
            any(_point_in_tri_2d(p, *a2) for p in b2)
    for i in range(3):
        if _segment_hits_triangle(a[i], a[(i + 1) % 3], b[0], b[1], b[2]):
            return True
        if _segment_hits_triangle(b[i], b[(i + 1) % 3], a[0], a[1], a[2]):
            return True
    return False


def count_self_intersections(mesh: TriMesh, limit: int | None = None) -> int:
    """Count intersecting triangle pairs that do not share a vertex index.

    Candidate pairs come from a uniform grid over triangle bounding boxes;
    each candidate is tested with sign-exact predicates.
    """
    m = mesh.n_triangles
    if m < 2:
        return 0
    tc = mesh.triangle_corners()
    lo = tc.min(axis=1)
    hi = tc.max(axis=1)
    ext = hi - lo
    cell = float(np.median(ext[ext.sum(axis=1) > 0].max(axis=1))) if m else 1.0
    if not np.isfinite(cell) or cell <= 0:
        cell = 1.0
    cell *= 2.0
    grid: dict[tuple[int, int, int], list[int]] = {}
    ilo = np.floor(lo / cell).astype(np.int64)
    ihi = np.floor(hi / cell).astype(np.int64)
    for t in range(m):
        for ix in range(ilo[t, 0], ihi[t, 0] + 1):
            for iy in range(ilo[t, 1], ihi[t, 1] + 1):
                for iz in range(ilo[t, 2], ihi[t, 2] + 1):
                    grid.setdefault((ix, iy, iz), []).append(t)
    tris = mesh.triangles
    checked: set[tuple[int, int]] = set()
    hits = 0
    for bucket in grid.values():
        nb = len(bucket)
        for u in range(nb):
            i = bucket[u]
            for v in range(u + 1, nb):
                j = bucket[v]
                key = (i, j) if i < j else (j, i)
                if key in checked:
                    continue
                checked.add(key)
                if np.any(hi[i] < lo[j]) or np.any(hi[j] < lo[i]):
                    continue
                if set(map(int, tris[i])) & set(map(int, tris[j])):
                    continue
                if _tri_tri_intersect(tc[i], tc[j]):
                    hits += 1
                    if limit is not None and hits > limit:
                        return hits
    return hits


# ---------------------------------------------------------------------------
# volume helpers
# ---------------------------------------------------------------------------

MM3_PER_ML = 1000.0


def enclosed_volume_ml(vertices: np.ndarray, triangles: np.ndarray) -> float:
    """|signed volume| of a closing facet set, in mL. Raises OpenCavity if open."""
    m = TriMesh(np.asarray(vertices, dtype=np.float64), np.asarray(triangles))
    inc = _edge_incidence(m)
    if any(len(lst) != 2 for lst in inc.values()):
        raise OpenCavity("facet set does not close a volume")
    return abs(m.signed_volume()) / MM3_PER_ML


# ---------------------------------------------------------------------------
# STL / OBJ export and import
# ---------------------------------------------------------------------------

_STL_RECORD = np.dtype([("normal", "<f4", 3), ("verts", "<f4", (3, 3)), ("attr", "<u2")])


def export_mesh(mesh: TriMesh, fmt: str = "stl-binary", validate: bool = True) -> bytes:
    """Serialize a mesh. Formats: 'stl-binary' (80B header + count + 50B/tri)
    or 'obj-ascii' (v/f records, 1-based indices)."""
    if mesh.n_triangles == 0:
        raise EmptyMesh("mesh has zero triangles")
    if validate:
        rep = validate_mesh(mesh, check_self_intersections=False)
        if not (rep.closed_manifold and rep.winding_consistent
                and rep.signed_volume_mm3 > 0.0 and rep.degenerate_triangles == 0):
            raise InvalidMesh("mesh failed validation:\n" + rep.summary())
    if fmt == "stl-binary":
        rec = np.zeros(mesh.n_triangles, dtype=_STL_RECORD)
        corners32 = mesh.triangle_corners().astype(np.float32)
        # normals from the f32 coordinates so export->read->export is byte-stable
        c64 = corners32.astype(np.float64)
        n = np.cross(c64[:, 1] - c64[:, 0], c64[:, 2] - c64[:, 0])
        ln = np.linalg.norm(n, axis=1)
        ln[ln == 0.0] = 1.0
        rec["normal"] = (n / ln[:, None]).astype(np.float32)
        rec["verts"] = corners32
        return STL_HEADER + struct.pack("<I", mesh.n_triangles) + rec.tobytes()
    if fmt == "obj-ascii":
        out = ["# metaori OBJ export"]
        for v in mesh.vertices:
            out.append("v %.17g %.17g %.17g" % (v[0], v[1], v[2]))
        for t in mesh.triangles:
            out.append("f %d %d %d" % (t[0] + 1, t[1] + 1, t[2] + 1))
        return ("\n".join(out) + "\n").encode("ascii")
    raise InvalidMesh(f"unknown export format: {fmt!r}")


def read_mesh(data: bytes, fmt: str = "stl-binary") -> TriMesh:
    """Inverse of export_mesh up to vertex welding at 1e-6 mm."""
    if fmt == "stl-binary":
        if len(data) < 84:
            raise TruncatedFile("STL shorter than header + count", offset=len(data))
        (count,) = struct.unpack_from("<I", data, 80)
        need = 84 + 50 * count
        if len(data) < need:
            raise TruncatedFile(
                f"STL declares {count} triangles ({need} bytes) but has {len(data)}",
                offset=len(data))
        rec = np.frombuffer(data, dtype=_STL_RECORD, count=count, offset=84)
        return mesh_from_soup(rec["verts"].astype(np.float64))
    if fmt == "obj-ascii":
        verts: list[list[float]] = []
        faces: list[list[int]] = []
        for ln_no, raw in enumerate(data.decode("ascii", errors="replace").splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if parts[0] == "v":
                if len(parts) < 4:
                    raise ParseError(f"line {ln_no}: vertex needs 3 coordinates", line=ln_no)
                try:
                    verts.append([float(x) for x in parts[1:4]])
                except ValueError:
                    raise ParseError(f"line {ln_no}: bad vertex coordinate", line=ln_no)
            elif parts[0] == "f":
                if len(parts) != 4:
                    raise ParseError(f"line {ln_no}: only triangles supported", line=ln_no)
                idx = []
                for p in parts[1:]:
                    tok = p.split("/")[0]
                    try:
                        i = int(tok)
                    except ValueError:
                        raise ParseError(f"line {ln_no}: bad face index {tok!r}", line=ln_no)
                    if i < 0:
                        i = len(verts) + 1 + i
                    idx.append(i - 1)
                faces.append(idx)
                for i in idx:
                    if i < 0 or i >= len(verts):
                        raise ParseError(
                            f"line {ln_no}: face index {i + 1} out of range", line=ln_no)
        if not faces:
            raise ParseError("no faces found")
        soup = np.asarray(verts, dtype=np.float64)[np.asarray(faces)]
        return mesh_from_soup(soup)
    raise ParseError(f"unknown format: {fmt!r}")


# ---------------------------------------------------------------------------
# primitive builders (shared by tests and lid construction)
# ---------------------------------------------------------------------------

def make_box(size=(1.0, 1.0, 1.0), origin=(0.0, 0.0, 0.0)) -> TriMesh:
    """Axis-aligned box with outward winding (12 triangles)."""
    sx, sy, sz = size
    ox, oy, oz = origin
    v = np.array([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0],
                  [0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1]], dtype=np.float64)
    v = v * np.array([sx, sy, sz]) + np.array([ox, oy, oz])
    t = np.array([
        [0, 2, 1], [0, 3, 2],   # bottom (z=0), outward -z
        [4, 5, 6], [4, 6, 7],   # top
        [0, 1, 5], [0, 5, 4],   # y=0
        [1, 2, 6], [1, 6, 5],   # x=sx
        [2, 3, 7], [2, 7, 6],   # y=sy
        [3, 0, 4], [3, 4, 7],   # x=0
    ])
    return TriMesh(v, t)


def make_prism(polygon_xy: np.ndarray, z0: float, z1: float) -> TriMesh:
    """Extrude a CCW simple polygon into a closed prism (fan-triangulated caps)."""
    poly = np.asarray(polygon_xy, dtype=np.float64)
    n = len(poly)
    bot = np.column_stack([poly, np.full(n, z0)])
    top = np.column_stack([poly, np.full(n, z1)])
    verts = np.vstack([bot, top])
    tris = []
    for i in range(1, n - 1):
        tris.append([0, i + 1, i])          # bottom cap faces -z
        tris.append([n, n + i, n + i + 1])  # top cap faces +z
    for i in range(n):
        j = (i + 1) % n
        tris.append([i, j, n + j])
        tris.append([i, n + j, n + i])
    return TriMesh(verts, np.asarray(tris))


def regular_polygon(n: int, circumradius: float, z_rot: float = 0.0) -> np.ndarray:
    ang = z_rot + 2.0 * np.pi * np.arange(n) / n
    return np.column_stack([circumradius * np.cos(ang), circumradius * np.sin(ang)])
