"""Merge origami and metashell into the monolithic Meta-Ori solid.

No boolean engine: every junction is a shared boundary ring. The lids are
discs at the shell ends; the origami tube stands between the lid faces; the
shell end annuli mate with the lid faces ring-for-ring. The cavity is reached
only through the port hole in the bottom lid.

Assembly frame: shell bottom face at z = 0, shell top at z = shell height;
lids extend below 0 and above the shell height by their thickness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AlignmentError, FitError, InvalidParams
from .kresling import KreslingParams, KreslingState, rest_state, stack_faces
from .mesh import TriMesh, validate_mesh, weld_vertices
from .metashell import MetashellParams, assemble_metashell
from . import kresling


@dataclass
class IntegrationParams:
    lid_thickness: float = 2.0
    port_diameter: float = 4.0
    clearance: float = 1.0        # radial gap origami <-> shell interior
    port_segments: int = 48

    def __post_init__(self):
        if self.lid_thickness <= 0:
            raise InvalidParams("lid_thickness must be > 0")
        if self.port_diameter < 0:
            raise InvalidParams("port_diameter must be >= 0")
        if self.clearance < 0:
            raise InvalidParams("clearance must be >= 0")


@dataclass
class MetaOriAssembly:
    mesh: TriMesh                  # single welded printable mesh
    shell_mesh: TriMesh            # closed shell component (reference)
    tube_outer_radius: float
    port_diameter: float
    inflatable: bool
    report: object = None
    heights: dict = field(default_factory=dict)


def _ring_polyline(angles: np.ndarray, radius: float, z: float) -> np.ndarray:
    return np.column_stack([radius * np.cos(angles), radius * np.sin(angles),
                            np.full(len(angles), z)])


def _zip_rings(outer: np.ndarray, inner: np.ndarray, up: bool) -> np.ndarray:
    """Triangle soup of an annulus between two closed CCW loops at equal z.

    up=True orients normals +z, else -z.
    """
    no, ni = len(outer), len(inner)
    j0 = int(np.argmin(np.linalg.norm(inner[:, :2] - outer[0, :2], axis=1)))
    tris = []
    i, j = 0, 0
    while i < no or j < ni:
        pi, pin = outer[i % no], outer[(i + 1) % no]
        qj, qjn = inner[(j0 + j) % ni], inner[(j0 + j + 1) % ni]
        adv_outer = False
        if j >= ni:
            adv_outer = True
        elif i < no:
            adv_outer = (np.linalg.norm(pin[:2] - qj[:2])
                         <= np.linalg.norm(qjn[:2] - pi[:2]))
        if adv_outer:
            tris.append((pi, pin, qj))
            i += 1
        else:
            tris.append((pi, qjn, qj))
            j += 1
    soup = np.asarray(tris)
    if not up:
        soup = soup[:, ::-1]
    return soup


def _fan(center: np.ndarray, loop: np.ndarray, up: bool) -> np.ndarray:
    tris = []
    n = len(loop)
    for i in range(n):
        tris.append((center, loop[i], loop[(i + 1) % n]))
    soup = np.asarray(tris)
    if not up:
        soup = soup[:, ::-1]
    return soup


def _wall(loop_top: np.ndarray, loop_bot: np.ndarray, outward: bool) -> np.ndarray:
    """Vertical wall between two stacked equal-count loops (CCW from +z)."""
    n = len(loop_top)
    tris = []
    for i in range(n):
        j = (i + 1) % n
        a, b = loop_top[i], loop_top[j]
        c, d = loop_bot[i], loop_bot[j]
        tris.append((a, d, b))
        tris.append((a, c, d))
    soup = np.asarray(tris)
    if not outward:
        soup = soup[:, ::-1]
    return soup


def origami_tube(state: KreslingState, t_face: float):
    """Thickened side sheet with planar end rings (for lid stitching).

    Boundary vertices are offset horizontally so tube ends stay in their
    z-planes. Returns (outer sheet soup, inner sheet soup, end rings dict).
    """
    faces = stack_faces(state.params)
    verts, tris = kresling.faces_to_triangles(state, faces)
    d = kresling._vertex_offset_directions(verts, tris)
    n = state.params.n
    n_rings = state.rings.shape[0]
    fn = TriMesh(verts, tris).face_normals()
    incident: dict[int, list[int]] = {}
    for t, tri in enumerate(tris):
        for v in tri:
            incident.setdefault(int(v), []).append(t)
    # end rings: constrain the offset to the ring plane (horizontal) so the
    # tube ends stay planar for lid stitching
    for ring in (0, n_rings - 1):
        for i in range(n):
            v = ring * n + i
            N = fn[incident[v]][:, :2]
            sol, *_ = np.linalg.lstsq(N, np.ones(len(N)), rcond=None)
            if not np.all(np.isfinite(sol)) or np.linalg.norm(sol) > 6.0:
                raise AlignmentError("degenerate boundary offset direction")
            d[v] = np.array([sol[0], sol[1], 0.0])
    outer_v = verts + 0.5 * t_face * d
    inner_v = verts - 0.5 * t_face * d
    outer = outer_v[tris]
    inner = inner_v[tris][:, ::-1]
    rings = {
        "bottom_outer": outer_v[0:n],
        "bottom_inner": inner_v[0:n],
        "top_outer": outer_v[(n_rings - 1) * n:(n_rings - 1) * n + n],
        "top_inner": inner_v[(n_rings - 1) * n:(n_rings - 1) * n + n],
    }
    return outer, inner, rings


def _lid(angles: np.ndarray, r_in: float, r_out: float, z_face: float,
         z_back: float, hex_outer: np.ndarray, hex_inner: np.ndarray,
         port_r: float, port_segments: int, bottom: bool):
    """One lid as a triangle soup.

    z_face: plane mating the shell/origami; z_back: exterior plate face.
    For the bottom lid z_back < z_face and the port (if any) pierces it.
    """
    soup = []
    face_up = bottom          # mating face normal +z on the bottom lid
    ring_in = _ring_polyline(angles, r_in, z_face)
    ring_out_face = _ring_polyline(angles, r_out, z_face)
    ring_out_back = _ring_polyline(angles, r_out, z_back)

    if port_r > 0.0:
        pa = 2.0 * math.pi * np.arange(port_segments) / port_segments
        port_face = _ring_polyline(pa, port_r, z_face)
        port_back = _ring_polyline(pa, port_r, z_back)
        # cavity floor: port ring -> origami inner ring
        soup.append(_zip_rings(hex_inner, port_face, up=face_up))
        # port bore wall: normal toward the axis
        if bottom:
            soup.append(_wall(port_face, port_back, outward=False))
        else:
            soup.append(_wall(port_back, port_face, outward=False))
        # back plate: annulus port -> rim
        back = _zip_rings(ring_out_back, port_back, up=not face_up)
        soup.append(back)
    else:
        center = np.array([0.0, 0.0, z_face])
        soup.append(_fan(center, hex_inner, up=face_up))
        center_b = np.array([0.0, 0.0, z_back])
        soup.append(_fan(center_b, _ring_polyline(angles, r_out, z_back),
                         up=not face_up))

    # exterior shelf: origami outer ring -> shell inner ring
    soup.append(_zip_rings(ring_in, hex_outer, up=face_up))
    # rim wall r_out between back plate and the shell end
    if bottom:
        soup.append(_wall(ring_out_face, ring_out_back, outward=True))
    else:
        soup.append(_wall(ring_out_back, ring_out_face, outward=True))
    return np.concatenate(soup)


def integrate(shell_params: MetashellParams, kresling_params: KreslingParams,
              integ: IntegrationParams | None = None,
              validate: bool = True) -> MetaOriAssembly:
    """Build the monolithic Meta-Ori mesh (shell + origami tube + lids)."""
    integ = integ or IntegrationParams()
    shell_h = shell_params.open_height
    if shell_h <= 0:
        raise AlignmentError("shell height must be positive")

    # origami at its stress-free state, placed flush between the lid faces
    H_half, phi, _ = rest_state(kresling_params)
    rest_total = 2 * kresling_params.levels * H_half
    if rest_total > shell_h + 1e-9:
        raise FitError(
            f"origami stress-free height {rest_total:.3f} exceeds the shell "
            f"interior {shell_h:.3f}")
    halves = 2 * kresling_params.levels
    hh = np.full(halves, shell_h / halves)
    ht = np.empty(halves)
    ht[0::2] = phi
    ht[1::2] = -phi
    state = KreslingState(params=kresling_params, half_heights=hh, half_twists=ht)

    outer_soup, inner_soup, rings = origami_tube(state, kresling_params.t_face)
    r_tube = float(np.max(np.linalg.norm(rings["bottom_outer"][:, :2], axis=1)))
    r_in = shell_params.inner_radius
    if r_tube + integ.clearance > r_in:
        raise FitError(
            f"origami outer radius {r_tube:.3f} + clearance {integ.clearance} "
            f"exceeds shell inner radius {r_in:.3f}")
    port_r = integ.port_diameter / 2.0
    if port_r > 0 and port_r >= kresling_params.circumradius * math.cos(
            math.pi / kresling_params.n) - kresling_params.t_face:
        raise FitError("port does not fit inside the origami footprint")

    shell = assemble_metashell(shell_params, open_ends=True)
    dz = shell_params.wall_height   # shift so the shell bottom face is z = 0
    shell_mesh_open = shell.mesh.translated((0.0, 0.0, dz))

    soups = [outer_soup, inner_soup,
             shell_mesh_open.triangle_corners()]
    for key, bottom in (("bottom", True), ("top", False)):
        info = shell.end_rings[key]
        angles = info["angles"]
        z_face = info["v"] + dz
        z_back = z_face - integ.lid_thickness if bottom \
            else z_face + integ.lid_thickness
        hex_outer = rings[f"{key}_outer"]
        hex_inner = rings[f"{key}_inner"]
        soups.append(_lid(angles, r_in, shell_params.outer_radius, z_face,
                          z_back, hex_outer, hex_inner,
                          port_r if bottom else 0.0,
                          integ.port_segments, bottom))
    soup = np.concatenate([np.asarray(s).reshape(-1, 3, 3) for s in soups])
    verts, imap = weld_vertices(soup.reshape(-1, 3))
    mesh = TriMesh(verts, imap.reshape(-1, 3))

    shell_closed = assemble_metashell(shell_params, open_ends=False)
    assembly = MetaOriAssembly(
        mesh=mesh,
        shell_mesh=shell_closed.mesh.translated((0.0, 0.0, dz)),
        tube_outer_radius=r_tube,
        port_diameter=integ.port_diameter,
        inflatable=integ.port_diameter > 0.0,
        heights={"shell": shell_h,
                 "assembly": shell_h + 2 * integ.lid_thickness,
                 "origami_rest": rest_total})
    if validate:
        assembly.report = validate_mesh(mesh, check_self_intersections=True)
    return assembly


def component_solids(shell_params: MetashellParams,
                     kresling_params: KreslingParams,
                     integ: IntegrationParams | None = None) -> dict:
    """Closed stand-alone solids of each component (volume bookkeeping)."""
    integ = integ or IntegrationParams()
    shell = assemble_metashell(shell_params)
    shell_mesh = shell.mesh.translated((0.0, 0.0, shell_params.wall_height))

    shell_h = shell_params.open_height
    H_half, phi, _ = rest_state(kresling_params)
    halves = 2 * kresling_params.levels
    hh = np.full(halves, shell_h / halves)
    ht = np.empty(halves)
    ht[0::2] = phi
    ht[1::2] = -phi
    state = KreslingState(params=kresling_params, half_heights=hh, half_twists=ht)
    outer_soup, inner_soup, rings = origami_tube(state, kresling_params.t_face)
    caps = [
        _zip_rings(rings["bottom_outer"], rings["bottom_inner"], up=False),
        _zip_rings(rings["top_outer"], rings["top_inner"], up=True),
    ]
    tube_soup = np.concatenate([outer_soup, inner_soup] + caps)
    verts, imap = weld_vertices(tube_soup.reshape(-1, 3))
    tube_mesh = TriMesh(verts, imap.reshape(-1, 3))

    lids = []
    r_in = shell_params.inner_radius
    port_r = integ.port_diameter / 2.0
    open_shell = assemble_metashell(shell_params, open_ends=True)
    for key, bottom in (("bottom", True), ("top", False)):
        info = open_shell.end_rings[key]
        angles = info["angles"]
        z_face = info["v"] + shell_params.wall_height
        z_back = z_face - integ.lid_thickness if bottom \
            else z_face + integ.lid_thickness
        hexo = rings[f"{key}_outer"]
        hexi = rings[f"{key}_inner"]
        soup = _lid(angles, r_in, shell_params.outer_radius, z_face, z_back,
                    hexo, hexi, port_r if bottom else 0.0,
                    integ.port_segments, bottom)
        # close the mated face: tube footprint + shell end annulus
        ring_rin = _ring_polyline(angles, r_in, z_face)
        ring_rout = _ring_polyline(angles, shell_params.outer_radius, z_face)
        closing = [
            _zip_rings(hexo, hexi, up=bottom),
            _zip_rings(ring_rout, ring_rin, up=bottom),
        ]
        lid_soup = np.concatenate([soup] + closing)
        v, im = weld_vertices(lid_soup.reshape(-1, 3))
        lids.append(TriMesh(v, im.reshape(-1, 3)))
    return {"shell": shell_mesh, "tube": tube_mesh,
            "lid_bottom": lids[0], "lid_top": lids[1]}
