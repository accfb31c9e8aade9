"""Meta-Ori: parametric design and reduced-order mechanics for monolithic
origami-metashell inflatable actuators."""

__version__ = "0.1.0"

from .kresling import (KreslingParams, FlatPattern, FoldedUnit, KreslingState,
                       OrigamiSolid, build_flat_pattern, fold_basic_unit,
                       mirror_and_stack, assemble_origami, kinematic_state,
                       thicken_faces, solidify)
from .mesh import TriMesh, MeshReport, validate_mesh, export_mesh, read_mesh
from .metashell import (MetashellParams, MetashellSolid, beam_profile,
                        build_unit_cell_outline, assemble_metashell)
from .mechanics import (MaterialParams, FDCurve, PVCurve, SegmentSpec,
                        metashell_fd, elastica_oracle, origami_fd, combined_fd,
                        cavity_volume, pv_curve, detect_events,
                        simulate_sequence, predict_elongation)

__all__ = [name for name in dir() if not name.startswith("_")]
