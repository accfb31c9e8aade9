"""Design configuration: JSON schema, named presets, parsing, sweeps.

One versioned JSON format (schema: 1). Lengths are mm; angles are degrees at
this boundary only and are converted to radians immediately after parsing.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass

import numpy as np
import jsonschema

from .errors import BadPath, InvariantError, MetaOriError, SchemaError, UnitError
from .integrate import IntegrationParams
from .kresling import KreslingParams
from .mechanics import MaterialParams, SegmentSpec
from .metashell import MetashellParams

SCHEMA_VERSION = 1

_NUM = {"type": "number"}
_POSINT = {"type": "integer", "minimum": 1}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "metaori design config",
    "type": "object",
    "additionalProperties": False,
    "required": ["schema"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "preset": {"enum": ["paper", "paper-biseg"]},
        "kresling": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n": {"type": "integer", "minimum": 3},
                "a": _NUM, "b": _NUM,
                "theta_deg": _NUM, "alpha_deg": _NUM,
                "t_face": _NUM,
                "levels": _POSINT,
                "chirality": {"enum": ["right", "left"]},
            },
        },
        "metashell": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "c": _NUM, "l": _NUM, "t": _NUM, "h": _NUM, "r": _NUM,
                "delta": _NUM, "wall_height": _NUM,
                "rows": _POSINT, "cols": {"type": "integer", "minimum": 2},
                "depth": _NUM,
                "infill_per_row": {"type": "array", "items": _NUM, "minItems": 1},
                "pitch_factor": _NUM,
                "block_margin": _NUM,
            },
        },
        "material": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "E": _NUM, "s_min": _NUM,
                "bar_area": {"type": ["number", "null"]},
                "hinge_k": _NUM,
            },
        },
        "integration": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "lid_thickness": _NUM, "port_diameter": _NUM,
                "clearance": _NUM, "port_segments": {"type": "integer", "minimum": 8},
            },
        },
        "segments": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["infill", "levels"],
                "properties": {"infill": _NUM, "levels": _POSINT},
            },
        },
    },
}

# published unit-cell and print parameters, plus the origami transmitter and
# calibration defaults documented in the design notes
PRESETS: dict[str, dict] = {
    "paper": {
        "schema": SCHEMA_VERSION,
        "kresling": {
            "n": 6,
            "a": 11.684653082223877,
            "b": 14.0,
            "theta_deg": math.degrees(1.169057460061080),
            "alpha_deg": math.degrees(2.380114884708359),
            "t_face": 1.2,
            "levels": 2,
            "chirality": "right",
        },
        "metashell": {
            "c": 12.50, "l": 22.50, "t": 1.25, "h": 9.40, "r": 7.60,
            "delta": 0.63, "wall_height": 12.5, "rows": 1, "cols": 4,
            "depth": 5.0, "infill_per_row": [0.99],
            "pitch_factor": 0.925647835432707,
            "block_margin": 1.5,
        },
        "material": {"E": 12.0, "s_min": 0.3, "bar_area": 0.72, "hinge_k": 0.0},
        "integration": {"lid_thickness": 2.0, "port_diameter": 4.0,
                        "clearance": 1.0, "port_segments": 48},
    },
    "paper-biseg": {
        "schema": SCHEMA_VERSION,
        "kresling": {
            "n": 6,
            "a": 8.938148166814193,
            "b": 14.0,
            "theta_deg": math.degrees(1.034249194939504),
            "alpha_deg": math.degrees(2.380114884708359),
            "t_face": 1.2,
            "levels": 4,
            "chirality": "right",
        },
        "metashell": {
            "c": 12.50, "l": 22.50, "t": 1.25, "h": 9.40, "r": 7.60,
            "delta": 0.63, "wall_height": 12.5, "rows": 2, "cols": 4,
            "depth": 5.0, "infill_per_row": [0.99, 0.60],
            "pitch_factor": 0.925647835432707,
            "block_margin": 1.5,
        },
        "material": {"E": 12.0, "s_min": 0.3, "bar_area": 0.72, "hinge_k": 0.0},
        "integration": {"lid_thickness": 2.0, "port_diameter": 4.0,
                        "clearance": 1.0, "port_segments": 48},
        # bottom segment first (99% infill), top segment snaps first
        "segments": [{"infill": 0.99, "levels": 2}, {"infill": 0.60, "levels": 2}],
    },
}


@dataclass
class DesignConfig:
    kresling: KreslingParams
    metashell: MetashellParams
    material: MaterialParams
    integration: IntegrationParams
    segments: list[SegmentSpec] | None
    raw: dict

    def serialize(self) -> str:
        return json.dumps(self.raw, indent=2, sort_keys=True)


def _deep_merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _deep_merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def _check_finite(obj, path=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _check_finite(v, f"{path}/{k}")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            _check_finite(v, f"{path}/{i}")
    elif isinstance(obj, float) and not math.isfinite(obj):
        raise UnitError(f"non-finite number at {path}")


def parse_config(text_or_dict) -> DesignConfig:
    """Parse and fully validate a config document.

    Raises SchemaError (with JSON pointer), UnitError, or InvariantError.
    """
    if isinstance(text_or_dict, (str, bytes)):
        try:
            doc = json.loads(text_or_dict)
        except json.JSONDecodeError as e:
            raise SchemaError(f"invalid JSON: {e}", pointer="")
    else:
        doc = copy.deepcopy(text_or_dict)

    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        pointer = "/" + "/".join(str(p) for p in e.absolute_path)
        raise SchemaError(f"{e.message} (at {pointer})", pointer=pointer)
    _check_finite(doc)

    preset = doc.get("preset")
    if preset is not None:
        base = PRESETS[preset]
        merged = _deep_merge(base, {k: v for k, v in doc.items()
                                    if k not in ("preset", "schema")})
    else:
        merged = _deep_merge(PRESETS["paper"], {k: v for k, v in doc.items()
                                                if k != "schema"})
    merged["schema"] = SCHEMA_VERSION
    if preset is not None:
        merged["preset"] = preset
    merged = json.loads(json.dumps(merged, sort_keys=True))

    k = merged["kresling"]
    m = merged["metashell"]
    theta = math.radians(k["theta_deg"])
    alpha = math.radians(k["alpha_deg"])
    if not (0.0 < theta < math.pi):
        raise InvariantError(f"theta_deg={k['theta_deg']} outside (0, 180)",
                             invariant="0 < theta < pi")
    if not (0.0 < alpha <= math.pi):
        raise InvariantError(f"alpha_deg={k['alpha_deg']} outside (0, 180]",
                             invariant="0 < alpha <= pi")
    try:
        kres = KreslingParams(n=k["n"], a=k["a"], b=k["b"], theta=theta,
                              alpha=alpha, t_face=k["t_face"], levels=k["levels"],
                              chirality=k["chirality"])
        shell = MetashellParams(c=m["c"], l=m["l"], t=m["t"], h=m["h"], r=m["r"],
                                delta=m["delta"], wall_height=m["wall_height"],
                                rows=m["rows"], cols=m["cols"], depth=m["depth"],
                                infill_per_row=tuple(m["infill_per_row"]),
                                pitch_factor=m["pitch_factor"],
                                block_margin=m["block_margin"])
        mat_d = merged["material"]
        mat = MaterialParams(E=mat_d["E"], s_min=mat_d["s_min"],
                             bar_area=mat_d["bar_area"], hinge_k=mat_d["hinge_k"])
        integ_d = merged["integration"]
        integ = IntegrationParams(lid_thickness=integ_d["lid_thickness"],
                                  port_diameter=integ_d["port_diameter"],
                                  clearance=integ_d["clearance"],
                                  port_segments=integ_d["port_segments"])
    except MetaOriError as e:
        raise InvariantError(str(e), invariant=str(e)) from e

    segments = None
    if merged.get("segments"):
        segs = merged["segments"]
        if len(segs) != shell.rows:
            raise InvariantError(
                f"{len(segs)} segments for {shell.rows} shell rows",
                invariant="one segment per shell row")
        segments = []
        for i, s in enumerate(segs):
            try:
                seg_shell = MetashellParams(
                    c=m["c"], l=m["l"], t=m["t"], h=m["h"], r=m["r"],
                    delta=m["delta"], wall_height=m["wall_height"], rows=1,
                    cols=m["cols"], depth=m["depth"],
                    infill_per_row=(s["infill"],),
                    pitch_factor=m["pitch_factor"], block_margin=m["block_margin"])
                seg_k = KreslingParams(n=k["n"], a=k["a"], b=k["b"], theta=theta,
                                       alpha=alpha, t_face=k["t_face"],
                                       levels=s["levels"], chirality=k["chirality"])
                segments.append(SegmentSpec(shell=seg_shell, kresling=seg_k,
                                            infill=s["infill"]))
            except MetaOriError as e:
                raise InvariantError(f"segment {i}: {e}", invariant=str(e)) from e

    return DesignConfig(kresling=kres, metashell=shell, material=mat,
                        integration=integ, segments=segments, raw=merged)


def preset_config(name: str) -> DesignConfig:
    if name not in PRESETS:
        raise InvariantError(f"unknown preset {name!r}",
                             invariant="referenced preset exists")
    return parse_config({"schema": SCHEMA_VERSION, "preset": name})


# ---------------------------------------------------------------------------
# parameter sweeps
# ---------------------------------------------------------------------------

SWEEP_HEADER = "value,bistable,snap_pressure_mbar,elongation_pct,error"


def run_sweep(config: DesignConfig, axis: str, values) -> list[dict]:
    """Evaluate snap pressure / bistability / elongation along one parameter.

    Failures are captured per row; the sweep never aborts on a row error.
    """
    from . import mechanics as mech

    parts = axis.split(".")
    if len(parts) != 2 or parts[0] not in ("kresling", "metashell", "material",
                                           "integration"):
        raise BadPath(f"axis {axis!r} must be '<section>.<field>'")
    section, fieldname = parts
    base = config.raw
    if fieldname not in base.get(section, {}):
        raise BadPath(f"unknown field {axis!r}")
    if not isinstance(base[section][fieldname], (int, float)) or \
            isinstance(base[section][fieldname], bool):
        raise BadPath(f"field {axis!r} is not numeric")

    rows = []
    for v in values:
        doc = copy.deepcopy(base)
        doc[section][fieldname] = float(v)
        doc.pop("preset", None)
        row = {"value": float(v), "bistable": None, "snap_pressure_mbar": None,
               "elongation_pct": None, "error": ""}
        try:
            cfg = parse_config(doc)
            row["bistable"] = mech.is_bistable(cfg.metashell)
            res = evaluate_design(cfg)
            row["snap_pressure_mbar"] = res["snap_pressure_mbar"]
            row["elongation_pct"] = res["elongation_pct"]
            row["bistable"] = res["bistable"]
        except MetaOriError as e:
            row["error"] = f"{type(e).__name__}: {e}"
        rows.append(row)
    return rows


def sweep_csv(rows: list[dict]) -> str:
    out = [SWEEP_HEADER]
    for r in rows:
        def fmt(x):
            if x is None:
                return ""
            if isinstance(x, bool):
                return str(int(x))
            return f"{x:.9g}"
        out.append(",".join([fmt(r["value"]), fmt(r["bistable"]),
                             fmt(r["snap_pressure_mbar"]), fmt(r["elongation_pct"]),
                             r["error"].replace(",", ";")]))
    return "\n".join(out) + "\n"


def evaluate_design(config: DesignConfig, n_fd: int = 301,
                    n_vol: int = 101) -> dict:
    """Curves, events and summary scalars for one design (service/CLI core)."""
    from . import mechanics as mech

    shell, kres, mat = config.metashell, config.kresling, config.material
    meta = mech.metashell_fd(shell, mat, n_samples=n_fd)
    H_rest = mech.origami_rest_height(kres)
    d_hi = min(float(meta.d[-1]), 0.92 * H_rest)
    ori = mech.origami_fd(kres, mat, n_samples=max(61, n_fd // 4), d_max=d_hi)
    comb = mech.combined_fd(meta, ori)

    H_lo = H_rest - d_hi
    H_grid = np.linspace(H_lo, H_rest, n_vol)
    V_grid = mech.volume_map(kres, mat, H_grid)
    pv = mech.pv_curve(comb, H_rest, H_grid, V_grid)

    bistable = mech.is_bistable_curve(pv)
    snap_p = float(np.max(pv.P)) if len(pv.P) else None
    try:
        elong = mech.predict_elongation(shell, mat,
                                        config.integration.lid_thickness)
    except MetaOriError:
        elong = None
    return {
        "fd_meta": meta, "fd_ori": ori, "fd_combined": comb, "pv": pv,
        "events": pv.events + mech.detect_events(comb),
        "bistable": bistable,
        "snap_pressure_mbar": snap_p,
        "elongation_pct": elong,
    }
