"""Local design service consumed by the interactive UI.

Loopback-only by default, no auth, stateless: identical request bodies give
identical responses (an optional in-process cache keys on the body hash).
Geometry in mm, pressure in mbar, volume in mL.
"""

from __future__ import annotations

import hashlib
import json

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import errors as err
from .config import CONFIG_SCHEMA, PRESETS, evaluate_design, parse_config


def _error_response(e: Exception):
    payload = {"error": type(e).__name__, "detail": str(e)}
    if isinstance(e, err.SchemaError):
        payload["pointer"] = e.pointer
    if isinstance(e, err.InvariantError):
        payload["invariant"] = e.invariant
    validation = (err.InvalidParams, err.SchemaError, err.UnitError,
                  err.InvariantError, err.FitError, err.GeometryConflict)
    status = 422 if isinstance(e, validation) else 500
    return JSONResponse(status_code=status, content=payload)


def create_app(cache: bool = True) -> FastAPI:
    app = FastAPI(title="metaori design service", docs_url=None, redoc_url=None)
    store: dict[str, dict] = {}

    def cached(key_prefix: str, body: dict, compute):
        if not cache:
            return compute()
        key = key_prefix + hashlib.sha256(
            json.dumps(body, sort_keys=True).encode()).hexdigest()
        if key not in store:
            store[key] = compute()
        return store[key]

    @app.exception_handler(err.MetaOriError)
    async def _handle(request: Request, exc: err.MetaOriError):
        return _error_response(exc)

    @app.get("/api/schema")
    async def get_schema():
        return CONFIG_SCHEMA

    @app.get("/api/presets")
    async def get_presets():
        return PRESETS

    @app.post("/api/mesh")
    async def post_mesh(request: Request):
        body = await request.json()

        def compute():
            from .integrate import integrate
            from .mesh import validate_mesh

            cfg = parse_config(body)
            asm = integrate(cfg.metashell, cfg.kresling, cfg.integration,
                            validate=False)
            rep = validate_mesh(asm.mesh, check_self_intersections=False)
            return {
                "vertices": asm.mesh.vertices.round(9).tolist(),
                "triangles": asm.mesh.triangles.tolist(),
                "report": {
                    "closed_manifold": rep.closed_manifold,
                    "winding_consistent": rep.winding_consistent,
                    "degenerate_triangles": rep.degenerate_triangles,
                    "signed_volume_mm3": rep.signed_volume_mm3,
                    "euler_characteristic": rep.euler_characteristic,
                    "n_components": rep.n_components,
                },
                "heights": asm.heights,
                "inflatable": asm.inflatable,
            }

        return cached("mesh:", body, compute)

    @app.post("/api/curves")
    async def post_curves(request: Request):
        body = await request.json()

        def compute():
            cfg = parse_config(body)
            res = evaluate_design(cfg)
            return {
                "fd_meta": {"d": res["fd_meta"].d.tolist(),
                            "F": res["fd_meta"].F.tolist()},
                "fd_ori": {"d": res["fd_ori"].d.tolist(),
                           "F": res["fd_ori"].F.tolist()},
                "fd_combined": {"d": res["fd_combined"].d.tolist(),
                                "F": res["fd_combined"].F.tolist()},
                "pv": {"V": res["pv"].V.tolist(), "P": res["pv"].P.tolist()},
                "events": [{"kind": ev.kind, "branch": ev.branch,
                            "x": ev.x, "y": ev.y, "segment": ev.segment}
                           for ev in res["events"]],
                "bistable": res["bistable"],
                "snap_pressure_mbar": res["snap_pressure_mbar"],
                "elongation_pct": res["elongation_pct"],
            }

        return cached("curves:", body, compute)

    @app.post("/api/sequence")
    async def post_sequence(request: Request):
        body = await request.json()

        def compute():
            from .mechanics import simulate_sequence

            cfg = parse_config(body)
            if not cfg.segments:
                raise err.InvariantError("config has no segments",
                                         invariant="sequence requires segments")
            res = simulate_sequence(cfg.segments, cfg.material, n_steps=200)
            return {
                "V": res.V.tolist(),
                "P": res.P.tolist(),
                "H": res.H.tolist(),
                "branch": res.branch.tolist(),
                "events": [{"kind": ev.kind, "branch": ev.branch,
                            "x": ev.x, "y": ev.y, "segment": ev.segment}
                           for ev in res.events],
            }

        return cached("seq:", body, compute)

    return app
