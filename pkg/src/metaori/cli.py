"""Command-line driver.

Exit codes: 0 success, 1 validation failure, 2 solver failure, 3 I/O failure.
The report commands write delimited outputs and render matplotlib figures
alongside them.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import errors as err
from .config import (CONFIG_SCHEMA, PRESETS, DesignConfig, evaluate_design,
                     parse_config, preset_config, run_sweep, sweep_csv)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_SOLVER = 2
EXIT_IO = 3

_VALIDATION_ERRORS = (err.InvalidParams, err.SchemaError, err.UnitError,
                      err.InvariantError, err.BadPath, err.InvalidMesh,
                      err.FitError, err.GeometryConflict, err.OutOfDomain)
_SOLVER_ERRORS = (err.NoConvergence, err.ClosureFailure, err.InfeasibleHeight,
                  err.InfeasibleFold, err.NotBistable, err.ModelDomain,
                  err.SelfIntersection, err.WrapFailure, err.AlignmentError,
                  err.DomainMismatch, err.DegenerateVolumeMap, err.OpenCavity)
_IO_ERRORS = (err.ParseError, err.EmptyMesh, OSError)


def classify(exc: BaseException) -> int:
    if isinstance(exc, _VALIDATION_ERRORS):
        return EXIT_VALIDATION
    if isinstance(exc, _SOLVER_ERRORS):
        return EXIT_SOLVER
    if isinstance(exc, _IO_ERRORS):
        return EXIT_IO
    raise exc


def _load_config(args) -> DesignConfig:
    if args.preset:
        return preset_config(args.preset)
    if not args.config:
        raise err.SchemaError("provide --config FILE or --preset NAME")
    try:
        text = Path(args.config).read_text()
    except OSError as e:
        raise err.ParseError(f"cannot read config: {e}")
    return parse_config(text)


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_generate(args) -> int:
    from .integrate import integrate
    from .mesh import export_mesh

    cfg = _load_config(args)
    out = _outdir(args)
    asm = integrate(cfg.metashell, cfg.kresling, cfg.integration,
                    validate=not args.no_validate)
    fmt = args.format
    ext = "stl" if fmt == "stl-binary" else "obj"
    mesh_path = out / f"meta_ori.{ext}"
    mesh_path.write_bytes(export_mesh(asm.mesh, fmt))
    (out / "config.json").write_text(cfg.serialize())
    if asm.report is not None:
        (out / "mesh_report.txt").write_text(asm.report.summary() + "\n")
        print(asm.report.summary())
        if not asm.report.ok:
            print("mesh FAILED validation", file=sys.stderr)
            return EXIT_VALIDATION
    print(f"wrote {mesh_path} ({asm.mesh.n_triangles} triangles, "
          f"{asm.mesh.signed_volume():.1f} mm^3)")
    return EXIT_OK


def cmd_curves(args) -> int:
    from .report import plot_fd, plot_pv

    cfg = _load_config(args)
    out = _outdir(args)
    res = evaluate_design(cfg)
    (out / "fd_meta.csv").write_text(res["fd_meta"].to_csv())
    (out / "fd_ori.csv").write_text(res["fd_ori"].to_csv())
    (out / "fd_combined.csv").write_text(res["fd_combined"].to_csv())
    (out / "pv.csv").write_text(res["pv"].to_csv())
    (out / "events.txt").write_text(
        "".join(ev.record() + "\n" for ev in res["events"]))
    plot_fd([res["fd_meta"], res["fd_ori"], res["fd_combined"]],
            out / "fd.png", events=[e for e in res["events"]
                                    if e.kind.startswith("force")])
    plot_pv(res["pv"], out / "pv.png")
    print(f"bistable={res['bistable']} "
          f"snap_pressure={res['snap_pressure_mbar']:.1f} mbar "
          f"elongation={res['elongation_pct']:.1f}%"
          if res["elongation_pct"] is not None else f"bistable={res['bistable']}")
    print(f"wrote curves + figures to {out}")
    return EXIT_OK


def cmd_sequence(args) -> int:
    from .mechanics import simulate_sequence
    from .report import plot_sequence

    cfg = _load_config(args)
    if not cfg.segments:
        raise err.InvariantError("config has no segments",
                                 invariant="sequence requires segments")
    out = _outdir(args)
    res = simulate_sequence(cfg.segments, cfg.material, n_steps=args.steps)
    (out / "trajectory.csv").write_text(res.to_csv())
    (out / "events.txt").write_text(
        "".join(ev.record() + "\n" for ev in res.events))
    plot_sequence(res, out / "sequence.png")
    for ev in res.events:
        print(ev.record())
    print(f"wrote trajectory + figure to {out}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    from .report import plot_sweep

    cfg = _load_config(args)
    values = [float(x) for x in args.values.split(",") if x.strip() != ""]
    rows = run_sweep(cfg, args.axis, values)
    out = _outdir(args)
    (out / "sweep.csv").write_text(sweep_csv(rows))
    plot_sweep(rows, args.axis, out / "sweep.png")
    print(sweep_csv(rows), end="")
    return EXIT_OK


def cmd_validate(args) -> int:
    if args.mesh:
        from .mesh import read_mesh, validate_mesh
        try:
            data = Path(args.mesh).read_bytes()
        except OSError as e:
            raise err.ParseError(f"cannot read mesh: {e}")
        fmt = "obj-ascii" if args.mesh.endswith(".obj") else "stl-binary"
        mesh = read_mesh(data, fmt)
        rep = validate_mesh(mesh, check_self_intersections=not args.fast)
        print(rep.summary())
        return EXIT_OK if rep.ok else EXIT_VALIDATION
    cfg = _load_config(args)
    print("config valid")
    print(cfg.serialize())
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn
    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def cmd_schema(args) -> int:
    print(json.dumps(CONFIG_SCHEMA, indent=2, sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="metaori",
                                 description="Meta-Ori inflatable actuator design engine")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_config_args(p):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--preset", choices=sorted(PRESETS),
                       help="named preset instead of a config file")

    g = sub.add_parser("generate", help="config -> printable mesh (STL/OBJ)")
    add_config_args(g)
    g.add_argument("--out", default="out")
    g.add_argument("--format", choices=["stl-binary", "obj-ascii"],
                   default="stl-binary")
    g.add_argument("--no-validate", action="store_true",
                   help="skip the self-intersection check")
    g.set_defaults(fn=cmd_generate)

    c = sub.add_parser("curves", help="config -> FD/PV CSVs + figures")
    add_config_args(c)
    c.add_argument("--out", default="out")
    c.set_defaults(fn=cmd_curves)

    s = sub.add_parser("sequence", help="config with segments -> trajectory")
    add_config_args(s)
    s.add_argument("--out", default="out")
    s.add_argument("--steps", type=int, default=400)
    s.set_defaults(fn=cmd_sequence)

    w = sub.add_parser("sweep", help="sweep one numeric parameter")
    add_config_args(w)
    w.add_argument("--axis", required=True, help="e.g. metashell.h")
    w.add_argument("--values", required=True, help="comma-separated values")
    w.add_argument("--out", default="out")
    w.set_defaults(fn=cmd_sweep)

    v = sub.add_parser("validate", help="validate a config or a mesh file")
    add_config_args(v)
    v.add_argument("--mesh", help="STL/OBJ file to validate instead")
    v.add_argument("--fast", action="store_true",
                   help="skip the self-intersection check")
    v.set_defaults(fn=cmd_validate)

    sv = sub.add_parser("serve", help="run the local design service")
    sv.add_argument("--port", type=int, default=8787)
    sv.add_argument("--host", default="127.0.0.1")
    sv.set_defaults(fn=cmd_serve)

    sc = sub.add_parser("schema", help="print the config JSON schema")
    sc.set_defaults(fn=cmd_schema)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except Exception as e:  # noqa: BLE001 - classified into exit codes
        code = classify(e)
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
