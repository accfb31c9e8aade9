// Shared types mirroring the design service JSON surfaces.

export type Config = {
  schema: number;
  preset?: string;
  kresling?: Record<string, number | string>;
  metashell?: Record<string, number | number[] | string>;
  material?: Record<string, number | null>;
  integration?: Record<string, number>;
  segments?: { infill: number; levels: number }[];
};

export type MeshResponse = {
  vertices: number[][];
  triangles: number[][];
  report: {
    closed_manifold: boolean;
    winding_consistent: boolean;
    degenerate_triangles: number;
    signed_volume_mm3: number;
    euler_characteristic: number;
    n_components: number;
  };
  heights: Record<string, number>;
  inflatable: boolean;
};

export type Samples = { d?: number[]; F?: number[]; V?: number[]; P?: number[] };

export type SnapEvent = {
  kind: string;
  branch: string;
  x: number;
  y: number;
  segment: number;
};

export type CurvesResponse = {
  fd_meta: Samples;
  fd_ori: Samples;
  fd_combined: Samples;
  pv: Samples;
  events: SnapEvent[];
  bistable: boolean;
  snap_pressure_mbar: number | null;
  elongation_pct: number | null;
};
