// Parameter panel model built from the service's config JSON schema.
//
// One control per numeric schema field. Range limits come from the schema
// where stated plus the domain invariants the engine enforces; values are
// clamped at the control so out-of-range drags never issue a request.
// Unknown (newer-schema) fields degrade to raw numeric inputs with a warning.

export type ControlDescriptor = {
  section: string;
  field: string;
  label: string;
  min?: number;
  max?: number;
  step?: number;
  integer: boolean;
  raw: boolean;         // unknown to this UI version: no limits, show warning
  unit: string;
};

type SchemaDoc = {
  properties?: Record<string, { properties?: Record<string, unknown> }>;
};

// invariant-derived limits and display units for the fields this UI knows
const KNOWN: Record<string, Partial<ControlDescriptor>> = {
  "kresling.n": { min: 3, max: 12, step: 1, unit: "" },
  "kresling.a": { min: 0.1, max: 100, unit: "mm" },
  "kresling.b": { min: 0.1, max: 100, unit: "mm" },
  "kresling.theta_deg": { min: 0.1, max: 179.9, unit: "deg" },
  "kresling.alpha_deg": { min: 0.1, max: 180, unit: "deg" },
  "kresling.t_face": { min: 0.1, max: 10, unit: "mm" },
  "kresling.levels": { min: 1, max: 8, step: 1, unit: "" },
  "metashell.c": { min: 0.5, max: 60, unit: "mm" },
  "metashell.l": { min: 1, max: 120, unit: "mm" },
  "metashell.t": { min: 0.2, max: 8, unit: "mm" },
  "metashell.h": { min: 0.3, max: 30, unit: "mm" },
  "metashell.r": { min: 0, max: 20, unit: "mm" },
  "metashell.delta": { min: 0, max: 5, unit: "mm" },
  "metashell.wall_height": { min: 1, max: 60, unit: "mm" },
  "metashell.rows": { min: 1, max: 6, step: 1, unit: "" },
  "metashell.cols": { min: 2, max: 12, step: 1, unit: "" },
  "metashell.depth": { min: 0.5, max: 20, unit: "mm" },
  "metashell.pitch_factor": { min: 0.5, max: 1.5, unit: "" },
  "metashell.block_margin": { min: 0.2, max: 6, unit: "mm" },
  "material.E": { min: 0.1, max: 5000, unit: "MPa" },
  "material.s_min": { min: 0.01, max: 1, unit: "" },
  "material.bar_area": { min: 0.01, max: 50, unit: "mm^2" },
  "material.hinge_k": { min: 0, max: 100, unit: "N.mm/rad" },
  "integration.lid_thickness": { min: 0.4, max: 10, unit: "mm" },
  "integration.port_diameter": { min: 0, max: 20, unit: "mm" },
  "integration.clearance": { min: 0, max: 10, unit: "mm" },
  "integration.port_segments": { min: 8, max: 128, step: 1, unit: "" },
};

const SECTIONS = ["kresling", "metashell", "material", "integration"];

export function bindControls(schema: SchemaDoc): ControlDescriptor[] {
  const out: ControlDescriptor[] = [];
  const props = schema.properties ?? {};
  for (const section of SECTIONS) {
    const sub = props[section]?.properties ?? {};
    for (const [field, spec] of Object.entries(sub)) {
      const s = spec as { type?: string | string[]; minimum?: number };
      const types = Array.isArray(s.type) ? s.type : [s.type];
      if (!types.includes("number") && !types.includes("integer")) continue;
      const key = `${section}.${field}`;
      const known = KNOWN[key];
      const desc: ControlDescriptor = {
        section,
        field,
        label: field.replace(/_/g, " "),
        integer: types.includes("integer"),
        raw: known === undefined,
        unit: known?.unit ?? "",
        ...known,
      };
      if (desc.min === undefined && s.minimum !== undefined) desc.min = s.minimum;
      out.push(desc);
    }
  }
  return out;
}

/** Clamp a control value to its limits (no request leaves the panel outside). */
export function clampValue(desc: ControlDescriptor, value: number): number {
  let v = value;
  if (Number.isNaN(v)) return desc.min ?? 0;
  if (desc.min !== undefined) v = Math.max(desc.min, v);
  if (desc.max !== undefined) v = Math.min(desc.max, v);
  if (desc.integer) v = Math.round(v);
  return v;
}

/** Flatten a preset document into control values keyed section.field. */
export function presetValues(preset: Record<string, unknown>): Map<string, number> {
  const out = new Map<string, number>();
  for (const section of SECTIONS) {
    const sub = preset[section];
    if (typeof sub !== "object" || sub === null) continue;
    for (const [field, value] of Object.entries(sub)) {
      if (typeof value === "number") out.set(`${section}.${field}`, value);
    }
  }
  return out;
}
