// UI session state: config versioning and version-consistent display pairs.
//
// Every config edit bumps the version. Responses are stamped with the version
// they were requested for; stale stamps are dropped. The displayed mesh and
// curves are swapped atomically only when both sides of a version are
// present, so the two panels can never show different config versions.

import type { Config, CurvesResponse, MeshResponse } from "./types.js";

export type DisplayPair = {
  version: number;
  mesh: MeshResponse;
  curves: CurvesResponse;
};

export class UISession {
  private version_ = 0;
  private config_: Config;
  private pending = new Map<number, { mesh?: MeshResponse; curves?: CurvesResponse }>();
  private displayed_: DisplayPair | null = null;
  dirtyMesh = false;
  dirtyCurves = false;

  constructor(initial: Config) {
    this.config_ = structuredClone(initial);
  }

  get version(): number {
    return this.version_;
  }

  get config(): Config {
    return structuredClone(this.config_);
  }

  get displayed(): DisplayPair | null {
    return this.displayed_;
  }

  /** Apply a config edit; returns the new version tag. */
  edit(mutate: (cfg: Config) => void): number {
    const next = structuredClone(this.config_);
    mutate(next);
    this.config_ = next;
    this.version_ += 1;
    this.dirtyMesh = true;
    this.dirtyCurves = true;
    return this.version_;
  }

  /** Replace the whole config (e.g. preset load). */
  load(cfg: Config): number {
    return this.edit((c) => {
      for (const k of Object.keys(c)) delete (c as Record<string, unknown>)[k];
      Object.assign(c, structuredClone(cfg));
    });
  }

  acceptMesh(version: number, mesh: MeshResponse): boolean {
    return this.accept(version, { mesh });
  }

  acceptCurves(version: number, curves: CurvesResponse): boolean {
    return this.accept(version, { curves });
  }

  private accept(version: number,
                 part: { mesh?: MeshResponse; curves?: CurvesResponse }): boolean {
    if (version !== this.version_) {
      return false; // stale response: the config has moved on
    }
    const slot = this.pending.get(version) ?? {};
    Object.assign(slot, part);
    this.pending.set(version, slot);
    if (slot.mesh && slot.curves) {
      this.displayed_ = { version, mesh: slot.mesh, curves: slot.curves };
      for (const v of [...this.pending.keys()]) {
        if (v <= version) this.pending.delete(v);
      }
      if (version === this.version_) {
        this.dirtyMesh = false;
        this.dirtyCurves = false;
      }
      return true;
    }
    return false;
  }

  /** The invariant the UI relies on: panels always share one version. */
  consistent(): boolean {
    return this.displayed_ === null ||
      this.displayed_.mesh !== undefined && this.displayed_.curves !== undefined;
  }
}
