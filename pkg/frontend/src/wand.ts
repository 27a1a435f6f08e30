// Desktop stand-in for the tracked wand: a pointer ray with an adjustable
// beam length whose tip is the probe point for seeding and probing.

import { add, normalize, scale, Vec3 } from "./vec.js";

export type WandButton = "primary" | "secondary" | "middle";

export interface WandState {
  readonly rayOrigin: Vec3;
  readonly rayDir: Vec3; // unit length
  readonly beamLength: number;
  readonly activeButton: WandButton | null;
}

export const MIN_BEAM = 0.05;
export const MAX_BEAM = 100;

export function makeWand(origin: Vec3, dir: Vec3, beamLength = 1,
                         activeButton: WandButton | null = null): WandState {
  return { rayOrigin: origin, rayDir: normalize(dir), beamLength, activeButton };
}

/** The tip of the beam: origin + beamLength * dir. */
export function probePoint(w: WandState): Vec3 {
  return add(w.rayOrigin, scale(w.rayDir, w.beamLength));
}

/** Scroll adjusts the beam length multiplicatively, clamped to sane bounds. */
export function withBeamScroll(w: WandState, steps: number): WandState {
  const len = Math.min(MAX_BEAM, Math.max(MIN_BEAM, w.beamLength * Math.pow(1.1, steps)));
  return { ...w, beamLength: len };
}

export function withButton(w: WandState, button: WandButton | null): WandState {
  return { ...w, activeButton: button };
}
