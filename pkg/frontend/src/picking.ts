// Ray-quad intersection for shooting floating menu panels with the beam.

import { cross, dot, sub, Vec3 } from "./vec.js";
import { WandState } from "./wand.js";

export interface PanelQuad {
  readonly id: string;
  readonly center: Vec3;
  readonly uAxis: Vec3; // unit, in-plane
  readonly vAxis: Vec3; // unit, in-plane
  readonly halfWidth: number;
  readonly halfHeight: number;
}

const EPS = 1e-12;

/** Ray parameter t of the hit, or null when the ray misses the quad. */
export function intersectQuad(origin: Vec3, dir: Vec3, quad: PanelQuad): number | null {
  const n = cross(quad.uAxis, quad.vAxis);
  const denom = dot(dir, n);
  if (Math.abs(denom) < EPS) return null; // parallel to the panel
  const t = dot(sub(quad.center, origin), n) / denom;
  if (t <= 0) return null;
  const hit = sub([
    origin[0] + t * dir[0],
    origin[1] + t * dir[1],
    origin[2] + t * dir[2],
  ], quad.center);
  if (Math.abs(dot(hit, quad.uAxis)) > quad.halfWidth) return null;
  if (Math.abs(dot(hit, quad.vAxis)) > quad.halfHeight) return null;
  return t;
}

/** Nearest panel hit by the wand ray, or null. At most one panel highlights. */
export function pickPanel(wand: WandState, panels: readonly PanelQuad[]): string | null {
  let best: string | null = null;
  let bestT = Infinity;
  for (const p of panels) {
    const t = intersectQuad(wand.rayOrigin, wand.rayDir, p);
    if (t !== null && t < bestT) {
      bestT = t;
      best = p.id;
    }
  }
  return best;
}
