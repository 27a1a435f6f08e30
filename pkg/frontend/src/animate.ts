// Particle animation along traced polylines: the marker's progress follows
// the vertex params (integration time), so speed on screen encodes field
// strength.

import { PolylineObject } from "./vfa.js";
import { Vec3 } from "./vec.js";

/** Position on the line at parameter t, linearly interpolated; t clamps. */
export function positionAtParam(line: PolylineObject, t: number): Vec3 {
  const p = line.params;
  const n = p.length;
  const at = (i: number): Vec3 => [
    line.vertices[3 * i]!,
    line.vertices[3 * i + 1]!,
    line.vertices[3 * i + 2]!,
  ];
  if (n === 1 || t <= p[0]!) return at(0);
  if (t >= p[n - 1]!) return at(n - 1);
  let lo = 0;
  let hi = n - 1;
  while (hi - lo > 1) {
    const mid = (lo + hi) >> 1;
    if (p[mid]! <= t) lo = mid;
    else hi = mid;
  }
  const f = (t - p[lo]!) / (p[hi]! - p[lo]!);
  const a = at(lo);
  const b = at(hi);
  return [a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1]), a[2] + f * (b[2] - a[2])];
}

export interface ParticleClock {
  /** Wall seconds -> param units. */
  readonly rate: number;
  elapsed: number;
}

/** Advance the clock and return each line's particle position, looping. */
export function particlePositions(lines: readonly PolylineObject[], clock: ParticleClock,
                                  dtSeconds: number): Vec3[] {
  clock.elapsed += dtSeconds * clock.rate;
  return lines.map((line) => {
    const t0 = line.params[0]!;
    const t1 = line.params[line.params.length - 1]!;
    const span = t1 - t0;
    const t = span > 0 ? t0 + (clock.elapsed % span) : t0;
    return positionAtParam(line, t);
  });
}
