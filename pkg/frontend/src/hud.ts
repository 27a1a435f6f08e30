// HUD text overlay: visualization parameters as plain strings (seed
// positions, the animation time step, data size).

import { Vec3 } from "./vec.js";

const f = (x: number) => x.toFixed(3);

export function formatSeed(p: Vec3): string {
  return `seed (${f(p[0])}, ${f(p[1])}, ${f(p[2])})`;
}

export function formatStep(step: number, steps: number): string {
  return `step ${step + 1}/${steps}`;
}

export function formatDims(dims: readonly number[]): string {
  return `grid ${dims.join("×")}`;
}

export function hudLines(seeds: Vec3[], step: number, steps: number,
                         dims: readonly number[]): string[] {
  return [formatDims(dims), formatStep(step, steps), ...seeds.map(formatSeed)];
}
