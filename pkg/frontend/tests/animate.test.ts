import { describe, expect, it } from "vitest";

import { particlePositions, positionAtParam } from "../src/animate";
import { PolylineObject } from "../src/vfa";

const line: PolylineObject = {
  kind: "polyline",
  vertices: new Float32Array([0, 0, 0, 1, 0, 0, 1, 2, 0]),
  params: new Float32Array([0, 1, 3]),
};

describe("positionAtParam", () => {
  it("returns endpoints outside the param range", () => {
    expect(positionAtParam(line, -5)).toEqual([0, 0, 0]);
    expect(positionAtParam(line, 99)).toEqual([1, 2, 0]);
  });

  it("interpolates linearly between vertices", () => {
    expect(positionAtParam(line, 0.5)).toEqual([0.5, 0, 0]);
    expect(positionAtParam(line, 2)).toEqual([1, 1, 0]);
  });

  it("moves at param speed: equal param steps, unequal spatial steps", () => {
    // params 1->3 cover (1,0,0)->(1,2,0): slower field, longer param span
    const a = positionAtParam(line, 1.0);
    const b = positionAtParam(line, 1.5);
    expect(Math.hypot(b[0] - a[0], b[1] - a[1], b[2] - a[2])).toBeCloseTo(0.5);
  });
});

describe("particlePositions", () => {
  it("advances and loops the shared clock", () => {
    const clock = { rate: 1, elapsed: 0 };
    const first = particlePositions([line], clock, 0.5)[0]!;
    expect(first).toEqual([0.5, 0, 0]);
    particlePositions([line], clock, 2.0); // elapsed 2.5
    const wrapped = particlePositions([line], clock, 1.0)[0]!; // elapsed 3.5 -> t=0.5
    expect(wrapped).toEqual([0.5, 0, 0]);
  });
});
