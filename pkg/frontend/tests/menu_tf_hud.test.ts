import { describe, expect, it } from "vitest";

import { hudLines } from "../src/hud";
import { buildMenu, findNode, layoutPanels, SCALAR_METHODS, VECTOR_METHODS } from "../src/menu";
import { pickPanel } from "../src/picking";
import { addPoint, deletePoint, makeTf, movePoint, tfParams } from "../src/tfeditor";
import { makeWand } from "../src/wand";

const LISTING = {
  scalars: ["energy"],
  vectors: ["flow"],
  steps: 3,
  dims: [8, 8, 8] as [number, number, number],
  origin: [0, 0, 0] as [number, number, number],
  spacing: [1, 1, 1] as [number, number, number],
};

describe("menu", () => {
  it("builds data -> method leaves with selections", () => {
    const root = buildMenu(LISTING);
    expect(root.children.map((c) => c.label)).toEqual(["energy", "flow"]);
    const energy = root.children[0]!;
    expect(energy.children.map((c) => c.label)).toEqual([...SCALAR_METHODS]);
    const flow = root.children[1]!;
    expect(flow.children.map((c) => c.label)).toEqual([...VECTOR_METHODS]);
    const leaf = findNode(root, "method:flow:Tracer");
    expect(leaf?.selection).toEqual({ field: "flow", method: "Tracer" });
  });

  it("lays panels out pickable by the wand", () => {
    const root = buildMenu(LISTING);
    const panels = layoutPanels(root, [0, 0, 2]);
    expect(panels).toHaveLength(2);
    const first = panels[0]!;
    const wand = makeWand(
      [first.center[0], first.center[1], 0],
      [0, 0, 1],
    );
    expect(pickPanel(wand, panels)).toBe("data:energy");
  });
});

describe("transfer function editor", () => {
  const base = makeTf([
    [0, [0, 0, 0, 0]],
    [1, [1, 1, 1, 1]],
  ]);

  it("adds points in sorted position", () => {
    const tf = addPoint(base, 0.5, [1, 0, 0, 0.5]);
    expect(tf.map(([s]) => s)).toEqual([0, 0.5, 1]);
  });

  it("moves and clamps components", () => {
    const tf = movePoint(addPoint(base, 0.5, [1, 0, 0, 0.5]), 1, 0.25, [2, -1, 0.5, 0.5]);
    expect(tf[1]![0]).toBe(0.25);
    expect(tf[1]![1]).toEqual([1, 0, 0.5, 0.5]);
  });

  it("refuses to drop below two points or duplicate scalars", () => {
    expect(() => deletePoint(base, 0)).toThrow(/2 control points/);
    expect(() => addPoint(base, 0, [0, 0, 0, 0])).toThrow(/already/);
  });

  it("serializes to engine Volume params", () => {
    expect(tfParams(base)).toEqual({ tf: [[0, [0, 0, 0, 0]], [1, [1, 1, 1, 1]]] });
  });
});

describe("hud", () => {
  it("lists dims, step, and seed positions", () => {
    const lines = hudLines([[0.1, 0.2, 0.3]], 1, 3, [8, 8, 8]);
    expect(lines[0]).toContain("8×8×8");
    expect(lines[1]).toBe("step 2/3");
    expect(lines[2]).toBe("seed (0.100, 0.200, 0.300)");
  });
});
