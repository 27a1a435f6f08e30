// Orthoslice symbol-box widget: a small box stands for the whole data
// volume; the mesh plane inside it tracks the wand and commits a slice
// index on release.

import { CommandResult, EngineClient } from "./protocol.js";

export type Axis = "x" | "y" | "z";

/** Fraction [0,1] along the box -> nearest node index along that axis. */
export function sliceIndexFromFraction(fraction: number, dim: number): number {
  const f = Math.min(1, Math.max(0, fraction));
  return Math.min(dim - 1, Math.max(0, Math.round(f * (dim - 1))));
}

/** Wand displacement along the box axis -> new fraction, given the grab state. */
export function dragFraction(startFraction: number, delta: number, boxSize: number): number {
  return Math.min(1, Math.max(0, startFraction + delta / boxSize));
}

export interface SliceMove {
  index: number;
  update: Promise<CommandResult>;
  execute: Promise<CommandResult>;
}

/** Release the box widget: one UpdateItem + one Execute for the slice item. */
export function releaseSliceBox(client: EngineClient, itemIndex: number, axis: Axis,
                                fraction: number, dim: number,
                                params: Record<string, unknown> = {}): SliceMove {
  const index = sliceIndexFromFraction(fraction, dim);
  const update = client.send("UpdateItem", {
    index: itemIndex,
    params: { ...params, axis, index },
  });
  const execute = client.send("Execute", { index: itemIndex });
  return { index, update, execute };
}
