// Virtual slider for the isosurface level: the handle follows vertical wand
// motion while the button is held; releasing commits the level and triggers
// the (possibly slow) extraction exactly once.

import { EngineClient, CommandResult } from "./protocol.js";

export interface SliderDrag {
  readonly startLevel: number;
  readonly gainPerPixel: number;
  readonly levelMin: number;
  readonly levelMax: number;
}

export function dragLevel(drag: SliderDrag, dy: number): number {
  const level = drag.startLevel + drag.gainPerPixel * dy;
  return Math.min(drag.levelMax, Math.max(drag.levelMin, level));
}

export interface SliderRelease {
  level: number;
  update: Promise<CommandResult>;
  execute: Promise<CommandResult>;
}

/**
 * Commit a drag: exactly one UpdateItem followed by exactly one Execute for
 * that item.  The caller renders the mesh decoded from the Execute geometry.
 */
export function releaseSlider(client: EngineClient, drag: SliderDrag, dy: number,
                              itemIndex: number): SliderRelease {
  const level = dragLevel(drag, dy);
  const update = client.send("UpdateItem", { index: itemIndex, params: { level } });
  const execute = client.send("Execute", { index: itemIndex });
  return { level, update, execute };
}
