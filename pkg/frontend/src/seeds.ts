// Seed placement: each click plants one streamline/field-line seed at the
// beam tip.  Rapid clicks with small probe shifts build a particle flock.

import { CommandResult, EngineClient } from "./protocol.js";
import { Vec3 } from "./vec.js";
import { probePoint, WandState } from "./wand.js";

export interface DomainBox {
  readonly min: Vec3;
  readonly max: Vec3;
}

export function insideDomain(p: Vec3, box: DomainBox): boolean {
  return (
    p[0] >= box.min[0] && p[0] <= box.max[0] &&
    p[1] >= box.min[1] && p[1] <= box.max[1] &&
    p[2] >= box.min[2] && p[2] <= box.max[2]
  );
}

export interface PlacedSeed {
  seed: Vec3;
  result: Promise<CommandResult>;
}

/**
 * Place one seed at the wand's probe point.  Outside the domain no command
 * is sent (the UI shows a rejection cue instead) and null is returned.
 */
export function placeSeed(client: EngineClient, wand: WandState, domain: DomainBox,
                          field: string, method: "Tracer" | "FieldLine",
                          extra: Record<string, unknown> = {}): PlacedSeed | null {
  const seed = probePoint(wand);
  if (!insideDomain(seed, domain)) return null;
  const result = client.send("AddItem", {
    method,
    field,
    params: { seeds: [[seed[0], seed[1], seed[2]]], ...extra },
  });
  return { seed, result };
}
