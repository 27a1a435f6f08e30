// Session replay: the interaction layer only ever talks to the engine
// through commands, so a recorded command list re-sent to a fresh session
// must reproduce the same geometry bytes.

import { CommandMsg, EngineClient } from "./protocol.js";

export interface ReplayOutcome {
  /** Geometry payloads (id prefixes stripped) in arrival order. */
  geometry: Uint8Array[];
  replies: number;
}

/** Re-send recorded commands (fresh ids) in order; collect all geometry. */
export async function replayCommands(client: EngineClient,
                                     commands: readonly CommandMsg[]): Promise<ReplayOutcome> {
  const geometry: Uint8Array[] = [];
  let replies = 0;
  for (const c of commands) {
    const result = await client.send(c.cmd, c.args);
    geometry.push(...result.geometry);
    replies += 1;
  }
  return { geometry, replies };
}

export function sameGeometry(a: readonly Uint8Array[], b: readonly Uint8Array[]): boolean {
  if (a.length !== b.length) return false;
  for (let i = 0; i < a.length; i++) {
    const x = a[i]!;
    const y = b[i]!;
    if (x.length !== y.length) return false;
    for (let j = 0; j < x.length; j++) {
      if (x[j] !== y[j]) return false;
    }
  }
  return true;
}
