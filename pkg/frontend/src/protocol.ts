// Engine wire protocol: JSON control frames out, JSON replies and binary
// geometry frames (u64 command id + .vfa bytes) back in.

export interface CommandMsg {
  id: number;
  cmd: string;
  args: Record<string, unknown>;
}

export interface OkReply {
  id: number;
  ok: Record<string, unknown>;
}

export interface ErrReply {
  id: number;
  err: { code: string; message: string };
}

export type Reply = OkReply | ErrReply;

export interface CommandResult {
  reply: Reply;
  /** .vfa frame payloads (id prefix stripped), in arrival order. */
  geometry: Uint8Array[];
}

/** Structural subset shared by the browser WebSocket and the `ws` package. */
export interface SocketLike {
  binaryType: string;
  send(data: string): void;
  close(): void;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onerror: ((ev: unknown) => void) | null;
  onopen: ((ev: unknown) => void) | null;
}

function toBytes(data: unknown): Uint8Array {
  if (data instanceof ArrayBuffer) return new Uint8Array(data);
  if (ArrayBuffer.isView(data)) {
    const v = data as ArrayBufferView;
    return new Uint8Array(v.buffer.slice(v.byteOffset, v.byteOffset + v.byteLength));
  }
  throw new Error("expected a binary frame");
}

export function splitGeometryFrame(bytes: Uint8Array): { commandId: number; payload: Uint8Array } {
  if (bytes.length < 8) throw new Error("geometry frame shorter than its id prefix");
  const view = new DataView(bytes.buffer, bytes.byteOffset, 8);
  const commandId = Number(view.getBigUint64(0, true));
  return { commandId, payload: bytes.subarray(8) };
}

/**
 * One session over one socket.  Commands resolve with their terminal ok/err
 * reply plus any geometry frames that arrived for their id.  The engine
 * serializes commands per connection, so replies arrive in send order.
 */
export class EngineClient {
  private nextId = 1;
  private pending = new Map<number, {
    resolve: (r: CommandResult) => void;
    reject: (e: Error) => void;
    geometry: Uint8Array[];
  }>();
  /** Every command sent, in order; the replay test re-sends these. */
  readonly sent: CommandMsg[] = [];

  constructor(private socket: SocketLike) {
    socket.binaryType = "arraybuffer";
    socket.onmessage = (ev) => this.handleMessage(ev.data);
  }

  close(): void {
    this.socket.close();
  }

  private handleMessage(data: unknown): void {
    if (typeof data === "string") {
      const reply = JSON.parse(data) as Reply;
      const slot = this.pending.get(reply.id);
      if (!slot) return;
      this.pending.delete(reply.id);
      slot.resolve({ reply, geometry: slot.geometry });
      return;
    }
    const { commandId, payload } = splitGeometryFrame(toBytes(data));
    this.pending.get(commandId)?.geometry.push(payload);
  }

  send(cmd: string, args: Record<string, unknown> = {}): Promise<CommandResult> {
    const msg: CommandMsg = { id: this.nextId++, cmd, args };
    this.sent.push(msg);
    const promise = new Promise<CommandResult>((resolve, reject) => {
      this.pending.set(msg.id, { resolve, reject, geometry: [] });
    });
    this.socket.send(JSON.stringify(msg));
    return promise;
  }

  /** Send and unwrap, throwing on an err reply. */
  async call(cmd: string, args: Record<string, unknown> = {}): Promise<CommandResult> {
    const result = await this.send(cmd, args);
    if ("err" in result.reply) {
      throw new Error(`${result.reply.err.code}: ${result.reply.err.message}`);
    }
    return result;
  }
}

/** Narrow to the ok payload; call() already rejected err replies. */
export function okOf(result: CommandResult): Record<string, unknown> {
  if ("err" in result.reply) {
    throw new Error(`${result.reply.err.code}: ${result.reply.err.message}`);
  }
  return result.reply.ok;
}

export interface FieldListing {
  scalars: string[];
  vectors: string[];
  steps: number;
  dims: [number, number, number];
  origin: [number, number, number];
  spacing: [number, number, number];
}

export async function listFields(client: EngineClient): Promise<FieldListing> {
  const r = await client.call("ListFields");
  return (r.reply as OkReply).ok as unknown as FieldListing;
}

export function domainBounds(listing: FieldListing): { min: [number, number, number]; max: [number, number, number] } {
  const min = listing.origin;
  const max = listing.origin.map(
    (o, i) => o + (listing.dims[i]! - 1) * listing.spacing[i]!,
  ) as [number, number, number];
  return { min, max };
}
