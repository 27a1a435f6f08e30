// Decoder for the engine's .vfa geometry frames.  The viewer never computes
// visualization geometry itself: everything on screen decodes from here.
//
// Layout (little-endian): "VF5A", u32 sequence, u32 count, then per object
// u8 tag + u64 payload length + payload.

export interface MeshObject {
  kind: "mesh";
  positions: Float32Array; // 3 per vertex
  normals: Float32Array;
  indices: Uint32Array; // 3 per triangle
}

export interface PolylineObject {
  kind: "polyline";
  vertices: Float32Array; // 3 per vertex
  params: Float32Array;
}

export interface ImageObject {
  kind: "image";
  width: number;
  height: number;
  pixels: Uint8Array; // RGBA row-major
}

export interface VolumeObject {
  kind: "volume";
  dims: [number, number, number];
  voxels: Uint8Array; // x-fastest
  lut: Uint8Array; // 256 RGBA entries
  range: [number, number];
}

export type VfaObject = MeshObject | PolylineObject | ImageObject | VolumeObject;

export interface VfaFrame {
  sequence: number;
  objects: VfaObject[];
}

const MAGIC = 0x41354656; // "VF5A" little-endian
const VOLUME_MAGIC = 0x54354656; // "VF5T"

class Cursor {
  pos = 0;
  readonly view: DataView;
  constructor(readonly bytes: Uint8Array) {
    this.view = new DataView(bytes.buffer, bytes.byteOffset, bytes.byteLength);
  }
  private need(n: number): void {
    if (this.pos + n > this.bytes.length) {
      throw new Error(`truncated frame at offset ${this.pos} (wanted ${n} bytes)`);
    }
  }
  u8(): number {
    this.need(1);
    return this.view.getUint8(this.pos++);
  }
  u32(): number {
    this.need(4);
    const v = this.view.getUint32(this.pos, true);
    this.pos += 4;
    return v;
  }
  u64(): number {
    this.need(8);
    const v = this.view.getBigUint64(this.pos, true);
    this.pos += 8;
    if (v > BigInt(Number.MAX_SAFE_INTEGER)) throw new Error("payload too large");
    return Number(v);
  }
  f32(): number {
    this.need(4);
    const v = this.view.getFloat32(this.pos, true);
    this.pos += 4;
    return v;
  }
  raw(n: number): Uint8Array {
    this.need(n);
    const out = this.bytes.subarray(this.pos, this.pos + n);
    this.pos += n;
    return out;
  }
  f32array(count: number): Float32Array {
    const raw = this.raw(4 * count);
    return new Float32Array(raw.buffer.slice(raw.byteOffset, raw.byteOffset + raw.byteLength));
  }
  u32array(count: number): Uint32Array {
    const raw = this.raw(4 * count);
    return new Uint32Array(raw.buffer.slice(raw.byteOffset, raw.byteOffset + raw.byteLength));
  }
}

function decodeVolume(payload: Uint8Array): VolumeObject {
  const c = new Cursor(payload);
  if (c.u32() !== VOLUME_MAGIC) throw new Error("bad VF5T magic");
  const dims: [number, number, number] = [c.u32(), c.u32(), c.u32()];
  const n = dims[0] * dims[1] * dims[2];
  const voxels = new Uint8Array(c.raw(n));
  const lut = new Uint8Array(c.raw(1024));
  const range: [number, number] = [c.f32(), c.f32()];
  if (c.pos !== payload.length) throw new Error("trailing bytes in volume payload");
  return { kind: "volume", dims, voxels, lut, range };
}

function decodeObject(tag: number, payload: Uint8Array): VfaObject {
  const c = new Cursor(payload);
  switch (tag) {
    case 1: {
      const nv = c.u32();
      const ni = c.u32();
      const positions = c.f32array(3 * nv);
      const normals = c.f32array(3 * nv);
      const indices = c.u32array(ni);
      return { kind: "mesh", positions, normals, indices };
    }
    case 2: {
      const n = c.u32();
      return { kind: "polyline", vertices: c.f32array(3 * n), params: c.f32array(n) };
    }
    case 3: {
      const width = c.u32();
      const height = c.u32();
      return { kind: "image", width, height, pixels: new Uint8Array(c.raw(4 * width * height)) };
    }
    case 4:
      return decodeVolume(payload);
    default:
      throw new Error(`unknown object tag ${tag}`);
  }
}

export function decodeFrame(data: Uint8Array | ArrayBuffer): VfaFrame {
  const bytes = data instanceof ArrayBuffer ? new Uint8Array(data) : data;
  const c = new Cursor(bytes);
  if (c.u32() !== MAGIC) throw new Error("not a VF5A frame");
  const sequence = c.u32();
  const count = c.u32();
  const objects: VfaObject[] = [];
  for (let i = 0; i < count; i++) {
    const tag = c.u8();
    const len = c.u64();
    objects.push(decodeObject(tag, c.raw(len)));
  }
  if (c.pos !== bytes.length) throw new Error("trailing bytes after last object");
  return { sequence, objects };
}
