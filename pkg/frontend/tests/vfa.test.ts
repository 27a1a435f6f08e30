import { describe, expect, it } from "vitest";

import { decodeFrame, MeshObject, PolylineObject, VolumeObject } from "../src/vfa";
import { EngineClient, splitGeometryFrame } from "../src/protocol";
import { FakeSocket } from "./fakes";

/** Hand-built frame bytes straight from the documented layout. */
function buildFixtureFrame(): Uint8Array {
  const chunks: number[] = [];
  const pushU32 = (v: number) => {
    const b = new Uint8Array(4);
    new DataView(b.buffer).setUint32(0, v, true);
    chunks.push(...b);
  };
  const pushU64 = (v: number) => {
    const b = new Uint8Array(8);
    new DataView(b.buffer).setBigUint64(0, BigInt(v), true);
    chunks.push(...b);
  };
  const pushF32s = (vals: number[]) => {
    const b = new Uint8Array(4 * vals.length);
    const dv = new DataView(b.buffer);
    vals.forEach((v, i) => dv.setFloat32(4 * i, v, true));
    chunks.push(...b);
  };

  chunks.push(0x56, 0x46, 0x35, 0x41); // "VF5A"
  pushU32(0); // sequence
  pushU32(2); // two objects

  // mesh: one triangle
  chunks.push(1);
  pushU64(8 + 3 * 3 * 4 * 2 + 3 * 4);
  pushU32(3); // verts
  pushU32(3); // index entries
  pushF32s([0, 0, 0, 1, 0, 0, 0, 1, 0]); // positions
  pushF32s([0, 0, 1, 0, 0, 1, 0, 0, 1]); // normals
  pushU32(0);
  pushU32(1);
  pushU32(2);

  // polyline: two vertices
  chunks.push(2);
  pushU64(4 + 2 * 3 * 4 + 2 * 4);
  pushU32(2);
  pushF32s([0, 0, 0, 0.5, 0, 0]);
  pushF32s([0, 1.5]);

  return new Uint8Array(chunks);
}

describe("vfa decoder", () => {
  it("decodes a hand-built frame", () => {
    const frame = decodeFrame(buildFixtureFrame());
    expect(frame.objects).toHaveLength(2);
    const mesh = frame.objects[0] as MeshObject;
    expect(mesh.kind).toBe("mesh");
    expect(Array.from(mesh.indices)).toEqual([0, 1, 2]);
    expect(mesh.positions[3]).toBe(1);
    const line = frame.objects[1] as PolylineObject;
    expect(line.kind).toBe("polyline");
    expect(Array.from(line.params)).toEqual([0, 1.5]);
  });

  it("rejects a bad magic", () => {
    const bytes = buildFixtureFrame();
    bytes[0] = 0x58;
    expect(() => decodeFrame(bytes)).toThrow(/VF5A/);
  });

  it("rejects truncation and trailing bytes", () => {
    const bytes = buildFixtureFrame();
    expect(() => decodeFrame(bytes.subarray(0, bytes.length - 3))).toThrow(/truncated/);
    const extra = new Uint8Array(bytes.length + 1);
    extra.set(bytes);
    expect(() => decodeFrame(extra)).toThrow(/trailing/);
  });

  it("decodes a volume payload", () => {
    const dims = [2, 2, 2];
    const payload = new Uint8Array(16 + 8 + 1024 + 8);
    const dv = new DataView(payload.buffer);
    payload.set([0x56, 0x46, 0x35, 0x54]); // "VF5T"
    dv.setUint32(4, dims[0]!, true);
    dv.setUint32(8, dims[1]!, true);
    dv.setUint32(12, dims[2]!, true);
    payload.set([0, 32, 64, 96, 128, 160, 192, 255], 16);
    dv.setFloat32(16 + 8 + 1024, -1, true);
    dv.setFloat32(16 + 8 + 1024 + 4, 3, true);

    const frame = new Uint8Array(12 + 9 + payload.length);
    frame.set([0x56, 0x46, 0x35, 0x41]);
    const fdv = new DataView(frame.buffer);
    fdv.setUint32(4, 0, true);
    fdv.setUint32(8, 1, true);
    frame[12] = 4;
    fdv.setBigUint64(13, BigInt(payload.length), true);
    frame.set(payload, 21);

    const vol = decodeFrame(frame).objects[0] as VolumeObject;
    expect(vol.kind).toBe("volume");
    expect(vol.dims).toEqual([2, 2, 2]);
    expect(vol.voxels[7]).toBe(255);
    expect(vol.range).toEqual([-1, 3]);
  });
});

describe("protocol framing", () => {
  it("splits the u64 id prefix off geometry frames", () => {
    const payload = new Uint8Array([1, 2, 3]);
    const buf = new Uint8Array(11);
    new DataView(buf.buffer).setBigUint64(0, 42n, true);
    buf.set(payload, 8);
    const split = splitGeometryFrame(buf);
    expect(split.commandId).toBe(42);
    expect(Array.from(split.payload)).toEqual([1, 2, 3]);
  });

  it("routes geometry to the command that triggered it", async () => {
    const socket = new FakeSocket();
    const client = new EngineClient(socket);
    const pending = client.call("Execute");
    socket.binary(1, buildFixtureFrame());
    socket.reply({ id: 1, ok: { objects: 2 } });
    const result = await pending;
    expect(result.geometry).toHaveLength(1);
    expect(decodeFrame(result.geometry[0]!).objects).toHaveLength(2);
  });

  it("rejects err replies in call()", async () => {
    const socket = new FakeSocket();
    const client = new EngineClient(socket);
    const pending = client.call("SelectStep", { step: 99 });
    socket.reply({ id: 1, err: { code: "BadStep", message: "nope" } });
    await expect(pending).rejects.toThrow(/BadStep/);
  });
});
