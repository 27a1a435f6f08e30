// three.js builders for decoded engine geometry.  The viewer displays what
// the engine sends; nothing here recomputes visualization results.

import * as THREE from "three";

import { ImageObject, MeshObject, PolylineObject, VfaObject, VolumeObject } from "./vfa.js";

export function meshToThree(obj: MeshObject): THREE.Mesh {
  const geo = new THREE.BufferGeometry();
  geo.setAttribute("position", new THREE.BufferAttribute(obj.positions, 3));
  geo.setAttribute("normal", new THREE.BufferAttribute(obj.normals, 3));
  geo.setIndex(new THREE.BufferAttribute(obj.indices, 1));
  const mat = new THREE.MeshStandardMaterial({
    color: 0xf2f2f2,
    side: THREE.DoubleSide,
    flatShading: false,
  });
  return new THREE.Mesh(geo, mat);
}

/** Short 2-vertex polylines (arrow probes) render as segments; longer ones
 * as a line strip; param-indexed point clouds as points. */
export function polylineToThree(obj: PolylineObject): THREE.Object3D {
  const n = obj.params.length;
  const isPointCloud =
    n > 2 && obj.params[0] === 0 && obj.params[1] === 1 && obj.params[n - 1] === n - 1;
  const geo = new THREE.BufferGeometry();
  geo.setAttribute("position", new THREE.BufferAttribute(obj.vertices, 3));
  if (isPointCloud) {
    return new THREE.Points(geo, new THREE.PointsMaterial({ color: 0xfff4a0, size: 0.02 }));
  }
  return new THREE.Line(geo, new THREE.LineBasicMaterial({ color: 0x7fd4ff }));
}

export function imageToTexture(obj: ImageObject): THREE.DataTexture {
  const tex = new THREE.DataTexture(new Uint8Array(obj.pixels), obj.width, obj.height, THREE.RGBAFormat);
  tex.needsUpdate = true;
  return tex;
}

export function imageToPlane(obj: ImageObject, width: number, height: number): THREE.Mesh {
  const mat = new THREE.MeshBasicMaterial({
    map: imageToTexture(obj),
    transparent: true,
    side: THREE.DoubleSide,
  });
  return new THREE.Mesh(new THREE.PlaneGeometry(width, height), mat);
}

/**
 * Volume rendering as a stack of textured slices along z, composited back
 * to front, mirroring the engine's axis-aligned reference compositor.
 */
export function volumeToSliceStack(obj: VolumeObject, size: [number, number, number],
                                   opacityRefSlices = 32): THREE.Group {
  const [nx, ny, nz] = obj.dims;
  const group = new THREE.Group();
  const alphaScale = Math.min(1, opacityRefSlices / nz);
  for (let k = 0; k < nz; k++) {
    const rgba = new Uint8Array(nx * ny * 4);
    for (let j = 0; j < ny; j++) {
      for (let i = 0; i < nx; i++) {
        const v = obj.voxels[i + nx * (j + ny * k)]!;
        const o = 4 * (i + nx * j);
        rgba[o] = obj.lut[4 * v]!;
        rgba[o + 1] = obj.lut[4 * v + 1]!;
        rgba[o + 2] = obj.lut[4 * v + 2]!;
        rgba[o + 3] = Math.round(obj.lut[4 * v + 3]! * alphaScale);
      }
    }
    const tex = new THREE.DataTexture(rgba, nx, ny, THREE.RGBAFormat);
    tex.needsUpdate = true;
    const mat = new THREE.MeshBasicMaterial({
      map: tex,
      transparent: true,
      depthWrite: false,
      side: THREE.DoubleSide,
    });
    const plane = new THREE.Mesh(new THREE.PlaneGeometry(size[0], size[1]), mat);
    plane.position.z = (k / Math.max(1, nz - 1) - 0.5) * size[2];
    group.add(plane);
  }
  return group;
}

export function objectToThree(obj: VfaObject, domainSize: [number, number, number]):
    THREE.Object3D {
  switch (obj.kind) {
    case "mesh":
      return meshToThree(obj);
    case "polyline":
      return polylineToThree(obj);
    case "image":
      return imageToPlane(obj, domainSize[0], domainSize[1]);
    case "volume":
      return volumeToSliceStack(obj, domainSize);
  }
}

export function domainWireframe(min: [number, number, number],
                                max: [number, number, number]): THREE.LineSegments {
  const size = [max[0] - min[0], max[1] - min[1], max[2] - min[2]];
  const geo = new THREE.BoxGeometry(size[0], size[1], size[2]);
  const wire = new THREE.LineSegments(
    new THREE.EdgesGeometry(geo),
    new THREE.LineBasicMaterial({ color: 0x446688 }),
  );
  wire.position.set(min[0] + size[0]! / 2, min[1] + size[1]! / 2, min[2] + size[2]! / 2);
  return wire;
}
