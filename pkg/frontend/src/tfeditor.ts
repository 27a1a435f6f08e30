// Transfer-function editor model: sorted control points (scalar -> RGBA),
// edited by add/move/delete and shipped to the engine as Volume params.

export type Rgba = [number, number, number, number];
export type TfPoint = [number, Rgba];

const clamp01 = (x: number) => Math.min(1, Math.max(0, x));

function sorted(points: TfPoint[]): TfPoint[] {
  return [...points].sort((a, b) => a[0] - b[0]);
}

function assertValid(points: TfPoint[]): TfPoint[] {
  if (points.length < 2) throw new Error("a transfer function needs at least 2 points");
  for (let i = 1; i < points.length; i++) {
    if (points[i]![0] <= points[i - 1]![0]) {
      throw new Error("control point scalars must be strictly increasing");
    }
  }
  return points;
}

export function makeTf(points: TfPoint[]): TfPoint[] {
  return assertValid(sorted(points.map(([s, c]) => [s, c.map(clamp01) as Rgba])));
}

export function addPoint(tf: TfPoint[], scalar: number, rgba: Rgba): TfPoint[] {
  if (tf.some(([s]) => s === scalar)) throw new Error("a point already sits at that scalar");
  return makeTf([...tf, [scalar, rgba]]);
}

export function movePoint(tf: TfPoint[], index: number, scalar: number, rgba: Rgba): TfPoint[] {
  if (index < 0 || index >= tf.length) throw new Error("no such control point");
  const next = tf.map((p, i) => (i === index ? ([scalar, rgba] as TfPoint) : p));
  return makeTf(next);
}

export function deletePoint(tf: TfPoint[], index: number): TfPoint[] {
  if (tf.length <= 2) throw new Error("cannot drop below 2 control points");
  if (index < 0 || index >= tf.length) throw new Error("no such control point");
  return makeTf(tf.filter((_, i) => i !== index));
}

/** Engine Volume params for this editor state. */
export function tfParams(tf: TfPoint[]): { tf: [number, number[]][] } {
  return { tf: tf.map(([s, c]) => [s, [...c]]) };
}
