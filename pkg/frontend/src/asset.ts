/**
 * Packed point cloud assets: little-endian uint32 point count, then
 * count xyz float32 triples, then count rgb uint8 triples. Converted
 * server-side from PLY so the browser never parses text formats.
 */

export interface PackedCloud {
  count: number;
  /** xyz triples, length 3 * count */
  positions: Float32Array;
  /** rgb triples, length 3 * count */
  colors: Uint8Array;
  center: [number, number, number];
  /** half-diagonal of the bounding box, for camera framing */
  radius: number;
}

export function decodePackedCloud(buffer: ArrayBuffer): PackedCloud {
  if (buffer.byteLength < 4) {
    throw new Error("packed cloud too short for its header");
  }
  const view = new DataView(buffer);
  const count = view.getUint32(0, true);
  const expected = 4 + count * 12 + count * 3;
  if (count === 0) {
    throw new Error("packed cloud is empty");
  }
  if (buffer.byteLength < expected) {
    throw new Error(
      `packed cloud truncated: ${buffer.byteLength} bytes, need ${expected}`);
  }
  // float32 reads need 4-byte alignment; the 4-byte header guarantees it
  const positions = new Float32Array(buffer, 4, count * 3);
  const colors = new Uint8Array(buffer, 4 + count * 12, count * 3);

  const lo = [Infinity, Infinity, Infinity];
  const hi = [-Infinity, -Infinity, -Infinity];
  for (let i = 0; i < count; i++) {
    for (let axis = 0; axis < 3; axis++) {
      const v = positions[i * 3 + axis];
      if (v < lo[axis]) lo[axis] = v;
      if (v > hi[axis]) hi[axis] = v;
    }
  }
  const center: [number, number, number] = [
    (lo[0] + hi[0]) / 2, (lo[1] + hi[1]) / 2, (lo[2] + hi[2]) / 2,
  ];
  const dx = hi[0] - lo[0];
  const dy = hi[1] - lo[1];
  const dz = hi[2] - lo[2];
  const radius = Math.sqrt(dx * dx + dy * dy + dz * dz) / 2;
  return { count, positions, colors, center, radius };
}

/**
 * Fallback disk size when the operator supplied none: grows with
 * voxel resolution, shrinks with point density.
 */
export function defaultPointSize(bitDepth: number, count: number): number {
  return Math.max(1, Math.pow(2, bitDepth) / Math.cbrt(count) / 10);
}
