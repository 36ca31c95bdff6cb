/**
 * Orbit camera constrained to the upper hemisphere: elevation stays in
 * [0, 90] degrees for every input sequence, so the underside of a model
 * (where acquisition artifacts live) can never be inspected.
 */

export const MIN_ELEVATION_DEG = 0;
export const MAX_ELEVATION_DEG = 90;

const DEG = Math.PI / 180;

export interface CameraPose {
  /** camera position in world units */
  eye: [number, number, number];
  target: [number, number, number];
  up: [number, number, number];
}

export class OrbitCamera {
  azimuthDeg: number;
  elevationDeg: number;
  distance: number;
  target: [number, number, number];
  /** degrees of rotation per pixel of pointer travel */
  degreesPerPixel = 0.4;

  constructor(target: [number, number, number], distance: number,
              azimuthDeg = 45, elevationDeg = 30) {
    this.target = target;
    this.distance = distance;
    this.azimuthDeg = azimuthDeg;
    this.elevationDeg = clampElevation(elevationDeg);
  }

  /** Apply one pointer drag delta (pixels); elevation is clamped. */
  drag(dxPx: number, dyPx: number): void {
    this.azimuthDeg = normalizeAzimuth(this.azimuthDeg + dxPx * this.degreesPerPixel);
    this.elevationDeg = clampElevation(this.elevationDeg + dyPx * this.degreesPerPixel);
  }

  pose(): CameraPose {
    const az = this.azimuthDeg * DEG;
    const el = this.elevationDeg * DEG;
    const horizontal = Math.cos(el) * this.distance;
    return {
      eye: [
        this.target[0] + horizontal * Math.sin(az),
        this.target[1] + Math.sin(el) * this.distance,
        this.target[2] + horizontal * Math.cos(az),
      ],
      target: this.target,
      up: [0, 1, 0],
    };
  }
}

export function clampElevation(deg: number): number {
  if (Number.isNaN(deg)) return MIN_ELEVATION_DEG;
  return Math.min(MAX_ELEVATION_DEG, Math.max(MIN_ELEVATION_DEG, deg));
}

export function normalizeAzimuth(deg: number): number {
  const wrapped = deg % 360;
  return wrapped < 0 ? wrapped + 360 : wrapped;
}

/**
 * Viewing distance scaled by voxelization bit depth only, so every model
 * of a given precision fills the screen the same way.
 */
export function cameraDistanceForBitDepth(bitDepth: number): number {
  return Math.pow(2, bitDepth) * 1.6;
}

/** Column-major 4x4 look-at view matrix for the given pose. */
export function viewMatrix(pose: CameraPose): Float32Array {
  const [ex, ey, ez] = pose.eye;
  const [tx, ty, tz] = pose.target;
  let zx = ex - tx, zy = ey - ty, zz = ez - tz;
  const zl = Math.hypot(zx, zy, zz) || 1;
  zx /= zl; zy /= zl; zz /= zl;
  const [ux, uy, uz] = pose.up;
  let xx = uy * zz - uz * zy;
  let xy = uz * zx - ux * zz;
  let xz = ux * zy - uy * zx;
  const xl = Math.hypot(xx, xy, xz) || 1;
  xx /= xl; xy /= xl; xz /= xl;
  const yx = zy * xz - zz * xy;
  const yy = zz * xx - zx * xz;
  const yz = zx * xy - zy * xx;
  return new Float32Array([
    xx, yx, zx, 0,
    xy, yy, zy, 0,
    xz, yz, zz, 0,
    -(xx * ex + xy * ey + xz * ez),
    -(yx * ex + yy * ey + yz * ez),
    -(zx * ex + zy * ey + zz * ez),
    1,
  ]);
}

/** Column-major perspective projection. */
export function perspectiveMatrix(fovYDeg: number, aspect: number,
                                  near: number, far: number): Float32Array {
  const f = 1 / Math.tan((fovYDeg * DEG) / 2);
  const nf = 1 / (near - far);
  return new Float32Array([
    f / aspect, 0, 0, 0,
    0, f, 0, 0,
    0, 0, (far + near) * nf, -1,
    0, 0, 2 * far * near * nf, 0,
  ]);
}
