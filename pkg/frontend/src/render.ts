/**
 * WebGL point renderer: every point becomes a screen-facing disk whose
 * size comes from the trial descriptor (operator-tuned per stimulus).
 * Both viewports of a trial draw with the same camera pose so the pair
 * stays synchronized.
 */

import { PackedCloud } from "./asset.js";
import { CameraPose, perspectiveMatrix, viewMatrix } from "./camera.js";

const VERTEX_SHADER = `
attribute vec3 position;
attribute vec3 color;
uniform mat4 view;
uniform mat4 projection;
uniform mat4 model;
uniform float pointSize;
varying vec3 vColor;
void main() {
  gl_Position = projection * view * model * vec4(position, 1.0);
  gl_PointSize = pointSize;
  vColor = color / 255.0;
}
`;

const FRAGMENT_SHADER = `
precision mediump float;
varying vec3 vColor;
void main() {
  vec2 offset = gl_PointCoord * 2.0 - 1.0;
  if (dot(offset, offset) > 1.0) {
    discard;
  }
  gl_FragColor = vec4(vColor, 1.0);
}
`;

// Neutral grey stage, tunable by the operator (not a protocol constant).
export const BACKGROUND_RGB: [number, number, number] = [0.42, 0.42, 0.42];

export interface RenderOptions {
  pointSize: number;
  /** rotation around the vertical axis, degrees (passive playback) */
  spinDeg?: number;
}

/** Validate draw options before any GL work happens. */
export function checkRenderOptions(options: RenderOptions): void {
  if (!(options.pointSize > 0) || !Number.isFinite(options.pointSize)) {
    throw new Error(`point size must be positive, got ${options.pointSize}`);
  }
  if (options.spinDeg !== undefined && !Number.isFinite(options.spinDeg)) {
    throw new Error(`spin angle must be finite, got ${options.spinDeg}`);
  }
}

export class PointCloudRenderer {
  private readonly gl: WebGLRenderingContext;
  private readonly program: WebGLProgram;
  private readonly positionBuffer: WebGLBuffer;
  private readonly colorBuffer: WebGLBuffer;
  private count = 0;
  private center: [number, number, number] = [0, 0, 0];

  constructor(private readonly canvas: HTMLCanvasElement) {
    const gl = canvas.getContext("webgl");
    if (!gl) {
      throw new Error("WebGL is not available on this device");
    }
    this.gl = gl;
    this.program = buildProgram(gl, VERTEX_SHADER, FRAGMENT_SHADER);
    this.positionBuffer = gl.createBuffer()!;
    this.colorBuffer = gl.createBuffer()!;
    gl.enable(gl.DEPTH_TEST);
  }

  setCloud(cloud: PackedCloud): void {
    if (cloud.count === 0) {
      throw new Error("cannot render an empty cloud");
    }
    const gl = this.gl;
    this.count = cloud.count;
    this.center = cloud.center;
    gl.bindBuffer(gl.ARRAY_BUFFER, this.positionBuffer);
    gl.bufferData(gl.ARRAY_BUFFER, cloud.positions, gl.STATIC_DRAW);
    gl.bindBuffer(gl.ARRAY_BUFFER, this.colorBuffer);
    gl.bufferData(gl.ARRAY_BUFFER, cloud.colors, gl.STATIC_DRAW);
  }

  render(pose: CameraPose, options: RenderOptions): void {
    checkRenderOptions(options);
    const gl = this.gl;
    gl.viewport(0, 0, this.canvas.width, this.canvas.height);
    gl.clearColor(...BACKGROUND_RGB, 1.0);
    gl.clear(gl.COLOR_BUFFER_BIT | gl.DEPTH_BUFFER_BIT);
    if (this.count === 0) {
      return;
    }
    gl.useProgram(this.program);

    const aspect = this.canvas.width / Math.max(1, this.canvas.height);
    const far = 16 * Math.hypot(...pose.eye) + 1;
    setMatrix(gl, this.program, "projection",
              perspectiveMatrix(50, aspect, far / 1e4, far));
    setMatrix(gl, this.program, "view", viewMatrix(pose));
    setMatrix(gl, this.program, "model",
              spinAroundCenter(this.center, options.spinDeg ?? 0));
    const sizeLoc = gl.getUniformLocation(this.program, "pointSize");
    gl.uniform1f(sizeLoc, options.pointSize);

    bindAttribute(gl, this.program, "position", this.positionBuffer, gl.FLOAT, false);
    bindAttribute(gl, this.program, "color", this.colorBuffer, gl.UNSIGNED_BYTE, true);
    gl.drawArrays(gl.POINTS, 0, this.count);
  }
}

/** Column-major model matrix: rotate around the vertical axis through a center. */
export function spinAroundCenter(center: [number, number, number],
                                 spinDeg: number): Float32Array {
  const a = (spinDeg * Math.PI) / 180;
  const c = Math.cos(a);
  const s = Math.sin(a);
  const [cx, , cz] = center;
  // T(center) * RotY(a) * T(-center)
  return new Float32Array([
    c, 0, -s, 0,
    0, 1, 0, 0,
    s, 0, c, 0,
    cx - c * cx - s * cz, 0, cz + s * cx - c * cz, 1,
  ]);
}

function buildProgram(gl: WebGLRenderingContext, vsSource: string,
                      fsSource: string): WebGLProgram {
  const program = gl.createProgram()!;
  for (const [kind, source] of [[gl.VERTEX_SHADER, vsSource],
                                [gl.FRAGMENT_SHADER, fsSource]] as const) {
    const shader = gl.createShader(kind)!;
    gl.shaderSource(shader, source);
    gl.compileShader(shader);
    if (!gl.getShaderParameter(shader, gl.COMPILE_STATUS)) {
      throw new Error(`shader compile failed: ${gl.getShaderInfoLog(shader)}`);
    }
    gl.attachShader(program, shader);
  }
  gl.linkProgram(program);
  if (!gl.getProgramParameter(program, gl.LINK_STATUS)) {
    throw new Error(`program link failed: ${gl.getProgramInfoLog(program)}`);
  }
  return program;
}

function setMatrix(gl: WebGLRenderingContext, program: WebGLProgram,
                   name: string, value: Float32Array): void {
  gl.uniformMatrix4fv(gl.getUniformLocation(program, name), false, value);
}

function bindAttribute(gl: WebGLRenderingContext, program: WebGLProgram,
                       name: string, buffer: WebGLBuffer, type: number,
                       normalize: boolean): void {
  const location = gl.getAttribLocation(program, name);
  gl.bindBuffer(gl.ARRAY_BUFFER, buffer);
  gl.enableVertexAttribArray(location);
  gl.vertexAttribPointer(location, 3, type, normalize, 0, 0);
}
