// Minimal WebGL flat-shaded mesh viewer (drag to orbit, wheel to zoom).
// The client renders raw vertex/index buffers from the service; all geometry
// processing stays in the engine.

import type { MeshResponse } from "./types.js";

const VS = `
attribute vec3 aPos;
attribute vec3 aNrm;
uniform mat4 uMvp;
uniform mat3 uRot;
varying vec3 vNrm;
void main() {
  gl_Position = uMvp * vec4(aPos, 1.0);
  vNrm = uRot * aNrm;
}`;

const FS = `
precision mediump float;
varying vec3 vNrm;
void main() {
  float diff = abs(dot(normalize(vNrm), normalize(vec3(0.4, 0.55, 1.0))));
  vec3 base = vec3(0.82, 0.45, 0.2);
  gl_FragColor = vec4(base * (0.25 + 0.75 * diff), 1.0);
}`;

export class MeshViewer {
  private gl: WebGLRenderingContext;
  private program: WebGLProgram;
  private nTris = 0;
  private vbo: WebGLBuffer;
  private center = [0, 0, 0];
  private radius = 1;
  private yaw = 0.7;
  private pitch = -0.5;
  private zoom = 1.0;

  constructor(private canvas: HTMLCanvasElement) {
    const gl = canvas.getContext("webgl");
    if (!gl) throw new Error("WebGL unavailable");
    this.gl = gl;
    this.program = this.buildProgram();
    this.vbo = gl.createBuffer()!;
    canvas.addEventListener("mousemove", (e) => {
      if (e.buttons & 1) {
        this.yaw += e.movementX * 0.01;
        this.pitch += e.movementY * 0.01;
        this.draw();
      }
    });
    canvas.addEventListener("wheel", (e) => {
      e.preventDefault();
      this.zoom *= Math.exp(-e.deltaY * 0.001);
      this.draw();
    });
  }

  private buildProgram(): WebGLProgram {
    const gl = this.gl;
    const mk = (type: number, src: string) => {
      const sh = gl.createShader(type)!;
      gl.shaderSource(sh, src);
      gl.compileShader(sh);
      if (!gl.getShaderParameter(sh, gl.COMPILE_STATUS)) {
        throw new Error(gl.getShaderInfoLog(sh) ?? "shader error");
      }
      return sh;
    };
    const prog = gl.createProgram()!;
    gl.attachShader(prog, mk(gl.VERTEX_SHADER, VS));
    gl.attachShader(prog, mk(gl.FRAGMENT_SHADER, FS));
    gl.linkProgram(prog);
    return prog;
  }

  setMesh(mesh: MeshResponse): void {
    const { vertices, triangles } = mesh;
    const data = new Float32Array(triangles.length * 18);
    let lo = [Infinity, Infinity, Infinity];
    let hi = [-Infinity, -Infinity, -Infinity];
    for (const v of vertices) {
      for (let k = 0; k < 3; k++) {
        lo[k] = Math.min(lo[k], v[k]);
        hi[k] = Math.max(hi[k], v[k]);
      }
    }
    this.center = lo.map((l, k) => 0.5 * (l + hi[k]));
    this.radius = Math.max(hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]) * 0.75;
    let o = 0;
    for (const t of triangles) {
      const [a, b, c] = t.map((i) => vertices[i]);
      const u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
      const w = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
      const n = [u[1] * w[2] - u[2] * w[1], u[2] * w[0] - u[0] * w[2],
                 u[0] * w[1] - u[1] * w[0]];
      const len = Math.hypot(n[0], n[1], n[2]) || 1;
      for (const v of [a, b, c]) {
        data[o++] = v[0]; data[o++] = v[1]; data[o++] = v[2];
        data[o++] = n[0] / len; data[o++] = n[1] / len; data[o++] = n[2] / len;
      }
    }
    this.nTris = triangles.length;
    const gl = this.gl;
    gl.bindBuffer(gl.ARRAY_BUFFER, this.vbo);
    gl.bufferData(gl.ARRAY_BUFFER, data, gl.STATIC_DRAW);
    this.draw();
  }

  draw(): void {
    const gl = this.gl;
    const w = this.canvas.width, h = this.canvas.height;
    gl.viewport(0, 0, w, h);
    gl.clearColor(0.12, 0.12, 0.14, 1);
    gl.enable(gl.DEPTH_TEST);
    gl.clear(gl.COLOR_BUFFER_BIT | gl.DEPTH_BUFFER_BIT);
    if (!this.nTris) return;
    gl.useProgram(this.program);

    const cy = Math.cos(this.yaw), sy = Math.sin(this.yaw);
    const cp = Math.cos(this.pitch), sp = Math.sin(this.pitch);
    // rotation = pitch about x after yaw about z
    const rot = [
      cy, sy * cp, sy * sp,
      -sy, cy * cp, cy * sp,
      0, -sp, cp,
    ];
    const s = this.zoom / this.radius;
    const aspect = w / h;
    const c = this.center;
    // orthographic mvp with the rotation baked in
    const mvp = new Float32Array(16);
    const put = (col: number, row: number, v: number) => { mvp[col * 4 + row] = v; };
    for (let i = 0; i < 3; i++) {
      put(i, 0, rot[i * 3 + 0] * s / aspect);
      put(i, 1, rot[i * 3 + 1] * s);
      put(i, 2, rot[i * 3 + 2] * 0.2 * s);
    }
    put(3, 0, -(rot[0] * c[0] + rot[3] * c[1] + rot[6] * c[2]) * s / aspect);
    put(3, 1, -(rot[1] * c[0] + rot[4] * c[1] + rot[7] * c[2]) * s);
    put(3, 2, -(rot[2] * c[0] + rot[5] * c[1] + rot[8] * c[2]) * 0.2 * s);
    put(3, 3, 1);

    gl.uniformMatrix4fv(gl.getUniformLocation(this.program, "uMvp"), false, mvp);
    gl.uniformMatrix3fv(gl.getUniformLocation(this.program, "uRot"), false,
                        new Float32Array(rot));
    gl.bindBuffer(gl.ARRAY_BUFFER, this.vbo);
    const aPos = gl.getAttribLocation(this.program, "aPos");
    const aNrm = gl.getAttribLocation(this.program, "aNrm");
    gl.enableVertexAttribArray(aPos);
    gl.enableVertexAttribArray(aNrm);
    gl.vertexAttribPointer(aPos, 3, gl.FLOAT, false, 24, 0);
    gl.vertexAttribPointer(aNrm, 3, gl.FLOAT, false, 24, 12);
    gl.drawArrays(gl.TRIANGLES, 0, this.nTris * 3);
  }
}
