// Binary STL writer for meshes received from the design service.
//
// Layout: 80-byte header, uint32 little-endian triangle count, then per
// triangle 12 float32 (normal + three vertices) plus a zero uint16 attribute,
// 50 bytes per triangle. Deterministic: identical input gives identical bytes.

const HEADER = "metaori design UI STL export";

function f32(x: number): number {
  return Math.fround(x);
}

export function writeBinaryStl(vertices: number[][], triangles: number[][]): Uint8Array {
  const n = triangles.length;
  const buf = new ArrayBuffer(84 + 50 * n);
  const view = new DataView(buf);
  const bytes = new Uint8Array(buf);
  for (let i = 0; i < 80; i++) {
    bytes[i] = i < HEADER.length ? HEADER.charCodeAt(i) : 0x20;
  }
  view.setUint32(80, n, true);
  let off = 84;
  for (const tri of triangles) {
    const corners = tri.map((idx) => vertices[idx].map(f32));
    const [a, b, c] = corners;
    const ux = b[0] - a[0], uy = b[1] - a[1], uz = b[2] - a[2];
    const vx = c[0] - a[0], vy = c[1] - a[1], vz = c[2] - a[2];
    let nx = uy * vz - uz * vy;
    let ny = uz * vx - ux * vz;
    let nz = ux * vy - uy * vx;
    const len = Math.hypot(nx, ny, nz) || 1.0;
    nx /= len; ny /= len; nz /= len;
    for (const val of [nx, ny, nz, ...a, ...b, ...c]) {
      view.setFloat32(off, val, true);
      off += 4;
    }
    view.setUint16(off, 0, true);
    off += 2;
  }
  return bytes;
}

export function configBlob(config: unknown): string {
  return JSON.stringify(config, Object.keys(config as object).sort(), 2) + "\n";
}
