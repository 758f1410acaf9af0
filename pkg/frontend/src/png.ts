/** Raster renderer: same four series drawn into an RGBA buffer and
 * encoded as a PNG with node's zlib (no native canvas dependency).
 * Axis text is omitted in the raster path; the SVG output carries labels.
 */

import { deflateSync } from "node:zlib";
import { DEFAULT_COLORS, makeLayout, SeriesColors } from "./layout";
import { Fig2Row } from "./schema";

class Raster {
  readonly data: Uint8Array;

  constructor(readonly width: number, readonly height: number) {
    this.data = new Uint8Array(width * height * 4).fill(255);
  }

  set(x: number, y: number, rgb: [number, number, number]): void {
    x = Math.round(x);
    y = Math.round(y);
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const i = (y * this.width + x) * 4;
    this.data[i] = rgb[0];
    this.data[i + 1] = rgb[1];
    this.data[i + 2] = rgb[2];
    this.data[i + 3] = 255;
  }

  line(x0: number, y0: number, x1: number, y1: number, rgb: [number, number, number]): void {
    let x = Math.round(x0);
    let y = Math.round(y0);
    const ex = Math.round(x1);
    const ey = Math.round(y1);
    const dx = Math.abs(ex - x);
    const dy = -Math.abs(ey - y);
    const sx = x < ex ? 1 : -1;
    const sy = y < ey ? 1 : -1;
    let err = dx + dy;
    for (;;) {
      this.set(x, y, rgb);
      if (x === ex && y === ey) break;
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y += sy;
      }
    }
  }

  fillRect(x: number, y: number, w: number, h: number, rgb: [number, number, number]): void {
    for (let j = 0; j < h; j++) {
      for (let i = 0; i < w; i++) {
        this.set(x + i, y + j, rgb);
      }
    }
  }

  disc(cx: number, cy: number, r: number, rgb: [number, number, number]): void {
    for (let y = -r; y <= r; y++) {
      for (let x = -r; x <= r; x++) {
        if (x * x + y * y <= r * r) this.set(cx + x, cy + y, rgb);
      }
    }
  }

  triangle(cx: number, cy: number, r: number, rgb: [number, number, number]): void {
    for (let y = -r; y <= r; y++) {
      const halfWidth = ((y + r) / (2 * r)) * r;
      for (let x = -halfWidth; x <= halfWidth; x++) {
        this.set(cx + x, cy + y, rgb);
      }
    }
  }

  crossMark(cx: number, cy: number, r: number, rgb: [number, number, number]): void {
    this.line(cx - r, cy - r, cx + r, cy + r, rgb);
    this.line(cx - r + 1, cy - r, cx + r, cy + r - 1, rgb);
    this.line(cx - r, cy + r, cx + r, cy - r, rgb);
    this.line(cx - r + 1, cy + r, cx + r, cy - r + 1, rgb);
  }
}

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) {
      c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    }
    table[n] = c >>> 0;
  }
  return table;
})();

function crc32(bytes: Uint8Array): number {
  let crc = 0xffffffff;
  for (const b of bytes) {
    crc = CRC_TABLE[(crc ^ b) & 0xff] ^ (crc >>> 8);
  }
  return (crc ^ 0xffffffff) >>> 0;
}

function chunk(type: string, payload: Uint8Array): Buffer {
  const head = Buffer.alloc(4);
  head.writeUInt32BE(payload.length);
  const body = Buffer.concat([Buffer.from(type, "ascii"), Buffer.from(payload)]);
  const crc = Buffer.alloc(4);
  crc.writeUInt32BE(crc32(body));
  return Buffer.concat([head, body, crc]);
}

/** Encode an RGBA raster as a PNG byte buffer. */
export function encodePng(raster: Raster): Buffer {
  const { width, height, data } = raster;
  const ihdr = Buffer.alloc(13);
  ihdr.writeUInt32BE(width, 0);
  ihdr.writeUInt32BE(height, 4);
  ihdr[8] = 8; // bit depth
  ihdr[9] = 6; // RGBA
  const stride = width * 4;
  const scanlines = Buffer.alloc((stride + 1) * height);
  for (let y = 0; y < height; y++) {
    scanlines[y * (stride + 1)] = 0; // filter: none
    scanlines.set(data.subarray(y * stride, (y + 1) * stride), y * (stride + 1) + 1);
  }
  return Buffer.concat([
    Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]),
    chunk("IHDR", ihdr),
    chunk("IDAT", deflateSync(scanlines, { level: 9 })),
    chunk("IEND", new Uint8Array(0)),
  ]);
}

function hexToRgb(hex: string): [number, number, number] {
  const v = parseInt(hex.replace("#", ""), 16);
  return [(v >> 16) & 0xff, (v >> 8) & 0xff, v & 0xff];
}

/** Render the rows to PNG bytes. */
export function renderPng(rows: Fig2Row[], colors: SeriesColors = DEFAULT_COLORS): Buffer {
  const l = makeLayout(rows);
  const img = new Raster(l.width, l.height);
  const grey: [number, number, number] = [51, 51, 51];
  img.line(l.left, l.bottom, l.right, l.bottom, grey);
  img.line(l.left, l.top, l.left, l.bottom, grey);
  for (const t of l.yTicks) {
    img.line(l.left - 5, l.yOf(t), l.left, l.yOf(t), grey);
  }
  for (const t of l.xTicks) {
    img.line(l.xOf(t), l.bottom, l.xOf(t), l.bottom + 5, grey);
  }
  const sorted = [...rows].sort((a, b) => a.n - b.n);
  for (const r of sorted) {
    img.disc(l.xOf(r.n), l.yOf(r.meanFreq), 5, hexToRgb(colors.mean));
    img.triangle(l.xOf(r.n), l.yOf(r.maxFreq), 5, hexToRgb(colors.max));
    img.fillRect(l.xOf(r.n) - 4, l.yOf(r.minFreq) - 4, 8, 8, hexToRgb(colors.min));
    img.crossMark(l.xOf(r.n), l.yOf(Math.max(0, r.boundEq12)), 6, hexToRgb(colors.bound));
  }
  return encodePng(img);
}

export { Raster };
