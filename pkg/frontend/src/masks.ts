/**
 * Region mask model: one binary bitmap per region layer, kept pairwise
 * disjoint (painting claims pixels from other layers). Masks are edited at
 * image resolution; the engine downsamples to its latent grid with an
 * any-coverage rule, which latentFootprint mirrors for the preview overlay.
 */

export interface RegionLayer {
  id: number;
  color: string;
  prompt: string;
  mask: Uint8Array; // w*h, row-major, 0/1
}

export interface Stroke {
  points: Array<{ x: number; y: number }>;
  radius: number;
  erase: boolean;
}

export class MaskSet {
  readonly width: number;
  readonly height: number;
  layers: RegionLayer[] = [];

  constructor(width: number, height: number) {
    this.width = width;
    this.height = height;
  }

  addLayer(color: string, prompt = ""): RegionLayer {
    const layer: RegionLayer = {
      id: this.layers.length + 1,
      color,
      prompt,
      mask: new Uint8Array(this.width * this.height),
    };
    this.layers.push(layer);
    return layer;
  }

  removeLayer(id: number) {
    this.layers = this.layers.filter((l) => l.id !== id);
    this.layers.forEach((l, i) => (l.id = i + 1)); // ids stay contiguous
  }

  layer(id: number): RegionLayer {
    const found = this.layers.find((l) => l.id === id);
    if (!found) throw new Error(`no region layer ${id}`);
    return found;
  }

  /** Paint a stroke into one layer; other layers lose any touched pixel. */
  brushRegion(id: number, stroke: Stroke) {
    const target = this.layer(id);
    const stamp = (cx: number, cy: number) => {
      const r = Math.max(1, stroke.radius);
      const x0 = Math.max(0, Math.floor(cx - r));
      const x1 = Math.min(this.width - 1, Math.ceil(cx + r));
      const y0 = Math.max(0, Math.floor(cy - r));
      const y1 = Math.min(this.height - 1, Math.ceil(cy + r));
      for (let y = y0; y <= y1; y++) {
        for (let x = x0; x <= x1; x++) {
          const dx = x - cx;
          const dy = y - cy;
          if (dx * dx + dy * dy > r * r) continue;
          const idx = y * this.width + x;
          if (stroke.erase) {
            target.mask[idx] = 0;
          } else {
            target.mask[idx] = 1;
            for (const other of this.layers) {
              if (other.id !== id) other.mask[idx] = 0;
            }
          }
        }
      }
    };
    if (stroke.points.length === 0) return;
    let prev = stroke.points[0];
    stamp(prev.x, prev.y);
    for (const p of stroke.points.slice(1)) {
      // interpolate along the segment so fast strokes stay solid
      const steps = Math.max(
        1,
        Math.ceil(Math.hypot(p.x - prev.x, p.y - prev.y) / (stroke.radius / 2 || 1)),
      );
      for (let s = 1; s <= steps; s++) {
        stamp(prev.x + ((p.x - prev.x) * s) / steps, prev.y + ((p.y - prev.y) * s) / steps);
      }
      prev = p;
    }
  }

  /** Layers are disjoint by construction; verify anyway (used by tests). */
  disjoint(): boolean {
    const counts = new Uint8Array(this.width * this.height);
    for (const layer of this.layers) {
      for (let i = 0; i < counts.length; i++) {
        counts[i] += layer.mask[i];
        if (counts[i] > 1) return false;
      }
    }
    return true;
  }

  nonEmptyLayers(): RegionLayer[] {
    return this.layers.filter((l) => l.mask.some((v) => v !== 0));
  }
}

/** Engine wire format: rle:<w>x<h>:<runs...> alternating 0/1, zero first. */
export function encodeRle(mask: Uint8Array, width: number, height: number): string {
  if (mask.length !== width * height) throw new Error("mask size mismatch");
  const runs: number[] = [];
  let value = 0;
  let run = 0;
  for (let i = 0; i < mask.length; i++) {
    const v = mask[i] ? 1 : 0;
    if (v === value) {
      run++;
    } else {
      runs.push(run);
      value = v;
      run = 1;
    }
  }
  runs.push(run);
  return `rle:${width}x${height}:${runs.join(",")}`;
}

export function decodeRle(text: string): { mask: Uint8Array; width: number; height: number } {
  const m = /^rle:(\d+)x(\d+):(.*)$/.exec(text);
  if (!m) throw new Error("not an rle string");
  const width = parseInt(m[1], 10);
  const height = parseInt(m[2], 10);
  const runs = m[3].length ? m[3].split(",").map((r) => parseInt(r, 10)) : [];
  const mask = new Uint8Array(width * height);
  let pos = 0;
  let value = 0;
  for (const run of runs) {
    if (run < 0 || Number.isNaN(run)) throw new Error("bad run length");
    if (value) mask.fill(1, pos, pos + run);
    pos += run;
    value = 1 - value;
  }
  if (pos !== width * height) throw new Error(`runs sum to ${pos}, expected ${width * height}`);
  return { mask, width, height };
}

/** Latent-grid footprint of a pixel mask (any-coverage rule). */
export function latentFootprint(
  mask: Uint8Array,
  width: number,
  height: number,
  gridRows: number,
  gridCols: number,
): Uint8Array {
  const cells = new Uint8Array(gridRows * gridCols);
  const ph = height / gridRows;
  const pw = width / gridCols;
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      if (!mask[y * width + x]) continue;
      const r = Math.floor(y / ph);
      const c = Math.floor(x / pw);
      cells[r * gridCols + c] = 1;
    }
  }
  return cells;
}
