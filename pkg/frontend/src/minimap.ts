/** Words-as-pixels canvas: the zoomed-out overview pane. */

import { parseHex, type Rgb } from "./color.js";
import { cellOrigin, gridHeight, gridWidth, type Layout } from "./geometry.js";

// ---- dim recolor -----------------------------------------------------------

// Fraction of the original ink kept on dimmed pixels; the rest fades to white.
const DIM_KEEP = 0.2;
const WHITE = 255;

function nearestHue(hues: readonly Rgb[], r: number, g: number, b: number): number {
  let best = 0;
  let bestDist = Infinity;
  for (let k = 0; k < hues.length; k++) {
    const hue = hues[k];
    const dr = hue.r - r;
    const dg = hue.g - g;
    const db = hue.b - b;
    const dist = dr * dr + dg * dg + db * db;
    if (dist < bestDist) {
      bestDist = dist;
      best = k;
    }
  }
  return best;
}

/**
 * Recolor for the legend's dim toggle. Pixels whose nearest palette hue is
 * not in `kept` fade toward white; kept pixels and white padding pass
 * through untouched. Returns a fresh buffer and never mutates the source,
 * so undoing a dim is a plain repaint from the original bytes.
 */
export function dimData(
  src: Uint8ClampedArray,
  palette: readonly string[],
  kept: ReadonlySet<number>,
): Uint8ClampedArray<ArrayBuffer> {
  const hues = palette.map(parseHex);
  const out = new Uint8ClampedArray(src.length);
  for (let i = 0; i < src.length; i += 4) {
    const r = src[i];
    const g = src[i + 1];
    const b = src[i + 2];
    out[i + 3] = src[i + 3];
    const padding = r === WHITE && g === WHITE && b === WHITE;
    if (padding || kept.has(nearestHue(hues, r, g, b))) {
      out[i] = r;
      out[i + 1] = g;
      out[i + 2] = b;
    } else {
      out[i] = Math.round(WHITE - (WHITE - r) * DIM_KEEP);
      out[i + 1] = Math.round(WHITE - (WHITE - g) * DIM_KEEP);
      out[i + 2] = Math.round(WHITE - (WHITE - b) * DIM_KEEP);
    }
  }
  return out;
}

// ---- canvas pane -----------------------------------------------------------

const RING_COLOR = "#111111";
const RING_WIDTH = 2;

export class Minimap {
  readonly scale: number;
  private readonly ctx: CanvasRenderingContext2D;
  private readonly source: HTMLCanvasElement;
  private base: ImageData | null = null;
  private dimmed: ImageData | null = null;
  private selected: number | null = null;

  constructor(
    private readonly canvas: HTMLCanvasElement,
    private readonly layout: Layout,
    scale = 1,
  ) {
    if (!Number.isInteger(scale) || scale < 1) {
      throw new RangeError(`scale must be a positive integer, got ${scale}`);
    }
    this.scale = scale;
    const ctx = canvas.getContext("2d");
    if (ctx === null) {
      throw new Error("canvas 2d context unavailable");
    }
    this.ctx = ctx;
    this.source = document.createElement("canvas");
    this.source.width = Math.max(1, gridWidth(layout));
    this.source.height = Math.max(1, gridHeight(layout));
    canvas.width = this.source.width * scale;
    canvas.height = this.source.height * scale;
  }

  /** Decode and draw the service PNG. Integer scaling only, never smoothed. */
  async draw(png: Blob): Promise<void> {
    const bitmap = await createImageBitmap(png);
    const sctx = this.sourceContext();
    sctx.drawImage(bitmap, 0, 0);
    bitmap.close();
    this.base = sctx.getImageData(0, 0, this.source.width, this.source.height);
    this.repaint();
  }

  setSelection(t: number | null): void {
    this.selected = t;
    this.repaint();
  }

  /** Spotlight one topic by dimming the rest; null restores the original pixels. */
  setDimTopic(topic: number | null, palette: readonly string[]): void {
    if (this.base === null) {
      return;
    }
    this.dimmed =
      topic === null
        ? null
        : new ImageData(
            dimData(this.base.data, palette, new Set([topic])),
            this.base.width,
            this.base.height,
          );
    this.repaint();
  }

  /** Register a click handler receiving unscaled grid coordinates. */
  onClick(handler: (x: number, y: number) => void): void {
    this.canvas.addEventListener("click", (evt) => {
      handler(Math.floor(evt.offsetX / this.scale), Math.floor(evt.offsetY / this.scale));
    });
  }

  private sourceContext(): CanvasRenderingContext2D {
    const sctx = this.source.getContext("2d");
    if (sctx === null) {
      throw new Error("canvas 2d context unavailable");
    }
    return sctx;
  }

  private repaint(): void {
    if (this.base === null) {
      return;
    }
    this.sourceContext().putImageData(this.dimmed ?? this.base, 0, 0);
    this.ctx.imageSmoothingEnabled = false;
    this.ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    this.ctx.drawImage(this.source, 0, 0, this.canvas.width, this.canvas.height);
    if (this.selected !== null) {
      this.drawRing(this.selected);
    }
  }

  private drawRing(t: number): void {
    const origin = cellOrigin(this.layout, t);
    const side = this.layout.pixelSize * this.scale;
    this.ctx.strokeStyle = RING_COLOR;
    this.ctx.lineWidth = RING_WIDTH;
    // The ring sits just outside the square so it never covers the token color.
    this.ctx.strokeRect(
      origin.x * this.scale - RING_WIDTH / 2,
      origin.y * this.scale - RING_WIDTH / 2,
      side + RING_WIDTH,
      side + RING_WIDTH,
    );
  }
}
