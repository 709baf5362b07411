/**
 * Pixel-grid geometry, the client half of the /api/layout contract.
 *
 * Tokens fill columns top to bottom, columns run left to right, and every
 * token owns a pixelSize x pixelSize square. The hit test must stay
 * formula-identical to the service so a click resolves to the same token
 * index the server would report for that coordinate.
 */

export interface Layout {
  readonly columnHeight: number;
  readonly pixelSize: number;
  readonly tokenCount: number;
}

export function columnCount(layout: Layout): number {
  return Math.ceil(layout.tokenCount / layout.columnHeight);
}

export function gridWidth(layout: Layout): number {
  return columnCount(layout) * layout.pixelSize;
}

export function gridHeight(layout: Layout): number {
  return layout.columnHeight * layout.pixelSize;
}

/** Top-left corner of token t's square, in unscaled canvas pixels. */
export function cellOrigin(layout: Layout, t: number): { x: number; y: number } {
  const col = Math.floor(t / layout.columnHeight);
  const row = t % layout.columnHeight;
  return { x: col * layout.pixelSize, y: row * layout.pixelSize };
}

/** Center of token t's square, the safest probe point for color checks. */
export function cellCenter(layout: Layout, t: number): { x: number; y: number } {
  const half = Math.floor(layout.pixelSize / 2);
  const origin = cellOrigin(layout, t);
  return { x: origin.x + half, y: origin.y + half };
}

/** Token index under an unscaled coordinate, or null on padding and misses. */
export function hitTest(layout: Layout, x: number, y: number): number | null {
  if (x < 0 || y < 0 || x >= gridWidth(layout) || y >= gridHeight(layout)) {
    return null;
  }
  const t =
    Math.floor(x / layout.pixelSize) * layout.columnHeight +
    Math.floor(y / layout.pixelSize);
  return t < layout.tokenCount ? t : null;
}
