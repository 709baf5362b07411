/** Hex color plumbing for canvas pixel comparisons. */

export interface Rgb {
  readonly r: number;
  readonly g: number;
  readonly b: number;
}

const HEX_PATTERN = /^#[0-9A-Fa-f]{6}$/;

export function parseHex(hex: string): Rgb {
  if (!HEX_PATTERN.test(hex)) {
    throw new Error(`bad hex color: ${hex}`);
  }
  return {
    r: parseInt(hex.slice(1, 3), 16),
    g: parseInt(hex.slice(3, 5), 16),
    b: parseInt(hex.slice(5, 7), 16),
  };
}

// Uppercase to match the service's color formatting byte for byte.
export function toHex(r: number, g: number, b: number): string {
  const pair = (v: number) => v.toString(16).toUpperCase().padStart(2, "0");
  return `#${pair(r)}${pair(g)}${pair(b)}`;
}
