// Color-blind-safe tile styling: Okabe-Ito colors paired with distinct
// shapes so no two tile kinds differ by hue alone.

export interface TileStyle {
  color: string;
  symbol: string;
  name: string;
}

export const TILE_STYLES: TileStyle[] = [
  { color: "#E69F00", symbol: "●", name: "orange-dot" },
  { color: "#56B4E9", symbol: "▲", name: "sky-triangle" },
  { color: "#009E73", symbol: "■", name: "green-square" },
  { color: "#F0E442", symbol: "★", name: "yellow-star" },
  { color: "#0072B2", symbol: "◆", name: "blue-diamond" },
  { color: "#D55E00", symbol: "✚", name: "vermillion-cross" },
  { color: "#CC79A7", symbol: "⬢", name: "pink-hex" },
  { color: "#999999", symbol: "◐", name: "grey-half" },
];

export function tileStyle(colorId: number): TileStyle {
  return TILE_STYLES[colorId % TILE_STYLES.length];
}
