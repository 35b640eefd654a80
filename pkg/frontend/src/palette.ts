/**
 * Stable strategy colors, identical in every figure.
 *
 * The five default study labels get fixed colors; any other label falls back
 * to a deterministic hue derived from the label text, so custom studies still
 * render consistently across figures.
 */
const FIXED: Record<string, string> = {
  a: "#d62728", // pure C-criterion
  b: "#1f77b4", // pure D-criterion
  c: "#2ca02c",
  d: "#ff7f0e",
  e: "#9467bd",
};

function hashHue(label: string): number {
  let h = 2166136261;
  for (let i = 0; i < label.length; i++) {
    h = Math.imul(h ^ label.charCodeAt(i), 16777619) >>> 0;
  }
  return h % 360;
}

export function strategyColor(label: string): string {
  const fixed = FIXED[label];
  if (fixed !== undefined) {
    return fixed;
  }
  return `hsl(${hashHue(label)}, 65%, 40%)`;
}
