/** Minimal deterministic SVG assembly: tags, linear scales, ticks, axes. */

export function esc(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export type Attrs = Record<string, string | number>;

export function tag(name: string, attrs: Attrs, body = ""): string {
  const parts = Object.entries(attrs)
    .map(([k, v]) => `${k}="${typeof v === "number" ? fmt(v) : esc(v)}"`)
    .join(" ");
  return body === ""
    ? `<${name} ${parts}/>`
    : `<${name} ${parts}>${body}</${name}>`;
}

/** Fixed-precision coordinate formatting so output is platform-stable. */
export function fmt(v: number): string {
  const r = Math.round(v * 100) / 100;
  return Object.is(r, -0) ? "0" : String(r);
}

export interface Scale {
  (v: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linearScale(
  domain: [number, number],
  range: [number, number],
): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0;
  const f = ((v: number) =>
    span === 0 ? (r0 + r1) / 2 : r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  f.domain = domain;
  f.range = range;
  return f;
}

/** Round ticks on a 1-2-5 ladder covering [lo, hi]. */
export function niceTicks(lo: number, hi: number, n = 5): number[] {
  if (!(hi > lo)) {
    return [lo];
  }
  const rawStep = (hi - lo) / Math.max(1, n);
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  let step = mag;
  for (const m of [1, 2, 5, 10]) {
    if (m * mag >= rawStep) {
      step = m * mag;
      break;
    }
  }
  const start = Math.ceil(lo / step) * step;
  const out: number[] = [];
  for (let v = start; v <= hi + step * 1e-9; v += step) {
    out.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return out;
}

export function tickLabel(v: number): string {
  if (v === 0) {
    return "0";
  }
  const a = Math.abs(v);
  if (a >= 0.001 && a < 10000) {
    return String(Math.round(v * 1e6) / 1e6);
  }
  return v.toExponential(1);
}

export interface Frame {
  left: number;
  top: number;
  width: number;
  height: number;
}

/** Bottom axis: baseline, ticks, tick labels, centred title. */
export function bottomAxis(
  frame: Frame,
  x: Scale,
  ticks: number[],
  labels: string[],
  title: string,
): string {
  const y0 = frame.top + frame.height;
  const parts: string[] = [
    tag("line", {
      x1: frame.left, y1: y0, x2: frame.left + frame.width, y2: y0,
      stroke: "#000", "stroke-width": 1,
    }),
  ];
  ticks.forEach((t, i) => {
    const px = x(t);
    parts.push(tag("line", {
      x1: px, y1: y0, x2: px, y2: y0 + 4, stroke: "#000", "stroke-width": 1,
    }));
    parts.push(tag("text", {
      x: px, y: y0 + 16, "font-size": 11, "text-anchor": "middle",
      "font-family": "sans-serif",
    }, esc(labels[i] ?? tickLabel(t))));
  });
  parts.push(tag("text", {
    x: frame.left + frame.width / 2, y: y0 + 32, "font-size": 12,
    "text-anchor": "middle", "font-family": "sans-serif",
  }, esc(title)));
  return parts.join("");
}

/** Left axis: baseline, ticks, tick labels, rotated title. */
export function leftAxis(
  frame: Frame,
  y: Scale,
  ticks: number[],
  title: string,
): string {
  const parts: string[] = [
    tag("line", {
      x1: frame.left, y1: frame.top, x2: frame.left,
      y2: frame.top + frame.height, stroke: "#000", "stroke-width": 1,
    }),
  ];
  for (const t of ticks) {
    const py = y(t);
    parts.push(tag("line", {
      x1: frame.left - 4, y1: py, x2: frame.left, y2: py,
      stroke: "#000", "stroke-width": 1,
    }));
    parts.push(tag("text", {
      x: frame.left - 6, y: py + 3.5, "font-size": 11, "text-anchor": "end",
      "font-family": "sans-serif",
    }, esc(tickLabel(t))));
  }
  parts.push(tag("text", {
    x: frame.left - 40, y: frame.top + frame.height / 2, "font-size": 12,
    "text-anchor": "middle", "font-family": "sans-serif",
    transform: `rotate(-90 ${fmt(frame.left - 40)} ${fmt(frame.top + frame.height / 2)})`,
  }, esc(title)));
  return parts.join("");
}

export function svgDoc(width: number, height: number, body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" ` +
    `height="${height}" viewBox="0 0 ${width} ${height}">` +
    `<rect width="${width}" height="${height}" fill="#fff"/>` +
    body +
    "</svg>\n"
  );
}
