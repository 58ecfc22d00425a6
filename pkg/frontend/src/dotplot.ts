import { StatRegistry, svgElem } from "./render";
import type { DotplotPayload } from "./types";

const WIDTH = 360;
const HEIGHT = 130;
const PAD = 10;
const BASE = HEIGHT - 18;

// Draws the server-computed quantile dots stacked inside their bins.
// Dot positions are geometry; the hoverable value and count labels are
// payload fields bound through the registry.
export function renderDotplot(
  container: Element,
  registry: StatRegistry,
  root: unknown,
  basePath: string,
  dp: DotplotPayload,
): SVGElement {
  const svg = svgElem(
    "svg",
    { class: "dotplot", viewBox: `0 0 ${WIDTH} ${HEIGHT}`, role: "img" },
    container,
  );
  const lo = dp.bins[0].lower;
  const hi = dp.bins[dp.bins.length - 1].upper;
  const span = hi - lo || 1;
  const x = (v: number) => PAD + ((v - lo) / span) * (WIDTH - 2 * PAD);

  svgElem(
    "line",
    { x1: PAD, y1: BASE, x2: WIDTH - PAD, y2: BASE, class: "axis" },
    svg,
  );

  const maxStack = Math.max(...dp.bins.map((b) => b.dot_count));
  const r = Math.min(
    (WIDTH - 2 * PAD) / dp.bins.length / 2,
    (BASE - PAD) / (2 * maxStack),
  );

  let dot = 0;
  dp.bins.forEach((bin, bi) => {
    const cx = x((bin.lower + bin.upper) / 2);
    for (let s = 0; s < bin.dot_count; s += 1) {
      const circle = svgElem(
        "circle",
        { cx, cy: BASE - r - s * 2 * r, r, class: "dot" },
        svg,
      );
      const title = svgElem("title", {}, circle);
      registry.bind(title, root, `${basePath}.dots.${dot}`);
      registry.bindAttr(
        circle,
        "data-bin",
        root,
        `${basePath}.bins.${bi}.dot_count`,
      );
      dot += 1;
    }
  });

  const loLabel = svgElem(
    "text",
    { x: PAD, y: HEIGHT - 4, class: "tick", "text-anchor": "start" },
    svg,
  );
  registry.bind(loLabel, root, `${basePath}.bins.0.lower`);
  const hiLabel = svgElem(
    "text",
    { x: WIDTH - PAD, y: HEIGHT - 4, class: "tick", "text-anchor": "end" },
    svg,
  );
  registry.bind(
    hiLabel,
    root,
    `${basePath}.bins.${dp.bins.length - 1}.upper`,
  );
  return svg;
}
