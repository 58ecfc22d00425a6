import { StatRegistry, elem, svgElem } from "./render";
import type { RiskPointPayload } from "./types";

const WIDTH = 360;
const HEIGHT = 140;
const PAD = 14;

// Server-computed risk curve on a log-epsilon axis with the current
// operating point highlighted. Curve geometry maps payload values to
// pixels; the readouts underneath are bound payload fields.
export function renderRiskCurve(
  container: Element,
  registry: StatRegistry,
  root: unknown,
  pointsPath: string,
  points: RiskPointPayload[],
  current?: { root: unknown; path: string; point: RiskPointPayload },
): void {
  const svg = svgElem(
    "svg",
    { class: "riskcurve", viewBox: `0 0 ${WIDTH} ${HEIGHT}`, role: "img" },
    container,
  );
  const eps = points.map((p) => p.epsilon);
  const risks = points.map((p) => p.risk);
  const xLo = Math.log(eps[0]);
  const xHi = Math.log(eps[eps.length - 1]);
  const yLo = Math.min(...risks);
  const yHi = Math.max(...risks);
  const x = (e: number) =>
    PAD + ((Math.log(e) - xLo) / (xHi - xLo || 1)) * (WIDTH - 2 * PAD);
  const y = (r: number) =>
    HEIGHT - PAD - ((r - yLo) / (yHi - yLo || 1)) * (HEIGHT - 2 * PAD);

  const path = points
    .map((p, i) => `${i === 0 ? "M" : "L"}${x(p.epsilon).toFixed(2)},${y(p.risk).toFixed(2)}`)
    .join("");
  svgElem("path", { d: path, class: "curve", fill: "none" }, svg);

  if (current) {
    svgElem(
      "circle",
      {
        cx: x(current.point.epsilon),
        cy: y(current.point.risk),
        r: 4,
        class: "current",
      },
      svg,
    );
  }

  const caption = elem("div", "risk-caption", container as HTMLElement);
  caption.append("risk range ");
  const loSpan = elem("span", "stat", caption);
  registry.bind(loSpan, root, `${pointsPath}.0.risk`);
  caption.append(" to ");
  const hiSpan = elem("span", "stat", caption);
  registry.bind(hiSpan, root, `${pointsPath}.${points.length - 1}.risk`);
  if (current) {
    caption.append(" ; at epsilon ");
    const epsSpan = elem("span", "stat", caption);
    registry.bind(epsSpan, current.root, `${current.path}.epsilon`);
    caption.append(" risk ");
    const riskSpan = elem("span", "stat", caption);
    registry.bind(riskSpan, current.root, `${current.path}.risk`);
  }
}
