/** SVG renderers. Pure string builders so they test without a DOM; every
 * chart stamps the artifact index it visualizes (traceability tooltip). */

export interface NumberLineInput {
  artifactIndex: number;
  metric: string;
  test: Record<string, number>;
  random: number;
  biased: number;
}

function esc(s: string): string {
  return s.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;');
}

/** Three-marker number line: test score(s) against random and biased. */
export function ratingNumberLine(input: NumberLineInput, width = 560): string {
  const values = [...Object.values(input.test), input.random, input.biased];
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const span = hi - lo || 1;
  const x = (v: number) => 40 + ((v - lo) / span) * (width - 80);
  const rows: string[] = [];
  rows.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="120" viewBox="0 0 ${width} 120">`,
    `<title>artifact #${input.artifactIndex}: ${esc(input.metric)} vs baselines</title>`,
    `<line x1="40" y1="70" x2="${width - 40}" y2="70" stroke="#888" stroke-width="2"/>`,
  );
  const marker = (v: number, color: string, label: string, dy: number) =>
    rows.push(
      `<circle cx="${x(v).toFixed(1)}" cy="70" r="7" fill="${color}"/>`,
      `<text x="${x(v).toFixed(1)}" y="${dy}" text-anchor="middle" font-size="11" ` +
        `font-family="sans-serif">${esc(label)} (${v.toPrecision(3)})</text>`,
    );
  marker(input.random, '#999999', 'random', 100);
  marker(input.biased, '#d1605e', 'biased', 112);
  let k = 0;
  for (const [name, score] of Object.entries(input.test)) {
    marker(score, '#4878a8', name, 30 + 14 * k);
    k += 1;
  }
  rows.push('</svg>');
  return rows.join('');
}

/** Signed horizontal bars for attributions, strongest first. */
export function shapBars(
  artifactIndex: number,
  names: string[],
  phis: number[],
  topK = 12,
  width = 560,
): string {
  const order = names
    .map((_, i) => i)
    .sort((a, b) => Math.abs(phis[b]) - Math.abs(phis[a]))
    .slice(0, topK);
  const vmax = Math.max(...order.map((i) => Math.abs(phis[i]))) || 1;
  const rowH = 20;
  const height = 50 + order.length * rowH;
  const mid = 200 + (width - 240) / 2;
  const half = (width - 240) / 2;
  const out = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
    `<title>artifact #${artifactIndex}: attributions</title>`,
    `<line x1="${mid}" y1="30" x2="${mid}" y2="${height - 10}" stroke="#888"/>`,
  ];
  order.forEach((i, row) => {
    const y = 36 + row * rowH;
    const w = (Math.abs(phis[i]) / vmax) * half;
    const x = phis[i] >= 0 ? mid : mid - w;
    const color = phis[i] >= 0 ? '#d1605e' : '#4878a8';
    out.push(
      `<rect x="${x.toFixed(1)}" y="${y}" width="${Math.max(w, 0.5).toFixed(1)}" height="13" fill="${color}"/>`,
      `<text x="194" y="${y + 10}" text-anchor="end" font-size="11" font-family="sans-serif">` +
        `${esc(names[i].slice(0, 26))}</text>`,
      `<text x="${(phis[i] >= 0 ? mid + w + 4 : mid - w - 4).toFixed(1)}" y="${y + 10}" ` +
        `text-anchor="${phis[i] >= 0 ? 'start' : 'end'}" font-size="11" ` +
        `font-family="sans-serif">${phis[i] >= 0 ? '+' : ''}${phis[i].toPrecision(3)}</text>`,
    );
  });
  out.push('</svg>');
  return out.join('');
}

/** Partial-dependence polyline over a numeric grid. */
export function pdpLine(
  artifactIndex: number,
  grid: number[],
  averages: number[],
  width = 560,
  height = 240,
): string {
  const xlo = Math.min(...grid);
  const xhi = Math.max(...grid);
  const ylo = Math.min(...averages);
  const yhi = Math.max(...averages);
  const xs = (v: number) => 50 + ((v - xlo) / (xhi - xlo || 1)) * (width - 80);
  const ys = (v: number) => height - 40 - ((v - ylo) / (yhi - ylo || 1)) * (height - 80);
  const points = grid.map((g, i) => `${xs(g).toFixed(1)},${ys(averages[i]).toFixed(1)}`);
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
    `<title>artifact #${artifactIndex}: partial dependence</title>`,
    `<polyline fill="none" stroke="#4878a8" stroke-width="2" points="${points.join(' ')}"/>`,
    `<line x1="50" y1="${height - 40}" x2="${width - 30}" y2="${height - 40}" stroke="#888"/>`,
    `<line x1="50" y1="40" x2="50" y2="${height - 40}" stroke="#888"/>`,
    '</svg>',
  ].join('');
}

export interface CfDiffRow {
  feature: string;
  before: unknown;
  after: unknown;
  changed: boolean;
}

/** Counterfactual diff rows: changed features first. */
export function counterfactualDiff(
  original: Record<string, unknown>,
  x_cf: Record<string, unknown>,
  changed: string[],
): CfDiffRow[] {
  const changedSet = new Set(changed);
  const rows: CfDiffRow[] = Object.keys(x_cf).map((feature) => ({
    feature,
    before: original[feature],
    after: x_cf[feature],
    changed: changedSet.has(feature),
  }));
  rows.sort((a, b) => Number(b.changed) - Number(a.changed) || a.feature.localeCompare(b.feature));
  return rows;
}
