/**
 * Comparison panel: overlaid intensity histograms plus the summary
 * statistics the service computed (overlap, background, noise, peak,
 * SNR). All numbers come straight from the /v1/compare response; this
 * module only draws them.
 */

import { ComparePayload, SideStats } from "./api";
import { formatNumber } from "./overlay";

const EXPERIMENTAL_COLOR = "#c2562b";
const SYNTHETIC_COLOR = "#2b6cb0";

/** SVG markup for the two overlaid histograms on shared bins. */
export function histogramSvg(
  payload: ComparePayload,
  width = 460,
  height = 180,
): string {
  const { experimental, synthetic } = payload;
  const counts = [...experimental.histogram, ...synthetic.histogram];
  const top = Math.max(...counts, 1e-12);
  const n = experimental.histogram.length;
  const pad = 4;
  const barWidth = (width - 2 * pad) / n;

  const bars = (values: number[], color: string, shift: number): string =>
    values
      .map((value, i) => {
        const h = (value / top) * (height - 2 * pad);
        const x = pad + i * barWidth + shift;
        const y = height - pad - h;
        return (
          `<rect x="${x.toFixed(2)}" y="${y.toFixed(2)}" ` +
          `width="${Math.max(barWidth - 1, 0.5).toFixed(2)}" ` +
          `height="${h.toFixed(2)}" fill="${color}" fill-opacity="0.55"/>`
        );
      })
      .join("");

  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" ` +
    `height="${height}" viewBox="0 0 ${width} ${height}" ` +
    `class="histogram" role="img" aria-label="intensity histograms">` +
    `<rect width="${width}" height="${height}" fill="none"/>` +
    bars(experimental.histogram, EXPERIMENTAL_COLOR, 0) +
    bars(synthetic.histogram, SYNTHETIC_COLOR, 0) +
    `</svg>`
  );
}

function statRow(label: string, experimental: string, synthetic: string): string {
  return (
    `<tr><th>${label}</th>` +
    `<td>${experimental}</td><td>${synthetic}</td></tr>`
  );
}

function sideNumbers(side: SideStats): {
  background: string;
  noise: string;
  peak: string;
  snr: string;
} {
  return {
    background: formatNumber(side.background),
    noise: formatNumber(side.noise),
    peak: formatNumber(side.peak),
    snr: side.snr === null ? "—" : formatNumber(side.snr),
  };
}

/** The stats table under the histograms (HTML markup string). */
export function statsTableHtml(payload: ComparePayload): string {
  const exp = sideNumbers(payload.experimental);
  const syn = sideNumbers(payload.synthetic);
  return (
    `<table class="stats-table">` +
    `<thead><tr><th></th>` +
    `<th style="color:${EXPERIMENTAL_COLOR}">experimental</th>` +
    `<th style="color:${SYNTHETIC_COLOR}">synthetic</th></tr></thead>` +
    `<tbody>` +
    statRow("background", exp.background, syn.background) +
    statRow("noise", exp.noise, syn.noise) +
    statRow("peak", exp.peak, syn.peak) +
    statRow("SNR", exp.snr, syn.snr) +
    `</tbody></table>` +
    `<p class="overlap-line">histogram overlap: ` +
    `<strong>${(payload.overlap * 100).toFixed(1)}%</strong> ` +
    `over ${payload.experimental.histogram.length} bins</p>`
  );
}

/** The full comparison panel; hidden entirely until an upload exists. */
export function buildComparePanel(
  payload: ComparePayload,
  filename: string,
): HTMLElement {
  const panel = document.createElement("div");
  panel.className = "compare-panel";

  const title = document.createElement("h3");
  title.textContent = `comparison · ${filename} vs sample ${payload.index}`;
  panel.append(title);

  const row = document.createElement("div");
  row.className = "compare-row";
  for (const [side, label] of [
    [payload.experimental, "experimental"],
    [payload.synthetic, "synthetic"],
  ] as const) {
    const fig = document.createElement("figure");
    fig.className = "render-figure";
    const img = document.createElement("img");
    img.src = `data:image/png;base64,${side.image.png_base64}`;
    img.width = side.image.width;
    img.height = side.image.height;
    img.alt = label;
    const cap = document.createElement("figcaption");
    cap.textContent = `${label} · range [${formatNumber(side.image.lo)}, ${formatNumber(side.image.hi)}]`;
    fig.append(img, cap);
    row.append(fig);
  }
  panel.append(row);

  const chart = document.createElement("div");
  chart.className = "histogram-wrap";
  chart.innerHTML = histogramSvg(payload);
  panel.append(chart);

  const stats = document.createElement("div");
  stats.className = "stats-wrap";
  stats.innerHTML = statsTableHtml(payload);
  panel.append(stats);

  return panel;
}
