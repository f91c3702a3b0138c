/** Comparison panel: histogram drawing and the server-provided stats. */

import { describe, expect, it } from "vitest";
import {
  buildComparePanel,
  histogramSvg,
  statsTableHtml,
} from "../src/histogram";
import { comparePayload } from "./helpers";

describe("histogramSvg", () => {
  it("draws one bar per bin and per side", () => {
    const svg = histogramSvg(comparePayload("h"));
    const bars = svg.match(/<rect /g) ?? [];
    // 1 frame rect + 4 experimental + 4 synthetic bars
    expect(bars).toHaveLength(1 + 4 + 4);
    expect(svg).toContain("<svg");
    expect(svg).toContain("aria-label");
  });

  it("scales bars to the tallest bin", () => {
    const payload = comparePayload("h");
    payload.experimental.histogram = [1, 0, 0, 0];
    payload.synthetic.histogram = [0.5, 0, 0, 0];
    const svg = histogramSvg(payload, 100, 100);
    // tallest bar spans the padded height (100 - 2*4 = 92)
    expect(svg).toContain('height="92.00"');
    expect(svg).toContain('height="46.00"');
  });

  it("copes with all-zero histograms", () => {
    const payload = comparePayload("h");
    payload.experimental.histogram = [0, 0, 0, 0];
    payload.synthetic.histogram = [0, 0, 0, 0];
    expect(() => histogramSvg(payload)).not.toThrow();
  });
});

describe("statsTableHtml", () => {
  it("shows the service's numbers, not recomputed ones", () => {
    const payload = comparePayload("h");
    payload.experimental.background = 0.125;
    payload.experimental.snr = 42.5;
    payload.synthetic.snr = null;
    const html = statsTableHtml(payload);
    expect(html).toContain("0.125");
    expect(html).toContain("42.5");
    expect(html).toContain("—"); // null SNR renders as a dash
    expect(html).toContain("93.0%"); // overlap echoed as a percentage
  });
});

describe("buildComparePanel", () => {
  it("renders both previews, the chart, and the stats", () => {
    const panel = buildComparePanel(comparePayload("h"), "exp.png");
    expect(panel.querySelectorAll("figure.render-figure")).toHaveLength(2);
    expect(panel.querySelector(".histogram-wrap svg")).not.toBeNull();
    expect(panel.querySelector(".stats-table")).not.toBeNull();
    expect(panel.textContent).toContain("exp.png");
  });

  it("labels the two sides", () => {
    const panel = buildComparePanel(comparePayload("h"), "exp.png");
    const captions = Array.from(panel.querySelectorAll("figcaption")).map(
      (c) => c.textContent,
    );
    expect(captions[0]).toContain("experimental");
    expect(captions[1]).toContain("synthetic");
  });
});
