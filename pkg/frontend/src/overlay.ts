/**
 * Display of a rendered sample: image and label side by side, an
 * optional label-over-image overlay, and the ground-truth records table.
 *
 * Everything shown is taken verbatim from the render response — the PNG
 * bytes are decoded by the browser's image pipeline for display only,
 * and the quantization range (lo/hi) is echoed so the viewer knows what
 * the 16-bit values map back to. Toggling the overlay reuses the same
 * payload; it never triggers a request.
 */

import { ImagePayload, RecordEntry, RenderPayload } from "./api";

export function imageDataUrl(payload: ImagePayload): string {
  return `data:image/png;base64,${payload.png_base64}`;
}

function caption(payload: ImagePayload, title: string): string {
  const range = `[${formatNumber(payload.lo)}, ${formatNumber(payload.hi)}]`;
  const shape = payload.shape.join("×");
  const component = payload.complex ? ` · ${payload.component}` : "";
  return `${title} · ${shape}${component} · range ${range}`;
}

export function formatNumber(value: number | null): string {
  if (value === null) {
    return "—";
  }
  if (value === 0) {
    return "0";
  }
  const magnitude = Math.abs(value);
  if (magnitude >= 1e4 || magnitude < 1e-3) {
    return value.toExponential(3);
  }
  let text = value.toPrecision(4);
  if (text.includes(".")) {
    text = text.replace(/0+$/, "").replace(/\.$/, "");
  }
  return text;
}

function figure(payload: ImagePayload, title: string, cls: string): HTMLElement {
  const fig = document.createElement("figure");
  fig.className = cls;
  const img = document.createElement("img");
  img.className = "render-image";
  img.src = imageDataUrl(payload);
  img.width = payload.width;
  img.height = payload.height;
  img.alt = title;
  const cap = document.createElement("figcaption");
  cap.textContent = caption(payload, title);
  fig.append(img, cap);
  return fig;
}

/**
 * The side-by-side / overlay view for one render payload. `stale` marks
 * a render whose config hash no longer matches the edited draft.
 */
export function buildRenderPanel(
  render: RenderPayload,
  overlayVisible: boolean,
  stale: boolean,
): HTMLElement {
  const panel = document.createElement("div");
  panel.className = stale ? "render-panel stale" : "render-panel";
  panel.dataset.configHash = render.config_hash;
  panel.dataset.index = String(render.index);

  if (stale) {
    const badge = document.createElement("div");
    badge.className = "stale-badge";
    badge.textContent =
      "stale: the config changed since this render — render again to refresh";
    panel.append(badge);
  }

  const row = document.createElement("div");
  row.className = "render-row";
  row.append(figure(render.image, `sample ${render.index}`, "render-figure"));
  if (render.label) {
    row.append(figure(render.label, "label", "render-figure"));
  }
  panel.append(row);

  if (render.label && overlayVisible) {
    const overlay = document.createElement("div");
    overlay.className = "overlay-stack";
    const base = document.createElement("img");
    base.src = imageDataUrl(render.image);
    base.width = render.image.width;
    base.height = render.image.height;
    base.alt = "sample";
    const top = document.createElement("img");
    top.src = imageDataUrl(render.label);
    top.width = render.label.width;
    top.height = render.label.height;
    top.alt = "label overlay";
    top.className = "overlay-top";
    overlay.append(base, top);
    const cap = document.createElement("div");
    cap.className = "overlay-caption";
    cap.textContent = "label over image";
    panel.append(overlay, cap);
  }
  return panel;
}

/** Ground-truth records table (positions, radii, sampled properties). */
export function buildRecordsTable(records: RecordEntry[]): HTMLElement {
  const table = document.createElement("table");
  table.className = "records-table";
  const head = table.createTHead().insertRow();
  for (const column of ["id", "feature", "name", "values"]) {
    const cell = document.createElement("th");
    cell.textContent = column;
    head.append(cell);
  }
  const body = table.createTBody();
  for (const record of records) {
    const row = body.insertRow();
    row.insertCell().textContent = record.id;
    row.insertCell().textContent = record.feature;
    row.insertCell().textContent = record.name;
    const values = row.insertCell();
    values.className = "record-values";
    values.textContent = Object.entries(record.values)
      .map(([key, value]) => `${key}=${compactValue(value)}`)
      .join("  ");
  }
  return table;
}

function compactValue(value: unknown): string {
  if (typeof value === "number") {
    return formatNumber(value);
  }
  return JSON.stringify(value);
}
