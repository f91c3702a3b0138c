/**
 * Whole-app wiring: startApp against a scripted service, exercising the
 * edit → validate → render → compare cycle through the real DOM.
 */

import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";
import { startApp } from "../src/main";
import { jsonResponse, mockFetch, standardRoutes } from "./helpers";

const SKELETON = `
  <span id="status-line"></span>
  <span id="hash-line"></span>
  <button id="tab-form"></button>
  <button id="tab-raw"></button>
  <div id="form-host"></div>
  <textarea id="raw-config"></textarea>
  <div id="global-diagnostics"></div>
  <button id="render-button"></button>
  <input id="overlay-toggle" type="checkbox" />
  <select id="component-select">
    <option value="abs">abs</option>
    <option value="real">real</option>
    <option value="imag">imag</option>
    <option value="phase">phase</option>
  </select>
  <input id="index-input" type="number" value="0" />
  <div id="render-host"></div>
  <div id="records-host"></div>
  <div id="compare-host" style="display:none"></div>
  <input id="compare-input" type="file" />
  <button id="compare-clear"></button>
  <button id="export-button"></button>
  <input id="import-input" type="file" />
`;

async function settle(): Promise<void> {
  // drain the promise chains started by event handlers
  for (let i = 0; i < 8; i++) {
    await Promise.resolve();
  }
  await new Promise((resolve) => setTimeout(resolve, 0));
}

function get<T extends HTMLElement>(id: string): T {
  return document.getElementById(id) as T;
}

function attachFile(input: HTMLInputElement, file: File): void {
  Object.defineProperty(input, "files", {
    configurable: true,
    value: { 0: file, length: 1, item: () => file },
  });
}

beforeEach(() => {
  document.body.innerHTML = SKELETON;
});

afterEach(() => {
  vi.unstubAllGlobals();
  document.body.innerHTML = "";
});

describe("startApp", () => {
  it("connects, loads the registry, and validates the starter config", async () => {
    mockFetch(standardRoutes());
    startApp();
    await settle();
    expect(get("status-line").textContent).toBe("service: connected");
    expect(get<HTMLButtonElement>("render-button").disabled).toBe(false);
    expect(get("hash-line").textContent).toMatch(/^config hash-/);
    // registry-driven form is on screen
    expect(document.querySelectorAll(".node-card").length).toBeGreaterThan(0);
    expect(get("global-diagnostics").children).toHaveLength(0);
  });

  it("surfaces an unreachable service without wiping the editor", async () => {
    mockFetch([]); // every fetch fails
    startApp();
    await settle();
    expect(get("status-line").textContent).toContain("service unreachable");
    expect(get<HTMLTextAreaElement>("raw-config").value).toContain(
      '"pipeline"',
    );
  });

  it("renders a sample with records on click", async () => {
    mockFetch(standardRoutes());
    startApp();
    await settle();
    get<HTMLButtonElement>("render-button").click();
    await settle();
    expect(document.querySelector(".render-panel")).not.toBeNull();
    expect(document.querySelector(".render-panel.stale")).toBeNull();
    const records = document.querySelectorAll(".records-table tbody tr");
    expect(records.length).toBeGreaterThan(0);
  });

  it("flags the displayed render as stale after an edit, until re-render", async () => {
    mockFetch(standardRoutes());
    startApp();
    await settle();
    get<HTMLButtonElement>("render-button").click();
    await settle();

    const raw = get<HTMLTextAreaElement>("raw-config");
    const doc = JSON.parse(raw.value) as { seed: number };
    doc.seed += 1;
    raw.value = JSON.stringify(doc, null, 2);
    raw.dispatchEvent(new Event("change"));
    await settle();
    expect(document.querySelector(".render-panel.stale")).not.toBeNull();
    expect(document.querySelector(".stale-badge")).not.toBeNull();

    get<HTMLButtonElement>("render-button").click();
    await settle();
    expect(document.querySelector(".render-panel.stale")).toBeNull();
  });

  it("anchors validation errors to the offending node card", async () => {
    mockFetch(standardRoutes());
    startApp();
    await settle();

    const raw = get<HTMLTextAreaElement>("raw-config");
    const doc = JSON.parse(raw.value) as {
      pipeline: { type: string }[];
    };
    doc.pipeline[1] = { type: "warp_drive" };
    raw.value = JSON.stringify(doc, null, 2);
    raw.dispatchEvent(new Event("change"));
    await settle();

    const slot = document.querySelector<HTMLElement>(
      '[data-diagnostics-for="$.pipeline[1]"]',
    )!;
    expect(slot.textContent).toContain("warp_drive");
    expect(get<HTMLButtonElement>("render-button").disabled).toBe(true);

    // fixing the node clears the diagnostic and re-enables rendering
    doc.pipeline[1] = { type: "fluorescence" };
    raw.value = JSON.stringify(doc, null, 2);
    raw.dispatchEvent(new Event("change"));
    await settle();
    expect(
      document.querySelector('[data-diagnostics-for="$.pipeline[1]"]')!
        .textContent,
    ).toBe("");
    expect(get<HTMLButtonElement>("render-button").disabled).toBe(false);
  });

  it("keeps the comparison panel hidden until an upload succeeds", async () => {
    mockFetch(standardRoutes());
    startApp();
    await settle();
    expect(get("compare-host").style.display).toBe("none");

    get<HTMLButtonElement>("render-button").click();
    await settle();
    expect(get("compare-host").style.display).toBe("none");

    const input = get<HTMLInputElement>("compare-input");
    attachFile(input, new File([new Uint8Array(16)], "exp.png"));
    input.dispatchEvent(new Event("change"));
    await settle();
    expect(get("compare-host").style.display).toBe("block");
    expect(get("compare-host").textContent).toContain("exp.png");
    expect(document.querySelector(".stats-table")).not.toBeNull();
  });

  it("shows the 413 limit and keeps the session on oversize uploads", async () => {
    const routes = standardRoutes();
    routes[4] = {
      matches: (url: string) => url.endsWith("/v1/compare"),
      respond: () =>
        jsonResponse(
          { detail: { error: "upload too large", limit_bytes: 16777216 } },
          413,
        ),
    };
    mockFetch(routes);
    startApp();
    await settle();
    get<HTMLButtonElement>("render-button").click();
    await settle();

    const input = get<HTMLInputElement>("compare-input");
    attachFile(input, new File([new Uint8Array(32)], "huge.png"));
    input.dispatchEvent(new Event("change"));
    await settle();

    expect(get("compare-host").style.display).toBe("none");
    expect(get("global-diagnostics").textContent).toContain("16.0 MiB");
    // the render survived the failed upload
    expect(document.querySelector(".render-panel")).not.toBeNull();
  });

  it("overlay toggle redraws from the cached payload without a request", async () => {
    const fetchMock = mockFetch(standardRoutes());
    startApp();
    await settle();
    get<HTMLButtonElement>("render-button").click();
    await settle();
    const before = fetchMock.mock.calls.length;

    const toggle = get<HTMLInputElement>("overlay-toggle");
    toggle.checked = true;
    toggle.dispatchEvent(new Event("change"));
    await settle();
    expect(document.querySelector(".overlay-stack")).not.toBeNull();
    expect(fetchMock.mock.calls.length).toBe(before);
  });

  it("disables the component selector for real-valued renders", async () => {
    mockFetch(standardRoutes());
    startApp();
    await settle();
    get<HTMLButtonElement>("render-button").click();
    await settle();
    expect(get<HTMLSelectElement>("component-select").disabled).toBe(true);
  });
});
