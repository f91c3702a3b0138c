/**
 * Playground application: wires the session store, the registry-driven
 * form, the render/overlay view, and the comparison panel to the DOM.
 *
 * The page holds no state beyond the session store and persists nothing;
 * the config file moves in and out only through the explicit download
 * and import controls.
 */

import { createClient, RegistryFeature } from "./api";
import { buildForm, attachDiagnostics, ConfigDoc } from "./form";
import { buildComparePanel } from "./histogram";
import { buildRecordsTable, buildRenderPanel } from "./overlay";
import { SessionState, SessionStore } from "./state";

const STARTER_CONFIG = {
  version: 1,
  seed: 1234,
  optics: {
    wavelength: 0.52,
    numerical_aperture: 1.0,
    output_shape: [128, 128],
    padding: 32,
    pixel_size: 0.1,
  },
  pipeline: [
    {
      type: "duplicate",
      count: { uniform: [3, 7] },
      child: {
        type: "blob",
        name: "cell",
        properties: {
          position_y: { uniform: [20, 108] },
          position_x: { uniform: [20, 108] },
          sigma: { uniform: [2, 4] },
          integral: { uniform: [0.6, 1.4] },
        },
      },
    },
    { type: "fluorescence" },
    { type: "poisson_noise", properties: { snr: 20 } },
  ],
  label: [{ type: "label_density", properties: { sigma: 5.0 } }],
};

function mustGet<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing #${id} in index.html`);
  }
  return node as T;
}

export function startApp(): void {
  const api = createClient("");
  const store = new SessionStore(
    api,
    JSON.stringify(STARTER_CONFIG, null, 2) + "\n",
  );

  const statusLine = mustGet<HTMLElement>("status-line");
  const formHost = mustGet<HTMLElement>("form-host");
  const rawArea = mustGet<HTMLTextAreaElement>("raw-config");
  const globalDiagnostics = mustGet<HTMLElement>("global-diagnostics");
  const renderButton = mustGet<HTMLButtonElement>("render-button");
  const overlayToggle = mustGet<HTMLInputElement>("overlay-toggle");
  const componentSelect = mustGet<HTMLSelectElement>("component-select");
  const indexInput = mustGet<HTMLInputElement>("index-input");
  const renderHost = mustGet<HTMLElement>("render-host");
  const recordsHost = mustGet<HTMLElement>("records-host");
  const compareHost = mustGet<HTMLElement>("compare-host");
  const compareInput = mustGet<HTMLInputElement>("compare-input");
  const compareClear = mustGet<HTMLButtonElement>("compare-clear");
  const exportButton = mustGet<HTMLButtonElement>("export-button");
  const importInput = mustGet<HTMLInputElement>("import-input");
  const tabForm = mustGet<HTMLButtonElement>("tab-form");
  const tabRaw = mustGet<HTMLButtonElement>("tab-raw");
  const hashLine = mustGet<HTMLElement>("hash-line");

  let registry: RegistryFeature[] = [];

  function setTab(raw: boolean): void {
    rawArea.style.display = raw ? "block" : "none";
    formHost.style.display = raw ? "none" : "block";
    tabRaw.classList.toggle("active", raw);
    tabForm.classList.toggle("active", !raw);
  }

  function rebuildForm(state: SessionState): void {
    formHost.replaceChildren();
    if (state.configTree === null || registry.length === 0) {
      return;
    }
    formHost.append(
      buildForm(state.configTree as ConfigDoc, registry, {
        onTreeChange: (tree) => {
          store.setConfigTree(tree);
          void store.validate();
        },
      }),
    );
  }

  function repaint(state: SessionState): void {
    // editor side
    if (document.activeElement !== rawArea) {
      rawArea.value = state.configText;
    }
    rebuildForm(state);
    // Config problems anchor inside the form; session-level problems
    // (network, uploads) stay in the global list next to the controls.
    const configDiagnostics = state.diagnostics.filter(
      (d) => d.source === "parse" || d.source === "validate" || d.source === "render",
    );
    const sessionDiagnostics = state.diagnostics.filter(
      (d) => d.source === "compare" || d.source === "network",
    );
    const formRoot = formHost.firstElementChild as HTMLElement | null;
    const unanchored = formRoot
      ? attachDiagnostics(formRoot, configDiagnostics)
      : configDiagnostics;
    globalDiagnostics.replaceChildren(
      ...[...unanchored, ...sessionDiagnostics].map((d) => {
        const line = document.createElement("div");
        line.className = "diagnostic";
        line.textContent = `${d.path}: ${d.message}`;
        return line;
      }),
    );

    renderButton.disabled = !store.renderEnabled || state.busy.render;
    renderButton.textContent = state.busy.render ? "rendering…" : "render";
    indexInput.value = String(state.sampleIndex);
    overlayToggle.checked = state.overlayVisible;
    componentSelect.value = state.component;
    componentSelect.disabled =
      state.render !== null && !state.render.image.complex;

    hashLine.textContent = state.configHash
      ? `config ${state.configHash.slice(0, 12)}…`
      : "config not validated";

    // render side
    renderHost.replaceChildren();
    recordsHost.replaceChildren();
    if (state.render) {
      renderHost.append(
        buildRenderPanel(state.render, state.overlayVisible, state.renderStale),
      );
      recordsHost.append(buildRecordsTable(state.render.records));
    }

    // compare side
    compareHost.replaceChildren();
    compareHost.style.display = state.comparison ? "block" : "none";
    compareClear.style.display = state.comparison ? "inline-block" : "none";
    if (state.comparison) {
      compareHost.append(
        buildComparePanel(
          state.comparison,
          state.experimentalFilename ?? "upload",
        ),
      );
    }
  }

  store.subscribe(repaint);

  rawArea.addEventListener("change", () => {
    store.setConfigText(rawArea.value);
    void store.validate();
  });

  renderButton.addEventListener("click", () => {
    void store.render();
  });

  overlayToggle.addEventListener("change", () => {
    store.setOverlayVisible(overlayToggle.checked);
  });

  componentSelect.addEventListener("change", () => {
    store.setComponent(componentSelect.value as SessionState["component"]);
    void store.render();
  });

  indexInput.addEventListener("change", () => {
    store.setSampleIndex(Number(indexInput.value));
    void store.render();
  });

  exportButton.addEventListener("click", () => {
    const blob = new Blob([store.exportText()], {
      type: "application/json",
    });
    const url = URL.createObjectURL(blob);
    const link = document.createElement("a");
    link.href = url;
    link.download = "pipeline-config.json";
    link.click();
    URL.revokeObjectURL(url);
  });

  importInput.addEventListener("change", () => {
    const file = importInput.files?.[0];
    if (!file) {
      return;
    }
    void file.text().then((text) => {
      store.setConfigText(text);
      void store.validate();
      importInput.value = "";
    });
  });

  compareInput.addEventListener("change", () => {
    const file = compareInput.files?.[0];
    if (!file) {
      return;
    }
    void store.compare(file, file.name);
    compareInput.value = "";
  });

  compareClear.addEventListener("click", () => {
    store.clearComparison();
  });

  tabForm.addEventListener("click", () => {
    setTab(false);
    repaint(store.getState());
  });
  tabRaw.addEventListener("click", () => {
    setTab(true);
  });

  setTab(false);
  repaint(store.getState());

  void api
    .health()
    .then(() => {
      statusLine.textContent = "service: connected";
      statusLine.classList.add("ok");
      return api.registry();
    })
    .then((features) => {
      registry = features;
      repaint(store.getState());
      return store.validate();
    })
    .catch((error: unknown) => {
      statusLine.textContent = `service unreachable: ${
        error instanceof Error ? error.message : String(error)
      } — is "scopegen serve" running?`;
      statusLine.classList.add("error");
    });
}

// Auto-start only when the page provides the playground skeleton; tests
// build their own DOM and call startApp() explicitly.
if (typeof document !== "undefined" && document.getElementById("form-host")) {
  startApp();
}
