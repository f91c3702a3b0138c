/**
 * Session store: the stale-render invariant, the render cache, the
 * single-in-flight rule, and non-destructive error handling.
 */

import { afterEach, describe, expect, it, vi } from "vitest";
import { ApiClient, ApiError, createClient } from "../src/api";
import { formatBytes, SessionStore } from "../src/state";
import {
  fakeHash,
  jsonResponse,
  mockFetch,
  renderPayload,
  standardRoutes,
  VALID_DOC,
} from "./helpers";

afterEach(() => {
  vi.unstubAllGlobals();
});

function docText(doc: unknown = VALID_DOC): string {
  return JSON.stringify(doc, null, 2) + "\n";
}

function makeStore(routes = standardRoutes()): {
  store: SessionStore;
  fetchMock: ReturnType<typeof mockFetch>;
  api: ApiClient;
} {
  const fetchMock = mockFetch(routes);
  const api = createClient("");
  return { store: new SessionStore(api, docText()), fetchMock, api };
}

function renderCalls(fetchMock: ReturnType<typeof mockFetch>): number {
  return fetchMock.mock.calls.filter((call) =>
    String(call[0]).endsWith("/v1/render"),
  ).length;
}

describe("config drafts and validation", () => {
  it("parses the initial text into a tree", () => {
    const { store } = makeStore();
    expect(store.getState().configTree).toEqual(VALID_DOC);
    expect(store.getState().diagnostics).toEqual([]);
  });

  it("reports a parse diagnostic for bad JSON without losing the text", () => {
    const { store } = makeStore();
    store.setConfigText("{ not json");
    const state = store.getState();
    expect(state.configText).toBe("{ not json");
    expect(state.configTree).toBeNull();
    expect(state.diagnostics).toHaveLength(1);
    expect(state.diagnostics[0].source).toBe("parse");
    expect(state.diagnostics[0].path).toBe("$");
  });

  it("valid config → zero diagnostics and render enabled", async () => {
    const { store } = makeStore();
    const result = await store.validate();
    expect(result).toEqual({
      valid: true,
      config_hash: fakeHash(VALID_DOC),
    });
    expect(store.getState().diagnostics).toEqual([]);
    expect(store.renderEnabled).toBe(true);
  });

  it("unknown feature → diagnostic anchored to the offending node", async () => {
    const { store } = makeStore();
    const doc = JSON.parse(JSON.stringify(VALID_DOC)) as typeof VALID_DOC;
    doc.pipeline[1] = { type: "warp_drive", properties: {} } as never;
    store.setConfigText(docText(doc));
    await store.validate();
    const diagnostics = store.getState().diagnostics;
    expect(diagnostics).toHaveLength(1);
    expect(diagnostics[0].path).toBe("$.pipeline[1]");
    expect(diagnostics[0].message).toContain("warp_drive");
    expect(store.renderEnabled).toBe(false);
  });

  it("fixing the error clears the diagnostic without losing edits", async () => {
    const { store } = makeStore();
    const doc = JSON.parse(JSON.stringify(VALID_DOC)) as typeof VALID_DOC;
    doc.pipeline[1] = { type: "warp_drive" } as never;
    doc.seed = 999; // an edit that must survive the error round-trip
    store.setConfigText(docText(doc));
    await store.validate();
    expect(store.getState().diagnostics).toHaveLength(1);

    doc.pipeline[1] = { type: "fluorescence" } as never;
    store.setConfigText(docText(doc));
    await store.validate();
    expect(store.getState().diagnostics).toEqual([]);
    expect(
      (store.getState().configTree as { seed: number }).seed,
    ).toBe(999);
  });

  it("a failed validate call surfaces a network diagnostic non-destructively", async () => {
    const { store } = makeStore([]); // no routes: every fetch throws
    const before = store.getState().configText;
    await store.validate();
    const state = store.getState();
    expect(state.configText).toBe(before);
    expect(state.diagnostics).toHaveLength(1);
    expect(state.diagnostics[0].source).toBe("network");
  });
});

describe("render, staleness, and the cache", () => {
  it("renders the current sample and stores the payload", async () => {
    const { store } = makeStore();
    await store.validate();
    const payload = await store.render();
    expect(payload).not.toBeNull();
    expect(store.getState().render).toBe(payload);
    expect(store.getState().renderStale).toBe(false);
  });

  it("same request twice → identical buffers without a second fetch", async () => {
    const { store, fetchMock } = makeStore();
    await store.validate();
    const first = await store.render();
    const second = await store.render();
    expect(renderCalls(fetchMock)).toBe(1);
    expect(second!.image.png_base64).toBe(first!.image.png_base64);
    expect(second!.label!.png_base64).toBe(first!.label!.png_base64);
  });

  it("editing the config flags the displayed render as stale", async () => {
    const { store } = makeStore();
    await store.validate();
    await store.render();
    expect(store.getState().renderStale).toBe(false);

    const doc = JSON.parse(JSON.stringify(VALID_DOC)) as typeof VALID_DOC;
    doc.seed = 8;
    store.setConfigText(docText(doc));
    expect(store.getState().renderStale).toBe(true); // unvalidated draft

    await store.validate(); // new hash ≠ render's hash
    expect(store.getState().renderStale).toBe(true);

    await store.render();
    expect(store.getState().renderStale).toBe(false);
  });

  it("changing the sample index marks the render stale until re-rendered", async () => {
    const { store } = makeStore();
    await store.validate();
    await store.render();
    store.setSampleIndex(1);
    expect(store.getState().renderStale).toBe(true);
    await store.render();
    expect(store.getState().renderStale).toBe(false);
    expect(store.getState().render!.index).toBe(1);
  });

  it("revisiting a seen sample index is served from the cache", async () => {
    const { store, fetchMock } = makeStore();
    await store.validate();
    await store.render();
    store.setSampleIndex(1);
    await store.render();
    expect(renderCalls(fetchMock)).toBe(2);

    store.setSampleIndex(0);
    await store.render();
    expect(renderCalls(fetchMock)).toBe(2); // cache hit, no new request
    expect(store.getState().render!.index).toBe(0);
    expect(store.getState().renderStale).toBe(false);
    expect(store.cacheSize()).toBe(2);
  });

  it("overlay toggling never touches the network", async () => {
    const { store, fetchMock } = makeStore();
    await store.validate();
    await store.render();
    const calls = fetchMock.mock.calls.length;
    store.setOverlayVisible(true);
    store.setOverlayVisible(false);
    store.setOverlayVisible(true);
    expect(fetchMock.mock.calls.length).toBe(calls);
    expect(store.getState().overlayVisible).toBe(true);
    expect(store.getState().render).not.toBeNull();
  });

  it("a newer render aborts the older in-flight one", async () => {
    const aborted: boolean[] = [];
    let release: (() => void) | null = null;
    const slowThenFast = [
      {
        matches: (url: string) => url.endsWith("/v1/validate"),
        respond: () =>
          jsonResponse({ valid: true, config_hash: fakeHash(VALID_DOC) }),
      },
      {
        matches: (url: string) => url.endsWith("/v1/render"),
        respond: async (_url: string, init?: RequestInit) => {
          const body = JSON.parse(String(init?.body)) as { index: number };
          if (body.index === 0) {
            // first request: hang until released, then report abort state
            await new Promise<void>((resolve) => {
              release = resolve;
            });
            aborted.push(init?.signal?.aborted ?? false);
            if (init?.signal?.aborted) {
              throw new DOMException("aborted", "AbortError");
            }
          }
          return jsonResponse(renderPayload(fakeHash(VALID_DOC), body.index));
        },
      },
    ];
    const { store } = makeStore(slowThenFast);
    await store.validate();

    const first = store.render(); // index 0, hangs
    store.setSampleIndex(1);
    const second = await store.render(); // aborts the first
    expect(second!.index).toBe(1);

    release!();
    const firstResult = await first;
    expect(firstResult).toBeNull();
    expect(aborted).toEqual([true]);
    // the late response must not clobber the newer render
    expect(store.getState().render!.index).toBe(1);
  });

  it("a render rejected by the service becomes a diagnostic", async () => {
    const routes = [
      {
        matches: (url: string) => url.endsWith("/v1/validate"),
        respond: () => jsonResponse({ valid: true, config_hash: "h" }),
      },
      {
        matches: (url: string) => url.endsWith("/v1/render"),
        respond: () =>
          jsonResponse(
            { detail: { error: "boom", path: "$.pipeline[0]" } },
            422,
          ),
      },
    ];
    const { store } = makeStore(routes);
    await store.validate();
    const payload = await store.render();
    expect(payload).toBeNull();
    const diagnostics = store.getState().diagnostics;
    expect(diagnostics).toHaveLength(1);
    expect(diagnostics[0].source).toBe("render");
    expect(diagnostics[0].path).toBe("$.pipeline[0]");
  });

  it("render without a validated config is a no-op", async () => {
    const { store, fetchMock } = makeStore();
    expect(await store.render()).toBeNull();
    expect(renderCalls(fetchMock)).toBe(0);
  });
});

describe("comparison uploads", () => {
  it("a successful compare stores the payload and filename", async () => {
    const { store } = makeStore();
    await store.validate();
    const payload = await store.compare(new Blob([new Uint8Array(8)]), "exp.png");
    expect(payload).not.toBeNull();
    expect(store.getState().comparison).toBe(payload);
    expect(store.getState().experimentalFilename).toBe("exp.png");
  });

  it("no upload → no comparison state", () => {
    const { store } = makeStore();
    expect(store.getState().comparison).toBeNull();
  });

  it("a 413 surfaces the server limit and preserves the session", async () => {
    const routes = standardRoutes();
    routes[4] = {
      matches: (url: string) => url.endsWith("/v1/compare"),
      respond: () =>
        jsonResponse(
          { detail: { error: "upload too large", limit_bytes: 16777216 } },
          413,
        ),
    };
    const { store } = makeStore(routes);
    await store.validate();
    await store.render();
    const renderBefore = store.getState().render;

    const payload = await store.compare(new Blob([new Uint8Array(4)]), "big.png");
    expect(payload).toBeNull();
    const state = store.getState();
    expect(state.render).toBe(renderBefore); // session untouched
    expect(state.comparison).toBeNull();
    const message = state.diagnostics.at(-1)!.message;
    expect(message).toContain("upload too large");
    expect(message).toContain("16.0 MiB");
  });

  it("a corrupt upload shows the decode error and preserves the session", async () => {
    const routes = standardRoutes();
    routes[4] = {
      matches: (url: string) => url.endsWith("/v1/compare"),
      respond: () =>
        jsonResponse(
          { detail: { error: "cannot decode upload: not an image" } },
          422,
        ),
    };
    const { store } = makeStore(routes);
    await store.validate();
    await store.render();
    const textBefore = store.getState().configText;

    await store.compare(new Blob([new TextEncoder().encode("junk")]), "junk.png");
    const state = store.getState();
    expect(state.configText).toBe(textBefore);
    expect(state.render).not.toBeNull();
    expect(state.comparison).toBeNull();
    expect(state.diagnostics.at(-1)!.message).toContain("cannot decode");
  });

  it("a later successful compare clears earlier compare diagnostics", async () => {
    let fail = true;
    const routes = standardRoutes();
    const good = routes[4];
    routes[4] = {
      matches: (url: string) => url.endsWith("/v1/compare"),
      respond: (url: string, init?: RequestInit) => {
        if (fail) {
          return jsonResponse({ detail: { error: "cannot decode upload" } }, 422);
        }
        return good.respond(url, init);
      },
    };
    const { store } = makeStore(routes);
    await store.validate();
    await store.compare(new Blob([new Uint8Array(1)]), "bad.png");
    expect(store.getState().diagnostics).toHaveLength(1);

    fail = false;
    await store.compare(new Blob([new Uint8Array(1)]), "good.png");
    expect(store.getState().diagnostics).toEqual([]);
    expect(store.getState().comparison).not.toBeNull();
  });

  it("clearComparison hides the panel state", async () => {
    const { store } = makeStore();
    await store.validate();
    await store.compare(new Blob([new Uint8Array(8)]), "exp.png");
    store.clearComparison();
    expect(store.getState().comparison).toBeNull();
    expect(store.getState().experimentalFilename).toBeNull();
  });
});

describe("export / import round trip", () => {
  it("exported text re-imports to an identical tree", async () => {
    const { store } = makeStore();
    // make an edit through the structured path first
    const doc = JSON.parse(JSON.stringify(VALID_DOC)) as typeof VALID_DOC;
    doc.seed = 4242;
    store.setConfigTree(doc);
    const exported = store.exportText();

    const { store: fresh } = makeStore();
    fresh.setConfigText(exported);
    expect(fresh.getState().configTree).toEqual(store.getState().configTree);
    expect(fresh.exportText()).toBe(exported);
  });

  it("export returns the draft byte-for-byte", () => {
    const { store } = makeStore();
    const text = '{\n  "version": 1,\n  "seed": 3\n}\n';
    store.setConfigText(text);
    expect(store.exportText()).toBe(text);
  });
});

describe("no client-side persistence", () => {
  it("neither localStorage nor sessionStorage is touched", async () => {
    const setItem = vi.spyOn(Storage.prototype, "setItem");
    const { store } = makeStore();
    await store.validate();
    await store.render();
    await store.compare(new Blob([new Uint8Array(4)]), "exp.png");
    expect(setItem).not.toHaveBeenCalled();
    setItem.mockRestore();
  });
});

describe("formatBytes", () => {
  it("formats the documented limit", () => {
    expect(formatBytes(16 * 1024 * 1024)).toBe("16.0 MiB");
    expect(formatBytes(2048)).toBe("2.0 KiB");
    expect(formatBytes(12)).toBe("12 B");
  });
});

describe("ApiError plumbing", () => {
  it("preserves status and path", () => {
    const error = new ApiError(422, "bad", "$.optics", null);
    expect(error.status).toBe(422);
    expect(error.path).toBe("$.optics");
  });
});
