/** Shared fixtures and a scriptable fetch mock for the test suites. */

import { vi } from "vitest";
import {
  ComparePayload,
  ImagePayload,
  RecordEntry,
  RegistryFeature,
  RenderPayload,
} from "../src/api";

export const REGISTRY: RegistryFeature[] = [
  {
    name: "duplicate",
    kind: "duplicate",
    category: "structure",
    description: "repeat a child node",
    properties: [
      {
        name: "count",
        type: "int",
        required: true,
        default: null,
        choices: [],
        description: "number of copies (samplable)",
      },
    ],
  },
  {
    name: "blob",
    kind: "append",
    category: "scatterer",
    description: "gaussian intensity blob",
    properties: [
      {
        name: "position_y",
        type: "float",
        required: true,
        default: null,
        choices: [],
        description: "row position in px",
      },
      {
        name: "position_x",
        type: "float",
        required: true,
        default: null,
        choices: [],
        description: "column position in px",
      },
      {
        name: "sigma",
        type: "float",
        required: false,
        default: 2.0,
        choices: [],
        description: "width in px",
      },
    ],
  },
  {
    name: "fluorescence",
    kind: "merge",
    category: "microscope",
    description: "incoherent imaging",
    properties: [],
  },
  {
    name: "poisson_noise",
    kind: "transform",
    category: "noise",
    description: "shot noise at a target SNR",
    properties: [
      {
        name: "snr",
        type: "float",
        required: false,
        default: null,
        choices: [],
        description: "target peak SNR",
      },
    ],
  },
  {
    name: "mirror",
    kind: "transform",
    category: "augment",
    description: "flip the image",
    properties: [
      {
        name: "axis",
        type: "str",
        required: false,
        default: "x",
        choices: ["x", "y", "both"],
        description: "flip axis",
      },
    ],
  },
  {
    name: "label_density",
    kind: "append",
    category: "label",
    description: "gaussian density map",
    properties: [
      {
        name: "sigma",
        type: "float",
        required: false,
        default: 10.0,
        choices: [],
        description: "kernel width in px",
      },
    ],
  },
];

export const VALID_DOC = {
  version: 1,
  seed: 7,
  optics: { output_shape: [32, 32], padding: 8 },
  pipeline: [
    {
      type: "blob",
      properties: { position_y: 16, position_x: 16, sigma: 2.5 },
    },
    { type: "fluorescence" },
  ],
  label: [{ type: "label_density", properties: { sigma: 3 } }],
};

export function imagePayload(tag: string): ImagePayload {
  return {
    png_base64: btoa(`png-bytes-${tag}`),
    width: 32,
    height: 32,
    lo: 0.0,
    hi: 1.5,
    component: "real",
    complex: false,
    shape: [32, 32],
  };
}

export function renderPayload(
  hash: string,
  index: number,
  tag = "",
): RenderPayload {
  const records: RecordEntry[] = [
    {
      id: "pipeline[0]",
      feature: "blob",
      name: "",
      values: { position_y: 16, position_x: 16, sigma: 2.5 },
    },
  ];
  return {
    config_hash: hash,
    index,
    image: imagePayload(`img-${hash}-${index}${tag}`),
    records,
    label: imagePayload(`label-${hash}-${index}${tag}`),
  };
}

export function comparePayload(hash: string): ComparePayload {
  const side = (tag: string) => ({
    histogram: [0.5, 0.3, 0.2, 0.0],
    background: 0.12,
    noise: 0.01,
    peak: 0.97,
    snr: 85.0,
    image: imagePayload(tag),
  });
  return {
    config_hash: hash,
    index: 0,
    overlap: 0.93,
    bins: [0, 0.25, 0.5, 0.75, 1],
    experimental: side("exp"),
    synthetic: side("syn"),
  };
}

export interface Route {
  matches(url: string, init?: RequestInit): boolean;
  respond(url: string, init?: RequestInit): Response | Promise<Response>;
}

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

/**
 * Install a scripted fetch: each call is matched against the routes in
 * order. Unmatched calls fail the test loudly.
 */
export function mockFetch(routes: Route[]): ReturnType<typeof vi.fn> {
  const mock = vi.fn(
    async (input: RequestInfo | URL, init?: RequestInit): Promise<Response> => {
      const url = String(input);
      for (const route of routes) {
        if (route.matches(url, init)) {
          return route.respond(url, init);
        }
      }
      throw new Error(`unexpected fetch: ${url}`);
    },
  );
  vi.stubGlobal("fetch", mock);
  return mock;
}

/** A hash that tracks a doc's seed, mimicking the server's content hash. */
export function fakeHash(config: unknown): string {
  return `hash-${JSON.stringify(config).length}-${
    (config as { seed?: number }).seed ?? 0
  }`;
}

export function standardRoutes(): Route[] {
  return [
    {
      matches: (url) => url.endsWith("/v1/health"),
      respond: () => jsonResponse({ status: "ok" }),
    },
    {
      matches: (url) => url.endsWith("/v1/registry"),
      respond: () => jsonResponse({ features: REGISTRY }),
    },
    {
      matches: (url) => url.endsWith("/v1/validate"),
      respond: (_url, init) => {
        const { config } = JSON.parse(String(init?.body)) as {
          config: Record<string, unknown>;
        };
        const pipeline = (config.pipeline ?? []) as { type?: string }[];
        const known = new Set(REGISTRY.map((f) => f.name));
        for (let i = 0; i < pipeline.length; i++) {
          const name = pipeline[i].type ?? "";
          if (!known.has(name)) {
            return jsonResponse({
              valid: false,
              error: `unknown feature '${name}'`,
              path: `$.pipeline[${i}]`,
            });
          }
        }
        return jsonResponse({ valid: true, config_hash: fakeHash(config) });
      },
    },
    {
      matches: (url) => url.endsWith("/v1/render"),
      respond: (_url, init) => {
        const body = JSON.parse(String(init?.body)) as {
          config: unknown;
          index: number;
        };
        return jsonResponse(renderPayload(fakeHash(body.config), body.index));
      },
    },
    {
      matches: (url) => url.endsWith("/v1/compare"),
      respond: (_url, init) => {
        const form = init?.body as FormData;
        const config = JSON.parse(String(form.get("config"))) as unknown;
        return jsonResponse(comparePayload(fakeHash(config)));
      },
    },
  ];
}
