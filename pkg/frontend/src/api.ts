/**
 * Typed client for the preview service. Every number and image shown in
 * the playground originates from one of these responses — the client
 * never computes statistics or physics on its own.
 */

export interface PropertyField {
  name: string;
  type: string;
  required: boolean;
  default: unknown;
  choices: unknown[];
  description: string;
}

export interface RegistryFeature {
  name: string;
  kind: string;
  category: string;
  description: string;
  properties: PropertyField[];
}

export type ValidateResult =
  | { valid: true; config_hash: string }
  | { valid: false; error: string; path: string };

export interface ImagePayload {
  png_base64: string;
  width: number;
  height: number;
  lo: number;
  hi: number;
  component: string;
  complex: boolean;
  shape: number[];
}

export interface RecordEntry {
  id: string;
  feature: string;
  name: string;
  values: Record<string, unknown>;
}

export interface RenderPayload {
  config_hash: string;
  index: number;
  image: ImagePayload;
  records: RecordEntry[];
  label: ImagePayload | null;
}

export interface SideStats {
  histogram: number[];
  background: number;
  noise: number;
  peak: number;
  snr: number | null;
  image: ImagePayload;
}

export interface ComparePayload {
  config_hash: string;
  index: number;
  overlap: number;
  bins: number[];
  experimental: SideStats;
  synthetic: SideStats;
}

export type Component = "abs" | "real" | "imag" | "phase";

export interface RenderRequest {
  config: unknown;
  index: number;
  component: Component;
  include_label: boolean;
}

/** Structured service error: HTTP status plus the detail body. */
export class ApiError extends Error {
  status: number;
  path: string | null;
  limitBytes: number | null;

  constructor(
    status: number,
    message: string,
    path: string | null = null,
    limitBytes: number | null = null,
  ) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.path = path;
    this.limitBytes = limitBytes;
  }
}

interface ErrorDetail {
  error?: string;
  path?: string | null;
  limit_bytes?: number;
}

async function errorFromResponse(response: Response): Promise<ApiError> {
  let detail: ErrorDetail = {};
  try {
    const body = (await response.json()) as { detail?: ErrorDetail | string };
    if (typeof body.detail === "string") {
      detail = { error: body.detail };
    } else if (body.detail) {
      detail = body.detail;
    }
  } catch {
    // non-JSON error body; fall through to the status line
  }
  return new ApiError(
    response.status,
    detail.error ?? `service error (HTTP ${response.status})`,
    detail.path ?? null,
    detail.limit_bytes ?? null,
  );
}

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    throw await errorFromResponse(response);
  }
  return (await response.json()) as T;
}

export interface CompareUpload {
  file: Blob;
  filename: string;
  config: string;
  index: number;
  bins?: number;
}

export interface ApiClient {
  health(): Promise<{ status: string }>;
  registry(): Promise<RegistryFeature[]>;
  validate(config: unknown): Promise<ValidateResult>;
  render(request: RenderRequest, signal?: AbortSignal): Promise<RenderPayload>;
  compare(upload: CompareUpload): Promise<ComparePayload>;
}

export function createClient(base = ""): ApiClient {
  return {
    async health() {
      return asJson(await fetch(`${base}/v1/health`));
    },

    async registry() {
      const body = await asJson<{ features: RegistryFeature[] }>(
        await fetch(`${base}/v1/registry`),
      );
      return body.features;
    },

    async validate(config) {
      return asJson(
        await fetch(`${base}/v1/validate`, {
          method: "POST",
          headers: { "Content-Type": "application/json" },
          body: JSON.stringify({ config }),
        }),
      );
    },

    async render(request, signal) {
      return asJson(
        await fetch(`${base}/v1/render`, {
          method: "POST",
          headers: { "Content-Type": "application/json" },
          body: JSON.stringify(request),
          signal,
        }),
      );
    },

    async compare(upload) {
      const form = new FormData();
      form.append("file", upload.file, upload.filename);
      form.append("config", upload.config);
      form.append("index", String(upload.index));
      if (upload.bins !== undefined) {
        form.append("bins", String(upload.bins));
      }
      return asJson(
        await fetch(`${base}/v1/compare`, { method: "POST", body: form }),
      );
    },
  };
}
