/** Typed client for the engine's session endpoints. */

export interface PromptRegion {
  id: number;
  prompt: string[];
}

export interface PromptDocument {
  schema_version: number;
  task: "global" | "multi_regional" | "continuous_editing";
  character: string;
  base_prompt?: string[];
  regions?: PromptRegion[];
}

export interface HistoryEntry {
  index: number;
  op: "generate" | "edit";
  params: Record<string, unknown>;
  image: string;
  trajectory: string;
  transparent: boolean;
  timestamp: number;
}

export interface SessionDoc {
  id: string;
  created: number;
  updated: number;
  font: string;
  bundle: PromptDocument;
  artifacts: { glyph_png: string; depth_png: string; depth_npy: string };
  history: HistoryEntry[];
}

export interface GenerateResult {
  image_url: string;
  history_index: number;
  seed: number;
  results?: Array<{ image_url: string; history_index: number; seed: number }>;
}

export interface RegionPayload {
  rle: string;
}

export class ApiError extends Error {
  status: number;
  body: Record<string, unknown>;

  constructor(status: number, body: Record<string, unknown>) {
    super(`${body.error ?? "HTTP"} ${status}: ${body.detail ?? ""}`);
    this.status = status;
    this.body = body;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  base: string;
  private fetchFn: FetchLike;

  constructor(base: string, fetchFn?: FetchLike) {
    this.base = base.replace(/\/$/, "");
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await this.fetchFn(`${this.base}${path}`, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const data = (await resp.json()) as Record<string, unknown>;
    if (!resp.ok) throw new ApiError(resp.status, data);
    return data as T;
  }

  parse(query: string, useLlm: boolean): Promise<PromptDocument> {
    return this.request("POST", "/parse", { query, use_llm: useLlm });
  }

  createSession(document: PromptDocument, font?: string): Promise<{
    session_id: string;
    glyph_png: string;
    depth_png: string;
  }> {
    return this.request("POST", "/sessions", {
      document: JSON.stringify(document),
      font,
    });
  }

  getSession(sid: string): Promise<SessionDoc> {
    return this.request("GET", `/sessions/${sid}`);
  }

  generate(
    sid: string,
    opts: {
      seed?: number;
      regions?: RegionPayload[];
      steps?: number;
      count?: number;
      transparent?: boolean;
    },
  ): Promise<GenerateResult> {
    return this.request("POST", `/sessions/${sid}/generate`, opts);
  }

  edit(
    sid: string,
    opts: {
      history_index?: number;
      regions: RegionPayload[];
      region_prompts: string[][];
      seed?: number;
      transparent?: boolean;
    },
  ): Promise<GenerateResult> {
    return this.request("POST", `/sessions/${sid}/edit`, opts);
  }

  fonts(): Promise<{ fonts: string[] }> {
    return this.request("GET", "/fonts");
  }

  imageUrl(sid: string, index: number): string {
    return `${this.base}/sessions/${sid}/images/${index}`;
  }

  artifactUrl(key: string): string {
    return key.startsWith("/") ? `${this.base}${key}` : `${this.base}/artifacts/${key}`;
  }
}
