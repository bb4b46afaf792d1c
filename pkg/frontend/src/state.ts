/**
 * Studio state machine: one session, region layers, a history strip that
 * always mirrors the server's session document, and at most one request in
 * flight. Continue always appends; history entries are never edited.
 */

import { ApiClient, HistoryEntry, PromptDocument, RegionPayload, SessionDoc } from "./api.js";
import { MaskSet, encodeRle } from "./masks.js";

export interface StudioOptions {
  canvasSize: number;
  useLlm: boolean;
  transparent: boolean;
}

export class Studio {
  api: ApiClient;
  options: StudioOptions;
  masks: MaskSet;
  sessionId: string | null = null;
  session: SessionDoc | null = null;
  document: PromptDocument | null = null;
  selectedIndex: number | null = null;
  pending = false;

  constructor(api: ApiClient, options?: Partial<StudioOptions>) {
    this.api = api;
    this.options = {
      canvasSize: 64,
      useLlm: false,
      transparent: false,
      ...options,
    };
    this.masks = new MaskSet(this.options.canvasSize, this.options.canvasSize);
  }

  get history(): HistoryEntry[] {
    return this.session ? this.session.history : [];
  }

  private async run<T>(op: () => Promise<T>): Promise<T> {
    if (this.pending) throw new Error("a request is already in flight");
    this.pending = true;
    try {
      return await op();
    } finally {
      this.pending = false;
    }
  }

  private async sync(): Promise<void> {
    if (!this.sessionId) return;
    this.session = await this.api.getSession(this.sessionId);
  }

  regionPayloads(): RegionPayload[] {
    return this.masks
      .nonEmptyLayers()
      .map((l) => ({ rle: encodeRle(l.mask, this.masks.width, this.masks.height) }));
  }

  regionPrompts(): string[][] {
    return this.masks.nonEmptyLayers().map((l) => l.prompt.trim().split(/\s+/).filter(Boolean));
  }

  /** Parse the request text and open a session for its character. */
  async openSession(query: string, font?: string): Promise<SessionDoc> {
    return this.run(async () => {
      const doc = await this.api.parse(query, this.options.useLlm);
      this.document = doc;
      const created = await this.api.createSession(doc, font);
      this.sessionId = created.session_id;
      await this.sync();
      this.selectedIndex = null;
      return this.session!;
    });
  }

  /** Start: generate with the session bundle (masks for regional bundles). */
  async start(seed?: number): Promise<HistoryEntry> {
    if (!this.sessionId) throw new Error("no session");
    return this.run(async () => {
      const isRegional = this.document?.task === "multi_regional";
      const res = await this.api.generate(this.sessionId!, {
        seed,
        regions: isRegional ? this.regionPayloads() : undefined,
        transparent: this.options.transparent,
      });
      await this.sync();
      this.selectedIndex = res.history_index;
      return this.history[res.history_index];
    });
  }

  /** Refresh: a new set of results under a fresh server-drawn seed. */
  async refresh(): Promise<HistoryEntry> {
    return this.start(undefined);
  }

  /** Continue: noise-blending edit of the selected history entry. */
  async continueEdit(seed?: number): Promise<HistoryEntry> {
    if (!this.sessionId) throw new Error("no session");
    const regions = this.regionPayloads();
    const prompts = this.regionPrompts();
    if (regions.length === 0) throw new Error("brush at least one region");
    if (prompts.some((p) => p.length === 0)) {
      throw new Error("every brushed region needs a prompt");
    }
    return this.run(async () => {
      const res = await this.api.edit(this.sessionId!, {
        history_index: this.selectedIndex ?? undefined,
        regions,
        region_prompts: prompts,
        seed,
        transparent: this.options.transparent,
      });
      await this.sync();
      this.selectedIndex = res.history_index;
      return this.history[res.history_index];
    });
  }

  select(index: number) {
    if (!this.session || index < 0 || index >= this.history.length) {
      throw new Error(`no history entry ${index}`);
    }
    this.selectedIndex = index;
  }

  selectedImageUrl(): string | null {
    if (this.sessionId === null || this.selectedIndex === null) return null;
    return this.api.imageUrl(this.sessionId, this.selectedIndex);
  }
}
