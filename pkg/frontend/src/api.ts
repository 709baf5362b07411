/**
 * Typed GET-only client for the visualization service.
 *
 * The explorer is a read-only surface: every call here is a plain GET, and
 * nothing in this module (or anywhere else in the UI) mutates server state.
 */

import type { Layout } from "./geometry.js";

export interface LdaMeta {
  readonly modelType: "lda";
  readonly documents: number;
  readonly tokens: number;
  readonly k: number;
  readonly palette: readonly string[];
  readonly blend: boolean;
}

export interface LinearMeta {
  readonly modelType: "linear";
  readonly documents: number;
  readonly tokens: number;
  readonly classA: string;
  readonly classB: string;
  readonly negative: string;
  readonly positive: string;
  readonly scaleMagnitude: number;
  readonly priorLogit: number;
}

export type Meta = LdaMeta | LinearMeta;

export interface TokenInfo {
  readonly doc: string;
  readonly pos: number;
  readonly text: string;
  readonly psi: number | readonly number[];
  readonly color: string;
}

export interface PassageToken {
  readonly t: number;
  readonly global: number;
}

export interface Passage {
  readonly doc: string;
  readonly focus: number;
  readonly focusPos: number;
  readonly window: number;
  readonly start: number;
  readonly end: number;
  readonly html: string;
  readonly tokens: readonly PassageToken[];
}

export interface TopicEntry {
  readonly topic: number;
  readonly color: string;
  readonly words: readonly [string, number][];
}

export interface TopicList {
  readonly topics: readonly TopicEntry[];
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export function errorMessage(err: unknown): string {
  return err instanceof Error ? err.message : String(err);
}

export class ApiClient {
  constructor(private readonly base = "") {}

  meta(): Promise<Meta> {
    return this.json("/api/meta");
  }

  layout(): Promise<Layout> {
    return this.json("/api/layout");
  }

  topics(): Promise<TopicList> {
    return this.json("/api/topics");
  }

  token(t: number): Promise<TokenInfo> {
    return this.json(`/api/token/${t}`);
  }

  passage(token: number, window: number, signal?: AbortSignal): Promise<Passage> {
    return this.json(`/api/passage?token=${token}&window=${window}`, signal);
  }

  /** The token-grid PNG, fetched as a blob for createImageBitmap. */
  async pixels(): Promise<Blob> {
    const resp = await fetch(this.base + "/api/pixels", { method: "GET" });
    if (!resp.ok) {
      throw new ApiError(resp.status, `pixel fetch failed (${resp.status})`);
    }
    return resp.blob();
  }

  private async json<T>(path: string, signal?: AbortSignal): Promise<T> {
    const resp = await fetch(this.base + path, { method: "GET", signal });
    if (!resp.ok) {
      throw new ApiError(resp.status, await errorDetail(resp));
    }
    return (await resp.json()) as T;
  }
}

async function errorDetail(resp: Response): Promise<string> {
  try {
    const body = (await resp.json()) as { error?: string };
    if (typeof body.error === "string") {
      return body.error;
    }
  } catch {
    // non-JSON error body, fall through to the status line
  }
  return `${resp.status} ${resp.statusText}`;
}
