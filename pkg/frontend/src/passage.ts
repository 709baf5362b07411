/** Reading pane: the in-text passage around the clicked token. */

import { ApiClient, errorMessage, type Passage, type TokenInfo } from "./api.js";

const FOCUS_MARK = 'class="tok focus"';
const TOKEN_CACHE_LIMIT = 256;

export function countFocus(html: string): number {
  let n = 0;
  let at = html.indexOf(FOCUS_MARK);
  while (at !== -1) {
    n += 1;
    at = html.indexOf(FOCUS_MARK, at + FOCUS_MARK.length);
  }
  return n;
}

/** A passage response is renderable when its fragment carries exactly one focus token. */
export function isRenderable(resp: Passage): boolean {
  return (
    typeof resp.html === "string" &&
    Array.isArray(resp.tokens) &&
    countFocus(resp.html) === 1
  );
}

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

/** Tooltip body for a token: topic bars for vector psi, a signed value for scalars. */
export function tooltipHtml(info: TokenInfo): string {
  const title = `<div class="tip-word">${escapeHtml(info.text)}</div>`;
  if (typeof info.psi === "number") {
    const sign = info.psi >= 0 ? "+" : "";
    return `${title}<div class="tip-value">psi = ${sign}${info.psi.toFixed(4)}</div>`;
  }
  const rows = info.psi.map((p, k) => {
    const pct = (100 * p).toFixed(1);
    return (
      `<div class="tip-row"><span class="tip-label">topic ${k}</span>` +
      `<span class="tip-bar"><span class="tip-fill" style="width:${pct}%"></span></span>` +
      `<span class="tip-pct">${pct}%</span></div>`
    );
  });
  return title + rows.join("");
}

function isAbort(err: unknown): boolean {
  return err instanceof Error && err.name === "AbortError";
}

export class PassagePane {
  private generation = 0;
  private inflight: AbortController | null = null;
  private readonly tokenCache = new Map<number, TokenInfo>();
  private posToGlobal = new Map<number, number>();

  constructor(
    private readonly root: HTMLElement,
    private readonly header: HTMLElement,
    private readonly tooltip: HTMLElement,
    private readonly api: ApiClient,
    private readonly onError: (message: string) => void,
  ) {
    root.addEventListener("mouseover", (evt) => this.hoverStart(evt));
    root.addEventListener("mouseout", () => this.hoverEnd());
  }

  /**
   * Fetch and show the passage for a grid token. Later calls win: the
   * previous request is aborted, and a stale response that still lands is
   * dropped instead of overwriting a newer passage.
   */
  async load(token: number, window: number): Promise<void> {
    const gen = ++this.generation;
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    let resp: Passage;
    try {
      resp = await this.api.passage(token, window, controller.signal);
    } catch (err) {
      if (gen === this.generation && !isAbort(err)) {
        this.onError(`passage request failed: ${errorMessage(err)}`);
      }
      return;
    }
    if (gen !== this.generation) {
      return;
    }
    this.show(resp);
  }

  show(resp: Passage): void {
    if (!isRenderable(resp)) {
      this.onError("malformed passage fragment from the service");
      return;
    }
    this.posToGlobal = new Map(resp.tokens.map((m) => [m.t, m.global]));
    this.header.textContent = `${resp.doc} | tokens ${resp.start} to ${resp.end} | focus #${resp.focus}`;
    this.root.innerHTML = resp.html;
    this.root.querySelector(".tok.focus")?.scrollIntoView({ block: "center" });
  }

  private hoverStart(evt: Event): void {
    const target = evt.target instanceof Element ? evt.target.closest("span.tok") : null;
    if (!(target instanceof HTMLElement) || target.dataset.t === undefined) {
      return;
    }
    const global = this.posToGlobal.get(Number(target.dataset.t));
    if (global === undefined) {
      return; // token outside the model's vocabulary, nothing to show
    }
    void this.showTooltip(global, target);
  }

  private async showTooltip(global: number, anchor: HTMLElement): Promise<void> {
    let info = this.tokenCache.get(global);
    if (info === undefined) {
      try {
        info = await this.api.token(global);
      } catch {
        return; // hover detail is best-effort, never a banner
      }
      this.remember(global, info);
    }
    const rect = anchor.getBoundingClientRect();
    this.tooltip.innerHTML = tooltipHtml(info);
    this.tooltip.style.left = `${rect.left + window.scrollX}px`;
    this.tooltip.style.top = `${rect.bottom + window.scrollY + 4}px`;
    this.tooltip.hidden = false;
  }

  private hoverEnd(): void {
    this.tooltip.hidden = true;
  }

  private remember(global: number, info: TokenInfo): void {
    if (this.tokenCache.size >= TOKEN_CACHE_LIMIT) {
      const oldest = this.tokenCache.keys().next().value;
      if (oldest !== undefined) {
        this.tokenCache.delete(oldest);
      }
    }
    this.tokenCache.set(global, info);
  }
}
