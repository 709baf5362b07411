/** Legend pane: topic swatches with top words, or a diverging class bar. */

import type { LinearMeta, TopicList } from "./api.js";
import { escapeHtml } from "./passage.js";

export const TOP_WORDS_SHOWN = 10;

export function gradientCss(negative: string, positive: string): string {
  return `linear-gradient(to right, ${negative}, #FFFFFF, ${positive})`;
}

export interface LegendHooks {
  /** Called with a topic to spotlight (dims the rest) or null to restore. */
  onDimTopic(topic: number | null): void;
}

export function renderTopicLegend(root: HTMLElement, topics: TopicList, hooks: LegendHooks): void {
  root.replaceChildren();
  let active: number | null = null;
  const rows: HTMLButtonElement[] = [];
  for (const entry of topics.topics) {
    const row = document.createElement("button");
    row.type = "button";
    row.className = "legend-topic";
    const words = entry.words
      .slice(0, TOP_WORDS_SHOWN)
      .map(([word]) => escapeHtml(word))
      .join(" ");
    row.innerHTML =
      `<span class="swatch" style="background-color:${entry.color}"></span>` +
      `<span class="topic-name">topic ${entry.topic}</span>` +
      `<span class="topic-words">${words}</span>`;
    row.addEventListener("click", () => {
      active = active === entry.topic ? null : entry.topic;
      for (const other of rows) {
        other.classList.remove("active");
      }
      if (active !== null) {
        row.classList.add("active");
      }
      hooks.onDimTopic(active);
    });
    rows.push(row);
    root.append(row);
  }
}

// Positive attributions argue for class A, so its name sits at the positive end.
export function renderClassLegend(root: HTMLElement, meta: LinearMeta): void {
  root.replaceChildren();
  const wrap = document.createElement("div");
  wrap.className = "legend-classes";
  wrap.innerHTML =
    `<span class="class-name">${escapeHtml(meta.classB)}</span>` +
    `<span class="gradient" style="background:${gradientCss(meta.negative, meta.positive)}"></span>` +
    `<span class="class-name">${escapeHtml(meta.classA)}</span>`;
  root.append(wrap);
}
