/** Boot: fetch the session, then wire the three panes together. */

import { ApiClient, errorMessage, type Meta, type TopicList } from "./api.js";
import { Banner } from "./banner.js";
import { gridWidth, type Layout } from "./geometry.js";
import { renderClassLegend, renderTopicLegend } from "./legend.js";
import { Minimap } from "./minimap.js";
import { PassagePane } from "./passage.js";
import { initialState, onClick, type ViewState } from "./state.js";

// Aim the minimap at roughly this many device pixels across.
const TARGET_CANVAS_WIDTH = 520;

function pickScale(layout: Layout): number {
  const width = Math.max(1, gridWidth(layout));
  return Math.max(1, Math.floor(TARGET_CANVAS_WIDTH / width));
}

function grab<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (el === null) {
    throw new Error(`missing #${id}`);
  }
  return el as T;
}

function metaLine(meta: Meta): string {
  const head = `${meta.documents} docs, ${meta.tokens} grid tokens`;
  return meta.modelType === "lda"
    ? `${head}, ${meta.k} topics`
    : `${head}, ${meta.classA} vs ${meta.classB}`;
}

async function boot(): Promise<void> {
  const banner = new Banner(grab("banner"));
  const api = new ApiClient();

  let meta: Meta;
  let layout: Layout;
  let png: Blob;
  try {
    [meta, layout] = await Promise.all([api.meta(), api.layout()]);
    png = await api.pixels();
  } catch (err) {
    banner.show(`could not reach the session service: ${errorMessage(err)}`);
    return;
  }

  const minimap = new Minimap(grab<HTMLCanvasElement>("minimap"), layout, pickScale(layout));
  try {
    await minimap.draw(png);
  } catch (err) {
    banner.show(`could not draw the token grid: ${errorMessage(err)}`);
    return;
  }

  const pane = new PassagePane(
    grab("passage"),
    grab("passage-header"),
    grab("tooltip"),
    api,
    (message) => banner.show(message),
  );

  let state: ViewState = initialState();
  minimap.onClick((x, y) => {
    const out = onClick(state, layout, x, y);
    state = out.state;
    if (out.request !== null) {
      banner.hide();
      minimap.setSelection(out.request.token);
      void pane.load(out.request.token, out.request.window);
    }
  });

  const legend = grab("legend");
  if (meta.modelType === "lda") {
    let topics: TopicList;
    try {
      topics = await api.topics();
    } catch (err) {
      banner.show(`could not load the topic legend: ${errorMessage(err)}`);
      return;
    }
    const palette = meta.palette;
    renderTopicLegend(legend, topics, {
      onDimTopic: (topic) => minimap.setDimTopic(topic, palette),
    });
  } else {
    renderClassLegend(legend, meta);
  }

  grab("meta-line").textContent = metaLine(meta);
}

void boot();
