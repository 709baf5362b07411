/** View state transitions, kept pure so click handling is testable. */

import { hitTest, type Layout } from "./geometry.js";

export interface ViewState {
  readonly selected: number | null;
  readonly hover: number | null;
  readonly window: number;
  readonly legendVisible: boolean;
}

// Window 0 renders the whole containing document, matching the service
// default; model "documents" are often already paragraph-sized.
export const WHOLE_DOCUMENT = 0;

export function initialState(): ViewState {
  return { selected: null, hover: null, window: WHOLE_DOCUMENT, legendVisible: true };
}

function checkToken(t: number, tokenCount: number): void {
  if (!Number.isInteger(t) || t < 0 || t >= tokenCount) {
    throw new RangeError(`token ${t} out of range for ${tokenCount} grid tokens`);
  }
}

export function withSelection(state: ViewState, t: number, tokenCount: number): ViewState {
  checkToken(t, tokenCount);
  return { ...state, selected: t };
}

export function withHover(state: ViewState, t: number, tokenCount: number): ViewState {
  checkToken(t, tokenCount);
  return { ...state, hover: t };
}

export function clearHover(state: ViewState): ViewState {
  return state.hover === null ? state : { ...state, hover: null };
}

export function withWindow(state: ViewState, window: number): ViewState {
  if (!Number.isInteger(window) || window < 0) {
    throw new RangeError(`window must be a non-negative integer, got ${window}`);
  }
  return { ...state, window };
}

export function toggleLegend(state: ViewState): ViewState {
  return { ...state, legendVisible: !state.legendVisible };
}

export interface PassageRequest {
  readonly token: number;
  readonly window: number;
}

export interface ClickOutcome {
  readonly state: ViewState;
  /** null on a miss: padding cells and out-of-canvas clicks change nothing. */
  readonly request: PassageRequest | null;
}

/** Resolve a click against the grid; a hit selects the token and asks for its passage. */
export function onClick(state: ViewState, layout: Layout, x: number, y: number): ClickOutcome {
  const t = hitTest(layout, x, y);
  if (t === null) {
    return { state, request: null };
  }
  return {
    state: withSelection(state, t, layout.tokenCount),
    request: { token: t, window: state.window },
  };
}
