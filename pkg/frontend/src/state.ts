/**
 * Weight panel state: slider values grouped under the four source groups,
 * per-slider lock flags and the last server echo.
 *
 * The client never trusts its own normalization: slider values are only the
 * vector POSTed to the service, while every *displayed* weight comes from
 * the server-renormalized echo (or the published weights before the first
 * what-if round trip).
 */

import type { WeightsPayload } from "./api.js";

/** Weights must stay positive server-side; "zeroed" sliders park here. */
export const MIN_WEIGHT = 1e-6;

export interface PanelGroup {
  id: string;
  label: string;
  metrics: string[];
}

export interface WeightPanelState {
  order: string[];
  groups: PanelGroup[];
  labels: Record<string, string>;
  published: Record<string, number>;
  provenance: string;
  sliders: Record<string, number>;
  locks: Record<string, boolean>;
  echo: Record<string, number> | null;
}

function groupLabel(id: string): string {
  return id.charAt(0).toUpperCase() + id.slice(1);
}

export function initPanel(payload: WeightsPayload): WeightPanelState {
  const groups: PanelGroup[] = Object.entries(payload.groups).map(
    ([id, metrics]) => ({ id, label: groupLabel(id), metrics: [...metrics] }),
  );
  const order = groups.flatMap((g) => g.metrics);
  const sliders: Record<string, number> = {};
  const locks: Record<string, boolean> = {};
  for (const metric of order) {
    sliders[metric] = payload.global_weights[metric];
    locks[metric] = false;
  }
  return {
    order,
    groups,
    labels: payload.metric_labels,
    published: { ...payload.global_weights },
    provenance: payload.provenance,
    sliders,
    locks,
    echo: null,
  };
}

export function setSlider(
  state: WeightPanelState,
  metric: string,
  value: number,
): WeightPanelState {
  if (!(metric in state.sliders) || state.locks[metric]) return state;
  const clamped = Math.max(MIN_WEIGHT, Math.min(1, value));
  return { ...state, sliders: { ...state.sliders, [metric]: clamped } };
}

export function toggleLock(state: WeightPanelState, metric: string): WeightPanelState {
  if (!(metric in state.locks)) return state;
  return { ...state, locks: { ...state.locks, [metric]: !state.locks[metric] } };
}

/** Park every unlocked slider of the group at the positive minimum. */
export function zeroGroup(state: WeightPanelState, groupId: string): WeightPanelState {
  const group = state.groups.find((g) => g.id === groupId);
  if (!group) return state;
  const sliders = { ...state.sliders };
  for (const metric of group.metrics) {
    if (!state.locks[metric]) sliders[metric] = MIN_WEIGHT;
  }
  return { ...state, sliders };
}

/** Back to the published weights; locks survive, the echo resets. */
export function resetToPublished(state: WeightPanelState): WeightPanelState {
  return { ...state, sliders: { ...state.published }, echo: null };
}

/** Store the server-renormalized echo after a what-if round trip. */
export function applyEcho(
  state: WeightPanelState,
  echo: Record<string, number>,
): WeightPanelState {
  return { ...state, echo: { ...echo } };
}

/** Adopt a newly published hierarchy (after POST /weights). */
export function applyPublished(
  state: WeightPanelState,
  payload: WeightsPayload,
): WeightPanelState {
  return {
    ...state,
    published: { ...payload.global_weights },
    provenance: payload.provenance,
    sliders: { ...payload.global_weights },
    echo: null,
  };
}

/** The weight shown next to a slider: always a server-computed number. */
export function displayedWeight(state: WeightPanelState, metric: string): number {
  if (state.echo && metric in state.echo) return state.echo[metric];
  return state.published[metric];
}

/** The raw vector sent to POST /whatif (server renormalizes). */
export function sliderVector(state: WeightPanelState): Record<string, number> {
  const vector: Record<string, number> = {};
  for (const metric of state.order) vector[metric] = state.sliders[metric];
  return vector;
}

/** True when the sliders differ from the published weights. */
export function isDirty(state: WeightPanelState): boolean {
  return state.order.some(
    (metric) => Math.abs(state.sliders[metric] - state.published[metric]) > 1e-12,
  );
}
