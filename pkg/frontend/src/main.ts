/**
 * DOM wiring for the what-if weighting console.
 *
 * Evaluators drag per-metric sliders (grouped under the four sources), see
 * the re-ranked table against the published baseline with rank-delta
 * arrows, drill into per-book panels and compare per-source rankings.  All
 * numbers come from the service; slider drags fire a debounced what-if
 * request with latest-wins cancellation.
 */

import { ApiClient, ApiError } from "./api.js";
import type { RankingEntry, RankKey, WhatIfResponse } from "./api.js";
import { debounce, LatestWins } from "./debounce.js";
import { arrowGlyph, filterByDiscipline, rankDeltas } from "./diff.js";
import type { RankedRow } from "./diff.js";
import { buildPanel } from "./panel.js";
import {
  applyEcho,
  applyPublished,
  displayedWeight,
  initPanel,
  isDirty,
  resetToPublished,
  setSlider,
  sliderVector,
  toggleLock,
  zeroGroup,
} from "./state.js";
import type { WeightPanelState } from "./state.js";

const DEBOUNCE_MS = 150;
const SLIDER_STEPS = 1000;

// Served same-origin by default; `?api=http://host:port` points elsewhere
// (the service sends permissive CORS headers).
const apiBase = new URLSearchParams(location.search).get("api") ?? "";
const api = new ApiClient(apiBase);
const inflight = new LatestWins();

let panel: WeightPanelState;
let baseline: RankingEntry[] = [];
let currentRanking: RankingEntry[] = [];
let currentKey: RankKey = "total";
let disciplineFilter: string | null = null;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function setBadge(text: string, kind: "ok" | "stale" | "error"): void {
  const badge = el<HTMLSpanElement>("badge");
  badge.textContent = text;
  badge.className = `badge ${kind}`;
}

function renderSliders(): void {
  const host = el<HTMLDivElement>("sliders");
  host.textContent = "";
  for (const group of panel.groups) {
    const box = document.createElement("fieldset");
    box.className = "group";
    const legend = document.createElement("legend");
    legend.textContent = group.label;
    const zero = document.createElement("button");
    zero.textContent = "zero group";
    zero.className = "mini";
    zero.addEventListener("click", () => {
      panel = zeroGroup(panel, group.id);
      renderSliders();
      schedulePreview();
    });
    legend.appendChild(zero);
    box.appendChild(legend);

    for (const metric of group.metrics) {
      const row = document.createElement("div");
      row.className = "slider-row";

      const label = document.createElement("label");
      label.textContent = panel.labels[metric] ?? metric;

      const input = document.createElement("input");
      input.type = "range";
      input.min = "1";
      input.max = String(SLIDER_STEPS);
      input.value = String(Math.round(panel.sliders[metric] * SLIDER_STEPS));
      input.disabled = panel.locks[metric];
      input.addEventListener("input", () => {
        panel = setSlider(panel, metric, Number(input.value) / SLIDER_STEPS);
        schedulePreview();
      });

      const lock = document.createElement("button");
      lock.className = "mini";
      lock.textContent = panel.locks[metric] ? "locked" : "lock";
      lock.addEventListener("click", () => {
        panel = toggleLock(panel, metric);
        renderSliders();
      });

      const weight = document.createElement("span");
      weight.className = "weight";
      weight.dataset.metric = metric;
      weight.textContent = displayedWeight(panel, metric).toFixed(4);

      row.append(label, input, weight, lock);
      box.appendChild(row);
    }
    host.appendChild(box);
  }
}

function refreshEchoLabels(): void {
  for (const span of document.querySelectorAll<HTMLSpanElement>("span.weight")) {
    const metric = span.dataset.metric;
    if (metric) span.textContent = displayedWeight(panel, metric).toFixed(4);
  }
}

function renderTable(rows: RankedRow[]): void {
  const body = el<HTMLTableSectionElement>("ranking-body");
  body.textContent = "";
  for (const row of filterByDiscipline(rows, disciplineFilter)) {
    const tr = document.createElement("tr");
    const deltaText =
      row.delta === null ? "" : row.delta === 0 ? "" : String(Math.abs(row.delta));
    tr.innerHTML = "";
    const cells = [
      String(row.rank),
      `${arrowGlyph(row.arrow)} ${deltaText}`.trim(),
      row.baselineRank === null ? "-" : String(row.baselineRank),
      row.title,
      row.discipline,
      row.score.toFixed(4),
    ];
    for (const text of cells) {
      const td = document.createElement("td");
      td.textContent = text;
      tr.appendChild(td);
    }
    tr.addEventListener("click", () => void openDrilldown(row.isbn));
    body.appendChild(tr);
  }
}

function renderCurrent(): void {
  renderTable(rankDeltas(baseline, currentRanking));
}

async function runPreview(): Promise<void> {
  try {
    const response = await inflight.run<WhatIfResponse>((signal) =>
      api.postWhatIf(sliderVector(panel), signal),
    );
    if (response === null) return; // a newer drag superseded this request
    panel = applyEcho(panel, response.weights);
    currentRanking = response.ranking;
    refreshEchoLabels();
    renderCurrent();
    setBadge(isDirty(panel) ? "what-if preview" : "published weights", "ok");
  } catch (error) {
    if (error instanceof ApiError) {
      setBadge(`rejected: ${error.detail}`, "error");
    } else {
      setBadge("connection lost - view may be stale", "stale");
    }
  }
}

const preview = debounce(() => void runPreview(), DEBOUNCE_MS);

function schedulePreview(): void {
  preview.call();
}

async function openDrilldown(isbn: string): Promise<void> {
  const host = el<HTMLDivElement>("drilldown");
  try {
    const report = await api.getReport(isbn);
    host.textContent = "";
    const heading = document.createElement("h3");
    heading.textContent =
      `${report.title} (${report.isbn}) - ${report.discipline}, ` +
      `rank ${report.overall_rank ?? "n/a"}`;
    host.appendChild(heading);
    for (const section of buildPanel(report)) {
      const div = document.createElement("div");
      div.className = "panel-section";
      const title = document.createElement("h4");
      title.textContent = section.title;
      div.appendChild(title);
      if (!section.hasData) {
        const none = document.createElement("p");
        none.className = "no-data";
        none.textContent = "no data";
        div.appendChild(none);
      } else {
        for (const note of section.notes) {
          const p = document.createElement("p");
          p.className = "note";
          p.textContent = note;
          div.appendChild(p);
        }
        for (const row of section.rows) {
          const line = document.createElement("div");
          line.className = "bar-row";
          const label = document.createElement("span");
          label.className = "bar-label";
          label.textContent = row.label;
          const bar = document.createElement("span");
          bar.className = "bar";
          bar.style.width = `${Math.round(row.share * 200)}px`;
          const value = document.createElement("span");
          value.textContent = row.value;
          line.append(label, bar, value);
          div.appendChild(line);
        }
      }
      host.appendChild(div);
    }
  } catch (error) {
    host.textContent = "";
    const card = document.createElement("p");
    card.className = "no-data";
    card.textContent =
      error instanceof ApiError && error.status === 404
        ? `book ${isbn} not found`
        : "report unavailable";
    host.appendChild(card);
  }
}

async function switchRankingKey(key: RankKey): Promise<void> {
  currentKey = key;
  const base = await api.getRankings(key);
  baseline = base.ranking;
  // The what-if preview re-ranks by total; per-source views show the
  // published ranking for that source directly.
  if (key === "total" && isDirty(panel)) {
    const preview = await api.postWhatIf(sliderVector(panel));
    currentRanking = preview.ranking;
  } else {
    currentRanking = base.ranking;
  }
  renderCurrent();
}

async function applyAsPublished(): Promise<void> {
  try {
    const published = await api.postWeights(sliderVector(panel));
    panel = applyPublished(panel, published);
    const fresh = await api.getRankings(currentKey);
    baseline = fresh.ranking;
    currentRanking = fresh.ranking;
    renderSliders();
    renderCurrent();
    setBadge(`published (${published.provenance})`, "ok");
  } catch (error) {
    if (error instanceof ApiError) setBadge(`rejected: ${error.detail}`, "error");
    else setBadge("connection lost - view may be stale", "stale");
  }
}

async function boot(): Promise<void> {
  const weights = await api.getWeights();
  panel = initPanel(weights);
  const ranking = await api.getRankings("total");
  baseline = ranking.ranking;
  currentRanking = ranking.ranking;

  const disciplines = [...new Set(baseline.map((r) => r.discipline))].sort();
  const select = el<HTMLSelectElement>("discipline-filter");
  for (const d of ["all disciplines", ...disciplines]) {
    const option = document.createElement("option");
    option.value = d === "all disciplines" ? "" : d;
    option.textContent = d;
    select.appendChild(option);
  }
  select.addEventListener("change", () => {
    disciplineFilter = select.value || null;
    renderCurrent();
  });

  const keySelect = el<HTMLSelectElement>("rank-key");
  keySelect.addEventListener("change", () =>
    void switchRankingKey(keySelect.value as RankKey),
  );

  el<HTMLButtonElement>("reset").addEventListener("click", () => {
    preview.cancel();
    inflight.invalidate();
    panel = resetToPublished(panel);
    currentRanking = baseline;
    renderSliders();
    renderCurrent();
    setBadge("published weights", "ok");
  });

  el<HTMLButtonElement>("publish").addEventListener("click", () => {
    void applyAsPublished();
  });

  renderSliders();
  renderCurrent();
  setBadge("published weights", "ok");
}

void boot().catch(() => setBadge("service unreachable", "error"));
