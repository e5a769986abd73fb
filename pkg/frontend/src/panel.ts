/**
 * Drill-down panel view model: turns a report payload into renderable
 * sections, with explicit "no data" markers where a source is empty.
 */

import type { ReportPayload } from "./api.js";

export interface BarRow {
  label: string;
  value: string;
  /** Bar width share in [0, 1]. */
  share: number;
}

export interface PanelSection {
  id: string;
  title: string;
  hasData: boolean;
  rows: BarRow[];
  notes: string[];
}

function bars(
  entries: [string, number][],
  valueText: (v: number) => string,
  shareOf: (v: number) => number,
): BarRow[] {
  return entries.map(([label, v]) => ({
    label,
    value: valueText(v),
    share: Math.max(0, Math.min(1, shareOf(v))),
  }));
}

export function pct(v: number): string {
  return `${Math.round(v * 100)}%`;
}

export function buildPanel(report: ReportPayload): PanelSection[] {
  const sections: PanelSection[] = [];

  const ranks = Object.entries(report.metric_ranks);
  sections.push({
    id: "metric-ranks",
    title: "Metric ranks",
    hasData: true,
    rows: ranks.map(([metric, rank]) => ({
      label: metric,
      value: rank === null ? "no data" : `#${rank}`,
      share: 0,
    })),
    notes: [],
  });

  if (report.review_count > 0) {
    const rows: BarRow[] = [];
    if (report.polarity_shares) {
      rows.push(
        ...bars(
          Object.entries(report.polarity_shares),
          pct,
          (v) => v,
        ),
      );
    }
    if (report.star_histogram) {
      const counts = Object.values(report.star_histogram);
      const max = Math.max(1, ...counts);
      for (const star of ["1", "2", "3", "4", "5"]) {
        const count = report.star_histogram[star] ?? 0;
        rows.push({ label: `${star} star`, value: String(count), share: count / max });
      }
    }
    if (report.aspect_scores) {
      for (const [aspect, score] of Object.entries(report.aspect_scores)) {
        rows.push({
          label: aspect,
          value: score.toFixed(2),
          share: (score + 1) / 2, // satisfaction lives in [-1, 1]
        });
      }
    }
    const notes: string[] = [`${report.review_count} reviews`];
    if (report.most_satisfied_aspect) {
      notes.push(
        `most satisfied: ${report.most_satisfied_aspect}, ` +
          `least satisfied: ${report.least_satisfied_aspect}`,
      );
      notes.push(
        `most mentioned: ${report.most_mentioned_aspect}, ` +
          `least mentioned: ${report.least_mentioned_aspect}`,
      );
    }
    sections.push({ id: "reviews", title: "Reviews", hasData: true, rows, notes });
  } else {
    sections.push({ id: "reviews", title: "Reviews", hasData: false, rows: [], notes: [] });
  }

  if (report.citation_count > 0) {
    const rows: BarRow[] = [];
    if (report.intensity_histogram) {
      const counts = Object.values(report.intensity_histogram);
      const max = Math.max(1, ...counts);
      rows.push(
        ...bars(
          Object.entries(report.intensity_histogram).map(
            ([k, v]) => [`${k}x cited`, v] as [string, number],
          ),
          String,
          (v) => v / max,
        ),
      );
    }
    if (report.function_shares) {
      rows.push(...bars(Object.entries(report.function_shares), pct, (v) => v));
    }
    sections.push({
      id: "citations",
      title: "Citations",
      hasData: true,
      rows,
      notes: [`${report.citation_count} citing literatures`],
    });
  } else {
    sections.push({
      id: "citations", title: "Citations", hasData: false, rows: [], notes: [],
    });
  }

  const hasUsage = report.holdings_by_region !== null || report.sale_rank !== null;
  if (hasUsage) {
    const rows: BarRow[] = [];
    if (report.holdings_by_region) {
      const counts = Object.values(report.holdings_by_region);
      const max = Math.max(1, ...counts);
      rows.push(
        ...bars(Object.entries(report.holdings_by_region), String, (v) => v / max),
      );
    }
    const notes =
      report.sale_rank !== null ? [`sale rank ${report.sale_rank}`] : ["no sale data"];
    sections.push({ id: "usage", title: "Usage", hasData: true, rows, notes });
  } else {
    sections.push({ id: "usage", title: "Usage", hasData: false, rows: [], notes: [] });
  }

  return sections;
}
