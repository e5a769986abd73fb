/** Baseline-vs-preview ranking diff for the what-if table. */

import type { RankingEntry } from "./api.js";

export type Arrow = "up" | "down" | "same" | "new";

export interface RankedRow {
  rank: number;
  isbn: string;
  title: string;
  discipline: string;
  score: number;
  total: number;
  baselineRank: number | null;
  delta: number | null;
  arrow: Arrow;
}

export function rankDeltas(
  baseline: RankingEntry[],
  preview: RankingEntry[],
): RankedRow[] {
  const baseRank = new Map(baseline.map((entry) => [entry.isbn, entry.rank]));
  return preview.map((entry) => {
    const before = baseRank.get(entry.isbn);
    if (before === undefined) {
      return { ...entry, baselineRank: null, delta: null, arrow: "new" };
    }
    const delta = before - entry.rank; // positive = climbed
    return {
      ...entry,
      baselineRank: before,
      delta,
      arrow: delta > 0 ? "up" : delta < 0 ? "down" : "same",
    };
  });
}

export function arrowGlyph(arrow: Arrow): string {
  switch (arrow) {
    case "up":
      return "▲";
    case "down":
      return "▼";
    case "new":
      return "•";
    default:
      return "=";
  }
}

export function filterByDiscipline(
  rows: RankedRow[],
  discipline: string | null,
): RankedRow[] {
  if (!discipline) return rows;
  return rows.filter((row) => row.discipline === discipline);
}
