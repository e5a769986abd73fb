/**
 * Typed client for the scoring service. Every number shown in the UI comes
 * from one of these responses; the client never computes scores itself.
 */

export interface WeightsPayload {
  format_version: number;
  provenance: string;
  global_weights: Record<string, number>;
  primary_weights: Record<string, number>;
  within_group_weights: Record<string, Record<string, number>>;
  groups: Record<string, string[]>;
  metric_labels: Record<string, string>;
}

export interface RankingEntry {
  rank: number;
  isbn: string;
  title: string;
  discipline: string;
  score: number;
  total: number;
}

export interface BookEntry {
  isbn: string;
  title: string;
  discipline: string;
  total: number;
  rank: number;
  subscores: Record<string, number>;
  normalized: Record<string, number | null>;
}

export interface BooksPage {
  total: number;
  page: number;
  page_size: number;
  policy: string;
  weights_provenance: string;
  books: BookEntry[];
}

export interface WhatIfResponse {
  weights: Record<string, number>;
  ranking: RankingEntry[];
  books: BookEntry[];
}

export interface ReportPayload {
  isbn: string;
  title: string;
  discipline: string;
  overall_rank: number | null;
  total: number | null;
  metric_ranks: Record<string, number | null>;
  review_count: number;
  polarity_shares: Record<string, number> | null;
  star_histogram: Record<string, number> | null;
  aspect_scores: Record<string, number> | null;
  aspect_mentions: Record<string, number> | null;
  most_satisfied_aspect: string | null;
  least_satisfied_aspect: string | null;
  most_mentioned_aspect: string | null;
  least_mentioned_aspect: string | null;
  citation_count: number;
  intensity_histogram: Record<string, number> | null;
  function_shares: Record<string, number> | null;
  holdings_by_region: Record<string, number> | null;
  sale_rank: number | null;
}

export interface DisciplineSummary {
  edges: number[];
  labels: string[];
  rows: {
    discipline: string;
    counts: number[];
    proportions: number[];
    total: number;
  }[];
  clamped: string[];
}

export type RankKey = "total" | "content" | "review" | "citation" | "usage";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = await response.json();
        if (body && typeof body.detail === "string") detail = body.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  getWeights(): Promise<WeightsPayload> {
    return this.request("/weights");
  }

  getBooks(page = 1, pageSize = 100): Promise<BooksPage> {
    return this.request(`/books?page=${page}&page_size=${pageSize}`);
  }

  getRankings(key: RankKey): Promise<{ key: RankKey; ranking: RankingEntry[] }> {
    return this.request(`/rankings?key=${key}`);
  }

  getReport(isbn: string): Promise<ReportPayload> {
    return this.request(`/books/${encodeURIComponent(isbn)}/report`);
  }

  getDisciplineSummary(): Promise<DisciplineSummary> {
    return this.request("/disciplines/summary");
  }

  postWhatIf(
    weights: Record<string, number>,
    signal?: AbortSignal,
  ): Promise<WhatIfResponse> {
    return this.request("/whatif", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ weights }),
      signal,
    });
  }

  postWeights(weights: Record<string, number>): Promise<WeightsPayload> {
    return this.request("/weights", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ weights }),
    });
  }
}
