// Wire types mirroring the generation API's JSON response.

export interface ReferenceBlock {
  ref_number: number;
  date: string;
  title: string;
  score: number;
  summary: string;
}

export interface Citation {
  position: number;
  ref_number: number;
}

export interface ScoredArticleRow {
  news_id: number;
  title: string;
  published_date: string;
  best_distance: number;
  matched_chunk_ids: string[];
  raw_scores: number[];
  mean_score: number;
  band: string;
  kept: boolean;
  drop_reason: string | null;
}

export interface GenerateResponse {
  query: string;
  body: string;
  references: ReferenceBlock[];
  citations: Citation[];
  warnings: string[];
  scored_articles: ScoredArticleRow[];
  k: number;
  threshold: number;
  timings?: Record<string, number>;
}

export interface HealthResponse {
  status: string;
  corpus_records: number;
  index_chunks: number;
}
