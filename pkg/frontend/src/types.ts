/** Wire types for the rulebench HTTP API. */

export interface CandidatePayload {
  sample_index: number;
  raw_output: string;
  formula: string | null;
  canonical: string | null;
  proposition_map: [string, string][];
  vocab_violations: string[];
  parse_error: string | null;
}

export interface TranslateResponse {
  review_id: string;
  rule_id: string;
  rule_text: string;
  winner_index: number | null;
  winner: string | null;
  vote_tally: Record<string, number>;
  candidates: CandidatePayload[];
}

export interface ReviewSummary {
  review_id: string;
  rule_id: string;
  submitted_text: string;
  status: ReviewStatus;
  final_mtl: string | null;
  winner: string | null;
  created: string;
  updated: string;
}

export type ReviewStatus = "pending" | "accepted" | "edited" | "rejected";

export interface ReviewEntryPayload {
  review_id: string;
  rule_id: string;
  submitted_text: string;
  status: ReviewStatus;
  final_mtl: string | null;
  reviewer_note: string | null;
  created: string;
  updated: string;
  result: {
    rule_text: string;
    rule_id: string;
    winner_index: number | null;
    vote_tally: Record<string, number>;
    candidates: CandidatePayload[];
  };
}

export interface ParseResponse {
  formula: string;
  canonical: string;
}

export interface MonitorResponse {
  holds: boolean;
  at_position: number;
  formula: string;
  violation_position: number | null;
}

export interface PredicateInfo {
  predicate: string;
  arity: number;
  description: string;
}

export interface ErrorBody {
  code: string;
  message: string;
  offset?: number;
}

export interface ReviewDecision {
  status: ReviewStatus;
  final_mtl?: string;
  note?: string;
}

export interface TraceDocument {
  states: string[][];
}
