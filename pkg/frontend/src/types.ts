// Wire types mirroring the verification service API. The UI renders these
// verbatim and never rewrites verdict content.

export type SupportLabel =
  | "SUPPORTED"
  | "PARTIALLY_SUPPORTED"
  | "UNSUPPORTED"
  | "UNCERTAIN";

export const ALL_LABELS: SupportLabel[] = [
  "SUPPORTED",
  "PARTIALLY_SUPPORTED",
  "UNSUPPORTED",
  "UNCERTAIN",
];

export interface Reasoning {
  summary: string;
  points: string[];
}

export interface EvidenceSnippet {
  text: string;
  relevance: number;
  chunk_ref: [string, number];
  char_span: [number, number] | null;
}

export interface Provenance {
  processed_at: string;
  doc_id: string;
  chunk_refs: [string, number][];
  system_version: string;
  chat_model: string;
  embedding_model: string;
  reranker_id: string;
  abstract_only: boolean;
  rule_based: boolean;
  parse_failed: boolean;
  prompt_versions: Record<string, string>;
  warnings: string[];
}

export interface VerificationResult {
  label: SupportLabel;
  confidence: number;
  reasoning: Reasoning;
  evidence: EvidenceSnippet[];
  guidance: string;
  provenance: Provenance;
}

export interface VerificationRecord {
  verification_id: string;
  doc_id: string;
  citation: string;
  claim: string;
  result: VerificationResult;
}

export interface DocumentSummary {
  doc_id: string;
  source: string;
  format: string;
  chars: number;
  abstract_only: boolean;
}

export interface BiblioMetadata {
  title?: string | null;
  authors?: string[] | null;
  year?: number | null;
  venue?: string | null;
  abstract?: string | null;
}

// Partial pipeline-config overrides sent with a verification request.
export type ProviderOverrides = Record<string, unknown>;

export interface VerifyRequestBody {
  citation: string;
  doc_id?: string;
  source?: string;
  metadata?: BiblioMetadata;
  overrides?: ProviderOverrides;
}
