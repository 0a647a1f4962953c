// Mirrors of the service payloads. The client never derives domain facts
// itself; these types describe what the service sends, verbatim.

export interface VariantSummary {
  id: string;
  abstraction_index: number;
  characteristics: Record<string, string | number>;
  objects: number;
}

export interface VariantsPayload {
  variants: VariantSummary[];
  selected_variant_id: string | null;
}

export interface CutPayload {
  selected_level: number;
  members: string[];
}

export interface RelationConflict {
  a: string;
  b: string;
  prescriptive: string;
  performed: string;
}

export interface DeltaPayload {
  missing_objects: string[];
  extra_objects: string[];
  missing_edges: string[][];
  extra_edges: string[][];
  relation_conflicts: RelationConflict[];
  frequency: Record<string, number>;
  case_count: number;
  attribute_overrides: Record<string, unknown>;
  suggestions?: string[];
}

export interface ProcessObjectPayload {
  id: string;
  kind: "milestone" | "phase" | "task";
  name: string;
  priority: "minimal-requirement" | "recommended" | "optional";
  attributes: Record<string, unknown>;
  key?: string; // server-computed identity, present in session views
}

export interface ProcessModelPayload {
  id: string;
  abstraction_index: number;
  characteristics: Record<string, string | number>;
  meta_model: string[];
  objects: ProcessObjectPayload[];
  edges: string[][];
  containment: Record<string, string>;
  refinement_links: string[];
}

export interface LedgerEntryPayload {
  timestamp: string;
  actor: string;
  action: string;
  target: string;
  justification: string;
}

export interface TranscriptEntry {
  type: string;
  payload: Record<string, unknown>;
  at: string;
}

export interface SessionView {
  id: string;
  phase: string;
  transcript_length: number;
  transcript: TranscriptEntry[];
  ledger: LedgerEntryPayload[];
  scores?: { variant_id: string; score: number }[];
  cut?: CutPayload;
  selected_variant_id?: string;
  working_model?: ProcessModelPayload;
  consistency_violations?: { key: string; kind: string; source: string }[];
  performed_model?: ProcessModelPayload;
  delta?: DeltaPayload;
  suggestions?: string[];
}

export interface Approval {
  approver: string;
  justification: string;
}

export interface RefinementDecision {
  target: string | string[];
  action: "add" | "remove" | "keep";
  approval?: Approval;
}

export interface RefinementResult {
  model: ProcessModelPayload;
  ledger: LedgerEntryPayload[];
  delta: DeltaPayload;
}

export interface ServiceErrorBody {
  error: { code: string; message: string };
}

export class ServiceError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(status: number, code: string, message: string) {
    super(message);
    this.code = code;
    this.status = status;
  }
}
