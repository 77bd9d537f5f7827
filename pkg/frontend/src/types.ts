/** Wire shapes of the annotation/classification service API. */

export interface CategorySchema {
  binary_categories: string[];
  ternary_categories: Record<string, string[]>;
}

export interface Progress {
  submitted: number;
  open: number;
  total: number;
}

export interface AnnotationTask {
  annotator_id: string;
  sentence_id: string;
  text: string;
  predecessor: string | null;
  successor: string | null;
  is_overlap: boolean;
  status: "open" | "submitted";
  schema: CategorySchema;
  progress: Progress;
}

export type LabelValue = number | string;

export interface AnnotationPayload {
  sentence_id: string;
  annotator_id: string;
  labels: Record<string, LabelValue>;
  cue_phrases: string[];
}

export interface SubmitAck {
  status: string;
  version: number;
  progress: Progress;
}

export interface CueSpan {
  phrase: string;
  start: number;
  end: number;
}

export interface ClassifyResult {
  label: "causal" | "not_causal";
  p_causal: number;
  cues: CueSpan[];
}

export interface LexiconEntry {
  phrase: string;
  grammatical_type: string;
  relation_group: string | null;
  surface_forms: string[];
}
