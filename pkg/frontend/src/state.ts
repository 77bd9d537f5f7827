/** Annotation screen state and validation.
 *
 * The validation here mirrors the server's record rules exactly, so a
 * record built from widget interactions can never be rejected for schema
 * reasons: the Causality label gates all dependent categories, ternary
 * categories hold exactly one of their three values, and submit stays
 * disabled until the record would pass.
 */

import type {
  AnnotationPayload,
  AnnotationTask,
  CategorySchema,
  LabelValue,
} from "./types.js";

export const CAUSALITY = "Causality";

export interface AnnotationViewState {
  task: AnnotationTask | null;
  labels: Record<string, LabelValue>;
  selectedCues: string[];
  freeCues: string[];
}

export function freshState(task: AnnotationTask | null): AnnotationViewState {
  return { task, labels: {}, selectedCues: [], freeCues: [] };
}

export function dependentCategories(schema: CategorySchema): string[] {
  return [
    ...schema.binary_categories.filter((c) => c !== CAUSALITY),
    ...Object.keys(schema.ternary_categories),
  ];
}

/** Dependent widgets unlock only once the sentence is marked causal. */
export function dependentsEnabled(state: AnnotationViewState): boolean {
  return state.labels[CAUSALITY] === 1;
}

export function setBinary(
  state: AnnotationViewState,
  category: string,
  value: 0 | 1,
): AnnotationViewState {
  const labels = { ...state.labels, [category]: value };
  if (category === CAUSALITY && value !== 1 && state.task) {
    // leaving the causal state strips every dependent label
    for (const dependent of dependentCategories(state.task.schema)) {
      delete labels[dependent];
    }
  }
  return { ...state, labels };
}

export function setTernary(
  state: AnnotationViewState,
  category: string,
  value: string,
): AnnotationViewState {
  return { ...state, labels: { ...state.labels, [category]: value } };
}

export function toggleCue(
  state: AnnotationViewState,
  phrase: string,
): AnnotationViewState {
  const selected = state.selectedCues.includes(phrase)
    ? state.selectedCues.filter((p) => p !== phrase)
    : [...state.selectedCues, phrase];
  return { ...state, selectedCues: selected };
}

export function addFreeCue(
  state: AnnotationViewState,
  phrase: string,
): AnnotationViewState {
  const trimmed = phrase.trim().toLowerCase();
  if (!trimmed || state.freeCues.includes(trimmed)) return state;
  return { ...state, freeCues: [...state.freeCues, trimmed] };
}

export function allCues(state: AnnotationViewState): string[] {
  return [...state.selectedCues, ...state.freeCues];
}

/** Rule violations the server would reject; empty iff submittable. */
export function validationIssues(state: AnnotationViewState): string[] {
  if (!state.task) return ["no task loaded"];
  const schema = state.task.schema;
  const issues: string[] = [];
  const causality = state.labels[CAUSALITY];
  if (causality !== 0 && causality !== 1) {
    issues.push("Causality label is required");
  }
  for (const [category, value] of Object.entries(state.labels)) {
    if (schema.binary_categories.includes(category)) {
      if (value !== 0 && value !== 1) {
        issues.push(`${category} must be 0 or 1`);
      }
    } else if (category in schema.ternary_categories) {
      if (!schema.ternary_categories[category].includes(String(value))) {
        issues.push(`${category} must be one of ` +
          schema.ternary_categories[category].join("/"));
      }
    } else {
      issues.push(`unknown category ${category}`);
    }
    if (category !== CAUSALITY && causality !== 1) {
      issues.push(`${category} requires Causality=1`);
    }
  }
  return issues;
}

export function canSubmit(state: AnnotationViewState): boolean {
  return state.task !== null && validationIssues(state).length === 0;
}

/** The exact request body; only callable once validation passes. */
export function buildRecord(state: AnnotationViewState): AnnotationPayload {
  if (!state.task || !canSubmit(state)) {
    throw new Error("record is not submittable: " +
      validationIssues(state).join("; "));
  }
  return {
    sentence_id: state.task.sentence_id,
    annotator_id: state.task.annotator_id,
    labels: { ...state.labels },
    cue_phrases: allCues(state),
  };
}
