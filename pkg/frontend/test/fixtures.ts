import type { AnnotationTask, CategorySchema, LexiconEntry } from "../src/types.js";

export const SCHEMA: CategorySchema = {
  binary_categories: [
    "Causality", "Explicit", "Marked", "SingleSentence", "SingleCause",
    "SingleEffect", "EventChain",
  ],
  ternary_categories: {
    Relationship: ["cause", "enable", "prevent"],
    Temporality: ["before", "overlap", "during"],
  },
};

export function makeTask(overrides: Partial<AnnotationTask> = {}): AnnotationTask {
  return {
    annotator_id: "alice",
    sentence_id: "doc-1#4",
    text: "If the process fails, an error message is shown.",
    predecessor: "The process parses the uploaded file.",
    successor: "The error message names the failing step.",
    is_overlap: false,
    status: "open",
    schema: SCHEMA,
    progress: { submitted: 3, open: 7, total: 10 },
    ...overrides,
  };
}

export const LEXICON: LexiconEntry[] = [
  {
    phrase: "if", grammatical_type: "conjunction", relation_group: null,
    surface_forms: ["if"],
  },
  {
    phrase: "when", grammatical_type: "adverb", relation_group: null,
    surface_forms: ["when"],
  },
  {
    phrase: "prevent(s/ed)", grammatical_type: "verb",
    relation_group: "prevent",
    surface_forms: ["prevent", "prevents", "prevented"],
  },
];
