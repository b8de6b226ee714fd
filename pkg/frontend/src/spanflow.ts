/** Add-missed-span flow: validate a user text selection plus a chosen
 * concept into an annotation submission with exact character offsets. */

import { AnnotationSubmission, Task } from "./types.js";

export interface Selection {
  start: number;
  end: number; // exclusive, excerpt-relative
}

export interface ConceptChoice {
  concept_id: string;
  preferred_name: string;
}

export type SpanFlowResult =
  | { ok: true; submission: AnnotationSubmission; duplicateWarning: boolean }
  | { ok: false; message: string };

export function buildSpanSubmission(
  task: Task,
  selection: Selection | null,
  concept: ConceptChoice | null,
  annotatorId: string,
): SpanFlowResult {
  if (!selection || selection.start === selection.end) {
    return { ok: false, message: "select some text in the excerpt first" };
  }
  if (selection.start < 0 || selection.end > task.excerpt.length || selection.start > selection.end) {
    return { ok: false, message: "selection crosses the excerpt boundary" };
  }
  if (!concept) {
    return { ok: false, message: "choose a concept from the search list" };
  }
  const duplicateWarning =
    task.span_start !== null &&
    selection.start === task.span_start &&
    selection.end === task.span_end;
  return {
    ok: true,
    duplicateWarning,
    submission: {
      admission_id: task.admission_id,
      span_start: selection.start,
      span_end: selection.end,
      span_text: task.excerpt.slice(selection.start, selection.end),
      concept_id: concept.concept_id,
      correct: true,
      annotator_id: annotatorId,
    },
  };
}

/** Search-as-you-type over a (concept_id, preferred_name) list supplied at
 * session start; simple case-insensitive substring match. */
export function searchConcepts(
  concepts: ConceptChoice[],
  query: string,
  limit = 10,
): ConceptChoice[] {
  const q = query.trim().toLowerCase();
  if (!q) return [];
  return concepts
    .filter(
      (c) =>
        c.preferred_name.toLowerCase().includes(q) || c.concept_id.toLowerCase().includes(q),
    )
    .slice(0, limit);
}
