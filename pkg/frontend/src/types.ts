/** Wire types for /api/v1. Mirrors the service JSON exactly; the UI never
 * derives spans, codes, or statistics itself. */

export type Mark = "correct" | "incorrect" | "skipped";

export interface Task {
  task_id: string;
  dataset: string;
  admission_id: string;
  code: string;
  code_display: string;
  concept_id: string;
  excerpt: string;
  span_start: number | null;
  span_end: number | null;
  span_text: string;
}

export interface SessionResponse {
  session_id: string;
  dataset: string;
  tasks: Task[];
}

export interface TasksResponse {
  session_id: string;
  finalized: boolean;
  tasks: Task[];
  marks: Record<string, Mark>;
}

export interface MarkAck {
  ok: boolean;
  task_id: string;
  mark: Mark;
}

export interface AgreementResponse {
  kappa: number | null;
  percent_correct_a: number | null;
  percent_correct_b: number | null;
}

export interface FailingCodesResponse {
  threshold: number;
  failing: string[];
  unvalidated: string[];
}

export interface AnnotationSubmission {
  admission_id: string;
  span_start: number;
  span_end: number;
  span_text: string;
  concept_id: string;
  correct: boolean;
  annotator_id: string;
}

function fail(what: string, value: unknown): never {
  throw new Error(`bad ${what} in API response: ${JSON.stringify(value)}`);
}

export function asTask(v: any): Task {
  if (typeof v !== "object" || v === null) fail("task", v);
  if (typeof v.task_id !== "string" || typeof v.excerpt !== "string") fail("task", v);
  const start = v.span_start;
  const end = v.span_end;
  if (start !== null && typeof start !== "number") fail("span_start", v);
  if (end !== null && typeof end !== "number") fail("span_end", v);
  return v as Task;
}

export function asTasksResponse(v: any): TasksResponse {
  if (typeof v !== "object" || v === null || !Array.isArray(v.tasks)) fail("tasks response", v);
  v.tasks.forEach(asTask);
  if (typeof v.marks !== "object" || v.marks === null) fail("marks", v);
  return v as TasksResponse;
}

export function asSessionResponse(v: any): SessionResponse {
  if (typeof v !== "object" || v === null || typeof v.session_id !== "string") {
    fail("session response", v);
  }
  if (!Array.isArray(v.tasks)) fail("session tasks", v);
  v.tasks.forEach(asTask);
  return v as SessionResponse;
}
