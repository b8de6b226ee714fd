/** Excerpt rendering: split text into plain/highlight segments using the
 * exact character offsets the service provides. No re-tokenization, no
 * trimming — the highlighted range is [span_start, span_end) verbatim. */

import { Task } from "./types.js";

export interface Segment {
  text: string;
  highlighted: boolean;
}

export function segmentExcerpt(
  excerpt: string,
  spanStart: number | null,
  spanEnd: number | null,
): Segment[] {
  if (spanStart === null || spanEnd === null) {
    return [{ text: excerpt, highlighted: false }];
  }
  if (spanStart < 0 || spanEnd > excerpt.length || spanStart > spanEnd) {
    throw new Error(`span [${spanStart},${spanEnd}) outside excerpt of length ${excerpt.length}`);
  }
  const segments: Segment[] = [];
  if (spanStart > 0) segments.push({ text: excerpt.slice(0, spanStart), highlighted: false });
  segments.push({ text: excerpt.slice(spanStart, spanEnd), highlighted: true });
  if (spanEnd < excerpt.length) segments.push({ text: excerpt.slice(spanEnd), highlighted: false });
  return segments;
}

/** Character range covered by the highlighted segment, for checks and for
 * mapping DOM selections back to offsets. */
export function highlightedRange(segments: Segment[]): [number, number] | null {
  let offset = 0;
  for (const seg of segments) {
    if (seg.highlighted) return [offset, offset + seg.text.length];
    offset += seg.text.length;
  }
  return null;
}

function escapeHtml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function taskHtml(task: Task): string {
  const parts = segmentExcerpt(task.excerpt, task.span_start, task.span_end).map((seg) =>
    seg.highlighted
      ? `<mark class="span">${escapeHtml(seg.text)}</mark>`
      : escapeHtml(seg.text),
  );
  return `<pre class="excerpt">${parts.join("")}</pre>`;
}
