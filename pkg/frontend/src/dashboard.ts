/** Progress/agreement views. Every number here is either a direct service
 * value (kappa, percent-correct) or a count of service-provided records;
 * the UI computes nothing statistical itself. */

import { AgreementResponse, TasksResponse } from "./types.js";

export interface CodeProgress {
  code: string;
  marked: number;
  remaining: number;
}

export interface ProgressView {
  perCode: CodeProgress[];
  totalTasks: number;
  totalMarked: number;
  completion: number; // fraction in [0, 1]; 0 for an empty session
}

export function progressView(tasks: TasksResponse): ProgressView {
  const perCode = new Map<string, { marked: number; total: number }>();
  for (const task of tasks.tasks) {
    const entry = perCode.get(task.code) ?? { marked: 0, total: 0 };
    entry.total += 1;
    if (task.task_id in tasks.marks) entry.marked += 1;
    perCode.set(task.code, entry);
  }
  const totalTasks = tasks.tasks.length;
  const totalMarked = Object.keys(tasks.marks).filter((id) =>
    tasks.tasks.some((t) => t.task_id === id),
  ).length;
  return {
    perCode: [...perCode.entries()]
      .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
      .map(([code, e]) => ({ code, marked: e.marked, remaining: e.total - e.marked })),
    totalTasks,
    totalMarked,
    completion: totalTasks === 0 ? 0 : totalMarked / totalTasks,
  };
}

export interface AgreementView {
  kappa: string;
  percentCorrectA: string;
  percentCorrectB: string;
}

function fmt(v: number | null, digits: number): string {
  return v === null ? "n/a" : v.toFixed(digits);
}

/** Pure pass-through formatting of GET /agreement. */
export function agreementView(resp: AgreementResponse): AgreementView {
  return {
    kappa: fmt(resp.kappa, 3),
    percentCorrectA: fmt(resp.percent_correct_a, 3),
    percentCorrectB: fmt(resp.percent_correct_b, 3),
  };
}
