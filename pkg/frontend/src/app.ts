/** Browser entry point: minimal single-page annotator over /api/v1.
 * All logic lives in the tested modules; this file only wires the DOM. */

import { ApiClient, fetchTransport } from "./client.js";
import { agreementView, progressView } from "./dashboard.js";
import { OfflineMarkQueue } from "./queue.js";
import { taskHtml } from "./render.js";
import { Mark, Task } from "./types.js";

const client = new ApiClient(fetchTransport());
const queue = new OfflineMarkQueue(client, window.localStorage);

let sessionId = "";
let tasks: Task[] = [];
let cursor = 0;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function showTask(): void {
  const task = tasks[cursor];
  if (!task) {
    el("task").innerHTML = "<p>No tasks left in this session.</p>";
    return;
  }
  el("task").innerHTML =
    `<h3>${task.code_display} — ${task.concept_id}</h3>` +
    taskHtml(task) +
    `<p class="state">${queue.stateOf(task.task_id) ?? "unmarked"}` +
    (queue.pendingCount() ? ` (${queue.pendingCount()} queued offline)` : "") +
    `</p>`;
}

async function refreshDashboard(): Promise<void> {
  const resp = await client.getTasks(sessionId);
  const view = progressView(resp);
  el("progress").textContent =
    `${view.totalMarked}/${view.totalTasks} marked (${(view.completion * 100).toFixed(0)}%) — ` +
    view.perCode.map((c) => `${c.code}: ${c.marked}+${c.remaining}`).join(", ");
}

async function mark(value: Mark): Promise<void> {
  const task = tasks[cursor];
  if (!task) return;
  await queue.submit(sessionId, task.task_id, value);
  cursor += 1;
  showTask();
  refreshDashboard().catch(() => undefined);
}

async function start(): Promise<void> {
  const dataset = (el<HTMLSelectElement>("dataset")).value;
  const annotator = (el<HTMLInputElement>("annotator")).value || "anon";
  const session = await client.createSession(dataset, annotator);
  sessionId = session.session_id;
  tasks = session.tasks;
  cursor = 0;
  showTask();
  await refreshDashboard();
}

async function showAgreement(): Promise<void> {
  const a = (el<HTMLInputElement>("session-a")).value;
  const b = (el<HTMLInputElement>("session-b")).value;
  const view = agreementView(await client.agreement(a, b));
  el("agreement").textContent =
    `kappa ${view.kappa}, correct A ${view.percentCorrectA}, B ${view.percentCorrectB}`;
}

window.addEventListener("online", () => queue.flush().then(showTask));
window.addEventListener("keydown", (ev) => {
  if (ev.key === "c") mark("correct");
  else if (ev.key === "i") mark("incorrect");
  else if (ev.key === "s") mark("skipped");
});

el("start").addEventListener("click", () => start().catch((e) => alert(String(e))));
el("mark-correct").addEventListener("click", () => mark("correct"));
el("mark-incorrect").addEventListener("click", () => mark("incorrect"));
el("mark-skip").addEventListener("click", () => mark("skipped"));
el("finalize").addEventListener("click", () =>
  client.finalize(sessionId).then(() => alert("session finalized")),
);
el("show-agreement").addEventListener("click", () => showAgreement().catch((e) => alert(String(e))));
