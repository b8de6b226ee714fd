/** Ordered offline queue for mark submissions.
 *
 * A mark is "pending" until the service acknowledges it; transport failures
 * leave it queued and replay happens FIFO on flush(), so nothing is dropped
 * and order is preserved. Resubmission is safe because marks are
 * last-write-wins server-side (idempotent by task_id + mark).
 */

import { ApiClient } from "./client.js";
import { Mark } from "./types.js";

export interface QueuedMark {
  seq: number;
  sessionId: string;
  taskId: string;
  mark: Mark;
}

export type MarkState = "pending" | "saved";

export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
}

const KEY = "ddaudit_mark_queue_v1";

export class OfflineMarkQueue {
  private queue: QueuedMark[] = [];
  private nextSeq = 0;
  private states = new Map<string, MarkState>();
  private flushing = false;

  constructor(
    private client: ApiClient,
    private storage: StorageLike | null = null,
  ) {
    this.restore();
  }

  /** Current mark state for a task, if any submission was made. */
  stateOf(taskId: string): MarkState | undefined {
    return this.states.get(taskId);
  }

  pendingCount(): number {
    return this.queue.length;
  }

  /** Enqueue and immediately try to flush; resolves once this submission is
   * either saved or left queued after a transport failure. */
  async submit(sessionId: string, taskId: string, mark: Mark): Promise<MarkState> {
    this.queue.push({ seq: this.nextSeq++, sessionId, taskId, mark });
    this.states.set(taskId, "pending");
    this.persist();
    await this.flush();
    return this.states.get(taskId)!;
  }

  /** Replay queued marks in order. Stops at the first failure so ordering
   * holds across retries; safe to call repeatedly (e.g. on "online"). */
  async flush(): Promise<void> {
    if (this.flushing) return;
    this.flushing = true;
    try {
      while (this.queue.length > 0) {
        const head = this.queue[0]!;
        try {
          const ack = await this.client.submitMark(head.sessionId, head.taskId, head.mark);
          if (!ack.ok) break;
        } catch {
          break;
        }
        this.queue.shift();
        // Only flip to saved if no later submission for the task is queued.
        if (!this.queue.some((q) => q.taskId === head.taskId)) {
          this.states.set(head.taskId, "saved");
        }
        this.persist();
      }
    } finally {
      this.flushing = false;
    }
  }

  private persist(): void {
    if (!this.storage) return;
    try {
      this.storage.setItem(KEY, JSON.stringify(this.queue));
    } catch {
      /* quota or private mode; queue still lives in memory */
    }
  }

  private restore(): void {
    if (!this.storage) return;
    try {
      const raw = this.storage.getItem(KEY);
      if (!raw) return;
      this.queue = JSON.parse(raw) as QueuedMark[];
      for (const q of this.queue) {
        this.states.set(q.taskId, "pending");
        this.nextSeq = Math.max(this.nextSeq, q.seq + 1);
      }
    } catch {
      this.queue = [];
    }
  }
}
