/** Thin typed client over /api/v1. All state lives server-side; the client
 * only shuttles JSON. The transport is injectable so tests can run against a
 * mock service and the queue can detect connectivity failures. */

import {
  AgreementResponse,
  AnnotationSubmission,
  FailingCodesResponse,
  Mark,
  MarkAck,
  SessionResponse,
  TasksResponse,
  asSessionResponse,
  asTasksResponse,
} from "./types.js";

export type Transport = (
  method: "GET" | "POST",
  path: string,
  body?: unknown,
) => Promise<unknown>;

export function fetchTransport(baseUrl = ""): Transport {
  return async (method, path, body) => {
    const res = await fetch(baseUrl + path, {
      method,
      headers: body === undefined ? undefined : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!res.ok) {
      let detail = "";
      try {
        const err = await res.json();
        detail = err.message || err.error || "";
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(res.status, detail || `HTTP ${res.status}`);
    }
    return res.json();
  };
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class ApiClient {
  constructor(private transport: Transport) {}

  async createSession(
    dataset: string,
    annotatorId: string,
    perCodeCap = 10,
    seed = 0,
  ): Promise<SessionResponse> {
    const raw = await this.transport("POST", "/api/v1/sessions", {
      dataset,
      annotator_id: annotatorId,
      per_code_cap: perCodeCap,
      seed,
    });
    return asSessionResponse(raw);
  }

  async getTasks(sessionId: string): Promise<TasksResponse> {
    const raw = await this.transport("GET", `/api/v1/sessions/${sessionId}/tasks`);
    return asTasksResponse(raw);
  }

  async submitMark(sessionId: string, taskId: string, mark: Mark): Promise<MarkAck> {
    return (await this.transport("POST", `/api/v1/sessions/${sessionId}/marks`, {
      task_id: taskId,
      mark,
    })) as MarkAck;
  }

  async submitAnnotation(sessionId: string, ann: AnnotationSubmission): Promise<void> {
    await this.transport("POST", `/api/v1/sessions/${sessionId}/annotations`, ann);
  }

  async finalize(sessionId: string): Promise<void> {
    await this.transport("POST", `/api/v1/sessions/${sessionId}/finalize`);
  }

  async agreement(a: string, b: string): Promise<AgreementResponse> {
    return (await this.transport(
      "GET",
      `/api/v1/agreement?a=${encodeURIComponent(a)}&b=${encodeURIComponent(b)}`,
    )) as AgreementResponse;
  }

  async failingCodes(threshold = 0.5): Promise<FailingCodesResponse> {
    return (await this.transport(
      "GET",
      `/api/v1/failing-codes?threshold=${threshold}`,
    )) as FailingCodesResponse;
  }
}
